use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use commlp::functions::{Family, TruthTable};
use commlp::lp::{
    apply_ambiguity_variant, build_lovasz_lp, build_search_lp, build_smooth_lp, solve_auto,
    solve_constraint_generation, solve_full_enumeration, LpInstance, LpKind, LpResult, LpStatus, SolveConfig,
};
use commlp::scalar::parse_rational;
use commlp::{Rational, Scalar};
use serde_json::{json, Value};

use crate::report::{self, AnyResult, Caps, OutputArgs, Timer};
use crate::Status;

const FLOAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Auto,
    Full,
    Cg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Arith {
    Exact,
    Float,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// LP kind: search, lovasz or smooth.
    #[arg(long = "lp", default_value = "lovasz")]
    pub kind: LpKind,
    /// Named function family (NDISJ, DISJ, EQ, IP, AND).
    #[arg(long, conflicts_with = "table")]
    pub family: Option<Family>,
    /// Truth-table file: `n`, then `2^n` rows of `2^n` zeros and ones.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "1")]
    pub sigma: String,
    #[arg(long, default_value = "0")]
    pub eps: String,
    /// Ambiguity rate for the search LP: caps become `2^{rate k}`.
    #[arg(long)]
    pub ambiguity: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub solver: Solver,
    #[arg(long, value_enum, default_value = "exact")]
    pub arith: Arith,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn table(a: &BoundArgs) -> AnyResult<TruthTable> {
    if let Some(path) = &a.table {
        let t = TruthTable::parse(&fs::read_to_string(path)?)?;
        if a.n.is_some_and(|n| n != t.n()) {
            return Err(format!("--n {} disagrees with the table's n = {}", a.n.unwrap(), t.n()).into());
        }
        return Ok(t);
    }
    let family = a.family.ok_or("--family or --table is required for this LP")?;
    let n = a.n.ok_or("--n is required")?;
    Ok(TruthTable::family(family, n)?)
}

fn build<T: Scalar>(a: &BoundArgs, f: Option<&TruthTable>, kind: LpKind) -> AnyResult<LpInstance<T>> {
    let lp = match kind {
        LpKind::Search => {
            let n = a.n.ok_or("--n is required")?;
            let k = a.k.ok_or("--k is required for the search LP")?;
            let lp = build_search_lp(n, k, T::from_rational(&parse_rational(&a.sigma)?))?;
            match &a.ambiguity {
                Some(rate) => apply_ambiguity_variant(&lp, &parse_rational(rate)?, k)?,
                None => lp,
            }
        }
        LpKind::Lovasz | LpKind::Smooth => {
            if a.ambiguity.is_some() {
                return Err("--ambiguity applies to the search LP only".into());
            }
            let f = f.expect("table built for function LPs");
            let eps = T::from_rational(&parse_rational(&a.eps)?);
            if kind == LpKind::Lovasz {
                build_lovasz_lp(f, eps)?
            } else {
                build_smooth_lp(f, eps)?
            }
        }
    };
    Ok(lp)
}

fn solve<T: Scalar>(lp: &LpInstance<T>, solver: Solver, cfg: &SolveConfig) -> AnyResult<LpResult<T>> {
    let tol = if T::EXACT { T::zero() } else { T::tolerance() };
    Ok(match solver {
        Solver::Auto => solve_auto(lp, tol, cfg)?,
        Solver::Full => solve_full_enumeration(lp, cfg)?,
        Solver::Cg => solve_constraint_generation(lp, tol, cfg)?,
    })
}

fn describe<T: Scalar>(lp: &LpInstance<T>, r: &LpResult<T>) -> Value {
    json!({
        "lp": lp.kind.to_string(),
        "n": lp.n,
        "rectangle_family": lp.family.to_string(),
        "solver": r.solver,
        "status": r.status,
        "optimum": r.optimum.as_ref().map(|v| report::scalar(v, FLOAT_TOL)),
        "log2_optimum": r.log2_optimum().map(|v| report::float(v, FLOAT_TOL)),
        "dual_objective": r.optimum.as_ref().map(|_| report::scalar(&r.dual_objective(lp), FLOAT_TOL)),
        "residual": report::float(r.residual, FLOAT_TOL),
        "columns": r.columns,
        "iterations": r.iterations,
        "pivots": r.pivots,
        "degenerate": r.degenerate,
        "constraints": lp.constraints.len(),
    })
}

fn run_typed<T: Scalar>(a: &BoundArgs, cfg: &SolveConfig) -> AnyResult<(Value, bool)> {
    let f = match a.kind {
        LpKind::Search => None,
        _ => Some(table(a)?),
    };
    let lp = build::<T>(a, f.as_ref(), a.kind)?;
    let res = solve(&lp, a.solver, cfg)?;
    let mut rep = describe(&lp, &res);
    rep["arith"] = json!(T::mode_tag());
    match a.kind {
        LpKind::Search => {
            rep["k"] = json!(lp.k);
            rep["sigma"] = report::exact(&parse_rational(&a.sigma)?);
            if let Some(rate) = &a.ambiguity {
                rep["ambiguity_rate"] = report::exact(&parse_rational(rate)?);
            }
        }
        kind => {
            rep["eps"] = report::exact(&parse_rational(&a.eps)?);
            rep["function"] = json!(match (&a.table, a.family) {
                (Some(p), _) => format!("table:{}", p.display()),
                (None, Some(fam)) => fam.to_string(),
                _ => unreachable!(),
            });
            if kind == LpKind::Smooth {
                let lov = build::<T>(a, f.as_ref(), LpKind::Lovasz)?;
                let lres = solve(&lov, a.solver, cfg)?;
                rep["lovasz"] = describe(&lov, &lres);
                if let (Some(s), Some(l)) = (&res.optimum, &lres.optimum) {
                    let tol = T::from_f64(FLOAT_TOL).unwrap_or_else(T::zero);
                    let tol = if T::EXACT { T::zero() } else { tol };
                    rep["smooth_ge_lovasz"] = json!(s.clone() + tol >= *l);
                }
            }
        }
    }
    Ok((rep, res.status == LpStatus::Optimal))
}

pub fn run(a: &BoundArgs) -> AnyResult<Status> {
    let timer = Timer::start();
    let caps = Caps::from_env()?;
    let cfg = SolveConfig {
        max_columns: caps.columns,
        enumeration_cap: caps.enumeration,
        oracle: caps.oracle,
        ..SolveConfig::default()
    };
    let (mut rep, ok) = match a.arith {
        Arith::Exact => run_typed::<Rational>(a, &cfg)?,
        Arith::Float => run_typed::<f64>(a, &cfg)?,
    };
    timer.stamp(&a.output, &mut rep);
    report::emit(&report::render(&rep, a.output.format)?, &a.output)?;
    Ok(if ok { Status::Ok } else { Status::Failed })
}
