use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use commlp::combinatorics::MuParams;
use commlp::lp::{
    build_paper_dual_certificate, build_smooth_dual_ndisj, verify_dual_certificate, DualCertificate, VerifyCaps,
    VerifyMode,
};
use commlp::rectangles::RectFamily;
use commlp::scalar::parse_rational;
use serde_json::{json, Value};

use crate::report::{self, AnyResult, Caps, OutputArgs, Timer};
use crate::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    /// Scaled `mu` distributions on a universe of `n + k` for the search LP.
    Search,
    /// Smooth-rectangle dual for NDISJ with `m = n/4`.
    SmoothNdisj,
    /// All-zero weights.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Exhaustive,
    Oracle,
    Both,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Load a certificate from JSON instead of constructing one.
    #[arg(long, conflicts_with = "construction")]
    pub input: Option<PathBuf>,
    #[arg(long = "kind", value_enum, default_value = "search")]
    pub construction: Construction,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Set size; defaults to `floor(n/4)`.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value = "0")]
    pub alpha: String,
    #[arg(long, default_value = "0")]
    pub beta: String,
    #[arg(long, default_value = "0")]
    pub eps: String,
    /// Universe of a zero certificate.
    #[arg(long)]
    pub universe: Option<usize>,
    /// Rectangle family of a zero certificate (full, witness:K, avoid-disjoint).
    #[arg(long, default_value = "full")]
    pub family: RectFamily,
    #[arg(long, value_enum, default_value = "both")]
    pub verify: Check,
    /// Feasibility slack on `max weight <= 1`.
    #[arg(long, default_value = "0")]
    pub tol: String,
    /// Write the certificate as JSON.
    #[arg(long)]
    pub save: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn construct(a: &CertifyArgs, caps: &Caps) -> AnyResult<DualCertificate> {
    if let Some(path) = &a.input {
        return Ok(DualCertificate::from_json(&fs::read_to_string(path)?)?);
    }
    let n = || a.n.ok_or("--n is required");
    Ok(match a.construction {
        Construction::Search => {
            let n = n()?;
            let m = a.m.unwrap_or(n / 4);
            for p in [MuParams::new(a.k, n + a.k, m + a.k)?, MuParams::new(2 * a.k, n + a.k, m + a.k)?] {
                let size = p.support_size();
                if size > caps.support.into() {
                    return Err(format!("support {size} of {p:?} exceeds cap {}", caps.support).into());
                }
            }
            build_paper_dual_certificate(n, a.k, m, &parse_rational(&a.alpha)?, &parse_rational(&a.beta)?)?
        }
        Construction::SmoothNdisj => build_smooth_dual_ndisj(n()?, &parse_rational(&a.beta)?, &parse_rational(&a.eps)?)?,
        Construction::Zero => {
            let u = a.universe.or(a.n).ok_or("--universe or --n is required")?;
            DualCertificate::zero(u, a.family)
        }
    })
}

pub fn run(a: &CertifyArgs) -> AnyResult<Status> {
    let timer = Timer::start();
    let caps = Caps::from_env()?;
    let cert = construct(a, &caps)?;
    if let Some(path) = &a.save {
        fs::write(path, cert.to_json())?;
    }
    let tol = parse_rational(&a.tol)?;
    let vcaps = VerifyCaps {
        enumeration: caps.enumeration,
        oracle: caps.oracle,
    };
    let modes: &[VerifyMode] = match a.verify {
        Check::Exhaustive => &[VerifyMode::Exhaustive],
        Check::Oracle => &[VerifyMode::Oracle],
        Check::Both => &[VerifyMode::Exhaustive, VerifyMode::Oracle],
    };
    let mut checks = Vec::new();
    let mut feasible = cert.check_signs();
    let mut maxima = Vec::new();
    for &mode in modes {
        let r = verify_dual_certificate(&cert, mode, &tol, &vcaps)?;
        feasible &= r.feasible;
        maxima.push(r.max_weight.clone());
        let mut c = json!({
            "mode": mode,
            "max_weight": report::exact(&r.max_weight),
            "feasible": r.feasible,
        });
        if !r.feasible {
            c["witness_rectangle"] = report::rectangle(&r.argmax);
            c["witness_set"] = serde_json::to_value(r.witness)?;
        }
        checks.push(c);
    }
    let value = cert.value();
    let expected = cert.expected_value();
    let mut rep = json!({
        "kind": cert.kind,
        "n": cert.n,
        "k": cert.k,
        "m": cert.m,
        "alpha": report::exact(&cert.alpha),
        "beta": report::exact(&cert.beta),
        "sigma": report::exact(&cert.sigma),
        "universe": cert.universe,
        "rectangle_family": cert.family.to_string(),
        "value": report::exact(&value),
        "expected_value": report::exact(&expected),
        "value_matches": value == expected,
        "exact_scale": cert.exact,
        "degenerate": cert.degenerate,
        "signs_ok": cert.check_signs(),
        "phi_support": cert.phi.len(),
        "psi_support": cert.psi.len(),
        "verification": Value::Array(checks),
        "modes_agree": maxima.windows(2).all(|w| w[0] == w[1]),
        "feasible": feasible,
    });
    timer.stamp(&a.output, &mut rep);
    report::emit(&report::render(&rep, a.output.format)?, &a.output)?;
    Ok(if feasible { Status::Ok } else { Status::Failed })
}
