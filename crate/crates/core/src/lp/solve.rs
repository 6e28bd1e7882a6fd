use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::instance::{LpInstance, LpKind};
use super::simplex::{LinearProgram, LinearRow, Sense, Simplex, SimplexSolution, SimplexStatus};
use crate::combinatorics::{binom_u128, InputPair};
use crate::error::check_cap;
use crate::rectangles::{
    enumerate_rectangles, max_weight_rectangle, max_weight_rectangle_in_family, OracleConfig,
    RectFamily, Rectangle, WeightMatrix, WitnessSet, DEFAULT_ENUMERATION_CAP,
};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Default cap on materialized columns for the full-enumeration solver.
pub const DEFAULT_MAX_COLUMNS: u128 = 4096;
pub const DEFAULT_MAX_PIVOTS: usize = 1_000_000;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    FullEnumeration,
    ConstraintGeneration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveConfig {
    pub max_columns: u128,
    pub enumeration_cap: u128,
    pub max_pivots: usize,
    pub max_iterations: usize,
    pub oracle: OracleConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_columns: DEFAULT_MAX_COLUMNS,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            max_pivots: DEFAULT_MAX_PIVOTS,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            oracle: OracleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult<T> {
    pub kind: LpKind,
    pub solver: SolverKind,
    pub status: LpStatus,
    pub optimum: Option<T>,
    /// Rectangles with positive weight.
    pub weights: Vec<(Rectangle, T)>,
    /// Combined multiplier of each constraint, in constraint order.
    pub duals: Vec<(InputPair, T)>,
    /// Largest constraint violation of `weights`.
    pub residual: f64,
    /// Maximum dual weight of a family rectangle at termination.
    pub oracle_max: Option<T>,
    pub columns: usize,
    pub iterations: usize,
    pub pivots: usize,
    pub degenerate: bool,
}

impl<T: Scalar> LpResult<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// `log2` of the optimum: the communication lower bound it certifies.
    pub fn log2_optimum(&self) -> Option<f64> {
        self.optimum.as_ref().map(|v| v.to_f64_lossy().log2())
    }

    /// Dual objective `sum lower * y_ge + upper * y_le` of the reported duals.
    pub fn dual_objective(&self, lp: &LpInstance<T>) -> T {
        let mut total = T::zero();
        for (c, (_, y)) in lp.constraints.iter().zip(&self.duals) {
            if y.is_pos() {
                if let Some(l) = &c.lower {
                    total = total + l.clone() * y.clone();
                }
            } else if y.is_neg() {
                if let Some(u) = &c.upper {
                    total = total + u.clone() * y.clone();
                }
            }
        }
        total
    }
}

/// Outcome of checking weights against an LP.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalCheck<T> {
    pub cost: T,
    pub max_violation: f64,
    /// Rectangles outside the LP's family.
    pub outside_family: usize,
    /// Cells of positive-weight rectangles that carry no constraint.
    pub unconstrained_cells: usize,
    pub feasible: bool,
}

/// Checks `weights` against every constraint of `lp`.
pub fn check_primal<T: Scalar>(
    lp: &LpInstance<T>,
    weights: &[(Rectangle, T)],
    tol: f64,
) -> PrimalCheck<T> {
    let index = pair_index(lp);
    let mut coverage = vec![T::zero(); lp.constraints.len()];
    let mut cost = T::zero();
    let mut outside_family = 0;
    let mut unconstrained_cells = 0;
    let mut negative = false;
    for (rect, w) in weights {
        if w.is_neg() {
            negative = true;
        }
        cost = cost + w.clone();
        if !lp.family.contains(rect) {
            outside_family += 1;
        }
        for_each_cell(rect, |i, j| match index.get(&(i, j)) {
            Some(&c) => coverage[c] = coverage[c].clone() + w.clone(),
            None => unconstrained_cells += 1,
        });
    }
    let max_violation = lp
        .constraints
        .iter()
        .zip(&coverage)
        .map(|(c, v)| violation(c.lower.as_ref(), c.upper.as_ref(), v))
        .fold(0.0, f64::max);
    PrimalCheck {
        cost,
        max_violation,
        outside_family,
        unconstrained_cells,
        feasible: !negative && outside_family == 0 && max_violation <= tol,
    }
}

fn violation<T: Scalar>(lower: Option<&T>, upper: Option<&T>, v: &T) -> f64 {
    let mut worst = 0.0f64;
    if let Some(l) = lower {
        worst = worst.max((l.clone() - v.clone()).to_f64_lossy());
    }
    if let Some(u) = upper {
        worst = worst.max((v.clone() - u.clone()).to_f64_lossy());
    }
    worst
}

fn for_each_cell(rect: &Rectangle, mut f: impl FnMut(usize, usize)) {
    let cols: Vec<usize> = rect.col_indices().collect();
    for i in rect.row_indices() {
        for &j in &cols {
            f(i, j);
        }
    }
}

fn pair_index<T>(lp: &LpInstance<T>) -> HashMap<(usize, usize), usize> {
    lp.constraints
        .iter()
        .enumerate()
        .map(|(c, pc)| ((pc.pair.x.index(), pc.pair.y.index()), c))
        .collect()
}

/// Cells whose constraint pins the cover to zero. They get no master row;
/// columns through them are dropped and their dual is set low enough that
/// no rectangle through them prices in.
fn zero_cells<T: Scalar>(lp: &LpInstance<T>) -> HashSet<(usize, usize)> {
    lp.constraints
        .iter()
        .filter(|pc| {
            pc.upper.as_ref().is_some_and(|u| u.is_zero())
                && !pc.lower.as_ref().is_some_and(|l| l.is_pos())
        })
        .map(|pc| (pc.pair.x.index(), pc.pair.y.index()))
        .collect()
}

fn avoids(rect: &Rectangle, zero: &HashSet<(usize, usize)>) -> bool {
    let mut hit = false;
    if !zero.is_empty() {
        for_each_cell(rect, |i, j| hit |= zero.contains(&(i, j)));
    }
    !hit
}

/// Every nonempty rectangle of `family` on the `2^n` matrix.
pub fn family_columns(n: usize, family: RectFamily, cfg: &SolveConfig) -> Result<Vec<Rectangle>> {
    let size = 1usize << n;
    let full_count = |s: usize| -> u128 {
        if s >= 64 {
            u128::MAX
        } else {
            let a = (1u128 << s) - 1;
            a.saturating_mul(a)
        }
    };
    match family {
        RectFamily::Full => {
            check_cap("rectangle columns", full_count(size), cfg.max_columns)?;
            Ok(enumerate_rectangles(size, size, cfg.enumeration_cap)?
                .filter(|r| !r.is_empty())
                .collect())
        }
        RectFamily::Witness { k } => {
            if k > n {
                return Err(Error::ParameterRange(format!("witness size {k} exceeds n={n}")));
            }
            let per_set = full_count(1 << (n - k));
            let bound = per_set.saturating_mul(binom_u128(n as u64, k as u64));
            check_cap("rectangle columns", bound, cfg.max_columns)?;
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for set in WitnessSet::all(n, k) {
                let idx = superset_indices(n, &set);
                for sub in enumerate_rectangles(idx.len(), idx.len(), cfg.enumeration_cap)? {
                    if sub.is_empty() {
                        continue;
                    }
                    let rect = lift(size, &idx, &sub);
                    if seen.insert(rect.clone()) {
                        out.push(rect);
                    }
                }
            }
            Ok(out)
        }
        RectFamily::AvoidDisjoint => {
            let out: Vec<Rectangle> = enumerate_rectangles(size, size, cfg.enumeration_cap)?
                .filter(|r| !r.is_empty() && family.contains(r))
                .collect();
            check_cap("rectangle columns", out.len() as u128, cfg.max_columns)?;
            Ok(out)
        }
    }
}

fn superset_indices(n: usize, set: &WitnessSet) -> Vec<usize> {
    let mask = set.as_bits().mask();
    (0..1usize << n).filter(|&i| i as u64 & mask == mask).collect()
}

fn lift(size: usize, idx: &[usize], sub: &Rectangle) -> Rectangle {
    Rectangle::from_indices(
        size,
        size,
        sub.row_indices().map(|i| idx[i]),
        sub.col_indices().map(|j| idx[j]),
    )
    .expect("indices in range")
}

/// Row `r` of the simplex program belongs to constraint `owner[r]`.
struct Master<T> {
    program: LinearProgram<T>,
    owner: Vec<usize>,
}

fn build_master<T: Scalar>(lp: &LpInstance<T>, columns: &[Rectangle]) -> Master<T> {
    let index = pair_index(lp);
    let mut hits: Vec<Vec<usize>> = vec![Vec::new(); lp.constraints.len()];
    for (v, rect) in columns.iter().enumerate() {
        for_each_cell(rect, |i, j| {
            if let Some(&c) = index.get(&(i, j)) {
                hits[c].push(v);
            }
        });
    }
    let zero = zero_cells(lp);
    let mut rows = Vec::new();
    let mut owner = Vec::new();
    for (c, pc) in lp.constraints.iter().enumerate() {
        if zero.contains(&(pc.pair.x.index(), pc.pair.y.index())) {
            continue;
        }
        let coeffs: Vec<(usize, T)> = hits[c].iter().map(|&v| (v, T::one())).collect();
        match (&pc.lower, &pc.upper) {
            (Some(l), Some(u)) if l == u => {
                rows.push(LinearRow { coeffs, sense: Sense::Eq, rhs: l.clone() });
                owner.push(c);
            }
            (lower, upper) => {
                if let Some(l) = lower.as_ref().filter(|l| l.is_pos()) {
                    rows.push(LinearRow { coeffs: coeffs.clone(), sense: Sense::Ge, rhs: l.clone() });
                    owner.push(c);
                }
                if let Some(u) = upper {
                    rows.push(LinearRow { coeffs, sense: Sense::Le, rhs: u.clone() });
                    owner.push(c);
                }
            }
        }
    }
    Master {
        program: LinearProgram {
            num_vars: columns.len(),
            objective: vec![T::one(); columns.len()],
            rows,
        },
        owner,
    }
}

struct MasterSolution<T> {
    status: LpStatus,
    value: T,
    x: Vec<T>,
    duals: Vec<T>,
    pivots: usize,
}

fn solve_master<T: Scalar>(
    lp: &LpInstance<T>,
    columns: &[Rectangle],
    max_pivots: usize,
) -> Result<MasterSolution<T>> {
    let master = build_master(lp, columns);
    let sol = Simplex::new(&master.program).run(max_pivots);
    master_solution(lp, &master.owner, sol)
}

fn master_solution<T: Scalar>(
    lp: &LpInstance<T>,
    owner: &[usize],
    sol: SimplexSolution<T>,
) -> Result<MasterSolution<T>> {
    let status = match sol.status {
        SimplexStatus::Optimal => LpStatus::Optimal,
        SimplexStatus::Infeasible => LpStatus::Infeasible,
        SimplexStatus::Unbounded => LpStatus::Unbounded,
        SimplexStatus::PivotLimit => {
            return Err(Error::NonConvergence { iterations: sol.pivots })
        }
    };
    let mut duals = vec![T::zero(); lp.constraints.len()];
    for (r, y) in sol.duals.iter().enumerate() {
        let c = owner[r];
        duals[c] = duals[c].clone() + y.clone();
    }
    let zero = zero_cells(lp);
    if !zero.is_empty() {
        let low = -duals
            .iter()
            .filter(|y| y.is_pos())
            .fold(T::one(), |acc, y| acc + y.clone());
        for (pc, y) in lp.constraints.iter().zip(duals.iter_mut()) {
            if zero.contains(&(pc.pair.x.index(), pc.pair.y.index())) {
                *y = low.clone();
            }
        }
    }
    Ok(MasterSolution {
        status,
        value: sol.value,
        x: sol.x,
        duals,
        pivots: sol.pivots,
    })
}

fn dual_matrix<T: Scalar>(lp: &LpInstance<T>, duals: &[T]) -> Result<WeightMatrix<T>> {
    let mut w = WeightMatrix::comm(lp.n)?;
    for (pc, y) in lp.constraints.iter().zip(duals) {
        w.set_pair(&pc.pair, y.clone());
    }
    Ok(w)
}

fn finish<T: Scalar>(
    lp: &LpInstance<T>,
    solver: SolverKind,
    columns: &[Rectangle],
    sol: MasterSolution<T>,
    oracle_max: Option<T>,
    iterations: usize,
) -> LpResult<T> {
    let optimal = sol.status == LpStatus::Optimal;
    let weights: Vec<(Rectangle, T)> = if optimal {
        columns
            .iter()
            .zip(&sol.x)
            .filter(|(_, w)| w.is_pos())
            .map(|(r, w)| (r.clone(), w.clone()))
            .collect()
    } else {
        Vec::new()
    };
    let residual = if optimal {
        check_primal(lp, &weights, f64::INFINITY).max_violation
    } else {
        0.0
    };
    LpResult {
        kind: lp.kind,
        solver,
        status: sol.status,
        optimum: optimal.then_some(sol.value),
        weights,
        duals: lp
            .constraints
            .iter()
            .zip(sol.duals)
            .map(|(c, y)| (c.pair, y))
            .collect(),
        residual,
        oracle_max: if optimal { oracle_max } else { None },
        columns: columns.len(),
        iterations,
        pivots: sol.pivots,
        degenerate: lp.degenerate,
    }
}

/// Solves over every member of the family at once.
pub fn solve_full_enumeration<T: Scalar>(lp: &LpInstance<T>, cfg: &SolveConfig) -> Result<LpResult<T>> {
    let zero = zero_cells(lp);
    let mut columns = family_columns(lp.n, lp.family, cfg)?;
    columns.retain(|r| avoids(r, &zero));
    let sol = solve_master(lp, &columns, cfg.max_pivots)?;
    let oracle_max = if sol.status == LpStatus::Optimal {
        let w = dual_matrix(lp, &sol.duals)?;
        max_weight_rectangle_in_family(&w, lp.n, lp.family, &cfg.oracle)
            .ok()
            .map(|hit| hit.value)
    } else {
        None
    };
    Ok(finish(lp, SolverKind::FullEnumeration, &columns, sol, oracle_max, 1))
}

/// Rectangles with dual weight above `1 + tol`, at most one per witness set
/// (one overall for the other families), and the overall maximum.
fn price<T: Scalar>(
    lp: &LpInstance<T>,
    duals: &[T],
    tol: &T,
    cfg: &OracleConfig,
) -> Result<(Vec<Rectangle>, T)> {
    let w = dual_matrix(lp, duals)?;
    let bar = T::one() + tol.clone();
    match lp.family {
        RectFamily::Witness { k } => {
            let size = 1usize << lp.n;
            let mut best = T::zero();
            let mut found = Vec::new();
            for set in WitnessSet::all(lp.n, k) {
                let idx = superset_indices(lp.n, &set);
                let (r, v) = max_weight_rectangle(&w.restrict(&idx, &idx), cfg)?;
                if v > bar {
                    found.push(lift(size, &idx, &r));
                }
                if v > best {
                    best = v;
                }
            }
            Ok((found, best))
        }
        family => {
            let hit = max_weight_rectangle_in_family(&w, lp.n, family, cfg)?;
            let found = if hit.value > bar { vec![hit.rect] } else { Vec::new() };
            Ok((found, hit.value))
        }
    }
}

/// Column generation: the restricted master starts from every singleton
/// cell with a positive lower bound plus, for the witness family, the full
/// sub-matrix fixing each witness set; pricing calls the exact oracle on the
/// master's duals until no family rectangle has dual weight above `1 + tol`.
pub fn solve_constraint_generation<T: Scalar>(
    lp: &LpInstance<T>,
    tol: T,
    cfg: &SolveConfig,
) -> Result<LpResult<T>> {
    let size = 1usize << lp.n;
    let zero = zero_cells(lp);
    let mut columns: Vec<Rectangle> = Vec::new();
    let mut seen: HashSet<Rectangle> = HashSet::new();
    for pc in &lp.constraints {
        if !pc.lower.as_ref().is_some_and(|l| l.is_pos()) {
            continue;
        }
        if !lp.family.admits_pair(&pc.pair) {
            return Ok(infeasible(lp, SolverKind::ConstraintGeneration));
        }
        let r = Rectangle::from_indices(size, size, [pc.pair.x.index()], [pc.pair.y.index()])?;
        if seen.insert(r.clone()) {
            columns.push(r);
        }
    }
    if let RectFamily::Witness { k } = lp.family {
        for set in WitnessSet::all(lp.n, k) {
            let r = set.fixing_rectangle();
            if avoids(&r, &zero) && seen.insert(r.clone()) {
                columns.push(r);
            }
        }
    }
    // One simplex object for the whole run: new columns keep the previous
    // basis feasible, so each round resumes phase 2.
    let master = build_master(lp, &columns);
    let mut rows_of: Vec<Vec<usize>> = vec![Vec::new(); lp.constraints.len()];
    for (r, &c) in master.owner.iter().enumerate() {
        rows_of[c].push(r);
    }
    let index = pair_index(lp);
    let mut simplex = Simplex::new(&master.program);
    for iteration in 1..=cfg.max_iterations {
        let budget = simplex.pivots() + cfg.max_pivots;
        let sol = master_solution(lp, &master.owner, simplex.run(budget))?;
        if sol.status != LpStatus::Optimal {
            return Ok(finish(lp, SolverKind::ConstraintGeneration, &columns, sol, None, iteration));
        }
        let (found, best) = price(lp, &sol.duals, &tol, &cfg.oracle)?;
        let fresh: Vec<Rectangle> = found.into_iter().filter(|r| seen.insert(r.clone())).collect();
        if fresh.is_empty() {
            return Ok(finish(
                lp,
                SolverKind::ConstraintGeneration,
                &columns,
                sol,
                Some(best),
                iteration,
            ));
        }
        for rect in fresh {
            let mut coeffs = Vec::new();
            for_each_cell(&rect, |i, j| {
                if let Some(&c) = index.get(&(i, j)) {
                    coeffs.extend(rows_of[c].iter().map(|&r| (r, T::one())));
                }
            });
            simplex.add_column(T::one(), &coeffs);
            columns.push(rect);
        }
    }
    Err(Error::NonConvergence { iterations: cfg.max_iterations })
}

fn infeasible<T: Scalar>(lp: &LpInstance<T>, solver: SolverKind) -> LpResult<T> {
    LpResult {
        kind: lp.kind,
        solver,
        status: LpStatus::Infeasible,
        optimum: None,
        weights: Vec::new(),
        duals: lp.constraints.iter().map(|c| (c.pair, T::zero())).collect(),
        residual: 0.0,
        oracle_max: None,
        columns: 0,
        iterations: 0,
        pivots: 0,
        degenerate: lp.degenerate,
    }
}

/// Full enumeration when the family fits under the column cap, constraint
/// generation otherwise.
pub fn solve_auto<T: Scalar>(lp: &LpInstance<T>, tol: T, cfg: &SolveConfig) -> Result<LpResult<T>> {
    match solve_full_enumeration(lp, cfg) {
        Err(Error::CapExceeded { .. }) => solve_constraint_generation(lp, tol, cfg),
        other => other,
    }
}

/// The singleton rectangle of a pair, handy for hand-built solutions.
pub fn cell(pair: &InputPair) -> Rectangle {
    let size = 1usize << pair.n();
    Rectangle::from_indices(size, size, [pair.x.index()], [pair.y.index()]).expect("pair in range")
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{Family, TruthTable};
    use crate::lp::instance::{build_lovasz_lp, build_search_lp, build_smooth_lp};
    use crate::Rational;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn and_lovasz() {
        let f = TruthTable::family(Family::And, 1).unwrap();
        let lp = build_lovasz_lp(&f, Rational::zero()).unwrap();
        let full = solve_full_enumeration(&lp, &SolveConfig::default()).unwrap();
        assert_eq!(full.optimum, Some(Rational::one()));
        assert_eq!(full.columns, 1);
        assert_eq!(full.residual, 0.0);
        let cg = solve_constraint_generation(&lp, Rational::zero(), &SolveConfig::default()).unwrap();
        assert_eq!(cg.optimum, Some(Rational::one()));
        assert!(cg.oracle_max.unwrap() <= Rational::one());
    }

    #[test]
    fn eq_lovasz_is_four() {
        let f = TruthTable::family(Family::Eq, 2).unwrap();
        let lp = build_lovasz_lp(&f, Rational::zero()).unwrap();
        let r = solve_full_enumeration(&lp, &SolveConfig::default()).unwrap();
        assert_eq!(r.optimum, Some(q(4, 1)));
        assert_eq!(r.dual_objective(&lp), q(4, 1));
    }

    #[test]
    fn constant_functions() {
        let zero = TruthTable::constant(2, false).unwrap();
        let r = solve_full_enumeration(&build_lovasz_lp(&zero, q(1, 4)).unwrap(), &SolveConfig::default())
            .unwrap();
        assert_eq!(r.optimum, Some(Rational::zero()));
        let one = TruthTable::constant(1, true).unwrap();
        let r = solve_full_enumeration(&build_smooth_lp(&one, Rational::zero()).unwrap(), &SolveConfig::default())
            .unwrap();
        assert_eq!(r.optimum, Some(Rational::one()));
    }

    #[test]
    fn search_small() {
        let lp = build_search_lp(1, 1, Rational::one()).unwrap();
        let r = solve_full_enumeration(&lp, &SolveConfig::default()).unwrap();
        assert_eq!(r.optimum, Some(Rational::one()));

        let lp = build_search_lp(2, 1, Rational::zero()).unwrap();
        let r = solve_full_enumeration(&lp, &SolveConfig::default()).unwrap();
        assert_eq!(r.optimum, Some(Rational::zero()));

        let lp = build_search_lp(2, 1, Rational::one()).unwrap();
        let full = solve_full_enumeration(&lp, &SolveConfig::default()).unwrap();
        let cg = solve_constraint_generation(&lp, Rational::zero(), &SolveConfig::default()).unwrap();
        assert_eq!(full.optimum, cg.optimum);
        let hand = vec![
            (Rectangle::parse(2, "01,11", "01,11").unwrap(), Rational::one()),
            (Rectangle::parse(2, "10,11", "10").unwrap(), Rational::one()),
            (Rectangle::parse(2, "10", "11").unwrap(), Rational::one()),
        ];
        let check = check_primal(&lp, &hand, 0.0);
        assert!(check.feasible);
        assert!(full.optimum.clone().unwrap() <= check.cost);
        assert!(check_primal(&lp, &full.weights, 0.0).feasible);
    }

    #[test]
    fn missing_family_is_infeasible() {
        let lp = build_search_lp(2, 1, Rational::one())
            .unwrap()
            .with_family(RectFamily::Witness { k: 2 });
        let full = solve_full_enumeration(&lp, &SolveConfig::default()).unwrap();
        assert_eq!(full.status, LpStatus::Infeasible);
        let cg = solve_constraint_generation(&lp, Rational::zero(), &SolveConfig::default()).unwrap();
        assert_eq!(cg.status, LpStatus::Infeasible);
    }

    #[test]
    fn float_cg_matches_exact() {
        let lp = build_search_lp(2, 1, 1.0).unwrap();
        let cg = solve_constraint_generation(&lp, 1e-9, &SolveConfig::default()).unwrap();
        let exact = solve_full_enumeration(&build_search_lp(2, 1, Rational::one()).unwrap(), &SolveConfig::default())
            .unwrap();
        let e = exact.optimum.unwrap().to_f64_lossy();
        assert!((cg.optimum.unwrap() - e).abs() < 1e-9);
    }

    #[test]
    fn forbidden_rows_relax() {
        let lp = build_search_lp(2, 1, Rational::one()).unwrap();
        let a = solve_full_enumeration(&lp, &SolveConfig::default()).unwrap();
        let full_family = lp.with_forbidden_rows().unwrap();
        let b = solve_full_enumeration(&full_family, &SolveConfig::default()).unwrap();
        // The full family also holds rectangles whose pairs all intersect
        // without a common coordinate, e.g. {01,10,11}x{11}.
        assert_eq!(a.optimum, Some(q(3, 1)));
        assert_eq!(b.optimum, Some(q(5, 2)));
    }

    #[test]
    fn column_cap() {
        let f = TruthTable::family(Family::Eq, 3).unwrap();
        let lp = build_lovasz_lp(&f, 0.0).unwrap();
        assert!(matches!(
            solve_full_enumeration(&lp, &SolveConfig::default()),
            Err(Error::CapExceeded { .. })
        ));
    }
}
