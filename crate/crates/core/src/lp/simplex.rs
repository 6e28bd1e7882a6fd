//! Dense two-phase primal simplex, generic over [`Scalar`].
//!
//! Exact instantiations (`BigRational`) compare against zero; float ones use
//! the scalar tolerance. Entering columns follow Dantzig's rule and fall back
//! to Bland's rule after a run of degenerate pivots, which rules out cycling.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow<T> {
    pub coeffs: Vec<(usize, T)>,
    pub sense: Sense,
    pub rhs: T,
}

/// `min objective . x` subject to `rows`, `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub num_vars: usize,
    pub objective: Vec<T>,
    pub rows: Vec<LinearRow<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
    PivotLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution<T> {
    pub status: SimplexStatus,
    pub value: T,
    pub x: Vec<T>,
    /// One multiplier per row, in the sign convention of the original row:
    /// `>= 0` for `Ge`, `<= 0` for `Le`, free for `Eq`.
    pub duals: Vec<T>,
    pub pivots: usize,
}

const DEGENERATE_RUN: usize = 50;

struct Tableau<T> {
    /// `m` rows of `ncols + 1` entries, last entry is the right-hand side.
    rows: Vec<Vec<T>>,
    reduced: Vec<T>,
    basis: Vec<usize>,
    ncols: usize,
    artificial: Vec<bool>,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = T::one() / self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        let support: Vec<usize> = (0..=self.ncols)
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &support {
                row[j] = snap(row[j].clone() - f.clone() * pivot_row[j].clone());
            }
            if !T::EXACT {
                row[c] = T::zero();
                let rhs = &mut row[self.ncols];
                if !rhs.is_neg() && *rhs < T::zero() {
                    *rhs = T::zero();
                }
            }
        }
        if !self.reduced[c].is_zero() {
            let f = self.reduced[c].clone();
            for &j in &support {
                self.reduced[j] = snap(self.reduced[j].clone() - f.clone() * pivot_row[j].clone());
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn set_costs(&mut self, costs: &[T]) {
        let mut d: Vec<T> = costs.to_vec();
        d.push(T::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &costs[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    d[j] = d[j].clone() - cb.clone() * v.clone();
                }
            }
        }
        self.reduced = d;
    }

    fn objective(&self) -> T {
        -self.reduced[self.ncols].clone()
    }

    /// Runs to optimality. `allow(j)` says whether column `j` may enter.
    fn optimize(&mut self, allow: impl Fn(usize) -> bool, max_pivots: usize) -> SimplexStatus {
        let mut degenerate = 0usize;
        // Once stalled, stay with Bland's rule for the rest of the run.
        let mut bland = false;
        let min_pivot = if T::EXACT {
            T::zero()
        } else {
            T::tolerance() * T::from_f64(100.0).unwrap()
        };
        loop {
            if self.pivots >= max_pivots {
                return SimplexStatus::PivotLimit;
            }
            bland |= degenerate >= DEGENERATE_RUN;
            let mut entering: Option<usize> = None;
            for j in 0..self.ncols {
                if !allow(j) || !self.reduced[j].is_neg() {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(e) if !bland && self.reduced[j] < self.reduced[e] => entering = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some(c) = entering else {
                return SimplexStatus::Optimal;
            };
            // A basic variable barred from entering is an artificial left at
            // zero; it must leave before any entry can move it off zero.
            let stuck = |i: usize| !allow(self.basis[i]);
            let eligible: Vec<usize> = (0..self.rows.len())
                .filter(|&i| {
                    let a = &self.rows[i][c];
                    *a > min_pivot || (stuck(i) && -a.clone() > min_pivot)
                })
                .collect();
            let ratio = |i: usize| {
                if stuck(i) {
                    return T::zero();
                }
                let rhs = self.rhs(i).clone();
                let rhs = if rhs < T::zero() && !rhs.is_neg() { T::zero() } else { rhs };
                rhs / self.rows[i][c].clone()
            };
            let Some(best) = eligible.iter().map(|&i| ratio(i)).reduce(|a, b| if b < a { b } else { a }) else {
                return SimplexStatus::Unbounded;
            };
            // Rows within tolerance of the minimum ratio tie. Bland breaks ties
            // by basic index, otherwise the largest pivot element wins.
            let mut r = usize::MAX;
            for &i in &eligible {
                if !(ratio(i) - best.clone()).approx_zero() {
                    continue;
                }
                let take = r == usize::MAX
                    || if bland {
                        self.basis[i] < self.basis[r]
                    } else {
                        self.rows[i][c].abs() > self.rows[r][c].abs()
                    };
                if take {
                    r = i;
                }
            }
            if best.approx_zero() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Flushes float round-off to zero; exact values pass through.
fn snap<T: Scalar>(v: T) -> T {
    if !T::EXACT && v.abs() < T::tolerance() * T::from_f64(1e-3).unwrap() {
        T::zero()
    } else {
        v
    }
}

/// A simplex run that can be resumed after appending columns: the last
/// basis stays primal feasible, so only phase 2 is repeated.
pub struct Simplex<T> {
    tab: Tableau<T>,
    /// Tableau column of each structural variable.
    structural: Vec<usize>,
    objective: Vec<T>,
    /// Phase-2 cost of every tableau column.
    costs: Vec<T>,
    sign: Vec<T>,
    unit_col: Vec<usize>,
    feasible: bool,
}

impl<T: Scalar> Simplex<T> {
    pub fn new(lp: &LinearProgram<T>) -> Self {
        let nv = lp.num_vars;
        let m = lp.rows.len();
        let mut sign = vec![T::one(); m];
        let mut senses = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let flip = row.rhs.is_negative();
            if flip {
                sign[i] = -T::one();
            }
            senses.push(match (row.sense, flip) {
                (Sense::Le, true) => Sense::Ge,
                (Sense::Ge, true) => Sense::Le,
                (s, _) => s,
            });
        }
        let mut ncols = nv;
        let mut unit_col = vec![0; m];
        let mut surplus_col = vec![None; m];
        let mut artificial = vec![false; nv];
        for i in 0..m {
            match senses[i] {
                Sense::Le => {
                    unit_col[i] = ncols;
                    artificial.push(false);
                    ncols += 1;
                }
                Sense::Ge => {
                    surplus_col[i] = Some(ncols);
                    artificial.push(false);
                    unit_col[i] = ncols + 1;
                    artificial.push(true);
                    ncols += 2;
                }
                Sense::Eq => {
                    unit_col[i] = ncols;
                    artificial.push(true);
                    ncols += 1;
                }
            }
        }
        let mut rows = Vec::with_capacity(m);
        for (i, row) in lp.rows.iter().enumerate() {
            let mut r = vec![T::zero(); ncols + 1];
            for (j, v) in &row.coeffs {
                r[*j] = r[*j].clone() + v.clone() * sign[i].clone();
            }
            if let Some(s) = surplus_col[i] {
                r[s] = -T::one();
            }
            r[unit_col[i]] = T::one();
            r[ncols] = row.rhs.clone() * sign[i].clone();
            rows.push(r);
        }
        let mut costs = vec![T::zero(); ncols];
        costs[..nv].clone_from_slice(&lp.objective);
        Self {
            tab: Tableau {
                rows,
                reduced: Vec::new(),
                basis: unit_col.clone(),
                ncols,
                artificial,
                pivots: 0,
            },
            structural: (0..nv).collect(),
            objective: lp.objective.clone(),
            costs,
            sign,
            unit_col,
            feasible: false,
        }
    }

    pub fn pivots(&self) -> usize {
        self.tab.pivots
    }

    /// Appends a structural variable with objective `cost` and constraint
    /// coefficients `coeffs` (row index, value). Call after an optimal run.
    pub fn add_column(&mut self, cost: T, coeffs: &[(usize, T)]) {
        let tab = &mut self.tab;
        // The columns of the initial unit basis hold B^-1.
        let mut col = vec![T::zero(); tab.rows.len()];
        for (r, row) in tab.rows.iter().enumerate() {
            let mut v = T::zero();
            for (i, a) in coeffs {
                let b = &row[self.unit_col[*i]];
                if !b.is_zero() {
                    v = v + b.clone() * a.clone() * self.sign[*i].clone();
                }
            }
            col[r] = snap(v);
        }
        let mut reduced = cost.clone();
        for (r, v) in col.iter().enumerate() {
            let cb = &self.costs[tab.basis[r]];
            if !cb.is_zero() && !v.is_zero() {
                reduced = reduced - cb.clone() * v.clone();
            }
        }
        let at = tab.ncols;
        for (row, v) in tab.rows.iter_mut().zip(col) {
            row.insert(at, v);
        }
        tab.reduced.insert(at, snap(reduced));
        tab.artificial.push(false);
        tab.ncols += 1;
        self.costs.push(cost.clone());
        self.objective.push(cost);
        self.structural.push(at);
    }

    /// Optimizes from the current basis with at most `max_pivots` pivots in
    /// total over the object's lifetime.
    pub fn run(&mut self, max_pivots: usize) -> SimplexSolution<T> {
        let nv = self.structural.len();
        let m = self.tab.rows.len();
        if !self.feasible {
            if self.tab.artificial.iter().any(|&a| a) {
                let phase1: Vec<T> = self
                    .tab
                    .artificial
                    .iter()
                    .map(|&a| if a { T::one() } else { T::zero() })
                    .collect();
                self.tab.set_costs(&phase1);
                let status = self.tab.optimize(|_| true, max_pivots);
                if status == SimplexStatus::PivotLimit {
                    return failed(status, nv, m, self.tab.pivots);
                }
                let limit = if T::EXACT {
                    T::zero()
                } else {
                    T::tolerance() * T::from_f64(1e3).unwrap()
                };
                if self.tab.objective() > limit {
                    return failed(SimplexStatus::Infeasible, nv, m, self.tab.pivots);
                }
                let ncols = self.tab.ncols;
                for i in 0..m {
                    if !self.tab.artificial[self.tab.basis[i]] {
                        continue;
                    }
                    let tab = &self.tab;
                    let replacement = (0..ncols)
                        .find(|&j| !tab.artificial[j] && tab.rows[i][j].is_pos())
                        .or_else(|| (0..ncols).find(|&j| !tab.artificial[j] && tab.rows[i][j].is_neg()));
                    if let Some(j) = replacement {
                        self.tab.pivot(i, j);
                    }
                }
            }
            self.feasible = true;
        }
        let artificial = self.tab.artificial.clone();
        // Fresh reduced costs each round keep round-off from piling up.
        let costs = self.costs.clone();
        self.tab.set_costs(&costs);
        let status = self.tab.optimize(|j| !artificial[j], max_pivots);
        if status != SimplexStatus::Optimal {
            return failed(status, nv, m, self.tab.pivots);
        }
        let mut at = vec![None; self.tab.ncols];
        for (v, &c) in self.structural.iter().enumerate() {
            at[c] = Some(v);
        }
        let mut x = vec![T::zero(); nv];
        for (i, &b) in self.tab.basis.iter().enumerate() {
            if let Some(v) = at[b] {
                x[v] = self.tab.rhs(i).clone();
            }
        }
        let value = x
            .iter()
            .zip(&self.objective)
            .fold(T::zero(), |acc, (a, c)| acc + a.clone() * c.clone());
        let duals = (0..m)
            .map(|i| {
                let col = self.unit_col[i];
                let y = self
                    .tab
                    .rows
                    .iter()
                    .zip(&self.tab.basis)
                    .fold(T::zero(), |acc, (row, &b)| acc + self.costs[b].clone() * row[col].clone());
                y * self.sign[i].clone()
            })
            .collect();
        SimplexSolution {
            status,
            value,
            x,
            duals,
            pivots: self.tab.pivots,
        }
    }
}

/// Solves `lp` with at most `max_pivots` pivots in total.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>, max_pivots: usize) -> SimplexSolution<T> {
    Simplex::new(lp).run(max_pivots)
}

fn failed<T: Scalar>(status: SimplexStatus, nv: usize, m: usize, pivots: usize) -> SimplexSolution<T> {
    SimplexSolution {
        status,
        value: T::zero(),
        x: vec![T::zero(); nv],
        duals: vec![T::zero(); m],
        pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn row<T: Clone>(coeffs: &[(usize, T)], sense: Sense, rhs: T) -> LinearRow<T> {
        LinearRow {
            coeffs: coeffs.to_vec(),
            sense,
            rhs,
        }
    }

    #[test]
    fn single_cover_row() {
        // min x  s.t. x >= 1
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![r(1)],
            rows: vec![row(&[(0, r(1))], Sense::Ge, r(1))],
        };
        let s = solve(&lp, 100);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert_eq!(s.value, r(1));
        assert_eq!(s.duals, vec![r(1)]);
    }

    #[test]
    fn textbook_max() {
        // max 3a + 5b st a <= 4, 2b <= 12, 3a + 2b <= 18  => 36 at (2, 6)
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![-3.0f64, -5.0],
            rows: vec![
                row(&[(0, 1.0)], Sense::Le, 4.0),
                row(&[(1, 2.0)], Sense::Le, 12.0),
                row(&[(0, 3.0), (1, 2.0)], Sense::Le, 18.0),
            ],
        };
        let s = solve(&lp, 100);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert!((s.value + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        // Shadow prices of the binding rows: 0, -3/2, -1.
        assert!((s.duals[1] + 1.5).abs() < 1e-9);
        assert!((s.duals[2] + 1.0).abs() < 1e-9);
        let dual_value: f64 = s.duals.iter().zip([4.0, 12.0, 18.0]).map(|(y, b)| y * b).sum();
        assert!((dual_value - s.value).abs() < 1e-9);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min a + b  st  a - b = -1, a >= 0  => a = 0, b = 1
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![r(1), r(1)],
            rows: vec![row(&[(0, r(1)), (1, r(-1))], Sense::Eq, r(-1))],
        };
        let s = solve(&lp, 100);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert_eq!(s.value, r(1));
        assert_eq!(s.x, vec![r(0), r(1)]);
        // y * b = value
        assert_eq!(s.duals[0].clone() * r(-1), r(1));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![r(1)],
            rows: vec![
                row(&[(0, r(1))], Sense::Ge, r(2)),
                row(&[(0, r(1))], Sense::Le, r(1)),
            ],
        };
        assert_eq!(solve(&lp, 100).status, SimplexStatus::Infeasible);
        let lp = LinearProgram {
            num_vars: 1,
            objective: vec![r(-1)],
            rows: vec![row(&[(0, r(1))], Sense::Ge, r(2))],
        };
        assert_eq!(solve(&lp, 100).status, SimplexStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram {
            num_vars: 2,
            objective: vec![r(1), r(2)],
            rows: vec![
                row(&[(0, r(1)), (1, r(1))], Sense::Eq, r(3)),
                row(&[(0, r(2)), (1, r(2))], Sense::Eq, r(6)),
            ],
        };
        let s = solve(&lp, 100);
        assert_eq!(s.status, SimplexStatus::Optimal);
        assert_eq!(s.value, r(3));
    }
}
