use rayon::prelude::*;

use super::{rect_weight, witness_set, RectFamily, Rectangle, WeightMatrix, WitnessSet};
use crate::error::check_cap;
use crate::scalar::Weight;
use crate::{Error, Result};

/// Default limit on enumerated row subsets (`2^16`).
pub const DEFAULT_ORACLE_ROW_SUBSETS: u128 = 1 << 16;

/// Below this many iterated rows the sweep stays on one thread.
const PARALLEL_ROWS: usize = 12;
const CHUNK_BITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_row_subsets: u128,
    pub parallel: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_row_subsets: DEFAULT_ORACLE_ROW_SUBSETS,
            parallel: true,
        }
    }
}

/// Best rectangle found inside a family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyHit<T> {
    pub rect: Rectangle,
    pub value: T,
    pub witness: Option<WitnessSet>,
}

/// Exact maximum of `rect_weight(w, R)` over all rectangles, the empty one
/// included (so the value is never negative).
///
/// Rows and columns carrying no weight are dropped first. The smaller side is
/// enumerated over all subsets in Gray-code order with incremental column sums;
/// for a fixed row set the best column set is exactly the columns with
/// positive sum.
pub fn max_weight_rectangle<T: Weight>(
    w: &WeightMatrix<T>,
    cfg: &OracleConfig,
) -> Result<(Rectangle, T)> {
    let rows = w.nonzero_rows();
    let cols = w.nonzero_cols();
    let sub = w.restrict(&rows, &cols);
    let (best_rows, best_cols) = best_on_dense(&sub, cfg)?;
    let rect = Rectangle::from_indices(
        w.row_count(),
        w.col_count(),
        best_rows.into_iter().map(|i| rows[i]),
        best_cols.into_iter().map(|j| cols[j]),
    )?;
    let value = rect_weight(w, &rect);
    if value > T::zero() {
        Ok((rect, value))
    } else {
        Ok((Rectangle::empty(w.row_count(), w.col_count()), T::zero()))
    }
}

/// Best `(rows, cols)` on a dense matrix, transposing so the enumerated side is
/// the shorter one.
fn best_on_dense<T: Weight>(w: &WeightMatrix<T>, cfg: &OracleConfig) -> Result<(Vec<usize>, Vec<usize>)> {
    if w.row_count() == 0 || w.col_count() == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if w.col_count() < w.row_count() {
        let (c, r) = best_on_dense(&w.transpose(), cfg)?;
        return Ok((r, c));
    }
    let r = w.row_count();
    let subsets = if r >= 127 { u128::MAX } else { 1u128 << r };
    check_cap("oracle row subsets", subsets, cfg.max_row_subsets)?;
    let best = if cfg.parallel && r >= PARALLEL_ROWS {
        let chunk = CHUNK_BITS.min(r);
        let chunks = 1u64 << (r - chunk);
        (0..chunks)
            .into_par_iter()
            .map(|c| sweep(w, c << chunk, 1u64 << chunk))
            .reduce_with(pick_first_max)
            .expect("at least one chunk")
    } else {
        sweep(w, 0, 1u64 << r)
    };
    let rows_mask = best.1;
    let rows: Vec<usize> = (0..r).filter(|&i| rows_mask >> i & 1 == 1).collect();
    let sums = column_sums(w, rows_mask);
    let cols = (0..w.col_count()).filter(|&j| sums[j] > T::zero()).collect();
    Ok((rows, cols))
}

/// `(value, row mask, gray step)`, earliest step wins ties.
type Best<T> = (T, u64, u64);

fn pick_first_max<T: Weight>(a: Best<T>, b: Best<T>) -> Best<T> {
    let (first, second) = if a.2 <= b.2 { (a, b) } else { (b, a) };
    if second.0 > first.0 {
        second
    } else {
        first
    }
}

fn column_sums<T: Weight>(w: &WeightMatrix<T>, rows_mask: u64) -> Vec<T> {
    let mut sums = vec![T::zero(); w.col_count()];
    for i in 0..w.row_count() {
        if rows_mask >> i & 1 == 1 {
            for (s, v) in sums.iter_mut().zip(w.row(i)) {
                *s = s.clone() + v.clone();
            }
        }
    }
    sums
}

fn positive_part<T: Weight>(sums: &[T]) -> T {
    sums.iter()
        .filter(|s| **s > T::zero())
        .fold(T::zero(), |acc, s| acc + s.clone())
}

/// Visits Gray-code steps `[start, start + len)`.
fn sweep<T: Weight>(w: &WeightMatrix<T>, start: u64, len: u64) -> Best<T> {
    let mut mask = start ^ (start >> 1);
    let mut sums = column_sums(w, mask);
    let mut best: Best<T> = (positive_part(&sums), mask, start);
    for step in start + 1..start + len {
        let bit = step.trailing_zeros() as usize;
        let adding = mask >> bit & 1 == 0;
        mask ^= 1 << bit;
        for (s, v) in sums.iter_mut().zip(w.row(bit)) {
            *s = if adding {
                s.clone() + v.clone()
            } else {
                s.clone() - v.clone()
            };
        }
        let value = positive_part(&sums);
        if value > best.0 {
            best = (value, mask, step);
        }
    }
    best
}

/// Maximum over rectangles with a `k`-witness: for every `I` with `|I| = k`
/// (lexicographic order) the matrix is restricted to rows and columns
/// containing `I` and the unrestricted oracle runs there. Earliest `I` wins
/// ties.
pub fn max_weight_rectangle_in_rv<T: Weight>(
    w: &WeightMatrix<T>,
    k: usize,
    n: usize,
    cfg: &OracleConfig,
) -> Result<(Rectangle, T, WitnessSet)> {
    let size = super::comm_size(n)?;
    if w.row_count() != size || w.col_count() != size {
        return Err(Error::Dimension(format!(
            "weights are {}x{}, expected the {size}x{size} matrix over {n} bits",
            w.row_count(),
            w.col_count()
        )));
    }
    if k > n {
        return Err(Error::ParameterRange(format!("witness size {k} exceeds n={n}")));
    }
    let mut best: Option<(Rectangle, T, WitnessSet)> = None;
    for set in WitnessSet::all(n, k) {
        let idx: Vec<usize> = (0..size)
            .filter(|&i| (i as u64) & set.as_bits().mask() == set.as_bits().mask())
            .collect();
        let sub = w.restrict(&idx, &idx);
        let (r, value) = max_weight_rectangle(&sub, cfg)?;
        let better = best.as_ref().is_none_or(|(_, v, _)| value > *v);
        if better {
            let rect = Rectangle::from_indices(
                size,
                size,
                r.row_indices().map(|i| idx[i]),
                r.col_indices().map(|j| idx[j]),
            )?;
            best = Some((rect, value, set));
        }
    }
    Ok(best.expect("at least one witness set"))
}

/// Oracle dispatch over a [`RectFamily`] on the `2^n` communication matrix.
///
/// The disjoint-avoiding family is handled by a penalty exceeding the total
/// positive weight on forbidden cells, applied after weightless rows and
/// columns are dropped; any rectangle touching a forbidden cell then scores
/// below the empty rectangle.
pub fn max_weight_rectangle_in_family<T: Weight>(
    w: &WeightMatrix<T>,
    n: usize,
    family: RectFamily,
    cfg: &OracleConfig,
) -> Result<FamilyHit<T>> {
    match family {
        RectFamily::Full => {
            let (rect, value) = max_weight_rectangle(w, cfg)?;
            Ok(FamilyHit { rect, value, witness: None })
        }
        RectFamily::Witness { k } => {
            let (rect, value, witness) = max_weight_rectangle_in_rv(w, k, n, cfg)?;
            Ok(FamilyHit { rect, value, witness: Some(witness) })
        }
        RectFamily::AvoidDisjoint => {
            let rows = w.nonzero_rows();
            let cols = w.nonzero_cols();
            let penalty = w.total_positive() + T::one();
            let sub = WeightMatrix::from_fn(rows.len(), cols.len(), |i, j| {
                if rows[i] & cols[j] == 0 {
                    T::zero() - penalty.clone()
                } else {
                    w.get(rows[i], cols[j]).clone()
                }
            });
            let (r, _) = max_weight_rectangle(&sub, cfg)?;
            let rect = Rectangle::from_indices(
                w.row_count(),
                w.col_count(),
                r.row_indices().map(|i| rows[i]),
                r.col_indices().map(|j| cols[j]),
            )?;
            debug_assert!(family.contains(&rect));
            let value = rect_weight(w, &rect);
            let witness = witness_set(&rect, 1);
            Ok(FamilyHit { rect, value, witness })
        }
    }
}
