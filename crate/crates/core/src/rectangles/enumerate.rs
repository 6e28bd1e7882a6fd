use super::{rect_weight, witness_set, RectFamily, Rectangle, WeightMatrix, WitnessSet};
use crate::error::check_cap;
use crate::scalar::Weight;
use crate::Result;

/// Default cap on enumerated rectangles (`2^26`).
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 26;

/// Every rectangle of a `rows x cols` matrix, the empty ones included.
pub fn enumerate_rectangles(
    rows: usize,
    cols: usize,
    cap: u128,
) -> Result<impl Iterator<Item = Rectangle>> {
    let total = if rows + cols >= 127 {
        u128::MAX
    } else {
        1u128 << (rows + cols)
    };
    check_cap("rectangle enumeration", total, cap)?;
    let col_subsets = 1u64 << cols;
    Ok((0..1u64 << rows).flat_map(move |a| {
        (0..col_subsets).map(move |b| {
            Rectangle::from_indices(
                rows,
                cols,
                (0..rows).filter(|i| a >> i & 1 == 1),
                (0..cols).filter(|j| b >> j & 1 == 1),
            )
            .expect("indices in range")
        })
    }))
}

/// Ground-truth maximum over a family by brute force: every rectangle on the
/// rows and columns that carry weight, filtered by family membership.
///
/// Dropping weightless rows and columns preserves the maximum because every
/// family here is closed under taking sub-rectangles.
pub fn exhaustive_max<T: Weight>(
    w: &WeightMatrix<T>,
    family: RectFamily,
    cap: u128,
) -> Result<(Rectangle, T, Option<WitnessSet>)> {
    let rows = w.nonzero_rows();
    let cols = w.nonzero_cols();
    let mut best = (Rectangle::empty(w.row_count(), w.col_count()), T::zero());
    for sub in enumerate_rectangles(rows.len(), cols.len(), cap)? {
        let rect = Rectangle::from_indices(
            w.row_count(),
            w.col_count(),
            sub.row_indices().map(|i| rows[i]),
            sub.col_indices().map(|j| cols[j]),
        )?;
        if !family.contains(&rect) {
            continue;
        }
        let value = rect_weight(w, &rect);
        if value > best.1 {
            best = (rect, value);
        }
    }
    let witness = match family {
        RectFamily::Witness { k } => witness_set(&best.0, k),
        _ => None,
    };
    Ok((best.0, best.1, witness))
}
