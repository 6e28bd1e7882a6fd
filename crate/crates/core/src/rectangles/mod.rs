//! Rectangles `A x B` of a communication matrix, witness sets, weight
//! matrices, and exact maximum-weight-rectangle oracles.

mod decompose;
mod enumerate;
mod oracle;

use std::fmt;

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{for_each_support_pair, BitString, InputPair, MuParams};
use crate::scalar::Weight;
use crate::{Error, Result};

pub use decompose::{decompose_by_witness, Decomposition};
pub use enumerate::{enumerate_rectangles, exhaustive_max, DEFAULT_ENUMERATION_CAP};
pub use oracle::{
    max_weight_rectangle, max_weight_rectangle_in_family, max_weight_rectangle_in_rv, FamilyHit,
    OracleConfig, DEFAULT_ORACLE_ROW_SUBSETS,
};

/// A combinatorial rectangle over a `row_count x col_count` index space.
///
/// For a communication matrix over `n`-bit strings both index spaces have
/// size `2^n` and index `i` is the string with [`BitString::index`] `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rectangle {
    rows: FixedBitSet,
    cols: FixedBitSet,
}

impl Rectangle {
    pub fn empty(row_count: usize, col_count: usize) -> Self {
        Self {
            rows: FixedBitSet::with_capacity(row_count),
            cols: FixedBitSet::with_capacity(col_count),
        }
    }

    pub fn full(row_count: usize, col_count: usize) -> Self {
        let mut r = Self::empty(row_count, col_count);
        r.rows.insert_range(..);
        r.cols.insert_range(..);
        r
    }

    pub fn from_indices(
        row_count: usize,
        col_count: usize,
        rows: impl IntoIterator<Item = usize>,
        cols: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut r = Self::empty(row_count, col_count);
        for i in rows {
            if i >= row_count {
                return Err(Error::Dimension(format!("row {i} >= {row_count}")));
            }
            r.rows.insert(i);
        }
        for j in cols {
            if j >= col_count {
                return Err(Error::Dimension(format!("column {j} >= {col_count}")));
            }
            r.cols.insert(j);
        }
        Ok(r)
    }

    /// Rectangle of the `2^n x 2^n` communication matrix.
    pub fn from_strings(n: usize, rows: &[BitString], cols: &[BitString]) -> Result<Self> {
        if rows.iter().chain(cols).any(|s| s.len() != n) {
            return Err(Error::Dimension(format!("strings must have length {n}")));
        }
        let size = comm_size(n)?;
        Self::from_indices(
            size,
            size,
            rows.iter().map(BitString::index),
            cols.iter().map(BitString::index),
        )
    }

    /// Parses strings such as `"01,11"`.
    pub fn parse(n: usize, rows: &str, cols: &str) -> Result<Self> {
        let split = |s: &str| -> Result<Vec<BitString>> {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(str::parse)
                .collect()
        };
        Self::from_strings(n, &split(rows)?, &split(cols)?)
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    pub fn rows(&self) -> &FixedBitSet {
        &self.rows
    }

    pub fn cols(&self) -> &FixedBitSet {
        &self.cols
    }

    pub fn row_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.ones()
    }

    pub fn col_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cols.ones()
    }

    pub fn insert_row(&mut self, i: usize) {
        self.rows.insert(i);
    }

    pub fn insert_col(&mut self, j: usize) {
        self.cols.insert(j);
    }

    #[inline]
    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.rows.contains(row) && self.cols.contains(col)
    }

    #[inline]
    pub fn contains_pair(&self, pair: &InputPair) -> bool {
        self.contains(pair.x.index(), pair.y.index())
    }

    pub fn is_empty(&self) -> bool {
        self.rows.count_ones(..) == 0 || self.cols.count_ones(..) == 0
    }

    /// Number of cells.
    pub fn area(&self) -> usize {
        self.rows.count_ones(..) * self.cols.count_ones(..)
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.rows.intersect_with(&other.rows);
        r.cols.intersect_with(&other.cols);
        r
    }

    /// Universe size when this is a rectangle of a square `2^n` matrix.
    pub fn universe(&self) -> Option<usize> {
        let r = self.row_count();
        (r == self.col_count() && r.is_power_of_two()).then(|| r.trailing_zeros() as usize)
    }

    pub fn row_strings(&self, n: usize) -> Vec<BitString> {
        self.rows.ones().map(|i| BitString::from_index(n, i)).collect()
    }

    pub fn col_strings(&self, n: usize) -> Vec<BitString> {
        self.cols.ones().map(|j| BitString::from_index(n, j)).collect()
    }

    /// Canonical empty rectangle check ignoring the index space.
    pub fn same_cells(&self, other: &Self) -> bool {
        (self.is_empty() && other.is_empty()) || self == other
    }

    pub fn describe(&self) -> RectangleView {
        match self.universe() {
            Some(n) => RectangleView {
                rows: self.row_strings(n).iter().map(ToString::to_string).collect(),
                cols: self.col_strings(n).iter().map(ToString::to_string).collect(),
            },
            None => RectangleView {
                rows: self.rows.ones().map(|i| i.to_string()).collect(),
                cols: self.cols.ones().map(|j| j.to_string()).collect(),
            },
        }
    }
}

impl fmt::Debug for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.describe();
        write!(f, "{{{}}}x{{{}}}", v.rows.join(","), v.cols.join(","))
    }
}

impl fmt::Display for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serializable rendering of a rectangle: bit strings for communication
/// matrices, plain indices otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectangleView {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
}

impl BitString {
    /// Inverse of [`BitString::index`].
    pub fn from_index(n: usize, index: usize) -> Self {
        BitString::new(n, index as u64).expect("index outside the universe")
    }
}

pub(crate) fn comm_size(n: usize) -> Result<usize> {
    if n >= 26 {
        return Err(Error::ParameterRange(format!(
            "communication matrix over {n}-bit strings is too large"
        )));
    }
    Ok(1usize << n)
}

/// A set `I` of coordinates shared by every input pair of a rectangle.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WitnessSet(BitString);

impl WitnessSet {
    pub fn new(set: BitString) -> Self {
        Self(set)
    }

    pub fn from_coords(n: usize, coords: impl IntoIterator<Item = usize>) -> Result<Self> {
        BitString::from_coords(n, coords).map(Self)
    }

    pub fn as_bits(&self) -> BitString {
        self.0
    }

    pub fn size(&self) -> usize {
        self.0.popcount()
    }

    /// 0-based coordinates, ascending.
    pub fn coords(&self) -> Vec<usize> {
        self.0.coords().collect()
    }

    /// All `k`-subsets of `{0..n}` in lexicographic order of their sorted
    /// coordinate tuples.
    pub fn all(n: usize, k: usize) -> Vec<WitnessSet> {
        let mut v: Vec<WitnessSet> = BitString::with_popcount(n, k).map(WitnessSet).collect();
        // Lexicographic on coordinate tuples is descending on masks.
        v.reverse();
        v
    }

    /// Sub-rectangle of the `2^n` matrix fixing `x_i = y_i = 1` for `i` in the set.
    pub fn fixing_rectangle(&self) -> Rectangle {
        let n = self.0.len();
        let size = 1usize << n;
        let mut r = Rectangle::empty(size, size);
        for s in BitString::all(n).filter(|s| s.is_superset_of(&self.0)) {
            r.insert_row(s.index());
            r.insert_col(s.index());
        }
        r
    }
}

impl fmt::Display for WitnessSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.0.coords().map(|c| (c + 1).to_string()).collect();
        write!(f, "{{{}}}", c.join(","))
    }
}

impl fmt::Debug for WitnessSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WitnessSet{self}")
    }
}

impl Serialize for WitnessSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c: Vec<usize> = self.0.coords().map(|c| c + 1).collect();
        c.serialize(s)
    }
}

/// Some size-`k` set of coordinates common to every row and column string of
/// `rect`, lexicographically smallest. An empty rectangle has every set as a
/// witness, so the smallest one, `{1..k}`, is returned.
pub fn witness_set(rect: &Rectangle, k: usize) -> Option<WitnessSet> {
    let n = rect.universe()?;
    if k > n {
        return None;
    }
    let mut common = crate::combinatorics::full_mask(n);
    if !rect.is_empty() {
        for i in rect.row_indices().chain(rect.col_indices()) {
            common &= i as u64;
        }
    }
    let common = BitString::from_mask_checked(n, common);
    if common.popcount() < k {
        return None;
    }
    Some(WitnessSet(
        BitString::from_coords(n, common.coords().take(k)).expect("coordinates in range"),
    ))
}

impl BitString {
    fn from_mask_checked(n: usize, mask: u64) -> Self {
        BitString::new(n, mask).expect("mask within universe")
    }
}

/// Which rectangles a dual constraint (or a primal column) ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RectFamily {
    /// Every rectangle.
    Full,
    /// Rectangles with a common `k`-subset of intersecting coordinates.
    Witness { k: usize },
    /// Rectangles containing no disjoint pair.
    AvoidDisjoint,
}

impl RectFamily {
    pub fn contains(&self, rect: &Rectangle) -> bool {
        match *self {
            RectFamily::Full => true,
            RectFamily::Witness { k } => witness_set(rect, k).is_some(),
            RectFamily::AvoidDisjoint => {
                let cols: Vec<usize> = rect.col_indices().collect();
                rect.row_indices()
                    .all(|x| cols.iter().all(|&y| x & y != 0))
            }
        }
    }

    /// Whether the single cell `pair` belongs to some member.
    pub fn admits_pair(&self, pair: &InputPair) -> bool {
        match *self {
            RectFamily::Full => true,
            RectFamily::Witness { k } => pair.intersection_size() >= k,
            RectFamily::AvoidDisjoint => pair.intersection_size() >= 1,
        }
    }
}

impl fmt::Display for RectFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RectFamily::Full => f.write_str("full"),
            RectFamily::Witness { k } => write!(f, "witness:{k}"),
            RectFamily::AvoidDisjoint => f.write_str("avoid-disjoint"),
        }
    }
}

impl std::str::FromStr for RectFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(RectFamily::Full),
            "avoid-disjoint" => Ok(RectFamily::AvoidDisjoint),
            other => match other.strip_prefix("witness:") {
                Some(k) => k
                    .parse()
                    .map(|k| RectFamily::Witness { k })
                    .map_err(|_| Error::Parse(format!("bad witness size in {other:?}"))),
                None => Err(Error::Parse(format!("unknown rectangle family {other:?}"))),
            },
        }
    }
}

/// Dense signed weights on the cells of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Weight> WeightMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Zero weights on the `2^n x 2^n` communication matrix.
    pub fn comm(n: usize) -> Result<Self> {
        let s = comm_size(n)?;
        Ok(Self::zeros(s, s))
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged weight matrix".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Communication-matrix weights from a sparse pair list (later entries add).
    pub fn from_pairs<'a>(
        n: usize,
        pairs: impl IntoIterator<Item = (&'a InputPair, &'a T)>,
    ) -> Result<Self>
    where
        T: 'a,
    {
        let mut w = Self::comm(n)?;
        for (p, v) in pairs {
            if p.n() != n {
                return Err(Error::Dimension(format!("pair {p} not over {n} bits")));
            }
            w.add(p.x.index(), p.y.index(), v.clone());
        }
        Ok(w)
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let cell = &mut self.data[i * self.cols + j];
        *cell = cell.clone() + v;
    }

    pub fn get_pair(&self, pair: &InputPair) -> &T {
        self.get(pair.x.index(), pair.y.index())
    }

    pub fn set_pair(&mut self, pair: &InputPair, v: T) {
        self.set(pair.x.index(), pair.y.index(), v)
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Sub-matrix on the given rows and columns, in the given order.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn map<U: Weight>(&self, f: impl Fn(&T) -> U) -> WeightMatrix<U> {
        WeightMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn total_positive(&self) -> T {
        self.data
            .iter()
            .filter(|v| **v > T::zero())
            .fold(T::zero(), |acc, v| acc + v.clone())
    }

    pub fn total_negative(&self) -> T {
        self.data
            .iter()
            .filter(|v| **v < T::zero())
            .fold(T::zero(), |acc, v| acc + v.clone())
    }

    pub fn nonzero_rows(&self) -> Vec<usize> {
        (0..self.rows)
            .filter(|&i| self.row(i).iter().any(|v| !v.is_zero()))
            .collect()
    }

    pub fn nonzero_cols(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&j| (0..self.rows).any(|i| !self.get(i, j).is_zero()))
            .collect()
    }
}

/// Sum of the weights of the cells of `rect`.
pub fn rect_weight<T: Weight>(w: &WeightMatrix<T>, rect: &Rectangle) -> T {
    debug_assert_eq!(w.row_count(), rect.row_count());
    debug_assert_eq!(w.col_count(), rect.col_count());
    let cols: Vec<usize> = rect.col_indices().collect();
    let mut total = T::zero();
    for i in rect.row_indices() {
        let row = w.row(i);
        for &j in &cols {
            total = total + row[j].clone();
        }
    }
    total
}

/// `mu_p(rect)`, the exact probability mass of a communication-matrix
/// rectangle.
pub fn mu_mass(p: MuParams, rect: &Rectangle) -> Result<BigRational> {
    if rect.universe() != Some(p.n) {
        return Err(Error::Dimension(format!(
            "rectangle is not over the {}-bit communication matrix",
            p.n
        )));
    }
    let mass = p.point_mass()?;
    if rect.is_empty() {
        return Ok(BigRational::zero());
    }
    let mut count = 0u64;
    for_each_support_pair(p, |pair| {
        if rect.contains_pair(&pair) {
            count += 1;
        }
    })?;
    Ok(mass * BigRational::from_integer(count.into()))
}
