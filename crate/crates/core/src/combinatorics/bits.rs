use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Maximum supported universe size.
pub const MAX_BITS: usize = 64;

/// An `n`-bit string, read as the characteristic vector of a subset of
/// `{1, ..., n}`.
///
/// Coordinates are 0-based internally and the first character of the textual
/// form is coordinate 0. The mask stores the string read as a big-endian binary
/// number, so numeric order on masks is lexicographic order on strings and
/// [`BitString::index`] can address matrix rows directly.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    n: u8,
    mask: u64,
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
pub(crate) fn coord_bit(n: usize, coord: usize) -> u64 {
    1u64 << (n - 1 - coord)
}

impl BitString {
    pub fn new(n: usize, mask: u64) -> Result<Self> {
        if n > MAX_BITS {
            return Err(Error::ParameterRange(format!(
                "universe size {n} exceeds {MAX_BITS}"
            )));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::ParameterRange(format!(
                "mask {mask:#x} has bits outside an {n}-bit universe"
            )));
        }
        Ok(Self { n: n as u8, mask })
    }

    /// Caller guarantees `mask < 2^n` and `n <= 64`.
    #[inline]
    pub(crate) fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= MAX_BITS && mask & !full_mask(n) == 0);
        Self { n: n as u8, mask }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_mask(n, 0)
    }

    pub fn from_coords(n: usize, coords: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = 0;
        for c in coords {
            if c >= n {
                return Err(Error::ParameterRange(format!(
                    "coordinate {c} outside an {n}-bit universe"
                )));
            }
            mask |= coord_bit(n, c);
        }
        Self::new(n, mask)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// Row/column index in a `2^n x 2^n` communication matrix.
    #[inline]
    pub fn index(&self) -> usize {
        self.mask as usize
    }

    #[inline]
    pub fn popcount(&self) -> usize {
        self.mask.count_ones() as usize
    }

    #[inline]
    pub fn contains(&self, coord: usize) -> bool {
        coord < self.len() && self.mask & coord_bit(self.len(), coord) != 0
    }

    /// Set coordinates in ascending order.
    pub fn coords(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&c| self.contains(c))
    }

    #[inline]
    pub fn intersect(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self::from_mask(self.len(), self.mask & other.mask)
    }

    #[inline]
    pub fn intersection_size(&self, other: &Self) -> usize {
        (self.mask & other.mask).count_ones() as usize
    }

    #[inline]
    pub fn is_superset_of(&self, other: &Self) -> bool {
        self.mask & other.mask == other.mask
    }

    pub fn complement(&self) -> Self {
        Self::from_mask(self.len(), !self.mask & full_mask(self.len()))
    }

    /// Deletes the coordinates set in `drop` and closes the gaps, keeping order.
    pub fn remove_coords(&self, drop: &Self) -> Self {
        debug_assert_eq!(self.n, drop.n);
        let kept = self.len() - drop.popcount();
        let mut mask = 0u64;
        let mut pos = 0;
        for c in 0..self.len() {
            if drop.contains(c) {
                continue;
            }
            if self.contains(c) {
                mask |= coord_bit(kept, pos);
            }
            pos += 1;
        }
        Self::from_mask(kept, mask)
    }

    /// Coordinates `[start, start + len)` as a fresh `len`-bit string.
    pub fn block(&self, start: usize, len: usize) -> Self {
        debug_assert!(start + len <= self.len());
        if len == 0 {
            return Self::empty(0);
        }
        let shift = self.len() - start - len;
        Self::from_mask(len, (self.mask >> shift) & full_mask(len))
    }

    /// Concatenation in the given order.
    pub fn concat(parts: &[BitString]) -> Result<Self> {
        let total: usize = parts.iter().map(|p| p.len()).sum();
        if total > MAX_BITS {
            return Err(Error::ParameterRange(format!(
                "concatenated length {total} exceeds {MAX_BITS}"
            )));
        }
        let mut mask = 0u64;
        for p in parts {
            let shifted = if p.len() == 64 { 0 } else { mask << p.len() };
            mask = shifted | p.mask;
        }
        Ok(Self::from_mask(total, mask))
    }

    /// Pads with zero coordinates at the end up to `len`.
    pub fn pad_to(&self, len: usize) -> Self {
        debug_assert!(len >= self.len() && len <= MAX_BITS);
        let shift = len - self.len();
        Self::from_mask(len, if shift >= 64 { 0 } else { self.mask << shift })
    }

    /// All `2^n` strings in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        assert!(n < 64, "cannot enumerate a {n}-bit universe");
        (0..1u64 << n).map(move |m| BitString::from_mask(n, m))
    }

    /// All strings of weight `m` in lexicographic order.
    pub fn with_popcount(n: usize, m: usize) -> impl Iterator<Item = BitString> {
        SubsetIter::new(n, m).map(move |mask| BitString::from_mask(n, mask))
    }
}

/// Gosper's hack: all `n`-bit masks with exactly `k` ones, increasing.
#[derive(Debug, Clone)]
pub(crate) struct SubsetIter {
    next: Option<u64>,
    limit: u64,
}

impl SubsetIter {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        let next = if k > n || n > 63 {
            None
        } else if k == 0 {
            Some(0)
        } else {
            Some((1u64 << k) - 1)
        };
        Self {
            next,
            limit: if n > 63 { 0 } else { 1u64 << n },
        }
    }
}

impl Iterator for SubsetIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt < self.limit).then_some(nxt)
        };
        Some(cur)
    }
}

/// Scatters the low bits of `compact` onto the bit positions in `positions`
/// (bit `i` of `compact` goes to `positions[i]`).
#[inline]
pub(crate) fn deposit(compact: u64, positions: &[u32]) -> u64 {
    let mut out = 0;
    let mut rest = compact;
    while rest != 0 {
        let i = rest.trailing_zeros();
        out |= 1u64 << positions[i as usize];
        rest &= rest - 1;
    }
    out
}

/// Bit positions (not coordinates) set in `mask`, ascending.
#[inline]
pub(crate) fn bit_positions(mask: u64) -> Vec<u32> {
    let mut v = Vec::with_capacity(mask.count_ones() as usize);
    let mut rest = mask;
    while rest != 0 {
        v.push(rest.trailing_zeros());
        rest &= rest - 1;
    }
    v
}

/// All submasks of `mask` with exactly `k` bits.
pub(crate) fn submasks_of_size(mask: u64, k: usize) -> impl Iterator<Item = u64> {
    let positions = bit_positions(mask);
    SubsetIter::new(positions.len(), k).map(move |c| deposit(c, &positions))
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in 0..self.len() {
            f.write_str(if self.contains(c) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_BITS {
            return Err(Error::Parse(format!("bit string longer than {MAX_BITS}")));
        }
        let mut mask = 0u64;
        for ch in s.chars() {
            mask = (mask << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(Error::Parse(format!("invalid bit {ch:?} in {s:?}"))),
                };
        }
        Ok(Self::from_mask(s.len(), mask))
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Alice/Bob input pair over a common universe.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InputPair {
    pub x: BitString,
    pub y: BitString,
}

impl InputPair {
    pub fn new(x: BitString, y: BitString) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Dimension(format!(
                "pair over different universes: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        Ok(Self { x, y })
    }

    pub fn parse(x: &str, y: &str) -> Result<Self> {
        Self::new(x.parse()?, y.parse()?)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn intersection_size(&self) -> usize {
        self.x.intersection_size(&self.y)
    }

    #[inline]
    pub fn intersection(&self) -> BitString {
        self.x.intersect(&self.y)
    }

    pub fn remove_coords(&self, drop: &BitString) -> Self {
        Self {
            x: self.x.remove_coords(drop),
            y: self.y.remove_coords(drop),
        }
    }
}

impl fmt::Display for InputPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Debug for InputPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InputPair{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn textual_order_is_numeric_order() {
        let a: BitString = "01".parse().unwrap();
        let b: BitString = "10".parse().unwrap();
        assert!(a < b);
        assert_eq!(a.index(), 1);
        assert_eq!(b.index(), 2);
        assert!(b.contains(0) && !b.contains(1));
        assert_eq!(b.coords().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn remove_and_block() {
        let x: BitString = "10110".parse().unwrap();
        let drop: BitString = "00100".parse().unwrap();
        assert_eq!(x.remove_coords(&drop).to_string(), "1010");
        assert_eq!(x.block(1, 3).to_string(), "011");
        assert_eq!(x.pad_to(7).to_string(), "1011000");
        let parts = ["10".parse().unwrap(), "011".parse().unwrap()];
        assert_eq!(BitString::concat(&parts).unwrap().to_string(), "10011");
    }

    #[test]
    fn gosper_counts() {
        assert_eq!(SubsetIter::new(5, 2).count(), 10);
        assert_eq!(SubsetIter::new(5, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(SubsetIter::new(3, 4).count(), 0);
        assert_eq!(SubsetIter::new(4, 4).collect::<Vec<_>>(), vec![15]);
        let v: Vec<_> = SubsetIter::new(6, 3).collect();
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(submasks_of_size(0b10110, 2).count(), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!("012".parse::<BitString>().is_err());
        assert!(BitString::new(2, 4).is_err());
        assert!(InputPair::new(BitString::empty(2), BitString::empty(3)).is_err());
    }

    proptest! {
        #[test]
        fn intersection_consistent(n in 1usize..20, a in any::<u64>(), b in any::<u64>()) {
            let x = BitString::new(n, a & full_mask(n)).unwrap();
            let y = BitString::new(n, b & full_mask(n)).unwrap();
            let by_coords = (0..n).filter(|&c| x.contains(c) && y.contains(c)).count();
            prop_assert_eq!(x.intersection_size(&y), by_coords);
            prop_assert!(x.intersection_size(&y) <= x.popcount().min(y.popcount()));
            let round: BitString = x.to_string().parse().unwrap();
            prop_assert_eq!(round, x);
        }
    }
}
