//! Boolean communication functions as truth tables over `n`-bit inputs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{BitString, InputPair};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Family {
    /// 1 iff the sets intersect.
    Ndisj,
    /// 1 iff the sets are disjoint.
    Disj,
    Eq,
    /// Inner product mod 2.
    Ip,
    /// Bitwise AND of all coordinates of both inputs (AND of two bits at n = 1).
    And,
}

impl Family {
    pub fn eval(self, x: &BitString, y: &BitString) -> bool {
        match self {
            Family::Ndisj => x.intersection_size(y) > 0,
            Family::Disj => x.intersection_size(y) == 0,
            Family::Eq => x == y,
            Family::Ip => x.intersection_size(y) % 2 == 1,
            Family::And => x.popcount() == x.len() && y.popcount() == y.len(),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NDISJ" => Ok(Family::Ndisj),
            "DISJ" => Ok(Family::Disj),
            "EQ" => Ok(Family::Eq),
            "IP" => Ok(Family::Ip),
            "AND" => Ok(Family::And),
            other => Err(Error::Parse(format!("unknown function family {other:?}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Ndisj => "NDISJ",
            Family::Disj => "DISJ",
            Family::Eq => "EQ",
            Family::Ip => "IP",
            Family::And => "AND",
        };
        f.write_str(s)
    }
}

/// A total Boolean function on `{0,1}^n x {0,1}^n`; row index is `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    n: usize,
    values: Vec<bool>,
}

impl TruthTable {
    pub fn from_fn(n: usize, f: impl Fn(&BitString, &BitString) -> bool) -> Result<Self> {
        let size = crate::rectangles::comm_size(n)?;
        let mut values = Vec::with_capacity(size * size);
        for x in BitString::all(n) {
            for y in BitString::all(n) {
                values.push(f(&x, &y));
            }
        }
        Ok(Self { n, values })
    }

    pub fn family(family: Family, n: usize) -> Result<Self> {
        Self::from_fn(n, |x, y| family.eval(x, y))
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_, _| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.values[x * self.size() + y]
    }

    pub fn eval(&self, pair: &InputPair) -> bool {
        self.get(pair.x.index(), pair.y.index())
    }

    /// Reads the text format: first line `n`, then `2^n` lines of `2^n`
    /// characters in `{0,1}`, row `x` in lexicographic order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty truth table".into()))?
            .parse()
            .map_err(|_| Error::Parse("first line must be n".into()))?;
        let size = crate::rectangles::comm_size(n)?;
        let mut values = Vec::with_capacity(size * size);
        let mut rows = 0;
        for line in lines {
            if line.len() != size {
                return Err(Error::Parse(format!(
                    "row {rows} has {} entries, expected {size}",
                    line.len()
                )));
            }
            for ch in line.chars() {
                values.push(match ch {
                    '0' => false,
                    '1' => true,
                    _ => return Err(Error::Parse(format!("invalid entry {ch:?}"))),
                });
            }
            rows += 1;
        }
        if rows != size {
            return Err(Error::Parse(format!("expected {size} rows, found {rows}")));
        }
        Ok(Self { n, values })
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for x in 0..self.size() {
            for y in 0..self.size() {
                s.push(if self.get(x, y) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}
