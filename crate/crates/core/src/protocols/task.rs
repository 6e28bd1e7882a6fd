use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Output;
use crate::combinatorics::BitString;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// `k` independent non-disjointness instances of size `n`.
    NdisjK,
    /// `k` independent search instances: a common coordinate per block, or 0.
    SearchK,
    /// `k` distinct common coordinates of one `n`-bit pair, or reject when
    /// fewer than `k` exist.
    SearchChoose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    /// A failure that claims nothing false.
    Reject,
    /// A false claim.
    Wrong,
}

impl TaskSpec {
    pub fn ndisj(n: usize, k: usize) -> Self {
        Self { kind: TaskKind::NdisjK, n, k }
    }

    pub fn search(n: usize, k: usize) -> Self {
        Self { kind: TaskKind::SearchK, n, k }
    }

    pub fn choose(n: usize, k: usize) -> Self {
        Self { kind: TaskKind::SearchChoose, n, k }
    }

    pub fn input_len(&self) -> usize {
        match self.kind {
            TaskKind::NdisjK | TaskKind::SearchK => self.n * self.k,
            TaskKind::SearchChoose => self.n,
        }
    }

    pub fn is_search(&self) -> bool {
        self.kind != TaskKind::NdisjK
    }

    /// 0-based global coordinates claimed by `out`, or `None` when the shape
    /// does not fit the task.
    pub fn claimed_coords(&self, out: &Output) -> Option<Vec<usize>> {
        let Output::Coordinates(c) = out else {
            return Some(Vec::new());
        };
        match self.kind {
            TaskKind::NdisjK => None,
            TaskKind::SearchK => {
                if c.len() != self.k || c.iter().any(|&j| j > self.n) {
                    return None;
                }
                Some(
                    c.iter()
                        .enumerate()
                        .filter(|(_, &j)| j > 0)
                        .map(|(b, &j)| b * self.n + j - 1)
                        .collect(),
                )
            }
            TaskKind::SearchChoose => {
                if c.len() != self.k || c.iter().any(|&j| j == 0 || j > self.n) {
                    return None;
                }
                Some(c.iter().map(|&j| j - 1).collect())
            }
        }
    }

    pub fn verdict(&self, x: &BitString, y: &BitString, out: &Output) -> Verdict {
        if x.len() != self.input_len() || y.len() != self.input_len() {
            return Verdict::Wrong;
        }
        match (self.kind, out) {
            (_, Output::Reject) => {
                if self.kind == TaskKind::SearchChoose && x.intersection_size(y) < self.k {
                    Verdict::Correct
                } else {
                    Verdict::Reject
                }
            }
            (TaskKind::NdisjK, Output::Decisions(d)) => {
                if d.len() != self.k {
                    return Verdict::Wrong;
                }
                let ok = (0..self.k).all(|b| {
                    let meet = x.block(b * self.n, self.n).intersection_size(&y.block(b * self.n, self.n)) > 0;
                    d[b] == meet
                });
                if ok {
                    Verdict::Correct
                } else {
                    Verdict::Wrong
                }
            }
            (TaskKind::SearchK, Output::Coordinates(c)) => {
                if c.len() != self.k || c.iter().any(|&j| j > self.n) {
                    return Verdict::Wrong;
                }
                let mut missed = false;
                for (b, &j) in c.iter().enumerate() {
                    let xb = x.block(b * self.n, self.n);
                    let yb = y.block(b * self.n, self.n);
                    if j == 0 {
                        missed |= xb.intersection_size(&yb) > 0;
                    } else if !(xb.contains(j - 1) && yb.contains(j - 1)) {
                        return Verdict::Wrong;
                    }
                }
                if missed {
                    Verdict::Reject
                } else {
                    Verdict::Correct
                }
            }
            (TaskKind::SearchChoose, Output::Coordinates(c)) => {
                let mut sorted = c.clone();
                sorted.sort_unstable();
                sorted.dedup();
                let valid = c.len() == self.k
                    && sorted.len() == c.len()
                    && c.iter().all(|&j| j >= 1 && j <= self.n && x.contains(j - 1) && y.contains(j - 1));
                if valid {
                    Verdict::Correct
                } else {
                    Verdict::Wrong
                }
            }
            _ => Verdict::Wrong,
        }
    }
}

impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TaskKind::NdisjK => "ndisj",
            TaskKind::SearchK => "search",
            TaskKind::SearchChoose => "choose",
        };
        write!(f, "{kind}:{}:{}", self.n, self.k)
    }
}

impl FromStr for TaskSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Parse(format!("task must look like kind:n:k, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let n = parts[1].parse().map_err(|_| bad())?;
        let k = parts[2].parse().map_err(|_| bad())?;
        match parts[0] {
            "ndisj" => Ok(Self::ndisj(n, k)),
            "search" => Ok(Self::search(n, k)),
            "choose" => Ok(Self::choose(n, k)),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn parse_round_trip() {
        for s in ["ndisj:8:2", "search:2:1", "choose:4:2"] {
            assert_eq!(s.parse::<TaskSpec>().unwrap().to_string(), s);
        }
        assert!("foo:1:1".parse::<TaskSpec>().is_err());
    }

    #[test]
    fn ndisj_verdicts() {
        let t = TaskSpec::ndisj(2, 2);
        let (x, y) = (b("1001"), b("1010"));
        assert_eq!(t.verdict(&x, &y, &Output::Decisions(vec![true, false])), Verdict::Correct);
        assert_eq!(t.verdict(&x, &y, &Output::Decisions(vec![true, true])), Verdict::Wrong);
        assert_eq!(t.verdict(&x, &y, &Output::Reject), Verdict::Reject);
    }

    #[test]
    fn search_verdicts() {
        let t = TaskSpec::search(2, 1);
        let (x, y) = (b("01"), b("01"));
        assert_eq!(t.verdict(&x, &y, &Output::Coordinates(vec![2])), Verdict::Correct);
        assert_eq!(t.verdict(&x, &y, &Output::Coordinates(vec![1])), Verdict::Wrong);
        assert_eq!(t.verdict(&x, &y, &Output::Coordinates(vec![0])), Verdict::Reject);
        assert_eq!(t.verdict(&b("10"), &y, &Output::Coordinates(vec![0])), Verdict::Correct);
        assert_eq!(t.claimed_coords(&Output::Coordinates(vec![2])), Some(vec![1]));
        let t = TaskSpec::search(2, 2);
        assert_eq!(t.claimed_coords(&Output::Coordinates(vec![0, 1])), Some(vec![2]));
    }

    #[test]
    fn choose_verdicts() {
        let t = TaskSpec::choose(4, 2);
        let (x, y) = (b("1101"), b("0111"));
        assert_eq!(t.verdict(&x, &y, &Output::Coordinates(vec![4, 2])), Verdict::Correct);
        assert_eq!(t.verdict(&x, &y, &Output::Coordinates(vec![2, 2])), Verdict::Wrong);
        assert_eq!(t.verdict(&x, &y, &Output::Coordinates(vec![1, 2])), Verdict::Wrong);
        assert_eq!(t.verdict(&x, &y, &Output::Reject), Verdict::Reject);
        assert_eq!(t.verdict(&b("1000"), &y, &Output::Reject), Verdict::Correct);
        let t = TaskSpec::choose(2, 0);
        assert_eq!(t.verdict(&b("00"), &b("00"), &Output::Coordinates(vec![])), Verdict::Correct);
    }
}
