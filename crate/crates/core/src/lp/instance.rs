use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{BitString, InputPair};
use crate::functions::TruthTable;
use crate::rectangles::RectFamily;
use crate::scalar::{pow2_of_rational, Scalar};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpKind {
    Search,
    Lovasz,
    Smooth,
}

impl fmt::Display for LpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpKind::Search => "search",
            LpKind::Lovasz => "lovasz",
            LpKind::Smooth => "smooth",
        })
    }
}

impl std::str::FromStr for LpKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "search" => Ok(LpKind::Search),
            "lovasz" => Ok(LpKind::Lovasz),
            "smooth" => Ok(LpKind::Smooth),
            _ => Err(Error::Parse(format!("unknown LP kind {s:?}"))),
        }
    }
}

/// Constraint class of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowClass {
    /// `|x ∩ y| < k`: no weight allowed (only with the full family).
    Forbidden,
    /// `|x ∩ y| = k`: covered at least `sigma`, at most the cap.
    Target,
    /// `|x ∩ y| > k`: covered at most the cap.
    Capped,
    /// `f(x, y) = 1`.
    OneInput,
    /// `f(x, y) = 0`.
    ZeroInput,
}

/// `lower <= sum_{R ∋ pair} w_R <= upper`, either bound optional.
#[derive(Debug, Clone, PartialEq)]
pub struct PairConstraint<T> {
    pub pair: InputPair,
    pub class: RowClass,
    pub lower: Option<T>,
    pub upper: Option<T>,
}

/// `min sum_R w_R` over the rectangles of `family`, subject to one
/// constraint per listed pair and `w >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance<T> {
    pub kind: LpKind,
    pub n: usize,
    pub family: RectFamily,
    pub k: Option<usize>,
    pub sigma: Option<T>,
    pub eps: Option<T>,
    /// Rate `a` of a relaxed cap `2^{a k}`, if one was applied.
    pub ambiguity: Option<BigRational>,
    pub constraints: Vec<PairConstraint<T>>,
    /// Set for `k = 0`, where the witness condition is vacuous.
    pub degenerate: bool,
}

impl<T: Scalar> LpInstance<T> {
    pub fn count_class(&self, class: RowClass) -> usize {
        self.constraints.iter().filter(|c| c.class == class).count()
    }

    pub fn constraint(&self, pair: &InputPair) -> Option<&PairConstraint<T>> {
        self.constraints.iter().find(|c| c.pair == *pair)
    }

    /// Same constraints over another rectangle family.
    pub fn with_family(mut self, family: RectFamily) -> Self {
        self.family = family;
        self
    }

    /// Search LP only: moves to the full family and restores the `= 0` rows
    /// for pairs intersecting in fewer than `k` coordinates.
    pub fn with_forbidden_rows(mut self) -> Result<Self> {
        let k = match (self.kind, self.k) {
            (LpKind::Search, Some(k)) => k,
            _ => return Err(Error::KindMismatch(format!("{} LP has no forbidden rows", self.kind))),
        };
        if self.count_class(RowClass::Forbidden) > 0 {
            return Ok(self);
        }
        for pair in all_pairs(self.n) {
            if pair.intersection_size() < k {
                self.constraints.push(PairConstraint {
                    pair,
                    class: RowClass::Forbidden,
                    lower: Some(T::zero()),
                    upper: Some(T::zero()),
                });
            }
        }
        self.constraints.sort_by_key(|a| a.pair);
        self.family = RectFamily::Full;
        Ok(self)
    }
}

fn all_pairs(n: usize) -> impl Iterator<Item = InputPair> {
    BitString::all(n).flat_map(move |x| BitString::all(n).map(move |y| InputPair { x, y }))
}

fn check_universe(n: usize) -> Result<()> {
    if n > 12 {
        return Err(Error::ParameterRange(format!(
            "LP over {n}-bit inputs has 4^{n} rows"
        )));
    }
    Ok(())
}

/// Search LP for `Search^k` over `n` coordinates, variables ranging over the
/// witness family. Pairs meeting in fewer than `k` coordinates lie in no
/// member and carry no row.
pub fn build_search_lp<T: Scalar>(n: usize, k: usize, sigma: T) -> Result<LpInstance<T>> {
    check_universe(n)?;
    if k > n {
        return Err(Error::ParameterRange(format!("k={k} exceeds n={n}")));
    }
    if sigma.is_negative() || sigma > T::one() {
        return Err(Error::ParameterRange(format!(
            "success probability {sigma} outside [0, 1]"
        )));
    }
    let mut constraints = Vec::new();
    for pair in all_pairs(n) {
        let s = pair.intersection_size();
        if s == k {
            constraints.push(PairConstraint {
                pair,
                class: RowClass::Target,
                lower: Some(sigma.clone()),
                upper: Some(T::one()),
            });
        } else if s > k {
            constraints.push(PairConstraint {
                pair,
                class: RowClass::Capped,
                lower: None,
                upper: Some(T::one()),
            });
        }
    }
    Ok(LpInstance {
        kind: LpKind::Search,
        n,
        family: RectFamily::Witness { k },
        k: Some(k),
        sigma: Some(sigma),
        eps: None,
        ambiguity: None,
        constraints,
        degenerate: k == 0,
    })
}

/// Rectangle-bound LP of `f` with error `eps`: 1-inputs covered at least
/// `1 - eps`, 0-inputs at most `eps`.
pub fn build_lovasz_lp<T: Scalar>(f: &TruthTable, eps: T) -> Result<LpInstance<T>> {
    check_universe(f.n())?;
    let half = T::one() / (T::one() + T::one());
    if eps.is_negative() || eps >= half {
        return Err(Error::ParameterRange(format!("error {eps} outside [0, 1/2)")));
    }
    let constraints = all_pairs(f.n())
        .map(|pair| {
            if f.eval(&pair) {
                PairConstraint {
                    pair,
                    class: RowClass::OneInput,
                    lower: Some(T::one() - eps.clone()),
                    upper: None,
                }
            } else {
                PairConstraint {
                    pair,
                    class: RowClass::ZeroInput,
                    lower: None,
                    upper: Some(eps.clone()),
                }
            }
        })
        .collect();
    Ok(LpInstance {
        kind: LpKind::Lovasz,
        n: f.n(),
        family: RectFamily::Full,
        k: None,
        sigma: None,
        eps: Some(eps),
        ambiguity: None,
        constraints,
        degenerate: false,
    })
}

/// Lovász LP with the extra `<= 1` on every 1-input.
pub fn build_smooth_lp<T: Scalar>(f: &TruthTable, eps: T) -> Result<LpInstance<T>> {
    let mut lp = build_lovasz_lp(f, eps)?;
    lp.kind = LpKind::Smooth;
    for c in &mut lp.constraints {
        if c.class == RowClass::OneInput {
            c.upper = Some(T::one());
        }
    }
    Ok(lp)
}

/// Replaces the `<= 1` right-hand sides of a search LP by `2^{rate * k}`.
///
/// The power is exact when `rate * k` is an integer; otherwise it is the
/// nearest double.
pub fn apply_ambiguity_variant<T: Scalar>(
    lp: &LpInstance<T>,
    rate: &BigRational,
    k: usize,
) -> Result<LpInstance<T>> {
    if lp.kind != LpKind::Search {
        return Err(Error::KindMismatch(format!(
            "ambiguity relaxation applies to search LPs, not {}",
            lp.kind
        )));
    }
    if rate.is_negative() {
        return Err(Error::ParameterRange(format!(
            "ambiguity rate {rate} is negative"
        )));
    }
    let (cap, _) = pow2_of_rational(&(rate * BigRational::from_integer(k.into())));
    let cap = T::from_rational(&cap);
    let mut out = lp.clone();
    for c in &mut out.constraints {
        if matches!(c.class, RowClass::Target | RowClass::Capped) {
            c.upper = Some(cap.clone());
        }
    }
    out.ambiguity = Some(rate.clone());
    Ok(out)
}
