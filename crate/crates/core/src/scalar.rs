//! Numeric abstraction shared by the rectangle oracles and the LP solvers.
//!
//! Two layers: [`Weight`] is all the oracles need (ring operations plus an
//! order), [`Scalar`] adds what the simplex needs (division, tolerance,
//! conversions). Exact instances use [`BigRational`] with zero tolerance.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// Anything that can be summed over a rectangle and compared.
pub trait Weight: Clone + Num + PartialOrd + Debug + Send + Sync {}

impl<T: Clone + Num + PartialOrd + Debug + Send + Sync> Weight for T {}

/// Field-like scalar used by the LP layer.
pub trait Scalar: Weight + Signed + Display + FromPrimitive + 'static {
    /// `true` when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    /// Pivoting / feasibility tolerance. Zero for exact types.
    fn tolerance() -> Self;

    fn to_f64_lossy(&self) -> f64;

    fn from_rational(r: &BigRational) -> Self;

    fn to_rational(&self) -> BigRational;

    fn mode_tag() -> &'static str {
        if Self::EXACT {
            "exact-rational"
        } else {
            "float-tol"
        }
    }

    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }

    fn approx_zero(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn tolerance() -> Self {
        1e-9
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).unwrap_or_else(BigRational::zero)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn tolerance() -> Self {
        1e-5
    }
    fn to_f64_lossy(&self) -> f64 {
        *self as f64
    }
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r) as f32
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).unwrap_or_else(BigRational::zero)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn tolerance() -> Self {
        BigRational::zero()
    }
    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
}

/// Lossy conversion that survives numerators and denominators beyond f64 range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
    let scaled = if shift >= 0 {
        r / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        r * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32)
}

/// Exact `2^e` for integral `e`.
pub fn pow2<T: Scalar>(e: i64) -> T {
    T::from_rational(&pow2_rational(e))
}

pub fn pow2_rational(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// `2^x` for a rational exponent. Exact when `x` is an integer, otherwise the
/// nearest f64 lifted to a rational (second component `false`).
pub fn pow2_of_rational(x: &BigRational) -> (BigRational, bool) {
    if x.is_integer() {
        match x.to_integer().to_i64() {
            Some(e) if e.unsigned_abs() < 1 << 20 => (pow2_rational(e), true),
            _ => (BigRational::zero(), false),
        }
    } else {
        let v = 2f64.powf(rational_to_f64(x));
        (
            BigRational::from_float(v).unwrap_or_else(BigRational::zero),
            false,
        )
    }
}

/// Canonical `p/q` rendering (`p` alone when the denominator is one).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q`, an integer, or a decimal literal such as `0.25` exactly.
pub fn parse_rational(s: &str) -> crate::Result<BigRational> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let numer: BigInt = digits.parse().map_err(|_| bad())?;
        let denom = num_traits::pow(BigInt::from(10u32), frac.len());
        let r = BigRational::new(numer, denom);
        return Ok(if negative { -r } else { r });
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}
