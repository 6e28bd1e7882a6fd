use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{enumerate_support, InputPair, MuParams, DEFAULT_SUPPORT_CAP};
use crate::rectangles::{
    exhaustive_max, max_weight_rectangle_in_family, OracleConfig, RectFamily, Rectangle,
    WeightMatrix, WitnessSet, DEFAULT_ENUMERATION_CAP,
};
use crate::scalar::{format_rational, parse_rational, pow2_of_rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Dual of the search LP built from two `mu` distributions.
    Search,
    /// Dual of the smooth LP for non-disjointness.
    SmoothNdisj,
    /// Anything read from a file or assembled by hand.
    Custom,
}

/// Dual weights `phi >= 0` (on lower-bounded pairs) and `psi <= 0` (on
/// upper-bounded pairs). The objective is `sigma * sum phi + sum psi`; the
/// certificate is feasible when no family rectangle has `phi + psi` weight
/// above one.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub kind: CertificateKind,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub alpha: BigRational,
    pub beta: BigRational,
    pub sigma: BigRational,
    /// Coordinates of the inputs the weights live on.
    pub universe: usize,
    pub family: RectFamily,
    /// `2^{beta n}`.
    pub scale: BigRational,
    /// Factor on the negative part (`2^{-alpha k}` or `3/4`).
    pub discount: BigRational,
    pub phi: BTreeMap<InputPair, BigRational>,
    pub psi: BTreeMap<InputPair, BigRational>,
    /// False when a power of two with a fractional exponent was rounded.
    pub exact: bool,
    pub degenerate: bool,
}

impl DualCertificate {
    pub fn zero(universe: usize, family: RectFamily) -> Self {
        Self {
            kind: CertificateKind::Custom,
            n: universe,
            k: 0,
            m: 0,
            alpha: BigRational::zero(),
            beta: BigRational::zero(),
            sigma: BigRational::one(),
            universe,
            family,
            scale: BigRational::one(),
            discount: BigRational::zero(),
            phi: BTreeMap::new(),
            psi: BTreeMap::new(),
            exact: true,
            degenerate: false,
        }
    }

    /// `sigma * sum phi + sum psi`.
    pub fn value(&self) -> BigRational {
        let pos: BigRational = self.phi.values().sum();
        let neg: BigRational = self.psi.values().sum();
        &self.sigma * pos + neg
    }

    /// The closed form the construction is designed to hit.
    pub fn expected_value(&self) -> BigRational {
        match self.kind {
            CertificateKind::Search => &self.scale * &self.discount,
            CertificateKind::SmoothNdisj => {
                let neg = if self.psi.is_empty() { BigRational::zero() } else { self.discount.clone() };
                &self.scale * (&self.sigma - neg)
            }
            CertificateKind::Custom => self.value(),
        }
    }

    /// `phi >= 0`, `psi <= 0`, and `phi` only on pairs with the mandated
    /// intersection size.
    pub fn check_signs(&self) -> bool {
        let mandated = match self.kind {
            CertificateKind::Search => Some(self.k),
            CertificateKind::SmoothNdisj => Some(1),
            CertificateKind::Custom => None,
        };
        self.phi.iter().all(|(p, v)| {
            !v.is_negative() && mandated.is_none_or(|s| p.intersection_size() == s)
        }) && self.psi.values().all(|v| !v.is_positive())
    }

    /// `phi + psi` on the communication matrix of the universe.
    pub fn weights(&self) -> Result<WeightMatrix<BigRational>> {
        WeightMatrix::from_pairs(self.universe, self.phi.iter().chain(self.psi.iter()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CertificateRecord::from(self)).expect("serializable record")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: CertificateRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        rec.try_into()
    }
}

fn scaled_support(
    p: MuParams,
    factor: &BigRational,
    into: &mut BTreeMap<InputPair, BigRational>,
) -> Result<()> {
    let w = factor * p.point_mass()?;
    for pair in enumerate_support(p, DEFAULT_SUPPORT_CAP)? {
        *into.entry(pair).or_insert_with(BigRational::zero) += &w;
    }
    Ok(())
}

fn times(r: &BigRational, n: usize) -> BigRational {
    r * BigRational::from_integer(n.into())
}

/// Search-LP dual over `n + k` coordinates:
/// `phi = 2^{beta n} mu_{k,n+k,m+k}`, `psi = -2^{beta n} 2^{-alpha k} mu_{2k,n+k,m+k}`,
/// `sigma = 2^{-alpha k + 1}`, so the value is `2^{beta n} 2^{-alpha k}`.
pub fn build_paper_dual_certificate(
    n: usize,
    k: usize,
    m: usize,
    alpha: &BigRational,
    beta: &BigRational,
) -> Result<DualCertificate> {
    let pos = MuParams::new(k, n + k, m + k)?;
    let neg = MuParams::new(2 * k, n + k, m + k)?;
    let (scale, e1) = pow2_of_rational(&times(beta, n));
    let (discount, e2) = pow2_of_rational(&-times(alpha, k));
    let sigma = &discount * BigRational::from_integer(2.into());
    let mut phi = BTreeMap::new();
    let mut psi = BTreeMap::new();
    scaled_support(pos, &scale, &mut phi)?;
    scaled_support(neg, &-(&scale * &discount), &mut psi)?;
    Ok(DualCertificate {
        kind: CertificateKind::Search,
        n,
        k,
        m,
        alpha: alpha.clone(),
        beta: beta.clone(),
        sigma,
        universe: n + k,
        family: RectFamily::Witness { k },
        scale,
        discount,
        phi,
        psi,
        exact: e1 && e2,
        degenerate: k == 0,
    })
}

/// Smooth-LP dual for non-disjointness at error `eps`:
/// `phi = 2^{beta n} mu_{1,n,n/4}`, `psi = -(3/4) 2^{beta n} mu_{2,n,n/4}`,
/// and rectangles touching a disjoint pair excluded from the family.
pub fn build_smooth_dual_ndisj(n: usize, beta: &BigRational, eps: &BigRational) -> Result<DualCertificate> {
    if !n.is_multiple_of(4) {
        return Err(Error::Divisibility { value: n, divisor: 4 });
    }
    if eps.is_negative() || *eps >= BigRational::new(1.into(), 2.into()) {
        return Err(Error::ParameterRange(format!("error {eps} outside [0, 1/2)")));
    }
    let m = n / 4;
    let pos = MuParams::new(1, n, m)?;
    let (scale, exact) = pow2_of_rational(&times(beta, n));
    let discount = BigRational::new(3.into(), 4.into());
    let mut phi = BTreeMap::new();
    let mut psi = BTreeMap::new();
    scaled_support(pos, &scale, &mut phi)?;
    let neg = MuParams { k: 2, n, m };
    let degenerate = !neg.is_valid();
    if !degenerate {
        scaled_support(neg, &-(&scale * &discount), &mut psi)?;
    }
    Ok(DualCertificate {
        kind: CertificateKind::SmoothNdisj,
        n,
        k: 1,
        m,
        alpha: BigRational::zero(),
        beta: beta.clone(),
        sigma: BigRational::one() - eps,
        universe: n,
        family: RectFamily::AvoidDisjoint,
        scale,
        discount,
        phi,
        psi,
        exact,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    Exhaustive,
    Oracle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub max_weight: BigRational,
    pub argmax: Rectangle,
    pub witness: Option<WitnessSet>,
    pub feasible: bool,
    pub value: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyCaps {
    pub enumeration: u128,
    pub oracle: OracleConfig,
}

impl Default for VerifyCaps {
    fn default() -> Self {
        Self {
            enumeration: DEFAULT_ENUMERATION_CAP,
            oracle: OracleConfig::default(),
        }
    }
}

/// Maximum `phi + psi` weight over the certificate's rectangle family,
/// compared against `1 + tol`. Both modes are exact.
pub fn verify_dual_certificate(
    cert: &DualCertificate,
    mode: VerifyMode,
    tol: &BigRational,
    caps: &VerifyCaps,
) -> Result<VerifyReport> {
    let w = cert.weights()?;
    let (argmax, max_weight, witness) = match mode {
        VerifyMode::Exhaustive => exhaustive_max(&w, cert.family, caps.enumeration)?,
        VerifyMode::Oracle => {
            let hit = max_weight_rectangle_in_family(&w, cert.universe, cert.family, &caps.oracle)?;
            (hit.rect, hit.value, hit.witness)
        }
    };
    let witness = witness.filter(|_| !argmax.is_empty());
    Ok(VerifyReport {
        mode,
        feasible: max_weight <= BigRational::one() + tol,
        max_weight,
        argmax,
        witness,
        value: cert.value(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub x: String,
    pub y: String,
    pub w: String,
}

/// Flat, exactly round-tripping form of a certificate. Rationals are `p/q`
/// strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub kind: CertificateKind,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub alpha: String,
    pub beta: String,
    pub sigma: String,
    pub universe: usize,
    pub family: String,
    pub scale: String,
    pub discount: String,
    pub exact: bool,
    pub degenerate: bool,
    pub phi: Vec<WeightEntry>,
    pub psi: Vec<WeightEntry>,
}

fn entries(map: &BTreeMap<InputPair, BigRational>) -> Vec<WeightEntry> {
    map.iter()
        .map(|(p, w)| WeightEntry {
            x: p.x.to_string(),
            y: p.y.to_string(),
            w: format_rational(w),
        })
        .collect()
}

fn parse_entries(list: &[WeightEntry], universe: usize) -> Result<BTreeMap<InputPair, BigRational>> {
    let mut out = BTreeMap::new();
    for e in list {
        let pair = InputPair::parse(&e.x, &e.y)?;
        if pair.n() != universe {
            return Err(Error::Dimension(format!("pair {pair} not over {universe} bits")));
        }
        *out.entry(pair).or_insert_with(BigRational::zero) += parse_rational(&e.w)?;
    }
    Ok(out)
}

impl From<&DualCertificate> for CertificateRecord {
    fn from(c: &DualCertificate) -> Self {
        Self {
            kind: c.kind,
            n: c.n,
            k: c.k,
            m: c.m,
            alpha: format_rational(&c.alpha),
            beta: format_rational(&c.beta),
            sigma: format_rational(&c.sigma),
            universe: c.universe,
            family: c.family.to_string(),
            scale: format_rational(&c.scale),
            discount: format_rational(&c.discount),
            exact: c.exact,
            degenerate: c.degenerate,
            phi: entries(&c.phi),
            psi: entries(&c.psi),
        }
    }
}

impl TryFrom<CertificateRecord> for DualCertificate {
    type Error = Error;
    fn try_from(r: CertificateRecord) -> Result<Self> {
        Ok(Self {
            kind: r.kind,
            n: r.n,
            k: r.k,
            m: r.m,
            alpha: parse_rational(&r.alpha)?,
            beta: parse_rational(&r.beta)?,
            sigma: parse_rational(&r.sigma)?,
            universe: r.universe,
            family: r.family.parse()?,
            scale: parse_rational(&r.scale)?,
            discount: parse_rational(&r.discount)?,
            exact: r.exact,
            degenerate: r.degenerate,
            phi: parse_entries(&r.phi, r.universe)?,
            psi: parse_entries(&r.psi, r.universe)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::pow2_rational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn value_identity() {
        for (n, k, m, a, b) in [(3, 1, 1, q(1, 1), q(1, 3)), (4, 2, 2, q(1, 2), q(1, 4)), (2, 1, 1, q(3, 1), q(1, 2))] {
            let c = build_paper_dual_certificate(n, k, m, &a, &b).unwrap();
            assert!(c.exact);
            assert!(c.check_signs());
            let e = |r: BigRational| -> i64 { r.to_integer().try_into().unwrap() };
            let expected = pow2_rational(e(&b * q(n as i64, 1))) * pow2_rational(-e(&a * q(k as i64, 1)));
            assert_eq!(c.value(), expected);
            assert_eq!(c.value(), c.expected_value());
            assert_eq!(c.sigma, &c.discount * q(2, 1));
        }
    }

    #[test]
    fn degenerate_k0() {
        let c = build_paper_dual_certificate(2, 0, 1, &q(1, 2), &q(1, 2)).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.sigma, q(2, 1));
        assert_eq!(c.value(), q(2, 1));
        assert_eq!(c.phi.keys().collect::<Vec<_>>(), c.psi.keys().collect::<Vec<_>>());
    }

    #[test]
    fn support_errors() {
        assert!(matches!(
            build_paper_dual_certificate(3, 1, 0, &q(1, 2), &q(0, 1)),
            Err(Error::SupportEmpty { .. })
        ));
        assert!(matches!(
            build_smooth_dual_ndisj(6, &q(0, 1), &q(0, 1)),
            Err(Error::Divisibility { value: 6, divisor: 4 })
        ));
    }

    #[test]
    fn smooth_ndisj() {
        let c = build_smooth_dual_ndisj(4, &q(1, 4), &q(0, 1)).unwrap();
        assert_eq!(c.phi.len(), 4);
        assert!(c.degenerate);
        assert_eq!(c.value(), q(2, 1));
        let c = build_smooth_dual_ndisj(8, &q(1, 4), &q(0, 1)).unwrap();
        assert!(!c.degenerate);
        assert_eq!(c.value(), q(1, 1));
        assert_eq!(c.value(), c.expected_value());
        assert!(c.check_signs());
    }

    #[test]
    fn verify_modes_agree() {
        let tol = BigRational::zero();
        let caps = VerifyCaps::default();
        let z = DualCertificate::zero(3, RectFamily::Witness { k: 1 });
        let r = verify_dual_certificate(&z, VerifyMode::Oracle, &tol, &caps).unwrap();
        assert!(r.feasible);
        assert_eq!(r.max_weight, BigRational::zero());
        for beta in [q(0, 1), q(1, 3), q(2, 1)] {
            let c = build_paper_dual_certificate(3, 1, 1, &q(1, 2), &beta).unwrap();
            let e = verify_dual_certificate(&c, VerifyMode::Exhaustive, &tol, &caps).unwrap();
            let o = verify_dual_certificate(&c, VerifyMode::Oracle, &tol, &caps).unwrap();
            assert_eq!(e.max_weight, o.max_weight);
        }
        let big = build_paper_dual_certificate(3, 1, 1, &q(1, 2), &q(2, 1)).unwrap();
        let r = verify_dual_certificate(&big, VerifyMode::Oracle, &tol, &caps).unwrap();
        assert!(!r.feasible);
        assert!(!r.argmax.is_empty());
        assert!(RectFamily::Witness { k: 1 }.contains(&r.argmax));
    }

    #[test]
    fn json_round_trip() {
        let c = build_paper_dual_certificate(3, 1, 1, &q(1, 2), &q(1, 3)).unwrap();
        let back = DualCertificate::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let s = build_smooth_dual_ndisj(4, &q(1, 2), &q(1, 10)).unwrap();
        assert_eq!(DualCertificate::from_json(&s.to_json()).unwrap(), s);
    }
}
