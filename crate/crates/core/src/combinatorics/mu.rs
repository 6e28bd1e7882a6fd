//! The `mu_{k,n,m}` family: uniform distributions over pairs of `m`-subsets of
//! an `n`-universe that intersect in exactly `k` elements.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bits::{bit_positions, deposit, full_mask, BitString, InputPair, SubsetIter};
use crate::{Error, Result};

/// Default cap on materialized support size.
pub const DEFAULT_SUPPORT_CAP: u128 = 10_000_000;

/// Binomial coefficient, zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(BigUint::from(n), BigUint::from(k.min(n - k)))
}

/// `C(n, k)` as `u128`, saturating.
pub fn binom_u128(n: u64, k: u64) -> u128 {
    binom(n, k).to_u128().unwrap_or(u128::MAX)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MuParams {
    /// Intersection size.
    pub k: usize,
    /// Universe size.
    pub n: usize,
    /// Set size.
    pub m: usize,
}

impl MuParams {
    /// Validated constructor; fails when the support would be empty.
    pub fn new(k: usize, n: usize, m: usize) -> Result<Self> {
        let p = Self { k, n, m };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(Error::SupportEmpty { k, n, m })
        }
    }

    pub fn is_valid(&self) -> bool {
        self.k <= self.m && self.m <= self.n && self.m - self.k <= self.n - self.m
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.k, self.n, self.m).map(|_| ())
    }

    /// `C(n,m) * C(m,k) * C(n-m, m-k)`; zero for invalid parameters.
    pub fn support_size(&self) -> BigUint {
        if !self.is_valid() {
            return BigUint::zero();
        }
        let (n, m, k) = (self.n as u64, self.m as u64, self.k as u64);
        binom(n, m) * binom(m, k) * binom(n - m, m - k)
    }

    /// Probability of each support pair.
    pub fn point_mass(&self) -> Result<BigRational> {
        self.validate()?;
        Ok(BigRational::new(One::one(), self.support_size().into()))
    }

    #[inline]
    pub fn in_support(&self, pair: &InputPair) -> bool {
        pair.n() == self.n
            && pair.x.popcount() == self.m
            && pair.y.popcount() == self.m
            && pair.intersection_size() == self.k
    }
}

impl std::fmt::Display for MuParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "mu(k={}, n={}, m={})", self.k, self.n, self.m)
    }
}

/// A `mu_{k,n,m}` with its point mass computed once.
#[derive(Debug, Clone)]
pub struct MuDistribution {
    params: MuParams,
    mass: BigRational,
}

impl MuDistribution {
    pub fn new(params: MuParams) -> Result<Self> {
        let mass = params.point_mass()?;
        Ok(Self { params, mass })
    }

    pub fn params(&self) -> MuParams {
        self.params
    }

    pub fn point_mass(&self) -> &BigRational {
        &self.mass
    }

    pub fn prob(&self, pair: &InputPair) -> BigRational {
        if self.params.in_support(pair) {
            self.mass.clone()
        } else {
            BigRational::zero()
        }
    }
}

/// Probability of `pair` under `mu_{k,n,m}`.
pub fn mu_prob(p: MuParams, pair: &InputPair) -> Result<BigRational> {
    if pair.n() != p.n {
        return Err(Error::Dimension(format!(
            "pair over {} bits, distribution over {}",
            pair.n(),
            p.n
        )));
    }
    Ok(MuDistribution::new(p)?.prob(pair))
}

/// Calls `f` on every support pair, `x` ascending then `y` ascending.
pub fn for_each_support_pair(p: MuParams, mut f: impl FnMut(InputPair)) -> Result<()> {
    p.validate()?;
    if p.n > 63 {
        return Err(Error::ParameterRange(format!(
            "cannot enumerate a {}-bit universe",
            p.n
        )));
    }
    let mut ys = Vec::new();
    for x in BitString::with_popcount(p.n, p.m) {
        let inside = bit_positions(x.mask());
        let outside = bit_positions(!x.mask() & full_mask(p.n));
        ys.clear();
        for common in SubsetIter::new(inside.len(), p.k) {
            let common = deposit(common, &inside);
            for rest in SubsetIter::new(outside.len(), p.m - p.k) {
                ys.push(common | deposit(rest, &outside));
            }
        }
        ys.sort_unstable();
        for &y in &ys {
            f(InputPair {
                x,
                y: BitString::from_mask(p.n, y),
            });
        }
    }
    Ok(())
}

/// Materializes the support, refusing when it exceeds `cap` pairs.
pub fn enumerate_support(p: MuParams, cap: u128) -> Result<Vec<InputPair>> {
    p.validate()?;
    let size = p.support_size().to_u128().unwrap_or(u128::MAX);
    crate::error::check_cap("support enumeration", size, cap)?;
    let mut out = Vec::with_capacity(size as usize);
    for_each_support_pair(p, |pair| out.push(pair))?;
    Ok(out)
}

/// One draw from `mu_{k,n,m}`.
pub fn sample_mu<R: Rng + ?Sized>(p: MuParams, rng: &mut R) -> Result<InputPair> {
    p.validate()?;
    if p.n > 64 {
        return Err(Error::ParameterRange(format!("universe {} too large", p.n)));
    }
    let x_coords = index::sample(rng, p.n, p.m).into_vec();
    let mut in_x = vec![false; p.n];
    for &c in &x_coords {
        in_x[c] = true;
    }
    let outside: Vec<usize> = (0..p.n).filter(|&c| !in_x[c]).collect();
    let common = index::sample(rng, p.m, p.k);
    let rest = index::sample(rng, outside.len(), p.m - p.k);
    let x = BitString::from_coords(p.n, x_coords.iter().copied())?;
    let y = BitString::from_coords(
        p.n,
        common
            .iter()
            .map(|i| x_coords[i])
            .chain(rest.iter().map(|i| outside[i])),
    )?;
    Ok(InputPair { x, y })
}

/// The factor `C(n,k) C(n+k,k) / (C(n+k,2k) 2^(k+1))` by which a witness
/// rectangle's `2k`-intersection mass dominates its `k`-intersection mass.
pub fn intersection_ratio(n: usize, k: usize) -> Result<BigRational> {
    if k > n {
        return Err(Error::ParameterRange(format!("k={k} exceeds n={n}")));
    }
    let (n, k) = (n as u64, k as u64);
    let num = binom(n, k) * binom(n + k, k);
    let den = binom(n + k, 2 * k) << (k as usize + 1);
    Ok(BigRational::new(num.into(), den.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::format_rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pair(x: &str, y: &str) -> InputPair {
        InputPair::parse(x, y).unwrap()
    }

    #[test]
    fn binom_values() {
        assert_eq!(binom(4, 2), 6u32.into());
        assert_eq!(binom(0, 0), 1u32.into());
        assert_eq!(binom(5, 7), 0u32.into());
        assert_eq!(binom(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn mu_prob_examples() {
        let p = |k, n, m| MuParams { k, n, m };
        assert_eq!(
            format_rational(&mu_prob(p(0, 2, 1), &pair("01", "10")).unwrap()),
            "1/2"
        );
        assert_eq!(
            format_rational(&mu_prob(p(1, 4, 1), &pair("1000", "1000")).unwrap()),
            "1/4"
        );
        assert!(mu_prob(p(0, 4, 1), &pair("1000", "1000")).unwrap().is_zero());
        assert!(matches!(
            mu_prob(p(3, 4, 2), &pair("1100", "1100")),
            Err(Error::SupportEmpty { .. })
        ));
        assert!(mu_prob(p(0, 3, 1), &pair("01", "10")).is_err());
    }

    #[test]
    fn support_examples() {
        let s = enumerate_support(MuParams { k: 0, n: 2, m: 1 }, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(s, vec![pair("01", "10"), pair("10", "01")]);
        let s = enumerate_support(MuParams { k: 1, n: 2, m: 1 }, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(s, vec![pair("01", "01"), pair("10", "10")]);
        assert!(enumerate_support(MuParams { k: 2, n: 2, m: 1 }, DEFAULT_SUPPORT_CAP).is_err());
        assert!(matches!(
            enumerate_support(MuParams { k: 0, n: 12, m: 3 }, 100),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn support_matches_brute_force() {
        for n in 0..=6 {
            for m in 0..=n {
                for k in 0..=m {
                    let p = MuParams { k, n, m };
                    let brute: Vec<InputPair> = BitString::all(n)
                        .flat_map(|x| BitString::all(n).map(move |y| InputPair { x, y }))
                        .filter(|q| p.in_support(q))
                        .collect();
                    if !p.is_valid() {
                        assert!(brute.is_empty(), "{p}");
                        continue;
                    }
                    let got = enumerate_support(p, DEFAULT_SUPPORT_CAP).unwrap();
                    assert_eq!(got, brute, "{p}");
                    assert_eq!(BigUint::from(got.len()), p.support_size());
                }
            }
        }
    }

    #[test]
    fn sampler_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = MuParams { k: 0, n: 2, m: 1 };
        let mut first = 0;
        for _ in 0..10_000 {
            let q = sample_mu(p, &mut rng).unwrap();
            assert!(p.in_support(&q));
            if q == pair("01", "10") {
                first += 1;
            }
        }
        assert!((first as f64 / 1e4 - 0.5).abs() < 0.05);

        let q = sample_mu(MuParams { k: 1, n: 4, m: 1 }, &mut rng).unwrap();
        assert_eq!(q.x, q.y);
        assert_eq!(q.x.popcount(), 1);

        assert!(matches!(
            sample_mu(MuParams { k: 3, n: 4, m: 2 }, &mut rng),
            Err(Error::SupportEmpty { .. })
        ));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(format_rational(&intersection_ratio(4, 1).unwrap()), "1/2");
        assert_eq!(format_rational(&intersection_ratio(8, 1).unwrap()), "1/2");
        for n in 0..10 {
            assert_eq!(format_rational(&intersection_ratio(n, 0).unwrap()), "1/2");
        }
        assert!(intersection_ratio(2, 3).is_err());
    }
}
