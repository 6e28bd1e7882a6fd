use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{for_each_support_pair, BitString, MuParams};
use crate::scalar::{rational_to_f64, Scalar};
use crate::{Error, Result};

/// Largest population enumerated exhaustively (`2^20` rectangles).
pub const EXHAUSTIVE_SCAN_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    /// Exhaustive when under the cap, sampled otherwise.
    Auto,
    /// Only the full matrix.
    FullOnly,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Largeness exponent: rectangles with `mu_0(R) >= 2^{-gamma n}` count.
    pub gamma: f64,
    /// Exponent of the additive error term.
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
    pub population: Population,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            delta: 0.1,
            samples: 10_000,
            seed: 0,
            population: Population::Auto,
        }
    }
}

/// Masses of one rectangle. Rectangles are over the `m`-subsets only, the
/// rest of the matrix carries no mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub id: usize,
    pub rows: usize,
    pub cols: usize,
    pub mu0: BigRational,
    pub mu1: BigRational,
    pub mu_k: BigRational,
    /// `mu_k / mu_0`, absent when `mu_0 = 0`.
    pub ratio: Option<BigRational>,
    pub large: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub population: Population,
    /// `log2` of the largeness bar, `-gamma n`.
    pub log2_bar: f64,
    pub rows: Vec<ScanRow>,
    pub large_count: usize,
    pub min_ratio: Option<BigRational>,
    pub mean_ratio: Option<f64>,
    /// Every large rectangle has `mu_k >= mu_0 / 2^{k+1}`.
    pub lower_bound_holds: bool,
    /// Smallest `mu_1 / mu_0` over large rectangles.
    pub min_one_ratio: Option<BigRational>,
    /// Every large rectangle has `mu_1 >= (2/3) mu_0`.
    pub one_ratio_holds: bool,
    /// Whether `n/4 - delta n <= m <= n/4`.
    pub m_in_range: bool,
    /// Smallest `mu_k - (mu_0 / 2^k - k 2^{-delta (n-k+1)})` over large rectangles.
    pub min_slack: Option<f64>,
    pub warning: Option<String>,
}

/// Local indices of the `m`-subsets and the support pairs of one intersection
/// size in those indices.
struct Supports {
    sets: usize,
    pairs: Vec<Vec<(u32, u32)>>,
    sizes: Vec<BigInt>,
}

fn supports(n: usize, m: usize, ks: &[usize]) -> Result<Supports> {
    let sets: Vec<BitString> = BitString::with_popcount(n, m).collect();
    let mut local = vec![u32::MAX; 1usize << n];
    for (i, s) in sets.iter().enumerate() {
        local[s.index()] = i as u32;
    }
    let mut pairs = Vec::new();
    let mut sizes = Vec::new();
    for &k in ks {
        let p = MuParams::new(k, n, m)?;
        let mut v = Vec::new();
        for_each_support_pair(p, |pair| {
            v.push((local[pair.x.index()], local[pair.y.index()]));
        })?;
        sizes.push(BigInt::from(v.len()));
        pairs.push(v);
    }
    Ok(Supports { sets: sets.len(), pairs, sizes })
}

struct LocalRect {
    rows: Vec<bool>,
    cols: Vec<bool>,
}

fn random_side(rng: &mut ChaCha8Rng, s: usize) -> Vec<bool> {
    let density: f64 = rng.gen_range(0.25..1.0);
    let mut side: Vec<bool> = (0..s).map(|_| rng.gen_bool(density)).collect();
    if !side.iter().any(|&b| b) {
        let i = rng.gen_range(0..s);
        side[i] = true;
    }
    side
}

/// Empirical check of how `mu_k`, `mu_1` and `mu_0` compare on large
/// rectangles over the `m`-subsets of `[n]`.
pub fn sampling_lemma_scan(p: MuParams, target_k: usize, cfg: &ScanConfig) -> Result<ScanReport> {
    if !cfg.gamma.is_finite() || cfg.delta.is_nan() || cfg.delta <= 0.0 {
        return Err(Error::ParameterRange(format!(
            "gamma={} must be finite and delta={} positive",
            cfg.gamma, cfg.delta
        )));
    }
    let (n, m) = (p.n, p.m);
    if n > 20 {
        return Err(Error::ParameterRange(format!("scan over {n} coordinates")));
    }
    let sup = supports(n, m, &[0, 1, target_k])?;
    let s = sup.sets;
    let exhaustive_size = if 2 * s >= 127 { u128::MAX } else { 1u128 << (2 * s) };
    let population = match cfg.population {
        Population::Auto if exhaustive_size <= EXHAUSTIVE_SCAN_CAP => Population::Exhaustive,
        Population::Auto => Population::Sampled,
        other => other,
    };
    let rects: Vec<LocalRect> = match population {
        Population::FullOnly => vec![LocalRect { rows: vec![true; s], cols: vec![true; s] }],
        Population::Exhaustive => {
            crate::error::check_cap("scan population", exhaustive_size, EXHAUSTIVE_SCAN_CAP)?;
            let side = |mask: u64| (0..s).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
            (1..1u64 << s)
                .flat_map(|a| (1..1u64 << s).map(move |b| (a, b)))
                .map(|(a, b)| LocalRect { rows: side(a), cols: side(b) })
                .collect()
        }
        Population::Sampled | Population::Auto => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..cfg.samples)
                .map(|_| {
                    let rows = random_side(&mut rng, s);
                    let cols = random_side(&mut rng, s);
                    LocalRect { rows, cols }
                })
                .collect()
        }
    };

    let log2_bar = -cfg.gamma * n as f64;
    let rows: Vec<ScanRow> = rects
        .par_iter()
        .enumerate()
        .map(|(id, r)| {
            let mass = |j: usize| {
                let count = sup.pairs[j]
                    .iter()
                    .filter(|(a, b)| r.rows[*a as usize] && r.cols[*b as usize])
                    .count();
                BigRational::new(BigInt::from(count), sup.sizes[j].clone())
            };
            let (mu0, mu1, mu_k) = (mass(0), mass(1), mass(2));
            let ratio = (!mu0.is_zero()).then(|| &mu_k / &mu0);
            ScanRow {
                id,
                rows: r.rows.iter().filter(|&&b| b).count(),
                cols: r.cols.iter().filter(|&&b| b).count(),
                large: !mu0.is_zero() && rational_to_f64(&mu0).log2() >= log2_bar,
                mu0,
                mu1,
                mu_k,
                ratio,
            }
        })
        .collect();

    let large: Vec<&ScanRow> = rows.iter().filter(|r| r.large).collect();
    let min_ratio = large.iter().filter_map(|r| r.ratio.clone()).min();
    let mean_ratio = (!large.is_empty()).then(|| {
        large
            .iter()
            .filter_map(|r| r.ratio.as_ref().map(|q| q.to_f64_lossy()))
            .sum::<f64>()
            / large.len() as f64
    });
    let two = BigRational::from_integer(2.into());
    let k_pow = num_traits::pow(two.clone(), target_k);
    let lower_bound_holds = large.iter().all(|r| r.mu_k.clone() * &k_pow * &two >= r.mu0);
    let min_one_ratio = large.iter().filter(|r| !r.mu0.is_zero()).map(|r| &r.mu1 / &r.mu0).min();
    let one_ratio_holds = large
        .iter()
        .all(|r| r.mu1.clone() * BigRational::from_integer(3.into()) >= r.mu0.clone() * &two);
    let quarter = n as f64 / 4.0;
    let m_in_range = (m as f64) <= quarter && (m as f64) >= quarter - cfg.delta * n as f64;
    let err = target_k as f64 * 2f64.powf(-cfg.delta * (n as f64 - target_k as f64 + 1.0));
    let min_slack = large
        .iter()
        .map(|r| {
            r.mu_k.to_f64().unwrap_or(0.0)
                - (r.mu0.to_f64().unwrap_or(0.0) / 2f64.powi(target_k as i32) - err)
        })
        .reduce(f64::min);
    let warning = large.is_empty().then(|| {
        format!("empty population: no rectangle reaches mu_0 mass 2^{}", log2_bar)
    });
    Ok(ScanReport {
        n,
        m,
        k: target_k,
        population,
        log2_bar,
        large_count: large.len(),
        min_ratio,
        mean_ratio,
        lower_bound_holds,
        min_one_ratio,
        one_ratio_holds,
        m_in_range,
        min_slack,
        warning,
        rows,
    })
}
