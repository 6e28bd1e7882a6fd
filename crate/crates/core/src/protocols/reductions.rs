use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{bits_for, check_inputs, push_number, Execution, Output, Player, Protocol};
use crate::combinatorics::BitString;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[derive(Default)]
pub struct ReductionConfig {
    /// Halving rounds.
    pub s: usize,
    /// Output-fraction rate; derived as `4K/k` when absent.
    pub alpha: Option<f64>,
    pub seed: u64,
}


fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

/// The `index`-th permutation of `0..n` in lexicographic order.
fn permutation(mut index: u128, n: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let f = factorial(n - 1 - i).expect("factorial fits");
        let d = (index / f) as usize;
        index %= f;
        out.push(pool.remove(d));
    }
    out
}

fn permute(s: &BitString, perm: &[usize]) -> BitString {
    BitString::from_coords(
        s.len(),
        perm.iter().enumerate().filter(|(_, &p)| s.contains(p)).map(|(j, _)| j),
    )
    .expect("coordinates in range")
}

/// `Search(N choose K)` from a `Search^k` protocol on blocks of `n`,
/// `N = k n`: permute both inputs with a public random permutation, run the
/// inner protocol, and keep the `K` smallest claimed coordinates (mapped
/// back) when it claims at least `K`; otherwise reject.
pub struct SearchFromKfold {
    inner: Box<dyn Protocol>,
    n: usize,
    k: usize,
    big_k: usize,
    perms: u128,
}

impl SearchFromKfold {
    pub fn new(inner: Box<dyn Protocol>, n: usize, k: usize, big_k: usize) -> Result<Self> {
        let big_n = n * k;
        if inner.input_len() != big_n {
            return Err(Error::Dimension(format!(
                "inner protocol reads {} bits, blocks need {k} x {n}",
                inner.input_len()
            )));
        }
        if big_k > big_n {
            return Err(Error::ParameterRange(format!("K={big_k} exceeds N={big_n}")));
        }
        let perms = factorial(big_n)
            .filter(|p| p.checked_mul(inner.coin_count()).is_some())
            .ok_or_else(|| Error::ParameterRange(format!("{big_n}! permutations do not fit")))?;
        Ok(Self { inner, n, k, big_k, perms })
    }

    pub fn degenerate(&self) -> bool {
        self.big_k == 0
    }
}

impl Protocol for SearchFromKfold {
    fn input_len(&self) -> usize {
        self.n * self.k
    }
    fn coin_count(&self) -> u128 {
        self.perms * self.inner.coin_count()
    }
    fn coin_probability(&self, coin: u128) -> BigRational {
        let ic = self.inner.coin_count();
        self.inner.coin_probability(coin % ic) / BigRational::from_integer(self.perms.into())
    }
    fn cost(&self) -> usize {
        self.inner.cost()
    }
    fn execute(&self, coin: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        check_inputs(self.input_len(), x, y)?;
        let ic = self.inner.coin_count();
        let perm = permutation(coin / ic, self.n * self.k);
        let run = self.inner.execute(coin % ic, &permute(x, &perm), &permute(y, &perm))?;
        let output = if self.big_k == 0 {
            Output::Coordinates(Vec::new())
        } else {
            match &run.output {
                Output::Coordinates(c) if c.len() == self.k => {
                    let mut found: Vec<usize> = c
                        .iter()
                        .enumerate()
                        .filter(|(_, &j)| j > 0 && j <= self.n)
                        .map(|(b, &j)| perm[b * self.n + j - 1] + 1)
                        .collect();
                    found.sort_unstable();
                    if found.len() >= self.big_k {
                        found.truncate(self.big_k);
                        Output::Coordinates(found)
                    } else {
                        Output::Reject
                    }
                }
                _ => Output::Reject,
            }
        };
        Ok(Execution {
            output,
            transcript: run.transcript,
        })
    }
    fn sample_coin(&self, rng: &mut dyn RngCore) -> u128 {
        let p = rng.gen_range(0..self.perms);
        p * self.inner.coin_count() + self.inner.sample_coin(rng)
    }
}

/// Analytic comparison values for the permutation reduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KfoldBounds {
    pub alpha: f64,
    /// `sigma (1 - alpha/4)^{alpha k / 4}`.
    pub alpha_k_over_4: f64,
    /// `sigma (1 - alpha/4)^{alpha K}`.
    pub alternate: f64,
    /// Exact probability that `K` fixed coordinates land in distinct blocks.
    pub spread: BigRational,
}

/// `prod_{i<K} (N - i n) / (N - i)` with `N = k n`.
pub fn block_spread_probability(n: usize, k: usize, big_k: usize) -> BigRational {
    let big_n = (n * k) as i64;
    let mut p = BigRational::one();
    for i in 0..big_k as i64 {
        let num = big_n - i * n as i64;
        if num <= 0 {
            return BigRational::from_integer(0.into());
        }
        p *= BigRational::new(num.into(), (big_n - i).into());
    }
    p
}

pub fn search_from_kfold_bounds(sigma: f64, alpha: Option<f64>, n: usize, k: usize, big_k: usize) -> KfoldBounds {
    let alpha = alpha.unwrap_or(if k == 0 { 0.0 } else { 4.0 * big_k as f64 / k as f64 });
    let base = 1.0 - alpha / 4.0;
    KfoldBounds {
        alpha,
        alpha_k_over_4: sigma * base.powf(alpha * k as f64 / 4.0),
        alternate: sigma * base.powf(alpha * big_k as f64),
        spread: block_spread_probability(n, k, big_k),
    }
}

/// Bits used by [`NdisjToSearch`]: `s + 1` inner calls, one announcement bit
/// per block and round, then per block `L` bits from Alice and a
/// `bits_for(L)`-bit answer from Bob, where `L = n' / 2^s` and `n'` is `n`
/// rounded up to a power of two.
pub fn ndisj_to_search_cost(inner_cost: usize, n: usize, k: usize, s: usize) -> usize {
    let part = n.next_power_of_two() >> s;
    (s + 1) * inner_cost + s * k + k * part + k * bits_for(part)
}

/// `Search^k` from a `NDISJ^k` protocol: one call finds the intersecting
/// blocks, `s` calls halve the candidate interval of each, and the trivial
/// protocol finishes on parts of length `n' / 2^s`. Blocks are zero-padded to
/// a power of two.
pub struct NdisjToSearch {
    inner: Box<dyn Protocol>,
    n: usize,
    k: usize,
    s: usize,
    padded: usize,
    part: usize,
}

impl NdisjToSearch {
    pub fn new(inner: Box<dyn Protocol>, n: usize, k: usize, s: usize) -> Result<Self> {
        if inner.input_len() != n * k {
            return Err(Error::Dimension(format!(
                "inner protocol reads {} bits, blocks need {k} x {n}",
                inner.input_len()
            )));
        }
        let padded = n.next_power_of_two();
        if s >= usize::BITS as usize || 1usize << s > padded {
            return Err(Error::Dimension(format!(
                "{s} halvings do not fit blocks of {n} (padded to {padded})"
            )));
        }
        let calls = (s + 1) as u32;
        inner
            .coin_count()
            .checked_pow(calls)
            .ok_or_else(|| Error::ParameterRange("coin space overflows".into()))?;
        Ok(Self {
            inner,
            n,
            k,
            s,
            padded,
            part: padded >> s,
        })
    }

    /// Bits `lo..lo+len` of block `b`, placed at the start of an `n`-bit block.
    fn window(&self, s: &BitString, b: usize, lo: usize, len: usize) -> BitString {
        let block = s.block(b * self.n, self.n);
        BitString::from_coords(
            self.n,
            (0..len).filter(|&j| lo + j < self.n && block.contains(lo + j)),
        )
        .expect("window fits the block")
    }

    fn decisions(&self, out: &Output) -> Vec<bool> {
        match out {
            Output::Decisions(d) if d.len() == self.k => d.clone(),
            _ => vec![false; self.k],
        }
    }
}

impl Protocol for NdisjToSearch {
    fn input_len(&self) -> usize {
        self.n * self.k
    }
    fn coin_count(&self) -> u128 {
        self.inner.coin_count().pow((self.s + 1) as u32)
    }
    fn coin_probability(&self, mut coin: u128) -> BigRational {
        let ic = self.inner.coin_count();
        let mut p = BigRational::one();
        for _ in 0..=self.s {
            p *= self.inner.coin_probability(coin % ic);
            coin /= ic;
        }
        p
    }
    fn cost(&self) -> usize {
        ndisj_to_search_cost(self.inner.cost(), self.n, self.k, self.s)
    }
    fn execute(&self, coin: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        check_inputs(self.input_len(), x, y)?;
        let ic = self.inner.coin_count();
        let mut digits = (0..=self.s).scan(coin, |c, _| {
            let d = *c % ic;
            *c /= ic;
            Some(d)
        });
        let first = self.inner.execute(digits.next().unwrap(), x, y)?;
        let mut transcript = first.transcript;
        let active = self.decisions(&first.output);
        let mut lo = vec![0usize; self.k];
        let mut len = self.padded;
        for _ in 0..self.s {
            len /= 2;
            let half = |s: &BitString| -> Result<BitString> {
                let parts: Vec<BitString> = (0..self.k)
                    .map(|b| {
                        if active[b] {
                            self.window(s, b, lo[b], len)
                        } else {
                            BitString::empty(self.n)
                        }
                    })
                    .collect();
                BitString::concat(&parts)
            };
            let run = self.inner.execute(digits.next().unwrap(), &half(x)?, &half(y)?)?;
            transcript.extend(run.transcript);
            let left = self.decisions(&run.output);
            for b in 0..self.k {
                let go_left = active[b] && left[b];
                transcript.push((Player::Alice, go_left));
                if active[b] && !left[b] {
                    lo[b] += len;
                }
            }
        }
        let width = bits_for(self.part);
        let mut out = Vec::with_capacity(self.k);
        for b in 0..self.k {
            let xa = if active[b] { self.window(x, b, lo[b], self.part) } else { BitString::empty(self.n) };
            let yb = if active[b] { self.window(y, b, lo[b], self.part) } else { BitString::empty(self.n) };
            // Alice's part, then zeros for the padding beyond the block.
            let shown = self.part.min(self.n);
            push_number(&mut transcript, Player::Alice, xa.index() >> (self.n - shown), shown);
            for _ in shown..self.part {
                transcript.push((Player::Alice, false));
            }
            let j = xa.intersect(&yb).coords().next().map_or(0, |c| c + 1);
            push_number(&mut transcript, Player::Bob, j, width);
            out.push(if j == 0 { 0 } else { lo[b] + j });
        }
        Ok(Execution {
            output: Output::Coordinates(out),
            transcript,
        })
    }
    fn sample_coin(&self, rng: &mut dyn RngCore) -> u128 {
        let ic = self.inner.coin_count();
        let mut coin = 0u128;
        for _ in 0..=self.s {
            coin = coin * ic + self.inner.sample_coin(rng);
        }
        coin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{RandomizedProtocol, TaskSpec, TrivialNdisj, TrivialSearch, Verdict};

    #[test]
    fn permutations_in_order() {
        assert_eq!(permutation(0, 3), vec![0, 1, 2]);
        assert_eq!(permutation(1, 3), vec![0, 2, 1]);
        assert_eq!(permutation(5, 3), vec![2, 1, 0]);
        let s: BitString = "110".parse().unwrap();
        assert_eq!(permute(&s, &[2, 1, 0]).to_string(), "011");
    }

    #[test]
    fn spread() {
        assert_eq!(block_spread_probability(1, 2, 1), BigRational::one());
        assert_eq!(block_spread_probability(2, 2, 2), BigRational::new(2.into(), 3.into()));
        let b = search_from_kfold_bounds(1.0, None, 1, 2, 1);
        assert_eq!(b.alpha, 2.0);
        assert!((b.alpha_k_over_4 - 0.5).abs() < 1e-12);
        assert!((b.alternate - 0.25).abs() < 1e-12);
    }

    #[test]
    fn kfold_reduction_toy() {
        let p = SearchFromKfold::new(Box::new(TrivialSearch::new(1, 2).unwrap()), 1, 2, 1).unwrap();
        assert_eq!(p.coin_count(), 2);
        let task = TaskSpec::choose(2, 1);
        for x in BitString::all(2) {
            for y in BitString::all(2) {
                for c in 0..2 {
                    let e = p.execute(c, &x, &y).unwrap();
                    assert_eq!(task.verdict(&x, &y, &e.output), Verdict::Correct, "{x} {y} {c}");
                }
            }
        }
        let reject = SearchFromKfold::new(Box::new(RandomizedProtocol::constant(2, Output::Reject)), 1, 2, 1).unwrap();
        let one: BitString = "11".parse().unwrap();
        assert_eq!(reject.execute(0, &one, &one).unwrap().output, Output::Reject);
        let zero = SearchFromKfold::new(Box::new(RandomizedProtocol::constant(2, Output::Reject)), 1, 2, 0).unwrap();
        assert!(zero.degenerate());
        assert_eq!(zero.execute(0, &one, &one).unwrap().output, Output::Coordinates(vec![]));
        assert!(SearchFromKfold::new(Box::new(TrivialSearch::new(1, 3).unwrap()), 1, 2, 1).is_err());
    }

    #[test]
    fn halving_finds_coordinates() {
        for (n, k, s) in [(8, 1, 0), (8, 1, 2), (8, 1, 3), (6, 1, 2), (5, 2, 1), (3, 1, 2)] {
            let p = NdisjToSearch::new(Box::new(TrivialNdisj::new(n, k).unwrap()), n, k, s).unwrap();
            let task = TaskSpec::search(n, k);
            let cost = ndisj_to_search_cost((n + 1) * k, n, k, s);
            assert_eq!(p.cost(), cost);
            let len = n * k;
            for xm in 0..1u64 << len {
                for ym in (0..1u64 << len).step_by(3) {
                    let x = BitString::new(len, xm).unwrap();
                    let y = BitString::new(len, ym).unwrap();
                    let e = p.execute(0, &x, &y).unwrap();
                    assert_eq!(task.verdict(&x, &y, &e.output), Verdict::Correct, "{x} {y} s={s}");
                    assert_eq!(e.bits(), cost);
                }
            }
        }
        assert!(NdisjToSearch::new(Box::new(TrivialNdisj::new(8, 1).unwrap()), 8, 1, 4).is_err());
        assert!(NdisjToSearch::new(Box::new(TrivialNdisj::new(8, 1).unwrap()), 4, 1, 1).is_err());
    }
}
