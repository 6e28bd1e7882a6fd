//! Executable public-coin protocols, k-fold tasks, and the reductions
//! between them.
//!
//! A [`Protocol`] is a finite public-coin mixture: coin `c` in
//! `0..coin_count()` has probability `coin_probability(c)` and selects a
//! deterministic strategy. Composed protocols are executed directly rather
//! than materialized as trees, since their trees are exponentially large.

mod reductions;
mod success;
mod task;
mod tree;
mod trivial;
mod verified;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::combinatorics::BitString;
use crate::{Error, Result};

pub use reductions::{
    block_spread_probability, ndisj_to_search_cost, search_from_kfold_bounds, NdisjToSearch,
    ReductionConfig, SearchFromKfold, KfoldBounds,
};
pub use success::{
    all_inputs, leaf_rectangle_check, protocol_lp_weights, success_probability, Estimate,
    EvalMode, InputSpace, LeafInfo, LeafReport, SuccessReport, DEFAULT_EVAL_CAP,
};
pub use task::{TaskKind, TaskSpec, Verdict};
pub use tree::{Message, ProtocolTree, RandomizedProtocol};
pub use trivial::{TrivialNdisj, TrivialSearch};
pub use verified::{make_verified, verify_tree, VerifiedProtocol, VerifyStyle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Alice,
    Bob,
}

/// The agreed output of a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    /// One answer per block of a k-fold decision task.
    Decisions(Vec<bool>),
    /// 1-based coordinates; `0` means "no intersection" for that block.
    Coordinates(Vec<usize>),
    Reject,
}

impl Output {
    /// Whether the output claims at least one coordinate.
    pub fn claims(&self) -> bool {
        matches!(self, Output::Coordinates(c) if c.iter().any(|&j| j > 0))
    }
}

/// Result of one deterministic run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub output: Output,
    /// Every bit sent, in order, with its sender.
    pub transcript: Vec<(Player, bool)>,
}

impl Execution {
    pub fn bits(&self) -> usize {
        self.transcript.len()
    }

    pub fn transcript_string(&self) -> String {
        self.transcript.iter().map(|&(_, b)| if b { '1' } else { '0' }).collect()
    }
}

pub trait Protocol: Send + Sync {
    /// Length of each player's input.
    fn input_len(&self) -> usize;

    fn coin_count(&self) -> u128;

    fn coin_probability(&self, coin: u128) -> BigRational;

    /// Worst-case number of bits exchanged.
    fn cost(&self) -> usize;

    fn execute(&self, coin: u128, x: &BitString, y: &BitString) -> Result<Execution>;

    /// Draws a coin by inverting the cumulative distribution.
    fn sample_coin(&self, rng: &mut dyn RngCore) -> u128 {
        let count = self.coin_count();
        if count <= 1 {
            return 0;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for c in 0..count {
            acc += self.coin_probability(c).to_f64().unwrap_or(0.0);
            if u < acc {
                return c;
            }
        }
        count - 1
    }
}

impl<P: Protocol + ?Sized> Protocol for Box<P> {
    fn input_len(&self) -> usize {
        (**self).input_len()
    }
    fn coin_count(&self) -> u128 {
        (**self).coin_count()
    }
    fn coin_probability(&self, coin: u128) -> BigRational {
        (**self).coin_probability(coin)
    }
    fn cost(&self) -> usize {
        (**self).cost()
    }
    fn execute(&self, coin: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        (**self).execute(coin, x, y)
    }
    fn sample_coin(&self, rng: &mut dyn RngCore) -> u128 {
        (**self).sample_coin(rng)
    }
}

pub(crate) fn check_inputs(len: usize, x: &BitString, y: &BitString) -> Result<()> {
    if x.len() != len || y.len() != len {
        return Err(Error::Dimension(format!(
            "inputs of length {} and {}, protocol expects {len}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// Bits needed to send a number in `0..=max`.
pub fn bits_for(max: usize) -> usize {
    (usize::BITS - max.leading_zeros()) as usize
}

pub(crate) fn push_number(t: &mut Vec<(Player, bool)>, who: Player, value: usize, width: usize) {
    for b in (0..width).rev() {
        t.push((who, value >> b & 1 == 1));
    }
}

/// Public-coin mixture of arbitrary protocols over the same inputs.
pub struct Mixture {
    parts: Vec<(BigRational, Box<dyn Protocol>)>,
    offsets: Vec<u128>,
}

impl Mixture {
    pub fn new(parts: Vec<(BigRational, Box<dyn Protocol>)>) -> Result<Self> {
        check_distribution(parts.iter().map(|(p, _)| p))?;
        let len = parts[0].1.input_len();
        if parts.iter().any(|(_, q)| q.input_len() != len) {
            return Err(Error::Dimension("mixture parts disagree on input length".into()));
        }
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        let mut acc = 0u128;
        for (_, q) in &parts {
            offsets.push(acc);
            acc = acc.saturating_add(q.coin_count());
        }
        offsets.push(acc);
        Ok(Self { parts, offsets })
    }

    fn locate(&self, coin: u128) -> (usize, u128) {
        let i = self.offsets.partition_point(|&o| o <= coin) - 1;
        (i, coin - self.offsets[i])
    }
}

pub(crate) fn check_distribution<'a>(probs: impl Iterator<Item = &'a BigRational>) -> Result<()> {
    let mut total = BigRational::zero();
    let mut count = 0;
    for p in probs {
        if *p <= BigRational::zero() {
            return Err(Error::ParameterRange(format!("probability {p} is not positive")));
        }
        total += p;
        count += 1;
    }
    if count == 0 || !total.is_one() {
        return Err(Error::ParameterRange(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

impl Protocol for Mixture {
    fn input_len(&self) -> usize {
        self.parts[0].1.input_len()
    }
    fn coin_count(&self) -> u128 {
        *self.offsets.last().unwrap()
    }
    fn coin_probability(&self, coin: u128) -> BigRational {
        let (i, c) = self.locate(coin);
        &self.parts[i].0 * self.parts[i].1.coin_probability(c)
    }
    fn cost(&self) -> usize {
        self.parts.iter().map(|(_, q)| q.cost()).max().unwrap_or(0)
    }
    fn execute(&self, coin: u128, x: &BitString, y: &BitString) -> Result<Execution> {
        if coin >= self.coin_count() {
            return Err(Error::ParameterRange(format!("coin {coin} out of range")));
        }
        let (i, c) = self.locate(coin);
        self.parts[i].1.execute(c, x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(bits_for(0), 0);
        assert_eq!(bits_for(1), 1);
        assert_eq!(bits_for(2), 2);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(8), 4);
        let mut t = Vec::new();
        push_number(&mut t, Player::Bob, 5, 4);
        let s: String = t.iter().map(|&(_, b)| if b { '1' } else { '0' }).collect();
        assert_eq!(s, "0101");
    }

    #[test]
    fn mixture_coins() {
        let half = BigRational::new(1.into(), 2.into());
        let m = Mixture::new(vec![
            (half.clone(), Box::new(TrivialNdisj::new(1, 1).unwrap())),
            (half.clone(), Box::new(RandomizedProtocol::constant(1, Output::Decisions(vec![true])))),
        ])
        .unwrap();
        assert_eq!(m.coin_count(), 2);
        assert_eq!(m.coin_probability(1), half);
        let x: BitString = "0".parse().unwrap();
        assert_eq!(m.execute(1, &x, &x).unwrap().output, Output::Decisions(vec![true]));
        assert_eq!(m.execute(0, &x, &x).unwrap().output, Output::Decisions(vec![false]));
        assert!(Mixture::new(vec![(half, Box::new(TrivialNdisj::new(1, 1).unwrap()))]).is_err());
    }
}
