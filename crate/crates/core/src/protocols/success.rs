use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::tree::{ProtocolTree, RandomizedProtocol};
use super::{Output, Protocol, TaskKind, TaskSpec, Verdict};
use crate::combinatorics::{BitString, InputPair};
use crate::error::check_cap;
use crate::rectangles::{witness_set, Rectangle, WitnessSet};
use crate::{Error, Result};

/// Default cap on `inputs x coins` (or `inputs x trials`) runs.
pub const DEFAULT_EVAL_CAP: u128 = 1 << 28;

/// Largest input length for the leaf-rectangle check (`4^10` runs).
const LEAF_CHECK_BITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpace {
    /// Every pair of `len`-bit strings.
    All,
    Explicit(Vec<InputPair>),
}

impl InputSpace {
    fn size(&self, len: usize) -> u128 {
        match self {
            InputSpace::All => 1u128.checked_shl(2 * len as u32).unwrap_or(u128::MAX),
            InputSpace::Explicit(v) => v.len() as u128,
        }
    }

    fn get(&self, len: usize, i: usize) -> InputPair {
        match self {
            InputSpace::All => InputPair {
                x: BitString::new(len, (i >> len) as u64).expect("in range"),
                y: BitString::new(len, (i & ((1 << len) - 1)) as u64).expect("in range"),
            },
            InputSpace::Explicit(v) => v[i],
        }
    }
}

/// Every pair of `len`-bit strings satisfying `keep`.
pub fn all_inputs(len: usize, keep: impl Fn(&InputPair) -> bool) -> Vec<InputPair> {
    BitString::all(len)
        .flat_map(|x| BitString::all(len).map(move |y| InputPair { x, y }))
        .filter(|p| keep(p))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvalMode {
    Exact,
    MonteCarlo { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Estimate {
    Exact {
        #[serde(serialize_with = "ser_rational")]
        value: BigRational,
    },
    /// Mean with a Wilson score interval at three standard deviations.
    MonteCarlo { mean: f64, low: f64, high: f64, trials: u64 },
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::scalar::format_rational(r))
}

impl Estimate {
    pub fn value(&self) -> f64 {
        match self {
            Estimate::Exact { value } => crate::scalar::rational_to_f64(value),
            Estimate::MonteCarlo { mean, .. } => *mean,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Estimate::Exact { value } => Some(value),
            Estimate::MonteCarlo { .. } => None,
        }
    }

    fn wilson(hits: u64, trials: u64) -> Self {
        let z = 3.0f64;
        let t = trials as f64;
        let p = hits as f64 / t;
        let denom = 1.0 + z * z / t;
        let centre = (p + z * z / (2.0 * t)) / denom;
        let half = z * (p * (1.0 - p) / t + z * z / (4.0 * t * t)).sqrt() / denom;
        Estimate::MonteCarlo {
            mean: p,
            low: if hits == 0 { 0.0 } else { (centre - half).max(0.0) },
            high: if hits == trials { 1.0 } else { (centre + half).min(1.0) },
            trials,
        }
    }
}

/// Worst-case success over an input space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessReport {
    pub success: Estimate,
    pub worst_input: Option<InputPair>,
    /// Largest probability of a wrong (non-reject) output over the inputs.
    pub wrong: Estimate,
    pub inputs: u64,
    pub bits_max: usize,
    /// Inputs by the most bits any coin used on them.
    pub bits_histogram: BTreeMap<usize, u64>,
}

struct PerInput {
    correct: BigRational,
    wrong: BigRational,
    hits: u64,
    wrong_hits: u64,
    bits: usize,
}

pub fn success_probability(
    p: &dyn Protocol,
    task: &TaskSpec,
    space: &InputSpace,
    mode: EvalMode,
    cap: u128,
) -> Result<SuccessReport> {
    let len = p.input_len();
    if task.input_len() != len {
        return Err(Error::Dimension(format!(
            "task {task} reads {} bits, protocol {len}",
            task.input_len()
        )));
    }
    let inputs = space.size(len);
    let per_input = match mode {
        EvalMode::Exact => p.coin_count(),
        EvalMode::MonteCarlo { trials, .. } => trials as u128,
    };
    check_cap("protocol evaluation", inputs.saturating_mul(per_input), cap)?;
    if inputs == 0 {
        return Err(Error::ParameterRange("empty input space".into()));
    }
    let probs: Vec<BigRational> = match mode {
        EvalMode::Exact => (0..p.coin_count()).map(|c| p.coin_probability(c)).collect(),
        EvalMode::MonteCarlo { .. } => Vec::new(),
    };
    let results: Vec<PerInput> = (0..inputs as usize)
        .into_par_iter()
        .map(|i| {
            let pair = space.get(len, i);
            let mut r = PerInput {
                correct: BigRational::zero(),
                wrong: BigRational::zero(),
                hits: 0,
                wrong_hits: 0,
                bits: 0,
            };
            let tally = |coin: u128, r: &mut PerInput| -> Result<Verdict> {
                let e = p.execute(coin, &pair.x, &pair.y)?;
                r.bits = r.bits.max(e.bits());
                Ok(task.verdict(&pair.x, &pair.y, &e.output))
            };
            match mode {
                EvalMode::Exact => {
                    for (c, w) in probs.iter().enumerate() {
                        match tally(c as u128, &mut r)? {
                            Verdict::Correct => r.correct += w,
                            Verdict::Wrong => r.wrong += w,
                            Verdict::Reject => {}
                        }
                    }
                }
                EvalMode::MonteCarlo { seed, trials } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i as u64);
                    for _ in 0..trials {
                        let coin = p.sample_coin(&mut rng);
                        match tally(coin, &mut r)? {
                            Verdict::Correct => r.hits += 1,
                            Verdict::Wrong => r.wrong_hits += 1,
                            Verdict::Reject => {}
                        }
                    }
                }
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;

    let mut worst = 0usize;
    let mut most_wrong = 0usize;
    let mut histogram = BTreeMap::new();
    for (i, r) in results.iter().enumerate() {
        *histogram.entry(r.bits).or_insert(0u64) += 1;
        let (worse, wronger) = match mode {
            EvalMode::Exact => (r.correct < results[worst].correct, r.wrong > results[most_wrong].wrong),
            EvalMode::MonteCarlo { .. } => (r.hits < results[worst].hits, r.wrong_hits > results[most_wrong].wrong_hits),
        };
        if worse {
            worst = i;
        }
        if wronger {
            most_wrong = i;
        }
    }
    let (success, wrong) = match mode {
        EvalMode::Exact => (
            Estimate::Exact { value: results[worst].correct.clone() },
            Estimate::Exact { value: results[most_wrong].wrong.clone() },
        ),
        EvalMode::MonteCarlo { trials, .. } => (
            Estimate::wilson(results[worst].hits, trials),
            Estimate::wilson(results[most_wrong].wrong_hits, trials),
        ),
    };
    Ok(SuccessReport {
        success,
        worst_input: Some(space.get(len, worst)),
        wrong,
        inputs: inputs as u64,
        bits_max: results.iter().map(|r| r.bits).max().unwrap_or(0),
        bits_histogram: histogram,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafInfo {
    /// Transcript leading to the leaf.
    pub path: String,
    pub output: Output,
    /// Bounding rectangle of the pairs reaching the leaf.
    pub rect: Rectangle,
    pub pairs: usize,
    pub is_rectangle: bool,
    pub accepting: bool,
    /// For accepting search leaves: the smallest witness set of the claim size.
    pub witness: Option<WitnessSet>,
    /// For accepting search leaves: every claimed coordinate is 1 on every
    /// row and column.
    pub witness_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafReport {
    pub leaves: Vec<LeafInfo>,
    pub all_rectangles: bool,
    /// Leaves tile the matrix.
    pub partition: bool,
    /// All accepting search leaves pass the witness check.
    pub witnesses_ok: bool,
}

impl LeafReport {
    pub fn accepting(&self) -> impl Iterator<Item = &LeafInfo> {
        self.leaves.iter().filter(|l| l.accepting)
    }
}

fn is_accepting(task: &TaskSpec, out: &Output) -> bool {
    match (task.kind, out) {
        (_, Output::Reject) => false,
        (TaskKind::NdisjK, Output::Decisions(d)) => d.iter().any(|&b| b),
        (TaskKind::SearchChoose, Output::Coordinates(_)) => true,
        _ => out.claims(),
    }
}

/// Runs `tree` on every input pair and checks that each leaf is reached by
/// exactly a rectangle of inputs.
pub fn leaf_rectangle_check(tree: &ProtocolTree, input_len: usize, task: &TaskSpec) -> Result<LeafReport> {
    check_cap("leaf check input length", input_len as u128, LEAF_CHECK_BITS as u128)?;
    let size = 1usize << input_len;
    let mut reach: HashMap<String, (Rectangle, usize)> = HashMap::new();
    for x in BitString::all(input_len) {
        for y in BitString::all(input_len) {
            let e = tree.run(&x, &y)?;
            let entry = reach
                .entry(e.transcript_string())
                .or_insert_with(|| (Rectangle::empty(size, size), 0));
            entry.0.insert_row(x.index());
            entry.0.insert_col(y.index());
            entry.1 += 1;
        }
    }
    let mut leaves = Vec::new();
    let mut total = 0;
    for (path, output) in tree.leaves() {
        let (rect, pairs) = reach
            .remove(&path)
            .unwrap_or_else(|| (Rectangle::empty(size, size), 0));
        total += pairs;
        let is_rectangle = pairs == rect.area();
        let accepting = is_accepting(task, output);
        let (witness, witness_ok) = if accepting && task.is_search() {
            let claimed = task.claimed_coords(output).unwrap_or_default();
            let common = rect
                .row_indices()
                .chain(rect.col_indices())
                .fold(!0u64, |acc, i| acc & i as u64);
            let ok = claimed.iter().all(|&c| {
                rect.is_empty() || common & BitString::from_coords(input_len, [c]).map_or(0, |b| b.mask()) != 0
            });
            (witness_set(&rect, claimed.len()), Some(ok))
        } else {
            (None, None)
        };
        leaves.push(LeafInfo {
            path,
            output: output.clone(),
            rect,
            pairs,
            is_rectangle,
            accepting,
            witness,
            witness_ok,
        });
    }
    if !reach.is_empty() {
        return Err(Error::MalformedTree("run ended away from a leaf".into()));
    }
    let all_rectangles = leaves.iter().all(|l| l.is_rectangle);
    Ok(LeafReport {
        partition: all_rectangles && total == size * size,
        witnesses_ok: leaves.iter().all(|l| l.witness_ok != Some(false)),
        all_rectangles,
        leaves,
    })
}

/// Primal weights from a protocol: each accepting leaf rectangle of each
/// branch gets the branch probability.
pub fn protocol_lp_weights(p: &RandomizedProtocol, task: &TaskSpec) -> Result<Vec<(Rectangle, BigRational)>> {
    let mut order: Vec<Rectangle> = Vec::new();
    let mut weight: HashMap<Rectangle, BigRational> = HashMap::new();
    for (prob, tree) in &p.branches {
        let report = leaf_rectangle_check(tree, p.input_len, task)?;
        if !report.all_rectangles {
            return Err(Error::MalformedTree("a leaf is not reached by a rectangle".into()));
        }
        for leaf in report.accepting().filter(|l| !l.rect.is_empty()) {
            if !weight.contains_key(&leaf.rect) {
                order.push(leaf.rect.clone());
            }
            *weight.entry(leaf.rect.clone()).or_insert_with(BigRational::zero) += prob;
        }
    }
    Ok(order
        .into_iter()
        .map(|r| {
            let w = weight.remove(&r).expect("recorded");
            (r, w)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{make_verified, TrivialNdisj, TrivialSearch, VerifyStyle};
    use num_traits::One;

    #[test]
    fn trivial_is_perfect() {
        let p = TrivialNdisj::new(2, 1).unwrap();
        let r = success_probability(&p, &TaskSpec::ndisj(2, 1), &InputSpace::All, EvalMode::Exact, DEFAULT_EVAL_CAP)
            .unwrap();
        assert_eq!(r.success.exact(), Some(&BigRational::one()));
        assert_eq!(r.bits_max, 3);
        assert_eq!(r.bits_histogram.get(&3), Some(&16));
    }

    #[test]
    fn coin_guess_is_half() {
        let p = RandomizedProtocol::uniform(
            1,
            vec![
                ProtocolTree::leaf(Output::Decisions(vec![true])),
                ProtocolTree::leaf(Output::Decisions(vec![false])),
            ],
        )
        .unwrap();
        let r = success_probability(&p, &TaskSpec::ndisj(1, 1), &InputSpace::All, EvalMode::Exact, DEFAULT_EVAL_CAP)
            .unwrap();
        assert_eq!(r.success.exact(), Some(&BigRational::new(1.into(), 2.into())));
        let mc = success_probability(
            &p,
            &TaskSpec::ndisj(1, 1),
            &InputSpace::All,
            EvalMode::MonteCarlo { seed: 3, trials: 2000 },
            DEFAULT_EVAL_CAP,
        )
        .unwrap();
        let Estimate::MonteCarlo { low, high, .. } = mc.success else { panic!() };
        assert!(low <= 0.5 && 0.5 <= high + 0.05);
    }

    #[test]
    fn always_reject_search() {
        let p = RandomizedProtocol::constant(2, Output::Reject);
        let r = success_probability(&p, &TaskSpec::search(2, 1), &InputSpace::All, EvalMode::Exact, DEFAULT_EVAL_CAP)
            .unwrap();
        assert_eq!(r.success.exact(), Some(&BigRational::zero()));
        assert_eq!(r.wrong.exact(), Some(&BigRational::zero()));
    }

    #[test]
    fn leaves_of_trivial_ndisj() {
        let t = TrivialNdisj::new(2, 1).unwrap().to_tree().unwrap();
        let rep = leaf_rectangle_check(&t.branches[0].1, 2, &TaskSpec::ndisj(2, 1)).unwrap();
        assert!(rep.all_rectangles && rep.partition);
        assert_eq!(rep.accepting().count(), 4);
        let single = ProtocolTree::leaf(Output::Decisions(vec![true]));
        let rep = leaf_rectangle_check(&single, 2, &TaskSpec::ndisj(2, 1)).unwrap();
        assert_eq!(rep.leaves.len(), 1);
        assert_eq!(rep.leaves[0].rect, Rectangle::full(4, 4));
    }

    #[test]
    fn verified_search_leaves_have_witnesses() {
        let task = TaskSpec::search(2, 1);
        let p = TrivialSearch::new(2, 1).unwrap().to_tree().unwrap().verified(&task, VerifyStyle::Explicit);
        let rep = leaf_rectangle_check(&p.branches[0].1, 2, &task).unwrap();
        assert!(rep.partition && rep.witnesses_ok);
        for leaf in rep.accepting().filter(|l| !l.rect.is_empty()) {
            assert!(leaf.witness.is_some());
        }
        let wrapped = make_verified(TrivialSearch::new(2, 1).unwrap(), task, VerifyStyle::Strict);
        let r = success_probability(&wrapped, &task, &InputSpace::All, EvalMode::Exact, DEFAULT_EVAL_CAP).unwrap();
        assert_eq!(r.success.exact(), Some(&BigRational::one()));
    }
}
