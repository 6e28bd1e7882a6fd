use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use commlp::combinatorics::{BitString, InputPair};
use commlp::protocols::{
    make_verified, ndisj_to_search_cost, search_from_kfold_bounds, success_probability, EvalMode, InputSpace,
    NdisjToSearch, Protocol, RandomizedProtocol, SearchFromKfold, TaskSpec, TrivialNdisj, TrivialSearch, VerifyStyle,
};
use commlp::Rational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{self, AnyResult, Caps, OutputArgs, Timer};
use crate::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Alice sends each block, Bob answers per block.
    TrivialNdisj,
    /// Alice sends each block, Bob names the first common coordinate.
    TrivialSearch,
    /// Trivial search wrapped with coordinate verification.
    VerifiedSearch,
    /// Search from a perfect NDISJ protocol by halving.
    NdisjToSearch,
    /// Search(N choose K) from a perfect k-fold search protocol.
    SearchFromKfold,
    /// A randomized protocol tree read from `--tree`.
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Style {
    Explicit,
    Strict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Args, Debug)]
pub struct ProtocolArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    /// Block length.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of blocks.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Required outputs for `search-from-kfold`.
    #[arg(long = "big-k", default_value_t = 1)]
    pub big_k: usize,
    /// Halving rounds for `ndisj-to-search`.
    #[arg(long, default_value_t = 0)]
    pub s: usize,
    /// Output-fraction rate for the analytic bound of `search-from-kfold`.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "explicit")]
    pub style: Style,
    #[arg(long)]
    pub tree: Option<PathBuf>,
    /// Task for `--which file`, e.g. `ndisj:2:1`, `search:2:1`, `choose:4:2`.
    #[arg(long)]
    pub task: Option<TaskSpec>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Evaluate on this many seeded random inputs instead of all of them.
    #[arg(long)]
    pub input_samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

struct Setup {
    protocol: Box<dyn Protocol>,
    task: TaskSpec,
    analytic: Value,
    /// Lower bound on success the measurement is held to.
    floor: Option<f64>,
    formula_bits: Option<usize>,
}

fn setup(a: &ProtocolArgs) -> AnyResult<Setup> {
    let n = || a.n.ok_or("--n is required");
    let style = match a.style {
        Style::Explicit => VerifyStyle::Explicit,
        Style::Strict => VerifyStyle::Strict,
    };
    let one = json!({ "success": report::exact(&Rational::one()) });
    Ok(match a.which {
        Which::TrivialNdisj => Setup {
            protocol: Box::new(TrivialNdisj::new(n()?, a.k)?),
            task: TaskSpec::ndisj(n()?, a.k),
            analytic: one,
            floor: Some(1.0),
            formula_bits: Some(a.k * (n()? + 1)),
        },
        Which::TrivialSearch => Setup {
            protocol: Box::new(TrivialSearch::new(n()?, a.k)?),
            task: TaskSpec::search(n()?, a.k),
            analytic: one,
            floor: Some(1.0),
            formula_bits: None,
        },
        Which::VerifiedSearch => {
            let task = TaskSpec::search(n()?, a.k);
            Setup {
                protocol: Box::new(make_verified(TrivialSearch::new(n()?, a.k)?, task, style)),
                task,
                analytic: json!({ "success": report::exact(&Rational::one()), "wrong": report::exact(&Rational::from_integer(0.into())) }),
                floor: Some(1.0),
                formula_bits: None,
            }
        }
        Which::NdisjToSearch => {
            let (n, k, s) = (n()?, a.k, a.s);
            let inner = TrivialNdisj::new(n, k)?;
            let bits = ndisj_to_search_cost(inner.cost(), n, k, s);
            Setup {
                protocol: Box::new(NdisjToSearch::new(Box::new(inner), n, k, s)?),
                task: TaskSpec::search(n, k),
                analytic: json!({
                    "base_success": report::exact(&Rational::one()),
                    "success": report::exact(&Rational::one()),
                    "rounds": s,
                    "cost_formula": bits,
                }),
                floor: Some(1.0),
                formula_bits: Some(bits),
            }
        }
        Which::SearchFromKfold => {
            let (n, k, big_k) = (n()?, a.k, a.big_k);
            let p = SearchFromKfold::new(Box::new(TrivialSearch::new(n, k)?), n, k, big_k)?;
            let b = search_from_kfold_bounds(1.0, a.alpha, n, k, big_k);
            Setup {
                analytic: json!({
                    "alpha": report::float(b.alpha, 0.0),
                    "bound_alpha_k_over_4": report::float(b.alpha_k_over_4, 1e-12),
                    "bound_alpha_big_k": report::float(b.alternate, 1e-12),
                    "block_spread": report::exact(&b.spread),
                    "degenerate": p.degenerate(),
                }),
                protocol: Box::new(p),
                task: TaskSpec::choose(n * k, big_k),
                floor: Some(b.alternate),
                formula_bits: None,
            }
        }
        Which::File => {
            let path = a.tree.as_ref().ok_or("--tree is required")?;
            let task = a.task.ok_or("--task is required")?;
            let p: RandomizedProtocol = serde_json::from_str(&fs::read_to_string(path)?)?;
            Setup {
                protocol: Box::new(p),
                task,
                analytic: Value::Null,
                floor: None,
                formula_bits: None,
            }
        }
    })
}

fn sampled_inputs(len: usize, count: usize, seed: u64) -> AnyResult<Vec<InputPair>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    (0..count)
        .map(|_| {
            Ok(InputPair {
                x: BitString::new(len, rng.gen_range(0..=top))?,
                y: BitString::new(len, rng.gen_range(0..=top))?,
            })
        })
        .collect()
}

pub fn run(a: &ProtocolArgs) -> AnyResult<Status> {
    let timer = Timer::start();
    let caps = Caps::from_env()?;
    let st = setup(a)?;
    let needs_seed = a.mode == Mode::MonteCarlo || a.input_samples.is_some();
    let seed = match (a.seed, needs_seed) {
        (Some(s), _) => s,
        (None, false) => 0,
        (None, true) => return Err("--seed is required for randomized runs".into()),
    };
    let len = st.protocol.input_len();
    let space = match a.input_samples {
        Some(c) => InputSpace::Explicit(sampled_inputs(len, c, seed)?),
        None => InputSpace::All,
    };
    let mode = match a.mode {
        Mode::Exact => EvalMode::Exact,
        Mode::MonteCarlo => EvalMode::MonteCarlo { seed, trials: a.trials },
    };
    let r = success_probability(st.protocol.as_ref(), &st.task, &space, mode, caps.eval)?;
    let meets = st.floor.map(|f| match a.mode {
        Mode::Exact => r.success.value() >= f - 1e-12,
        Mode::MonteCarlo => match &r.success {
            commlp::protocols::Estimate::MonteCarlo { high, .. } => *high >= f - 1e-12,
            e => e.value() >= f - 1e-12,
        },
    });
    let mut rep = json!({
        "protocol": a.which.to_possible_value().expect("named").get_name(),
        "task": st.task.to_string(),
        "declared_cost": st.protocol.cost(),
        "coins": st.protocol.coin_count().to_string(),
        "inputs": r.inputs,
        "input_space": if a.input_samples.is_some() { "sampled" } else { "all" },
        "success": report::estimate(&r.success),
        "wrong": report::estimate(&r.wrong),
        "worst_input": r.worst_input,
        "bits_max": r.bits_max,
        "bits_histogram": r.bits_histogram.iter().map(|(b, c)| (b.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        "analytic": st.analytic,
        "meets_analytic": meets,
    });
    if let Some(bits) = st.formula_bits {
        rep["bits_match_formula"] = json!(r.bits_max == bits);
    }
    if a.seed.is_some() {
        rep["seed"] = json!(seed);
    }
    timer.stamp(&a.output, &mut rep);
    report::emit(&report::render(&rep, a.output.format)?, &a.output)?;
    Ok(if meets == Some(false) { Status::Failed } else { Status::Ok })
}
