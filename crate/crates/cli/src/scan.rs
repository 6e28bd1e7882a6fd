use clap::{Args, ValueEnum};
use commlp::combinatorics::MuParams;
use commlp::lp::{sampling_lemma_scan, Population, ScanConfig, ScanReport};
use commlp::scalar::format_rational;
use serde_json::json;

use crate::report::{self, AnyResult, Format, OutputArgs, Timer};
use crate::Status;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pop {
    Auto,
    FullOnly,
    Exhaustive,
    Sampled,
}

impl From<Pop> for Population {
    fn from(p: Pop) -> Self {
        match p {
            Pop::Auto => Population::Auto,
            Pop::FullOnly => Population::FullOnly,
            Pop::Exhaustive => Population::Exhaustive,
            Pop::Sampled => Population::Sampled,
        }
    }
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub n: usize,
    /// Set size; defaults to `floor(n/4)`.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Largeness exponent: a rectangle is large when `mu_0 >= 2^{-gamma n}`.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "auto")]
    pub population: Pop,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

fn opt(r: &Option<commlp::Rational>) -> String {
    r.as_ref().map(format_rational).unwrap_or_default()
}

fn csv(rep: &ScanReport, runtime: Option<f64>) -> AnyResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "rows", "cols", "mu0", "mu1", "mu_k", "ratio", "large", "note"])?;
    for r in &rep.rows {
        w.write_record([
            r.id.to_string(),
            r.rows.to_string(),
            r.cols.to_string(),
            format_rational(&r.mu0),
            format_rational(&r.mu1),
            format_rational(&r.mu_k),
            opt(&r.ratio),
            r.large.to_string(),
            String::new(),
        ])?;
    }
    let mut note = format!(
        "n={} m={} k={} log2_bar={} lower_bound_holds={} one_ratio_holds={} m_in_range={}",
        rep.n, rep.m, rep.k, rep.log2_bar, rep.lower_bound_holds, rep.one_ratio_holds, rep.m_in_range
    );
    if let Some(t) = runtime {
        note.push_str(&format!(" runtime_ms={t}"));
    }
    if let Some(warn) = &rep.warning {
        note.push_str(&format!(" warning={warn}"));
    }
    w.write_record([
        "summary".to_string(),
        String::new(),
        String::new(),
        String::new(),
        opt(&rep.min_one_ratio),
        String::new(),
        opt(&rep.min_ratio),
        rep.large_count.to_string(),
        note,
    ])?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn run(a: &ScanArgs) -> AnyResult<Status> {
    let timer = Timer::start();
    let m = a.m.unwrap_or(a.n / 4);
    let cfg = ScanConfig {
        gamma: a.gamma,
        delta: a.delta,
        samples: a.samples,
        seed: a.seed,
        population: a.population.into(),
    };
    let rep = sampling_lemma_scan(MuParams::new(0, a.n, m)?, a.k, &cfg)?;
    let out = OutputArgs {
        format: a.format,
        out: a.out.clone(),
        timing: a.timing,
    };
    let text = match a.format {
        Format::Csv => csv(&rep, a.timing.then(|| timer.elapsed_ms()))?,
        Format::Json => {
            let mut v = json!({
                "n": rep.n,
                "m": rep.m,
                "k": rep.k,
                "seed": a.seed,
                "population": rep.population,
                "log2_bar": report::float(rep.log2_bar, 0.0),
                "large_count": rep.large_count,
                "min_ratio": rep.min_ratio.as_ref().map(report::exact),
                "mean_ratio": rep.mean_ratio.map(|v| report::float(v, 1e-12)),
                "min_one_ratio": rep.min_one_ratio.as_ref().map(report::exact),
                "lower_bound_holds": rep.lower_bound_holds,
                "one_ratio_holds": rep.one_ratio_holds,
                "m_in_range": rep.m_in_range,
                "min_slack": rep.min_slack.map(|v| report::float(v, 1e-12)),
                "warning": rep.warning,
                "rows": rep.rows.iter().map(|r| json!({
                    "id": r.id,
                    "rows": r.rows,
                    "cols": r.cols,
                    "mu0": report::exact(&r.mu0),
                    "mu1": report::exact(&r.mu1),
                    "mu_k": report::exact(&r.mu_k),
                    "ratio": r.ratio.as_ref().map(report::exact),
                    "large": r.large,
                })).collect::<Vec<_>>(),
            });
            timer.stamp(&out, &mut v);
            report::render(&v, Format::Json)?
        }
    };
    report::emit(&text, &out)?;
    Ok(Status::Ok)
}

