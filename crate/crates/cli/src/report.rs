use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use commlp::protocols::Estimate;
use commlp::rectangles::{OracleConfig, Rectangle};
use commlp::scalar::format_rational;
use commlp::{Rational, Scalar};
use serde_json::{json, Value};

pub type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Output flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add wall-clock runtime to the report (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

pub fn exact(r: &Rational) -> Value {
    json!({ "mode": "exact-rational", "value": format_rational(r) })
}

pub fn float(v: f64, tol: f64) -> Value {
    json!({ "mode": "float-tol", "value": v, "tol": tol })
}

pub fn scalar<T: Scalar>(v: &T, tol: f64) -> Value {
    if T::EXACT {
        exact(&v.to_rational())
    } else {
        float(v.to_f64_lossy(), tol)
    }
}

pub fn estimate(e: &Estimate) -> Value {
    match e {
        Estimate::Exact { value } => exact(value),
        Estimate::MonteCarlo { mean, low, high, trials } => json!({
            "mode": "monte-carlo-ci",
            "value": mean,
            "low": low,
            "high": high,
            "trials": trials,
            "sigmas": 3,
        }),
    }
}

pub fn rectangle(r: &Rectangle) -> Value {
    serde_json::to_value(r.describe()).expect("rectangle view serializes")
}

fn env_cap(name: &str) -> AnyResult<Option<u128>> {
    match std::env::var(name) {
        Ok(v) => Ok(Some(v.trim().parse().map_err(|_| format!("{name}={v:?} is not an integer"))?)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{name}: {e}").into()),
    }
}

/// Caps with `COMMLP_*` environment overrides applied.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub enumeration: u128,
    pub oracle: OracleConfig,
    pub columns: u128,
    pub support: u128,
    pub eval: u128,
}

impl Caps {
    pub fn from_env() -> AnyResult<Self> {
        let mut oracle = OracleConfig::default();
        if let Some(v) = env_cap("COMMLP_ORACLE_CAP")? {
            oracle.max_row_subsets = v;
        }
        Ok(Self {
            enumeration: env_cap("COMMLP_ENUM_CAP")?.unwrap_or(commlp::rectangles::DEFAULT_ENUMERATION_CAP),
            oracle,
            columns: env_cap("COMMLP_COLUMN_CAP")?.unwrap_or(commlp::lp::DEFAULT_MAX_COLUMNS),
            support: env_cap("COMMLP_SUPPORT_CAP")?.unwrap_or(commlp::combinatorics::DEFAULT_SUPPORT_CAP),
            eval: env_cap("COMMLP_EVAL_CAP")?.unwrap_or(commlp::protocols::DEFAULT_EVAL_CAP),
        })
    }
}

pub struct Timer(Instant);

impl Timer {
    pub fn start() -> Self {
        Timer(Instant::now())
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }

    pub fn stamp(&self, out: &OutputArgs, report: &mut Value) {
        if out.timing {
            report["runtime_ms"] = json!(self.elapsed_ms());
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Renders a JSON report object, or a one-row CSV of its flattened fields.
pub fn render(report: &Value, format: Format) -> AnyResult<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let mut cells = Vec::new();
            flatten("", report, &mut cells);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(cells.iter().map(|(k, _)| k))?;
            w.write_record(cells.iter().map(|(_, v)| v))?;
            Ok(String::from_utf8(w.into_inner()?)?)
        }
    }
}

pub fn emit(text: &str, out: &OutputArgs) -> AnyResult<()> {
    match &out.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

