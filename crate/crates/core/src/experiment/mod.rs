//! Batch experiments: spec files, parallel repetitions, CSV outputs,
//! summaries and plots.
//!
//! An experiment spec is a TOML file. Top-level keys:
//!
//! | key           | default                | meaning                                    |
//! |---------------|------------------------|--------------------------------------------|
//! | `name`        | `"experiment"`         | free-form label                            |
//! | `environment` | `"easy"`               | `easy`, `difficult` or `custom`            |
//! | `algorithm`   | `"dmmd"`               | one name or a list of names                |
//! | `termination` | `"consensus_reaching"` | one criterion or a list                    |
//! | `repetitions` | `64`                   | runs per algorithm × termination           |
//! | `base_seed`   | `0`                    | repetition `i` uses `base_seed + i`        |
//! | `output_dir`  | `"out"`                | where CSVs and plots go                    |
//!
//! An optional `[run]` table overrides any [`RunConfig`] field except
//! `algorithm`, `termination` and `seed`. `rate_b` / `rate_r` are only
//! accepted (and then required) with `environment = "custom"`.

mod output;
mod plot;

pub use output::{
    quantile, read_runs, summarize, write_outputs, write_summary, RunRow, SummaryRow, INTERARRIVALS_CSV, RUNS_CSV,
    SPEC_COPY, SUMMARY_CSV, TIMESERIES_CSV,
};
pub use plot::plot;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run, Algorithm, RunConfig, RunResult, Termination};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> SpecError {
    SpecError::Validation {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    Easy,
    Difficult,
    Custom,
}

impl Environment {
    /// `(rate_b, rate_r)` of a named preset.
    pub fn rates(self) -> Option<(f64, f64)> {
        match self {
            Environment::Easy => Some((1.0 / 20_000.0, 1.0 / 10_000.0)),
            Environment::Difficult => Some((1.0 / 20_000.0, 1.0 / 15_000.0)),
            Environment::Custom => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Environment::Easy => "easy",
            Environment::Difficult => "difficult",
            Environment::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default = "default_name")]
    name: String,
    #[serde(default = "default_environment")]
    environment: Environment,
    #[serde(default = "default_algorithm")]
    algorithm: OneOrMany<Algorithm>,
    #[serde(default = "default_termination")]
    termination: OneOrMany<Termination>,
    #[serde(default = "default_repetitions")]
    repetitions: i64,
    #[serde(default)]
    base_seed: u64,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
    #[serde(default)]
    run: Option<RunConfig>,
}

fn default_name() -> String {
    "experiment".into()
}
fn default_environment() -> Environment {
    Environment::Easy
}
fn default_algorithm() -> OneOrMany<Algorithm> {
    OneOrMany::One(Algorithm::Dmmd)
}
fn default_termination() -> OneOrMany<Termination> {
    OneOrMany::One(Termination::ConsensusReaching)
}
fn default_repetitions() -> i64 {
    64
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A resolved experiment: one base configuration swept over algorithms and
/// termination criteria, each repeated with consecutive seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub environment: Environment,
    pub algorithms: Vec<Algorithm>,
    pub terminations: Vec<Termination>,
    pub repetitions: u32,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub base: RunConfig,
}

impl ExperimentSpec {
    /// A spec around `base` with a single algorithm and criterion.
    pub fn single(environment: Environment, base: RunConfig, repetitions: u32, base_seed: u64) -> Self {
        Self {
            name: "experiment".into(),
            environment,
            algorithms: vec![base.algorithm],
            terminations: vec![base.termination],
            repetitions,
            base_seed,
            output_dir: PathBuf::from("out"),
            base,
        }
    }

    /// Every planned run in output order.
    pub fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::new();
        for &algorithm in &self.algorithms {
            for &termination in &self.terminations {
                for rep in 0..self.repetitions {
                    let seed = self.base_seed.wrapping_add(rep as u64);
                    jobs.push(Job {
                        run_id: jobs.len(),
                        repetition: rep,
                        config: RunConfig {
                            algorithm,
                            termination,
                            seed,
                            ..self.base.clone()
                        },
                    });
                }
            }
        }
        jobs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub run_id: usize,
    pub repetition: u32,
    pub config: RunConfig,
}

/// One finished (or failed) run of a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchEntry {
    pub run_id: usize,
    pub repetition: u32,
    pub config: RunConfig,
    pub outcome: Result<RunResult, String>,
}

pub fn parse_spec(path: &Path) -> Result<ExperimentSpec, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_spec_str(&text, path)
}

/// Parses spec text; `origin` is only used in error messages.
pub fn parse_spec_str(text: &str, origin: &Path) -> Result<ExperimentSpec, SpecError> {
    let parse_err = |e: toml::de::Error| {
        let (line, column) = e
            .span()
            .map(|s| line_col(text, s.start))
            .unwrap_or((1, 1));
        SpecError::Parse {
            path: origin.to_path_buf(),
            line,
            column,
            message: e.message().to_string(),
        }
    };
    let raw: toml::Table = text.parse().map_err(parse_err)?;
    let file: SpecFile = toml::from_str(text).map_err(parse_err)?;

    let run_keys: Vec<String> = raw
        .get("run")
        .and_then(|v| v.as_table())
        .map(|t| t.keys().cloned().collect())
        .unwrap_or_default();
    for key in ["algorithm", "termination", "seed"] {
        if run_keys.iter().any(|k| k == key) {
            return Err(invalid(
                &format!("run.{key}"),
                format!("set `{}` at the top level instead", if key == "seed" { "base_seed" } else { key }),
            ));
        }
    }
    let mut base = file.run.unwrap_or_default();
    let has_rate = |k: &str| run_keys.iter().any(|x| x == k);
    match file.environment.rates() {
        Some((rb, rr)) => {
            for key in ["rate_b", "rate_r"] {
                if has_rate(key) {
                    return Err(invalid(
                        &format!("run.{key}"),
                        format!("rates are fixed by the `{}` preset; use environment = \"custom\"", file.environment.as_str()),
                    ));
                }
            }
            base.rate_b = rb;
            base.rate_r = rr;
        }
        None => {
            for key in ["rate_b", "rate_r"] {
                if !has_rate(key) {
                    return Err(invalid(&format!("run.{key}"), "required when environment = \"custom\""));
                }
            }
        }
    }

    if file.repetitions < 1 {
        return Err(invalid("repetitions", format!("must be at least 1, got {}", file.repetitions)));
    }
    let repetitions = u32::try_from(file.repetitions).map_err(|_| invalid("repetitions", "too large"))?;
    let algorithms = file.algorithm.into_vec();
    if algorithms.is_empty() {
        return Err(invalid("algorithm", "list must not be empty"));
    }
    let terminations = file.termination.into_vec();
    if terminations.is_empty() {
        return Err(invalid("termination", "list must not be empty"));
    }
    for &algorithm in &algorithms {
        let probe = RunConfig {
            algorithm,
            ..base.clone()
        };
        probe.validate().map_err(|e| invalid("run", e.to_string()))?;
    }
    base.algorithm = algorithms[0];
    base.termination = terminations[0];
    base.seed = file.base_seed;
    Ok(ExperimentSpec {
        name: file.name,
        environment: file.environment,
        algorithms,
        terminations,
        repetitions,
        base_seed: file.base_seed,
        output_dir: file.output_dir,
        base,
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

/// Runs every job of `spec` on `parallelism` worker threads. Results are
/// ordered by run id whatever the completion order.
pub fn run_batch(spec: &ExperimentSpec, parallelism: usize) -> anyhow::Result<Vec<BatchEntry>> {
    anyhow::ensure!(parallelism >= 1, "parallelism must be at least 1");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(parallelism).build()?;
    let jobs = spec.jobs();
    let entries = pool.install(|| {
        jobs.into_par_iter()
            .map(|job| {
                let outcome = run(&job.config).map_err(|e| e.to_string());
                if let Err(e) = &outcome {
                    log::error!("run {} (seed {}) failed: {e}", job.run_id, job.config.seed);
                }
                BatchEntry {
                    run_id: job.run_id,
                    repetition: job.repetition,
                    config: job.config,
                    outcome,
                }
            })
            .collect()
    });
    Ok(entries)
}
