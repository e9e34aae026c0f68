use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use super::{BatchEntry, ExperimentSpec};
use crate::engine::StopReason;

pub const RUNS_CSV: &str = "runs.csv";
pub const TIMESERIES_CSV: &str = "timeseries.csv";
pub const INTERARRIVALS_CSV: &str = "interarrivals.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
/// Resolved spec written next to the CSVs; plots read the rates from it.
pub const SPEC_COPY: &str = "experiment.toml";

/// One line of `runs.csv`. Failed runs keep their identity columns, carry
/// `reason = "error"` and leave the measurements empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub run_id: usize,
    pub seed: u64,
    pub algorithm: String,
    pub environment: String,
    pub termination_criterion: String,
    pub terminated_at: Option<u64>,
    pub reason: String,
    pub accuracy: Option<f64>,
    pub events_total: Option<u64>,
    #[serde(rename = "visits_B")]
    pub visits_b: Option<u64>,
    #[serde(rename = "visits_R")]
    pub visits_r: Option<u64>,
}

#[derive(Debug, Serialize)]
struct TimeseriesRow {
    run_id: usize,
    tick: u64,
    n_undecided: usize,
    #[serde(rename = "n_B")]
    n_b: usize,
    #[serde(rename = "n_R")]
    n_r: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct InterarrivalRow {
    pub run_id: usize,
    pub area: String,
    pub measured_ticks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub environment: String,
    pub termination_criterion: String,
    pub runs: usize,
    pub timeouts: usize,
    pub correct_consensus: usize,
    pub accuracy_mean: Option<f64>,
    pub terminated_q1: Option<f64>,
    pub terminated_median: Option<f64>,
    pub terminated_q3: Option<f64>,
    pub events_q1: Option<f64>,
    pub events_median: Option<f64>,
    pub events_q3: Option<f64>,
}

impl RunRow {
    fn from_entry(entry: &BatchEntry, spec: &ExperimentSpec) -> Self {
        let cfg = &entry.config;
        let mut row = RunRow {
            run_id: entry.run_id,
            seed: cfg.seed,
            algorithm: cfg.algorithm.as_str().into(),
            environment: spec.environment.as_str().into(),
            termination_criterion: cfg.termination.as_str().into(),
            terminated_at: None,
            reason: "error".into(),
            accuracy: None,
            events_total: None,
            visits_b: None,
            visits_r: None,
        };
        if let Ok(res) = &entry.outcome {
            row.terminated_at = Some(res.terminated_at);
            row.reason = res.reason.as_str().into();
            row.accuracy = Some(res.accuracy);
            row.events_total = Some(res.events_observed_total);
            row.visits_b = Some(res.visits_b);
            row.visits_r = Some(res.visits_r);
        }
        row
    }
}

const RUNS_HEADER: [&str; 11] = [
    "run_id",
    "seed",
    "algorithm",
    "environment",
    "termination_criterion",
    "terminated_at",
    "reason",
    "accuracy",
    "events_total",
    "visits_B",
    "visits_R",
];
const TIMESERIES_HEADER: [&str; 5] = ["run_id", "tick", "n_undecided", "n_B", "n_R"];
const INTERARRIVALS_HEADER: [&str; 3] = ["run_id", "area", "measured_ticks"];
const SUMMARY_HEADER: [&str; 13] = [
    "algorithm",
    "environment",
    "termination_criterion",
    "runs",
    "timeouts",
    "correct_consensus",
    "accuracy_mean",
    "terminated_q1",
    "terminated_median",
    "terminated_q3",
    "events_q1",
    "events_median",
    "events_q3",
];

/// Writer with an explicit header so empty tables still carry their schema.
fn csv_writer(path: &Path, header: &[&str]) -> anyhow::Result<csv::Writer<fs::File>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(w)
}

/// Writes the four CSV files and a copy of the resolved spec into `dir`.
pub fn write_outputs(entries: &[BatchEntry], spec: &ExperimentSpec, dir: &Path) -> anyhow::Result<Vec<SummaryRow>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;

    let runs: Vec<RunRow> = entries.iter().map(|e| RunRow::from_entry(e, spec)).collect();
    let path = dir.join(RUNS_CSV);
    let mut w = csv_writer(&path, &RUNS_HEADER)?;
    for row in &runs {
        w.serialize(row).with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;

    let path = dir.join(TIMESERIES_CSV);
    let mut w = csv_writer(&path, &TIMESERIES_HEADER)?;
    for entry in entries {
        let Ok(res) = &entry.outcome else { continue };
        for s in &res.snapshots {
            w.serialize(TimeseriesRow {
                run_id: entry.run_id,
                tick: s.tick,
                n_undecided: s.undecided,
                n_b: s.safer_b,
                n_r: s.safer_r,
            })
            .with_context(|| format!("writing {}", path.display()))?;
        }
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;

    let path = dir.join(INTERARRIVALS_CSV);
    let mut w = csv_writer(&path, &INTERARRIVALS_HEADER)?;
    for entry in entries {
        let Ok(res) = &entry.outcome else { continue };
        for (area, samples) in [("B", &res.interarrivals_b), ("R", &res.interarrivals_r)] {
            for &x in samples.iter() {
                w.serialize(InterarrivalRow {
                    run_id: entry.run_id,
                    area: area.into(),
                    measured_ticks: x,
                })
                .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;

    let summary = summarize(&runs, false);
    write_summary(&summary, &dir.join(SUMMARY_CSV))?;

    let path = dir.join(SPEC_COPY);
    let text = toml::to_string(spec).context("serialising experiment spec")?;
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(summary)
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> anyhow::Result<()> {
    let mut w = csv_writer(path, &SUMMARY_HEADER)?;
    for row in rows {
        w.serialize(row).with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_runs(path: &Path) -> anyhow::Result<Vec<RunRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<RunRow>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

/// Linear-interpolation quantile (Hyndman–Fan type 7) of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn quartiles(mut values: Vec<f64>) -> (Option<f64>, Option<f64>, Option<f64>) {
    values.sort_by(f64::total_cmp);
    (quantile(&values, 0.25), quantile(&values, 0.5), quantile(&values, 0.75))
}

/// Per algorithm × environment × criterion statistics. Timeout runs are
/// counted in `timeouts` and only enter the statistics when
/// `include_timeouts` is set. Failed runs are ignored.
pub fn summarize(rows: &[RunRow], include_timeouts: bool) -> Vec<SummaryRow> {
    let timeout = StopReason::Timeout.as_str();
    let mut groups: BTreeMap<(&str, &str, &str), Vec<&RunRow>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.terminated_at.is_some()) {
        groups
            .entry((&row.algorithm, &row.environment, &row.termination_criterion))
            .or_default()
            .push(row);
    }
    groups
        .into_iter()
        .map(|((algorithm, environment, termination), group)| {
            let used: Vec<&&RunRow> = group
                .iter()
                .filter(|r| include_timeouts || r.reason != timeout)
                .collect();
            let accuracy_mean = (!used.is_empty())
                .then(|| used.iter().filter_map(|r| r.accuracy).sum::<f64>() / used.len() as f64);
            let (terminated_q1, terminated_median, terminated_q3) =
                quartiles(used.iter().filter_map(|r| r.terminated_at).map(|t| t as f64).collect());
            let (events_q1, events_median, events_q3) =
                quartiles(used.iter().filter_map(|r| r.events_total).map(|e| e as f64).collect());
            SummaryRow {
                algorithm: algorithm.into(),
                environment: environment.into(),
                termination_criterion: termination.into(),
                runs: group.len(),
                timeouts: group.iter().filter(|r| r.reason == timeout).count(),
                correct_consensus: group
                    .iter()
                    .filter(|r| r.reason == StopReason::Consensus.as_str() && r.accuracy == Some(1.0))
                    .count(),
                accuracy_mean,
                terminated_q1,
                terminated_median,
                terminated_q3,
                events_q1,
                events_median,
                events_q3,
            }
        })
        .collect()
}
