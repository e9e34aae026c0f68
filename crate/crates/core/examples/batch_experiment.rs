//! The full pipeline the CLI runs: parse a spec, run the batch, write the
//! CSVs, recompute the summary with timeouts included, and render the plots.
//!
//! cargo run --release --example batch_experiment -- [spec.toml] [out dir]

use std::path::PathBuf;

use swarm_hazard::experiment::{parse_spec, plot, read_runs, run_batch, summarize, write_outputs, RUNS_CSV};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let spec_path = PathBuf::from(args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../specs/smoke.toml").into()));
    let spec = parse_spec(&spec_path)?;
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| spec.output_dir.clone());

    let entries = run_batch(&spec, 1)?;
    let summary = write_outputs(&entries, &spec, &out)?;
    println!("{} runs written to {}", entries.len(), out.display());
    for row in &summary {
        println!(
            "  {:<16} {:<18} runs {:>3}  timeouts {:>3}  correct consensus {:>3}",
            row.algorithm, row.termination_criterion, row.runs, row.timeouts, row.correct_consensus
        );
    }

    let with_timeouts = summarize(&read_runs(&out.join(RUNS_CSV))?, true);
    for row in &with_timeouts {
        println!(
            "  incl. timeouts: {:<16} {:<18} mean accuracy {:.3}",
            row.algorithm,
            row.termination_criterion,
            row.accuracy_mean.unwrap_or(f64::NAN)
        );
    }

    for file in plot(&out)? {
        println!("plot: {}", file.display());
    }
    Ok(())
}
