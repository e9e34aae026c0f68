use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use swarm_hazard::experiment::{
    parse_spec, plot, read_runs, run_batch, summarize, write_outputs, write_summary, RUNS_CSV, SUMMARY_CSV,
};

#[derive(Parser)]
#[command(name = "swarm-hazard", version, about = "Run, plot and summarise hazard-area decision experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every job of an experiment spec and write the CSV outputs.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Worker threads; results do not depend on this.
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Overrides `output_dir` from the spec.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG figures from an output directory.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Recompute summary.csv from runs.csv.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        include_timeouts: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate { spec, parallelism, out } => {
            let spec = parse_spec(&spec)?;
            let dir = out.unwrap_or_else(|| spec.output_dir.clone());
            log::info!(
                "{}: {} runs on {parallelism} thread(s) into {}",
                spec.name,
                spec.jobs().len(),
                dir.display()
            );
            let entries = run_batch(&spec, parallelism)?;
            let failed = entries.iter().filter(|e| e.outcome.is_err()).count();
            let summary = write_outputs(&entries, &spec, &dir)?;
            for row in &summary {
                log::info!(
                    "{} {} {}: {} runs, {} timeouts, median t = {}",
                    row.algorithm,
                    row.environment,
                    row.termination_criterion,
                    row.runs,
                    row.timeouts,
                    row.terminated_median.map_or("-".into(), |t| format!("{t:.0}"))
                );
            }
            anyhow::ensure!(failed == 0, "{failed} run(s) failed; see runs.csv");
        }
        Command::Plot { input } => {
            for f in plot(&input)? {
                log::info!("wrote {}", f.display());
            }
        }
        Command::Summarize { input, include_timeouts } => {
            let rows = read_runs(&input.join(RUNS_CSV)).with_context(|| format!("reading {}", input.display()))?;
            let summary = summarize(&rows, include_timeouts);
            let path = input.join(SUMMARY_CSV);
            write_summary(&summary, &path)?;
            log::info!("wrote {} ({} groups)", path.display(), summary.len());
        }
    }
    Ok(())
}
