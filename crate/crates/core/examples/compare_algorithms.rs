//! All four controllers on the same seeds in the desk-scale easy
//! environment: termination time, accuracy and event exposure.
//!
//! cargo run --release --example compare_algorithms -- [repetitions]

use swarm_hazard::engine::{Algorithm, RunConfig, Termination};
use swarm_hazard::experiment::{run_batch, quantile, Environment, ExperimentSpec};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5).unwrap_or(f64::NAN)
}

fn main() -> anyhow::Result<()> {
    let reps: u32 = std::env::args().nth(1).as_deref().unwrap_or("8").parse()?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    println!("{:<16} {:>8} {:>10} {:>9} {:>9}", "algorithm", "timeouts", "median t", "accuracy", "events");
    for algorithm in Algorithm::ALL {
        let base = RunConfig {
            algorithm,
            termination: Termination::ConsensusReaching,
            ..RunConfig::desk_scale()
        };
        let spec = ExperimentSpec::single(Environment::Custom, base, reps, 1000);
        let results: Vec<_> = run_batch(&spec, threads)?
            .into_iter()
            .filter_map(|e| e.outcome.ok())
            .collect();
        let timeouts = results.iter().filter(|r| r.reason.as_str() == "timeout").count();
        let acc = results.iter().map(|r| r.accuracy).sum::<f64>() / results.len().max(1) as f64;
        println!(
            "{:<16} {:>8} {:>10.0} {:>9.2} {:>9.0}",
            algorithm.as_str(),
            timeouts,
            median(results.iter().map(|r| r.terminated_at as f64).collect()),
            acc,
            median(results.iter().map(|r| r.events_observed_total as f64).collect())
        );
    }
    Ok(())
}
