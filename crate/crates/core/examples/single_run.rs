//! One seeded run of the belief-sharing variant at desk scale, printing the
//! opinion counts as the swarm converges.
//!
//! cargo run --release --example single_run -- [algorithm] [seed]

use swarm_hazard::engine::{run, Algorithm, RunConfig, Termination};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let algorithm: Algorithm = args.next().as_deref().unwrap_or("dmmd_sharing").parse()?;
    let seed: u64 = args.next().as_deref().unwrap_or("3").parse()?;

    let cfg = RunConfig {
        algorithm,
        termination: Termination::ConsensusReaching,
        snapshot_interval: 25_000,
        seed,
        ..RunConfig::desk_scale()
    };
    let res = run(&cfg)?;

    println!("{:>9} {:>9} {:>4} {:>4} {:>7}", "tick", "undecided", "B", "R", "events");
    for s in &res.snapshots {
        println!("{:>9} {:>9} {:>4} {:>4} {:>7}", s.tick, s.undecided, s.safer_b, s.safer_r, s.events_total);
    }
    println!(
        "{algorithm}: {} at tick {}, accuracy {:.2}, {} events observed",
        res.reason.as_str(),
        res.terminated_at,
        res.accuracy,
        res.events_observed_total
    );
    Ok(())
}
