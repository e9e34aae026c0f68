//! Poisson event streams on the tick clock.
//!
//! Polls two streams for a million ticks and compares the observed counts
//! and gaps with the configured rates.

use swarm_hazard::events::EventStream;

fn main() -> swarm_hazard::Result<()> {
    let ticks = 1_000_000u64;
    for (name, rate, seed) in [("B", 1.0 / 2_000.0, 1), ("R", 1.0 / 1_000.0, 2)] {
        let mut stream = EventStream::new(rate, seed)?;
        let mut fired = Vec::new();
        for t in 1..=ticks {
            if stream.poll(t)? {
                fired.push(t);
            }
        }
        let gaps: Vec<u64> = fired.windows(2).map(|w| w[1] - w[0]).collect();
        let mean_gap = gaps.iter().sum::<u64>() as f64 / gaps.len().max(1) as f64;
        println!(
            "area {name}: {} events (expected {:.0}), mean gap {mean_gap:.1} ticks (1/rate = {:.0})",
            fired.len(),
            rate * ticks as f64,
            1.0 / rate
        );
    }
    Ok(())
}
