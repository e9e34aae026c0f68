//! The per-area belief: conjugate updates, the point estimate, windowed
//! credible intervals and parameter averaging between robots.

use swarm_hazard::belief::{credible_interval, mode, BeliefModel, DEFAULT_PRIOR_A, DEFAULT_PRIOR_B};

fn main() -> swarm_hazard::Result<()> {
    let mut belief = BeliefModel::new(DEFAULT_PRIOR_A, DEFAULT_PRIOR_B, 10, 1000.0)?;
    println!("prior (a, b) = {:?}, mode = {:.1}", belief.prior(), belief.mode());

    // Underestimated samples of a process whose true mean is 10 000 ticks.
    for x in [6_000.0, 4_100.0, 12_500.0, 900.0, 7_300.0, 15_800.0, 3_200.0, 5_500.0] {
        belief.observe(x)?;
        let ci = belief.credible_interval(0.95)?;
        println!(
            "observe {x:>7.0} -> cumulative {:?}, mode {:>7.1}, 95% CI [{:>7.0}, {:>8.0}]",
            belief.cumulative(),
            belief.mode(),
            ci.lo,
            ci.hi
        );
    }

    // The window keeps only the most recent samples; the cumulative pair keeps all.
    for _ in 0..12 {
        belief.observe(8_000.0)?;
    }
    println!("after 20 samples: window {:?}", belief.window().collect::<Vec<_>>());
    println!("windowed posterior {:?}, cumulative {:?}", belief.posterior_params(), belief.cumulative());

    // Averaging with beliefs heard from two other robots.
    belief.merge_shared(&[(4.0, 12_000.0), (6.0, 20_000.0)])?;
    println!("after merge: cumulative {:?}", belief.cumulative());

    let ci = credible_interval(3.0, 10_000.0, 0.95)?;
    println!("(3, 10000): mode {:.1}, CI [{:.1}, {:.1}]", mode(3.0, 10_000.0)?, ci.lo, ci.hi);
    Ok(())
}
