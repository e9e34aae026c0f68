//! Steps the engine tick by tick and prints every controller transition of
//! one robot, with the zone it ends up in.

use swarm_hazard::controller::Action;
use swarm_hazard::engine::{Algorithm, Engine, RunConfig};

fn main() -> swarm_hazard::Result<()> {
    let cfg = RunConfig {
        swarm_size: 4,
        algorithm: Algorithm::Dmmd,
        max_ticks: 60_000,
        seed: 11,
        ..RunConfig::desk_scale()
    };
    let watched = 0;
    let mut engine = Engine::new(&cfg)?;
    while engine.step()?.is_none() {
        for (id, action) in engine.last_actions() {
            if *id != watched {
                continue;
            }
            match action {
                Action::Transition { from, to } => {
                    let robot = &engine.robots()[watched];
                    println!(
                        "{:>6}  {from:?} -> {to:?}  zone {:?}, timer {}",
                        engine.tick(),
                        robot.zone(),
                        robot.timer
                    );
                }
                Action::Observed { area, interarrival } => {
                    println!("{:>6}    event in {area:?} after {interarrival} ticks", engine.tick());
                }
                _ => {}
            }
        }
    }
    let robot = &engine.robots()[watched];
    println!(
        "robot {watched}: {} observations of B, {} of R, opinion {}",
        robot.obs_b,
        robot.obs_r,
        robot.opinion.as_str()
    );
    Ok(())
}
