//! Seeded discrete-time simulator for best-of-2 collective decisions in a
//! swarm that must find the safer of two hazard areas.
//!
//! Robots estimate the interarrival time of Poisson events in each area with a
//! conjugate inverse-gamma belief, form opinions when the credible intervals
//! of both areas separate, and agree on an area through majority-vote
//! dissemination inside a shared nest. A communication-free baseline is
//! available for comparison.
//!
//! The crate is organised bottom-up:
//!
//! - [`events`]: per-area Poisson event streams on a tick clock.
//! - [`belief`]: the per-area Bayesian belief and its incomplete-gamma numerics.
//! - [`arena`]: the zone graph and transit delays.
//! - [`comms`]: the well-mixed nest broadcast bus.
//! - [`controller`]: the four-state robot controller and decision rules.
//! - [`engine`]: the deterministic tick loop, termination and metrics.
//! - [`experiment`]: batch runs, CSV outputs, summaries and SVG plots.
//!
//! ```
//! use swarm_hazard::engine::{run, Algorithm, RunConfig, Termination};
//!
//! let cfg = RunConfig {
//!     swarm_size: 4,
//!     rate_b: 1.0 / 2000.0,
//!     rate_r: 1.0 / 1000.0,
//!     algorithm: Algorithm::Dmmd,
//!     termination: Termination::OpinionSelection,
//!     max_ticks: 20_000,
//!     seed: 7,
//!     ..RunConfig::desk_scale()
//! };
//! let result = run(&cfg).unwrap();
//! assert!(result.terminated_at <= 20_000);
//! ```

pub mod arena;
pub mod belief;
pub mod comms;
pub mod controller;
pub mod engine;
mod error;
pub mod events;
pub mod experiment;
pub mod seeding;

pub use error::{Error, Result};
