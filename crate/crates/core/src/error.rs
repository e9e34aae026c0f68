use thiserror::Error;

use crate::events::Tick;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("event rate must lie in [0, 1) per tick, got {0}")]
    InvalidRate(f64),
    #[error("tick {requested} polled after tick {last}; polls must be strictly increasing")]
    OutOfOrderTick { last: Tick, requested: Tick },
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("interarrival sample must be positive, got {0}")]
    InvalidSample(f64),
    #[error("invalid gamma parameters: {0}")]
    Numerics(String),
    #[error("invalid shared belief ({a}, {b}): need a > 1 and b > 0")]
    InvalidSharedBelief { a: f64, b: f64 },
    #[error("invalid transit from {from:?} to {to:?}")]
    InvalidTransit {
        from: crate::arena::ZoneId,
        to: crate::arena::ZoneId,
    },
    #[error("robot {0} cannot broadcast from outside the nest")]
    NotInNest(usize),
    #[error("controller invariant violated for robot {robot}: {detail}")]
    Controller { robot: usize, detail: String },
    #[error("invalid configuration: {0}")]
    Config(String),
}
