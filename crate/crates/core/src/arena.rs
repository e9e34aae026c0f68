//! Zone graph: two event areas, the nest, and the transition space between
//! them. Motion is abstracted into a transit delay.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::events::Tick;
use crate::seeding::SimRng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ZoneId {
    AreaB,
    AreaR,
    Nest,
    Transition,
}

impl ZoneId {
    pub fn is_area(self) -> bool {
        matches!(self, ZoneId::AreaB | ZoneId::AreaR)
    }
}

/// Transit delay model: `T · (1 + u)` with `u ~ U[-jitter, +jitter]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitParams {
    pub ticks: Tick,
    pub jitter: f64,
}

impl Default for TransitParams {
    fn default() -> Self {
        Self {
            ticks: 200,
            jitter: 0.1,
        }
    }
}

impl TransitParams {
    pub fn validate(&self) -> Result<()> {
        if self.ticks == 0 {
            return Err(Error::Config("transit ticks must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.jitter) {
            return Err(Error::Config(format!(
                "transit jitter must lie in [0, 1), got {}",
                self.jitter
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitState {
    pub origin: ZoneId,
    pub destination: ZoneId,
    pub remaining: Tick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitStep {
    Moving(TransitState),
    Arrived(ZoneId),
}

/// Starts a nest-to-area or area-to-nest transit.
pub fn start_transit(
    origin: ZoneId,
    destination: ZoneId,
    params: &TransitParams,
    rng: &mut SimRng,
) -> Result<TransitState> {
    let legal = matches!(
        (origin, destination),
        (ZoneId::Nest, ZoneId::AreaB)
            | (ZoneId::Nest, ZoneId::AreaR)
            | (ZoneId::AreaB, ZoneId::Nest)
            | (ZoneId::AreaR, ZoneId::Nest)
    );
    if !legal {
        return Err(Error::InvalidTransit {
            from: origin,
            to: destination,
        });
    }
    let factor = if params.jitter > 0.0 {
        1.0 + rng.random_range(-params.jitter..=params.jitter)
    } else {
        1.0
    };
    let remaining = ((params.ticks as f64 * factor).round() as Tick).max(1);
    Ok(TransitState {
        origin,
        destination,
        remaining,
    })
}

impl TransitState {
    /// Advances by one tick.
    pub fn tick(self) -> TransitStep {
        match self.remaining {
            0 | 1 => TransitStep::Arrived(self.destination),
            r => TransitStep::Moving(TransitState {
                remaining: r - 1,
                ..self
            }),
        }
    }
}
