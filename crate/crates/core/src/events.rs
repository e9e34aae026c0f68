//! Poisson hazard events on a discrete tick clock.
//!
//! Arrival times are continuous: each interarrival is an exponential variate
//! with mean `1/rate`, and an arrival at time `t` fires at tick `ceil(t)`.
//! Arrivals that land in the same tick collapse into a single event.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::seeding::{SimRng, rng_for};
use crate::{Error, Result};

/// Simulation time in whole steps.
pub type Tick = u64;

/// Which robots see an event that fires in an area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventModel {
    /// One stream per area; every robot measuring there sees the same events.
    #[default]
    GlobalPerArea,
    /// Each robot draws its own independent stream per area.
    PerRobot,
}

#[derive(Debug, Clone)]
enum Source {
    Never,
    Poisson { exp: Exp<f64>, rng: SimRng },
    #[cfg(test)]
    Scripted(std::collections::VecDeque<f64>),
}

/// A seeded Poisson event generator for one area.
#[derive(Debug, Clone)]
pub struct EventStream {
    rate: f64,
    next_event: f64,
    last_polled: Option<Tick>,
    source: Source,
}

impl EventStream {
    /// Creates a stream whose first arrival is drawn from tick 0.
    pub fn new(rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) || rate.is_nan() {
            return Err(Error::InvalidRate(rate));
        }
        let source = if rate == 0.0 {
            Source::Never
        } else {
            Source::Poisson {
                exp: Exp::new(rate).map_err(|_| Error::InvalidRate(rate))?,
                rng: rng_for(seed, crate::seeding::domain::EVENTS, 0),
            }
        };
        let mut stream = Self {
            rate,
            next_event: 0.0,
            last_polled: None,
            source,
        };
        stream.next_event = stream.draw_gap();
        Ok(stream)
    }

    #[cfg(test)]
    pub(crate) fn scripted(arrivals: &[f64]) -> Self {
        let mut queue: std::collections::VecDeque<f64> = arrivals.iter().copied().collect();
        let next_event = queue.pop_front().unwrap_or(f64::INFINITY);
        Self {
            rate: 0.0,
            next_event,
            last_polled: None,
            source: Source::Scripted(queue),
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Arrival time of the next pending event.
    pub fn next_event(&self) -> f64 {
        self.next_event
    }

    fn draw_gap(&mut self) -> f64 {
        match &mut self.source {
            Source::Never => f64::INFINITY,
            Source::Poisson { exp, rng } => exp.sample(rng),
            #[cfg(test)]
            Source::Scripted(_) => unreachable!("scripted streams store absolute times"),
        }
    }

    fn advance(&mut self) {
        self.next_event = match &mut self.source {
            #[cfg(test)]
            Source::Scripted(queue) => queue.pop_front().unwrap_or(f64::INFINITY),
            _ => self.next_event + self.draw_gap(),
        };
    }

    /// The continuous arrival times from the pending one onwards, before any
    /// tick quantisation or same-tick collapse.
    pub fn into_arrivals(mut self) -> impl Iterator<Item = f64> {
        std::iter::from_fn(move || {
            let t = self.next_event;
            self.advance();
            t.is_finite().then_some(t)
        })
    }

    /// Reports whether an arrival falls in `(tick - 1, tick]`.
    ///
    /// Ticks must be polled in strictly increasing order. Arrivals in ticks
    /// that were skipped are discarded.
    pub fn poll(&mut self, tick: Tick) -> Result<bool> {
        if let Some(last) = self.last_polled {
            if tick <= last {
                return Err(Error::OutOfOrderTick {
                    last,
                    requested: tick,
                });
            }
        }
        self.last_polled = Some(tick);
        let upper = tick as f64;
        let lower = upper - 1.0;
        while self.next_event <= lower {
            self.advance();
        }
        if self.next_event > upper {
            return Ok(false);
        }
        while self.next_event <= upper {
            self.advance();
        }
        Ok(true)
    }
}

/// Draws a uniform value in `[lo, hi]`; helper shared by the controller.
pub(crate) fn uniform_ticks(rng: &mut SimRng, lo: Tick, hi: Tick) -> Tick {
    rng.random_range(lo..=hi)
}
