//! Well-mixed broadcast bus inside the nest.
//!
//! Only robots that have joined the bus (nesting robots) may broadcast or
//! listen. Broadcasts made during tick `t` become visible at tick `t + 1`.
//! The bus keeps the latest visible message per sender, which is exactly the
//! dedup-latest view a listener would build from the full message stream.

use serde::{Deserialize, Serialize};

use crate::events::Tick;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Opinion {
    Undecided,
    SaferB,
    SaferR,
}

impl Opinion {
    pub fn is_decided(self) -> bool {
        self != Opinion::Undecided
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Opinion::Undecided => "undecided",
            Opinion::SaferB => "B",
            Opinion::SaferR => "R",
        }
    }
}

/// Cumulative belief parameters for both areas, `(a, b)` each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharedBeliefs {
    pub area_b: (f64, f64),
    pub area_r: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub sender: usize,
    pub opinion: Opinion,
    pub beliefs: Option<SharedBeliefs>,
}

#[derive(Debug, Clone)]
pub struct Bus {
    joined_at: Vec<Option<Tick>>,
    pending: Vec<Message>,
    latest: Vec<Option<(Message, Tick)>>,
}

impl Bus {
    pub fn new(robots: usize) -> Self {
        Self {
            joined_at: vec![None; robots],
            pending: Vec::new(),
            latest: vec![None; robots],
        }
    }

    /// Robot enters the nest and starts listening at `tick`.
    pub fn join(&mut self, robot: usize, tick: Tick) {
        self.joined_at[robot] = Some(tick);
    }

    pub fn leave(&mut self, robot: usize) {
        self.joined_at[robot] = None;
    }

    pub fn joined_at(&self, robot: usize) -> Option<Tick> {
        self.joined_at[robot]
    }

    pub fn members(&self) -> usize {
        self.joined_at.iter().filter(|j| j.is_some()).count()
    }

    pub fn broadcast(&mut self, msg: Message) -> Result<()> {
        if self.joined_at.get(msg.sender).copied().flatten().is_none() {
            return Err(Error::NotInNest(msg.sender));
        }
        self.pending.push(msg);
        Ok(())
    }

    /// Ends tick `tick`: pending broadcasts become visible at `tick + 1`.
    pub fn flush(&mut self, tick: Tick) {
        for msg in self.pending.drain(..) {
            self.latest[msg.sender] = Some((msg, tick + 1));
        }
    }

    /// Latest message per sender that became visible in `[since, now]`,
    /// excluding the listener's own. Empty for robots outside the nest.
    pub fn collect(&self, listener: usize, since: Tick, now: Tick) -> Vec<Message> {
        if self.joined_at.get(listener).copied().flatten().is_none() {
            return Vec::new();
        }
        self.latest
            .iter()
            .enumerate()
            .filter(|(sender, _)| *sender != listener)
            .filter_map(|(_, slot)| match slot {
                Some((msg, visible)) if *visible >= since && *visible <= now => Some(*msg),
                _ => None,
            })
            .collect()
    }
}
