//! Deterministic tick loop.
//!
//! Each tick: (1) poll the event streams, (2) step every robot in id order,
//! (3) flush the bus so this tick's broadcasts are heard next tick, then
//! check termination and take a snapshot when due.
//!
//! Random streams are derived from `RunConfig::seed` with
//! [`crate::seeding::sub_seed`]: one per area event stream, one per robot
//! controller, and (per-robot event model) one per robot and area.

use serde::{Deserialize, Serialize};

use crate::arena::{TransitParams, ZoneId};
use crate::belief::{DEFAULT_PRIOR_A, DEFAULT_PRIOR_B, HIGH_PRIOR_B};
use crate::comms::{Bus, Opinion};
use crate::controller::{Action, ControllerConfig, Robot};
use crate::events::{EventModel, EventStream, Tick};
use crate::seeding::{domain, rng_for, sub_seed};
use crate::{Error, Result};

pub use crate::controller::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ConsensusReaching,
    OpinionSelection,
}

impl Termination {
    pub const ALL: [Termination; 2] = [Termination::ConsensusReaching, Termination::OpinionSelection];

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ConsensusReaching => "consensus_reaching",
            Termination::OpinionSelection => "opinion_selection",
        }
    }
}

impl std::str::FromStr for Termination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Termination::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown termination criterion {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Consensus,
    AllOpinionated,
    Timeout,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Consensus => "consensus",
            StopReason::AllOpinionated => "all_opinionated",
            StopReason::Timeout => "timeout",
        }
    }
}

impl std::str::FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [StopReason::Consensus, StopReason::AllOpinionated, StopReason::Timeout]
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown stop reason {s:?}")))
    }
}

/// Full parameterisation of one run. Defaults are the full-scale values
/// with the easy environment's rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub swarm_size: usize,
    pub rate_b: f64,
    pub rate_r: f64,
    pub algorithm: Algorithm,
    pub prior_a: f64,
    pub prior_b: f64,
    /// Prior `b` used by [`Algorithm::DmmdHighPrior`].
    pub high_prior_b: f64,
    pub window: usize,
    pub scale: f64,
    pub c_diss: f64,
    pub t_diss_max: Tick,
    pub level: f64,
    pub warmup: u32,
    pub transit_ticks: Tick,
    pub transit_jitter: f64,
    pub baseline_timer: f64,
    pub nest_dwell_max: Tick,
    pub share_before_opinion: bool,
    pub event_model: EventModel,
    pub termination: Termination,
    pub max_ticks: Tick,
    pub snapshot_interval: Tick,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            swarm_size: 50,
            rate_b: 1.0 / 20_000.0,
            rate_r: 1.0 / 10_000.0,
            algorithm: Algorithm::Dmmd,
            prior_a: DEFAULT_PRIOR_A,
            prior_b: DEFAULT_PRIOR_B,
            high_prior_b: HIGH_PRIOR_B,
            window: 10,
            scale: 1_000.0,
            c_diss: 500.0,
            t_diss_max: 2_500,
            level: 0.95,
            warmup: 8,
            transit_ticks: TransitParams::default().ticks,
            transit_jitter: TransitParams::default().jitter,
            baseline_timer: 1_000.0,
            nest_dwell_max: 2_500,
            share_before_opinion: true,
            event_model: EventModel::GlobalPerArea,
            termination: Termination::ConsensusReaching,
            max_ticks: 10_000_000,
            snapshot_interval: 1_000,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Full-scale configuration: 50 robots, 10^7 tick cap.
    pub fn full_scale() -> Self {
        Self::default()
    }

    /// Every time constant multiplied by `factor`: rates divided, priors'
    /// `b`, transit, dissemination, timer and tick cap multiplied, and the
    /// scale divisor multiplied so interval widths stay dimensionless.
    pub fn time_scaled(&self, factor: f64) -> Self {
        let ticks = |t: Tick| ((t as f64 * factor).round() as Tick).max(1);
        Self {
            rate_b: self.rate_b / factor,
            rate_r: self.rate_r / factor,
            prior_b: self.prior_b * factor,
            high_prior_b: self.high_prior_b * factor,
            scale: (self.scale * factor).max(1.0),
            c_diss: self.c_diss * factor,
            t_diss_max: ticks(self.t_diss_max),
            transit_ticks: ticks(self.transit_ticks),
            baseline_timer: self.baseline_timer * factor,
            nest_dwell_max: ticks(self.nest_dwell_max),
            max_ticks: ticks(self.max_ticks),
            snapshot_interval: ticks(self.snapshot_interval),
            ..self.clone()
        }
    }

    /// The full-scale setup compressed ten-fold in time with a 16-robot swarm.
    pub fn desk_scale() -> Self {
        Self {
            swarm_size: 16,
            ..Self::full_scale().time_scaled(0.1)
        }
    }

    pub fn prior(&self) -> (f64, f64) {
        match self.algorithm {
            Algorithm::DmmdHighPrior => (self.prior_a, self.high_prior_b),
            _ => (self.prior_a, self.prior_b),
        }
    }

    /// Area with the lower event rate, if the rates differ.
    pub fn safer_area(&self) -> Option<Opinion> {
        if self.rate_b < self.rate_r {
            Some(Opinion::SaferB)
        } else if self.rate_r < self.rate_b {
            Some(Opinion::SaferR)
        } else {
            None
        }
    }

    pub fn controller(&self) -> ControllerConfig {
        ControllerConfig {
            algorithm: self.algorithm,
            prior: self.prior(),
            window: self.window,
            scale: self.scale,
            c_diss: self.c_diss,
            t_diss_max: self.t_diss_max,
            level: self.level,
            warmup: self.warmup,
            transit: TransitParams {
                ticks: self.transit_ticks,
                jitter: self.transit_jitter,
            },
            baseline_timer: self.baseline_timer,
            nest_dwell_max: self.nest_dwell_max,
            share_before_opinion: self.share_before_opinion,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.swarm_size == 0 {
            return bad("swarm_size must be at least 1".into());
        }
        for (name, rate) in [("rate_b", self.rate_b), ("rate_r", self.rate_r)] {
            if !(0.0..1.0).contains(&rate) {
                return bad(format!("{name} must lie in [0, 1), got {rate}"));
            }
        }
        if self.max_ticks == 0 {
            return bad("max_ticks must be at least 1".into());
        }
        if self.snapshot_interval == 0 {
            return bad("snapshot_interval must be at least 1".into());
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return bad(format!("level must lie in (0, 1), got {}", self.level));
        }
        if !(self.c_diss > 0.0) {
            return bad(format!("c_diss must be positive, got {}", self.c_diss));
        }
        if !(self.baseline_timer >= 1.0) {
            return bad(format!("baseline_timer must be >= 1, got {}", self.baseline_timer));
        }
        self.controller().transit.validate()?;
        let (a0, b0) = self.prior();
        crate::belief::BeliefModel::new(a0, b0, self.window, self.scale)?;
        Ok(())
    }
}

/// Opinion counts at one tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub tick: Tick,
    pub undecided: usize,
    pub safer_b: usize,
    pub safer_r: usize,
    pub events_total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub termination: Termination,
    pub terminated_at: Tick,
    pub reason: StopReason,
    pub final_opinions: Vec<Opinion>,
    pub accuracy: f64,
    pub events_observed_total: u64,
    pub visits_b: u64,
    pub visits_r: u64,
    pub snapshots: Vec<MetricsRow>,
    pub interarrivals_b: Vec<Tick>,
    pub interarrivals_r: Vec<Tick>,
}

impl RunResult {
    /// Every robot holds the correct decided opinion.
    pub fn correct_consensus(&self) -> bool {
        self.reason == StopReason::Consensus && self.accuracy == 1.0
    }
}

pub fn check_termination(opinions: &[Opinion], criterion: Termination) -> Option<StopReason> {
    let first = *opinions.first()?;
    if first.is_decided() && opinions.iter().all(|&o| o == first) {
        return Some(StopReason::Consensus);
    }
    if criterion == Termination::OpinionSelection && opinions.iter().all(|o| o.is_decided()) {
        return Some(StopReason::AllOpinionated);
    }
    None
}

/// Opinion counts from current opinions.
pub fn snapshot(opinions: &[Opinion], tick: Tick, events_total: u64) -> MetricsRow {
    let count = |target| opinions.iter().filter(|&&o| o == target).count();
    MetricsRow {
        tick,
        undecided: count(Opinion::Undecided),
        safer_b: count(Opinion::SaferB),
        safer_r: count(Opinion::SaferR),
        events_total,
    }
}

/// Fraction of opinions naming the safer area; Undecided is incorrect.
pub fn accuracy(opinions: &[Opinion], safer: Option<Opinion>) -> f64 {
    match safer {
        Some(target) if !opinions.is_empty() => {
            opinions.iter().filter(|&&o| o == target).count() as f64 / opinions.len() as f64
        }
        _ => 0.0,
    }
}

enum Streams {
    Global { b: EventStream, r: EventStream },
    PerRobot(Vec<(EventStream, EventStream)>),
}

/// A run in progress. [`run`] drives it to completion; tests can step it
/// tick by tick and inspect robots and actions.
pub struct Engine {
    cfg: RunConfig,
    controller: ControllerConfig,
    robots: Vec<Robot>,
    bus: Bus,
    streams: Streams,
    tick: Tick,
    opinions: Vec<Opinion>,
    events_total: u64,
    visits: (u64, u64),
    interarrivals: (Vec<Tick>, Vec<Tick>),
    snapshots: Vec<MetricsRow>,
    actions: Vec<(usize, Action)>,
    scratch: Vec<Action>,
    stopped: Option<StopReason>,
}

impl Engine {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let controller = cfg.controller();
        let n = cfg.swarm_size;
        let stream = |rate, d, i| EventStream::new(rate, sub_seed(cfg.seed, d, i));
        let streams = match cfg.event_model {
            EventModel::GlobalPerArea => Streams::Global {
                b: stream(cfg.rate_b, domain::EVENTS, 0)?,
                r: stream(cfg.rate_r, domain::EVENTS, 1)?,
            },
            EventModel::PerRobot => Streams::PerRobot(
                (0..n as u64)
                    .map(|i| {
                        Ok((
                            stream(cfg.rate_b, domain::ROBOT_EVENTS_B, i)?,
                            stream(cfg.rate_r, domain::ROBOT_EVENTS_R, i)?,
                        ))
                    })
                    .collect::<Result<_>>()?,
            ),
        };
        let robots = (0..n)
            .map(|id| Robot::new(id, &controller, rng_for(cfg.seed, domain::ROBOT, id as u64)))
            .collect::<Result<Vec<_>>>()?;
        let mut bus = Bus::new(n);
        if cfg.algorithm.is_dmmd() {
            for id in 0..n {
                bus.join(id, 0);
            }
        }
        let opinions = vec![Opinion::Undecided; n];
        let snapshots = vec![snapshot(&opinions, 0, 0)];
        Ok(Self {
            cfg: cfg.clone(),
            controller,
            robots,
            bus,
            streams,
            tick: 0,
            opinions,
            events_total: 0,
            visits: (0, 0),
            interarrivals: (Vec::new(), Vec::new()),
            snapshots,
            actions: Vec::new(),
            scratch: Vec::new(),
            stopped: None,
        })
    }

    pub fn tick(&self) -> Tick {
        self.tick
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn bus(&self) -> &Bus {
        &self.bus
    }

    pub fn opinions(&self) -> &[Opinion] {
        &self.opinions
    }

    /// Actions emitted during the last tick, tagged with the robot id.
    pub fn last_actions(&self) -> &[(usize, Action)] {
        &self.actions
    }

    pub fn stopped(&self) -> Option<StopReason> {
        self.stopped
    }

    /// Advances one tick and returns the stop reason once the run ends.
    pub fn step(&mut self) -> Result<Option<StopReason>> {
        if self.stopped.is_some() {
            return Ok(self.stopped);
        }
        self.tick += 1;
        let tick = self.tick;
        self.actions.clear();
        let global = match &mut self.streams {
            Streams::Global { b, r } => Some((b.poll(tick)?, r.poll(tick)?)),
            Streams::PerRobot(_) => None,
        };
        for (id, robot) in self.robots.iter_mut().enumerate() {
            let (ev_b, ev_r) = match (&mut self.streams, global) {
                (_, Some(g)) => g,
                (Streams::PerRobot(per), None) => (per[id].0.poll(tick)?, per[id].1.poll(tick)?),
                (Streams::Global { .. }, None) => unreachable!(),
            };
            let event_now = match robot.zone() {
                ZoneId::AreaB => ev_b,
                ZoneId::AreaR => ev_r,
                _ => false,
            };
            self.scratch.clear();
            robot.step(tick, event_now, &mut self.bus, &self.controller, &mut self.scratch)?;
            self.opinions[id] = robot.opinion;
            for action in self.scratch.drain(..) {
                match action {
                    Action::Observed { area, interarrival } => {
                        self.events_total += 1;
                        match area {
                            ZoneId::AreaB => self.interarrivals.0.push(interarrival),
                            _ => self.interarrivals.1.push(interarrival),
                        }
                    }
                    Action::VisitStarted(ZoneId::AreaB) => self.visits.0 += 1,
                    Action::VisitStarted(_) => self.visits.1 += 1,
                    _ => {}
                }
                self.actions.push((id, action));
            }
        }
        self.bus.flush(tick);

        let mut reason = check_termination(&self.opinions, self.cfg.termination);
        if reason.is_none() && tick >= self.cfg.max_ticks {
            reason = Some(StopReason::Timeout);
        }
        if tick % self.cfg.snapshot_interval == 0 || reason.is_some() {
            self.snapshots.push(snapshot(&self.opinions, tick, self.events_total));
        }
        self.stopped = reason;
        Ok(reason)
    }

    pub fn finish(self) -> RunResult {
        let reason = self.stopped.unwrap_or(StopReason::Timeout);
        RunResult {
            seed: self.cfg.seed,
            algorithm: self.cfg.algorithm,
            termination: self.cfg.termination,
            terminated_at: self.tick,
            reason,
            accuracy: accuracy(&self.opinions, self.cfg.safer_area()),
            final_opinions: self.opinions,
            events_observed_total: self.events_total,
            visits_b: self.visits.0,
            visits_r: self.visits.1,
            snapshots: self.snapshots,
            interarrivals_b: self.interarrivals.0,
            interarrivals_r: self.interarrivals.1,
        }
    }
}

/// Runs `cfg` to termination or its tick cap.
pub fn run(cfg: &RunConfig) -> Result<RunResult> {
    let mut engine = Engine::new(cfg)?;
    while engine.step()?.is_none() {}
    Ok(engine.finish())
}
