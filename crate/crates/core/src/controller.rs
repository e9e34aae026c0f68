//! Per-robot controller: the Nesting → Leaving → Measuring → Returning cycle
//! and the decision rules of the baseline and DMMD variants.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arena::{start_transit, TransitParams, TransitState, TransitStep, ZoneId};
use crate::belief::{BeliefModel, CredibleInterval};
use crate::comms::{Bus, Message, Opinion, SharedBeliefs};
use crate::events::{uniform_ticks, Tick};
use crate::seeding::SimRng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Baseline,
    Dmmd,
    DmmdSharing,
    DmmdHighPrior,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Baseline,
        Algorithm::Dmmd,
        Algorithm::DmmdSharing,
        Algorithm::DmmdHighPrior,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Baseline => "baseline",
            Algorithm::Dmmd => "dmmd",
            Algorithm::DmmdSharing => "dmmd_sharing",
            Algorithm::DmmdHighPrior => "dmmd_high_prior",
        }
    }

    pub fn is_dmmd(self) -> bool {
        self != Algorithm::Baseline
    }

    pub fn shares_beliefs(self) -> bool {
        self == Algorithm::DmmdSharing
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FsmState {
    Nesting,
    Leaving,
    Measuring,
    Returning,
}

impl FsmState {
    /// The only legal successor of each state.
    pub fn successor(self) -> FsmState {
        match self {
            FsmState::Nesting => FsmState::Leaving,
            FsmState::Leaving => FsmState::Measuring,
            FsmState::Measuring => FsmState::Returning,
            FsmState::Returning => FsmState::Nesting,
        }
    }
}

/// Parameters shared by every robot of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub algorithm: Algorithm,
    pub prior: (f64, f64),
    pub window: usize,
    pub scale: f64,
    pub c_diss: f64,
    pub t_diss_max: Tick,
    pub level: f64,
    pub warmup: u32,
    pub transit: TransitParams,
    pub baseline_timer: f64,
    /// Upper bound of the uniform initial (and baseline) nest dwell.
    pub nest_dwell_max: Tick,
    /// Undecided robots of the sharing variant broadcast their beliefs.
    pub share_before_opinion: bool,
}

/// Visits needed per area before the baseline may select an opinion.
pub const BASELINE_MIN_VISITS: u32 = 10;
/// Visit-count gap above which the baseline goes to the less visited area.
pub const BASELINE_MAX_VISIT_GAP: u32 = 5;
/// Event band over the recent visits that allows a baseline opinion.
pub const BASELINE_EVENT_BAND: (u32, u32) = (8, 16);
pub const BASELINE_RECENT_VISITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisitRecord {
    pub area: ZoneId,
    pub events: u32,
    pub duration: Tick,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    pub obs_timer: f64,
    pub recent_visits: VecDeque<VisitRecord>,
}

impl BaselineState {
    pub fn new(obs_timer: f64) -> Self {
        Self {
            obs_timer,
            recent_visits: VecDeque::with_capacity(BASELINE_RECENT_VISITS),
        }
    }

    fn record(&mut self, visit: VisitRecord) {
        if self.recent_visits.len() == BASELINE_RECENT_VISITS {
            self.recent_visits.pop_front();
        }
        self.recent_visits.push_back(visit);
    }
}

/// `min(c_diss / (|CI| / S + 0.2), cap)`, rounded to whole ticks.
pub fn dissemination_time(ci: &CredibleInterval, c_diss: f64, cap: Tick, scale: f64) -> Tick {
    let w = (ci.hi - ci.lo) / scale;
    let t = (c_diss / (w + 0.2)).min(cap as f64);
    t.round() as Tick
}

/// Twice the upper end of the interval, rounded to whole ticks (at least 1).
pub fn observation_time(ci: &CredibleInterval) -> Tick {
    ((2.0 * ci.hi).round() as Tick).max(1)
}

fn coin(rng: &mut SimRng) -> ZoneId {
    if rng.random_bool(0.5) {
        ZoneId::AreaB
    } else {
        ZoneId::AreaR
    }
}

/// Picks the next area for a DMMD robot.
///
/// Until both areas have `warmup` recorded observations the robot goes to
/// the area with fewer observations. Afterwards it follows the strict
/// majority of its own and the heard decided opinions; ties go to a coin.
pub fn dmmd_choose_area(
    own: Opinion,
    heard: &[Opinion],
    warmup_done: bool,
    observations: (u32, u32),
    rng: &mut SimRng,
) -> ZoneId {
    if !warmup_done {
        return match observations.0.cmp(&observations.1) {
            std::cmp::Ordering::Less => ZoneId::AreaB,
            std::cmp::Ordering::Greater => ZoneId::AreaR,
            std::cmp::Ordering::Equal => coin(rng),
        };
    }
    let (mut b, mut r) = (0usize, 0usize);
    for op in std::iter::once(&own).chain(heard) {
        match op {
            Opinion::SaferB => b += 1,
            Opinion::SaferR => r += 1,
            Opinion::Undecided => {}
        }
    }
    match b.cmp(&r) {
        std::cmp::Ordering::Greater => ZoneId::AreaB,
        std::cmp::Ordering::Less => ZoneId::AreaR,
        std::cmp::Ordering::Equal => coin(rng),
    }
}

/// The safer area is the one whose interval lies entirely above the other.
pub fn dmmd_update_opinion(ci_b: &CredibleInterval, ci_r: &CredibleInterval) -> Opinion {
    if ci_b.lo > ci_r.hi {
        Opinion::SaferB
    } else if ci_r.lo > ci_b.hi {
        Opinion::SaferR
    } else {
        Opinion::Undecided
    }
}

pub fn baseline_timer_update(timer: f64, events: u32) -> f64 {
    let next = match events {
        0 => timer * 1.05,
        1 => timer * 1.01,
        n => timer * (1.0 - 0.01 * n as f64),
    };
    next.max(1.0)
}

pub fn baseline_choose_area(visits_b: u32, visits_r: u32, rng: &mut SimRng) -> ZoneId {
    if visits_b.abs_diff(visits_r) > BASELINE_MAX_VISIT_GAP {
        if visits_b < visits_r {
            ZoneId::AreaB
        } else {
            ZoneId::AreaR
        }
    } else {
        coin(rng)
    }
}

pub fn baseline_update_opinion(visits_b: u32, visits_r: u32, recent: &VecDeque<VisitRecord>) -> Opinion {
    if visits_b < BASELINE_MIN_VISITS || visits_r < BASELINE_MIN_VISITS {
        return Opinion::Undecided;
    }
    let total: u32 = recent.iter().map(|v| v.events).sum();
    if total < BASELINE_EVENT_BAND.0 || total > BASELINE_EVENT_BAND.1 {
        return Opinion::Undecided;
    }
    let rate = |area: ZoneId| {
        let (events, ticks) = recent
            .iter()
            .filter(|v| v.area == area)
            .fold((0u64, 0u64), |(e, t), v| (e + v.events as u64, t + v.duration));
        (ticks > 0).then(|| events as f64 / ticks as f64)
    };
    match (rate(ZoneId::AreaB), rate(ZoneId::AreaR)) {
        (Some(b), Some(r)) if b < r => Opinion::SaferB,
        (Some(b), Some(r)) if r < b => Opinion::SaferR,
        _ => Opinion::Undecided,
    }
}

/// Side effects of one controller step, reported to the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Broadcast(Message),
    Transition { from: FsmState, to: FsmState },
    VisitStarted(ZoneId),
    /// An event was seen in `area`; `interarrival` is the recorded sample.
    Observed { area: ZoneId, interarrival: Tick },
}

#[derive(Debug, Clone)]
pub struct Robot {
    pub id: usize,
    pub fsm: FsmState,
    pub opinion: Opinion,
    pub belief_b: BeliefModel,
    pub belief_r: BeliefModel,
    pub timer: Tick,
    pub transit: Option<TransitState>,
    position: ZoneId,
    pub target: Option<ZoneId>,
    pub last_event_mark: Tick,
    pub visits_b: u32,
    pub visits_r: u32,
    pub obs_b: u32,
    pub obs_r: u32,
    pub baseline: Option<BaselineState>,
    pub last_measured: Option<ZoneId>,
    events_this_visit: u32,
    measure_ticks: Tick,
    nest_since: Tick,
    rng: SimRng,
}

impl Robot {
    /// A robot waiting in the nest with a uniform initial dwell.
    pub fn new(id: usize, cfg: &ControllerConfig, mut rng: SimRng) -> Result<Self> {
        let (a0, b0) = cfg.prior;
        let belief = BeliefModel::new(a0, b0, cfg.window, cfg.scale)?;
        let timer = uniform_ticks(&mut rng, 0, cfg.nest_dwell_max);
        Ok(Self {
            id,
            fsm: FsmState::Nesting,
            opinion: Opinion::Undecided,
            belief_b: belief.clone(),
            belief_r: belief,
            timer,
            transit: None,
            position: ZoneId::Nest,
            target: None,
            last_event_mark: 0,
            visits_b: 0,
            visits_r: 0,
            obs_b: 0,
            obs_r: 0,
            baseline: (cfg.algorithm == Algorithm::Baseline).then(|| BaselineState::new(cfg.baseline_timer)),
            last_measured: None,
            events_this_visit: 0,
            measure_ticks: 0,
            nest_since: 0,
            rng,
        })
    }

    pub fn zone(&self) -> ZoneId {
        if self.transit.is_some() {
            ZoneId::Transition
        } else {
            self.position
        }
    }

    pub fn belief(&self, area: ZoneId) -> &BeliefModel {
        match area {
            ZoneId::AreaR => &self.belief_r,
            _ => &self.belief_b,
        }
    }

    pub fn warmup_done(&self, warmup: u32) -> bool {
        self.obs_b >= warmup && self.obs_r >= warmup
    }

    /// Checks the state/zone pairing.
    pub fn check_invariants(&self) -> Result<()> {
        let ok = match self.fsm {
            FsmState::Nesting => self.zone() == ZoneId::Nest,
            FsmState::Measuring => self.zone().is_area(),
            FsmState::Leaving | FsmState::Returning => self.zone() == ZoneId::Transition,
        };
        if ok {
            Ok(())
        } else {
            Err(self.bug(format!("state {:?} in zone {:?}", self.fsm, self.zone())))
        }
    }

    fn bug(&self, detail: String) -> Error {
        Error::Controller {
            robot: self.id,
            detail,
        }
    }

    fn transition(&mut self, to: FsmState, out: &mut Vec<Action>) {
        out.push(Action::Transition { from: self.fsm, to });
        self.fsm = to;
    }

    fn outgoing_message(&self, cfg: &ControllerConfig) -> Option<Message> {
        let sharing = cfg.algorithm.shares_beliefs();
        if sharing && !self.opinion.is_decided() && !cfg.share_before_opinion {
            return None;
        }
        let beliefs = sharing.then(|| SharedBeliefs {
            area_b: self.belief_b.cumulative(),
            area_r: self.belief_r.cumulative(),
        });
        Some(Message {
            sender: self.id,
            opinion: self.opinion,
            beliefs,
        })
    }

    /// Advances the robot by one tick. `event_now` reports whether an event
    /// fired at this tick in the area the robot currently occupies.
    pub fn step(
        &mut self,
        tick: Tick,
        event_now: bool,
        bus: &mut Bus,
        cfg: &ControllerConfig,
        out: &mut Vec<Action>,
    ) -> Result<()> {
        match self.fsm {
            FsmState::Nesting => self.step_nesting(tick, bus, cfg, out),
            FsmState::Leaving => self.step_leaving(tick, cfg, out),
            FsmState::Measuring => self.step_measuring(tick, event_now, cfg, out),
            FsmState::Returning => self.step_returning(tick, bus, cfg, out),
        }
    }

    fn step_nesting(&mut self, tick: Tick, bus: &mut Bus, cfg: &ControllerConfig, out: &mut Vec<Action>) -> Result<()> {
        if self.zone() != ZoneId::Nest {
            return Err(self.bug("nesting outside the nest".into()));
        }
        if self.timer > 1 {
            self.timer -= 1;
            if cfg.algorithm.is_dmmd() {
                if let Some(msg) = self.outgoing_message(cfg) {
                    bus.broadcast(msg)?;
                    out.push(Action::Broadcast(msg));
                }
            }
            return Ok(());
        }
        self.timer = 0;
        let target = match &self.baseline {
            Some(_) => baseline_choose_area(self.visits_b, self.visits_r, &mut self.rng),
            None => {
                let heard: Vec<Opinion> = bus
                    .collect(self.id, self.nest_since, tick)
                    .iter()
                    .map(|m| m.opinion)
                    .collect();
                dmmd_choose_area(
                    self.opinion,
                    &heard,
                    self.warmup_done(cfg.warmup),
                    (self.obs_b, self.obs_r),
                    &mut self.rng,
                )
            }
        };
        bus.leave(self.id);
        self.target = Some(target);
        self.transit = Some(start_transit(ZoneId::Nest, target, &cfg.transit, &mut self.rng)?);
        self.transition(FsmState::Leaving, out);
        Ok(())
    }

    fn step_leaving(&mut self, tick: Tick, cfg: &ControllerConfig, out: &mut Vec<Action>) -> Result<()> {
        let transit = self.transit.ok_or_else(|| self.bug("leaving without a transit".into()))?;
        match transit.tick() {
            TransitStep::Moving(next) => self.transit = Some(next),
            TransitStep::Arrived(area) => {
                if !area.is_area() {
                    return Err(self.bug(format!("leaving arrived at {area:?}")));
                }
                self.transit = None;
                self.position = area;
                self.last_event_mark = tick;
                self.events_this_visit = 0;
                match area {
                    ZoneId::AreaB => self.visits_b += 1,
                    _ => self.visits_r += 1,
                }
                self.timer = match &self.baseline {
                    Some(base) => (base.obs_timer.round() as Tick).max(1),
                    None => observation_time(&self.belief(area).credible_interval(cfg.level)?),
                };
                self.measure_ticks = self.timer;
                out.push(Action::VisitStarted(area));
                self.transition(FsmState::Measuring, out);
            }
        }
        Ok(())
    }

    fn step_measuring(&mut self, tick: Tick, event_now: bool, cfg: &ControllerConfig, out: &mut Vec<Action>) -> Result<()> {
        let area = self.zone();
        if !area.is_area() {
            return Err(self.bug(format!("measuring in {area:?}")));
        }
        if event_now {
            let interarrival = tick
                .checked_sub(self.last_event_mark)
                .filter(|&x| x > 0)
                .ok_or_else(|| self.bug(format!("non-positive interarrival at tick {tick}")))?;
            self.last_event_mark = tick;
            self.events_this_visit += 1;
            if self.baseline.is_none() {
                let belief = match area {
                    ZoneId::AreaB => &mut self.belief_b,
                    _ => &mut self.belief_r,
                };
                belief.observe(interarrival as f64)?;
            }
            match area {
                ZoneId::AreaB => self.obs_b += 1,
                _ => self.obs_r += 1,
            }
            out.push(Action::Observed { area, interarrival });
        }
        self.timer = self.timer.saturating_sub(1);
        if self.timer > 0 {
            return Ok(());
        }
        self.last_measured = Some(area);
        match &mut self.baseline {
            Some(base) => {
                base.record(VisitRecord {
                    area,
                    events: self.events_this_visit,
                    duration: self.measure_ticks,
                });
                base.obs_timer = baseline_timer_update(base.obs_timer, self.events_this_visit);
                self.opinion = baseline_update_opinion(self.visits_b, self.visits_r, &base.recent_visits);
            }
            None => self.reevaluate_opinion(cfg)?,
        }
        self.transit = Some(start_transit(area, ZoneId::Nest, &cfg.transit, &mut self.rng)?);
        self.target = Some(ZoneId::Nest);
        self.transition(FsmState::Returning, out);
        Ok(())
    }

    fn step_returning(&mut self, tick: Tick, bus: &mut Bus, cfg: &ControllerConfig, out: &mut Vec<Action>) -> Result<()> {
        let transit = self.transit.ok_or_else(|| self.bug("returning without a transit".into()))?;
        match transit.tick() {
            TransitStep::Moving(next) => self.transit = Some(next),
            TransitStep::Arrived(zone) => {
                if zone != ZoneId::Nest {
                    return Err(self.bug(format!("returning arrived at {zone:?}")));
                }
                self.transit = None;
                self.position = ZoneId::Nest;
                self.target = None;
                self.nest_since = tick;
                if self.baseline.is_some() {
                    self.timer = uniform_ticks(&mut self.rng, 0, cfg.nest_dwell_max);
                } else {
                    bus.join(self.id, tick);
                    if cfg.algorithm.shares_beliefs() {
                        self.merge_from(bus, tick)?;
                        self.reevaluate_opinion(cfg)?;
                    }
                    self.timer = self.dissemination_ticks(cfg)?;
                }
                self.transition(FsmState::Nesting, out);
            }
        }
        Ok(())
    }

    fn merge_from(&mut self, bus: &Bus, tick: Tick) -> Result<()> {
        let shared: Vec<SharedBeliefs> = bus
            .collect(self.id, tick, tick)
            .into_iter()
            .filter_map(|m| m.beliefs)
            .collect();
        let b: Vec<(f64, f64)> = shared.iter().map(|s| s.area_b).collect();
        let r: Vec<(f64, f64)> = shared.iter().map(|s| s.area_r).collect();
        self.belief_b.merge_shared(&b)?;
        self.belief_r.merge_shared(&r)?;
        Ok(())
    }

    fn reevaluate_opinion(&mut self, cfg: &ControllerConfig) -> Result<()> {
        let ci_b = self.belief_b.credible_interval(cfg.level)?;
        let ci_r = self.belief_r.credible_interval(cfg.level)?;
        self.opinion = dmmd_update_opinion(&ci_b, &ci_r);
        Ok(())
    }

    /// Dissemination time from the interval of the opinion's area, or of the
    /// last measured area while undecided.
    fn dissemination_ticks(&self, cfg: &ControllerConfig) -> Result<Tick> {
        let area = match self.opinion {
            Opinion::SaferB => ZoneId::AreaB,
            Opinion::SaferR => ZoneId::AreaR,
            Opinion::Undecided => self.last_measured.unwrap_or(ZoneId::AreaB),
        };
        let ci = self.belief(area).credible_interval(cfg.level)?;
        Ok(dissemination_time(&ci, cfg.c_diss, cfg.t_diss_max, cfg.scale))
    }
}
