//! Discrete-event engine for asynchronous Look-Compute-Move cycles.
//!
//! Look and Compute form one atomic event; the resulting light change and
//! step are applied together by a later Move event. Between the two, other
//! robots keep seeing the old light at the old position.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{is_solvable, Action, ConfigError, Configuration, Light, RobotId, Snapshot};
use crate::controller::{compute, TargetPattern};
use crate::geometry::{enclosing_dims, GridPoint};

pub const DEFAULT_FAIRNESS: u64 = 16;

/// The per-robot algorithm run at every Look.
pub type Controller = fn(&Snapshot, &TargetPattern) -> Action;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("instance has an empty horizontal mirror axis and cannot be solved")]
    Unsolvable,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("replay event {seq} ({event:?}) is not enabled")]
    ReplayMismatch { seq: u64, event: Event },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CycleState {
    Idle,
    MovePending(Action),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Look,
    Move,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub robot: RobotId,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub seq: u64,
    pub robot: RobotId,
    pub kind: EventKind,
    pub pos_before: GridPoint,
    pub pos_after: GridPoint,
    pub light_before: Light,
    pub light_after: Light,
}

impl TraceRecord {
    pub fn event(&self) -> Event {
        Event { robot: self.robot, kind: self.kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchedulerPolicy {
    /// Uniform choice among enabled events.
    RandomAsync(u64),
    /// One robot at a time runs a full cycle, in id order.
    RoundRobinSSync,
    /// Everyone looks at the same configuration, then everyone moves.
    FSync,
    /// Random, except that the current victim's Move is held back for
    /// `delay` events after its Look. The victim changes every `rotation`
    /// events.
    LaggardAsync { seed: u64, rotation: u64, delay: u64 },
    /// Exactly the given events, in order.
    Replay(Vec<Event>),
}

/// Simulation state. Robot `i` of the configuration has id `RobotId(i)`.
#[derive(Debug, Clone)]
pub struct World {
    config: Configuration,
    targets: TargetPattern,
    raw_targets: Vec<GridPoint>,
    state: Vec<CycleState>,
    events: u64,
    version: u64,
    /// Version at which the robot last computed "stay as you are".
    quiet: Vec<Option<u64>>,
    last_event: Vec<u64>,
    last_look: Vec<u64>,
    formed: bool,
    controller: Controller,
}

impl World {
    pub fn new(initial: Configuration, targets: &TargetPattern) -> Result<Self, SimError> {
        if initial.len() != targets.len() {
            return Err(ConfigError::SizeMismatch { robots: initial.len(), targets: targets.len() }.into());
        }
        if !is_solvable(&initial.positions()) {
            return Err(SimError::Unsolvable);
        }
        let robots = initial
            .robots()
            .iter()
            .enumerate()
            .map(|(i, r)| crate::config::Robot { id: RobotId(i), ..*r })
            .collect();
        let config = Configuration::new(robots)?;
        let k = config.len();
        let raw_targets = targets.points().to_vec();
        let formed = config.pattern_formed(&raw_targets)?;
        Ok(World {
            config,
            targets: targets.clone(),
            raw_targets,
            state: vec![CycleState::Idle; k],
            events: 0,
            version: 0,
            quiet: vec![None; k],
            last_event: vec![0; k],
            last_look: vec![0; k],
            formed,
            controller: compute,
        })
    }

    /// Same world driven by a different algorithm.
    pub fn with_controller(mut self, controller: Controller) -> Self {
        self.controller = controller;
        self
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn targets(&self) -> &TargetPattern {
        &self.targets
    }

    pub fn cycle_state(&self, id: RobotId) -> CycleState {
        self.state[id.0]
    }

    pub fn states(&self) -> &[CycleState] {
        &self.state
    }

    pub fn event_counter(&self) -> u64 {
        self.events
    }

    pub fn pattern_formed(&self) -> bool {
        self.formed
    }

    /// No move pending and every robot has computed "wait" against the
    /// current configuration.
    pub fn quiescent(&self) -> bool {
        self.state.iter().all(|s| *s == CycleState::Idle) && self.quiet.iter().all(|q| *q == Some(self.version))
    }

    /// Each robot has exactly one enabled event.
    pub fn enabled_events(&self) -> Vec<Event> {
        (0..self.state.len()).map(|i| self.enabled(RobotId(i))).collect()
    }

    pub fn enabled(&self, robot: RobotId) -> Event {
        let kind = match self.state[robot.0] {
            CycleState::Idle => EventKind::Look,
            CycleState::MovePending(_) => EventKind::Move,
        };
        Event { robot, kind }
    }

    /// Executes one event. A collision leaves the world unchanged.
    pub fn execute(&mut self, event: Event) -> Result<TraceRecord, ConfigError> {
        let i = event.robot.0;
        if i >= self.state.len() {
            return Err(ConfigError::UnknownRobot(event.robot));
        }
        let before = self.config.robots()[i];
        match (event.kind, self.state[i]) {
            (EventKind::Look, CycleState::Idle) => {
                let snapshot = self.config.take_snapshot(event.robot)?;
                let action = (self.controller)(&snapshot, &self.targets);
                if action == Action::stay(before.light) {
                    self.quiet[i] = Some(self.version);
                } else {
                    self.state[i] = CycleState::MovePending(action);
                }
                self.last_look[i] = self.events;
            }
            (EventKind::Move, CycleState::MovePending(action)) => {
                self.config.apply_action(event.robot, action)?;
                self.state[i] = CycleState::Idle;
                self.version += 1;
                if action.light == Light::Done || before.light == Light::Done {
                    self.formed = self.config.pattern_formed(&self.raw_targets)?;
                }
            }
            _ => return Err(ConfigError::UnknownRobot(event.robot)),
        }
        let after = self.config.robots()[i];
        let record = TraceRecord {
            seq: self.events,
            robot: event.robot,
            kind: event.kind,
            pos_before: before.pos,
            pos_after: after.pos,
            light_before: before.light,
            light_after: after.light,
        };
        self.events += 1;
        self.last_event[i] = self.events;
        Ok(record)
    }
}

/// Picks events according to a policy, never letting an enabled robot wait
/// more than `fairness * k` events.
#[derive(Debug, Clone)]
pub struct Scheduler {
    policy: SchedulerPolicy,
    fairness: u64,
    rng: ChaCha8Rng,
    cursor: usize,
    looked: bool,
    queue: std::collections::VecDeque<Event>,
}

impl Scheduler {
    pub fn new(policy: SchedulerPolicy, fairness: u64) -> Self {
        let seed = match policy {
            SchedulerPolicy::RandomAsync(seed) | SchedulerPolicy::LaggardAsync { seed, .. } => seed,
            _ => 0,
        };
        let queue = match &policy {
            SchedulerPolicy::Replay(events) => events.iter().copied().collect(),
            _ => Default::default(),
        };
        Scheduler {
            policy,
            fairness: fairness.max(1),
            rng: ChaCha8Rng::seed_from_u64(seed),
            cursor: 0,
            looked: false,
            queue,
        }
    }

    /// Next event, or `None` when a replay is exhausted.
    pub fn pick(&mut self, world: &World) -> Option<Event> {
        let k = world.state.len();
        match self.policy {
            SchedulerPolicy::Replay(_) => self.queue.pop_front(),
            SchedulerPolicy::FSync => {
                if self.queue.is_empty() {
                    let pending = world.state.iter().any(|s| matches!(s, CycleState::MovePending(_)));
                    self.queue = (0..k)
                        .map(|i| world.enabled(RobotId(i)))
                        .filter(|e| (e.kind == EventKind::Move) == pending)
                        .collect();
                }
                self.queue.pop_front()
            }
            SchedulerPolicy::RoundRobinSSync => loop {
                let robot = RobotId(self.cursor);
                match world.state[self.cursor] {
                    CycleState::MovePending(_) => {
                        self.cursor = (self.cursor + 1) % k;
                        self.looked = false;
                        return Some(Event { robot, kind: EventKind::Move });
                    }
                    CycleState::Idle if !self.looked => {
                        self.looked = true;
                        return Some(Event { robot, kind: EventKind::Look });
                    }
                    CycleState::Idle => {
                        self.cursor = (self.cursor + 1) % k;
                        self.looked = false;
                    }
                }
            },
            SchedulerPolicy::RandomAsync(_) => {
                Some(self.starved(world).unwrap_or_else(|| world.enabled(RobotId(self.rng.gen_range(0..k)))))
            }
            SchedulerPolicy::LaggardAsync { rotation, delay, .. } => {
                if let Some(e) = self.starved(world) {
                    return Some(e);
                }
                let victim = ((world.events / rotation.max(1)) % k as u64) as usize;
                let held = matches!(world.state[victim], CycleState::MovePending(_))
                    && world.events - world.last_look[victim] < delay;
                if held && k > 1 {
                    let mut r = self.rng.gen_range(0..k - 1);
                    if r >= victim {
                        r += 1;
                    }
                    Some(world.enabled(RobotId(r)))
                } else {
                    Some(world.enabled(RobotId(self.rng.gen_range(0..k))))
                }
            }
        }
    }

    /// Robots are forced k events early: at most k-1 others can be due at the
    /// same time, so none goes B·k events without acting.
    fn starved(&self, world: &World) -> Option<Event> {
        let k = world.state.len() as u64;
        let due = (self.fairness - 1) * k;
        (0..world.state.len())
            .filter(|&i| world.events - world.last_event[i] >= due)
            .min_by_key(|&i| world.last_event[i])
            .map(|i| world.enabled(RobotId(i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Collision { mover: RobotId, occupant: RobotId, target: GridPoint },
    Deadlock,
    Timeout,
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success)
    }
}

/// Move accounting. `m_ser`/`n_ser` are the height/width of the initial
/// enclosing rectangle and `big_m_ser`/`big_n_ser` those of the pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub k: usize,
    pub events: u64,
    pub total_moves: u64,
    pub m_ser: i64,
    pub n_ser: i64,
    #[serde(rename = "M_ser")]
    pub big_m_ser: i64,
    #[serde(rename = "N_ser")]
    pub big_n_ser: i64,
    #[serde(rename = "D")]
    pub d: i64,
}

impl RunStats {
    pub fn new(initial: &[GridPoint], targets: &[GridPoint]) -> Self {
        let (m_ser, n_ser) = enclosing_dims(initial);
        let (big_m_ser, big_n_ser) = enclosing_dims(targets);
        let k = initial.len();
        let d = [m_ser, n_ser, big_m_ser, big_n_ser, k as i64, 1].into_iter().max().unwrap_or(1);
        RunStats { k, events: 0, total_moves: 0, m_ser, n_ser, big_m_ser, big_n_ser, d }
    }

    /// `total_moves / (k * D)`.
    pub fn move_constant(&self) -> f64 {
        self.total_moves as f64 / (self.k.max(1) as f64 * self.d as f64)
    }
}

/// `total_moves <= c * k * D`.
pub fn check_move_bound(stats: &RunStats, c: u64) -> bool {
    stats.total_moves <= c * stats.k as u64 * stats.d as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub stats: RunStats,
    pub trace: Vec<TraceRecord>,
    pub final_config: Configuration,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub max_events: u64,
    pub fairness: u64,
    pub record_trace: bool,
    pub controller: Controller,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { max_events: 1_000_000, fairness: DEFAULT_FAIRNESS, record_trace: true, controller: compute }
    }
}

pub fn run(
    initial: &Configuration,
    targets: &TargetPattern,
    policy: SchedulerPolicy,
    max_events: u64,
) -> Result<RunResult, SimError> {
    run_with(initial, targets, policy, RunOptions { max_events, ..RunOptions::default() }, |_, _| {})
}

/// Runs to completion, calling `observer` after every event with the world
/// as it is after that event.
pub fn run_with(
    initial: &Configuration,
    targets: &TargetPattern,
    policy: SchedulerPolicy,
    options: RunOptions,
    mut observer: impl FnMut(&World, &TraceRecord),
) -> Result<RunResult, SimError> {
    let replay = matches!(policy, SchedulerPolicy::Replay(_));
    let mut world = World::new(initial.clone(), targets)?.with_controller(options.controller);
    let mut scheduler = Scheduler::new(policy, options.fairness);
    let mut stats = RunStats::new(&world.config.positions(), targets.points());
    let mut trace = Vec::new();
    let finish = |outcome, world: World, stats: RunStats, trace| {
        Ok(RunResult { outcome, stats, trace, final_config: world.config })
    };
    loop {
        if world.formed {
            return finish(Outcome::Success, world, stats, trace);
        }
        if world.quiescent() {
            return finish(Outcome::Deadlock, world, stats, trace);
        }
        if world.events >= options.max_events {
            return finish(Outcome::Timeout, world, stats, trace);
        }
        let Some(event) = scheduler.pick(&world) else {
            return finish(Outcome::Timeout, world, stats, trace);
        };
        if replay && world.enabled(event.robot) != event {
            return Err(SimError::ReplayMismatch { seq: world.events, event });
        }
        match world.execute(event) {
            Ok(record) => {
                stats.events += 1;
                if record.pos_before != record.pos_after {
                    stats.total_moves += 1;
                }
                observer(&world, &record);
                if options.record_trace {
                    trace.push(record);
                }
            }
            Err(ConfigError::Collision { mover, occupant, target }) => {
                return finish(Outcome::Collision { mover, occupant, target }, world, stats, trace);
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// The event sequence of a trace, for replay.
pub fn replay_policy(trace: &[TraceRecord]) -> SchedulerPolicy {
    SchedulerPolicy::Replay(trace.iter().map(TraceRecord::event).collect())
}
