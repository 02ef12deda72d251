//! Independent brute-force references: visibility, solvability and an
//! exhaustive explorer over every interleaving of a tiny instance.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::config::{Action, Configuration, Light, Robot, RobotId};
use crate::controller::{compute, TargetPattern};
use crate::geometry::{GridPoint, HorizontalAxis};
use crate::sim::{Controller, Event, EventKind, Scheduler, SchedulerPolicy, SimError, TraceRecord, World};

/// Whether `c` lies strictly inside segment `ab`, by solving for the segment
/// parameter in exact rationals.
fn on_open_segment(a: GridPoint, b: GridPoint, c: GridPoint) -> bool {
    let param = |from: i64, to: i64, at: i64| (to != from).then(|| Ratio::new(at - from, to - from));
    let tx = param(a.x, b.x, c.x);
    let ty = param(a.y, b.y, c.y);
    let t = match (tx, ty) {
        (Some(tx), Some(ty)) if tx == ty => tx,
        (Some(t), None) if c.y == a.y => t,
        (None, Some(t)) if c.x == a.x => t,
        _ => return false,
    };
    t > Ratio::from_integer(0) && t < Ratio::from_integer(1)
}

/// Indices seen from robot `i`: all others with no robot strictly between.
pub fn brute_visibility(positions: &[GridPoint], i: usize) -> Vec<usize> {
    (0..positions.len())
        .filter(|&j| j != i)
        .filter(|&j| {
            (0..positions.len())
                .filter(|&k| k != i && k != j)
                .all(|k| !on_open_segment(positions[i], positions[j], positions[k]))
        })
        .collect()
}

/// Tries every horizontal axis that could matter instead of the single
/// extremal-rows candidate.
pub fn brute_solvability(positions: &[GridPoint]) -> bool {
    let (Some(lo), Some(hi)) = (positions.iter().map(|p| p.y).min(), positions.iter().map(|p| p.y).max()) else {
        return true;
    };
    !(2 * lo - 2..=2 * hi + 2).any(|y2| {
        let axis = HorizontalAxis::from_doubled(y2);
        positions.iter().all(|p| !axis.contains(*p) && positions.contains(&p.reflect(axis)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExploreOutcome {
    Success,
    Collision,
    Deadlock,
    DepthExceeded,
}

#[derive(Debug, Clone, Copy)]
pub struct ExploreOptions {
    /// Longest event sequence explored from the initial state.
    pub depth_limit: u64,
    pub controller: Controller,
    /// Random continuations tried from each depth-limited state.
    pub extend_attempts: u64,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { depth_limit: 100_000, controller: compute, extend_attempts: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationResult {
    pub states_visited: usize,
    /// Leaves by kind. States from which no schedule reaches the pattern
    /// (livelocks) count as deadlocks.
    pub outcomes: BTreeMap<ExploreOutcome, usize>,
    pub livelock_states: usize,
    /// Depth-limited states that a random continuation carried to success.
    pub depth_exceeded_extended: usize,
    pub counterexample: Option<Vec<TraceRecord>>,
    /// A schedule that reaches the depth limit, if any does.
    pub horizon_witness: Option<Vec<TraceRecord>>,
}

impl ExplorationResult {
    pub fn count(&self, outcome: ExploreOutcome) -> usize {
        self.outcomes.get(&outcome).copied().unwrap_or(0)
    }

    pub fn only_success(&self) -> bool {
        self.count(ExploreOutcome::Collision) == 0 && self.count(ExploreOutcome::Deadlock) == 0
    }

    pub fn leaves(&self) -> usize {
        self.outcomes.values().sum()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    robots: Vec<Robot>,
    pending: Vec<Option<Action>>,
}

impl State {
    /// Translated so that the lower left corner of the positions is the origin.
    fn canonical(mut self) -> Self {
        let mx = self.robots.iter().map(|r| r.pos.x).min().unwrap_or(0);
        let my = self.robots.iter().map(|r| r.pos.y).min().unwrap_or(0);
        for r in &mut self.robots {
            r.pos = GridPoint::new(r.pos.x - mx, r.pos.y - my);
        }
        self
    }
}

struct Node {
    parent: Option<(usize, Event)>,
    depth: u64,
}

/// Breadth-first search over every enabled event at every state. Looks that
/// compute a plain wait are self-loops and are not expanded.
pub fn explore_all_schedules(
    initial: &Configuration,
    targets: &TargetPattern,
    options: ExploreOptions,
) -> Result<ExplorationResult, SimError> {
    let world = World::new(initial.clone(), targets)?;
    let raw_targets = targets.points().to_vec();
    let start = State { robots: world.config().robots().to_vec(), pending: vec![None; initial.len()] }.canonical();

    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states: Vec<State> = Vec::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut preds: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(start.clone(), 0);
    states.push(start);
    nodes.push(Node { parent: None, depth: 0 });
    preds.push(Vec::new());
    queue.push_back(0);

    let mut outcomes: BTreeMap<ExploreOutcome, usize> = BTreeMap::new();
    let mut goals: Vec<usize> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    let mut deadlocked: Vec<usize> = Vec::new();
    let mut failure: Option<(usize, Vec<Event>)> = None;

    while let Some(id) = queue.pop_front() {
        let state = states[id].clone();
        let config = Configuration::new(state.robots.clone())?;
        if config.pattern_formed(&raw_targets)? {
            *outcomes.entry(ExploreOutcome::Success).or_default() += 1;
            goals.push(id);
            continue;
        }
        if nodes[id].depth >= options.depth_limit {
            *outcomes.entry(ExploreOutcome::DepthExceeded).or_default() += 1;
            frontier.push(id);
            continue;
        }
        let mut successors = Vec::new();
        let mut looks = Vec::new();
        for (i, pending) in state.pending.iter().enumerate() {
            let robot = RobotId(i);
            match *pending {
                None => {
                    let snapshot = config.take_snapshot(robot)?;
                    let action = (options.controller)(&snapshot, targets);
                    looks.push(Event { robot, kind: EventKind::Look });
                    if action != Action::stay(state.robots[i].light) {
                        let mut next = state.clone();
                        next.pending[i] = Some(action);
                        successors.push((Event { robot, kind: EventKind::Look }, next));
                    }
                }
                Some(action) => {
                    let event = Event { robot, kind: EventKind::Move };
                    let mut moved = config.clone();
                    match moved.apply_action(robot, action) {
                        Ok(()) => {
                            let mut next = State { robots: moved.robots().to_vec(), pending: state.pending.clone() };
                            next.pending[i] = None;
                            successors.push((event, next));
                        }
                        Err(crate::config::ConfigError::Collision { .. }) => {
                            *outcomes.entry(ExploreOutcome::Collision).or_default() += 1;
                            if failure.is_none() {
                                failure = Some((id, vec![event]));
                            }
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        if successors.is_empty() && state.pending.iter().all(Option::is_none) {
            *outcomes.entry(ExploreOutcome::Deadlock).or_default() += 1;
            deadlocked.push(id);
            if failure.is_none() {
                failure = Some((id, looks));
            }
            continue;
        }
        for (event, next) in successors {
            let next = next.canonical();
            let nid = match index.get(&next) {
                Some(&nid) => nid,
                None => {
                    let nid = states.len();
                    index.insert(next.clone(), nid);
                    states.push(next);
                    nodes.push(Node { parent: Some((id, event)), depth: nodes[id].depth + 1 });
                    preds.push(Vec::new());
                    queue.push_back(nid);
                    nid
                }
            };
            if nid != id {
                preds[nid].push(id);
            }
        }
    }

    // States that can still reach the pattern, or the unexplored horizon.
    let mut alive = vec![false; states.len()];
    let mut stack: Vec<usize> = goals.iter().chain(&frontier).copied().collect();
    for &s in &stack {
        alive[s] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &preds[s] {
            if !alive[p] {
                alive[p] = true;
                stack.push(p);
            }
        }
    }
    let path_to = |mut id: usize| {
        let mut events = Vec::new();
        while let Some((parent, event)) = nodes[id].parent {
            events.push(event);
            id = parent;
        }
        events.reverse();
        events
    };
    for &d in &deadlocked {
        alive[d] = true;
    }
    let livelocked: Vec<usize> = (0..states.len()).filter(|&s| !alive[s]).collect();
    let livelock_states = livelocked.len();
    if livelock_states > 0 {
        *outcomes.entry(ExploreOutcome::Deadlock).or_default() += livelock_states;
        if failure.is_none() {
            failure = Some((livelocked[0], Vec::new()));
        }
    }

    let counterexample = match failure {
        Some((id, tail)) => {
            let mut events = path_to(id);
            events.extend(tail);
            Some(replay_events(initial, targets, &events, options.controller)?)
        }
        None => None,
    };

    let horizon_witness = match frontier.first() {
        Some(&f) => Some(replay_events(initial, targets, &path_to(f), options.controller)?),
        None => None,
    };
    let mut extended = 0;
    for &f in &frontier {
        let path = path_to(f);
        if (0..options.extend_attempts).any(|seed| extend_to_success(initial, targets, &path, options.controller, seed)) {
            extended += 1;
        }
    }

    Ok(ExplorationResult {
        states_visited: states.len(),
        outcomes,
        livelock_states,
        depth_exceeded_extended: extended,
        counterexample,
        horizon_witness,
    })
}

/// Executes `events` from `initial`, stopping at the first collision.
pub fn replay_events(
    initial: &Configuration,
    targets: &TargetPattern,
    events: &[Event],
    controller: Controller,
) -> Result<Vec<TraceRecord>, SimError> {
    let mut world = World::new(initial.clone(), targets)?.with_controller(controller);
    let mut trace = Vec::with_capacity(events.len());
    for &event in events {
        if world.enabled(event.robot) != event {
            return Err(SimError::ReplayMismatch { seq: world.event_counter(), event });
        }
        match world.execute(event) {
            Ok(rec) => trace.push(rec),
            Err(crate::config::ConfigError::Collision { .. }) => break,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(trace)
}

/// Replays `prefix`, then continues under a random fair scheduler.
fn extend_to_success(
    initial: &Configuration,
    targets: &TargetPattern,
    prefix: &[Event],
    controller: Controller,
    seed: u64,
) -> bool {
    let Ok(mut world) = World::new(initial.clone(), targets).map(|w| w.with_controller(controller)) else {
        return false;
    };
    if prefix.iter().any(|&e| world.execute(e).is_err()) {
        return false;
    }
    let mut scheduler = Scheduler::new(SchedulerPolicy::RandomAsync(seed), crate::sim::DEFAULT_FAIRNESS);
    for _ in 0..1_000_000 {
        if world.pattern_formed() {
            return true;
        }
        if world.quiescent() {
            return false;
        }
        let Some(event) = scheduler.pick(&world) else {
            return false;
        };
        if world.execute(event).is_err() {
            return false;
        }
    }
    false
}

/// Final positions and lights after replaying a trace's events.
pub fn replay_final(
    initial: &Configuration,
    targets: &TargetPattern,
    trace: &[TraceRecord],
) -> Result<Vec<(GridPoint, Light)>, SimError> {
    let events: Vec<Event> = trace.iter().map(TraceRecord::event).collect();
    let mut world = World::new(initial.clone(), targets)?;
    for e in events {
        world.execute(e)?;
    }
    Ok(world.config().robots().iter().map(|r| (r.pos, r.light)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Chirality, LocalMove, Snapshot};
    use crate::geometry::visible_set;

    fn p(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    #[test]
    fn brute_visibility_examples() {
        assert_eq!(brute_visibility(&[p(0, 0), p(0, 2), p(0, 4)], 0), vec![1]);
        assert_eq!(brute_visibility(&[p(0, 0), p(2, 1), p(4, 2)], 0), vec![1]);
        assert_eq!(brute_visibility(&[p(0, 0), p(1, 1), p(2, 2), p(2, 0)], 0), vec![1, 3]);
    }

    #[test]
    fn brute_solvability_examples() {
        assert!(!brute_solvability(&[p(0, 0), p(0, 2), p(3, 0), p(3, 2)]));
        assert!(brute_solvability(&[p(0, 0), p(0, 1), p(0, 2), p(1, 1)]));
        assert!(brute_solvability(&[p(0, 0), p(1, 2)]));
    }

    #[test]
    fn oracles_agree_with_fast_versions() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.gen_range(1..12);
            let mut pts: Vec<GridPoint> = Vec::new();
            while pts.len() < k {
                let q = p(rng.gen_range(-6..6), rng.gen_range(-6..6));
                if !pts.contains(&q) {
                    pts.push(q);
                }
            }
            for i in 0..k {
                assert_eq!(visible_set(&pts, i).unwrap(), brute_visibility(&pts, i));
            }
            assert_eq!(crate::config::is_solvable(&pts), brute_solvability(&pts));
        }
    }

    fn instance(pts: &[GridPoint]) -> Configuration {
        Configuration::from_positions(pts, &[]).unwrap()
    }

    #[test]
    fn single_robot_explores_to_success() {
        let t = TargetPattern::order_targets(&[p(0, 0)]).unwrap();
        let r = explore_all_schedules(&instance(&[p(2, 1)]), &t, ExploreOptions::default()).unwrap();
        assert_eq!(r.outcomes.keys().copied().collect::<Vec<_>>(), [ExploreOutcome::Success]);
        assert!(r.counterexample.is_none());
    }

    #[test]
    fn collinear_pair_explores_to_success() {
        // a vertical pair is mirror symmetric about an empty axis, so the
        // solvable collinear pair is horizontal
        let t = TargetPattern::order_targets(&[p(0, 0), p(0, 1)]).unwrap();
        let r = explore_all_schedules(&instance(&[p(0, 0), p(1, 0)]), &t, ExploreOptions::default()).unwrap();
        assert!(r.only_success(), "{r:?}");
        assert_eq!(r.count(ExploreOutcome::DepthExceeded), 0);
    }

    /// Everyone runs right forever.
    fn runaway(_: &Snapshot, _: &TargetPattern) -> Action {
        Action::new(Light::Off, LocalMove::Right)
    }

    /// Everyone waits forever.
    fn idle(s: &Snapshot, _: &TargetPattern) -> Action {
        Action::stay(s.self_light)
    }

    #[test]
    fn broken_controllers_are_caught() {
        let c = instance(&[p(0, 0), p(1, 0)]);
        let t = TargetPattern::order_targets(&[p(0, 0), p(0, 1)]).unwrap();
        let opts = ExploreOptions { depth_limit: 6, controller: runaway, extend_attempts: 0 };
        let r = explore_all_schedules(&c, &t, opts).unwrap();
        assert!(r.count(ExploreOutcome::Collision) > 0);
        let trace = r.counterexample.unwrap();
        // the counterexample ends right before the colliding Move
        let last = trace.last().unwrap();
        assert_eq!(last.kind, EventKind::Look);

        let opts = ExploreOptions { controller: idle, ..ExploreOptions::default() };
        let r = explore_all_schedules(&c, &t, opts).unwrap();
        assert_eq!(r.count(ExploreOutcome::Deadlock), 1);
        assert_eq!(r.counterexample.unwrap().len(), 2);
    }

    #[test]
    fn chirality_does_not_break_exploration() {
        let c = Configuration::from_positions(&[p(0, 0), p(1, 2)], &[Chirality::Negative, Chirality::Positive]).unwrap();
        let t = TargetPattern::order_targets(&[p(0, 0), p(1, 1)]).unwrap();
        let r = explore_all_schedules(&c, &t, ExploreOptions::default()).unwrap();
        assert!(r.only_success(), "{r:?}");
    }
}
