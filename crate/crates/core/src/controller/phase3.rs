//! Pattern formation from a leader configuration.
//!
//! Robots that see the leader agree on a frame with the leader at `(0, -1)`
//! and the remaining robots above it. They first gather on the leader's row
//! as a compact line `(1,-1) .. (n-1,-1)` and then leave it one by one, from
//! the left end, for the targets `t_0, t_1, ...`. The leader takes the last
//! target once nobody else is pending.

use super::pattern::TargetPattern;
use super::view::View;
use crate::config::{Action, Light, LocalMove};
use crate::geometry::GridPoint;

/// Robots that still have to reach their target. Stray election colours
/// left behind by asynchrony are treated exactly like `off`.
pub(crate) fn pending(light: Light) -> bool {
    !matches!(light, Light::Leader | Light::Done)
}

/// Mapping from a robot's local frame to the agreed frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AgreedFrame {
    /// Position of the observing robot in the agreed frame.
    pub me: GridPoint,
    /// +1 when local up is agreed up, -1 otherwise.
    pub sign: i64,
}

impl AgreedFrame {
    pub fn to_agreed(&self, local: GridPoint) -> GridPoint {
        GridPoint::new(local.x + self.me.x, self.sign * local.y + self.me.y)
    }

    pub fn to_local(&self, mv: LocalMove) -> LocalMove {
        if self.sign < 0 {
            mv.flip_vertical()
        } else {
            mv
        }
    }
}

/// Orientation taken from any visible robot off row `row` (local y), which
/// must lie on the agreed upper side. Falls back to the robot's own up.
fn orientation(v: &View, row: i64, skip_leader: bool) -> i64 {
    v.iter()
        .filter(|&(_, l)| !(skip_leader && l == Light::Leader))
        .map(|(p, _)| p.y - row)
        .find(|&dy| dy != 0)
        .map(i64::signum)
        .unwrap_or(1)
}

/// Derives the agreed frame, if this robot can.
///
/// A robot that sees the leader places it at `(0, -1)`. The leader itself is
/// at `(0, -1)` while anyone is still pending; once only `done` robots are
/// left it locates itself from the lowest row of done robots, which it sees
/// completely from below.
pub fn agreed_frame(s: &crate::config::Snapshot, targets: &TargetPattern) -> Option<AgreedFrame> {
    frame_of(&View::new(s), targets)
}

fn frame_of(v: &View, targets: &TargetPattern) -> Option<AgreedFrame> {
    if v.light == Light::Leader {
        return Some(leader_frame(v, targets));
    }
    let leaders: Vec<GridPoint> = v.iter().filter(|&(_, l)| l == Light::Leader).map(|(p, _)| p).collect();
    let [leader] = leaders[..] else {
        return None;
    };
    let sign = if leader.y != 0 { -leader.y.signum() } else { orientation(v, leader.y, true) };
    Some(AgreedFrame { me: GridPoint::new(-leader.x, -1 - sign * leader.y), sign })
}

fn leader_frame(v: &View, targets: &TargetPattern) -> AgreedFrame {
    let n = targets.len();
    let last = targets.embedded(n - 1);
    if v.iter().any(|(_, l)| pending(l)) {
        return AgreedFrame { me: GridPoint::new(0, -1), sign: orientation(v, 0, false) };
    }
    let done: Vec<GridPoint> = v.iter().filter(|&(_, l)| l == Light::Done).map(|(p, _)| p).collect();
    if done.is_empty() || done.iter().any(|p| p.y == 0) {
        // alone, or standing in a row of finished robots: only t_{n-1} fits
        return AgreedFrame { me: last, sign: orientation(v, 0, false) };
    }
    let sign = orientation(v, 0, false);
    let low = done.iter().map(|p| sign * p.y).min().unwrap_or(0);
    let left = done.iter().filter(|p| sign * p.y == low).map(|p| p.x).min().unwrap_or(0);
    let placed = (0..n - 1).map(|j| targets.embedded(j));
    let target_row = placed.clone().map(|t| t.y).min().unwrap_or(last.y);
    let target_left = placed.filter(|t| t.y == target_row).map(|t| t.x).min().unwrap_or(0);
    AgreedFrame { me: GridPoint::new(target_left - left, target_row - low), sign }
}

/// One step toward `(j, -1)` through `(j, 0)`.
pub fn line_move(j: i64, me: GridPoint) -> LocalMove {
    if me.y != 0 {
        LocalMove::vertical(-me.y)
    } else if me.x != j {
        LocalMove::horizontal(j - me.x)
    } else {
        LocalMove::Down
    }
}

/// One step toward `target` through the row just below it.
pub fn target_move(target: GridPoint, me: GridPoint) -> LocalMove {
    let row = target.y - 1;
    if me.y != row {
        LocalMove::vertical(row - me.y)
    } else if me.x != target.x {
        LocalMove::horizontal(target.x - me.x)
    } else {
        LocalMove::Up
    }
}

fn pending_step(v: &View, targets: &TargetPattern) -> Option<Action> {
    let n = targets.len();
    let snapshot_light = v.light;
    let wait = || (snapshot_light != Light::Off).then(|| Action::stay(Light::Off));
    // a one-point pattern has no pending robots besides the leader
    if n < 2 {
        return wait();
    }
    let Some(frame) = frame_of(v, targets) else {
        return wait();
    };
    let me = frame.me;
    let others: Vec<(GridPoint, Light)> = v.iter().map(|(p, l)| (frame.to_agreed(p), l)).collect();
    let act = |mv: LocalMove| Some(Action::new(Light::Off, frame.to_local(mv)));
    let go_to_target = |j: usize| {
        let t = targets.embedded(j);
        if me == t {
            Some(Action::stay(Light::Done))
        } else {
            act(target_move(t, me))
        }
    };

    let leftmost = !others.iter().any(|(p, _)| p.y == me.y && p.x < me.x);
    let strip_empty = !others.iter().any(|(p, _)| p.y > -1 && p.y < me.y);
    if me.y > -1 && leftmost && strip_empty {
        let mut line: Vec<i64> = others
            .iter()
            .filter(|(p, l)| p.y == -1 && *l != Light::Leader)
            .map(|(p, _)| p.x)
            .collect();
        line.sort_unstable();
        let i = line.len() as i64;
        let nn = n as i64;
        if line.is_empty() {
            // With two robots the line would hold only this robot, so the
            // dispatch starts right away.
            return if others.iter().any(|&(_, l)| l == Light::Done) || n == 2 {
                go_to_target(n - 2)
            } else {
                act(line_move(1, me))
            };
        }
        if line.iter().copied().eq(1..=i) {
            return act(line_move(i + 1, me));
        }
        if line.iter().copied().eq(nn - i..nn) && nn - i - 2 >= 0 {
            return go_to_target((nn - i - 2) as usize);
        }
        return wait();
    }
    if me.y == -1 {
        let leader_on_row = others.iter().any(|&(p, l)| l == Light::Leader && p.y == -1);
        let pending_above = others.iter().any(|&(p, l)| pending(l) && p.y > -1);
        if leader_on_row && !pending_above {
            return act(LocalMove::Up);
        }
    }
    wait()
}

fn leader_step(v: &View, targets: &TargetPattern) -> Option<Action> {
    if v.iter().any(|(_, l)| pending(l)) {
        return None;
    }
    let n = targets.len();
    let frame = leader_frame(v, targets);
    let t = targets.embedded(n - 1);
    if frame.me == t {
        Some(Action::stay(Light::Done))
    } else {
        Some(Action::new(Light::Leader, frame.to_local(target_move(t, frame.me))))
    }
}

pub(crate) fn step(v: &View, targets: &TargetPattern) -> Option<Action> {
    match v.light {
        Light::Done => None,
        Light::Leader => leader_step(v, targets),
        _ => pending_step(v, targets),
    }
}
