//! The per-robot algorithm: a pure map from a snapshot to an action.
//!
//! Lights mark phases. A visible `leader` or `done` light (or one's own)
//! means pattern formation. Otherwise the robot's own light selects the
//! election phase; an `off` robot tries the first-phase rules and then the
//! second-phase rules, since it takes part in both.

mod pattern;
mod phase1;
mod phase2;
mod phase3;
mod view;

pub use pattern::{PatternError, TargetPattern, EMBED_ROW_OFFSET};
pub use phase3::{agreed_frame, line_move, target_move, AgreedFrame};

use crate::config::{Action, Light, Snapshot};
use view::View;

/// Which algorithm a snapshot is handled by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Election1,
    Election2,
    Formation,
}

/// The phase whose rules apply to `s`. An `off` robot with no election
/// context reports [`Phase::Election1`] and also falls through to the
/// second-phase `off` rules.
pub fn phase_of(s: &Snapshot) -> Phase {
    let late = |l: Light| matches!(l, Light::Leader | Light::Done);
    if late(s.self_light) || s.others.iter().any(|&(_, l)| late(l)) {
        return Phase::Formation;
    }
    match s.self_light {
        Light::Decider | Light::Call | Light::Leader1 => Phase::Election2,
        Light::Off if s.others.iter().any(|&(_, l)| l == Light::Decider) => Phase::Election2,
        _ => Phase::Election1,
    }
}

pub fn compute(s: &Snapshot, targets: &TargetPattern) -> Action {
    let v = View::new(s);
    let action = match phase_of(s) {
        Phase::Formation => phase3::step(&v, targets),
        Phase::Election2 => phase2::step(&v),
        Phase::Election1 if s.self_light == Light::Off => phase1::step(&v).or_else(|| phase2::step(&v)),
        Phase::Election1 => phase1::step(&v),
    };
    action.unwrap_or(Action::stay(s.self_light))
}

/// First election phase alone; waits when no rule fires.
pub fn phase1_step(s: &Snapshot) -> Action {
    phase1::step(&View::new(s)).unwrap_or(Action::stay(s.self_light))
}

/// Second election phase alone; waits when no rule fires.
pub fn phase2_step(s: &Snapshot) -> Action {
    phase2::step(&View::new(s)).unwrap_or(Action::stay(s.self_light))
}

/// Pattern formation alone; waits when no rule fires.
pub fn phase3_step(s: &Snapshot, targets: &TargetPattern) -> Action {
    phase3::step(&View::new(s), targets).unwrap_or(Action::stay(s.self_light))
}
