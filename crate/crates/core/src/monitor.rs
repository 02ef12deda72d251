//! Trace monitors for the election milestones and the leader1 safety
//! properties. Feed every event with the world as it is after the event.

use serde::{Deserialize, Serialize};

use crate::config::{Configuration, Light, Robot, RobotId};
use crate::sim::{EventKind, TraceRecord, World};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorReport {
    /// First event after which the configuration was stable or had exactly
    /// one leader1.
    pub election_milestone: Option<u64>,
    /// First event after which the configuration was a leader configuration.
    pub leader_configuration: Option<u64>,
    /// decider→leader1 transitions with another robot in the left closed half.
    pub decider_violations: Vec<u64>,
    /// Events breaking the two-leader1 rules.
    pub leader1_pair_violations: Vec<u64>,
}

impl MonitorReport {
    pub fn milestones_in_order(&self) -> bool {
        matches!((self.election_milestone, self.leader_configuration), (Some(a), Some(b)) if a <= b)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Monitors {
    report: MonitorReport,
    /// Current pair of leader1 robots, left one first.
    pair: Option<(RobotId, RobotId)>,
}

impl Monitors {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, world: &World, rec: &TraceRecord) {
        if rec.kind != EventKind::Move {
            return;
        }
        let config = world.config();
        let r = &mut self.report;
        if r.election_milestone.is_none()
            && (config.count_light(Light::Leader1) == 1 || config.is_stable_configuration())
        {
            r.election_milestone = Some(rec.seq);
        }
        if r.leader_configuration.is_none() && config.is_leader_configuration() {
            r.leader_configuration = Some(rec.seq);
        }
        if rec.light_before == Light::Decider && rec.light_after == Light::Leader1 && !left_clear(config, rec.robot) {
            r.decider_violations.push(rec.seq);
        }
        self.check_pair(config, rec);
    }

    fn check_pair(&mut self, config: &Configuration, rec: &TraceRecord) {
        let leaders: Vec<&Robot> = config.robots().iter().filter(|r| r.light == Light::Leader1).collect();
        if let Some((left, right)) = self.pair {
            let ended = leaders.len() < 2;
            let right_turned_off = rec.robot == right
                && rec.light_before == Light::Leader1
                && rec.light_after == Light::Off
                && rec.pos_before == rec.pos_after;
            let moved = (rec.robot == left || rec.robot == right) && rec.pos_before != rec.pos_after;
            if (ended && !right_turned_off) || moved {
                self.report.leader1_pair_violations.push(rec.seq);
            }
        }
        self.pair = None;
        match leaders[..] {
            [a, b] => {
                let (l, r) = if a.pos.x <= b.pos.x { (a, b) } else { (b, a) };
                let between = config.robots().iter().any(|o| o.pos.x > l.pos.x && o.pos.x < r.pos.x);
                if l.pos.x == r.pos.x || between {
                    self.report.leader1_pair_violations.push(rec.seq);
                }
                self.pair = Some((l.id, r.id));
            }
            [_, _, _, ..] => self.report.leader1_pair_violations.push(rec.seq),
            _ => {}
        }
    }

    pub fn report(&self) -> &MonitorReport {
        &self.report
    }

    pub fn into_report(self) -> MonitorReport {
        self.report
    }
}

/// No robot in the left closed half of `id` except deciders on its column.
fn left_clear(config: &Configuration, id: RobotId) -> bool {
    let Ok(me) = config.robot(id) else {
        return false;
    };
    config
        .robots()
        .iter()
        .filter(|r| r.id != id && r.pos.x <= me.pos.x)
        .all(|r| r.pos.x == me.pos.x && r.light == Light::Decider)
}
