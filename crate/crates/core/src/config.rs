//! Robots, lights, local views and the configuration classifiers.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, reflection_axis, GeometryError, GridPoint};

/// The eight externally visible colours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Light {
    Off,
    Terminal1,
    Symmetric,
    Decider,
    Call,
    Leader1,
    Leader,
    Done,
}

impl Light {
    pub const ALL: [Light; 8] = [
        Light::Off,
        Light::Terminal1,
        Light::Symmetric,
        Light::Decider,
        Light::Call,
        Light::Leader1,
        Light::Leader,
        Light::Done,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Light::Off => "off",
            Light::Terminal1 => "terminal1",
            Light::Symmetric => "symmetric",
            Light::Decider => "decider",
            Light::Call => "call",
            Light::Leader1 => "leader1",
            Light::Leader => "leader",
            Light::Done => "done",
        }
    }
}

impl fmt::Display for Light {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A robot's private sense of "up", as a multiplier on the global y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Chirality {
    #[default]
    Positive,
    Negative,
}

impl Chirality {
    pub fn sign(self) -> i64 {
        match self {
            Chirality::Positive => 1,
            Chirality::Negative => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Chirality::Positive => Chirality::Negative,
            Chirality::Negative => Chirality::Positive,
        }
    }
}

impl TryFrom<i8> for Chirality {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Chirality::Positive),
            -1 => Ok(Chirality::Negative),
            other => Err(format!("chirality must be 1 or -1, got {other}")),
        }
    }
}

impl From<Chirality> for i8 {
    fn from(c: Chirality) -> i8 {
        c.sign() as i8
    }
}

/// Engine-side identity; never handed to the controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RobotId(pub usize);

impl fmt::Display for RobotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Robot {
    pub id: RobotId,
    pub pos: GridPoint,
    pub light: Light,
    pub chirality: Chirality,
}

/// A unit step (or none) expressed in the robot's own frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalMove {
    Up,
    Down,
    Left,
    Right,
    Null,
}

impl LocalMove {
    pub fn delta(self) -> GridPoint {
        match self {
            LocalMove::Up => GridPoint::new(0, 1),
            LocalMove::Down => GridPoint::new(0, -1),
            LocalMove::Left => GridPoint::new(-1, 0),
            LocalMove::Right => GridPoint::new(1, 0),
            LocalMove::Null => GridPoint::ORIGIN,
        }
    }

    /// Vertical step whose sign matches `dy`; `Null` for zero.
    pub fn vertical(dy: i64) -> Self {
        match dy.signum() {
            1 => LocalMove::Up,
            -1 => LocalMove::Down,
            _ => LocalMove::Null,
        }
    }

    pub fn horizontal(dx: i64) -> Self {
        match dx.signum() {
            1 => LocalMove::Right,
            -1 => LocalMove::Left,
            _ => LocalMove::Null,
        }
    }

    /// The same physical step seen from a frame with the opposite y axis.
    pub fn flip_vertical(self) -> Self {
        match self {
            LocalMove::Up => LocalMove::Down,
            LocalMove::Down => LocalMove::Up,
            other => other,
        }
    }
}

/// Result of one Compute: the next light and a step in the local frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub light: Light,
    #[serde(rename = "move")]
    pub mv: LocalMove,
}

impl Action {
    pub fn new(light: Light, mv: LocalMove) -> Self {
        Action { light, mv }
    }

    pub fn stay(light: Light) -> Self {
        Action { light, mv: LocalMove::Null }
    }
}

/// What a robot sees during Look, in its own frame: itself at the origin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub self_light: Light,
    pub others: Vec<(GridPoint, Light)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no robot with id {0}")]
    UnknownRobot(RobotId),
    #[error("collision: {mover} moved onto {target} occupied by {occupant}")]
    Collision {
        mover: RobotId,
        occupant: RobotId,
        target: GridPoint,
    },
    #[error("{robots} robots but {targets} target points")]
    SizeMismatch { robots: usize, targets: usize },
    #[error("chirality list has {got} entries for {robots} robots")]
    ChiralityLength { got: usize, robots: usize },
}

/// Positions and lights of all robots. Positions are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    robots: Vec<Robot>,
}

impl Configuration {
    pub fn new(robots: Vec<Robot>) -> Result<Self, ConfigError> {
        let mut seen = HashSet::with_capacity(robots.len());
        for r in &robots {
            if !seen.insert(r.pos) {
                return Err(GeometryError::DuplicatePosition(r.pos).into());
            }
        }
        Ok(Configuration { robots })
    }

    /// All lights off; chiralities default to positive when the list is empty.
    pub fn from_positions(positions: &[GridPoint], chirality: &[Chirality]) -> Result<Self, ConfigError> {
        if !chirality.is_empty() && chirality.len() != positions.len() {
            return Err(ConfigError::ChiralityLength { got: chirality.len(), robots: positions.len() });
        }
        Configuration::new(
            positions
                .iter()
                .enumerate()
                .map(|(i, &pos)| Robot {
                    id: RobotId(i),
                    pos,
                    light: Light::Off,
                    chirality: chirality.get(i).copied().unwrap_or_default(),
                })
                .collect(),
        )
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn positions(&self) -> Vec<GridPoint> {
        self.robots.iter().map(|r| r.pos).collect()
    }

    pub fn index_of(&self, id: RobotId) -> Result<usize, ConfigError> {
        // ids are dense in every configuration the engine builds
        match self.robots.get(id.0) {
            Some(r) if r.id == id => Ok(id.0),
            _ => self.robots.iter().position(|r| r.id == id).ok_or(ConfigError::UnknownRobot(id)),
        }
    }

    pub fn robot(&self, id: RobotId) -> Result<&Robot, ConfigError> {
        Ok(&self.robots[self.index_of(id)?])
    }

    pub fn count_light(&self, light: Light) -> usize {
        self.robots.iter().filter(|r| r.light == light).count()
    }

    /// Local view of robot `id`: relative positions of the visible robots
    /// with y scaled by the robot's chirality. The list is sorted.
    pub fn take_snapshot(&self, id: RobotId) -> Result<Snapshot, ConfigError> {
        let i = self.index_of(id)?;
        let me = &self.robots[i];
        let positions = self.positions();
        let sign = me.chirality.sign();
        let mut others: Vec<(GridPoint, Light)> = geometry::visible_unchecked(&positions, i)
            .into_iter()
            .map(|j| {
                let d = positions[j] - me.pos;
                (GridPoint::new(d.x, sign * d.y), self.robots[j].light)
            })
            .collect();
        others.sort_unstable();
        Ok(Snapshot { self_light: me.light, others })
    }

    /// Applies light and step atomically. On collision the configuration is
    /// left untouched.
    pub fn apply_action(&mut self, id: RobotId, action: Action) -> Result<(), ConfigError> {
        let i = self.index_of(id)?;
        let me = self.robots[i];
        let d = action.mv.delta();
        let target = GridPoint::new(me.pos.x + d.x, me.pos.y + me.chirality.sign() * d.y);
        if target != me.pos {
            if let Some(other) = self.robots.iter().find(|r| r.pos == target) {
                return Err(ConfigError::Collision { mover: id, occupant: other.id, target });
            }
        }
        let me = &mut self.robots[i];
        me.pos = target;
        me.light = action.light;
        Ok(())
    }

    /// Two deciders alone on their column and rows, with nothing to their
    /// left and an empty upper or lower closed half each; everyone else off.
    pub fn is_stable_configuration(&self) -> bool {
        let deciders: Vec<&Robot> = self.robots.iter().filter(|r| r.light == Light::Decider).collect();
        if deciders.len() != 2 || deciders[0].pos.x != deciders[1].pos.x {
            return false;
        }
        if self.robots.iter().any(|r| r.light != Light::Decider && r.light != Light::Off) {
            return false;
        }
        let col = deciders[0].pos.x;
        deciders.iter().all(|d| {
            let others = || self.robots.iter().filter(move |r| r.id != d.id);
            let line_clear = others().all(|r| r.light == Light::Decider || (r.pos.x != col && r.pos.y != d.pos.y));
            let left_clear = others().all(|r| r.pos.x >= col);
            let upper_clear = others().all(|r| r.pos.y < d.pos.y);
            let lower_clear = others().all(|r| r.pos.y > d.pos.y);
            line_clear && left_clear && (upper_clear || lower_clear)
        })
    }

    /// A single leader, everyone else off, nothing on its row, column or to
    /// its left, and an empty upper or lower open half.
    pub fn is_leader_configuration(&self) -> bool {
        let mut leaders = self.robots.iter().filter(|r| r.light == Light::Leader);
        let (Some(leader), None) = (leaders.next(), leaders.next()) else {
            return false;
        };
        let others: Vec<&Robot> = self.robots.iter().filter(|r| r.id != leader.id).collect();
        others.iter().all(|r| r.light == Light::Off)
            && others.iter().all(|r| r.pos.x > leader.pos.x && r.pos.y != leader.pos.y)
            && (others.iter().all(|r| r.pos.y < leader.pos.y) || others.iter().all(|r| r.pos.y > leader.pos.y))
    }

    /// Whether the pattern is formed: every light is done and the positions
    /// are the targets up to translation and a flip of the y axis (the only
    /// freedom left by an agreement on the x direction alone).
    pub fn pattern_formed(&self, targets: &[GridPoint]) -> Result<bool, ConfigError> {
        if targets.len() != self.robots.len() {
            return Err(ConfigError::SizeMismatch { robots: self.robots.len(), targets: targets.len() });
        }
        if self.robots.iter().any(|r| r.light != Light::Done) {
            return Ok(false);
        }
        Ok(same_shape(&self.positions(), targets))
    }
}

/// Equality of point sets up to translation and vertical reflection.
pub fn same_shape(a: &[GridPoint], b: &[GridPoint]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let canon = |pts: &[GridPoint], sign: i64| {
        let mut v: Vec<GridPoint> = pts.iter().map(|p| GridPoint::new(p.x, sign * p.y)).collect();
        let mx = v.iter().map(|p| p.x).min().unwrap_or(0);
        let my = v.iter().map(|p| p.y).min().unwrap_or(0);
        for p in &mut v {
            *p = GridPoint::new(p.x - mx, p.y - my);
        }
        v.sort_unstable();
        v
    };
    let ca = canon(a, 1);
    ca == canon(b, 1) || ca == canon(b, -1)
}

/// An all-off instance is solvable iff it has no empty horizontal mirror axis.
pub fn is_solvable(positions: &[GridPoint]) -> bool {
    reflection_axis(positions).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> GridPoint {
        GridPoint::new(x, y)
    }

    fn config(layout: &[((i64, i64), Light)]) -> Configuration {
        Configuration::new(
            layout.iter()
                .enumerate()
                .map(|(i, &((x, y), light))| Robot { id: RobotId(i), pos: p(x, y), light, chirality: Chirality::Positive })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn snapshot_flips_y_for_negative_chirality() {
        let mut c = config(&[((0, 0), Light::Off), ((2, 3), Light::Off)]);
        c.robots[0].chirality = Chirality::Negative;
        let s = c.take_snapshot(RobotId(0)).unwrap();
        assert_eq!(s.others, vec![(p(2, -3), Light::Off)]);
    }

    #[test]
    fn snapshot_hides_occluded_robots() {
        let c = config(&[((0, 0), Light::Off), ((0, 1), Light::Call), ((0, 2), Light::Decider)]);
        let s = c.take_snapshot(RobotId(0)).unwrap();
        assert_eq!(s.others, vec![(p(0, 1), Light::Call)]);
        let single = config(&[((4, 4), Light::Done)]);
        assert!(single.take_snapshot(RobotId(0)).unwrap().others.is_empty());
        assert_eq!(c.take_snapshot(RobotId(9)), Err(ConfigError::UnknownRobot(RobotId(9))));
    }

    #[test]
    fn actions_are_detransformed_through_chirality() {
        let mut c = config(&[((3, 3), Light::Off)]);
        c.robots[0].chirality = Chirality::Negative;
        c.apply_action(RobotId(0), Action::new(Light::Off, LocalMove::Up)).unwrap();
        assert_eq!(c.robots()[0].pos, p(3, 2));

        let mut c = config(&[((0, 0), Light::Off)]);
        c.apply_action(RobotId(0), Action::new(Light::Terminal1, LocalMove::Left)).unwrap();
        assert_eq!((c.robots()[0].pos, c.robots()[0].light), (p(-1, 0), Light::Terminal1));
    }

    #[test]
    fn collisions_are_reported_and_leave_state_alone() {
        let mut c = config(&[((0, 0), Light::Off), ((1, 0), Light::Off)]);
        let before = c.clone();
        let err = c.apply_action(RobotId(0), Action::new(Light::Call, LocalMove::Right)).unwrap_err();
        assert_eq!(err, ConfigError::Collision { mover: RobotId(0), occupant: RobotId(1), target: p(1, 0) });
        assert_eq!(c, before);
    }

    #[test]
    fn stable_configurations() {
        let base = [
            ((0, 0), Light::Decider),
            ((0, 6), Light::Decider),
            ((2, 2), Light::Off),
            ((2, 4), Light::Off),
            ((3, 3), Light::Off),
        ];
        assert!(config(&base).is_stable_configuration());
        let mut extra = base.to_vec();
        extra.push(((3, 6), Light::Off));
        assert!(!config(&extra).is_stable_configuration());
        assert!(!config(&base[1..]).is_stable_configuration());
    }

    #[test]
    fn leader_configurations() {
        assert!(config(&[((0, 0), Light::Leader), ((2, 3), Light::Off), ((4, 1), Light::Off)]).is_leader_configuration());
        assert!(!config(&[((0, 0), Light::Leader), ((2, 3), Light::Off), ((4, -1), Light::Off)]).is_leader_configuration());
        assert!(!config(&[((0, 0), Light::Leader), ((2, 3), Light::Leader)]).is_leader_configuration());
        assert!(config(&[((0, 0), Light::Leader)]).is_leader_configuration());
    }

    #[test]
    fn solvability() {
        assert!(!is_solvable(&[p(0, 0), p(0, 2), p(3, 0), p(3, 2)]));
        assert!(is_solvable(&[p(0, 0), p(0, 1), p(0, 2), p(1, 1)]));
        assert!(is_solvable(&[p(0, 0), p(1, 2)]));
    }

    #[test]
    fn pattern_checks() {
        let targets = [p(0, 0), p(1, 2), p(3, 2)];
        let done = config(&[((5, 5), Light::Done), ((6, 7), Light::Done), ((8, 7), Light::Done)]);
        assert!(done.pattern_formed(&targets).unwrap());
        // vertical mirror image also counts
        let mirrored = config(&[((5, 5), Light::Done), ((6, 3), Light::Done), ((8, 3), Light::Done)]);
        assert!(mirrored.pattern_formed(&targets).unwrap());
        let one_off = config(&[((5, 5), Light::Done), ((6, 7), Light::Off), ((8, 7), Light::Done)]);
        assert!(!one_off.pattern_formed(&targets).unwrap());
        let misplaced = config(&[((5, 5), Light::Done), ((6, 7), Light::Done), ((9, 7), Light::Done)]);
        assert!(!misplaced.pattern_formed(&targets).unwrap());
        assert!(done.pattern_formed(&targets[..2]).is_err());
    }
}
