//! Predicates over a robot's local view (self at the origin).
//!
//! Half-plane emptiness and the content of the two neighbouring occupied
//! columns are exact even under occlusion: any blocker of a robot in such a
//! region lies in the same region and is itself visible. Only the robot's own
//! column is partially hidden, and only its two nearest neighbours there are
//! seen.

use crate::config::{Light, Snapshot};
use crate::geometry::{self, GridPoint, HorizontalAxis, Side};

pub(crate) struct View<'a> {
    pub light: Light,
    pub others: &'a [(GridPoint, Light)],
}

impl<'a> View<'a> {
    pub fn new(s: &'a Snapshot) -> Self {
        View { light: s.self_light, others: &s.others }
    }

    pub fn iter(&self) -> impl Iterator<Item = (GridPoint, Light)> + 'a {
        self.others.iter().copied()
    }

    pub fn any_light(&self, light: Light) -> bool {
        self.others.iter().any(|&(_, l)| l == light)
    }

    pub fn all_off(&self) -> bool {
        self.others.iter().all(|&(_, l)| l == Light::Off)
    }

    pub fn column(&self, x: i64) -> impl Iterator<Item = (GridPoint, Light)> + 'a {
        self.iter().filter(move |(p, _)| p.x == x)
    }

    /// x of the nearest occupied column strictly to the left.
    pub fn left_column(&self) -> Option<i64> {
        self.others.iter().map(|(p, _)| p.x).filter(|&x| x < 0).max()
    }

    pub fn right_column(&self) -> Option<i64> {
        self.others.iter().map(|(p, _)| p.x).filter(|&x| x > 0).min()
    }

    pub fn left_lights(&self) -> Vec<(GridPoint, Light)> {
        self.left_column().map(|x| self.column(x).collect()).unwrap_or_default()
    }

    pub fn right_lights(&self) -> Vec<(GridPoint, Light)> {
        self.right_column().map(|x| self.column(x).collect()).unwrap_or_default()
    }

    /// Visible robots on the robot's own vertical line.
    pub fn own_column(&self) -> impl Iterator<Item = (GridPoint, Light)> + 'a {
        self.column(0)
    }

    pub fn own_column_has(&self, light: Light) -> bool {
        self.own_column().any(|(_, l)| l == light)
    }

    pub fn is_singleton(&self) -> bool {
        self.own_column().next().is_none()
    }

    /// No robot above, or none below, on the own column.
    pub fn is_terminal(&self) -> bool {
        !self.own_column().any(|(p, _)| p.y > 0) || !self.own_column().any(|(p, _)| p.y < 0)
    }

    pub fn left_open_empty(&self) -> bool {
        self.others.iter().all(|(p, _)| p.x >= 0)
    }

    pub fn left_closed_empty(&self) -> bool {
        self.others.iter().all(|(p, _)| p.x > 0)
    }

    pub fn upper_closed_empty(&self) -> bool {
        self.others.iter().all(|(p, _)| p.y < 0)
    }

    pub fn lower_closed_empty(&self) -> bool {
        self.others.iter().all(|(p, _)| p.y > 0)
    }

    /// Axis through two marked robots, the first of which may be self.
    pub fn axis(a: GridPoint, b: GridPoint) -> Option<HorizontalAxis> {
        geometry::midline(a, b).ok()
    }

    pub fn occupied_on_axis(&self, x: i64, k: HorizontalAxis) -> Option<Light> {
        let row = k.row()?;
        self.others.iter().find(|(p, _)| p.x == x && p.y == row).map(|&(_, l)| l)
    }

    pub fn positions(&self) -> Vec<GridPoint> {
        self.others.iter().map(|&(p, _)| p).collect()
    }

    /// Symmetry of the right neighbouring column; an empty column is symmetric.
    pub fn right_symmetric(&self, k: HorizontalAxis) -> bool {
        match self.right_column() {
            Some(x) => geometry::line_symmetric(x, &self.positions(), k),
            None => true,
        }
    }

    /// Self lies on the half of the plane matching the lexicographically
    /// larger half of the right neighbouring column.
    pub fn on_dominant_half(&self, k: HorizontalAxis) -> bool {
        let Some(x) = self.right_column() else {
            return false;
        };
        let dominant = geometry::dominant_side(x, &self.positions(), k);
        dominant != Side::None && dominant == k.side_of(0)
    }

    /// Step that takes self away from a robot at `other` on the own column.
    pub fn away_from(other: GridPoint) -> crate::config::LocalMove {
        crate::config::LocalMove::vertical(-other.y.signum())
    }
}
