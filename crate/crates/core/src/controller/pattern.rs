use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GridPoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("a pattern needs at least one target")]
    Empty,
    #[error("target {0} appears twice")]
    Duplicate(GridPoint),
}

/// Target points normalised to `min x = 0`, `min y = 0` and ordered
/// `t_0 .. t_{n-1}`: higher rows first, right to left within a row.
///
/// In the frame agreed on around the leader (leader at `(0, -1)`) the
/// pattern sits one row higher, see [`TargetPattern::embedded`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetPattern {
    points: Vec<GridPoint>,
}

/// Vertical offset of the pattern in the agreed frame. Row 0 is kept free so
/// that robots can travel along it between the line and the pattern.
pub const EMBED_ROW_OFFSET: i64 = 1;

impl TargetPattern {
    pub fn order_targets(raw: &[GridPoint]) -> Result<Self, PatternError> {
        let min_x = raw.iter().map(|p| p.x).min().ok_or(PatternError::Empty)?;
        let min_y = raw.iter().map(|p| p.y).min().ok_or(PatternError::Empty)?;
        let mut points: Vec<GridPoint> = raw.iter().map(|p| GridPoint::new(p.x - min_x, p.y - min_y)).collect();
        points.sort_unstable_by(|a, b| b.y.cmp(&a.y).then(b.x.cmp(&a.x)));
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(PatternError::Duplicate(GridPoint::new(w[0].x + min_x, w[0].y + min_y)));
        }
        Ok(TargetPattern { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `t_j` in normalised pattern coordinates.
    pub fn get(&self, j: usize) -> GridPoint {
        self.points[j]
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// `t_j` in the frame where the leader starts at `(0, -1)`.
    pub fn embedded(&self, j: usize) -> GridPoint {
        let t = self.points[j];
        GridPoint::new(t.x, t.y + EMBED_ROW_OFFSET)
    }
}
