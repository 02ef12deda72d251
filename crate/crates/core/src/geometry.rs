//! Exact integer lattice geometry.
//!
//! Everything here works on plain integers. Horizontal mirror lines are kept
//! in doubled coordinates so that the midpoint of two grid rows is exact.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("two robots share the grid point {0}")]
    DuplicatePosition(GridPoint),
    #[error("points {0} and {1} are not on the same vertical line")]
    NotSameVertical(GridPoint, GridPoint),
    #[error("a mid line needs two distinct points, got {0} twice")]
    SamePoint(GridPoint),
}

/// A vertex of the infinite grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const ORIGIN: GridPoint = GridPoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }

    /// Mirror image across a horizontal axis.
    pub fn reflect(self, axis: HorizontalAxis) -> Self {
        GridPoint::new(self.x, axis.y2 - self.y)
    }
}

impl From<[i64; 2]> for GridPoint {
    fn from([x, y]: [i64; 2]) -> Self {
        GridPoint { x, y }
    }
}

impl From<GridPoint> for [i64; 2] {
    fn from(p: GridPoint) -> Self {
        [p.x, p.y]
    }
}

impl From<(i64, i64)> for GridPoint {
    fn from((x, y): (i64, i64)) -> Self {
        GridPoint { x, y }
    }
}

impl Add for GridPoint {
    type Output = GridPoint;
    fn add(self, rhs: GridPoint) -> GridPoint {
        GridPoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for GridPoint {
    type Output = GridPoint;
    fn sub(self, rhs: GridPoint) -> GridPoint {
        GridPoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Horizontal line at height `y2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HorizontalAxis {
    pub y2: i64,
}

impl HorizontalAxis {
    pub const fn from_doubled(y2: i64) -> Self {
        HorizontalAxis { y2 }
    }

    pub fn contains_row(self, y: i64) -> bool {
        self.y2 == 2 * y
    }

    pub fn contains(self, p: GridPoint) -> bool {
        self.contains_row(p.y)
    }

    /// Grid row lying on the axis, if the axis is not half-integer.
    pub fn row(self) -> Option<i64> {
        (self.y2 % 2 == 0).then_some(self.y2 / 2)
    }

    /// Which side of the axis row `y` lies on.
    pub fn side_of(self, y: i64) -> Side {
        match (2 * y).cmp(&self.y2) {
            Ordering::Greater => Side::Above,
            Ordering::Less => Side::Below,
            Ordering::Equal => Side::None,
        }
    }

    /// Doubled distance from row `y` to the axis.
    pub fn doubled_distance(self, y: i64) -> i64 {
        (2 * y - self.y2).abs()
    }

    pub fn translate(self, dy: i64) -> Self {
        HorizontalAxis { y2: self.y2 + 2 * dy }
    }
}

/// A half of a vertical line, as split by an axis. `None` is used both for
/// "on the axis" and "neither half dominates".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Above,
    Below,
    None,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Above => Side::Below,
            Side::Below => Side::Above,
            Side::None => Side::None,
        }
    }
}

/// Occupancy bits of one half of a vertical line, read outward from the axis.
///
/// Trailing zeros are never stored, so the derived ordering on the bit vector
/// is the lexicographic order of the infinite zero-padded strings.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaSequence {
    bits: Vec<bool>,
}

impl LambdaSequence {
    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut bits: Vec<bool> = bits.into_iter().collect();
        while bits.last() == Some(&false) {
            bits.pop();
        }
        LambdaSequence { bits }
    }

    /// Sets the `j`-th bit (1-based).
    fn set(&mut self, j: usize) {
        if self.bits.len() < j {
            self.bits.resize(j, false);
        }
        self.bits[j - 1] = true;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// True iff `c` lies on the open segment `(a, b)`.
pub fn strictly_between(a: GridPoint, b: GridPoint, c: GridPoint) -> bool {
    if c == a || c == b {
        return false;
    }
    let (ab, ac) = (b - a, c - a);
    if ab.x * ac.y - ab.y * ac.x != 0 {
        return false;
    }
    c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
}

pub(crate) fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Indices of the robots seen from `positions[i]`.
///
/// Every other robot is bucketed by its primitive direction from the viewer;
/// only the nearest robot of each direction is unobstructed.
pub fn visible_set(positions: &[GridPoint], i: usize) -> Result<Vec<usize>, GeometryError> {
    let mut seen = HashSet::with_capacity(positions.len());
    for p in positions {
        if !seen.insert(*p) {
            return Err(GeometryError::DuplicatePosition(*p));
        }
    }
    Ok(visible_unchecked(positions, i))
}

/// [`visible_set`] without the distinctness check.
pub(crate) fn visible_unchecked(positions: &[GridPoint], i: usize) -> Vec<usize> {
    let origin = positions[i];
    let mut rays: Vec<((i64, i64), i64, usize)> = positions
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, p)| {
            let d = *p - origin;
            let g = gcd(d.x, d.y);
            ((d.x / g, d.y / g), g, j)
        })
        .collect();
    rays.sort_unstable();
    let mut out = Vec::with_capacity(rays.len());
    let mut last = None;
    for (dir, _, j) in rays {
        if last != Some(dir) {
            out.push(j);
            last = Some(dir);
        }
    }
    out.sort_unstable();
    out
}

/// Horizontal line through the midpoint of two points on one vertical line.
pub fn midline(p: GridPoint, q: GridPoint) -> Result<HorizontalAxis, GeometryError> {
    if p.x != q.x {
        return Err(GeometryError::NotSameVertical(p, q));
    }
    if p == q {
        return Err(GeometryError::SamePoint(p));
    }
    Ok(HorizontalAxis::from_doubled(p.y + q.y))
}

/// Occupancy sequences above and below `k` on the given column.
/// A robot sitting exactly on `k` belongs to neither.
pub fn lambda_pair<'a, I>(column: i64, occupied: I, k: HorizontalAxis) -> (LambdaSequence, LambdaSequence)
where
    I: IntoIterator<Item = &'a GridPoint>,
{
    let mut above = LambdaSequence::default();
    let mut below = LambdaSequence::default();
    for p in occupied.into_iter().filter(|p| p.x == column) {
        let d2 = 2 * p.y - k.y2;
        if d2 == 0 {
            continue;
        }
        // odd y2: rows at distance (2j-1)/2, even y2: rows at distance j
        let j = if k.y2 % 2 == 0 { d2.abs() / 2 } else { (d2.abs() + 1) / 2 };
        if d2 > 0 {
            above.set(j as usize);
        } else {
            below.set(j as usize);
        }
    }
    (above, below)
}

pub fn line_symmetric<'a, I>(column: i64, occupied: I, k: HorizontalAxis) -> bool
where
    I: IntoIterator<Item = &'a GridPoint>,
{
    let (above, below) = lambda_pair(column, occupied, k);
    above == below
}

/// The half of the column whose sequence is lexicographically larger.
pub fn dominant_side<'a, I>(column: i64, occupied: I, k: HorizontalAxis) -> Side
where
    I: IntoIterator<Item = &'a GridPoint>,
{
    let (above, below) = lambda_pair(column, occupied, k);
    match above.cmp(&below) {
        Ordering::Greater => Side::Above,
        Ordering::Less => Side::Below,
        Ordering::Equal => Side::None,
    }
}

/// The horizontal mirror axis that makes the instance unsolvable, if any:
/// the point set is symmetric about it and no point lies on it.
pub fn reflection_axis(config: &[GridPoint]) -> Option<HorizontalAxis> {
    let min_y = config.iter().map(|p| p.y).min()?;
    let max_y = config.iter().map(|p| p.y).max()?;
    let axis = HorizontalAxis::from_doubled(min_y + max_y);
    if config.iter().any(|p| axis.contains(*p)) {
        return None;
    }
    let set: HashSet<GridPoint> = config.iter().copied().collect();
    config
        .iter()
        .all(|p| set.contains(&p.reflect(axis)))
        .then_some(axis)
}

/// Smallest enclosing rectangle as (height, width), counted in grid lines.
pub fn enclosing_dims(points: &[GridPoint]) -> (i64, i64) {
    if points.is_empty() {
        return (0, 0);
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = GridPoint::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = GridPoint::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (hi.y - lo.y + 1, hi.x - lo.x + 1)
}
