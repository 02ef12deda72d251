//! Fast geometry against the brute-force oracles on random configurations.

use std::collections::HashSet;

use apf_grid::config::is_solvable;
use apf_grid::geometry::{visible_set, GridPoint, HorizontalAxis};
use apf_grid::oracle::{brute_solvability, brute_visibility};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// The implementations under test.
#[derive(Clone, Copy)]
pub struct Geometry {
    pub visibility: fn(&[GridPoint], usize) -> Vec<usize>,
    pub solvable: fn(&[GridPoint]) -> bool,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry { visibility: |pts, i| visible_set(pts, i).unwrap_or_default(), solvable: is_solvable }
    }
}

impl Geometry {
    /// Deliberately wrong visibility: only blockers on a shared row or
    /// column count.
    pub fn mutant() -> Self {
        fn axis_only(pts: &[GridPoint], i: usize) -> Vec<usize> {
            let a = pts[i];
            (0..pts.len())
                .filter(|&j| j != i)
                .filter(|&j| {
                    let b = pts[j];
                    !pts.iter().any(|&c| {
                        (a.x == b.x && c.x == a.x && c.y > a.y.min(b.y) && c.y < a.y.max(b.y))
                            || (a.y == b.y && c.y == a.y && c.x > a.x.min(b.x) && c.x < a.x.max(b.x))
                    })
                })
                .collect()
        }
        Geometry { visibility: axis_only, ..Geometry::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Divergence {
    Visibility { robots: Vec<GridPoint>, observer: usize, fast: Vec<usize>, oracle: Vec<usize> },
    Solvability { robots: Vec<GridPoint>, fast: bool, oracle: bool },
}

fn check(geo: Geometry, pts: &[GridPoint]) -> Option<Divergence> {
    for i in 0..pts.len() {
        let mut fast = (geo.visibility)(pts, i);
        fast.sort_unstable();
        let oracle = brute_visibility(pts, i);
        if fast != oracle {
            return Some(Divergence::Visibility { robots: pts.to_vec(), observer: i, fast, oracle });
        }
    }
    let (fast, oracle) = ((geo.solvable)(pts), brute_solvability(pts));
    (fast != oracle).then(|| Divergence::Solvability { robots: pts.to_vec(), fast, oracle })
}

/// Drops robots one at a time while the divergence persists.
fn shrink(geo: Geometry, mut pts: Vec<GridPoint>) -> Divergence {
    let mut found = check(geo, &pts).expect("shrinking starts from a divergence");
    'outer: loop {
        for i in 0..pts.len() {
            let mut fewer = pts.clone();
            fewer.remove(i);
            if let Some(d) = check(geo, &fewer) {
                pts = fewer;
                found = d;
                continue 'outer;
            }
        }
        return found;
    }
}

/// A random configuration of 1..=`max_robots` robots with coordinates in
/// `[-coord, coord]`. The box size varies so that collinear triples are
/// common, and a quarter of the samples are mirrored about a horizontal axis
/// so that both solvability answers occur.
pub fn random_configuration(rng: &mut impl Rng, max_robots: usize, coord: i64) -> Vec<GridPoint> {
    let k = rng.gen_range(1..=max_robots.max(1));
    let half = rng.gen_range(1..=coord.max(1));
    let mut seen = HashSet::new();
    let mut pts = Vec::new();
    // a box of side 2*half+1 holds at least 9 points
    let k = k.min(((2 * half + 1) * (2 * half + 1)) as usize);
    while pts.len() < k {
        let p = GridPoint::new(rng.gen_range(-half..=half), rng.gen_range(-half..=half));
        if seen.insert(p) {
            pts.push(p);
        }
    }
    if rng.gen_ratio(1, 4) {
        let axis = HorizontalAxis::from_doubled(rng.gen_range(-half..=half));
        let mirrored: Vec<GridPoint> = pts.iter().map(|p| p.reflect(axis)).collect();
        for m in mirrored {
            let inside = m.y.abs() <= coord;
            if inside && pts.len() < max_robots && seen.insert(m) {
                pts.push(m);
            }
        }
    }
    pts
}

/// Checks `count` configurations from `seed`; the first divergence, shrunk.
pub fn run_suite(geo: Geometry, count: u64, seed: u64, max_robots: usize, coord: i64) -> Option<Divergence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let pts = random_configuration(&mut rng, max_robots, coord);
        if check(geo, &pts).is_some() {
            return Some(shrink(geo, pts));
        }
    }
    None
}
