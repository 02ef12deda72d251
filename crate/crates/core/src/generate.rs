//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

use crate::config::is_solvable;
use crate::geometry::GridPoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("need at least one robot")]
    NoRobots,
    #[error("spread {spread} is smaller than the robot count {robots}")]
    SpreadTooSmall { robots: usize, spread: i64 },
}

/// `k` distinct points of `[0, spread]^2`, resampled until solvable.
pub fn solvable_points(rng: &mut impl Rng, k: usize, spread: i64) -> Result<Vec<GridPoint>, GenerateError> {
    if k == 0 {
        return Err(GenerateError::NoRobots);
    }
    if spread < k as i64 {
        return Err(GenerateError::SpreadTooSmall { robots: k, spread });
    }
    loop {
        let mut seen = HashSet::with_capacity(k);
        let mut pts = Vec::with_capacity(k);
        while pts.len() < k {
            let p = GridPoint::new(rng.gen_range(0..=spread), rng.gen_range(0..=spread));
            if seen.insert(p) {
                pts.push(p);
            }
        }
        if is_solvable(&pts) {
            return Ok(pts);
        }
    }
}

/// A solvable instance and a pattern of the same size, both from `seed`.
pub fn instance(k: usize, spread: i64, seed: u64) -> Result<(Vec<GridPoint>, Vec<GridPoint>), GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let robots = solvable_points(&mut rng, k, spread)?;
    let targets = solvable_points(&mut rng, k, spread)?;
    Ok((robots, targets))
}
