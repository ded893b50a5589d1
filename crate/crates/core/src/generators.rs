//! Deterministic initial configurations.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GridError;
use crate::grid::{Coord, Swarm, AXIS_DIRS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    SquareRing { side: i64 },
    FilledRect { width: i64, height: i64 },
    Line {
        length: i64,
        #[serde(default = "horizontal")]
        orientation: Orientation,
    },
    Cross { arm: i64 },
    Hourglass { lobe: i64 },
    RandomConnected { n: usize, seed: u64 },
}

fn horizontal() -> Orientation {
    Orientation::Horizontal
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Swarm, GridError> {
        match *self {
            GeneratorSpec::SquareRing { side } => square_ring(side),
            GeneratorSpec::FilledRect { width, height } => filled_rect(width, height),
            GeneratorSpec::Line { length, orientation } => line(length, orientation),
            GeneratorSpec::Cross { arm } => cross(arm),
            GeneratorSpec::Hourglass { lobe } => hourglass(lobe),
            GeneratorSpec::RandomConnected { n, seed } => random_connected(n, seed),
        }
    }

    /// Short label used in summaries.
    pub fn label(&self) -> String {
        match *self {
            GeneratorSpec::SquareRing { side } => format!("square_ring(side={side})"),
            GeneratorSpec::FilledRect { width, height } => format!("filled_rect({width}x{height})"),
            GeneratorSpec::Line { length, orientation } => format!("line({length},{orientation:?})"),
            GeneratorSpec::Cross { arm } => format!("cross(arm={arm})"),
            GeneratorSpec::Hourglass { lobe } => format!("hourglass(lobe={lobe})"),
            GeneratorSpec::RandomConnected { n, seed } => format!("random_connected(n={n},seed={seed})"),
        }
    }
}

fn positive(name: &str, v: i64, min: i64) -> Result<(), GridError> {
    if v < min {
        return Err(GridError::InvalidParameter(format!("{name} must be at least {min}, got {v}")));
    }
    Ok(())
}

fn swarm(cells: impl IntoIterator<Item = Coord>) -> Result<Swarm, GridError> {
    Swarm::new(cells)
}

/// Hollow axis-parallel square with `4 (side - 1)` robots.
pub fn square_ring(side: i64) -> Result<Swarm, GridError> {
    positive("side", side, 3)?;
    let cells = (0..side)
        .flat_map(|y| (0..side).map(move |x| Coord::new(x, y)))
        .filter(|c| c.x == 0 || c.y == 0 || c.x == side - 1 || c.y == side - 1);
    swarm(cells)
}

pub fn filled_rect(width: i64, height: i64) -> Result<Swarm, GridError> {
    positive("width", width, 1)?;
    positive("height", height, 1)?;
    swarm((0..height).flat_map(|y| (0..width).map(move |x| Coord::new(x, y))))
}

pub fn line(length: i64, orientation: Orientation) -> Result<Swarm, GridError> {
    positive("length", length, 1)?;
    swarm((0..length).map(|i| match orientation {
        Orientation::Horizontal => Coord::new(i, 0),
        Orientation::Vertical => Coord::new(0, i),
    }))
}

/// Plus shape with arms of length `arm` around a centre robot.
pub fn cross(arm: i64) -> Result<Swarm, GridError> {
    positive("arm", arm, 1)?;
    let horizontal = (-arm..=arm).map(|x| Coord::new(x, 0));
    let vertical = (-arm..=arm).map(|y| Coord::new(0, y));
    swarm(horizontal.chain(vertical))
}

/// Two `lobe × lobe` blocks touching through a single-robot neck: the top
/// block's lower-right robot sits directly left of the neck and the bottom
/// block's upper-left robot directly right of it.
pub fn hourglass(lobe: i64) -> Result<Swarm, GridError> {
    positive("lobe", lobe, 2)?;
    let top = (0..lobe).flat_map(|y| (0..lobe).map(move |x| Coord::new(x, y)));
    let neck = Coord::new(lobe, lobe - 1);
    let bottom = (0..lobe).flat_map(|y| (0..lobe).map(move |x| Coord::new(lobe + 1 + x, lobe - 1 + y)));
    swarm(top.chain(std::iter::once(neck)).chain(bottom))
}

/// Grows `n` robots from the origin, each time occupying a uniformly chosen
/// empty 4-neighbour of the current swarm.
pub fn random_connected(n: usize, seed: u64) -> Result<Swarm, GridError> {
    if n == 0 {
        return Err(GridError::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = BTreeSet::from([Coord::ORIGIN]);
    let mut frontier: BTreeSet<Coord> = AXIS_DIRS.into_iter().collect();
    while cells.len() < n {
        let pick = rng.gen_range(0..frontier.len());
        let c = *frontier.iter().nth(pick).expect("frontier is nonempty");
        frontier.remove(&c);
        cells.insert(c);
        for d in AXIS_DIRS {
            if !cells.contains(&(c + d)) {
                frontier.insert(c + d);
            }
        }
    }
    swarm(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::trace_outer_boundary;

    #[test]
    fn ring_counts() {
        assert_eq!(square_ring(3).unwrap().len(), 8);
        assert_eq!(square_ring(10).unwrap().len(), 36);
        assert!(square_ring(2).is_err());
    }

    #[test]
    fn shapes() {
        assert_eq!(line(5, Orientation::Horizontal).unwrap().len(), 5);
        assert_eq!(filled_rect(3, 3).unwrap().len(), 9);
        assert!(filled_rect(0, 3).is_err());
        let c = cross(2).unwrap();
        assert_eq!(c.len(), 9);
        assert_eq!(trace_outer_boundary(&c).visits(Coord::ORIGIN), 4);
        let h = hourglass(3).unwrap();
        assert_eq!(h.len(), 19);
        assert_eq!(trace_outer_boundary(&h).visits(Coord::new(3, 2)), 2);
    }

    #[test]
    fn random_is_deterministic_and_connected() {
        assert_eq!(random_connected(1, 9).unwrap().len(), 1);
        let a = random_connected(150, 42).unwrap();
        assert_eq!(a.len(), 150);
        assert!(a.is_connected().unwrap());
        assert_eq!(a, random_connected(150, 42).unwrap());
        assert_ne!(a, random_connected(150, 43).unwrap());
    }
}
