//! Progress measures: outer boundary length, convex vertices and enclosed
//! area, plus the per-round verdict the lemma monitor checks.
//!
//! The outer contour is the boundary between the swarm and the exterior,
//! where the exterior is the 4-connected component of empty cells that
//! reaches infinity. The contour is followed counter-clockwise (as drawn on
//! screen) with the swarm on the walker's left. Each unit edge belongs to
//! one robot; consecutive edges meet in a straight continuation, a convex
//! (+90°) turn or a concave (-90°) turn.
//!
//! The boundary walk steps from robot to robot along the contour:
//!
//! * straight continuation: one step to the next robot;
//! * convex turn: same robot, no step;
//! * concave turn: two steps through the corner robot. When that corner cell
//!   is an enclosed hole (a pinch) the walker turns on the spot instead, so
//!   the robot before the pinch is counted twice.
//!
//! Cross centres and hourglass necks are therefore visited once per pass.
//! The length is the perimeter of the swarm with its holes filled, minus 4,
//! so a 1×k line has length 2k − 2. A lone robot has length 1 by convention.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::grid::{Coord, DenseGrid, Occupancy, Swarm, AXIS_DIRS, DIAGONAL_DIRS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    /// Robots in walk order; the walk closes back onto `steps[0]`.
    pub steps: Vec<Coord>,
    pub length: u64,
    pub distinct_robots: u64,
    pub convex_turns: u64,
    pub concave_turns: u64,
}

impl BoundaryTrace {
    /// Net turning over the closed walk, in degrees.
    pub fn total_turning(&self) -> i64 {
        90 * (self.convex_turns as i64 - self.concave_turns as i64)
    }

    pub fn visits(&self, c: Coord) -> usize {
        self.steps.iter().filter(|&&s| s == c).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProgressMeasures {
    pub boundary_len: u64,
    pub convex_count: u64,
    pub convex_measure: u64,
    pub area: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressVerdict {
    pub boundary_progress: bool,
    pub convex_progress: bool,
    pub area_delta: i64,
    pub lemma_ok: bool,
}

/// Exterior cells inside the bounding box padded by one. Everything outside
/// that box is exterior as well.
pub(crate) struct Exterior {
    origin: Coord,
    width: i64,
    height: i64,
    outside: Vec<bool>,
}

impl Exterior {
    pub(crate) fn of<O: Occupancy>(occ: &O, lo: Coord, hi: Coord) -> Self {
        let origin = Coord::new(lo.x - 1, lo.y - 1);
        let width = hi.x - lo.x + 3;
        let height = hi.y - lo.y + 3;
        let mut outside = vec![false; (width * height) as usize];
        let mut queue = VecDeque::from([origin]);
        outside[0] = true;
        while let Some(c) = queue.pop_front() {
            for d in AXIS_DIRS {
                let n = c + d;
                let p = n - origin;
                if p.x < 0 || p.y < 0 || p.x >= width || p.y >= height {
                    continue;
                }
                let idx = (p.y * width + p.x) as usize;
                if !outside[idx] && !occ.occupied(n) {
                    outside[idx] = true;
                    queue.push_back(n);
                }
            }
        }
        Exterior { origin, width, height, outside }
    }

    pub(crate) fn contains(&self, c: Coord) -> bool {
        let p = c - self.origin;
        if p.x < 0 || p.y < 0 || p.x >= self.width || p.y >= self.height {
            return true;
        }
        self.outside[(p.y * self.width + p.x) as usize]
    }

    fn outside_count(&self) -> u64 {
        self.outside.iter().filter(|&&b| b).count() as u64
    }

    fn box_cells(&self) -> u64 {
        (self.width * self.height) as u64
    }
}

/// Robots with at least one empty cell among their eight neighbours.
pub fn boundary_robots(s: &Swarm) -> HashSet<Coord> {
    s.iter()
        .filter(|&c| {
            AXIS_DIRS
                .iter()
                .chain(DIAGONAL_DIRS.iter())
                .any(|&d| !s.contains(c + d))
        })
        .collect()
}

/// Walk direction along an edge whose exterior side is `side`, keeping the
/// swarm on the left.
fn walk_dir(side: Coord) -> Coord {
    Coord::new(side.y, -side.x)
}

/// Follows the outer contour once around.
pub fn trace_outer_boundary(s: &Swarm) -> BoundaryTrace {
    let Some((lo, hi)) = s.bounds() else {
        return BoundaryTrace {
            steps: Vec::new(),
            length: 0,
            distinct_robots: 0,
            convex_turns: 0,
            concave_turns: 0,
        };
    };
    let grid = DenseGrid::new(s, 1);
    trace_with(&grid, s, lo, hi)
}

fn trace_with(grid: &DenseGrid, s: &Swarm, lo: Coord, hi: Coord) -> BoundaryTrace {
    let exterior = Exterior::of(grid, lo, hi);
    // Topmost row, leftmost cell: its upper side is always exterior.
    let start_cell = s
        .iter()
        .min_by_key(|c| (c.y, c.x))
        .expect("nonempty swarm");
    let start = (start_cell, Coord::new(0, -1));

    let mut steps = vec![start_cell];
    let mut convex = 0u64;
    let mut concave = 0u64;
    let (mut cell, mut side) = start;
    loop {
        let w = walk_dir(side);
        let ahead = cell + w;
        let diag = ahead + side;
        let next;
        if grid.occupied(diag) {
            concave += 1;
            steps.push(if grid.occupied(ahead) { ahead } else { cell });
            steps.push(diag);
            next = (diag, -w);
        } else if grid.occupied(ahead) {
            steps.push(ahead);
            next = (ahead, side);
        } else {
            convex += 1;
            next = (cell, w);
        }
        debug_assert!(exterior.contains(next.0 + next.1));
        (cell, side) = next;
        if (cell, side) == start {
            break;
        }
    }
    // The walk is closed: drop the final return onto the start robot.
    if steps.len() > 1 && steps.last() == Some(&start_cell) {
        steps.pop();
    }
    let length = if s.len() == 1 { 1 } else { steps.len() as u64 };
    let distinct: HashSet<Coord> = steps.iter().copied().collect();
    BoundaryTrace {
        steps,
        length,
        distinct_robots: distinct.len() as u64,
        convex_turns: convex,
        concave_turns: concave,
    }
}

/// Number of convex (+90°) vertices on the outer contour of the union of
/// the robots' unit squares.
pub fn count_convex_vertices(s: &Swarm) -> u64 {
    trace_outer_boundary(s).convex_turns
}

/// Outer-boundary robots plus inside cells, occupied or empty. Equivalently,
/// every cell not reachable from infinity through 4-connected empty cells.
pub fn area(s: &Swarm) -> u64 {
    let Some((lo, hi)) = s.bounds() else {
        return 0;
    };
    let grid = DenseGrid::new(s, 1);
    let exterior = Exterior::of(&grid, lo, hi);
    exterior.box_cells() - exterior.outside_count()
}

pub fn measures(s: &Swarm) -> ProgressMeasures {
    let Some((lo, hi)) = s.bounds() else {
        return ProgressMeasures { boundary_len: 0, convex_count: 0, convex_measure: 0, area: 0 };
    };
    let grid = DenseGrid::new(s, 1);
    let trace = trace_with(&grid, s, lo, hi);
    let exterior = Exterior::of(&grid, lo, hi);
    let area = exterior.box_cells() - exterior.outside_count();
    ProgressMeasures {
        boundary_len: trace.length,
        convex_count: trace.convex_turns,
        convex_measure: 4 * trace.length - trace.convex_turns,
        area,
    }
}

pub fn check_round_progress(before: &ProgressMeasures, after: &ProgressMeasures) -> ProgressVerdict {
    let boundary_progress = after.boundary_len < before.boundary_len;
    let convex_progress = after.convex_measure < before.convex_measure;
    let area_delta = after.area as i64 - before.area as i64;
    let lemma_ok = after.boundary_len <= before.boundary_len
        && after.convex_measure <= before.convex_measure
        && (boundary_progress || convex_progress || area_delta <= -8);
    ProgressVerdict { boundary_progress, convex_progress, area_delta, lemma_ok }
}
