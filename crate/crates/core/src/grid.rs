//! Grid coordinates, swarms, the eight grid symmetries and local snapshots.
//!
//! Screen convention throughout: `x` grows to the right, `y` grows downward,
//! so row 0 of a text map is its top line.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GridError;

/// Viewing radius of every robot, in L1 distance.
pub const VIEW_RADIUS: i64 = 7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coord {
    pub x: i64,
    pub y: i64,
}

impl Coord {
    pub const ORIGIN: Coord = Coord { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Coord { x, y }
    }

    pub fn l1_norm(self) -> i64 {
        self.x.abs() + self.y.abs()
    }

    /// True for the 8 king-move offsets.
    pub fn is_king_move(self) -> bool {
        self != Coord::ORIGIN && self.x.abs() <= 1 && self.y.abs() <= 1
    }

    pub fn is_axis_unit(self) -> bool {
        self.l1_norm() == 1
    }

    pub fn is_diagonal_unit(self) -> bool {
        self.x.abs() == 1 && self.y.abs() == 1
    }
}

impl Add for Coord {
    type Output = Coord;
    fn add(self, o: Coord) -> Coord {
        Coord::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Coord {
    type Output = Coord;
    fn sub(self, o: Coord) -> Coord {
        Coord::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        Coord::new(-self.x, -self.y)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn l1_distance(a: Coord, b: Coord) -> i64 {
    (a - b).l1_norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Axis neighbours in the order E, W, N, S.
pub const AXIS_DIRS: [Coord; 4] = [
    Coord::new(1, 0),
    Coord::new(-1, 0),
    Coord::new(0, -1),
    Coord::new(0, 1),
];

/// Diagonal neighbours in the order NE, NW, SE, SW.
pub const DIAGONAL_DIRS: [Coord; 4] = [
    Coord::new(1, -1),
    Coord::new(-1, -1),
    Coord::new(1, 1),
    Coord::new(-1, 1),
];

/// Neighbours of `c`: E, W, N, S, then (for eight) NE, NW, SE, SW.
pub fn neighbors(c: Coord, mode: Connectivity) -> Vec<Coord> {
    let mut out: Vec<Coord> = AXIS_DIRS.iter().map(|&d| c + d).collect();
    if mode == Connectivity::Eight {
        out.extend(DIAGONAL_DIRS.iter().map(|&d| c + d));
    }
    out
}

/// An element of the dihedral group of the square: rotate by
/// `quarter_turns * 90°` (mapping `(1,0)` to `(0,1)` per quarter turn),
/// then optionally mirror `x -> -x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transform {
    pub quarter_turns: u8,
    pub mirrored: bool,
}

impl Transform {
    pub const IDENTITY: Transform = Transform { quarter_turns: 0, mirrored: false };

    /// Reflection across the main diagonal, `(x, y) -> (y, x)`.
    pub const DIAGONAL_MIRROR: Transform = Transform { quarter_turns: 1, mirrored: true };

    pub fn new(quarter_turns: u8, mirrored: bool) -> Self {
        Transform { quarter_turns: quarter_turns % 4, mirrored }
    }

    /// All eight transforms, rotations first.
    pub fn all() -> [Transform; 8] {
        let mut out = [Transform::IDENTITY; 8];
        for (i, t) in out.iter_mut().enumerate() {
            *t = Transform::new((i % 4) as u8, i >= 4);
        }
        out
    }

    pub fn apply(self, o: Coord) -> Coord {
        let r = match self.quarter_turns % 4 {
            0 => o,
            1 => Coord::new(-o.y, o.x),
            2 => Coord::new(-o.x, -o.y),
            _ => Coord::new(o.y, -o.x),
        };
        if self.mirrored {
            Coord::new(-r.x, r.y)
        } else {
            r
        }
    }

    /// `self.then(next)` applies `self` first, then `next`.
    pub fn then(self, next: Transform) -> Transform {
        let ex = next.apply(self.apply(Coord::new(1, 0)));
        let ey = next.apply(self.apply(Coord::new(0, 1)));
        Transform::all()
            .into_iter()
            .find(|t| t.apply(Coord::new(1, 0)) == ex && t.apply(Coord::new(0, 1)) == ey)
            .expect("dihedral group is closed under composition")
    }

    pub fn inverse(self) -> Transform {
        Transform::all()
            .into_iter()
            .find(|t| self.then(*t) == Transform::IDENTITY)
            .expect("every group element has an inverse")
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rot{}", u32::from(self.quarter_turns) * 90)?;
        if self.mirrored {
            write!(f, "+mirror")?;
        }
        Ok(())
    }
}

/// A nonempty, 4-connected set of occupied cells. Robots carry no identity;
/// two robots on one cell are one robot.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Swarm {
    cells: BTreeSet<Coord>,
}

impl Swarm {
    /// Builds a swarm, rejecting empty or disconnected inputs.
    pub fn new<I: IntoIterator<Item = Coord>>(cells: I) -> Result<Self, GridError> {
        let swarm = Swarm::from_cells_unchecked(cells);
        if swarm.cells.is_empty() {
            return Err(GridError::Empty);
        }
        if !swarm.is_connected()? {
            return Err(GridError::Disconnected);
        }
        Ok(swarm)
    }

    /// Builds a cell set without checking the swarm invariants. Used for
    /// intermediate configurations and for reporting broken ones.
    pub fn from_cells_unchecked<I: IntoIterator<Item = Coord>>(cells: I) -> Self {
        Swarm { cells: cells.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.cells.contains(&c)
    }

    /// Cells in `(x, y)` lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Coord> + '_ {
        self.cells.iter().copied()
    }

    pub fn cells(&self) -> &BTreeSet<Coord> {
        &self.cells
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounds(&self) -> Option<(Coord, Coord)> {
        let mut it = self.cells.iter();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first, first);
        for c in it {
            lo.x = lo.x.min(c.x);
            lo.y = lo.y.min(c.y);
            hi.x = hi.x.max(c.x);
            hi.y = hi.y.max(c.y);
        }
        Some((lo, hi))
    }

    pub fn translated(&self, v: Coord) -> Swarm {
        Swarm::from_cells_unchecked(self.cells.iter().map(|&c| c + v))
    }

    /// Translates so the bounding box starts at the origin.
    pub fn normalized(&self) -> Swarm {
        match self.bounds() {
            Some((lo, _)) => self.translated(-lo),
            None => self.clone(),
        }
    }

    pub fn is_connected(&self) -> Result<bool, GridError> {
        is_connected(self)
    }
}

/// True iff the occupied cells form one 4-connected component.
pub fn is_connected(s: &Swarm) -> Result<bool, GridError> {
    let Some(&start) = s.cells.iter().next() else {
        return Err(GridError::Empty);
    };
    let mut seen = HashSet::with_capacity(s.len());
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(c) = queue.pop_front() {
        for d in AXIS_DIRS {
            let n = c + d;
            if s.contains(n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    Ok(seen.len() == s.len())
}

const SNAP_SIDE: usize = (2 * VIEW_RADIUS + 1) as usize;

/// What one robot sees: the occupied cells within L1 distance 7, relative
/// to itself.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Snapshot {
    bits: [u16; SNAP_SIDE],
}

impl Snapshot {
    /// A snapshot containing only the observer.
    pub fn lone() -> Self {
        let mut s = Snapshot { bits: [0; SNAP_SIDE] };
        s.set(Coord::ORIGIN);
        s
    }

    /// Builds a snapshot from relative offsets; offsets outside the viewing
    /// range are dropped. The origin is always included.
    pub fn from_offsets<I: IntoIterator<Item = Coord>>(offsets: I) -> Self {
        let mut s = Snapshot::lone();
        for o in offsets {
            if o.l1_norm() <= VIEW_RADIUS {
                s.set(o);
            }
        }
        s
    }

    fn set(&mut self, o: Coord) {
        let row = (o.y + VIEW_RADIUS) as usize;
        let col = (o.x + VIEW_RADIUS) as u32;
        self.bits[row] |= 1 << col;
    }

    /// Whether offset `o` is occupied; always false outside the range.
    pub fn occupied(&self, o: Coord) -> bool {
        if o.l1_norm() > VIEW_RADIUS {
            return false;
        }
        let row = (o.y + VIEW_RADIUS) as usize;
        let col = (o.x + VIEW_RADIUS) as u32;
        self.bits[row] & (1 << col) != 0
    }

    pub fn offsets(&self) -> Vec<Coord> {
        let mut out = Vec::new();
        for y in -VIEW_RADIUS..=VIEW_RADIUS {
            for x in -VIEW_RADIUS..=VIEW_RADIUS {
                let o = Coord::new(x, y);
                if self.occupied(o) {
                    out.push(o);
                }
            }
        }
        out
    }

    pub fn transformed(&self, t: Transform) -> Snapshot {
        Snapshot::from_offsets(self.offsets().into_iter().map(|o| t.apply(o)))
    }
}

impl fmt::Debug for Snapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Snapshot:")?;
        for y in -VIEW_RADIUS..=VIEW_RADIUS {
            for x in -VIEW_RADIUS..=VIEW_RADIUS {
                let o = Coord::new(x, y);
                let ch = if o.l1_norm() > VIEW_RADIUS {
                    ' '
                } else if o == Coord::ORIGIN {
                    '@'
                } else if self.occupied(o) {
                    '#'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Anything that can answer "is this cell occupied".
pub trait Occupancy {
    fn occupied(&self, c: Coord) -> bool;
}

impl Occupancy for Swarm {
    fn occupied(&self, c: Coord) -> bool {
        self.contains(c)
    }
}

impl Occupancy for HashSet<Coord> {
    fn occupied(&self, c: Coord) -> bool {
        self.contains(&c)
    }
}

/// Dense occupancy bitmap over a (padded) bounding box, for hot loops.
pub struct DenseGrid {
    origin: Coord,
    width: i64,
    height: i64,
    cells: Vec<bool>,
}

impl DenseGrid {
    pub fn new(s: &Swarm, pad: i64) -> Self {
        let (lo, hi) = s.bounds().unwrap_or((Coord::ORIGIN, Coord::ORIGIN));
        let origin = Coord::new(lo.x - pad, lo.y - pad);
        let width = hi.x - lo.x + 1 + 2 * pad;
        let height = hi.y - lo.y + 1 + 2 * pad;
        let mut cells = vec![false; (width * height) as usize];
        for c in s.iter() {
            let p = c - origin;
            cells[(p.y * width + p.x) as usize] = true;
        }
        DenseGrid { origin, width, height, cells }
    }
}

impl Occupancy for DenseGrid {
    fn occupied(&self, c: Coord) -> bool {
        let p = c - self.origin;
        if p.x < 0 || p.y < 0 || p.x >= self.width || p.y >= self.height {
            return false;
        }
        self.cells[(p.y * self.width + p.x) as usize]
    }
}

/// Snapshot taken by the robot at `center`.
pub fn snapshot(s: &Swarm, center: Coord) -> Result<Snapshot, GridError> {
    if !s.contains(center) {
        return Err(GridError::UnoccupiedCenter(center));
    }
    Ok(snapshot_of(s, center))
}

/// Snapshot without the occupancy precondition check.
pub fn snapshot_of<O: Occupancy>(occ: &O, center: Coord) -> Snapshot {
    let mut snap = Snapshot { bits: [0; SNAP_SIDE] };
    for y in -VIEW_RADIUS..=VIEW_RADIUS {
        let span = VIEW_RADIUS - y.abs();
        for x in -span..=span {
            let o = Coord::new(x, y);
            if occ.occupied(center + o) {
                snap.set(o);
            }
        }
    }
    snap.set(Coord::ORIGIN);
    snap
}

pub fn apply_transform(o: Coord, t: Transform) -> Coord {
    t.apply(o)
}

/// Parses the text-map format: `#` is a robot, `.` an empty cell; row 0 is
/// the top line. Blank lines are ignored.
pub fn parse_map(text: &str) -> Result<Swarm, GridError> {
    let mut cells = Vec::new();
    let mut row = 0i64;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        for (x, ch) in line.chars().enumerate() {
            match ch {
                '#' => cells.push(Coord::new(x as i64, row)),
                '.' => {}
                other => {
                    return Err(GridError::Parse(format!(
                        "line {}: unexpected character {other:?}",
                        line_no + 1
                    )))
                }
            }
        }
        row += 1;
    }
    Swarm::new(cells)
}

/// Renders the bounding box of `s` as a text map, one line per row.
pub fn render_map(s: &Swarm) -> String {
    let Some((lo, hi)) = s.bounds() else {
        return String::new();
    };
    let mut out = String::new();
    for y in lo.y..=hi.y {
        for x in lo.x..=hi.x {
            out.push(if s.contains(Coord::new(x, y)) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

/// Parses the JSON format: an array of `[x, y]` pairs.
pub fn parse_json(text: &str) -> Result<Swarm, GridError> {
    let pairs: Vec<[i64; 2]> =
        serde_json::from_str(text).map_err(|e| GridError::Parse(e.to_string()))?;
    Swarm::new(pairs.into_iter().map(|[x, y]| Coord::new(x, y)))
}

pub fn to_json(s: &Swarm) -> String {
    let pairs: Vec<[i64; 2]> = s.iter().map(|c| [c.x, c.y]).collect();
    serde_json::to_string(&pairs).expect("plain integer pairs serialize")
}

/// Reads either format, deciding by the first non-blank character.
pub fn parse_swarm(text: &str) -> Result<Swarm, GridError> {
    match text.trim_start().chars().next() {
        Some('[') => parse_json(text),
        _ => parse_map(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: i64, y: i64) -> Coord {
        Coord::new(x, y)
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_distance(c(0, 0), c(0, 0)), 0);
        assert_eq!(l1_distance(c(0, 0), c(3, 4)), 7);
        assert_eq!(l1_distance(c(-2, 5), c(1, 1)), 7);
    }

    #[test]
    fn neighbor_order() {
        assert_eq!(
            neighbors(c(0, 0), Connectivity::Four),
            vec![c(1, 0), c(-1, 0), c(0, -1), c(0, 1)]
        );
        let eight = neighbors(c(0, 0), Connectivity::Eight);
        assert_eq!(eight.len(), 8);
        assert!(eight.iter().all(|n| n.x.abs().max(n.y.abs()) == 1));
        let shifted = neighbors(c(5, -3), Connectivity::Four);
        assert_eq!(shifted, vec![c(6, -3), c(4, -3), c(5, -4), c(5, -2)]);
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&Swarm::from_cells_unchecked([c(0, 0)])).unwrap());
        assert!(!is_connected(&Swarm::from_cells_unchecked([c(0, 0), c(1, 1)])).unwrap());
        assert!(is_connected(&Swarm::from_cells_unchecked([c(0, 0), c(1, 0), c(2, 0)])).unwrap());
        assert!(matches!(
            is_connected(&Swarm::from_cells_unchecked([])),
            Err(GridError::Empty)
        ));
    }

    #[test]
    fn snapshot_examples() {
        let s = Swarm::from_cells_unchecked([c(0, 0)]);
        assert_eq!(snapshot(&s, c(0, 0)).unwrap().offsets(), vec![c(0, 0)]);

        let s = Swarm::from_cells_unchecked([c(0, 0), c(8, 0)]);
        assert_eq!(snapshot(&s, c(0, 0)).unwrap().offsets(), vec![c(0, 0)]);

        let s = Swarm::from_cells_unchecked([c(0, 0), c(7, 0), c(4, 4)]);
        assert_eq!(snapshot(&s, c(0, 0)).unwrap().offsets(), vec![c(0, 0), c(7, 0)]);

        assert!(matches!(snapshot(&s, c(1, 1)), Err(GridError::UnoccupiedCenter(_))));
    }

    #[test]
    fn transform_examples() {
        assert_eq!(Transform::new(1, false).apply(c(1, 0)), c(0, 1));
        assert_eq!(Transform::IDENTITY.apply(c(4, -9)), c(4, -9));
        for t in Transform::all() {
            assert_eq!(t.inverse().apply(t.apply(c(3, -2))), c(3, -2));
        }
        assert_eq!(Transform::DIAGONAL_MIRROR.apply(c(2, -1)), c(-1, 2));
    }

    #[test]
    fn transform_orbits() {
        let asym = [c(0, 0), c(1, 0), c(2, 0), c(0, 1)];
        let images: HashSet<Vec<Coord>> = Transform::all()
            .iter()
            .map(|t| {
                let mut v: Vec<Coord> = asym.iter().map(|&o| t.apply(o)).collect();
                v.sort();
                v
            })
            .collect();
        assert_eq!(images.len(), 8);

        let sym = [c(0, 0), c(1, 0), c(-1, 0), c(0, 1), c(0, -1)];
        let images: HashSet<Vec<Coord>> = Transform::all()
            .iter()
            .map(|t| {
                let mut v: Vec<Coord> = sym.iter().map(|&o| t.apply(o)).collect();
                v.sort();
                v
            })
            .collect();
        assert_eq!(images.len(), 1);
    }

    #[test]
    fn map_round_trip() {
        let text = "##.\n.##\n";
        let s = parse_map(text).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(render_map(&s), text);
        assert_eq!(parse_json(&to_json(&s)).unwrap(), s);
        assert!(matches!(parse_map("#.#\n"), Err(GridError::Disconnected)));
        assert!(matches!(parse_map("...\n"), Err(GridError::Empty)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn transform() -> impl Strategy<Value = Transform> {
            (0u8..4, any::<bool>()).prop_map(|(q, m)| Transform::new(q, m))
        }

        fn coord() -> impl Strategy<Value = Coord> {
            (-20i64..=20, -20i64..=20).prop_map(|(x, y)| Coord::new(x, y))
        }

        /// Union-find over 4-adjacent pairs.
        fn connected_by_union_find(cells: &[Coord]) -> bool {
            let mut parent: Vec<usize> = (0..cells.len()).collect();
            fn root(p: &mut [usize], mut i: usize) -> usize {
                while p[i] != i {
                    p[i] = p[p[i]];
                    i = p[i];
                }
                i
            }
            for i in 0..cells.len() {
                for j in i + 1..cells.len() {
                    if l1_distance(cells[i], cells[j]) == 1 {
                        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                        parent[a] = b;
                    }
                }
            }
            let r = root(&mut parent, 0);
            (0..cells.len()).all(|i| root(&mut parent, i) == r)
        }

        proptest! {
            #[test]
            fn transforms_form_a_group(a in transform(), b in transform(), o in coord()) {
                prop_assert_eq!(a.then(a.inverse()).apply(o), o);
                prop_assert_eq!(a.then(b).apply(o), b.apply(a.apply(o)));
                prop_assert!(Transform::all().contains(&a.then(b)));
                prop_assert_eq!(a.apply(o).l1_norm(), o.l1_norm());
            }

            #[test]
            fn connectivity_matches_union_find(cells in prop::collection::btree_set((0i64..5, 0i64..5), 1..12)) {
                let cells: Vec<Coord> = cells.into_iter().map(|(x, y)| Coord::new(x, y)).collect();
                let s = Swarm::from_cells_unchecked(cells.iter().copied());
                prop_assert_eq!(s.is_connected().unwrap(), connected_by_union_find(&cells));
            }

            #[test]
            fn snapshot_stays_in_view(cells in prop::collection::btree_set((-10i64..10, -10i64..10), 1..40)) {
                let s = Swarm::from_cells_unchecked(cells.into_iter().map(|(x, y)| Coord::new(x, y)));
                let center = s.iter().next().unwrap();
                let snap = snapshot(&s, center).unwrap();
                let offsets = snap.offsets();
                prop_assert!(offsets.contains(&Coord::ORIGIN));
                prop_assert!(offsets.iter().all(|o| o.l1_norm() <= VIEW_RADIUS));
                let expected = s.iter().filter(|&c| l1_distance(c, center) <= VIEW_RADIUS).count();
                prop_assert_eq!(offsets.len(), expected);
            }
        }
    }
}
