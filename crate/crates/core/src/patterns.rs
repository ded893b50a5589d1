//! Hop and inhibit patterns, and the per-robot decision function.
//!
//! Every pattern is drawn in a canonical frame around the acting robot `@`
//! and is valid under all eight grid symmetries. Diagonal hop patterns are
//! drawn hopping to the lower right `(1, 1)`; their inhibit checks use the
//! same transform, placed in the upper-right area, and for `DiagB` also
//! reflected across the hop diagonal into the lower-left area.
//!
//! The file grammar is documented in `docs/patterns.md`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{DecisionError, PatternError};
use crate::grid::{Coord, Snapshot, Transform, VIEW_RADIUS};

/// The shipped pattern library.
pub const DEFAULT_PATTERNS: &str = include_str!("../patterns/default.pat");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternCell {
    RequireRobot,
    RequireEmpty,
    DontCare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PatternKind {
    DiagA,
    DiagB,
    Inhibit1,
    Inhibit2,
    Inhibit3,
    HV1,
    HV2,
}

impl PatternKind {
    pub fn is_inhibit(self) -> bool {
        matches!(self, PatternKind::Inhibit1 | PatternKind::Inhibit2 | PatternKind::Inhibit3)
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, PatternKind::DiagA | PatternKind::DiagB)
    }

    pub fn is_hv(self) -> bool {
        matches!(self, PatternKind::HV1 | PatternKind::HV2)
    }
}

impl FromStr for PatternKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "DiagA" => PatternKind::DiagA,
            "DiagB" => PatternKind::DiagB,
            "Inhibit1" => PatternKind::Inhibit1,
            "Inhibit2" => PatternKind::Inhibit2,
            "Inhibit3" => PatternKind::Inhibit3,
            "HV1" => PatternKind::HV1,
            "HV2" => PatternKind::HV2,
            other => return Err(format!("unknown pattern kind `{other}`")),
        })
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSpec {
    pub id: String,
    pub kind: PatternKind,
    /// Constrained cells only; anything absent is don't-care.
    pub cells: Vec<(Coord, PatternCell)>,
    pub hop_target: Option<Coord>,
    /// For inhibit patterns: the robot whose opposite hop the template
    /// detects, in the hopping robot's frame.
    pub anchor: Option<Coord>,
}

impl PatternSpec {
    pub fn transformed(&self, t: Transform) -> PatternSpec {
        let mut cells: Vec<(Coord, PatternCell)> =
            self.cells.iter().map(|&(o, c)| (t.apply(o), c)).collect();
        cells.sort_by_key(|&(o, _)| o);
        PatternSpec {
            id: self.id.clone(),
            kind: self.kind,
            cells,
            hop_target: self.hop_target.map(|o| t.apply(o)),
            anchor: self.anchor.map(|o| t.apply(o)),
        }
    }

    fn validate(&self) -> Result<(), PatternError> {
        let invalid = |msg: String| PatternError::Invalid { id: self.id.clone(), msg };
        for &(o, _) in &self.cells {
            if o.l1_norm() > VIEW_RADIUS {
                return Err(invalid(format!("cell {o} lies outside the viewing range")));
            }
        }
        if self.cell_at(Coord::ORIGIN) != PatternCell::RequireRobot {
            return Err(invalid("missing acting robot `@` at the origin".into()));
        }
        let mut seen = HashSet::new();
        for &(o, _) in &self.cells {
            if !seen.insert(o) {
                return Err(invalid(format!("cell {o} constrained twice")));
            }
        }
        if self.kind.is_inhibit() {
            let anchor = self.anchor.ok_or_else(|| invalid("inhibit pattern needs an anchor".into()))?;
            if self.hop_target.is_some() {
                return Err(invalid("inhibit patterns carry no hop target".into()));
            }
            if anchor.x < 0 || anchor.y > 0 || anchor == Coord::ORIGIN {
                return Err(invalid(format!("anchor {anchor} is not in the upper-right area")));
            }
            if self.cell_at(anchor) != PatternCell::RequireRobot {
                return Err(invalid(format!("anchor {anchor} must be a robot cell")));
            }
            return Ok(());
        }
        let target = self.hop_target.ok_or_else(|| invalid("hop pattern needs a target".into()))?;
        if self.anchor.is_some() {
            return Err(invalid("only inhibit patterns carry an anchor".into()));
        }
        match self.kind {
            PatternKind::DiagA | PatternKind::DiagB => {
                if target != Coord::new(1, 1) {
                    return Err(invalid(format!(
                        "diagonal patterns are drawn hopping to (1, 1), found {target}"
                    )));
                }
            }
            _ => {
                if !target.is_axis_unit() {
                    return Err(invalid(format!("HV target {target} is not an axis step")));
                }
                if self.cell_at(target) != PatternCell::RequireRobot {
                    return Err(invalid(format!("HV target {target} must be a robot cell")));
                }
            }
        }
        Ok(())
    }

    pub fn cell_at(&self, o: Coord) -> PatternCell {
        self.cells
            .iter()
            .find(|&&(p, _)| p == o)
            .map(|&(_, c)| c)
            .unwrap_or(PatternCell::DontCare)
    }
}

/// True iff every constrained cell of `p`, moved by `t`, agrees with `snap`.
pub fn match_at(snap: &Snapshot, p: &PatternSpec, t: Transform) -> bool {
    p.cells.iter().all(|&(o, cell)| match cell {
        PatternCell::RequireRobot => snap.occupied(t.apply(o)),
        PatternCell::RequireEmpty => !snap.occupied(t.apply(o)),
        PatternCell::DontCare => true,
    })
}

/// Cells, target and anchor: what makes two pattern images the same.
type ImageKey = (Vec<(Coord, PatternCell)>, Option<Coord>, Option<Coord>);

/// The distinct images of `p` under the eight grid symmetries.
pub fn transforms_of(p: &PatternSpec) -> Vec<(Transform, PatternSpec)> {
    let mut seen: HashSet<ImageKey> = HashSet::new();
    let mut out = Vec::new();
    for t in Transform::all() {
        let image = p.transformed(t);
        let key = (image.cells.clone(), image.hop_target, image.anchor);
        if seen.insert(key) {
            out.push((t, image));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct PatternLibrary {
    pub version: String,
    pub specs: Vec<PatternSpec>,
}

impl PatternLibrary {
    pub fn hop_specs(&self) -> impl Iterator<Item = &PatternSpec> {
        self.specs.iter().filter(|p| !p.kind.is_inhibit())
    }

    pub fn inhibit_specs(&self) -> impl Iterator<Item = &PatternSpec> {
        self.specs.iter().filter(|p| p.kind.is_inhibit())
    }

    pub fn count(&self, kind: PatternKind) -> usize {
        self.specs.iter().filter(|p| p.kind == kind).count()
    }

    pub fn get(&self, id: &str) -> Option<&PatternSpec> {
        self.specs.iter().find(|p| p.id == id)
    }

    /// The shipped library.
    pub fn default_library() -> PatternLibrary {
        load_patterns(DEFAULT_PATTERNS.as_bytes()).expect("shipped pattern file is valid")
    }

    fn check_inventory(&self) -> Result<(), PatternError> {
        let mut missing = Vec::new();
        let want = [
            (PatternKind::DiagA, 2, 2),
            (PatternKind::DiagB, 1, 1),
            (PatternKind::Inhibit1, 1, 1),
            (PatternKind::Inhibit2, 1, 1),
            (PatternKind::Inhibit3, 1, 1),
            (PatternKind::HV1, 1, usize::MAX),
            (PatternKind::HV2, 1, usize::MAX),
        ];
        for (kind, lo, hi) in want {
            let n = self.count(kind);
            if n < lo || n > hi {
                missing.push(format!("{kind}: found {n}"));
            }
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(PatternError::Inventory(missing.join(", ")))
        }
    }
}

/// Parses and validates a pattern-definition file.
pub fn load_patterns<R: std::io::Read>(mut source: R) -> Result<PatternLibrary, PatternError> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| PatternError::Syntax { line: 0, msg: e.to_string() })?;
    let lib = parse_library(&text)?;
    let mut ids = HashSet::new();
    for p in &lib.specs {
        if !ids.insert(p.id.as_str()) {
            return Err(PatternError::DuplicateId(p.id.clone()));
        }
        p.validate()?;
    }
    lib.check_inventory()?;
    Ok(lib)
}

struct Block {
    header_line: usize,
    header: Vec<String>,
    anchor: Option<(usize, Coord)>,
    rows: Vec<(usize, String)>,
}

fn parse_library(text: &str) -> Result<PatternLibrary, PatternError> {
    let mut version = None;
    let mut blocks: Vec<Block> = Vec::new();
    let mut current: Option<Block> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim_start().starts_with("//") {
            continue;
        }
        if line.trim().is_empty() {
            if let Some(b) = current.take() {
                blocks.push(b);
            }
            continue;
        }
        let syntax = |msg: String| PatternError::Syntax { line: line_no, msg };
        match current.as_mut() {
            None => {
                let tokens: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
                if tokens[0] == "version" {
                    if tokens.len() != 2 || version.is_some() {
                        return Err(syntax("expected a single `version <tag>` line".into()));
                    }
                    version = Some(tokens[1].clone());
                    continue;
                }
                current = Some(Block { header_line: line_no, header: tokens, anchor: None, rows: Vec::new() });
            }
            Some(block) => {
                let first = line.split_whitespace().next().unwrap_or("");
                if first == "anchor" {
                    if !block.rows.is_empty() || block.anchor.is_some() {
                        return Err(syntax("`anchor` must directly follow the header".into()));
                    }
                    let nums: Vec<&str> = line.split_whitespace().skip(1).collect();
                    let coord = parse_pair(&nums).ok_or_else(|| syntax("expected `anchor <dx> <dy>`".into()))?;
                    block.anchor = Some((line_no, coord));
                } else {
                    block.rows.push((line_no, line.trim().to_owned()));
                }
            }
        }
    }
    if let Some(b) = current.take() {
        blocks.push(b);
    }
    if blocks.is_empty() {
        return Err(PatternError::EmptyFile);
    }
    let specs = blocks.into_iter().map(block_to_spec).collect::<Result<Vec<_>, _>>()?;
    Ok(PatternLibrary { version: version.unwrap_or_else(|| "unversioned".into()), specs })
}

fn parse_pair(nums: &[&str]) -> Option<Coord> {
    match nums {
        [x, y] => Some(Coord::new(x.parse().ok()?, y.parse().ok()?)),
        _ => None,
    }
}

fn block_to_spec(block: Block) -> Result<PatternSpec, PatternError> {
    let syntax = |line: usize, msg: String| PatternError::Syntax { line, msg };
    let header = &block.header;
    let id = header[0].clone();
    let kind: PatternKind = header
        .get(1)
        .ok_or_else(|| syntax(block.header_line, format!("pattern `{id}` has no kind")))?
        .parse()
        .map_err(|e| syntax(block.header_line, e))?;
    let invalid = |msg: String| PatternError::Invalid { id: id.clone(), msg };

    let hop_target = if kind.is_inhibit() {
        if header.len() != 2 {
            return Err(syntax(block.header_line, format!("inhibit pattern `{id}` takes no target")));
        }
        None
    } else {
        let nums: Vec<&str> = header[2..].iter().map(String::as_str).collect();
        Some(parse_pair(&nums).ok_or_else(|| {
            syntax(block.header_line, format!("expected `{id} {kind} <dx> <dy>`"))
        })?)
    };

    if block.rows.is_empty() {
        return Err(invalid("pattern has no grid".into()));
    }
    let width = block.rows[0].1.chars().count();
    let mut origin = None;
    let mut star = None;
    let mut raw_cells = Vec::new();
    for (row_idx, (line_no, row)) in block.rows.iter().enumerate() {
        if row.chars().count() != width {
            return Err(syntax(*line_no, format!("pattern `{id}`: grid is not rectangular")));
        }
        for (col, ch) in row.chars().enumerate() {
            let at = Coord::new(col as i64, row_idx as i64);
            let cell = match ch {
                '#' => PatternCell::RequireRobot,
                'o' => PatternCell::RequireEmpty,
                '.' => continue,
                '@' => {
                    if origin.replace(at).is_some() {
                        return Err(invalid("more than one `@`".into()));
                    }
                    PatternCell::RequireRobot
                }
                '*' => {
                    if star.replace(at).is_some() {
                        return Err(invalid("more than one `*`".into()));
                    }
                    continue;
                }
                other => return Err(syntax(*line_no, format!("pattern `{id}`: unexpected character {other:?}"))),
            };
            raw_cells.push((at, cell));
        }
    }
    let origin = origin.ok_or_else(|| invalid("missing acting robot `@` at the origin".into()))?;
    let cells: Vec<(Coord, PatternCell)> = raw_cells.into_iter().map(|(at, c)| (at - origin, c)).collect();
    if let (Some(star), Some(target)) = (star, hop_target) {
        if star - origin != target {
            return Err(invalid(format!("`*` at {} disagrees with header target {target}", star - origin)));
        }
    }
    if star.is_some() && kind.is_inhibit() {
        return Err(invalid("inhibit patterns carry no `*`".into()));
    }
    let anchor = match (kind.is_inhibit(), block.anchor) {
        (true, Some((_, a))) => Some(a),
        (true, None) => None,
        (false, Some((line, _))) => return Err(syntax(line, format!("hop pattern `{id}` takes no anchor"))),
        (false, None) => None,
    };
    let mut cells = cells;
    cells.sort_by_key(|&(o, _)| o);
    Ok(PatternSpec { id, kind, cells, hop_target, anchor })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum HopAction {
    Stay,
    Hop(Coord),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternMatch {
    pub pattern: String,
    pub kind: PatternKind,
    pub transform: Transform,
    pub target: Coord,
    pub inhibited_by: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HopDecision {
    pub action: HopAction,
    pub matches: Vec<PatternMatch>,
}

impl HopDecision {
    pub fn delta(&self) -> Option<Coord> {
        match self.action {
            HopAction::Stay => None,
            HopAction::Hop(d) => Some(d),
        }
    }
}

/// Inhibit patterns, placed with transform `t`, that match `snap`.
fn inhibits_matching(snap: &Snapshot, lib: &PatternLibrary, t: Transform) -> Vec<String> {
    lib.inhibit_specs()
        .filter(|p| match_at(snap, p, t))
        .map(|p| p.id.clone())
        .collect()
}

/// Inhibit check for a diagonal hop matched under `t`. Returns the ids of
/// the inhibit patterns responsible, empty when the hop may proceed.
pub fn check_inhibit(snap: &Snapshot, hop_kind: PatternKind, t: Transform, lib: &PatternLibrary) -> Vec<String> {
    let upper_right = inhibits_matching(snap, lib, t);
    match hop_kind {
        PatternKind::DiagA => upper_right,
        PatternKind::DiagB => {
            if upper_right.is_empty() {
                return Vec::new();
            }
            let lower_left = inhibits_matching(snap, lib, Transform::DIAGONAL_MIRROR.then(t));
            if lower_left.is_empty() {
                Vec::new()
            } else {
                upper_right.into_iter().chain(lower_left).collect()
            }
        }
        _ => Vec::new(),
    }
}

/// Decides what the robot owning `snap` does this round.
///
/// With `strict`, uninhibited matches that disagree on the target (other
/// than one horizontal plus one vertical HV hop, which combine into a
/// diagonal hop) are an error; otherwise the robot stays.
pub fn find_hop(snap: &Snapshot, lib: &PatternLibrary, strict: bool) -> Result<HopDecision, DecisionError> {
    let mut matches = Vec::new();
    for spec in lib.hop_specs() {
        let target = spec.hop_target.expect("validated hop pattern");
        for t in Transform::all() {
            if !match_at(snap, spec, t) {
                continue;
            }
            let inhibited_by = if spec.kind.is_diagonal() {
                check_inhibit(snap, spec.kind, t, lib)
            } else {
                Vec::new()
            };
            let m = PatternMatch {
                pattern: spec.id.clone(),
                kind: spec.kind,
                transform: t,
                target: t.apply(target),
                inhibited_by,
            };
            if !matches.contains(&m) {
                matches.push(m);
            }
        }
    }

    let live = || matches.iter().filter(|m| m.inhibited_by.is_empty());
    let hv: BTreeSet<Coord> = live().filter(|m| m.kind.is_hv()).map(|m| m.target).collect();
    let diag: BTreeSet<Coord> = live().filter(|m| m.kind.is_diagonal()).map(|m| m.target).collect();

    let mut targets: BTreeSet<Coord> = diag;
    let hv_vec: Vec<Coord> = hv.iter().copied().collect();
    match hv_vec.as_slice() {
        [] => {}
        [a, b] if a.x == 0 && b.y == 0 || a.y == 0 && b.x == 0 => {
            targets.insert(*a + *b);
        }
        _ => targets.extend(hv_vec.iter().copied()),
    }

    let action = match targets.len() {
        0 => HopAction::Stay,
        1 => HopAction::Hop(*targets.iter().next().unwrap()),
        _ => {
            let patterns: Vec<String> = live().map(|m| m.pattern.clone()).collect();
            let targets: Vec<Coord> = targets.into_iter().collect();
            if strict {
                return Err(DecisionError::Ambiguous { patterns, targets });
            }
            log::warn!("ambiguous hop, staying: patterns {patterns:?} targets {targets:?}");
            HopAction::Stay
        }
    };
    Ok(HopDecision { action, matches })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "\
version test

da1 DiagA 1 1
o.
@.
.*

da2 DiagA 1 1
.o
@.
.*

db DiagB 1 1
oo
@.
.*

i1 Inhibit1
anchor 1 0
@#

i2 Inhibit2
anchor 1 -1
.#
@.

i3 Inhibit3
anchor 0 -1
#
@

hv1 HV1 0 1
o
@
#

hv2 HV2 0 1
o@#
.#.
";

    #[test]
    fn parses_minimal_library() {
        let lib = load_patterns(MINI.as_bytes()).unwrap();
        assert_eq!(lib.version, "test");
        assert_eq!(lib.count(PatternKind::DiagA), 2);
        let hv2 = lib.get("hv2").unwrap();
        assert_eq!(hv2.cell_at(Coord::new(1, 0)), PatternCell::RequireRobot);
        assert_eq!(hv2.cell_at(Coord::new(-1, 0)), PatternCell::RequireEmpty);
        assert_eq!(hv2.hop_target, Some(Coord::new(0, 1)));
        assert_eq!(lib.get("i2").unwrap().anchor, Some(Coord::new(1, -1)));
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(load_patterns("".as_bytes()), Err(PatternError::EmptyFile)));
        assert!(matches!(load_patterns("// only a comment\n".as_bytes()), Err(PatternError::EmptyFile)));

        let far = MINI.replace("hv1 HV1 0 1\no\n@\n#", "hv1 HV1 0 1\no........\n@.......#\n#........");
        match load_patterns(far.as_bytes()) {
            Err(PatternError::Invalid { id, msg }) => {
                assert_eq!(id, "hv1");
                assert!(msg.contains("outside the viewing range"), "{msg}");
            }
            other => panic!("expected range error, got {other:?}"),
        }

        let no_robot = MINI.replace("o\n@\n#", "o\n.\n#");
        assert!(matches!(load_patterns(no_robot.as_bytes()), Err(PatternError::Invalid { .. })));

        let dup = MINI.replace("da2 DiagA", "da1 DiagA");
        assert!(matches!(load_patterns(dup.as_bytes()), Err(PatternError::DuplicateId(_))));

        let unknown = MINI.replace("hv2 HV2", "hv2 HV9");
        assert!(matches!(load_patterns(unknown.as_bytes()), Err(PatternError::Syntax { .. })));

        let ragged = MINI.replace("o@#\n.#.", "o@#\n.#");
        assert!(matches!(load_patterns(ragged.as_bytes()), Err(PatternError::Syntax { .. })));

        let short = MINI.replace("db DiagB 1 1\noo\n@.\n.*\n\n", "");
        assert!(matches!(load_patterns(short.as_bytes()), Err(PatternError::Inventory(_))));
    }

    #[test]
    fn self_match_and_single_violation() {
        let lib = load_patterns(MINI.as_bytes()).unwrap();
        for spec in &lib.specs {
            let robots = spec
                .cells
                .iter()
                .filter(|(_, c)| *c == PatternCell::RequireRobot)
                .map(|&(o, _)| o);
            let snap = Snapshot::from_offsets(robots);
            assert!(match_at(&snap, spec, Transform::IDENTITY), "{}", spec.id);
        }
        let hv2 = lib.get("hv2").unwrap();
        let missing = Snapshot::from_offsets([Coord::new(1, 0)]);
        assert!(!match_at(&missing, hv2, Transform::IDENTITY));
    }

    #[test]
    fn transform_orbit_sizes() {
        let asym = PatternSpec {
            id: "a".into(),
            kind: PatternKind::HV1,
            cells: vec![
                (Coord::new(0, 0), PatternCell::RequireRobot),
                (Coord::new(1, 0), PatternCell::RequireRobot),
                (Coord::new(2, 0), PatternCell::RequireRobot),
                (Coord::new(0, 1), PatternCell::RequireEmpty),
            ],
            hop_target: Some(Coord::new(1, 0)),
            anchor: None,
        };
        assert_eq!(transforms_of(&asym).len(), 8);

        let plus = PatternSpec {
            id: "p".into(),
            kind: PatternKind::Inhibit1,
            cells: [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .map(|&(x, y)| (Coord::new(x, y), PatternCell::RequireRobot))
                .collect(),
            hop_target: None,
            anchor: None,
        };
        assert!(transforms_of(&plus).len() <= 2);

        let lib = load_patterns(MINI.as_bytes()).unwrap();
        let da = lib.get("da1").unwrap();
        let rot = Transform::new(1, false);
        assert_eq!(da.transformed(rot).hop_target, Some(rot.apply(Coord::new(1, 1))));
    }

    #[test]
    fn lone_robot_stays() {
        let lib = PatternLibrary::default_library();
        let d = find_hop(&Snapshot::lone(), &lib, true).unwrap();
        assert_eq!(d.action, HopAction::Stay);
        assert!(d.matches.is_empty());
    }

    #[test]
    fn horizontal_and_vertical_hv_combine() {
        let lib = PatternLibrary::default_library();
        // A 2x2 block: HV2 applies both downwards and to the right.
        let snap = Snapshot::from_offsets([Coord::new(1, 0), Coord::new(0, 1), Coord::new(1, 1)]);
        let d = find_hop(&snap, &lib, true).unwrap();
        assert_eq!(d.action, HopAction::Hop(Coord::new(1, 1)));
    }

    mod props {
        use super::*;
        use crate::generators::random_connected;
        use crate::grid::{snapshot, Swarm};
        use proptest::prelude::*;

        fn robot_of(n: usize, seed: u64, pick: usize) -> (Swarm, Coord) {
            let s = random_connected(n, seed).unwrap();
            let c = s.iter().nth(pick % s.len()).unwrap();
            (s, c)
        }

        proptest! {
            #[test]
            fn decisions_commute_with_symmetries(n in 1usize..60, seed: u64, pick: usize, q in 0u8..4, m: bool) {
                let lib = PatternLibrary::default_library();
                let (s, c) = robot_of(n, seed, pick);
                let t = Transform::new(q, m);
                let snap = snapshot(&s, c).unwrap();
                let plain = find_hop(&snap, &lib, false).unwrap().delta();
                let turned = find_hop(&snap.transformed(t), &lib, false).unwrap().delta();
                prop_assert_eq!(turned, plain.map(|d| t.apply(d)));
            }

            #[test]
            fn decisions_ignore_far_robots(n in 1usize..60, seed: u64, pick: usize, dx in -30i64..30, dy in 8i64..30) {
                let lib = PatternLibrary::default_library();
                let (s, c) = robot_of(n, seed, pick);
                let far = Coord::new(c.x + dx, c.y + dy.max(8 + dx.abs()));
                let mut cells: Vec<Coord> = s.iter().collect();
                cells.push(far);
                let wider = Swarm::from_cells_unchecked(cells);
                let a = find_hop(&snapshot(&s, c).unwrap(), &lib, false).unwrap();
                let b = find_hop(&snapshot(&wider, c).unwrap(), &lib, false).unwrap();
                prop_assert_eq!(a.action, b.action);
            }

            #[test]
            fn hops_stay_next_door(n in 1usize..80, seed: u64, pick: usize) {
                let lib = PatternLibrary::default_library();
                let (s, c) = robot_of(n, seed, pick);
                if let Some(d) = find_hop(&snapshot(&s, c).unwrap(), &lib, false).unwrap().delta() {
                    prop_assert!(d.is_king_move(), "{d}");
                }
            }
        }
    }
}
