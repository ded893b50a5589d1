//! Fully synchronous round execution: every robot looks at the round-start
//! swarm, decides, and all hops are applied at once.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::EngineError;
use crate::grid::{snapshot_of, Coord, DenseGrid, Swarm};
use crate::metrics::{check_round_progress, measures, ProgressMeasures};
use crate::patterns::{find_hop, HopAction, PatternLibrary};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub max_rounds: u64,
    pub strict_conflicts: bool,
    pub lemma_checks: bool,
    pub record_trace: bool,
    /// Evaluate decisions on the rayon pool.
    pub parallel: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            max_rounds: 1,
            strict_conflicts: true,
            lemma_checks: true,
            record_trace: true,
            parallel: false,
        }
    }
}

impl SimConfig {
    /// Default config for `s`: the round cap is ten times the proven bound.
    pub fn for_swarm(s: &Swarm) -> SimConfig {
        let b = measures(s).boundary_len;
        SimConfig { max_rounds: default_max_rounds(b), ..SimConfig::default() }
    }
}

/// `6B² + 5B`.
pub fn round_bound(boundary_len: u64) -> u64 {
    6 * boundary_len * boundary_len + 5 * boundary_len
}

pub fn default_max_rounds(boundary_len: u64) -> u64 {
    (10 * round_bound(boundary_len)).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundResult {
    pub hops: Vec<(Coord, Coord)>,
    pub merges: u64,
    pub robots_after: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Gathered { round: u64 },
    MaxRoundsExceeded,
    Error { kind: String, message: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub initial: Vec<Coord>,
    /// Measures before the first round.
    pub initial_measures: ProgressMeasures,
    pub rounds: Vec<(RoundResult, ProgressMeasures)>,
    pub outcome: Outcome,
    #[serde(skip)]
    pub final_swarm: Swarm,
}

impl Trace {
    pub fn rounds_executed(&self) -> u64 {
        match self.outcome {
            Outcome::Gathered { round } => round,
            _ => self.rounds.len() as u64,
        }
    }

    /// All measures, round 0 first.
    pub fn measures(&self) -> impl Iterator<Item = &ProgressMeasures> {
        std::iter::once(&self.initial_measures).chain(self.rounds.iter().map(|(_, m)| m))
    }

    pub fn total_merges(&self) -> u64 {
        self.rounds.iter().map(|(r, _)| r.merges).sum()
    }

    /// Sum of all positive per-round area changes.
    pub fn area_increase(&self) -> u64 {
        let all: Vec<&ProgressMeasures> = self.measures().collect();
        all.windows(2)
            .map(|w| w[1].area.saturating_sub(w[0].area))
            .sum()
    }
}

/// All robots within one 2×2 square.
pub fn is_gathered(s: &Swarm) -> bool {
    match s.bounds() {
        Some((lo, hi)) => hi.x - lo.x <= 1 && hi.y - lo.y <= 1,
        None => true,
    }
}

/// Every robot's decision on the round-start swarm, in `order`.
fn decide(
    grid: &DenseGrid,
    lib: &PatternLibrary,
    order: &[Coord],
    strict: bool,
    parallel: bool,
) -> Result<Vec<(Coord, Coord)>, EngineError> {
    let one = |&r: &Coord| -> Result<Option<(Coord, Coord)>, EngineError> {
        let snap = snapshot_of(grid, r);
        let decision = find_hop(&snap, lib, strict).map_err(|source| EngineError::Ambiguous { robot: r, source })?;
        Ok(match decision.action {
            HopAction::Hop(d) if d != Coord::ORIGIN => Some((r, r + d)),
            HopAction::Hop(_) => {
                log::info!("robot at {r} targets its own cell; staying");
                None
            }
            HopAction::Stay => None,
        })
    };
    let results: Vec<Result<Option<(Coord, Coord)>, EngineError>> = if parallel {
        order.par_iter().map(one).collect()
    } else {
        order.iter().map(one).collect()
    };
    let mut hops = Vec::new();
    for r in results {
        if let Some(h) = r? {
            hops.push(h);
        }
    }
    Ok(hops)
}

/// Moves every robot per `hops` at once; robots on one cell merge.
fn apply_hops(s: &Swarm, hops: &[(Coord, Coord)]) -> (Swarm, RoundResult) {
    let moved: BTreeSet<Coord> = hops.iter().map(|&(from, _)| from).collect();
    let cells = s
        .iter()
        .filter(|c| !moved.contains(c))
        .chain(hops.iter().map(|&(_, to)| to));
    let next = Swarm::from_cells_unchecked(cells);
    let mut hops = hops.to_vec();
    hops.sort();
    let result = RoundResult {
        hops,
        merges: (s.len() - next.len()) as u64,
        robots_after: next.len() as u64,
    };
    (next, result)
}

/// One synchronous round.
pub fn step(s: &Swarm, lib: &PatternLibrary, cfg: &SimConfig) -> Result<(Swarm, RoundResult), EngineError> {
    step_in_order(s, lib, cfg, &s.iter().collect::<Vec<_>>(), 0)
}

/// `step` with an explicit robot evaluation order. The result does not
/// depend on the order. `round` is only used for error reporting.
pub fn step_in_order(
    s: &Swarm,
    lib: &PatternLibrary,
    cfg: &SimConfig,
    order: &[Coord],
    round: u64,
) -> Result<(Swarm, RoundResult), EngineError> {
    if s.is_empty() {
        return Err(EngineError::Precondition("swarm is empty"));
    }
    if is_gathered(s) {
        return Err(EngineError::Precondition("swarm is already gathered"));
    }
    let grid = DenseGrid::new(s, 8);
    let hops = decide(&grid, lib, order, cfg.strict_conflicts, cfg.parallel)?;
    let (next, result) = apply_hops(s, &hops);
    if !next.is_connected()? {
        return Err(EngineError::Disconnected { round });
    }
    Ok((next, result))
}

/// Runs rounds until the swarm is gathered or the round cap is hit. Errors
/// end the run and are reported in the outcome.
pub fn run(s: &Swarm, lib: &PatternLibrary, cfg: &SimConfig) -> Trace {
    let initial_measures = measures(s);
    let mut trace = Trace {
        initial: s.iter().collect(),
        initial_measures,
        rounds: Vec::new(),
        outcome: Outcome::MaxRoundsExceeded,
        final_swarm: s.clone(),
    };
    match s.is_connected() {
        Ok(true) => {}
        Ok(false) => {
            let e = EngineError::InvalidInput(crate::error::GridError::Disconnected);
            trace.outcome = Outcome::Error { kind: e.kind().into(), message: e.to_string() };
            return trace;
        }
        Err(e) => {
            let e = EngineError::InvalidInput(e);
            trace.outcome = Outcome::Error { kind: e.kind().into(), message: e.to_string() };
            return trace;
        }
    }
    let mut current = s.clone();
    let mut before = initial_measures;
    for round in 0..cfg.max_rounds {
        if is_gathered(&current) {
            trace.outcome = Outcome::Gathered { round };
            trace.final_swarm = current;
            return trace;
        }
        let order: Vec<Coord> = current.iter().collect();
        let (next, result) = match step_in_order(&current, lib, cfg, &order, round + 1) {
            Ok(v) => v,
            Err(e) => {
                trace.outcome = Outcome::Error { kind: e.kind().into(), message: e.to_string() };
                trace.final_swarm = current;
                return trace;
            }
        };
        let after = if cfg.record_trace || cfg.lemma_checks { measures(&next) } else { before };
        if cfg.lemma_checks {
            if let Err(e) = lemma_check(&before, &after, round + 1) {
                trace.rounds.push((result, after));
                trace.outcome = Outcome::Error { kind: e.kind().into(), message: e.to_string() };
                trace.final_swarm = next;
                return trace;
            }
        }
        if cfg.record_trace || cfg.lemma_checks {
            trace.rounds.push((result, after));
        }
        before = after;
        current = next;
    }
    if is_gathered(&current) {
        trace.outcome = Outcome::Gathered { round: cfg.max_rounds };
    }
    trace.final_swarm = current;
    trace
}

/// Names the first progress lemma that the step `before -> after` breaks.
pub fn lemma_check(before: &ProgressMeasures, after: &ProgressMeasures, round: u64) -> Result<(), EngineError> {
    let verdict = check_round_progress(before, after);
    if verdict.lemma_ok {
        return Ok(());
    }
    let (measure, detail) = if after.boundary_len > before.boundary_len {
        ("boundary", format!("{} -> {}", before.boundary_len, after.boundary_len))
    } else if after.convex_measure > before.convex_measure {
        ("convex", format!("{} -> {}", before.convex_measure, after.convex_measure))
    } else {
        ("area", format!("{} -> {} without other progress", before.area, after.area))
    };
    Err(EngineError::LemmaViolation { round, measure, detail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_map;

    #[test]
    fn gathered_examples() {
        assert!(is_gathered(&parse_map("#\n").unwrap()));
        assert!(is_gathered(&parse_map("##\n##\n").unwrap()));
        assert!(!is_gathered(&Swarm::from_cells_unchecked([Coord::new(0, 0), Coord::new(2, 0)])));
    }

    #[test]
    fn gathered_block_is_a_precondition_error() {
        let lib = PatternLibrary::default_library();
        let s = parse_map("##\n##\n").unwrap();
        assert!(matches!(step(&s, &lib, &SimConfig::default()), Err(EngineError::Precondition(_))));
        let trace = run(&s, &lib, &SimConfig::for_swarm(&s));
        assert_eq!(trace.outcome, Outcome::Gathered { round: 0 });
        assert!(trace.rounds.is_empty());
    }

    #[test]
    fn merging_counts() {
        let s = parse_map("###\n").unwrap();
        let (next, r) = apply_hops(&s, &[(Coord::new(0, 0), Coord::new(1, 0)), (Coord::new(2, 0), Coord::new(1, 0))]);
        assert_eq!(next.len(), 1);
        assert_eq!(r.merges, 2);
        assert_eq!(r.robots_after, 1);
    }

    #[test]
    fn disconnected_input_is_reported() {
        let lib = PatternLibrary::default_library();
        let s = Swarm::from_cells_unchecked([Coord::new(0, 0), Coord::new(3, 0)]);
        let trace = run(&s, &lib, &SimConfig::default());
        assert!(matches!(trace.outcome, Outcome::Error { ref kind, .. } if kind == "invalid_input"));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(round_bound(4), 116);
        assert_eq!(default_max_rounds(4), 1160);
    }

    mod props {
        use super::*;
        use crate::generators::random_connected;
        use proptest::prelude::*;
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn order_does_not_matter(n in 3usize..100, seed: u64, shuffle_seed: u64) {
                let lib = PatternLibrary::default_library();
                let s = random_connected(n, seed).unwrap();
                prop_assume!(!is_gathered(&s));
                let cfg = SimConfig::default();
                let mut order: Vec<Coord> = s.iter().collect();
                let plain = step_in_order(&s, &lib, &cfg, &order, 1);
                order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
                let shuffled = step_in_order(&s, &lib, &cfg, &order, 1);
                let par = step(&s, &lib, &SimConfig { parallel: true, ..cfg.clone() });
                match (plain, shuffled, par) {
                    (Ok(a), Ok(b), Ok(c)) => {
                        prop_assert_eq!(&a, &b);
                        prop_assert_eq!(&a, &c);
                    }
                    (a, b, c) => prop_assert!(a.is_err() && b.is_err() && c.is_err()),
                }
            }

            #[test]
            fn runs_are_deterministic_and_stay_connected(n in 2usize..60, seed: u64) {
                let lib = PatternLibrary::default_library();
                let s = random_connected(n, seed).unwrap();
                let cfg = SimConfig { lemma_checks: false, ..SimConfig::for_swarm(&s) };
                let a = run(&s, &lib, &cfg);
                let b = run(&s, &lib, &cfg);
                prop_assert_eq!(&a.outcome, &b.outcome);
                prop_assert_eq!(&a.rounds, &b.rounds);
                prop_assert!(matches!(a.outcome, Outcome::Gathered { .. }), "{:?}", a.outcome);
                prop_assert!(a.final_swarm.is_connected().unwrap());
                for (r, _) in &a.rounds {
                    prop_assert!(r.hops.iter().all(|&(from, to)| (to - from).is_king_move()));
                }
            }

            #[test]
            fn robots_never_appear(n in 2usize..60, seed: u64) {
                let lib = PatternLibrary::default_library();
                let s = random_connected(n, seed).unwrap();
                prop_assume!(!is_gathered(&s));
                let (next, r) = step(&s, &lib, &SimConfig::default()).unwrap();
                prop_assert_eq!(next.len() as u64 + r.merges, s.len() as u64);
            }
        }
    }
}
