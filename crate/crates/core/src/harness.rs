//! Batch experiments: config loading, per-round JSONL traces, CSV summary.
//!
//! The config schema is documented in `docs/config.md`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{default_max_rounds, round_bound, run, Outcome, SimConfig, Trace};
use crate::generators::GeneratorSpec;
use crate::grid::{parse_swarm, render_map, Swarm};
use crate::metrics::measures;
use crate::patterns::{load_patterns, PatternLibrary};

/// Environment variable naming a pattern file to use instead of the
/// shipped library.
pub const PATTERNS_ENV: &str = "GATHER_PATTERNS";

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    #[serde(default)]
    pub patterns: Option<PathBuf>,
    /// Round cap; absent means ten times the proven bound of each run.
    #[serde(default)]
    pub max_rounds: Option<u64>,
    #[serde(default = "yes")]
    pub strict: bool,
    #[serde(default)]
    pub render: bool,
    #[serde(default)]
    pub parallel: bool,
    #[serde(default, rename = "run")]
    pub runs: Vec<RunSpec>,
    #[serde(default, rename = "random_batch")]
    pub random_batches: Vec<RandomBatch>,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    /// Swarm file (text map or JSON), relative to the config file.
    #[serde(default)]
    pub input: Option<PathBuf>,
}

/// `count` random swarms with sizes drawn from `[n_min, n_max]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomBatch {
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
}

impl RandomBatch {
    pub fn specs(&self) -> Vec<GeneratorSpec> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.count)
            .map(|_| GeneratorSpec::RandomConnected {
                n: rng.gen_range(self.n_min..=self.n_max),
                seed: rng.gen(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub run: String,
    pub n: usize,
    pub boundary: u64,
    pub rounds: u64,
    pub bound: u64,
    pub rounds_per_b2: f64,
    pub violations: u64,
    pub merges: u64,
    pub area_increase: u64,
    pub area_increase_bound: u64,
    pub outcome: String,
    pub detail: String,
}

impl SummaryRow {
    /// Gathered within the round bound with no monitored violation.
    pub fn ok(&self) -> bool {
        self.outcome == "gathered" && self.violations == 0
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentSummary {
    pub rows: Vec<SummaryRow>,
}

impl ExperimentSummary {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(SummaryRow::ok)
    }
}

#[derive(Serialize)]
struct RoundLine {
    round: u64,
    hops: usize,
    merges: u64,
    boundary_len: u64,
    convex_count: u64,
    convex_measure: u64,
    area: u64,
}

/// Library from `path`, else from `$GATHER_PATTERNS`, else the shipped one.
pub fn load_library(path: Option<&Path>) -> Result<PatternLibrary> {
    let env_path = std::env::var_os(PATTERNS_ENV).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(env_path) {
        Some(p) => {
            let file = File::open(&p).with_context(|| format!("opening pattern file {}", p.display()))?;
            load_patterns(file).with_context(|| format!("loading pattern file {}", p.display()))
        }
        None => Ok(PatternLibrary::default_library()),
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut cfg: ExperimentConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for r in &mut cfg.runs {
        if let Some(input) = &r.input {
            if input.is_relative() {
                r.input = Some(base.join(input));
            }
        }
    }
    if let Some(p) = &cfg.patterns {
        if p.is_relative() {
            cfg.patterns = Some(base.join(p));
        }
    }
    if cfg.output_dir.is_relative() {
        cfg.output_dir = base.join(&cfg.output_dir);
    }
    Ok(cfg)
}

pub fn read_swarm(path: &Path) -> Result<Swarm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading swarm {}", path.display()))?;
    parse_swarm(&text).with_context(|| format!("parsing swarm {}", path.display()))
}

/// The stable text rendering of one frame.
pub fn render_frame(s: &Swarm) -> String {
    render_map(s)
}

struct Job {
    name: String,
    swarm: Result<Swarm, String>,
}

fn jobs(cfg: &ExperimentConfig) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    for (i, r) in cfg.runs.iter().enumerate() {
        let (label, swarm) = match (&r.generator, &r.input) {
            (Some(g), None) => (g.label(), g.build().map_err(|e| e.to_string())),
            (None, Some(p)) => (
                p.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
                read_swarm(p).map_err(|e| format!("{e:#}")),
            ),
            _ => bail!("run {} needs exactly one of `generator` or `input`", i + 1),
        };
        out.push(Job { name: r.name.clone().unwrap_or_else(|| format!("{:03}-{label}", i + 1)), swarm });
    }
    let mut k = out.len();
    for batch in &cfg.random_batches {
        if batch.n_min == 0 || batch.n_min > batch.n_max {
            bail!("random_batch needs 1 <= n_min <= n_max");
        }
        for g in batch.specs() {
            k += 1;
            out.push(Job { name: format!("{k:03}-{}", g.label()), swarm: g.build().map_err(|e| e.to_string()) });
        }
    }
    if out.is_empty() {
        bail!("config has no runs");
    }
    Ok(out)
}

/// Runs every configured swarm with lemma checks on, writing
/// `traces/<run>.jsonl` and `summary.csv` under the output directory.
pub fn run_experiments(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let lib = load_library(cfg.patterns.as_deref())?;
    let trace_dir = cfg.output_dir.join("traces");
    fs::create_dir_all(&trace_dir).with_context(|| format!("creating {}", trace_dir.display()))?;
    let jobs = jobs(cfg)?;

    let rows = jobs
        .par_iter()
        .map(|job| run_job(cfg, &lib, job, &trace_dir))
        .collect::<Result<Vec<_>>>()?;

    let summary_path = cfg.output_dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&summary_path).with_context(|| format!("creating {}", summary_path.display()))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(ExperimentSummary { rows })
}

fn run_job(cfg: &ExperimentConfig, lib: &PatternLibrary, job: &Job, trace_dir: &Path) -> Result<SummaryRow> {
    let swarm = match &job.swarm {
        Ok(s) => s,
        Err(msg) => {
            return Ok(SummaryRow {
                run: job.name.clone(),
                n: 0,
                boundary: 0,
                rounds: 0,
                bound: 0,
                rounds_per_b2: 0.0,
                violations: 1,
                merges: 0,
                area_increase: 0,
                area_increase_bound: 0,
                outcome: "invalid_input".into(),
                detail: msg.clone(),
            })
        }
    };
    let b = measures(swarm).boundary_len;
    let sim = SimConfig {
        max_rounds: cfg.max_rounds.unwrap_or_else(|| default_max_rounds(b)),
        strict_conflicts: cfg.strict,
        lemma_checks: true,
        record_trace: true,
        parallel: cfg.parallel,
    };
    let trace = run(swarm, lib, &sim);
    write_trace(&trace, &trace_dir.join(format!("{}.jsonl", job.name)))?;
    if cfg.render {
        write_frames(swarm, &trace, &trace_dir.join(format!("{}.frames.txt", job.name)))?;
    }
    Ok(summarize(&job.name, swarm.len(), b, &trace))
}

/// Summary row for one finished run.
pub fn summarize(name: &str, n: usize, b: u64, trace: &Trace) -> SummaryRow {
    let bound = round_bound(b);
    let rounds = trace.rounds_executed();
    let area_increase = trace.area_increase();
    let area_increase_bound = 5 * b * b;
    let mut violations = 0;
    let mut details = Vec::new();
    let outcome = match &trace.outcome {
        Outcome::Gathered { .. } => "gathered".to_string(),
        Outcome::MaxRoundsExceeded => "max_rounds_exceeded".to_string(),
        Outcome::Error { kind, message } => {
            violations += 1;
            details.push(message.clone());
            kind.clone()
        }
    };
    if rounds > bound {
        violations += 1;
        details.push(format!("{rounds} rounds exceed the bound {bound}"));
    }
    if area_increase > area_increase_bound {
        violations += 1;
        details.push(format!("area grew by {area_increase} > {area_increase_bound}"));
    }
    SummaryRow {
        run: name.to_string(),
        n,
        boundary: b,
        rounds,
        bound,
        rounds_per_b2: if b == 0 { 0.0 } else { rounds as f64 / (b * b) as f64 },
        violations,
        merges: trace.total_merges(),
        area_increase,
        area_increase_bound,
        outcome,
        detail: details.join("; "),
    }
}

pub fn write_trace(trace: &Trace, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let m0 = trace.initial_measures;
    let first = RoundLine {
        round: 0,
        hops: 0,
        merges: 0,
        boundary_len: m0.boundary_len,
        convex_count: m0.convex_count,
        convex_measure: m0.convex_measure,
        area: m0.area,
    };
    writeln!(w, "{}", serde_json::to_string(&first)?)?;
    for (i, (r, m)) in trace.rounds.iter().enumerate() {
        let line = RoundLine {
            round: i as u64 + 1,
            hops: r.hops.len(),
            merges: r.merges,
            boundary_len: m.boundary_len,
            convex_count: m.convex_count,
            convex_measure: m.convex_measure,
            area: m.area,
        };
        writeln!(w, "{}", serde_json::to_string(&line)?)?;
    }
    w.flush()?;
    Ok(())
}

/// Replays the recorded hops and writes every frame.
fn write_frames(initial: &Swarm, trace: &Trace, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for (i, frame) in frames(initial, trace).iter().enumerate() {
        writeln!(w, "round {i}")?;
        write!(w, "{}", render_frame(frame))?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Every configuration of a traced run, starting with the initial one.
pub fn frames(initial: &Swarm, trace: &Trace) -> Vec<Swarm> {
    let mut out = vec![initial.clone()];
    let mut current = initial.clone();
    for (r, _) in &trace.rounds {
        let moved: std::collections::BTreeSet<_> = r.hops.iter().map(|&(from, _)| from).collect();
        current = Swarm::from_cells_unchecked(
            current
                .iter()
                .filter(|c| !moved.contains(c))
                .chain(r.hops.iter().map(|&(_, to)| to)),
        );
        out.push(current.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_map;

    #[test]
    fn render_examples() {
        assert_eq!(render_frame(&parse_map("##\n##\n").unwrap()), "##\n##\n");
        assert_eq!(render_frame(&parse_map("#\n").unwrap()), "#\n");
        let s = parse_map("..#\n.##\n##.\n").unwrap();
        assert_eq!(parse_map(&render_frame(&s)).unwrap(), s.normalized());
    }

    #[test]
    fn batch_is_deterministic() {
        let b = RandomBatch { count: 5, n_min: 2, n_max: 150, seed: 7 };
        assert_eq!(b.specs(), b.specs());
        for g in b.specs() {
            match g {
                GeneratorSpec::RandomConnected { n, .. } => assert!((2..=150).contains(&n)),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn config_paths_are_relative_to_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        fs::write(&path, "output_dir = \"o\"\n[[run]]\ninput = \"s.txt\"\n").unwrap();
        let cfg = load_config(&path).unwrap();
        assert_eq!(cfg.output_dir, dir.path().join("o"));
        assert_eq!(cfg.runs[0].input.as_deref(), Some(dir.path().join("s.txt").as_path()));
        assert!(cfg.strict);

        fs::write(&path, "output_dir = \"o\"\nbogus = 1\n").unwrap();
        assert!(load_config(&path).is_err());
    }

    #[test]
    fn bad_inputs_become_failed_rows() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("split.txt"), "#.#\n").unwrap();
        let cfg = ExperimentConfig {
            output_dir: dir.path().join("out"),
            patterns: None,
            max_rounds: None,
            strict: true,
            render: false,
            parallel: false,
            runs: vec![
                RunSpec { name: Some("split".into()), generator: None, input: Some(dir.path().join("split.txt")) },
                RunSpec { name: Some("ring".into()), generator: Some(GeneratorSpec::SquareRing { side: 5 }), input: None },
            ],
            random_batches: vec![],
        };
        let summary = run_experiments(&cfg).unwrap();
        assert!(!summary.all_ok());
        assert_eq!(summary.rows[0].outcome, "invalid_input");
        assert!(summary.rows[1].ok(), "{:?}", summary.rows[1]);
        let trace = fs::read_to_string(dir.path().join("out/traces/ring.jsonl")).unwrap();
        assert!(trace.lines().next().unwrap().starts_with("{\"round\":0,"));
    }
}
