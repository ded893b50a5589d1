use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use gather::engine::{default_max_rounds, run, Outcome, SimConfig};
use gather::harness::{self, frames, load_config, load_library, read_swarm, render_frame, run_experiments, summarize};
use gather::metrics::measures;

#[derive(Parser)]
#[command(name = "gather", version, about = "Oblivious robot gathering on the grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every swarm of an experiment config and write traces and a summary.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Simulate one swarm until it is gathered.
    Simulate {
        #[arg(long)]
        input: PathBuf,
        /// Print every frame.
        #[arg(long)]
        render: bool,
        #[arg(long)]
        max_rounds: Option<u64>,
        /// Fail on conflicting hop decisions instead of staying.
        #[arg(long)]
        strict: bool,
    },
    /// Print the progress measures of a swarm.
    Measure {
        #[arg(long)]
        input: PathBuf,
    },
    /// Parse and validate a pattern file.
    ValidatePatterns {
        #[arg(long)]
        patterns: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            let summary = run_experiments(&cfg)?;
            let failed: Vec<_> = summary.rows.iter().filter(|r| !r.ok()).collect();
            println!(
                "{} runs, {} failed; summary in {}",
                summary.rows.len(),
                failed.len(),
                cfg.output_dir.join("summary.csv").display()
            );
            for r in &failed {
                println!("  {}: {} {}", r.run, r.outcome, r.detail);
            }
            Ok(failed.is_empty())
        }
        Command::Simulate { input, render, max_rounds, strict } => {
            let lib = load_library(None)?;
            let swarm = read_swarm(&input)?;
            let b = measures(&swarm).boundary_len;
            let cfg = SimConfig {
                max_rounds: max_rounds.unwrap_or_else(|| default_max_rounds(b)),
                strict_conflicts: strict,
                ..SimConfig::default()
            };
            let trace = run(&swarm, &lib, &cfg);
            if render {
                for (i, f) in frames(&swarm, &trace).iter().enumerate() {
                    println!("round {i}");
                    print!("{}", render_frame(f));
                    println!();
                }
            }
            for (m, i) in trace.measures().zip(0..) {
                println!(
                    "round {i}: boundary {} convex {} measure {} area {}",
                    m.boundary_len, m.convex_count, m.convex_measure, m.area
                );
            }
            let row = summarize(&input.display().to_string(), swarm.len(), b, &trace);
            match &trace.outcome {
                Outcome::Gathered { round } => println!("gathered after {round} rounds (bound {})", row.bound),
                Outcome::MaxRoundsExceeded => println!("not gathered after {} rounds", cfg.max_rounds),
                Outcome::Error { message, .. } => println!("error: {message}"),
            }
            if !row.detail.is_empty() {
                println!("{}", row.detail);
            }
            Ok(row.ok())
        }
        Command::Measure { input } => {
            let swarm = read_swarm(&input)?;
            println!("{}", serde_json::to_string_pretty(&measures(&swarm))?);
            Ok(true)
        }
        Command::ValidatePatterns { patterns } => {
            let lib = harness::load_library(Some(&patterns))?;
            println!("{}: version {}, {} patterns", patterns.display(), lib.version, lib.specs.len());
            for p in &lib.specs {
                println!("  {} {}", p.id, p.kind);
            }
            Ok(true)
        }
    }
}
