//! Simulator and invariant monitor for oblivious, fully synchronous robot
//! gathering on the square grid.
//!
//! Robots see everything within L1 distance 7, hop to one of their eight
//! neighbouring cells according to a library of local patterns, and merge
//! when they land on one cell. The [`metrics`] module computes the three
//! progress measures and [`engine::run`] checks them round by round.

pub mod engine;
pub mod error;
pub mod generators;
pub mod grid;
pub mod harness;
pub mod metrics;
pub mod patterns;

pub use engine::{is_gathered, run, step, Outcome, RoundResult, SimConfig, Trace};
pub use error::{DecisionError, EngineError, GridError, PatternError};
pub use grid::{Coord, Snapshot, Swarm, Transform};
pub use metrics::{measures, ProgressMeasures};
pub use patterns::{find_hop, load_patterns, HopAction, HopDecision, PatternLibrary};
