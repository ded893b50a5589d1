use thiserror::Error;

use crate::grid::Coord;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("swarm is empty")]
    Empty,
    #[error("swarm is not 4-connected")]
    Disconnected,
    #[error("snapshot center {0} is not occupied")]
    UnoccupiedCenter(Coord),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("pattern file is empty")]
    EmptyFile,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("pattern `{id}`: {msg}")]
    Invalid { id: String, msg: String },
    #[error("duplicate pattern id `{0}`")]
    DuplicateId(String),
    #[error("library is missing required patterns: {0}")]
    Inventory(String),
}

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error("ambiguous hop: patterns {patterns:?} imply distinct targets {targets:?}")]
    Ambiguous { patterns: Vec<String>, targets: Vec<Coord> },
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid input swarm: {0}")]
    InvalidInput(#[from] GridError),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("robot at {robot}: {source}")]
    Ambiguous {
        robot: Coord,
        #[source]
        source: DecisionError,
    },
    #[error("round {round}: swarm became disconnected after the move")]
    Disconnected { round: u64 },
    #[error("round {round}: {measure} violated its progress lemma ({detail})")]
    LemmaViolation { round: u64, measure: &'static str, detail: String },
}

impl EngineError {
    /// Short machine-readable tag used in traces and summaries.
    pub fn kind(&self) -> &'static str {
        match self {
            EngineError::InvalidInput(_) => "invalid_input",
            EngineError::Precondition(_) => "precondition",
            EngineError::Ambiguous { .. } => "ambiguous_hop",
            EngineError::Disconnected { .. } => "disconnected",
            EngineError::LemmaViolation { .. } => "lemma_violation",
        }
    }
}
