//! Error types shared across the crate.

use std::fmt;

use thiserror::Error;

/// One problem found while parsing or validating a scenario table, tied to
/// where it was found in the input when a location is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Human-readable location, e.g. `line 12` or `record 3`.
    pub location: Option<String>,
    /// What is wrong.
    pub message: String,
}

impl Violation {
    pub fn new(location: Option<String>, message: impl Into<String>) -> Self {
        Self {
            location,
            message: message.into(),
        }
    }

    pub fn at_line(line: u64, message: impl Into<String>) -> Self {
        Self::new(Some(format!("line {line}")), message)
    }

    pub fn at_record(index: usize, message: impl Into<String>) -> Self {
        Self::new(Some(format!("record {index}")), message)
    }

    pub fn global(message: impl Into<String>) -> Self {
        Self::new(None, message)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.location {
            Some(loc) => write!(f, "{loc}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn list_violations(kind: &str, violations: &[Violation]) -> String {
    let mut out = format!("{kind} failed with {} problem(s):", violations.len());
    for v in violations {
        out.push_str("\n  - ");
        out.push_str(&v.to_string());
    }
    out
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A strategy or matrix does not match the axis it is paired with.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A game failed its structural invariants at construction.
    #[error("invalid game: {0}")]
    InvalidGame(String),

    /// A mixed strategy failed its invariants at construction.
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    /// Equilibrium enumeration was asked for a game above the supported size.
    #[error("game is {rows}x{cols}; enumeration supports at most {max}x{max}")]
    GameTooLarge {
        rows: usize,
        cols: usize,
        max: usize,
    },

    /// The input could not be read as rows of the documented format.
    #[error("{}", list_violations("parse", .0))]
    Parse(Vec<Violation>),

    /// The rows parsed but the table invariants do not hold.
    #[error("{}", list_violations("validation", .0))]
    Validation(Vec<Violation>),

    /// A lookup key is absent from the table.
    #[error("missing table entry: {key}")]
    MissingEntry { key: String },

    /// The requested dataset is not in the table.
    #[error("unknown dataset '{name}'; available: {}", .available.join(", "))]
    UnknownDataset {
        name: String,
        available: Vec<String>,
    },

    /// The requested attack is not in the dataset.
    #[error("unknown attack '{name}' for dataset '{dataset}'; available: {}", .available.join(", "))]
    UnknownAttack {
        dataset: String,
        name: String,
        available: Vec<String>,
    },

    /// A game build needs at least one attack in the dataset.
    #[error("dataset '{dataset}' has no attacks")]
    NoAttacks { dataset: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// All violations carried by a parse or validation error, empty otherwise.
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Parse(v) | Error::Validation(v) => v,
            _ => &[],
        }
    }
}
