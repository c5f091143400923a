use thiserror::Error;

use crate::history::History;

/// Errors raised by construction and by operator preconditions. Verdicts are
/// never errors: a check that ran and said "no" returns `holds = false`.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid interface: {0}")]
    BadInterface(String),

    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),

    #[error("invalid distribution: {0}")]
    BadDistribution(String),

    #[error("invalid machine: {0}")]
    BadMachine(String),

    #[error("agent basis must be non-empty")]
    EmptyBasis,

    #[error("learning-rule list must be non-empty")]
    EmptyRules,

    #[error("participant list must be non-empty")]
    EmptyParticipants,

    #[error("prefix is not realizable: first unrealizable step at position {position} of {prefix:?}")]
    UnrealizablePrefix { prefix: History, position: usize },

    #[error("only {available} realizable histories up to depth {horizon}, need at least {needed}")]
    TooFewHistories {
        available: usize,
        needed: usize,
        horizon: usize,
    },

    #[error("discounted value of a table agent needs an explicit truncation depth")]
    TruncationRequired,

    #[error("no subset of the candidate pool generates the target")]
    NoBasisInPool,

    #[error("state/action spaces differ across suite members: {0}")]
    SpaceMismatch(String),

    #[error("could not generate {wanted} layouts with pairwise-distinct optimal policies in {attempts} attempts")]
    DistinctnessUnachievable { wanted: usize, attempts: usize },

    #[error("schedule label {0:?} is not in the action alphabet")]
    LabelOutsideActions(String),

    #[error("invalid specification: {0}")]
    BadSpec(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
