use thiserror::Error;

/// Errors raised by the numerics engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("{family} family is inapplicable at r = {r}: {reason}")]
    FamilyInapplicable {
        family: &'static str,
        r: String,
        reason: String,
    },

    #[error("divergent series: |z| = {0} is not below 1")]
    Divergent(String),

    #[error("evaluation failed at node {node}: {reason}")]
    Evaluation { node: usize, reason: String },

    #[error("root index {index} out of range: polynomial has {count} real roots")]
    RootIndex { index: usize, count: usize },

    #[error("lattice rows are linearly dependent")]
    DependentRows,

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("result did not stabilize under precision escalation: {0}")]
    NotConverged(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
