use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state vector is not normalized: squared norm is {norm}")]
    InvalidState { norm: f64 },

    #[error("invalid setting policy: {0}")]
    InvalidPolicy(String),

    #[error("requested an empty dataset (n = 0)")]
    EmptyDataset,

    #[error("posterior over the initial label is degenerate: {0}")]
    DegeneratePosterior(String),

    #[error("selection kept nothing: {0}")]
    EmptySelection(String),

    #[error("edge {from} -> {to} closes a directed cycle")]
    Cycle { from: String, to: String },

    #[error("self-loop on node `{0}`")]
    SelfLoop(String),

    #[error("duplicate edge {from} -> {to}")]
    DuplicateEdge { from: String, to: String },

    #[error("duplicate node `{0}`")]
    DuplicateNode(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` appears in more than one of X, Y, Z")]
    OverlappingSets(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{var}` has no level `{level}`")]
    UnknownLevel { var: String, level: String },

    #[error("bad probability table: {0}")]
    BadTable(String),

    #[error("bad CPT for `{node}`: {reason}")]
    BadCpt { node: String, reason: String },

    #[error("state space has {size} configurations, limit is {limit}")]
    StateSpaceTooLarge { size: u128, limit: u128 },

    #[error("conditioning event has zero probability: {0}")]
    ZeroProbabilityEvidence(String),

    #[error("`{0}` is not a collider (fewer than two parents)")]
    NotACollider(String),

    #[error("constraint target misuse: {0}")]
    ConstraintTarget(String),

    #[error("counterfactual is infeasible: {0}")]
    InfeasibleCounterfactual(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("csv parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
