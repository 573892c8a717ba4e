use thiserror::Error;

/// Errors raised by the analysis operations.
///
/// Infeasibility of a run is never an error (it is reported as an absent
/// value); these variants cover malformed inputs, violated preconditions,
/// exhausted budgets and internal assertion failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VasError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} is out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("vectors have different projected components")]
    ProjectionMismatch,

    #[error("configuration slot {slot} is negative")]
    NegativeSlot { slot: usize },

    #[error("integer overflow")]
    Overflow,

    #[error("invalid vector addition system: {0}")]
    InvalidVas(String),

    #[error("invalid subreachability graph: {0}")]
    InvalidGraph(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid extractor: {0}")]
    InvalidExtractor(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no path from state {from} to state {to}")]
    NoPath { from: usize, to: usize },

    #[error("simple-cycle enumeration exceeded the cap of {0} cycles")]
    CycleCapExceeded(usize),

    #[error("{what} budget of {limit} exceeded")]
    BudgetExceeded { what: &'static str, limit: u64 },

    #[error("count assigned to a triple that is not a transition: {0}")]
    NotATransition(String),

    #[error("flow is unbalanced at state {0}")]
    FlowImbalance(usize),

    #[error("Kirchhoff function is not total")]
    NotTotal,

    #[error("vector is not a displacement of the graph")]
    NotInMonoid,

    #[error("witness graph is not reversible")]
    NotReversible,

    #[error("cycle anchor does not equal the projection of the configuration")]
    AnchorMismatch,

    #[error("stage `{stage}` failed: {detail}")]
    Pipeline { stage: &'static str, detail: String },
}

pub type Result<T, E = VasError> = std::result::Result<T, E>;

pub(crate) fn stage_failure(stage: &'static str, detail: impl Into<String>) -> VasError {
    VasError::Pipeline {
        stage,
        detail: detail.into(),
    }
}
