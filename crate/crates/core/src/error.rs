use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("word {0} is not admissible")]
    InadmissibleWord(String),

    #[error("depth {given} is too small, at least {required} is needed")]
    DepthTooSmall { required: usize, given: usize },

    #[error("operands live on different spaces")]
    SpaceMismatch,

    #[error("module cocycle condition fails for generators {i} and {j}")]
    CocycleCondition { i: usize, j: usize },

    #[error("maps {i} and {j} do not commute")]
    NonCommuting { i: usize, j: usize },

    #[error("not primitive: {0}")]
    NotPrimitive(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("missing certificate: {0}")]
    MissingCertificate(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("measure has no refinement rule")]
    NoRefinementRule,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
