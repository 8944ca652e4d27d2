use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("no simple {d}-regular pairing on {n} vertices after {attempts} attempts")]
    RejectionBudget { n: usize, d: usize, attempts: u64 },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("canonical form is limited to {cap} vertices, graph has {n}")]
    CanonCapExceeded { n: usize, cap: usize },

    #[error("switch precondition violated: {0}")]
    SwitchPrecondition(String),

    #[error("resampling data inconsistent with graph: {0}")]
    InconsistentData(String),

    #[error("spectral parameter {0} is not in the upper half-plane")]
    NotUpperHalfPlane(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("degenerate pivot: |G_jj| = {0:e}")]
    DegeneratePivot(f64),

    #[error("matrix is numerically singular")]
    Singular,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures of a numerical routine, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Eigensolver(_) | Error::DegeneratePivot(_) | Error::Singular
        )
    }
}
