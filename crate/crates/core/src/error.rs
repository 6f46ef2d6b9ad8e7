use thiserror::Error;

/// Errors raised by the tangle and convex-roof routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An input object violates one of its structural invariants.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("descriptor `{name}` expects {expected} qubits, got {got}")]
    DescriptorMismatch {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("state is not normalized: squared norm {norm_sqr}")]
    Normalization { norm_sqr: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    /// The operator has support outside the two-dimensional range it is expanded in.
    #[error("range error: support leaks outside the span by {leak:e}")]
    Range { leak: f64 },

    #[error("unsupported rank {0}; expected a rank-2 density matrix")]
    UnsupportedRank(usize),

    #[error("isometry condition violated for columns ({0}, {1}): deviation {2:e}")]
    NonIsometric(usize, usize, f64),

    #[error("no affine gap adjoins the {0} end of the curve")]
    NotApplicable(&'static str),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
