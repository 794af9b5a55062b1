use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operands live on different measure spaces")]
    SpaceMismatch,

    #[error("structural error: {0}")]
    Structural(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate off-diagonal atom `{atom}`: x = {x} is not strictly inside (0, 1)")]
    DegenerateOffDiagonal { atom: String, x: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("measure lookup failed at atom `{atom}`: {detail}")]
    Lookup { atom: String, detail: String },

    #[error("not a measure at atom `{atom}` (direction {direction}): {detail}")]
    NotAMeasure {
        atom: String,
        direction: usize,
        detail: String,
    },

    #[error("inconsistent densities: {detail}")]
    InconsistentDensities { detail: String },

    #[error("construction aborted at atom `{atom}`, direction {direction}: {source}")]
    Construction {
        atom: String,
        direction: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("direction not registered for atom `{atom}` (x = {x}, v = {v})")]
    DirectionNotRegistered { atom: String, x: f64, v: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
