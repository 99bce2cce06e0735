use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A level, depth or complexity does not fit the mesh resolution.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// Two objects live on different meshes.
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),
    /// An axis or grid does not match what the operation expects.
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),
    /// A cube was used with a grid it does not belong to.
    #[error("cube {0} is not a member of the grid")]
    NotInGrid(String),
    /// Invalid argument value.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Exponent arithmetic failed validation.
    #[error("exponent error: {0}")]
    Exponent(String),
    /// A Monte-Carlo estimate was requested with no samples.
    #[error("no shift samples requested")]
    NoSamples,
    /// A measure-zero set was supplied where positive measure is required.
    #[error("set has measure zero")]
    EmptySet,
    /// Input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
