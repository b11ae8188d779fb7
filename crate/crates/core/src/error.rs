use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants map one-to-one onto the CLI exit codes: parameter and domain
/// problems are validation failures, everything else is numerical.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model parameter violates its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A point or coordinate lies outside the domain of an operation.
    #[error("outside domain: {0}")]
    Domain(String),

    /// Malformed input data (degenerate grids, mismatched lengths).
    #[error("invalid input: {0}")]
    Input(String),

    /// Incompatible boundary conditions or mesh layout.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// The mesh cannot resolve the requested feature.
    #[error("mesh resolution: {0}")]
    MeshResolution(String),

    /// Too few usable points for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A solver failed to converge or bracket.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
