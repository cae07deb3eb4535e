use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("derivative order must be 1 or 2, got {0}")]
    DerivativeOrder(u8),

    #[error("covariance matrix contains non-finite entries")]
    NonFinite,

    #[error("source count {sources} out of range for {sensors} sensors")]
    SourceCount { sources: usize, sensors: usize },

    /// Fewer spectral peaks than requested sources; the array failed to resolve them.
    #[error("found {found} spectral peak(s) but {wanted} requested (deficit {})", wanted - found)]
    PeakDeficit { found: usize, wanted: usize },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("geometries {first} and {second} have different array lengths ({first_len} vs {second_len} wavelengths)")]
    UnequalLength {
        first: String,
        second: String,
        first_len: f64,
        second_len: f64,
    },

    #[error("RMSE of an empty error list")]
    EmptyErrors,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}
