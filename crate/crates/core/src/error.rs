//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad input data or configuration (maps to CLI exit code 1).
    #[error("validation error: {0}")]
    Validation(String),

    /// A precondition of an operation was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// A table or budget is too small for the request (CLI exit code 3).
    #[error("resource error: {0}")]
    Resource(String),

    /// An iterative numerical method failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The argument walk hit a zero of L on or too close to the path.
    #[error("zero on path near sigma = {sigma:.6}, t = {t:.6}")]
    ZeroOnPath { sigma: f64, t: f64 },

    /// Boundary phase tracking could not isolate the winding of a segment.
    #[error("zero too close to contour near ({re:.6}, {im:.6})")]
    ZeroOnBoundary { re: f64, im: f64 },

    /// Line-vs-rectangle zero accounting failed to balance.
    #[error("unresolved zero audit on window [{t1:.6}, {t2:.6}]: {detail}")]
    UnresolvedWindow { t1: f64, t2: f64, detail: String },

    /// A zero list does not cover the window an operation requires.
    #[error("zero list coverage error: {0}")]
    Coverage(String),

    #[error("functional-equation inconsistency: {0}")]
    FeInconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }
}
