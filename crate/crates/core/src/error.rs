use thiserror::Error;

use crate::quadrature::QuadError;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {re} + {im}i is outside the closed upper half-plane or is zero")]
    Domain { re: f64, im: f64 },
    #[error("dimension {0} is not supported: expected an odd integer >= 3")]
    InvalidDimension(u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no sign change of Re rho along the ray at angle {theta} up to radius {cap}")]
    NoBracket { theta: f64, cap: f64 },
    #[error("quadrature failed at angle {theta}: {source}")]
    Quadrature { theta: f64, source: QuadError },
    #[error("channel determinant vanishes on the contour near {re} + {im}i")]
    BoundaryZero { re: f64, im: f64 },
    #[error("argument principle step control failed near {re} + {im}i")]
    NonIntegerWinding { re: f64, im: f64 },
    #[error("|Im k| a = {depth} exceeds the supported search depth {cap}")]
    Overflow { depth: f64, cap: f64 },
    #[error("channel l = {l}: {source}")]
    Channel { l: u32, source: Box<Error> },
    #[error("radius {r} exceeds the search radius {limit}")]
    OutOfRange { r: f64, limit: f64 },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("negative mass {0} in a discrete measure")]
    NegativeMass(f64),
    #[error("config line {line}, field `{field}`: {message}")]
    Config {
        line: usize,
        field: String,
        message: String,
    },
    #[error("schema version {found} does not match the supported version {expected}")]
    Schema { found: u32, expected: u32 },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
