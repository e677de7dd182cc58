//! Error type shared across the crate.

use alloc::string::String;

/// Errors produced by model construction, numerical routines, and samplers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidInput(String),
    /// A covariance factorization failed even after diagonal jitter.
    ///
    /// `pivot` is the first column whose pivot went non-positive and `value`
    /// the offending pivot value; `jitter` is the largest jitter tried.
    Factorization {
        size: usize,
        pivot: usize,
        value: f64,
        jitter: f64,
    },
    /// Sequential inhibition ran out of admissible lattice points.
    PackingInfeasible { placed: usize, requested: usize },
    /// Every grid node had zero prior mass, so no field can be normalized.
    EmptySupport,
    /// A series had zero variance, so autocorrelations are undefined.
    ZeroVariance,
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Factorization {
                size,
                pivot,
                value,
                jitter,
            } => write!(
                f,
                "covariance factorization failed ({size}x{size} matrix, \
                 pivot {pivot} = {value:e} after jitter {jitter:e})"
            ),
            Error::PackingInfeasible { placed, requested } => write!(
                f,
                "inhibition packing infeasible: placed {placed} of {requested} points \
                 before running out of admissible lattice sites"
            ),
            Error::EmptySupport => {
                write!(f, "prior support does not intersect the evaluation grid")
            }
            Error::ZeroVariance => write!(f, "series is constant; autocorrelation undefined"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl core::fmt::Display) -> Error {
    Error::InvalidInput(alloc::format!("{msg}"))
}
