use thiserror::Error;

use crate::approx::SunReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("functional family is empty")]
    EmptyFamily,

    #[error("functional #{index} has no antipode in the family")]
    NotSymmetric { index: usize },

    #[error("functionals #{first} and #{second} are identical")]
    DuplicateFunctional { first: usize, second: usize },

    #[error("functional family spans a subspace of dimension {rank} < {dim}; the induced gauge is not a norm")]
    Degenerate { rank: usize, dim: usize },

    #[error("functional #{index} contains a non-finite entry")]
    NonFinite { index: usize },

    #[error("{name}({dim}) needs {needed} functionals, over the budget of {budget}")]
    TooLarge {
        name: String,
        dim: usize,
        needed: u128,
        budget: usize,
    },

    #[error("unknown builtin space `{0}`")]
    UnknownBuiltin(String),

    #[error("expected {expected} weights (one per antipodal pair), found {found}")]
    WeightMismatch { expected: usize, found: usize },

    #[error("weight #{index} = {value} is not a positive finite number")]
    InvalidWeight { index: usize, value: f64 },

    #[error("points #{first} and #{second} of the cloud coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("endpoint {0:?} is not a point of the cloud")]
    EndpointNotInCloud(Vec<f64>),

    #[error("no path within the length slack (best achieved length: {achieved:?}, target: {target})")]
    NotFound { achieved: Option<f64>, target: f64 },

    #[error("{0:?} is not a nearest point of the cloud to the query")]
    NotANearestPoint(Vec<f64>),

    #[error("query {0:?} lies in the cloud")]
    QueryInCloud(Vec<f64>),

    #[error("every nearest point was falsified as a luminosity point ({} candidates)", .0.len())]
    NoCandidate(Vec<SunReport>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(expected: usize, v: &[f64]) -> Result<()> {
    if v.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: v.len(),
        });
    }
    Ok(())
}
