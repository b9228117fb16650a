use thiserror::Error;

use crate::route::{Photon, Route};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("route {route} takes {expected} detunings, got {got}")]
    Arity { route: Route, expected: usize, got: usize },

    #[error("route {route} is not a {expected}-photon route")]
    WrongRoute { route: Route, expected: usize },

    #[error("photon {photon} does not belong to route {route}")]
    UnknownPhoton { route: Route, photon: Photon },

    #[error("free axes and fixed photons must partition route {route}: {reason}")]
    Partition { route: Route, reason: String },

    #[error("grid needs at least 2 points per axis, got {0}")]
    GridTooSmall(usize),

    #[error("grid half width must be positive and finite, got {0}")]
    GridWidth(f64),

    #[error("grid of {cells} cells exceeds the limit of {limit}")]
    GridTooLarge { cells: usize, limit: usize },

    #[error("amplitude grid is identically zero")]
    ZeroGrid,

    #[error("amplitude grid contains non-finite values")]
    NonFinite,

    #[error("negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error("eigenvalues sum to {0}, expected 1")]
    Unnormalized(f64),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error(
        "phase matching solver {reason} after {iterations} iterations \
         (theta_i = {theta_i}, theta_s = {theta_s}, |r| = {residual:e})"
    )]
    Solver {
        reason: &'static str,
        iterations: usize,
        theta_i: f64,
        theta_s: f64,
        residual: f64,
    },
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(err: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(err.to_string())
    }
}
