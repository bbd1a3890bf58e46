use thiserror::Error;

use crate::lightcone::Axis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("k = ({:e}, {:e}, {:e}) lies on the Dirac string of the {axis}-axis frame", k[0], k[1], k[2])]
    StringSingularity { axis: Axis, k: [f64; 3] },

    #[error("non-finite {quantity} at node k = {k:e}, theta = {theta:e}, phi = {phi:e}")]
    NonFinite {
        quantity: &'static str,
        k: f64,
        theta: f64,
        phi: f64,
    },

    #[error("{0} is undefined for an amplitude with zero norm")]
    ZeroNorm(&'static str),

    #[error("not converged: {0}")]
    Convergence(String),

    #[error("domain cutoff {cutoff} too small: eigenfunction tail {tail:e} exceeds 1e-10")]
    Cutoff { cutoff: f64, tail: f64 },

    #[error("root bracket [{lo}, {hi}] has no sign change (g(lo) = {g_lo:e}, g(hi) = {g_hi:e})")]
    Bracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("spatial grid carries no cubature weights")]
    MissingWeights,

    #[error(
        "truncated tail holds {tail_fraction:e} of the moment (limit {tolerance:e}); use a radius of at least {suggested_radius}"
    )]
    Truncation {
        tail_fraction: f64,
        tolerance: f64,
        suggested_radius: f64,
    },

    #[error("point at |r| = {radius} is beyond twice the phase-resolved radius {trusted}")]
    PhaseResolution { radius: f64, trusted: f64 },
}
