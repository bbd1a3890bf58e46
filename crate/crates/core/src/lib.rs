//! Three-dimensional position–momentum uncertainty for single photons.
//!
//! Photon states are described by two helicity amplitudes `f_±(k)` on
//! momentum space. The position spread is the second moment of the energy
//! density, which in momentum space becomes a covariant-derivative
//! functional built from the polarization connection. The product
//! `γ = Δr·Δp/ħ` is bounded below by 4, with equality for one explicit
//! family whose real-space field is a null Maxwell field of Whittaker type.
//!
//! Units are `ħ = c = 1` throughout unless a function says otherwise.

// Guards such as `!(x > 0.0)` are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod field;
pub mod functionals;
pub mod lightcone;
pub mod momentum;
pub mod numeric;
pub mod variational;

pub use error::{Error, Result};
pub use families::saturating_amplitude;
pub use functionals::{delta_p, delta_r_cartesian, delta_r_spherical, gamma, SpreadForm, SpreadResult, UncertaintyReport};
pub use lightcone::{Axis, PolarizationFrame};
pub use momentum::{build_grid, Amplitude, Helicity, HelicityAmplitudes, MomentumGrid, SphericalPoint};
