//! Separated variational eigenproblems behind the bound `γ ≥ 4`.
//!
//! Minimizing `γ = Δr·Δp` at fixed norm and Δp leads to a Schrödinger-like
//! equation in `κ = k/Δp`. It separates into a Coulomb-like radial problem
//! with charge `γ` and the monopole-harmonic angular problem; requiring the
//! bound-state energy to equal `−γ` gives `γ = (n_r + j + 1)²`.

mod angular;
mod oscillator;
mod radial;
mod residual;
mod shooting;

pub use angular::solve_angular;
pub use oscillator::{ho_baseline, ho_ground_spreads, oscillator_state};
pub use radial::{
    radial_coulomb_energy, solve_gamma, solve_radial_coulomb, solve_radial_coulomb_with, RadialOptions,
    TAIL_TOLERANCE,
};
pub use residual::pde_residual;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Radial,
    Angular,
    Oscillator,
}

/// `j` holds the orbital quantum number `l` for oscillator states. `m` and
/// `lambda` are 0 where they do not apply (radial and oscillator states).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumNumbers {
    pub n_r: usize,
    pub j: usize,
    pub m: i32,
    pub lambda: i32,
}

/// An eigenvalue with its eigenfunction sampled as `(coordinate, value)`,
/// normalized under `κ²dκ` (radial), `sinθ dθ` (angular) or `dr` for
/// `u = rR` (oscillator).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub eigenvalue: f64,
    pub samples: Vec<(f64, f64)>,
    pub quantum_numbers: QuantumNumbers,
    pub kind: SolutionKind,
}
