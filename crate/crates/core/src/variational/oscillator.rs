//! Harmonic-oscillator baseline for the usual `σ_r σ_p` uncertainty product.
//!
//! In units of `σ_r` the variational equation reads
//! `½[−Δ + ϖ²r²]ψ = ϖ²ψ`. The left operator has eigenvalues `ϖ(n + 3/2)`,
//! found here numerically; `ϖ` is then fixed by self-consistency.

use super::shooting::{dirichlet_eigenvalue, eigenfunction, gradient, tail_amplitude, Mesh, RadialEquation};
use super::{EigenSolution, QuantumNumbers, SolutionKind};
use crate::error::{Error, Result};
use crate::numeric::{bisect, simpson_uniform};

const STEPS: usize = 20_000;

fn equation(n: usize, varpi: f64) -> (RadialEquation, Mesh, usize) {
    let l = n % 2;
    let x_max = ((2 * n) as f64 + 93.0).sqrt() / varpi.sqrt();
    (RadialEquation { l, z: 0.0, w2: varpi * varpi }, Mesh::new(x_max, STEPS), n / 2)
}

/// Level `n` of `½[−Δ + ϖ²r²]` (angular momentum `l = n mod 2`), with the
/// normalized radial function `u = r·R`.
pub fn oscillator_state(n: usize, varpi: f64) -> Result<EigenSolution> {
    if !(varpi > 0.0) || !varpi.is_finite() {
        return Err(Error::InvalidArgument(format!("ϖ must be positive, got {varpi}")));
    }
    let (eq, mesh, n_r) = equation(n, varpi);
    let e2 = dirichlet_eigenvalue(&eq, n_r, &mesh, 0.0, varpi, true)?;
    let u = eigenfunction(&eq, e2, &mesh)?;
    let tail = tail_amplitude(&u, &mesh);
    if tail > 1e-10 {
        return Err(Error::Cutoff { cutoff: mesh.x_max(), tail });
    }
    Ok(EigenSolution {
        eigenvalue: 0.5 * e2,
        samples: (0..=mesh.n).map(|i| (mesh.x(i), u[i])).collect(),
        quantum_numbers: QuantumNumbers { n_r, j: eq.l, m: 0, lambda: 0 },
        kind: SolutionKind::Oscillator,
    })
}

fn oscillator_level(n: usize, varpi: f64) -> Result<f64> {
    let (eq, mesh, n_r) = equation(n, varpi);
    Ok(0.5 * dirichlet_eigenvalue(&eq, n_r, &mesh, 0.0, varpi, true)?)
}

/// Self-consistent `ϖ` for level `n`: root of `ε(ϖ) − ϖ²` on `[0.5, 2n+4]`.
pub fn ho_baseline(n: usize) -> Result<f64> {
    bisect(|w| Ok(oscillator_level(n, w)? - w * w), 0.5, 2.0 * n as f64 + 4.0, 1e-13)
}

/// Position and momentum spreads `(σ_r, σ_p)` of the ground state, measured
/// from the numerical eigenfunction and rescaled to a Gaussian of width `a`
/// (`|ψ|² ∝ e^{−r²/a²}`).
pub fn ho_ground_spreads(a: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    let varpi = ho_baseline(0)?;
    let state = oscillator_state(0, varpi)?;
    let h = state.samples[1].0 - state.samples[0].0;
    let u: Vec<f64> = state.samples.iter().map(|s| s.1).collect();
    let du = gradient(&u, h);
    let r2 = simpson_uniform(&state.samples.iter().map(|(x, v)| x * x * v * v).collect::<Vec<_>>(), h);
    let p2 = simpson_uniform(&du.iter().map(|d| d * d).collect::<Vec<_>>(), h);
    let width = a * varpi.sqrt();
    Ok((r2.sqrt() * width, p2.sqrt() / width))
}
