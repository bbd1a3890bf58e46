//! Coulomb-like radial problem in the dimensionless momentum variable κ and
//! the self-consistent γ it implies.

use super::shooting::{dirichlet_eigenvalue, eigenfunction, tail_amplitude, Mesh, RadialEquation};
use super::{EigenSolution, QuantumNumbers, SolutionKind};
use crate::error::{Error, Result};
use crate::numeric::bisect;

pub const TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOptions {
    /// Domain cutoff; `None` picks `(40 + 4n)/√|E_est|` with
    /// `E_est = −Z²/n²`, `n = n_r + j + 1`.
    pub kappa_max: Option<f64>,
    pub steps: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions { kappa_max: None, steps: 20_000 }
    }
}

fn principal(n_r: usize, j: usize) -> f64 {
    (n_r + j + 1) as f64
}

fn check_args(z: f64, j: usize) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("Z must be positive and finite, got {z}")));
    }
    if j == 0 {
        return Err(Error::InvalidArgument("j must be at least 1".into()));
    }
    Ok(())
}

fn setup(z: f64, j: usize, n_r: usize, opts: &RadialOptions) -> Result<(RadialEquation, Mesh)> {
    check_args(z, j)?;
    if opts.steps < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 radial steps, got {}", opts.steps)));
    }
    let n = principal(n_r, j);
    let kappa_max = match opts.kappa_max {
        Some(k) if k > 0.0 && k.is_finite() => k,
        Some(k) => return Err(Error::InvalidArgument(format!("invalid κ cutoff {k}"))),
        None => (40.0 + 4.0 * n) / (z / n),
    };
    Ok((RadialEquation { l: j, z, w2: 0.0 }, Mesh::new(kappa_max, opts.steps)))
}

fn level(eq: &RadialEquation, mesh: &Mesh, n_r: usize) -> Result<f64> {
    let j = eq.l as f64;
    let well_bottom = -eq.z * eq.z / (j * (j + 1.0));
    dirichlet_eigenvalue(eq, n_r, mesh, well_bottom, 0.0, false)
}

/// Energy of the `(n_r, j)` bound state of
/// `[−κ⁻²∂_κκ²∂_κ + j(j+1)/κ² − 2Z/κ]K = E·K`, without the eigenfunction.
pub fn radial_coulomb_energy(z: f64, j: usize, n_r: usize) -> Result<f64> {
    let (eq, mesh) = setup(z, j, n_r, &RadialOptions::default())?;
    level(&eq, &mesh, n_r)
}

pub fn solve_radial_coulomb(z: f64, j: usize, n_r: usize) -> Result<EigenSolution> {
    solve_radial_coulomb_with(z, j, n_r, &RadialOptions::default())
}

/// Bound state with explicit domain options. Samples are `(κ, K(κ))` with
/// `∫K²κ²dκ = 1`.
pub fn solve_radial_coulomb_with(z: f64, j: usize, n_r: usize, opts: &RadialOptions) -> Result<EigenSolution> {
    let (eq, mesh) = setup(z, j, n_r, opts)?;
    let e = level(&eq, &mesh, n_r)?;
    let u = eigenfunction(&eq, e, &mesh)?;
    let tail = tail_amplitude(&u, &mesh);
    if tail > TAIL_TOLERANCE {
        return Err(Error::Cutoff { cutoff: mesh.x_max(), tail });
    }
    let samples = (1..=mesh.n).map(|i| (mesh.x(i), u[i] / mesh.x(i))).collect();
    Ok(EigenSolution {
        eigenvalue: e,
        samples,
        quantum_numbers: QuantumNumbers { n_r, j, m: 0, lambda: 0 },
        kind: SolutionKind::Radial,
    })
}

/// γ such that the `(n_r, j)` level of the radial problem with `Z = γ`
/// equals `−γ`; root of `g(γ) = E(γ) + γ` on `[1, 2(n_r+j+2)²]`.
pub fn solve_gamma(n_r: usize, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidArgument("j must be at least 1".into()));
    }
    let hi = 2.0 * ((n_r + j + 2) as f64).powi(2);
    bisect(|g| Ok(radial_coulomb_energy(g, j, n_r)? + g), 1.0, hi, 1e-13)
}
