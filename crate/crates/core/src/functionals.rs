//! Position spread Δr, momentum spread Δp and their product γ.
//!
//! Δr is the second moment of the energy density, expressed in momentum
//! space through the covariant derivative. The origin is assumed to sit at
//! the center of the energy distribution; no re-centering is attempted.

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lightcone::{cartesian_gradient, PolarizationFrame};
use crate::momentum::{
    mean_momentum, norm_squared, sample_values, sample_with_partials, Helicity, HelicityAmplitudes,
    MomentumGrid,
};
use crate::numeric::stable_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpreadForm {
    CartesianCovariant,
    Spherical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadResult {
    pub value: f64,
    pub form: SpreadForm,
    pub resolution: (usize, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub norm_sq: f64,
    pub mean_k: Vector3<f64>,
    pub delta_r: f64,
    pub delta_p: f64,
    pub gamma: f64,
    pub resolution: (usize, usize, usize),
}

fn finite_or(value: f64, node: &crate::momentum::GridNode) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            quantity: "position-spread integrand",
            k: node.point.k,
            theta: node.point.theta,
            phi: node.point.phi,
        })
    }
}

/// Shared driver: per helicity, sums `w·k·|f|²` (norm) and
/// `w·k²·integrand(λ, node, f, ∂f)` (numerator).
fn spread<F>(amps: &HelicityAmplitudes, grid: &MomentumGrid, form: SpreadForm, integrand: F) -> Result<SpreadResult>
where
    F: Fn(f64, &crate::momentum::GridNode, Complex64, &crate::momentum::Partials) -> Result<f64> + Sync,
{
    let mut norm_parts = Vec::with_capacity(2);
    let mut num_parts = Vec::with_capacity(2);
    for h in Helicity::BOTH {
        let amp = amps.component(h);
        if amp.is_zero() {
            continue;
        }
        let lambda = h.sign();
        let samples = sample_with_partials(amp.as_ref(), grid)?;
        let terms: Vec<(f64, f64)> = grid
            .nodes()
            .par_iter()
            .zip(samples.par_iter())
            .map(|(node, (f, d))| {
                let k = node.point.k;
                let g = finite_or(integrand(lambda, node, *f, d)?, node)?;
                Ok((node.weight * k * f.norm_sqr(), node.weight * k * k * g))
            })
            .collect::<Result<_>>()?;
        norm_parts.push(stable_sum(terms.iter().map(|t| t.0)));
        num_parts.push(stable_sum(terms.iter().map(|t| t.1)));
    }
    let norm = stable_sum(norm_parts);
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm("position spread"));
    }
    Ok(SpreadResult {
        value: stable_sum(num_parts) / norm,
        form,
        resolution: grid.resolution(),
    })
}

/// `Δr = ‖f‖⁻² Σ_λ ∫d³k [|D_λ f_λ|² + k⁻²|f_λ|²]` with Cartesian
/// covariant derivatives in the given frame (gauge phases included).
pub fn delta_r_cartesian(
    amps: &HelicityAmplitudes,
    grid: &MomentumGrid,
    frame: &PolarizationFrame,
) -> Result<SpreadResult> {
    spread(amps, grid, SpreadForm::CartesianCovariant, |lambda, node, f, d| {
        let grad = cartesian_gradient(node.point, d);
        let alpha = frame.alpha(&node.cartesian)?;
        let cov: f64 = (0..3)
            .map(|i| (grad[i] - Complex64::new(0.0, lambda * alpha[i]) * f).norm_sqr())
            .sum();
        let k = node.point.k;
        Ok(cov + f.norm_sqr() / (k * k))
    })
}

/// Spherical-coordinate form of Δr for the z-axis frame without gauge
/// phases, including the `iλ cos θ (f*∂_φ f − f ∂_φ f*)` cross term.
pub fn delta_r_spherical(amps: &HelicityAmplitudes, grid: &MomentumGrid) -> Result<SpreadResult> {
    spread(amps, grid, SpreadForm::Spherical, |lambda, node, f, d| {
        let k = node.point.k;
        let (st, ct) = node.point.theta.sin_cos();
        let cross = Complex64::new(0.0, lambda * ct) * (f.conj() * d.dphi - f * d.dphi.conj());
        let angular = d.dphi.norm_sqr() + f.norm_sqr() + cross.re;
        Ok(d.dk.norm_sqr() + d.dtheta.norm_sqr() / (k * k) + angular / (k * k * st * st))
    })
}

/// `Δp = ‖f‖⁻² Σ_λ ∫(d³k/k) |k − ⟨k⟩| |f_λ|²` (ħ = 1).
pub fn delta_p(amps: &HelicityAmplitudes, grid: &MomentumGrid) -> Result<f64> {
    let mean = mean_momentum(amps, grid)?;
    let mut norm_parts = Vec::new();
    let mut parts = Vec::new();
    for h in Helicity::BOTH {
        let amp = amps.component(h);
        if amp.is_zero() {
            continue;
        }
        let values = sample_values(amp.as_ref(), grid)?;
        let terms: Vec<(f64, f64)> = grid
            .nodes()
            .iter()
            .zip(&values)
            .map(|(n, f)| {
                let w = n.weight * n.point.k * f.norm_sqr();
                (w, w * (n.cartesian - mean).norm())
            })
            .collect();
        norm_parts.push(stable_sum(terms.iter().map(|t| t.0)));
        parts.push(stable_sum(terms.iter().map(|t| t.1)));
    }
    let norm = stable_sum(norm_parts);
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm("momentum spread"));
    }
    Ok(stable_sum(parts) / norm)
}

/// Full report with `γ = Δr·Δp` (ħ = 1), Δr in the Cartesian form.
pub fn gamma(amps: &HelicityAmplitudes, grid: &MomentumGrid, frame: &PolarizationFrame) -> Result<UncertaintyReport> {
    let norm_sq = norm_squared(amps, grid)?;
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroNorm("uncertainty product"));
    }
    let mean_k = mean_momentum(amps, grid)?;
    let delta_r = delta_r_cartesian(amps, grid, frame)?.value;
    let delta_p = delta_p(amps, grid)?;
    Ok(UncertaintyReport {
        norm_sq,
        mean_k,
        delta_r,
        delta_p,
        gamma: delta_r * delta_p,
        resolution: grid.resolution(),
    })
}
