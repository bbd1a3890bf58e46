//! L² residual of the full variational equation for one helicity component.
//!
//! The amplitude is normalized to unit norm and rewritten in `κ = k/Δp`:
//! `f̃(κ, θ, φ) = Δp·f(κΔp, θ, φ)/‖f‖`. The operator is
//!
//! ```text
//! −κ⁻²∂_κκ²∂_κ − (κ² sinθ)⁻¹∂_θ sinθ ∂_θ
//!   + (−∂_φ² + 1 + 2iλ cosθ ∂_φ)/(κ² sin²θ) − 2γ/κ + γ
//! ```

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functionals::delta_p;
use crate::momentum::{norm_squared, Helicity, HelicityAmplitudes, MomentumGrid};
use crate::numeric::stable_sum;

pub fn pde_residual(amps: &HelicityAmplitudes, gamma: f64, lambda: Helicity, grid: &MomentumGrid) -> Result<f64> {
    if !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!("γ must be finite, got {gamma}")));
    }
    let amp = amps.component(lambda);
    if amp.is_zero() {
        return Ok(0.0);
    }
    let norm = norm_squared(amps, grid)?.sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm("variational residual"));
    }
    let dp = delta_p(amps, grid)?;
    let lam = lambda.sign();
    let terms: Vec<f64> = grid
        .nodes()
        .par_iter()
        .map(|node| {
            let p = node.point;
            let f = amp.value(p);
            let d = amp.partials(p);
            let d2 = amp.second_partials(p);
            let kappa = p.k / dp;
            // κ-derivatives of f̃ pick up one extra factor of Δp each.
            let c = dp / norm;
            let (g, g_k, g_kk) = (f * c, d.dk * c * dp, d2.dkk * c * dp * dp);
            let (g_t, g_tt, g_p, g_pp) = (d.dtheta * c, d2.dthth * c, d.dphi * c, d2.dphph * c);
            let (st, ct) = p.theta.sin_cos();
            let k2 = kappa * kappa;
            let radial = -g_kk - g_k * (2.0 / kappa);
            let polar = -(g_tt + g_t * (ct / st)) / k2;
            let azimuthal = (-g_pp + g + Complex64::new(0.0, 2.0 * lam * ct) * g_p) / (k2 * st * st);
            let lhs = radial + polar + azimuthal - g * (2.0 * gamma / kappa) + g * gamma;
            let value = node.weight * p.k * p.k / (dp * dp * dp) * lhs.norm_sqr();
            if value.is_finite() {
                Ok(value)
            } else {
                Err(Error::NonFinite { quantity: "variational residual", k: p.k, theta: p.theta, phi: p.phi })
            }
        })
        .collect::<Result<_>>()?;
    Ok(stable_sum(terms).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::saturating_amplitude;
    use crate::lightcone::Axis;

    #[test]
    fn saturating_family_solves_the_equation() {
        let grid = MomentumGrid::reference(1.0).unwrap();
        for axis in Axis::ALL {
            let amps = saturating_amplitude(axis, 1.0).unwrap();
            let r = pde_residual(&amps, 4.0, Helicity::Plus, &grid).unwrap();
            assert!(r < 1e-6, "{axis}: {r}");
        }
    }

    #[test]
    fn wrong_gamma_leaves_a_residual() {
        // At γ = 5 the operator leaves (4/√π)(κ − 2)e^{−2κ} sinθ, whose
        // L² norm is √(7/3).
        let grid = MomentumGrid::reference(1.0).unwrap();
        let amps = saturating_amplitude(Axis::Z, 1.0).unwrap();
        let r = pde_residual(&amps, 5.0, Helicity::Plus, &grid).unwrap();
        assert!((r - (7.0f64 / 3.0).sqrt()).abs() < 1e-8, "{r}");
    }

    #[test]
    fn absent_component_has_no_residual() {
        let grid = MomentumGrid::reference(1.0).unwrap();
        let amps = saturating_amplitude(Axis::Z, 1.0).unwrap();
        assert_eq!(pde_residual(&amps, 4.0, Helicity::Minus, &grid).unwrap(), 0.0);
    }
}
