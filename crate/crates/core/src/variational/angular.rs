//! Monopole-harmonic angular problem
//! `[−(1/sinθ)∂_θ sinθ ∂_θ + (m² + λ² − 2λm cosθ)/sin²θ]Θ = μΘ`.
//!
//! Rayleigh–Ritz in `x = cosθ` with basis `w(x)P_n(x)`, where
//! `w = (1−x)^{|m−λ|/2}(1+x)^{|m+λ|/2}` carries the endpoint behavior. All
//! matrix integrands are polynomials, so Gauss–Legendre quadrature is exact.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{EigenSolution, QuantumNumbers, SolutionKind};
use crate::error::{Error, Result};
use crate::momentum::Helicity;

const CONVERGENCE_TOLERANCE: f64 = 1e-9;
const SAMPLE_COUNT: usize = 181;

struct Weight {
    alpha: f64,
    beta: f64,
}

impl Weight {
    fn new(lambda: i32, m: i32) -> Self {
        Weight { alpha: (m - lambda).abs() as f64 / 2.0, beta: (m + lambda).abs() as f64 / 2.0 }
    }

    fn value(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.alpha) * (1.0 + x).powf(self.beta)
    }

    /// `w′/w`
    fn log_derivative(&self, x: f64) -> f64 {
        -self.alpha / (1.0 - x) + self.beta / (1.0 + x)
    }
}

/// Legendre values and derivatives `P_0..P_{n−1}` at `x`.
fn legendre(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    p[0] = 1.0;
    if n > 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for k in 2..n {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
        dp[k] = dp[k - 2] + (2.0 * kf - 1.0) * p[k - 1];
    }
    (p, dp)
}

struct Spectrum {
    values: Vec<f64>,
    vectors: Vec<DVector<f64>>,
}

fn ritz(lambda: i32, m: i32, n_basis: usize) -> Result<Spectrum> {
    let w = Weight::new(lambda, m);
    let (mf, lf) = (m as f64, lambda as f64);
    let q = n_basis + m.unsigned_abs() as usize + lambda.unsigned_abs() as usize + 8;
    let rule = GaussLegendre::new(NonZeroUsize::new(q).expect("positive quadrature order"));
    let mut stiff = DMatrix::<f64>::zeros(n_basis, n_basis);
    let mut mass = DMatrix::<f64>::zeros(n_basis, n_basis);
    for &(x, wt) in rule.as_node_weight_pairs() {
        let (p, dp) = legendre(n_basis, x);
        let wv = w.value(x);
        let ld = w.log_derivative(x);
        let phi: Vec<f64> = p.iter().map(|pi| wv * pi).collect();
        let dphi: Vec<f64> = (0..n_basis).map(|i| wv * (ld * p[i] + dp[i])).collect();
        let s2 = 1.0 - x * x;
        let v = (mf * mf + lf * lf - 2.0 * lf * mf * x) / s2;
        for i in 0..n_basis {
            for j in 0..=i {
                stiff[(i, j)] += wt * (s2 * dphi[i] * dphi[j] + v * phi[i] * phi[j]);
                mass[(i, j)] += wt * phi[i] * phi[j];
            }
        }
    }
    stiff.fill_upper_triangle_with_lower_triangle();
    mass.fill_upper_triangle_with_lower_triangle();

    let chol = mass
        .cholesky()
        .ok_or_else(|| Error::Convergence("angular mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&stiff)
        .ok_or_else(|| Error::Convergence("singular angular mass factor".into()))?;
    let a = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Convergence("singular angular mass factor".into()))?;
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n_basis).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lt = l.transpose();
    let mut values = Vec::with_capacity(n_basis);
    let mut vectors = Vec::with_capacity(n_basis);
    for i in order {
        let y = eig.eigenvectors.column(i).into_owned();
        let c = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::Convergence("singular angular mass factor".into()))?;
        values.push(eig.eigenvalues[i]);
        vectors.push(c);
    }
    Ok(Spectrum { values, vectors })
}

fn eigenfunction_samples(lambda: i32, m: i32, coeffs: &DVector<f64>) -> Vec<(f64, f64)> {
    let w = Weight::new(lambda, m);
    let n = coeffs.len();
    let mut samples: Vec<(f64, f64)> = (0..SAMPLE_COUNT)
        .map(|i| {
            let theta = std::f64::consts::PI * i as f64 / (SAMPLE_COUNT - 1) as f64;
            let x = theta.cos().clamp(-1.0, 1.0);
            let (p, _) = legendre(n, x);
            let value: f64 = p.iter().zip(coeffs.iter()).map(|(pi, ci)| pi * ci).sum();
            (theta, w.value(x) * value)
        })
        .collect();
    let peak = samples.iter().fold(0.0_f64, |acc, s| if s.1.abs() > acc.abs() { s.1 } else { acc });
    if peak < 0.0 {
        for s in &mut samples {
            s.1 = -s.1;
        }
    }
    samples
}

/// Lowest `n_eigen` eigenvalues `j(j+1)`, `j ≥ max(|m|, 1)`, with
/// eigenfunction samples `(θ, Θ(θ))` normalized to `∫Θ² sinθ dθ = 1`.
pub fn solve_angular(lambda: Helicity, m: i32, n_eigen: usize) -> Result<Vec<EigenSolution>> {
    if n_eigen == 0 {
        return Err(Error::InvalidArgument("n_eigen must be at least 1".into()));
    }
    let lam = lambda.sign() as i32;
    let n_basis = n_eigen + 8;
    let coarse = ritz(lam, m, n_basis)?;
    let fine = ritz(lam, m, n_basis + 6)?;
    for i in 0..n_eigen {
        let (a, b) = (coarse.values[i], fine.values[i]);
        if (a - b).abs() > CONVERGENCE_TOLERANCE * b.abs().max(1.0) {
            return Err(Error::Convergence(format!(
                "angular eigenvalue {i} changed from {a} to {b} between {n_basis} and {} basis functions",
                n_basis + 6
            )));
        }
    }
    let j_min = m.unsigned_abs().max(1) as usize;
    Ok((0..n_eigen)
        .map(|i| EigenSolution {
            eigenvalue: fine.values[i],
            samples: eigenfunction_samples(lam, m, &fine.vectors[i]),
            quantum_numbers: QuantumNumbers { n_r: 0, j: j_min + i, m, lambda: lam },
            kind: SolutionKind::Angular,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_is_sin_theta() {
        let s = &solve_angular(Helicity::Plus, 0, 1).unwrap()[0];
        assert!((s.eigenvalue - 2.0).abs() < 1e-10);
        for &(theta, v) in &s.samples {
            assert!((v - (0.75f64).sqrt() * theta.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_request_rejected() {
        assert!(solve_angular(Helicity::Minus, 0, 0).is_err());
    }

    #[test]
    fn legendre_derivative_matches_closed_form() {
        let (p, dp) = legendre(4, 0.3);
        assert!((p[3] - 0.5 * (5.0 * 0.027 - 0.9)).abs() < 1e-15);
        assert!((dp[3] - 0.5 * (15.0 * 0.09 - 3.0)).abs() < 1e-14);
    }
}
