//! Real-space Riemann–Silberstein fields.
//!
//! `F(r,t) = ∫d³k/(2π)^{3/2} e(k)[f₊ e^{i(k·r−kt)} + f₋* e^{−i(k·r−kt)}]`
//! with `ħ = c = 1`, so that `F*·F` is the energy density. For the saturating
//! family the integral has a closed form: second derivatives of
//! `Φ = 1/(r² − (t − ia)²)` arranged as
//! `F^(z) = (a²/π)(∂_x∂_z Φ + i∂_y∂_t Φ, ∂_y∂_z Φ − i∂_x∂_t Φ, −∂_x²Φ − ∂_y²Φ)`.
//! The x and y fields follow by cyclic relabelling of coordinates.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lightcone::{Axis, PolarizationFrame};
use crate::momentum::{sample_values, Helicity, HelicityAmplitudes, MomentumGrid};
use crate::numeric::stable_sum;

pub use crate::families::saturating_amplitude;

/// Momentum beyond which amplitudes are treated as negligible when judging
/// whether the quadrature resolves the phase `k·r`, in units of `k_scale`.
pub const PHASE_CUTOFF: f64 = 16.0;

/// Momentum grid that resolves the phase on a box of side `4a` around the
/// origin for `|t| ≲ a`; the coarser reference grid does not.
pub const SYNTHESIS_RESOLUTION: (usize, usize, usize) = (192, 80, 80);

/// `k_scale·a` used with [`SYNTHESIS_RESOLUTION`].
pub const SYNTHESIS_K_SCALE: f64 = 3.0;

/// Fraction of the second moment the truncated tail may carry.
pub const TRUNCATION_TOLERANCE: f64 = 1e-3;

type Field3 = Vector3<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    pub points: Vec<Vector3<f64>>,
    /// Cubature weights for `∫d³r`, when the grid is a quadrature rule.
    pub weights: Option<Vec<f64>>,
    /// Largest `|r|` covered (ball radius or cube half-diagonal).
    pub extent: f64,
    /// Node spacing of uniform grids.
    pub spacing: Option<f64>,
}

impl SpatialGrid {
    pub fn from_points(points: Vec<Vector3<f64>>) -> Self {
        let extent = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        SpatialGrid { points, weights: None, extent, spacing: None }
    }

    /// `n³` points spanning `[−side/2, side/2]³` inclusive.
    pub fn cube(side: f64, n: usize) -> Result<Self> {
        if !(side > 0.0) || !side.is_finite() || n < 2 {
            return Err(Error::InvalidArgument(format!("cube needs side > 0 and n >= 2, got {side}, {n}")));
        }
        let h = side / (n - 1) as f64;
        let c = |i: usize| -0.5 * side + i as f64 * h;
        let mut points = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    points.push(Vector3::new(c(i), c(j), c(k)));
                }
            }
        }
        Ok(SpatialGrid { points, weights: None, extent: 0.5 * side * 3f64.sqrt(), spacing: Some(h) })
    }

    /// Product cubature on the ball `|r| ≤ radius`. Radial nodes are
    /// Gauss–Legendre in `x` with `r = s·x/(1−x)`, polar nodes Gauss–Legendre
    /// in `cos θ`, azimuthal nodes the half-shifted trapezoid rule.
    pub fn ball(radius: f64, scale: f64, n_r: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        if !(radius > 0.0 && scale > 0.0) || !radius.is_finite() || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!("ball needs radius, scale > 0, got {radius}, {scale}")));
        }
        if n_r < 2 || n_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidArgument("ball needs at least 2 nodes per direction".into()));
        }
        let x_max = radius / (scale + radius);
        let radial: Vec<(f64, f64)> = gl(n_r)
            .into_iter()
            .map(|(u, w)| {
                let x = 0.5 * x_max * (u + 1.0);
                let jac = 0.5 * x_max * scale / ((1.0 - x) * (1.0 - x));
                let r = scale * x / (1.0 - x);
                (r, w * jac * r * r)
            })
            .collect();
        let polar: Vec<(f64, f64)> = gl(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(n_r * n_theta * n_phi);
        let mut weights = Vec::with_capacity(points.capacity());
        for &(r, wr) in &radial {
            for &(ct, wt) in &polar {
                let st = (1.0 - ct * ct).sqrt();
                for j in 0..n_phi {
                    let (sp, cp) = ((j as f64 + 0.5) * dphi).sin_cos();
                    points.push(Vector3::new(r * st * cp, r * st * sp, r * ct));
                    weights.push(wr * wt * dphi);
                }
            }
        }
        Ok(SpatialGrid { points, weights: Some(weights), extent: radius, spacing: None })
    }

    /// `Σ w·g(r)`; requires weights.
    pub fn integrate<F: Fn(&Vector3<f64>) -> f64 + Sync>(&self, g: F) -> Result<f64> {
        let w = self.weights.as_ref().ok_or(Error::MissingWeights)?;
        let terms: Vec<f64> = self.points.par_iter().zip(w.par_iter()).map(|(p, w)| w * g(p)).collect();
        Ok(stable_sum(terms))
    }
}

fn gl(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("n >= 1"));
    let mut pairs = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

#[derive(Debug, Clone, PartialEq)]
pub struct RSField {
    pub points: Vec<Vector3<f64>>,
    pub t: f64,
    pub values: Vec<Field3>,
    /// Value of `ħc` the field is normalized to; always 1 here.
    pub hbar_c: f64,
    /// Number of points beyond the radius where the momentum quadrature
    /// resolves the phase `k·r`.
    pub phase_warnings: usize,
}

/// Radius up to which a grid with `n_k` radial nodes resolves `k·r`.
pub fn trusted_radius(grid: &MomentumGrid) -> f64 {
    0.5 * grid.k_nodes.len() as f64 / (PHASE_CUTOFF * grid.k_scale)
}

/// The grid of [`SYNTHESIS_RESOLUTION`] for a state of length scale `a`.
pub fn synthesis_grid(a: f64) -> Result<MomentumGrid> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    let (n_k, n_t, n_p) = SYNTHESIS_RESOLUTION;
    crate::momentum::build_grid(n_k, n_t, n_p, SYNTHESIS_K_SCALE / a)
}

/// Quadrature evaluation of the field at every point.
pub fn synthesize_field(
    amps: &HelicityAmplitudes,
    grid: &MomentumGrid,
    frame: &PolarizationFrame,
    points: &SpatialGrid,
    t: f64,
) -> Result<RSField> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    let trusted = trusted_radius(grid);
    let mut phase_warnings = 0;
    for p in &points.points {
        let r = p.norm();
        if r > 2.0 * trusted {
            return Err(Error::PhaseResolution { radius: r, trusted });
        }
        if r > trusted {
            phase_warnings += 1;
        }
    }

    let plus = amps.component(Helicity::Plus);
    let minus = amps.component(Helicity::Minus);
    let f_plus = sample_values(plus.as_ref(), grid)?;
    let f_minus = sample_values(minus.as_ref(), grid)?;
    let has_minus = !minus.is_zero();
    let pre = (2.0 * PI).powf(-1.5);
    // Per node: weighted e·f₊ and e·f₋*, with the d³k = k²dk dΩ measure.
    let nodes: Vec<(Vector3<f64>, f64, Field3, Field3)> = grid
        .nodes()
        .par_iter()
        .zip(f_plus.par_iter().zip(f_minus.par_iter()))
        .map(|(n, (fp, fm))| {
            let e = frame.polarization(&n.cartesian)?;
            let w = pre * n.weight * n.point.k * n.point.k;
            Ok((n.cartesian, n.point.k, e * (fp * w), e * (fm.conj() * w)))
        })
        .collect::<Result<_>>()?;

    let values: Vec<Field3> = points
        .points
        .par_iter()
        .map(|r| {
            let mut acc = [Accumulator::default(), Accumulator::default(), Accumulator::default()];
            for (k, kn, ep, em) in &nodes {
                let phase = Complex64::from_polar(1.0, k.dot(r) - kn * t);
                for c in 0..3 {
                    let mut term = ep[c] * phase;
                    if has_minus {
                        term += em[c] * phase.conj();
                    }
                    acc[c].add(term);
                }
            }
            Vector3::new(acc[0].total(), acc[1].total(), acc[2].total())
        })
        .collect();
    check_field(&points.points, &values)?;
    Ok(RSField { points: points.points.clone(), t, values, hbar_c: 1.0, phase_warnings })
}

/// Neumaier accumulator for complex terms.
#[derive(Default)]
struct Accumulator {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), v: f64) {
    let t = acc.0 + v;
    if acc.0.abs() >= v.abs() {
        acc.1 += (acc.0 - t) + v;
    } else {
        acc.1 += (v - t) + acc.0;
    }
    acc.0 = t;
}

impl Accumulator {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

fn check_field(points: &[Vector3<f64>], values: &[Field3]) -> Result<()> {
    for (p, v) in points.iter().zip(values) {
        if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite field at r = ({}, {}, {})",
                p.x, p.y, p.z
            )));
        }
    }
    Ok(())
}

/// Second partial derivatives of `Φ = 1/D`, `D = r² − s²`, `s = t − ia`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSecondDerivatives {
    /// `∂_i∂_j Φ` for spatial `i, j`.
    pub spatial: [[Complex64; 3]; 3],
    /// `∂_i∂_t Φ`.
    pub mixed: [Complex64; 3],
    pub tt: Complex64,
}

pub fn phi(a: f64, r: &Vector3<f64>, t: f64) -> Complex64 {
    let s = Complex64::new(t, -a);
    (Complex64::from(r.norm_squared()) - s * s).inv()
}

pub fn phi_second_derivatives(a: f64, r: &Vector3<f64>, t: f64) -> PhiSecondDerivatives {
    let s = Complex64::new(t, -a);
    let d = Complex64::from(r.norm_squared()) - s * s;
    let d2 = (d * d).inv();
    let d3 = d2 / d;
    let mut spatial = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 2.0 } else { 0.0 };
            spatial[i][j] = -d2 * delta + d3 * (8.0 * r[i] * r[j]);
        }
    }
    let mixed = [-d3 * s * (8.0 * r.x), -d3 * s * (8.0 * r.y), -d3 * s * (8.0 * r.z)];
    let tt = d2 * 2.0 + d3 * s * s * 8.0;
    PhiSecondDerivatives { spatial, mixed, tt }
}

/// Closed-form field of the saturating state with its string along `axis`.
pub fn whittaker_field(axis: Axis, a: f64, r: &Vector3<f64>, t: f64) -> Result<Field3> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(format!("a must be positive, got {a}")));
    }
    let local = axis.to_local(r);
    let d = phi_second_derivatives(a, &local, t);
    let i = Complex64::new(0.0, 1.0);
    let pre = a * a / PI;
    let f = Vector3::new(
        (d.spatial[0][2] + i * d.mixed[1]) * pre,
        (d.spatial[1][2] - i * d.mixed[0]) * pre,
        -(d.spatial[0][0] + d.spatial[1][1]) * pre,
    );
    Ok(axis.from_local(&f))
}

/// The closed-form field on every point of a grid.
pub fn whittaker_rs_field(axis: Axis, a: f64, points: &SpatialGrid, t: f64) -> Result<RSField> {
    let values = points
        .points
        .par_iter()
        .map(|r| whittaker_field(axis, a, r, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(RSField { points: points.points.clone(), t, values, hbar_c: 1.0, phase_warnings: 0 })
}

/// Electric field of the z-axis saturating state at `t = 0`,
/// `E = (4a²/π)(2xz − 2ay, 2yz + 2ax, a² − r² + 2z²)/(a² + r²)³`.
pub fn electric_field_t0(a: f64, r: &Vector3<f64>) -> Vector3<f64> {
    let (x, y, z) = (r.x, r.y, r.z);
    let q = a * a + r.norm_squared();
    let pre = 4.0 * a * a / (PI * q * q * q);
    Vector3::new(
        pre * (2.0 * x * z - 2.0 * a * y),
        pre * (2.0 * y * z + 2.0 * a * x),
        pre * (a * a - r.norm_squared() + 2.0 * z * z),
    )
}

/// `F*·F` at every point.
pub fn energy_density(field: &RSField) -> Vec<f64> {
    field.values.iter().map(|v| v.iter().map(|c| c.norm_sqr()).sum()).collect()
}

/// `16a⁴/(π²(a² + r²)⁴)`, shared by all three saturating fields at `t = 0`.
pub fn closed_form_energy(a: f64, r: f64) -> f64 {
    16.0 * a.powi(4) / (PI * PI * (a * a + r * r).powi(4))
}

fn weights_for<'a>(field: &RSField, grid: &'a SpatialGrid) -> Result<&'a [f64]> {
    let w = grid.weights.as_deref().ok_or(Error::MissingWeights)?;
    if grid.points.len() != field.points.len() || w.len() != field.points.len() {
        return Err(Error::InvalidArgument(format!(
            "field has {} points but the grid has {}",
            field.points.len(),
            grid.points.len()
        )));
    }
    Ok(w)
}

/// `∫ℰ d³r` over the cubature domain.
pub fn total_energy(field: &RSField, grid: &SpatialGrid) -> Result<f64> {
    let w = weights_for(field, grid)?;
    let e = energy_density(field);
    Ok(stable_sum(w.iter().zip(&e).map(|(w, e)| w * e)))
}

/// `∫r²ℰ d³r/(ħc‖f‖²)` by cubature over the truncated domain.
///
/// The tail beyond the domain is estimated from the mean density on the
/// outermost shell, extrapolated with the `r⁻⁸` decay of the energy density.
pub fn real_space_delta_r(field: &RSField, grid: &SpatialGrid, norm_sq: f64) -> Result<f64> {
    let w = weights_for(field, grid)?;
    if !(norm_sq > 0.0) {
        return Err(Error::ZeroNorm("real-space position spread"));
    }
    let e = energy_density(field);
    let moment = stable_sum(field.points.iter().zip(w).zip(&e).map(|((p, w), e)| w * p.norm_squared() * e));
    if !(moment > 0.0) {
        return Err(Error::ZeroNorm("real-space position spread"));
    }

    let r_outer = field.points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let shell: Vec<f64> = field
        .points
        .iter()
        .zip(&e)
        .filter(|(p, _)| p.norm() >= r_outer * (1.0 - 1e-12))
        .map(|(_, e)| *e)
        .collect();
    let rho = stable_sum(shell.iter().copied()) / shell.len() as f64;
    let radius = grid.extent.max(r_outer);
    let tail = 4.0 * PI * rho * r_outer.powi(8) / (3.0 * radius.powi(3));
    let fraction = tail / moment;
    if fraction > TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            tail_fraction: fraction,
            tolerance: TRUNCATION_TOLERANCE,
            // The r⁻⁸ extrapolation underestimates the tail while the
            // density is still pre-asymptotic; the margin covers that.
            suggested_radius: 1.25 * radius * (fraction / TRUNCATION_TOLERANCE).cbrt(),
        });
    }
    Ok(moment / (field.hbar_c * norm_sq))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_second(a: f64, r: &Vector3<f64>, t: f64, i: usize, j: usize) -> Complex64 {
        // Coordinates 0..3 spatial, 3 = t.
        let h = 2e-4;
        let eval = |di: f64, dj: f64| {
            let mut x = [r.x, r.y, r.z, t];
            x[i] += di;
            x[j] += dj;
            phi(a, &Vector3::new(x[0], x[1], x[2]), x[3])
        };
        (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h)
    }

    #[test]
    fn second_derivatives_match_finite_differences() {
        let r = Vector3::new(0.2, -0.1, 0.7);
        let (a, t) = (1.0, 0.3);
        let d = phi_second_derivatives(a, &r, t);
        let check = |exact: Complex64, i: usize, j: usize| {
            let fd = fd_second(a, &r, t, i, j);
            assert!((exact - fd).norm() < 1e-6 * exact.norm().max(1e-3), "({i},{j}): {exact} vs {fd}");
        };
        for i in 0..3 {
            for j in 0..3 {
                check(d.spatial[i][j], i, j);
            }
            check(d.mixed[i], i, 3);
        }
        check(d.tt, 3, 3);
    }

    #[test]
    fn origin_energy() {
        let f = whittaker_field(Axis::Z, 1.0, &Vector3::zeros(), 0.0).unwrap();
        let e: f64 = f.iter().map(|c| c.norm_sqr()).sum();
        assert!((e - 16.0 / (PI * PI)).abs() < 1e-12);
        assert_eq!(closed_form_energy(1.0, 0.0), 16.0 / (PI * PI));
    }

    #[test]
    fn invalid_scale() {
        assert!(whittaker_field(Axis::X, 0.0, &Vector3::zeros(), 0.0).is_err());
        assert!(SpatialGrid::cube(1.0, 1).is_err());
        assert!(SpatialGrid::ball(-1.0, 1.0, 4, 4, 4).is_err());
    }

    #[test]
    fn ball_integrates_a_gaussian() {
        let g = SpatialGrid::ball(12.0, 1.0, 64, 8, 8).unwrap();
        let v = g.integrate(|r| (-r.norm_squared()).exp()).unwrap();
        assert!((v - PI.powf(1.5)).abs() < 1e-9, "{v}");
    }

    #[test]
    fn weights_required() {
        let g = SpatialGrid::cube(1.0, 3).unwrap();
        let f = whittaker_rs_field(Axis::Z, 1.0, &g, 0.0).unwrap();
        assert_eq!(total_energy(&f, &g), Err(Error::MissingWeights));
        assert_eq!(real_space_delta_r(&f, &g, 1.0), Err(Error::MissingWeights));
    }
}
