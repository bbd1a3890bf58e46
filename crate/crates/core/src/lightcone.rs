//! Polarization vector, monopole connection and covariant derivative on the
//! light cone.
//!
//! The polarization vector singles out one coordinate axis and is singular
//! along it (the Dirac string). Frames for the x and y axes are obtained
//! from the z frame by the cyclic relabelling `k_z → k_x → k_y → k_z`.
//! Gauge phases attached to a frame rotate `e → e^{-iφ}e` and shift
//! `α → α + ∇φ`.

use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::momentum::{
    sample_with_partials, Amplitude, Descriptor, Helicity, HelicityAmplitudes, MomentumGrid, Partials,
    SphericalPoint,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative distance to the string below which a point counts as on it.
const STRING_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!("unknown axis '{other}'"))),
        }
    }
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// Coordinates in which this axis plays the role of z.
    pub fn to_local(self, k: &Vector3<f64>) -> Vector3<f64> {
        match self {
            Axis::Z => *k,
            Axis::X => Vector3::new(k.y, k.z, k.x),
            Axis::Y => Vector3::new(k.z, k.x, k.y),
        }
    }

    /// Inverse of [`Axis::to_local`] for vector components.
    pub fn from_local<T: nalgebra::Scalar + Copy>(self, v: &Vector3<T>) -> Vector3<T> {
        match self {
            Axis::Z => *v,
            Axis::X => Vector3::new(v.z, v.x, v.y),
            Axis::Y => Vector3::new(v.y, v.z, v.x),
        }
    }

    /// Squared distance from the string, `k_x² + k_y²` in local coordinates.
    pub fn string_distance_sq(self, k: &Vector3<f64>) -> f64 {
        let l = self.to_local(k);
        l.x * l.x + l.y * l.y
    }
}

fn off_string(axis: Axis, k: &Vector3<f64>) -> Result<(Vector3<f64>, f64, f64)> {
    let norm = k.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "momentum must be finite and nonzero, got ({}, {}, {})",
            k.x, k.y, k.z
        )));
    }
    let local = axis.to_local(k);
    let rho2 = local.x * local.x + local.y * local.y;
    if rho2 <= (STRING_TOLERANCE * norm).powi(2) {
        return Err(Error::StringSingularity {
            axis,
            k: [k.x, k.y, k.z],
        });
    }
    Ok((local, norm, rho2))
}

/// Normalized helicity-(+1) polarization vector with its string along `axis`.
pub fn polarization_vector(axis: Axis, k: &Vector3<f64>) -> Result<Vector3<Complex64>> {
    let (l, norm, rho2) = off_string(axis, k)?;
    let scale = 1.0 / (std::f64::consts::SQRT_2 * norm * rho2.sqrt());
    let local = Vector3::new(
        Complex64::new(-l.x * l.z, norm * l.y) * scale,
        Complex64::new(-l.y * l.z, -norm * l.x) * scale,
        Complex64::new(rho2 * scale, 0.0),
    );
    Ok(axis.from_local(&local))
}

/// Monopole connection `α = k_z/(k(k_x²+k_y²))·(−k_y, k_x, 0)` in the
/// frame's local coordinates.
pub fn connection_alpha(axis: Axis, k: &Vector3<f64>) -> Result<Vector3<f64>> {
    let (l, norm, rho2) = off_string(axis, k)?;
    let pre = l.z / (norm * rho2);
    Ok(axis.from_local(&Vector3::new(-pre * l.y, pre * l.x, 0.0)))
}

/// A real phase `φ(k)` used for gauge transformations.
pub trait GaugePhase: Send + Sync {
    fn value(&self, k: &Vector3<f64>) -> f64;

    /// Cartesian gradient; central differences unless overridden.
    fn gradient(&self, k: &Vector3<f64>) -> Vector3<f64> {
        let h = 1e-5 * k.norm().max(1.0);
        let mut g = Vector3::zeros();
        for i in 0..3 {
            let mut p = *k;
            let mut m = *k;
            p[i] += h;
            m[i] -= h;
            g[i] = (self.value(&p) - self.value(&m)) / (2.0 * h);
        }
        g
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantPhase(pub f64);

impl GaugePhase for ConstantPhase {
    fn value(&self, _: &Vector3<f64>) -> f64 {
        self.0
    }
    fn gradient(&self, _: &Vector3<f64>) -> Vector3<f64> {
        Vector3::zeros()
    }
}

/// `φ(k) = s·k_z/k`.
#[derive(Debug, Clone, Copy)]
pub struct AxialPhase(pub f64);

impl GaugePhase for AxialPhase {
    fn value(&self, k: &Vector3<f64>) -> f64 {
        self.0 * k.z / k.norm()
    }
    fn gradient(&self, k: &Vector3<f64>) -> Vector3<f64> {
        let n = k.norm();
        let n3 = n * n * n;
        self.0 * Vector3::new(-k.x * k.z / n3, -k.y * k.z / n3, (n * n - k.z * k.z) / n3)
    }
}

#[derive(Clone)]
pub struct PolarizationFrame {
    axis: Axis,
    gauges: Vec<Arc<dyn GaugePhase>>,
}

impl fmt::Debug for PolarizationFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolarizationFrame")
            .field("axis", &self.axis)
            .field("gauge_phases", &self.gauges.len())
            .finish()
    }
}

impl PolarizationFrame {
    pub fn new(axis: Axis) -> Self {
        Self {
            axis,
            gauges: Vec::new(),
        }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn is_gauged(&self) -> bool {
        !self.gauges.is_empty()
    }

    pub fn gauge_phase(&self, k: &Vector3<f64>) -> f64 {
        self.gauges.iter().map(|g| g.value(k)).sum()
    }

    /// `e^{-iφ(k)} e(k)`.
    pub fn polarization(&self, k: &Vector3<f64>) -> Result<Vector3<Complex64>> {
        let e = polarization_vector(self.axis, k)?;
        if self.gauges.is_empty() {
            return Ok(e);
        }
        Ok(e * Complex64::from_polar(1.0, -self.gauge_phase(k)))
    }

    /// `α(k) + ∇φ(k)`.
    pub fn alpha(&self, k: &Vector3<f64>) -> Result<Vector3<f64>> {
        let mut a = connection_alpha(self.axis, k)?;
        for g in &self.gauges {
            a += g.gradient(k);
        }
        Ok(a)
    }
}

/// Cartesian gradient from spherical partials,
/// `∇f = ∂_k f k̂ + k⁻¹∂_θ f θ̂ + (k sin θ)⁻¹ ∂_φ f φ̂`.
pub fn cartesian_gradient(p: SphericalPoint, d: &Partials) -> Vector3<Complex64> {
    let [rh, th, ph] = p.basis();
    let dt = d.dtheta / p.k;
    let dp = d.dphi / (p.k * p.theta.sin());
    Vector3::new(
        d.dk * rh.x + dt * th.x + dp * ph.x,
        d.dk * rh.y + dt * th.y + dp * ph.y,
        d.dk * rh.z + dt * th.z + dp * ph.z,
    )
}

/// `D_λ f_λ` at every grid node, for one helicity.
#[derive(Debug, Clone)]
pub struct CovariantDerivativeField {
    pub helicity: Helicity,
    pub values: Vec<Vector3<Complex64>>,
}

/// `D_λ f_λ = ∇f_λ − iλα f_λ` at every node, for both helicities
/// (`[λ = +1, λ = −1]`).
pub fn covariant_derivative(
    amps: &HelicityAmplitudes,
    grid: &MomentumGrid,
    frame: &PolarizationFrame,
) -> Result<[CovariantDerivativeField; 2]> {
    let field = |h: Helicity| -> Result<CovariantDerivativeField> {
        let samples = sample_with_partials(amps.component(h).as_ref(), grid)?;
        let lambda = h.sign();
        let values = grid
            .nodes()
            .par_iter()
            .zip(samples.par_iter())
            .map(|(node, (f, d))| {
                let grad = cartesian_gradient(node.point, d);
                let alpha = frame.alpha(&node.cartesian)?;
                Ok(grad - alpha.map(|a| I * lambda * a * *f))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CovariantDerivativeField { helicity: h, values })
    };
    Ok([field(Helicity::Plus)?, field(Helicity::Minus)?])
}

/// `e^{iλφ(k)} f_λ` with partials from the product rule.
struct Rephased {
    inner: Arc<dyn Amplitude>,
    phase: Arc<dyn GaugePhase>,
    charge: f64,
}

impl Amplitude for Rephased {
    fn value(&self, p: SphericalPoint) -> Complex64 {
        let k = p.to_cartesian();
        self.inner.value(p) * Complex64::from_polar(1.0, self.charge * self.phase.value(&k))
    }

    fn partials(&self, p: SphericalPoint) -> Partials {
        let k = p.to_cartesian();
        let rot = Complex64::from_polar(1.0, self.charge * self.phase.value(&k));
        let grad = self.phase.gradient(&k);
        let [rh, th, ph] = p.basis();
        let f = self.inner.value(p);
        let d = self.inner.partials(p);
        let dk = grad.dot(&rh);
        let dt = p.k * grad.dot(&th);
        let dp = p.k * p.theta.sin() * grad.dot(&ph);
        let q = I * self.charge;
        Partials {
            dk: rot * (d.dk + q * dk * f),
            dtheta: rot * (d.dtheta + q * dt * f),
            dphi: rot * (d.dphi + q * dp * f),
        }
    }

    fn has_analytic_partials(&self) -> bool {
        self.inner.has_analytic_partials()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// `f_λ → e^{iλφ} f_λ`, `α → α + ∇φ`. Every gauge-invariant functional of
/// the returned pair equals that of the input pair.
pub fn gauge_transform(
    amps: &HelicityAmplitudes,
    frame: &PolarizationFrame,
    phase: Arc<dyn GaugePhase>,
) -> (HelicityAmplitudes, PolarizationFrame) {
    let wrap = |h: Helicity| -> Arc<dyn Amplitude> {
        Arc::new(Rephased {
            inner: amps.component(h).clone(),
            phase: phase.clone(),
            charge: h.sign(),
        })
    };
    let d = amps.descriptor();
    let amps2 = HelicityAmplitudes::new(
        wrap(Helicity::Plus),
        wrap(Helicity::Minus),
        Descriptor {
            family: format!("{}-gauged", d.family),
            params: d.params.clone(),
        },
    );
    let mut frame2 = frame.clone();
    frame2.gauges.push(phase);
    (amps2, frame2)
}

fn fd_step(k: &Vector3<f64>) -> f64 {
    1e-3 * k.norm().max(1.0)
}

/// Fourth-order central difference of `g` along coordinate `i`.
fn central_difference<N, G>(g: G, k: &Vector3<f64>, i: usize, h: f64) -> Result<Vector3<N>>
where
    N: nalgebra::ComplexField<RealField = f64> + Copy,
    G: Fn(&Vector3<f64>) -> Result<Vector3<N>>,
{
    let at = |s: f64| {
        let mut p = *k;
        p[i] += s * h;
        g(&p)
    };
    let d = at(-2.0)? - at(2.0)? + (at(1.0)? - at(-1.0)?) * N::from_real(8.0);
    Ok(d * N::from_real(1.0 / (12.0 * h)))
}

/// `(∇×α)(k) + k/k³` by central differences; vanishes off the string.
pub fn verify_connection_curl(axis: Axis, k: &Vector3<f64>) -> Result<Vector3<f64>> {
    connection_alpha(axis, k)?;
    let h = fd_step(k);
    // jac[i][j] = ∂_i α_j
    let mut jac = [[0.0; 3]; 3];
    for (i, row) in jac.iter_mut().enumerate() {
        let d = central_difference(|p| connection_alpha(axis, p), k, i, h)?;
        *row = [d.x, d.y, d.z];
    }
    let curl = Vector3::new(
        jac[1][2] - jac[2][1],
        jac[2][0] - jac[0][2],
        jac[0][1] - jac[1][0],
    );
    let n = k.norm();
    Ok(curl + k / (n * n * n))
}

/// Residuals of the four polarization-vector identities at one point,
/// each as a maximum absolute deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationIdentities {
    /// `max_i |i e*·∂_i e − α_i|`
    pub connection: f64,
    /// `max_i |e·∂_i e|`
    pub self_overlap: f64,
    /// `|Σ_i ∂_i e*·∂_i e − 1/(k_x²+k_y²)|`
    pub gradient_norm: f64,
    /// `|Σ_i ∂_i e·∂_i e|`
    pub gradient_square: f64,
}

impl PolarizationIdentities {
    pub fn max(&self) -> f64 {
        self.connection
            .max(self.self_overlap)
            .max(self.gradient_norm)
            .max(self.gradient_square)
    }
}

pub fn polarization_identities(axis: Axis, k: &Vector3<f64>) -> Result<PolarizationIdentities> {
    let e = polarization_vector(axis, k)?;
    let alpha = connection_alpha(axis, k)?;
    let h = fd_step(k);
    let mut de = [Vector3::<Complex64>::zeros(); 3];
    for (i, d) in de.iter_mut().enumerate() {
        *d = central_difference(|p| polarization_vector(axis, p), k, i, h)?;
    }
    let dot = |a: &Vector3<Complex64>, b: &Vector3<Complex64>| a.x * b.x + a.y * b.y + a.z * b.z;
    let conj = |a: &Vector3<Complex64>| a.map(|z| z.conj());

    let mut connection: f64 = 0.0;
    let mut self_overlap: f64 = 0.0;
    let mut norm_sum = Complex64::new(0.0, 0.0);
    let mut square_sum = Complex64::new(0.0, 0.0);
    for (i, d) in de.iter().enumerate() {
        connection = connection.max((I * dot(&conj(&e), d) - alpha[i]).norm());
        self_overlap = self_overlap.max(dot(&e, d).norm());
        norm_sum += dot(&conj(d), d);
        square_sum += dot(d, d);
    }
    Ok(PolarizationIdentities {
        connection,
        self_overlap,
        gradient_norm: (norm_sum - 1.0 / axis.string_distance_sq(k)).norm(),
        gradient_square: square_sum.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polarization_on_x_axis() {
        let e = polarization_vector(Axis::Z, &Vector3::new(1.0, 0.0, 0.0)).unwrap();
        let expect = [c(0.0, 0.0), c(0.0, -FRAC_1_SQRT_2), c(FRAC_1_SQRT_2, 0.0)];
        for i in 0..3 {
            assert!((e[i] - expect[i]).norm() < 1e-15, "component {i}: {}", e[i]);
        }
    }

    #[test]
    fn string_points_fail_loudly() {
        let err = polarization_vector(Axis::Z, &Vector3::new(0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::StringSingularity { axis: Axis::Z, .. }));
        assert!(connection_alpha(Axis::X, &Vector3::new(2.0, 0.0, 0.0)).is_err());
        assert!(verify_connection_curl(Axis::Z, &Vector3::new(0.0, 0.0, 2.0)).is_err());
        assert!(matches!(
            polarization_vector(Axis::Z, &Vector3::zeros()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn polarization_is_unit_and_transverse() {
        for k in [
            Vector3::new(0.3, -0.4, 0.5),
            Vector3::new(-2.0, 1.0, -0.1),
            Vector3::new(1e-3, 2e-3, 5.0),
        ] {
            for axis in Axis::ALL {
                let e = polarization_vector(axis, &k).unwrap();
                let norm: f64 = e.iter().map(|z| z.norm_sqr()).sum();
                assert_relative_eq!(norm, 1.0, epsilon = 1e-14);
                let kd: Complex64 = e.iter().zip(k.iter()).map(|(z, x)| z * x).sum();
                assert!(kd.norm() < 1e-14 * k.norm());
                let ee: Complex64 = e.iter().map(|z| z * z).sum();
                assert!(ee.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn alpha_examples() {
        let a = connection_alpha(Axis::Z, &Vector3::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(a, Vector3::zeros());
        let a = connection_alpha(Axis::Z, &Vector3::new(1.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(a, Vector3::new(0.0, FRAC_1_SQRT_2, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn alpha_matches_polarization_phase_gradient() {
        let k = Vector3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        let id = polarization_identities(Axis::Z, &k).unwrap();
        assert!(id.connection < 1e-6, "{id:?}");
    }

    #[test]
    fn frames_are_cyclic_relabellings() {
        let k = Vector3::new(0.7, -0.2, 0.4);
        let ez = polarization_vector(Axis::Z, &Axis::X.to_local(&k)).unwrap();
        assert_eq!(polarization_vector(Axis::X, &k).unwrap(), Axis::X.from_local(&ez));
        let ez = polarization_vector(Axis::Z, &Axis::Y.to_local(&k)).unwrap();
        assert_eq!(polarization_vector(Axis::Y, &k).unwrap(), Axis::Y.from_local(&ez));
    }

    #[test]
    fn curl_residual_examples() {
        for k in [Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.3, -0.4, 0.5)] {
            let r = verify_connection_curl(Axis::Z, &k).unwrap();
            assert!(r.norm() < 1e-6, "{k:?}: {r:?}");
        }
    }

    #[test]
    fn axial_phase_gradient_matches_differences() {
        let p = AxialPhase(0.3);
        let k = Vector3::new(0.4, -1.1, 0.8);
        let analytic = p.gradient(&k);
        let h = 1e-6;
        for i in 0..3 {
            let mut a = k;
            let mut b = k;
            a[i] += h;
            b[i] -= h;
            let fd = (p.value(&a) - p.value(&b)) / (2.0 * h);
            assert!((fd - analytic[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn gauged_frame_shifts_alpha_and_rotates_e() {
        let k = Vector3::new(0.5, 0.2, -0.3);
        let phase: Arc<dyn GaugePhase> = Arc::new(AxialPhase(0.3));
        let (_, frame) = gauge_transform(&HelicityAmplitudes::zero(), &PolarizationFrame::new(Axis::Z), phase.clone());
        let a0 = connection_alpha(Axis::Z, &k).unwrap();
        assert_relative_eq!(frame.alpha(&k).unwrap(), a0 + phase.gradient(&k), epsilon = 1e-15);
        let e0 = polarization_vector(Axis::Z, &k).unwrap();
        let e1 = frame.polarization(&k).unwrap();
        let rot = Complex64::from_polar(1.0, -phase.value(&k));
        for i in 0..3 {
            assert!((e1[i] - rot * e0[i]).norm() < 1e-15);
        }
    }
}
