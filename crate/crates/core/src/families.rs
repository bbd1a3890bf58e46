//! Closed-form amplitude families with analytic partials.
//!
//! A [`SeparableAmplitude`] is `c · R(k) · A(θ, φ)` where `A` is a
//! polynomial in `sin θ, cos θ, cos φ, sin φ`. That covers the saturating
//! solutions, the radially excited and Gaussian test profiles, and the
//! randomized smooth families used for bound checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lightcone::Axis;
use crate::momentum::{Amplitude, Descriptor, HelicityAmplitudes, Partials, SecondPartials, SphericalPoint};

/// Exponents of `sin θ, cos θ, cos φ, sin φ`.
type Exponents = [u32; 4];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPolynomial {
    terms: BTreeMap<Exponents, Complex64>,
}

impl TrigPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn term(mut self, coef: Complex64, sin_theta: u32, cos_theta: u32, cos_phi: u32, sin_phi: u32) -> Self {
        self.add(coef, [sin_theta, cos_theta, cos_phi, sin_phi]);
        self
    }

    fn add(&mut self, coef: Complex64, e: Exponents) {
        if coef == Complex64::new(0.0, 0.0) {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += coef;
        if *slot == Complex64::new(0.0, 0.0) {
            self.terms.remove(&e);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        self.terms
            .iter()
            .map(|(e, c)| {
                c * (st.powi(e[0] as i32) * ct.powi(e[1] as i32) * cp.powi(e[2] as i32) * sp.powi(e[3] as i32))
            })
            .sum()
    }

    pub fn d_theta(&self) -> Self {
        let mut out = Self::new();
        for (&[a, b, p, q], &c) in &self.terms {
            if a > 0 {
                out.add(c * a as f64, [a - 1, b + 1, p, q]);
            }
            if b > 0 {
                out.add(-c * b as f64, [a + 1, b - 1, p, q]);
            }
        }
        out
    }

    pub fn d_phi(&self) -> Self {
        let mut out = Self::new();
        for (&[a, b, p, q], &c) in &self.terms {
            if p > 0 {
                out.add(-c * p as f64, [a, b, p - 1, q + 1]);
            }
            if q > 0 {
                out.add(c * q as f64, [a, b, p + 1, q - 1]);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    /// `k^n e^{-a k}`
    Exponential { power: i32, a: f64 },
    /// `k^n e^{-k²/(2w²)}`
    Gaussian { power: i32, width: f64 },
}

impl RadialProfile {
    /// `(R, R', R'')`
    pub fn eval(&self, k: f64) -> (f64, f64, f64) {
        match *self {
            RadialProfile::Exponential { power, a } => {
                let n = power as f64;
                let v = k.powi(power) * (-a * k).exp();
                let g = n / k - a;
                (v, g * v, (g * g - n / (k * k)) * v)
            }
            RadialProfile::Gaussian { power, width } => {
                let n = power as f64;
                let w2 = width * width;
                let v = k.powi(power) * (-0.5 * k * k / w2).exp();
                let g = n / k - k / w2;
                (v, g * v, (g * g - n / (k * k) - 1.0 / w2) * v)
            }
        }
    }
}

/// `c · R(k) · A(θ, φ)` with analytic first and pure second partials.
#[derive(Debug, Clone)]
pub struct SeparableAmplitude {
    coefficient: Complex64,
    radial: RadialProfile,
    angular: TrigPolynomial,
    d_theta: TrigPolynomial,
    d_theta2: TrigPolynomial,
    d_phi: TrigPolynomial,
    d_phi2: TrigPolynomial,
}

impl SeparableAmplitude {
    pub fn new(coefficient: Complex64, radial: RadialProfile, angular: TrigPolynomial) -> Self {
        let d_theta = angular.d_theta();
        let d_theta2 = d_theta.d_theta();
        let d_phi = angular.d_phi();
        let d_phi2 = d_phi.d_phi();
        Self {
            coefficient,
            radial,
            angular,
            d_theta,
            d_theta2,
            d_phi,
            d_phi2,
        }
    }
}

impl Amplitude for SeparableAmplitude {
    fn value(&self, p: SphericalPoint) -> Complex64 {
        self.coefficient * self.radial.eval(p.k).0 * self.angular.eval(p.theta, p.phi)
    }

    fn partials(&self, p: SphericalPoint) -> Partials {
        let (r, dr, _) = self.radial.eval(p.k);
        let c = self.coefficient;
        Partials {
            dk: c * dr * self.angular.eval(p.theta, p.phi),
            dtheta: c * r * self.d_theta.eval(p.theta, p.phi),
            dphi: c * r * self.d_phi.eval(p.theta, p.phi),
        }
    }

    fn second_partials(&self, p: SphericalPoint) -> SecondPartials {
        let (r, _, d2r) = self.radial.eval(p.k);
        let c = self.coefficient;
        SecondPartials {
            dkk: c * d2r * self.angular.eval(p.theta, p.phi),
            dthth: c * r * self.d_theta2.eval(p.theta, p.phi),
            dphph: c * r * self.d_phi2.eval(p.theta, p.phi),
        }
    }

    fn has_analytic_partials(&self) -> bool {
        true
    }

    fn is_zero(&self) -> bool {
        self.coefficient == Complex64::new(0.0, 0.0) || self.angular.is_empty()
    }
}

/// Closure-backed amplitude; partials by central differences.
pub struct FnAmplitude<F>(pub F);

impl<F> Amplitude for FnAmplitude<F>
where
    F: Fn(SphericalPoint) -> Complex64 + Send + Sync,
{
    fn value(&self, p: SphericalPoint) -> Complex64 {
        (self.0)(p)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Angular factor of the saturating solution singled out by `axis`, written
/// in the z-frame coordinates:
/// z: `sin θ`; x: `−i sin φ − cos θ cos φ`; y: `i cos φ − cos θ sin φ`.
pub fn saturating_angular(axis: Axis) -> TrigPolynomial {
    match axis {
        Axis::Z => TrigPolynomial::new().term(c(1.0, 0.0), 1, 0, 0, 0),
        Axis::X => TrigPolynomial::new()
            .term(c(0.0, -1.0), 0, 0, 0, 1)
            .term(c(-1.0, 0.0), 0, 1, 1, 0),
        Axis::Y => TrigPolynomial::new()
            .term(c(0.0, 1.0), 0, 0, 1, 0)
            .term(c(-1.0, 0.0), 0, 1, 0, 1),
    }
}

/// Normalized saturating amplitude `f₊ = (a²/√π) k A(θ, φ) e^{-ka}`,
/// `f₋ = 0`, for use with the z-axis polarization frame.
pub fn saturating_amplitude(axis: Axis, a: f64) -> Result<HelicityAmplitudes> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale a must be positive, got {a}")));
    }
    let amp = SeparableAmplitude::new(
        c(a * a / PI.sqrt(), 0.0),
        RadialProfile::Exponential { power: 1, a },
        saturating_angular(axis),
    );
    Ok(HelicityAmplitudes::plus_only(
        Arc::new(amp),
        Descriptor::new(format!("sat-{axis}")).with("a", a),
    ))
}

/// `f₊ = k sin θ e^{-k²/(2w²)}` (unnormalized).
pub fn gaussian_profile(width: f64) -> Result<HelicityAmplitudes> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!("width must be positive, got {width}")));
    }
    let amp = SeparableAmplitude::new(
        c(1.0, 0.0),
        RadialProfile::Gaussian { power: 1, width },
        saturating_angular(Axis::Z),
    );
    Ok(HelicityAmplitudes::plus_only(
        Arc::new(amp),
        Descriptor::new("gaussian").with("width", width),
    ))
}

/// `f₊ = k² sin θ e^{-ka}` (unnormalized), a radially excited profile.
pub fn excited_profile(a: f64) -> Result<HelicityAmplitudes> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale a must be positive, got {a}")));
    }
    let amp = SeparableAmplitude::new(
        c(1.0, 0.0),
        RadialProfile::Exponential { power: 2, a },
        saturating_angular(Axis::Z),
    );
    Ok(HelicityAmplitudes::plus_only(
        Arc::new(amp),
        Descriptor::new("excited").with("a", a),
    ))
}

fn random_angular<R: Rng + ?Sized>(rng: &mut R, parity: u32) -> TrigPolynomial {
    let mut poly = TrigPolynomial::new();
    for b in 0..=2u32 {
        for p in 0..=2u32 {
            for q in 0..=2u32 {
                if b + p + q > 2 || (b + p + q) % 2 != parity {
                    continue;
                }
                let coef = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                poly.add(coef, [1, b, p, q]);
            }
        }
    }
    poly
}

/// Randomized smooth, string-regular amplitude
/// `f_λ = k sin θ P_λ(cos θ, cos φ, sin φ) e^{-ka}`.
///
/// Each `P_λ` has degree ≤ 2 and definite parity under `k → −k`, so
/// `|f_λ|²` is even and `⟨k⟩ = 0`. The negative-helicity component is
/// present with probability ½.
pub fn random_smooth_amplitudes<R: Rng + ?Sized>(rng: &mut R) -> HelicityAmplitudes {
    let a = rng.random_range(0.5..2.0);
    let parity = rng.random_range(0..2u32);
    let radial = RadialProfile::Exponential { power: 1, a };
    let plus = SeparableAmplitude::new(c(1.0, 0.0), radial, random_angular(rng, parity));
    let minus: Arc<dyn Amplitude> = if rng.random_bool(0.5) {
        let parity = rng.random_range(0..2u32);
        Arc::new(SeparableAmplitude::new(c(1.0, 0.0), radial, random_angular(rng, parity)))
    } else {
        Arc::new(crate::momentum::ZeroAmplitude)
    };
    HelicityAmplitudes::new(Arc::new(plus), minus, Descriptor::new("random").with("a", a))
}
