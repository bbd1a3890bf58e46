//! Photon wavefunctions in momentum space and the light-cone measure.
//!
//! Amplitudes are functions of spherical momentum coordinates `(k, θ, φ)`
//! with `θ` measured from the z axis. All integrals are tensor-product
//! quadratures over a [`MomentumGrid`]; the grid never contains `k = 0`
//! or a node with `sin θ = 0`, so string-singular quantities are always
//! evaluated off the string.

use std::f64::consts::PI;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{fd_step, stable_sum};

/// Resolution `(n_k, n_θ, n_φ)` at which the published closed-form values
/// are reproduced to 1e-8 or better.
pub const REFERENCE_RESOLUTION: (usize, usize, usize) = (64, 48, 32);

const FD_FIRST: f64 = 1e-5;
const FD_SECOND: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub k: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(k: f64, theta: f64, phi: f64) -> Self {
        Self { k, theta, phi }
    }

    /// Azimuth is returned in `[0, 2π)`.
    pub fn from_cartesian(v: &Vector3<f64>) -> Self {
        let k = v.norm();
        let theta = if k > 0.0 { (v.z / k).clamp(-1.0, 1.0).acos() } else { 0.0 };
        let mut phi = v.y.atan2(v.x);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        Self { k, theta, phi }
    }

    pub fn to_cartesian(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(self.k * st * cp, self.k * st * sp, self.k * ct)
    }

    /// Orthonormal triad `(k̂, θ̂, φ̂)`.
    pub fn basis(&self) -> [Vector3<f64>; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [
            Vector3::new(st * cp, st * sp, ct),
            Vector3::new(ct * cp, ct * sp, -st),
            Vector3::new(-sp, cp, 0.0),
        ]
    }
}

/// First partials `(∂_k f, ∂_θ f, ∂_φ f)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Partials {
    pub dk: Complex64,
    pub dtheta: Complex64,
    pub dphi: Complex64,
}

/// Pure second partials `(∂²_k f, ∂²_θ f, ∂²_φ f)`; mixed partials are
/// never needed by the operators in this crate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SecondPartials {
    pub dkk: Complex64,
    pub dthth: Complex64,
    pub dphph: Complex64,
}

/// One helicity component `f_λ(k, θ, φ)`.
///
/// Implementors must be 2π-periodic in `φ`. Partials default to central
/// differences; closed-form families override them.
pub trait Amplitude: Send + Sync {
    fn value(&self, p: SphericalPoint) -> Complex64;

    fn partials(&self, p: SphericalPoint) -> Partials {
        finite_difference_partials(|q| self.value(q), p)
    }

    fn second_partials(&self, p: SphericalPoint) -> SecondPartials {
        finite_difference_second_partials(|q| self.value(q), p)
    }

    fn has_analytic_partials(&self) -> bool {
        false
    }

    /// Lets integrators skip a component that is identically zero.
    fn is_zero(&self) -> bool {
        false
    }
}

pub fn finite_difference_partials<F>(f: F, p: SphericalPoint) -> Partials
where
    F: Fn(SphericalPoint) -> Complex64,
{
    let hk = fd_step(p.k, FD_FIRST);
    let ht = fd_step(p.theta, FD_FIRST);
    let hp = fd_step(p.phi, FD_FIRST);
    let d = |a: SphericalPoint, b: SphericalPoint, h: f64| (f(a) - f(b)) / (2.0 * h);
    Partials {
        dk: d(
            SphericalPoint { k: p.k + hk, ..p },
            SphericalPoint { k: p.k - hk, ..p },
            hk,
        ),
        dtheta: d(
            SphericalPoint { theta: p.theta + ht, ..p },
            SphericalPoint { theta: p.theta - ht, ..p },
            ht,
        ),
        dphi: d(
            SphericalPoint { phi: p.phi + hp, ..p },
            SphericalPoint { phi: p.phi - hp, ..p },
            hp,
        ),
    }
}

pub fn finite_difference_second_partials<F>(f: F, p: SphericalPoint) -> SecondPartials
where
    F: Fn(SphericalPoint) -> Complex64,
{
    let f0 = f(p);
    let hk = fd_step(p.k, FD_SECOND).min(0.5 * p.k);
    let ht = fd_step(p.theta, FD_SECOND);
    let hp = fd_step(p.phi, FD_SECOND);
    let d2 = |a: SphericalPoint, b: SphericalPoint, h: f64| (f(a) - 2.0 * f0 + f(b)) / (h * h);
    SecondPartials {
        dkk: d2(
            SphericalPoint { k: p.k + hk, ..p },
            SphericalPoint { k: p.k - hk, ..p },
            hk,
        ),
        dthth: d2(
            SphericalPoint { theta: p.theta + ht, ..p },
            SphericalPoint { theta: p.theta - ht, ..p },
            ht,
        ),
        dphph: d2(
            SphericalPoint { phi: p.phi + hp, ..p },
            SphericalPoint { phi: p.phi - hp, ..p },
            hp,
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Helicity {
    Plus,
    Minus,
}

impl Helicity {
    pub const BOTH: [Helicity; 2] = [Helicity::Plus, Helicity::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }

    pub fn from_sign(lambda: i32) -> Result<Self> {
        match lambda {
            1 => Ok(Helicity::Plus),
            -1 => Ok(Helicity::Minus),
            other => Err(Error::InvalidArgument(format!(
                "helicity must be +1 or -1, got {other}"
            ))),
        }
    }
}

/// Family name plus numeric parameters, e.g. `sat-z` with `a = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub family: String,
    pub params: Vec<(String, f64)>,
}

impl Descriptor {
    pub fn new(family: impl Into<String>) -> Self {
        Self {
            family: family.into(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.push((name.into(), value));
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// The length scale `a`, when the family has one.
    pub fn scale(&self) -> Option<f64> {
        self.param("a")
    }
}

/// The helicity pair `(f₊, f₋)`.
#[derive(Clone)]
pub struct HelicityAmplitudes {
    plus: Arc<dyn Amplitude>,
    minus: Arc<dyn Amplitude>,
    descriptor: Descriptor,
}

impl fmt::Debug for HelicityAmplitudes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HelicityAmplitudes")
            .field("descriptor", &self.descriptor)
            .finish_non_exhaustive()
    }
}

impl HelicityAmplitudes {
    pub fn new(plus: Arc<dyn Amplitude>, minus: Arc<dyn Amplitude>, descriptor: Descriptor) -> Self {
        Self {
            plus,
            minus,
            descriptor,
        }
    }

    pub fn plus_only(plus: Arc<dyn Amplitude>, descriptor: Descriptor) -> Self {
        Self::new(plus, Arc::new(ZeroAmplitude), descriptor)
    }

    pub fn zero() -> Self {
        Self::new(
            Arc::new(ZeroAmplitude),
            Arc::new(ZeroAmplitude),
            Descriptor::new("zero"),
        )
    }

    pub fn component(&self, h: Helicity) -> &Arc<dyn Amplitude> {
        match h {
            Helicity::Plus => &self.plus,
            Helicity::Minus => &self.minus,
        }
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    /// Default radial grid scale `1/a`, or 1 when the family has no `a`.
    pub fn default_k_scale(&self) -> f64 {
        self.descriptor.scale().map_or(1.0, |a| 1.0 / a)
    }

    /// `c · f` for both components.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            plus: Arc::new(Scaled {
                inner: self.plus.clone(),
                factor: c,
            }),
            minus: Arc::new(Scaled {
                inner: self.minus.clone(),
                factor: c,
            }),
            descriptor: self.descriptor.clone(),
        }
    }

    /// Exchanges helicities through complex conjugation:
    /// `f₊' = f₋*`, `f₋' = f₊*`.
    pub fn helicity_mirror(&self) -> Self {
        Self {
            plus: Arc::new(Conjugated {
                inner: self.minus.clone(),
            }),
            minus: Arc::new(Conjugated {
                inner: self.plus.clone(),
            }),
            descriptor: Descriptor {
                family: format!("{}-mirror", self.descriptor.family),
                params: self.descriptor.params.clone(),
            },
        }
    }

    /// Largest relative deviation between supplied partials and central
    /// differences over all grid nodes, per component. Components with
    /// finite-difference partials report 0.
    pub fn partials_consistency(&self, grid: &MomentumGrid) -> f64 {
        Helicity::BOTH
            .iter()
            .map(|&h| {
                let amp = self.component(h);
                if amp.is_zero() || !amp.has_analytic_partials() {
                    return 0.0;
                }
                grid.nodes()
                    .par_iter()
                    .map(|node| {
                        let p = node.point;
                        let a = amp.partials(p);
                        let fd = finite_difference_partials(|q| amp.value(q), p);
                        let scale = a.dk.norm().max(a.dtheta.norm()).max(a.dphi.norm()).max(amp.value(p).norm());
                        if scale == 0.0 {
                            return 0.0;
                        }
                        [(a.dk - fd.dk), (a.dtheta - fd.dtheta), (a.dphi - fd.dphi)]
                            .iter()
                            .map(|d| d.norm() / scale)
                            .fold(0.0, f64::max)
                    })
                    .reduce(|| 0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroAmplitude;

impl Amplitude for ZeroAmplitude {
    fn value(&self, _: SphericalPoint) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn partials(&self, _: SphericalPoint) -> Partials {
        Partials::default()
    }
    fn second_partials(&self, _: SphericalPoint) -> SecondPartials {
        SecondPartials::default()
    }
    fn has_analytic_partials(&self) -> bool {
        true
    }
    fn is_zero(&self) -> bool {
        true
    }
}

struct Scaled {
    inner: Arc<dyn Amplitude>,
    factor: Complex64,
}

impl Amplitude for Scaled {
    fn value(&self, p: SphericalPoint) -> Complex64 {
        self.factor * self.inner.value(p)
    }
    fn partials(&self, p: SphericalPoint) -> Partials {
        let d = self.inner.partials(p);
        Partials {
            dk: self.factor * d.dk,
            dtheta: self.factor * d.dtheta,
            dphi: self.factor * d.dphi,
        }
    }
    fn second_partials(&self, p: SphericalPoint) -> SecondPartials {
        let d = self.inner.second_partials(p);
        SecondPartials {
            dkk: self.factor * d.dkk,
            dthth: self.factor * d.dthth,
            dphph: self.factor * d.dphph,
        }
    }
    fn has_analytic_partials(&self) -> bool {
        self.inner.has_analytic_partials()
    }
    fn is_zero(&self) -> bool {
        self.inner.is_zero() || self.factor == Complex64::new(0.0, 0.0)
    }
}

struct Conjugated {
    inner: Arc<dyn Amplitude>,
}

impl Amplitude for Conjugated {
    fn value(&self, p: SphericalPoint) -> Complex64 {
        self.inner.value(p).conj()
    }
    fn partials(&self, p: SphericalPoint) -> Partials {
        let d = self.inner.partials(p);
        Partials {
            dk: d.dk.conj(),
            dtheta: d.dtheta.conj(),
            dphi: d.dphi.conj(),
        }
    }
    fn second_partials(&self, p: SphericalPoint) -> SecondPartials {
        let d = self.inner.second_partials(p);
        SecondPartials {
            dkk: d.dkk.conj(),
            dthth: d.dthth.conj(),
            dphph: d.dphph.conj(),
        }
    }
    fn has_analytic_partials(&self) -> bool {
        self.inner.has_analytic_partials()
    }
    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }
}

/// A quadrature node. `weight` already contains the radial Jacobian, the
/// `sin θ dθ` factor and the azimuthal step, so `Σ weight · g` approximates
/// `∫ dk dΩ g`. Measure powers of `k` are applied by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridNode {
    pub point: SphericalPoint,
    pub cartesian: Vector3<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub k_nodes: Vec<f64>,
    pub k_weights: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    /// Gauss–Legendre weights in `cos θ`, i.e. weights for `sin θ dθ`.
    pub theta_weights: Vec<f64>,
    pub phi_nodes: Vec<f64>,
    pub phi_weights: Vec<f64>,
    pub k_scale: f64,
    nodes: Vec<GridNode>,
}

fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("n >= 1"));
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Tensor-product grid on the light cone.
///
/// Radial nodes are Gauss–Legendre in `x ∈ (0, 1)` mapped by
/// `k = s·x/(1−x)`; polar nodes are Gauss–Legendre in `cos θ`; azimuthal
/// nodes are the half-shifted trapezoid rule `φ_j = 2π(j+½)/n_φ`.
pub fn build_grid(n_k: usize, n_theta: usize, n_phi: usize, k_scale: f64) -> Result<MomentumGrid> {
    if n_k < 4 || n_theta < 4 || n_phi < 4 {
        return Err(Error::InvalidArgument(format!(
            "grid counts must be >= 4, got ({n_k}, {n_theta}, {n_phi})"
        )));
    }
    if !(k_scale > 0.0 && k_scale.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "k_scale must be positive and finite, got {k_scale}"
        )));
    }

    let (k_nodes, k_weights): (Vec<f64>, Vec<f64>) = gauss_legendre(n_k)
        .into_iter()
        .map(|(xi, w)| {
            let x = 0.5 * (xi + 1.0);
            let one_minus = 0.5 * (1.0 - xi);
            (k_scale * x / one_minus, 0.5 * w * k_scale / (one_minus * one_minus))
        })
        .unzip();

    // Descending cos θ gives ascending θ.
    let (theta_nodes, theta_weights): (Vec<f64>, Vec<f64>) = gauss_legendre(n_theta)
        .into_iter()
        .rev()
        .map(|(x, w)| (x.acos(), w))
        .unzip();

    let dphi = 2.0 * PI / n_phi as f64;
    let phi_nodes: Vec<f64> = (0..n_phi).map(|j| (j as f64 + 0.5) * dphi).collect();
    let phi_weights = vec![dphi; n_phi];

    let mut nodes = Vec::with_capacity(n_k * n_theta * n_phi);
    for (&k, &wk) in k_nodes.iter().zip(&k_weights) {
        for (&theta, &wt) in theta_nodes.iter().zip(&theta_weights) {
            for (&phi, &wp) in phi_nodes.iter().zip(&phi_weights) {
                let point = SphericalPoint { k, theta, phi };
                nodes.push(GridNode {
                    point,
                    cartesian: point.to_cartesian(),
                    weight: wk * wt * wp,
                });
            }
        }
    }

    Ok(MomentumGrid {
        k_nodes,
        k_weights,
        theta_nodes,
        theta_weights,
        phi_nodes,
        phi_weights,
        k_scale,
        nodes,
    })
}

impl MomentumGrid {
    pub fn reference(k_scale: f64) -> Result<Self> {
        let (a, b, c) = REFERENCE_RESOLUTION;
        build_grid(a, b, c, k_scale)
    }

    pub fn resolution(&self) -> (usize, usize, usize) {
        (self.k_nodes.len(), self.theta_nodes.len(), self.phi_nodes.len())
    }

    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    /// `∫ dk dΩ g` by the tensor rule; `g` sees each node.
    pub fn integrate<F>(&self, g: F) -> f64
    where
        F: Fn(&GridNode) -> f64 + Sync,
    {
        let terms: Vec<f64> = self.nodes.par_iter().map(|n| n.weight * g(n)).collect();
        stable_sum(terms)
    }
}

fn check_finite(z: Complex64, quantity: &'static str, p: SphericalPoint) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite {
            quantity,
            k: p.k,
            theta: p.theta,
            phi: p.phi,
        })
    }
}

/// Values of one component at every node, in node order.
pub(crate) fn sample_values(amp: &dyn Amplitude, grid: &MomentumGrid) -> Result<Vec<Complex64>> {
    if amp.is_zero() {
        return Ok(vec![Complex64::new(0.0, 0.0); grid.nodes.len()]);
    }
    grid.nodes
        .par_iter()
        .map(|n| check_finite(amp.value(n.point), "amplitude", n.point))
        .collect()
}

/// Values and first partials at every node.
pub(crate) fn sample_with_partials(
    amp: &dyn Amplitude,
    grid: &MomentumGrid,
) -> Result<Vec<(Complex64, Partials)>> {
    if amp.is_zero() {
        return Ok(vec![(Complex64::new(0.0, 0.0), Partials::default()); grid.nodes.len()]);
    }
    grid.nodes
        .par_iter()
        .map(|n| {
            let p = n.point;
            let v = check_finite(amp.value(p), "amplitude", p)?;
            let d = amp.partials(p);
            check_finite(d.dk, "partial derivative", p)?;
            check_finite(d.dtheta, "partial derivative", p)?;
            check_finite(d.dphi, "partial derivative", p)?;
            Ok((v, d))
        })
        .collect()
}

/// `Σ_λ ∫ (d³k/k) |f_λ|²`.
pub fn norm_squared(amps: &HelicityAmplitudes, grid: &MomentumGrid) -> Result<f64> {
    let mut parts = Vec::with_capacity(2);
    for h in Helicity::BOTH {
        let values = sample_values(amps.component(h).as_ref(), grid)?;
        let terms: Vec<f64> = grid
            .nodes
            .iter()
            .zip(&values)
            .map(|(n, f)| n.weight * n.point.k * f.norm_sqr())
            .collect();
        parts.push(stable_sum(terms));
    }
    Ok(stable_sum(parts))
}

/// `⟨k⟩ = ‖f‖⁻² Σ_λ ∫ (d³k/k) k |f_λ|²`, using the same relativistic
/// measure as the norm.
pub fn mean_momentum(amps: &HelicityAmplitudes, grid: &MomentumGrid) -> Result<Vector3<f64>> {
    let mut norm = Vec::new();
    let mut comps: [Vec<f64>; 3] = Default::default();
    for h in Helicity::BOTH {
        let values = sample_values(amps.component(h).as_ref(), grid)?;
        for (n, f) in grid.nodes.iter().zip(&values) {
            let w = n.weight * n.point.k * f.norm_sqr();
            norm.push(w);
            for (c, acc) in comps.iter_mut().enumerate() {
                acc.push(w * n.cartesian[c]);
            }
        }
    }
    let norm = stable_sum(norm);
    if norm <= 0.0 {
        return Err(Error::ZeroNorm("mean momentum"));
    }
    let [x, y, z] = comps;
    Ok(Vector3::new(stable_sum(x), stable_sum(y), stable_sum(z)) / norm)
}
