//! Numerov shooting for radial equations `−u″ + V(x)u = E·u` on `(0, x_max]`
//! with `V = l(l+1)/x² − 2Z/x + w²x²` and `u(0) = u(x_max) = 0`.
//!
//! Eigenvalues are located by node counting: the outward solution at energy
//! `E` has as many sign changes on the mesh as there are Dirichlet
//! eigenvalues below `E`.

use crate::error::{Error, Result};
use crate::numeric::simpson_uniform;

const RESCALE: f64 = 1e150;

#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialEquation {
    pub l: usize,
    pub z: f64,
    pub w2: f64,
}

impl RadialEquation {
    fn centrifugal(&self) -> f64 {
        (self.l * (self.l + 1)) as f64
    }

    pub fn potential(&self, x: f64) -> f64 {
        self.centrifugal() / (x * x) - 2.0 * self.z / x + self.w2 * x * x
    }

    /// Frobenius series `x^{l+1}(1 + c₁x + c₂x² + c₃x³)` about the origin.
    fn series(&self, x: f64, e: f64) -> f64 {
        let l = self.l as f64;
        let c1 = -self.z / (l + 1.0);
        let c2 = (-2.0 * self.z * c1 - e) / (2.0 * (2.0 * l + 3.0));
        let c3 = (-2.0 * self.z * c2 - e * c1) / (3.0 * (2.0 * l + 4.0));
        x.powi(self.l as i32 + 1) * (1.0 + x * (c1 + x * (c2 + x * c3)))
    }
}

/// Uniform mesh `x_i = i·h`, `i = 0..=n`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Mesh {
    pub h: f64,
    pub n: usize,
}

impl Mesh {
    pub fn new(x_max: f64, n: usize) -> Self {
        Mesh { h: x_max / n as f64, n }
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n)
    }
}

/// Numerov coefficient `1 + h²g/12` with `g = E − V`.
fn numerov_factor(eq: &RadialEquation, e: f64, mesh: &Mesh, i: usize) -> f64 {
    1.0 + mesh.h * mesh.h * (e - eq.potential(mesh.x(i))) / 12.0
}

fn numerov_step(u_prev: f64, u_cur: f64, f_prev: f64, f_cur: f64, f_next: f64) -> f64 {
    ((12.0 - 10.0 * f_cur) * u_cur - f_prev * u_prev) / f_next
}

/// Outward integration up to index `stop`, rescaling on overflow.
fn outward(eq: &RadialEquation, e: f64, mesh: &Mesh, stop: usize) -> Vec<f64> {
    let mut u = vec![0.0; stop + 1];
    u[1] = eq.series(mesh.x(1), e);
    if stop >= 2 {
        u[2] = eq.series(mesh.x(2), e);
    }
    let mut f_prev = numerov_factor(eq, e, mesh, 1);
    let mut f_cur = numerov_factor(eq, e, mesh, 2);
    for i in 2..stop {
        let f_next = numerov_factor(eq, e, mesh, i + 1);
        u[i + 1] = numerov_step(u[i - 1], u[i], f_prev, f_cur, f_next);
        if u[i + 1].abs() > RESCALE {
            for v in u.iter_mut().take(i + 2) {
                *v /= RESCALE;
            }
        }
        f_prev = f_cur;
        f_cur = f_next;
    }
    u
}

fn count_nodes(eq: &RadialEquation, e: f64, mesh: &Mesh) -> usize {
    let (mut u_prev, mut u_cur) = (eq.series(mesh.x(1), e), eq.series(mesh.x(2), e));
    let mut f_prev = numerov_factor(eq, e, mesh, 1);
    let mut f_cur = numerov_factor(eq, e, mesh, 2);
    let mut nodes = usize::from(u_prev * u_cur < 0.0);
    for i in 2..mesh.n {
        let f_next = numerov_factor(eq, e, mesh, i + 1);
        let mut u_next = numerov_step(u_prev, u_cur, f_prev, f_cur, f_next);
        if u_next.abs() > RESCALE {
            u_next /= RESCALE;
            u_cur /= RESCALE;
        }
        if u_next == 0.0 || u_cur * u_next < 0.0 {
            nodes += 1;
        }
        u_prev = u_cur;
        u_cur = u_next;
        f_prev = f_cur;
        f_cur = f_next;
    }
    nodes
}

/// The `n_r`-th (0-based) Dirichlet eigenvalue. `hi` is doubled away from
/// `lo` until it lies above the requested level when `expand` is set.
pub(crate) fn dirichlet_eigenvalue(
    eq: &RadialEquation,
    n_r: usize,
    mesh: &Mesh,
    lo: f64,
    hi: f64,
    expand: bool,
) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if count_nodes(eq, lo, mesh) > n_r {
        return Err(Error::Convergence(format!(
            "lower energy bound {lo} already lies above level {n_r}"
        )));
    }
    let mut tries = 0;
    while count_nodes(eq, hi, mesh) <= n_r {
        if !expand || tries > 200 {
            return Err(Error::Convergence(format!(
                "level {n_r} not bound below E = {hi} on a domain of size {}",
                mesh.x_max()
            )));
        }
        hi = lo + 2.0 * (hi - lo);
        tries += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_nodes(eq, mid, mesh) > n_r {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Eigenfunction at a converged energy: outward to the outer classical
/// turning point, inward from `x_max`, matched there and normalized so that
/// `∫u² dx = 1`.
pub(crate) fn eigenfunction(eq: &RadialEquation, e: f64, mesh: &Mesh) -> Result<Vec<f64>> {
    let n = mesh.n;
    let turning = (1..n).rev().find(|&i| e >= eq.potential(mesh.x(i))).unwrap_or(n / 2);
    let m = turning.clamp(3, n - 3);
    let mut u = outward(eq, e, mesh, m + 1);

    let mut v = vec![0.0; n + 1];
    v[n - 1] = 1e-30;
    let mut f_next = numerov_factor(eq, e, mesh, n);
    let mut f_cur = numerov_factor(eq, e, mesh, n - 1);
    for i in (m..n - 1).rev() {
        let f_prev = numerov_factor(eq, e, mesh, i);
        v[i] = numerov_step(v[i + 2], v[i + 1], f_next, f_cur, f_prev);
        if v[i].abs() > RESCALE {
            for w in v.iter_mut().skip(i) {
                *w /= RESCALE;
            }
        }
        f_next = f_cur;
        f_cur = f_prev;
    }
    if v[m] == 0.0 || !v[m].is_finite() {
        return Err(Error::Convergence("inward solution vanished at the matching point".into()));
    }
    let scale = u[m] / v[m];
    u.truncate(m + 1);
    u.extend(v[m + 1..].iter().map(|w| w * scale));

    let norm = simpson_uniform(&u.iter().map(|w| w * w).collect::<Vec<_>>(), mesh.h).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Convergence("eigenfunction normalization failed".into()));
    }
    let peak = u.iter().copied().fold(0.0_f64, |acc, w| if w.abs() > acc.abs() { w } else { acc });
    let sign = peak.signum();
    Ok(u.iter().map(|w| sign * w / norm).collect())
}

/// Largest `|u(x)|/x` over the outer tenth of the domain.
pub(crate) fn tail_amplitude(u: &[f64], mesh: &Mesh) -> f64 {
    let start = mesh.n - mesh.n / 10;
    (start..mesh.n).map(|i| u[i].abs() / mesh.x(i)).fold(0.0, f64::max)
}

/// Fourth-order central first derivative on the mesh (one-sided near ends).
pub(crate) fn gradient(u: &[f64], h: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h)
            } else if i == 0 {
                (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hydrogen_levels() {
        let eq = RadialEquation { l: 1, z: 1.0, w2: 0.0 };
        let mesh = Mesh::new(80.0, 20000);
        let e0 = dirichlet_eigenvalue(&eq, 0, &mesh, -0.5, 0.0, false).unwrap();
        let e1 = dirichlet_eigenvalue(&eq, 1, &mesh, -0.5, 0.0, false).unwrap();
        assert!((e0 + 0.25).abs() < 1e-8, "{e0}");
        assert!((e1 + 1.0 / 9.0).abs() < 1e-8, "{e1}");
    }

    #[test]
    fn oscillator_s_wave() {
        let eq = RadialEquation { l: 0, z: 0.0, w2: 1.0 };
        let mesh = Mesh::new(12.0, 20000);
        let e = dirichlet_eigenvalue(&eq, 0, &mesh, 0.0, 1.0, true).unwrap();
        assert!((e - 3.0).abs() < 1e-8, "{e}");
        let u = eigenfunction(&eq, e, &mesh).unwrap();
        assert!(tail_amplitude(&u, &mesh) < 1e-10);
    }

    #[test]
    fn gradient_is_fourth_order() {
        let h = 0.01;
        let u: Vec<f64> = (0..200).map(|i| (i as f64 * h).sin()).collect();
        let d = gradient(&u, h);
        assert!((d[100] - 1.0f64.cos()).abs() < 1e-9);
    }
}
