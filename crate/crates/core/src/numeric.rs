//! Small numerical kernels shared across modules: compensated summation,
//! bracketed root finding and Simpson integration on uniform samples.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Neumaier-compensated sum. The result depends only on the iteration order,
/// so parallel map + ordered collect + this sum is schedule independent.
pub fn stable_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn stable_sum_complex<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let mut re = Vec::new();
    let mut im = Vec::new();
    for v in values {
        re.push(v.re);
        im.push(v.im);
    }
    Complex64::new(stable_sum(re), stable_sum(im))
}

/// Bisection on a bracket with a sign change. Stops when the bracket is
/// narrower than `tol * max(1, |x|)`.
pub fn bisect<F>(mut g: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut g_lo = g(lo)?;
    let g_hi = g(hi)?;
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket { lo, hi, g_lo, g_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= tol * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Composite Simpson rule on uniformly spaced samples. An even number of
/// intervals is required; a trailing odd interval is closed with the
/// trapezoid rule.
pub fn simpson_uniform(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let intervals = n - 1;
    let even = intervals - intervals % 2;
    let mut acc = Vec::with_capacity(even + 2);
    if even >= 2 {
        acc.push(values[0]);
        acc.push(values[even]);
        for (i, v) in values.iter().enumerate().take(even).skip(1) {
            acc.push(if i % 2 == 1 { 4.0 * v } else { 2.0 * v });
        }
    }
    let mut total = stable_sum(acc) * h / 3.0;
    if even < intervals {
        total += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    total
}

/// Central-difference step used for coordinate partials of closed-form
/// amplitudes.
pub fn fd_step(x: f64, rel: f64) -> f64 {
    rel * x.abs().max(1.0)
}
