use std::f64::consts::PI;

use num_complex::Complex64;
use photon_ur::families::{excited_profile, gaussian_profile, random_smooth_amplitudes, saturating_amplitude};
use photon_ur::{
    build_grid, delta_p, delta_r_cartesian, delta_r_spherical, gamma, Axis, Error, HelicityAmplitudes, MomentumGrid,
    PolarizationFrame, SpreadForm,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Dense composite Simpson over `[0, k_max] × [0, π]`, times 2π for φ.
fn dense(f: impl Fn(f64, f64) -> f64, k_max: f64) -> f64 {
    let (nk, nt) = (4000, 400);
    let weight = |i: usize, n: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
    let (hk, ht) = (k_max / nk as f64, PI / nt as f64);
    let mut total = 0.0;
    for i in 0..=nk {
        let k = i as f64 * hk;
        let mut row = 0.0;
        for j in 0..=nt {
            let t = j as f64 * ht;
            row += weight(j, nt) * f(k, t) * t.sin();
        }
        total += weight(i, nk) * row * ht / 3.0;
    }
    2.0 * PI * total * hk / 3.0
}

/// Spreads of a φ-independent `f₊ = R(k) sinθ` in the z-frame, where
/// `|Df|² + |f|²/k² = R′²s² + 2R²c²/k² + R²s²/k²`.
fn oracle(r: impl Fn(f64) -> (f64, f64), k_max: f64) -> (f64, f64) {
    let norm = dense(|k, t| k * (r(k).0 * t.sin()).powi(2), k_max);
    let pos = dense(
        |k, t| {
            let (v, d) = r(k);
            let (s, c) = t.sin_cos();
            k * k * (d * d * s * s) + v * v * (2.0 * c * c + s * s)
        },
        k_max,
    );
    let mom = dense(|k, t| k * k * (r(k).0 * t.sin()).powi(2), k_max);
    (pos / norm, mom / norm)
}

fn frame() -> PolarizationFrame {
    PolarizationFrame::new(Axis::Z)
}

#[test]
fn saturating_examples() {
    for a in [1.0, 3.0] {
        let grid = MomentumGrid::reference(1.0 / a).unwrap();
        let amps = saturating_amplitude(Axis::Z, a).unwrap();
        let cart = delta_r_cartesian(&amps, &grid, &frame()).unwrap();
        assert!((cart.value - 2.0 * a).abs() < 1e-8 * a, "{}", cart.value);
        assert_eq!(cart.form, SpreadForm::CartesianCovariant);
        assert_eq!(cart.resolution, (64, 48, 32));
        let sph = delta_r_spherical(&amps, &grid).unwrap();
        assert!((sph.value - cart.value).abs() < 1e-8);
        assert_eq!(sph.form, SpreadForm::Spherical);
        assert!((delta_p(&amps, &grid).unwrap() - 2.0 / a).abs() < 1e-8 / a);
    }
    let grid = MomentumGrid::reference(2.0).unwrap();
    assert!((delta_p(&saturating_amplitude(Axis::X, 0.5).unwrap(), &grid).unwrap() - 4.0).abs() < 1e-8);
}

#[test]
fn axis_families_are_z_frame_states() {
    let grid = MomentumGrid::reference(1.0).unwrap();
    let amps = saturating_amplitude(Axis::Y, 1.0).unwrap();
    let sph = delta_r_spherical(&amps, &grid).unwrap().value;
    assert!((sph - 2.0).abs() < 1e-8, "{sph}");
    // The family is written in z-frame coordinates; read in its own axis
    // frame it is a different state.
    let z = delta_r_cartesian(&amps, &grid, &frame()).unwrap().value;
    assert!((z - 2.0).abs() < 1e-8, "{z}");
    let own = delta_r_cartesian(&amps, &grid, &PolarizationFrame::new(Axis::Y)).unwrap().value;
    assert!(own > 2.5, "{own}");
}

#[test]
fn gaussian_matches_dense_oracle() {
    let (dr, dp) = oracle(|k| ((k * (-0.5 * k * k).exp()), (1.0 - k * k) * (-0.5 * k * k).exp()), 12.0);
    let grid = MomentumGrid::reference(1.0).unwrap();
    let amps = gaussian_profile(1.0).unwrap();
    let cart = delta_r_cartesian(&amps, &grid, &frame()).unwrap().value;
    let sph = delta_r_spherical(&amps, &grid).unwrap().value;
    assert!((cart - dr).abs() < 1e-6, "{cart} vs {dr}");
    // No φ dependence, so the spherical cross term is absent.
    assert!((sph - cart).abs() < 1e-12, "{sph} vs {cart}");
    assert!((delta_p(&amps, &grid).unwrap() - dp).abs() < 1e-6);
}

#[test]
fn excited_profile_exceeds_the_bound() {
    let (dr, dp) = oracle(|k| (k * k * (-k).exp(), (2.0 * k - k * k) * (-k).exp()), 60.0);
    let grid = MomentumGrid::reference(1.0).unwrap();
    let rep = gamma(&excited_profile(1.0).unwrap(), &grid, &frame()).unwrap();
    assert!((rep.delta_r - dr).abs() < 1e-6, "{} vs {dr}", rep.delta_r);
    assert!((rep.delta_p - dp).abs() < 1e-6, "{} vs {dp}", rep.delta_p);
    assert!((rep.gamma - dr * dp).abs() < 1e-6);
    assert!(rep.gamma > 4.1);
}

#[test]
fn complex_rescaling_leaves_gamma_unchanged() {
    let grid = MomentumGrid::reference(1.0).unwrap();
    let amps = saturating_amplitude(Axis::Z, 1.0).unwrap();
    let base = gamma(&amps, &grid, &frame()).unwrap();
    let scaled = gamma(&amps.scaled(Complex64::new(2.0, -3.0)), &grid, &frame()).unwrap();
    assert!((base.gamma - scaled.gamma).abs() < 1e-12);
    assert!((scaled.norm_sq - 13.0 * base.norm_sq).abs() < 1e-10);
}

#[test]
fn saturation_holds_for_every_scale() {
    for a in [0.5, 1.0, 2.0] {
        let rep = gamma(&saturating_amplitude(Axis::Z, a).unwrap(), &MomentumGrid::reference(1.0 / a).unwrap(), &frame())
            .unwrap();
        assert!((rep.gamma - 4.0).abs() < 1e-6, "a={a}: {}", rep.gamma);
        assert!(rep.mean_k.norm() < 1e-12);
    }
}

#[test]
fn zero_state_is_rejected() {
    let grid = build_grid(8, 8, 8, 1.0).unwrap();
    let zero = HelicityAmplitudes::zero();
    assert!(matches!(delta_r_cartesian(&zero, &grid, &frame()), Err(Error::ZeroNorm(_))));
    assert!(matches!(delta_r_spherical(&zero, &grid), Err(Error::ZeroNorm(_))));
    assert!(matches!(delta_p(&zero, &grid), Err(Error::ZeroNorm(_))));
    assert!(matches!(gamma(&zero, &grid, &frame()), Err(Error::ZeroNorm(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spreads_are_scale_covariant(s in 0.3f64..3.0) {
        let grid = build_grid(32, 16, 8, 1.0).unwrap();
        let scaled = build_grid(32, 16, 8, 1.0 / s).unwrap();
        let base = gamma(&excited_profile(1.0).unwrap(), &grid, &frame()).unwrap();
        let rep = gamma(&excited_profile(s).unwrap(), &scaled, &frame()).unwrap();
        prop_assert!((rep.delta_r - s * base.delta_r).abs() < 1e-10 * rep.delta_r);
        prop_assert!((rep.delta_p - base.delta_p / s).abs() < 1e-10 * rep.delta_p);
        prop_assert!((rep.gamma - base.gamma).abs() < 1e-10 * base.gamma);
    }

    #[test]
    fn helicity_mirror_preserves_spreads(seed in any::<u64>(), axis in prop_oneof![Just(Axis::X), Just(Axis::Y), Just(Axis::Z)]) {
        let grid = build_grid(24, 16, 8, 1.0).unwrap();
        let frame = PolarizationFrame::new(axis);
        let amps = random_smooth_amplitudes(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = gamma(&amps, &grid, &frame).unwrap();
        let b = gamma(&amps.helicity_mirror(), &grid, &frame).unwrap();
        prop_assert!((a.delta_r - b.delta_r).abs() < 1e-12 * a.delta_r);
        prop_assert!((a.delta_p - b.delta_p).abs() < 1e-12 * a.delta_p);
    }

    #[test]
    fn covariant_and_spherical_forms_agree(seed in any::<u64>()) {
        let grid = build_grid(24, 16, 8, 1.0).unwrap();
        let amps = random_smooth_amplitudes(&mut ChaCha8Rng::seed_from_u64(seed));
        let cart = delta_r_cartesian(&amps, &grid, &frame()).unwrap().value;
        let sph = delta_r_spherical(&amps, &grid).unwrap().value;
        prop_assert!((cart - sph).abs() < 1e-8 * cart, "{} vs {}", cart, sph);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn random_states_respect_the_bound(seed in any::<u64>()) {
        let amps = random_smooth_amplitudes(&mut ChaCha8Rng::seed_from_u64(seed));
        let grid = MomentumGrid::reference(amps.default_k_scale()).unwrap();
        let rep = gamma(&amps, &grid, &frame()).unwrap();
        prop_assert!(rep.gamma >= 4.0 - 1e-6, "{}", rep.gamma);
    }
}
