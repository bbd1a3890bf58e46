use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use photon_ur::field::{
    closed_form_energy, electric_field_t0, energy_density, real_space_delta_r, synthesis_grid, synthesize_field,
    total_energy, trusted_radius, whittaker_field, whittaker_rs_field, SpatialGrid,
};
use photon_ur::{
    delta_r_cartesian, saturating_amplitude, Axis, Error, HelicityAmplitudes, MomentumGrid, PolarizationFrame,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

fn max_relative(a: &[Vector3<Complex64>], b: &[Vector3<Complex64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm() / y.norm()).fold(0.0, f64::max)
}

fn z_frame() -> PolarizationFrame {
    PolarizationFrame::new(Axis::Z)
}

#[test]
fn zero_amplitudes_give_zero_field() {
    let grid = MomentumGrid::reference(1.0).unwrap();
    let pts = SpatialGrid::cube(2.0, 3).unwrap();
    let f = synthesize_field(&HelicityAmplitudes::zero(), &grid, &z_frame(), &pts, 0.3).unwrap();
    assert!(f.values.iter().all(|v| v.iter().all(|c| *c == Complex64::new(0.0, 0.0))));
}

#[test]
fn synthesis_matches_closed_form_near_origin() {
    let amps = saturating_amplitude(Axis::Z, 1.0).unwrap();
    let grid = synthesis_grid(1.0).unwrap();
    for (r, t) in [(Vector3::zeros(), 0.0), (Vector3::new(0.5, 0.3, -0.2), 0.4)] {
        let pts = SpatialGrid::from_points(vec![r]);
        let f = synthesize_field(&amps, &grid, &z_frame(), &pts, t).unwrap();
        let w = whittaker_field(Axis::Z, 1.0, &r, t).unwrap();
        assert!(max_relative(&f.values, &[w]) < 1e-6);
    }
}

#[test]
fn synthesis_scales_with_a() {
    let a = 2.0;
    let amps = saturating_amplitude(Axis::Y, a).unwrap();
    let grid = synthesis_grid(a).unwrap();
    let pts = SpatialGrid::from_points(vec![Vector3::new(1.0, -0.6, 0.4), Vector3::new(-2.0, 0.5, 1.5)]);
    let f = synthesize_field(&amps, &grid, &z_frame(), &pts, 0.8).unwrap();
    let w: Vec<_> = pts.points.iter().map(|r| whittaker_field(Axis::Y, a, r, 0.8).unwrap()).collect();
    assert!(max_relative(&f.values, &w) < 1e-6);
}

#[test]
fn phase_guard() {
    let amps = saturating_amplitude(Axis::Z, 1.0).unwrap();
    let grid = MomentumGrid::reference(1.0).unwrap();
    let rho = trusted_radius(&grid);
    let near = SpatialGrid::from_points(vec![Vector3::new(0.0, 0.0, 1.5 * rho)]);
    let f = synthesize_field(&amps, &grid, &z_frame(), &near, 0.0).unwrap();
    assert_eq!(f.phase_warnings, 1);
    let far = SpatialGrid::from_points(vec![Vector3::new(0.0, 0.0, 2.5 * rho)]);
    assert!(matches!(
        synthesize_field(&amps, &grid, &z_frame(), &far, 0.0),
        Err(Error::PhaseResolution { .. })
    ));
}

#[test]
fn pure_electric_at_time_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let r = random_point(&mut rng, 3.0);
        for axis in Axis::ALL {
            let f = whittaker_field(axis, 1.3, &r, 0.0).unwrap();
            assert!(f.iter().all(|c| c.im.abs() < 1e-10));
        }
    }
}

#[test]
fn electric_field_closed_form() {
    // The t = 0 field is real and equals (4a²/π)(2xz − 2ay, 2yz + 2ax, a² − r² + 2z²)/(a² + r²)³.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for a in [0.5, 1.0, 2.0] {
        for _ in 0..20 {
            let r = random_point(&mut rng, 3.0 * a);
            let f = whittaker_field(Axis::Z, a, &r, 0.0).unwrap();
            let e = electric_field_t0(a, &r);
            for c in 0..3 {
                assert!((f[c].re - e[c]).abs() < 1e-12 * e.norm());
            }
        }
    }
}

#[test]
fn energy_density_is_shared_and_spherical() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let r = random_point(&mut rng, 2.5);
        let exact = closed_form_energy(1.0, r.norm());
        for axis in Axis::ALL {
            let f = whittaker_field(axis, 1.0, &r, 0.0).unwrap();
            let e: f64 = f.iter().map(|c| c.norm_sqr()).sum();
            assert!((e - exact).abs() < 1e-6 * exact);
        }
    }
    for radius in [0.3, 1.0, 4.0] {
        let values: Vec<f64> = (0..40)
            .map(|_| {
                let d = random_point(&mut rng, 1.0).normalize() * radius;
                whittaker_field(Axis::X, 1.0, &d, 0.0).unwrap().iter().map(|c| c.norm_sqr()).sum()
            })
            .collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        assert!(var < 1e-10);
    }
}

#[test]
fn total_energy_and_conservation() {
    for a in [1.0, 2.0] {
        let mut energies = Vec::new();
        for t in [0.0, 0.5 * a, a] {
            let ball = SpatialGrid::ball(30.0 * a + t, a, 128, 24, 24).unwrap();
            let f = whittaker_rs_field(Axis::Z, a, &ball, t).unwrap();
            energies.push(total_energy(&f, &ball).unwrap());
        }
        for e in &energies {
            assert!((e - 2.0 / a).abs() < 1e-3 * 2.0 / a, "{e}");
            assert!((e - energies[0]).abs() < 1e-3 * energies[0]);
        }
    }
}

#[test]
fn real_space_spread_matches_momentum_space() {
    for a in [1.0, 2.0] {
        let ball = SpatialGrid::ball(30.0 * a, a, 128, 16, 16).unwrap();
        let f = whittaker_rs_field(Axis::Z, a, &ball, 0.0).unwrap();
        let dr = real_space_delta_r(&f, &ball, 1.0).unwrap();
        assert!((dr - 2.0 * a).abs() < 0.01 * 2.0 * a, "{dr}");
        let amps = saturating_amplitude(Axis::Z, a).unwrap();
        let grid = MomentumGrid::reference(1.0 / a).unwrap();
        let dk = delta_r_cartesian(&amps, &grid, &z_frame()).unwrap().value;
        assert!((dr - dk).abs() < 0.01 * dk);
    }
}

#[test]
fn spread_grows_away_from_compression() {
    let ball0 = SpatialGrid::ball(30.0, 1.0, 128, 16, 16).unwrap();
    let ball1 = SpatialGrid::ball(31.0, 1.0, 128, 24, 24).unwrap();
    let d0 = real_space_delta_r(&whittaker_rs_field(Axis::Z, 1.0, &ball0, 0.0).unwrap(), &ball0, 1.0).unwrap();
    let d1 = real_space_delta_r(&whittaker_rs_field(Axis::Z, 1.0, &ball1, 1.0).unwrap(), &ball1, 1.0).unwrap();
    assert!(d1 > d0, "{d1} <= {d0}");
}

#[test]
fn small_domain_reports_truncation() {
    let ball = SpatialGrid::ball(3.0, 1.0, 64, 8, 8).unwrap();
    let f = whittaker_rs_field(Axis::Z, 1.0, &ball, 0.0).unwrap();
    match real_space_delta_r(&f, &ball, 1.0) {
        Err(Error::Truncation { suggested_radius, tail_fraction, .. }) => {
            assert!(tail_fraction > 1e-3);
            assert!(suggested_radius > 3.0);
            // The suggested radius is sufficient.
            let ball = SpatialGrid::ball(suggested_radius, 1.0, 96, 8, 8).unwrap();
            let f = whittaker_rs_field(Axis::Z, 1.0, &ball, 0.0).unwrap();
            let r = real_space_delta_r(&f, &ball, 1.0);
            assert!(r.is_ok(), "{suggested_radius} {tail_fraction} {r:?}");
        }
        other => panic!("expected truncation error, got {other:?}"),
    }
}

#[test]
fn energy_density_helper_is_pointwise() {
    let pts = SpatialGrid::from_points(vec![Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)]);
    let f = whittaker_rs_field(Axis::Z, 1.0, &pts, 0.0).unwrap();
    let e = energy_density(&f);
    assert!((e[0] - 16.0 / (PI * PI)).abs() < 1e-12);
    assert!((e[1] - closed_form_energy(1.0, 1.0)).abs() < 1e-12);
}
