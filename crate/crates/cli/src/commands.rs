//! Subcommand implementations; each returns a [`Report`].

use std::sync::Arc;

use nalgebra::Vector3;
use photon_ur::families::{excited_profile, gaussian_profile, random_smooth_amplitudes};
use photon_ur::field::{
    energy_density, synthesis_grid, synthesize_field, whittaker_field, whittaker_rs_field, SpatialGrid, RSField,
    SYNTHESIS_K_SCALE, SYNTHESIS_RESOLUTION,
};
use photon_ur::lightcone::{gauge_transform, polarization_identities, verify_connection_curl, AxialPhase};
use photon_ur::momentum::REFERENCE_RESOLUTION;
use photon_ur::variational::{ho_baseline, ho_ground_spreads, pde_residual, radial_coulomb_energy, solve_angular, solve_gamma};
use photon_ur::{
    build_grid, delta_r_cartesian, delta_r_spherical, gamma, saturating_amplitude, Axis, Helicity, HelicityAmplitudes,
    MomentumGrid, PolarizationFrame,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{
    AmplitudeArgs, BaselineArgs, Command, Family, GammaArgs, GridArgs, Method, ResidualArgs, SpectrumArgs,
    SynthesizeArgs, VerifyArgs,
};
use crate::error::CliError;
use crate::expr::expression_amplitudes;
use crate::output::{Cell, Format, Report, Table};

/// Runs one subcommand. A failing `verify` still yields its report, paired
/// with the error that sets the exit status.
pub fn run(command: &Command) -> Result<(Report, Option<CliError>), CliError> {
    match command {
        Command::Gamma(a) => gamma_report(a).map(|r| (r, None)),
        Command::Spectrum(a) => spectrum(a).map(|r| (r, None)),
        Command::BaselineHo(a) => baseline(a).map(|r| (r, None)),
        Command::Synthesize(a) => synthesize(a).map(|r| (r, None)),
        Command::Verify(a) => verify(a),
        Command::Residual(a) => residual(a).map(|r| (r, None)),
    }
}

pub fn default_format(command: &Command) -> Format {
    match command {
        Command::Spectrum(_) | Command::Synthesize(_) => Format::Csv,
        _ => Format::Json,
    }
}

/// Parses expressions before anything is evaluated.
pub fn amplitudes(args: &AmplitudeArgs) -> Result<HelicityAmplitudes, CliError> {
    if args.f_plus.is_some() || args.f_minus.is_some() {
        if !(args.a > 0.0 && args.a.is_finite()) {
            return Err(CliError::Config(format!("--a must be positive and finite, got {}", args.a)));
        }
        return Ok(expression_amplitudes(args.f_plus.as_deref(), args.f_minus.as_deref(), args.a)?);
    }
    Ok(match args.family.unwrap_or(Family::SatZ) {
        Family::SatZ => saturating_amplitude(Axis::Z, args.a)?,
        Family::SatX => saturating_amplitude(Axis::X, args.a)?,
        Family::SatY => saturating_amplitude(Axis::Y, args.a)?,
        Family::Gaussian => gaussian_profile(args.width)?,
        Family::Excited => excited_profile(args.a)?,
    })
}

fn momentum_grid(
    args: &GridArgs,
    default: (usize, usize, usize),
    default_scale: f64,
) -> Result<MomentumGrid, CliError> {
    let pick = |v: Option<u32>, d: usize| v.map_or(d, |x| x as usize);
    Ok(build_grid(
        pick(args.n_k, default.0),
        pick(args.n_theta, default.1),
        pick(args.n_phi, default.2),
        args.k_scale.unwrap_or(default_scale),
    )?)
}

fn describe(report: &mut Report, amps: &HelicityAmplitudes, args: &AmplitudeArgs) {
    let d = amps.descriptor();
    report.push("family", d.family.as_str());
    for (name, value) in &d.params {
        report.push(name, *value);
    }
    if let Some(s) = &args.f_plus {
        report.push("f_plus", s.as_str());
    }
    if let Some(s) = &args.f_minus {
        report.push("f_minus", s.as_str());
    }
}

fn describe_grid(report: &mut Report, grid: &MomentumGrid, k_scale: f64) {
    let (n_k, n_t, n_p) = grid.resolution();
    report.push("n_k", n_k);
    report.push("n_theta", n_t);
    report.push("n_phi", n_p);
    report.push("k_scale", k_scale);
}

fn gamma_report(args: &GammaArgs) -> Result<Report, CliError> {
    let amps = amplitudes(&args.amplitude)?;
    let scale = args.grid.k_scale.unwrap_or(amps.default_k_scale());
    let grid = momentum_grid(&args.grid, REFERENCE_RESOLUTION, scale)?;
    let frame = PolarizationFrame::new(args.frame.into());
    let rep = gamma(&amps, &grid, &frame)?;
    let mut out = Report::new("gamma");
    describe(&mut out, &amps, &args.amplitude);
    out.push("frame", frame.axis().to_string());
    describe_grid(&mut out, &grid, scale);
    out.push("norm_sq", rep.norm_sq);
    out.push("mean_k", Cell::Vec3([rep.mean_k.x, rep.mean_k.y, rep.mean_k.z]));
    out.push("delta_r", rep.delta_r);
    out.push("delta_p", rep.delta_p);
    out.push("gamma", rep.gamma);
    Ok(out)
}

/// `(n_r, j)` with `1 ≤ n_r + j ≤ max_n`, `j ≥ 1`, by increasing `n_r + j`
/// and decreasing `n_r`.
pub fn level_order(max_n: usize) -> Vec<(usize, usize)> {
    (1..=max_n).flat_map(|s| (0..s).rev().map(move |n_r| (n_r, s - n_r))).collect()
}

fn spectrum(args: &SpectrumArgs) -> Result<Report, CliError> {
    let levels = level_order(args.max_n as usize);
    let mut table = Table::default();
    let mut out = Report::new("spectrum");
    if args.gamma_table {
        out.push("table", "gamma");
        out.push("max_n", args.max_n as usize);
        table.columns = vec!["n_r", "j", "gamma"];
        for (n_r, j) in levels {
            table.rows.push(vec![n_r.into(), j.into(), solve_gamma(n_r, j)?.into()]);
        }
    } else if args.radial {
        out.push("table", "radial");
        out.push("max_n", args.max_n as usize);
        out.push("charge", args.charge);
        table.columns = vec!["n_r", "j", "energy"];
        for (n_r, j) in levels {
            table.rows.push(vec![n_r.into(), j.into(), radial_coulomb_energy(args.charge, j, n_r)?.into()]);
        }
    } else {
        let helicity = Helicity::from_sign(args.helicity)?;
        out.push("table", "angular");
        out.push("helicity", args.helicity);
        table.columns = vec!["m", "j", "eigenvalue"];
        let ms: Vec<i32> = args.m.map_or_else(|| vec![-1, 0, 1], |m| vec![m]);
        for m in ms {
            for s in solve_angular(helicity, m, args.count as usize)? {
                table.rows.push(vec![m.into(), s.quantum_numbers.j.into(), s.eigenvalue.into()]);
            }
        }
    }
    out.table = Some(table);
    Ok(out)
}

fn baseline(args: &BaselineArgs) -> Result<Report, CliError> {
    let n = args.n as usize;
    let (sigma_r, sigma_p) = ho_ground_spreads(args.a)?;
    Ok(Report::new("baseline-ho")
        .with("n", n)
        .with("baseline", ho_baseline(n)?)
        .with("a", args.a)
        .with("ground_sigma_r", sigma_r)
        .with("ground_sigma_p", sigma_p))
}

fn saturating_axis(args: &AmplitudeArgs) -> Result<Axis, CliError> {
    if args.f_plus.is_some() || args.f_minus.is_some() {
        return Err(CliError::Config("the closed-form field exists only for the sat-x, sat-y, sat-z families".into()));
    }
    match args.family.unwrap_or(Family::SatZ) {
        Family::SatZ => Ok(Axis::Z),
        Family::SatX => Ok(Axis::X),
        Family::SatY => Ok(Axis::Y),
        _ => Err(CliError::Config("the closed-form field exists only for the sat-x, sat-y, sat-z families".into())),
    }
}

fn synthesize(args: &SynthesizeArgs) -> Result<Report, CliError> {
    let amps = amplitudes(&args.amplitude)?;
    let side = args.side.unwrap_or(4.0 * args.amplitude.a);
    let points = SpatialGrid::cube(side, args.points as usize)?;
    let mut out = Report::new("synthesize");
    describe(&mut out, &amps, &args.amplitude);
    out.push("side", side);
    out.push("points", args.points as usize);
    out.push("t", args.t);
    let field: RSField = match args.method {
        Method::Synthesis => {
            let scale = args.grid.k_scale.unwrap_or(SYNTHESIS_K_SCALE * amps.default_k_scale());
            let grid = momentum_grid(&args.grid, SYNTHESIS_RESOLUTION, scale)?;
            let frame = PolarizationFrame::new(args.frame.into());
            out.push("method", "synthesis");
            out.push("frame", frame.axis().to_string());
            describe_grid(&mut out, &grid, scale);
            let field = synthesize_field(&amps, &grid, &frame, &points, args.t)?;
            out.push("phase_warnings", field.phase_warnings);
            field
        }
        Method::Whittaker => {
            let axis = saturating_axis(&args.amplitude)?;
            out.push("method", "whittaker");
            whittaker_rs_field(axis, args.amplitude.a, &points, args.t)?
        }
    };
    let energy = energy_density(&field);
    let mut table = Table {
        columns: vec!["x", "y", "z", "t", "ReFx", "ImFx", "ReFy", "ImFy", "ReFz", "ImFz", "energy_density"],
        rows: Vec::with_capacity(field.points.len()),
    };
    for ((r, f), e) in field.points.iter().zip(&field.values).zip(energy) {
        let mut row: Vec<Cell> = vec![r.x.into(), r.y.into(), r.z.into(), field.t.into()];
        for c in f.iter() {
            row.push(c.re.into());
            row.push(c.im.into());
        }
        row.push(e.into());
        table.rows.push(row);
    }
    out.table = Some(table);
    Ok(out)
}

fn residual(args: &ResidualArgs) -> Result<Report, CliError> {
    let amps = amplitudes(&args.amplitude)?;
    let helicity = Helicity::from_sign(args.helicity)?;
    let scale = args.grid.k_scale.unwrap_or(amps.default_k_scale());
    let grid = momentum_grid(&args.grid, REFERENCE_RESOLUTION, scale)?;
    let r = pde_residual(&amps, args.gamma, helicity, &grid)?;
    let mut out = Report::new("residual");
    describe(&mut out, &amps, &args.amplitude);
    describe_grid(&mut out, &grid, scale);
    out.push("gamma", args.gamma);
    out.push("helicity", args.helicity);
    out.push("residual", r);
    Ok(out)
}

struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Check { name, value, tolerance, pass: value <= tolerance }
    }
}

fn reference_gamma(amps: &HelicityAmplitudes) -> Result<photon_ur::UncertaintyReport, CliError> {
    let grid = MomentumGrid::reference(amps.default_k_scale())?;
    Ok(gamma(amps, &grid, &PolarizationFrame::new(Axis::Z))?)
}

fn verify(args: &VerifyArgs) -> Result<(Report, Option<CliError>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let samples = args.samples as usize;
    let z_frame = PolarizationFrame::new(Axis::Z);
    let mut checks = Vec::new();

    let mut sat: f64 = 0.0;
    for axis in Axis::ALL {
        for a in [0.5, 1.0, 2.0] {
            sat = sat.max((reference_gamma(&saturating_amplitude(axis, a)?)?.gamma - 4.0).abs());
        }
    }
    checks.push(Check::below("saturation", sat, 1e-6));

    let mut split: f64 = 0.0;
    for a in [0.5, 1.0, 2.0] {
        let rep = reference_gamma(&saturating_amplitude(Axis::Z, a)?)?;
        split = split.max((rep.delta_r - 2.0 * a).abs()).max((rep.delta_p - 2.0 / a).abs());
    }
    checks.push(Check::below("even_split", split, 1e-6));

    let mut table: f64 = 0.0;
    for (n_r, j) in level_order(3) {
        let n = (n_r + j + 1) as f64;
        table = table.max((solve_gamma(n_r, j)? - n * n).abs());
    }
    checks.push(Check::below("gamma_table", table, 1e-6));

    let (mut angular, mut lowest): (f64, f64) = (0.0, f64::INFINITY);
    for h in Helicity::BOTH {
        for m in -1..=1 {
            for s in solve_angular(h, m, 3)? {
                let j = s.quantum_numbers.j as f64;
                angular = angular.max((s.eigenvalue - j * (j + 1.0)).abs());
                lowest = lowest.min(s.eigenvalue);
            }
        }
    }
    checks.push(Check::below("angular_spectrum", angular, 1e-6));
    checks.push(Check { name: "angular_floor", value: lowest, tolerance: 2.0 - 1e-6, pass: lowest >= 2.0 - 1e-6 });

    let ho = (ho_baseline(0)? - 1.5).abs().max((ho_baseline(1)? - 2.5).abs());
    checks.push(Check::below("oscillator_baseline", ho, 1e-6));

    let mut forms: f64 = 0.0;
    let mut random = Vec::with_capacity(samples);
    for _ in 0..samples {
        random.push(random_smooth_amplitudes(&mut rng));
    }
    let builtins = [
        saturating_amplitude(Axis::Z, 1.0)?,
        saturating_amplitude(Axis::X, 1.0)?,
        saturating_amplitude(Axis::Y, 1.0)?,
        gaussian_profile(1.0)?,
        excited_profile(1.0)?,
    ];
    for amps in builtins.iter().chain(&random) {
        let grid = MomentumGrid::reference(amps.default_k_scale())?;
        let cart = delta_r_cartesian(amps, &grid, &z_frame)?.value;
        let sph = delta_r_spherical(amps, &grid)?.value;
        forms = forms.max((cart - sph).abs());
    }
    checks.push(Check::below("form_equivalence", forms, 1e-8));

    let mut identities: f64 = 0.0;
    let mut drawn = 0;
    while drawn < 100 {
        let k = Vector3::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let axis = Axis::ALL[drawn % 3];
        // Off-string means at least 0.3|k| from the string and |k| > 0.3;
        // closer in, central-difference truncation error exceeds 10⁻⁶.
        if axis.string_distance_sq(&k) < 0.09 * k.norm_squared() || k.norm() < 0.3 {
            continue;
        }
        drawn += 1;
        identities = identities
            .max(polarization_identities(axis, &k)?.max())
            .max(verify_connection_curl(axis, &k)?.norm());
    }
    checks.push(Check::below("connection_identities", identities, 1e-6));

    let sat_z = saturating_amplitude(Axis::Z, 1.0)?;
    let grid = MomentumGrid::reference(1.0)?;
    let (gauged, gauged_frame) = gauge_transform(&sat_z, &z_frame, Arc::new(AxialPhase(0.3)));
    let gauge = (delta_r_cartesian(&gauged, &grid, &gauged_frame)?.value - delta_r_cartesian(&sat_z, &grid, &z_frame)?.value).abs();
    checks.push(Check::below("gauge_invariance", gauge, 1e-8));

    let points = SpatialGrid::cube(4.0, 3)?;
    let synth_grid = synthesis_grid(1.0)?;
    let mut field: f64 = 0.0;
    for axis in Axis::ALL {
        let f = synthesize_field(&saturating_amplitude(axis, 1.0)?, &synth_grid, &z_frame, &points, 0.0)?;
        for (r, v) in f.points.iter().zip(&f.values) {
            let w = whittaker_field(axis, 1.0, r, 0.0)?;
            field = field.max((v - w).norm() / w.norm());
        }
    }
    checks.push(Check::below("field_cross_check", field, 1e-6));

    let mut bound = f64::INFINITY;
    for amps in &random {
        bound = bound.min(reference_gamma(amps)?.gamma);
    }
    checks.push(Check { name: "uncertainty_bound", value: bound, tolerance: 4.0 - 1e-4, pass: bound >= 4.0 - 1e-4 });

    let r4 = pde_residual(&sat_z, 4.0, Helicity::Plus, &grid)?;
    let r5 = pde_residual(&sat_z, 5.0, Helicity::Plus, &grid)?;
    checks.push(Check::below("residual_at_minimum", r4, 1e-6));
    checks.push(Check { name: "residual_off_minimum", value: r5, tolerance: 0.1, pass: r5 > 0.1 });

    let failed = checks.iter().filter(|c| !c.pass).count();
    let total = checks.len();
    let mut out = Report::new("verify")
        .with("seed", args.seed)
        .with("samples", samples)
        .with("passed", failed == 0)
        .with("failed", failed);
    out.table = Some(Table {
        columns: vec!["name", "pass", "value", "tolerance"],
        rows: checks
            .into_iter()
            .map(|c| vec![c.name.into(), c.pass.into(), c.value.into(), c.tolerance.into()])
            .collect(),
    });
    let status = (failed > 0).then_some(CliError::ChecksFailed { failed, total });
    Ok((out, status))
}
