//! Command-line grammar and config-file merging.
//!
//! A config file holds `key = value` lines whose keys are long flag names
//! (`n_k` and `n-k` are the same key) plus an optional `command`. Its
//! entries are spliced into the argument list ahead of the user's own
//! flags; every flag overrides earlier occurrences of itself, so the
//! command line wins.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "photon-ur", version, about = "Photon position-momentum uncertainty toolkit")]
pub struct Cli {
    /// Config file of `key = value` lines; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the report here (atomically) instead of to stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Report format; defaults to CSV for tables and JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spreads Δr, Δp and their product γ for one amplitude.
    Gamma(GammaArgs),
    /// Eigenvalue tables of the angular, radial and γ problems.
    Spectrum(SpectrumArgs),
    /// Oscillator baseline γ_HO for the n-th state.
    BaselineHo(BaselineArgs),
    /// Riemann–Silberstein field on a cubic box of points.
    Synthesize(SynthesizeArgs),
    /// Runs the invariant checks and reports pass/fail per check.
    Verify(VerifyArgs),
    /// L² residual of the variational equation.
    Residual(ResidualArgs),
}

pub const SUBCOMMANDS: [&str; 6] = ["gamma", "spectrum", "baseline-ho", "synthesize", "verify", "residual"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "sat-z")]
    SatZ,
    #[value(name = "sat-x")]
    SatX,
    #[value(name = "sat-y")]
    SatY,
    Gaussian,
    Excited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FrameAxis {
    X,
    Y,
    Z,
}

impl From<FrameAxis> for photon_ur::Axis {
    fn from(a: FrameAxis) -> Self {
        match a {
            FrameAxis::X => photon_ur::Axis::X,
            FrameAxis::Y => photon_ur::Axis::Y,
            FrameAxis::Z => photon_ur::Axis::Z,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AmplitudeArgs {
    /// Built-in family; the default when no expression is given is sat-z.
    #[arg(long, value_enum, conflicts_with_all = ["f_plus", "f_minus"])]
    pub family: Option<Family>,

    /// Length scale a of the family, also bound to `a` in expressions.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,

    /// Width of the Gaussian family.
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,

    /// Positive-helicity amplitude as an expression in k, theta, phi, a.
    #[arg(long, value_name = "EXPR")]
    pub f_plus: Option<String>,

    /// Negative-helicity amplitude as an expression in k, theta, phi, a.
    #[arg(long, value_name = "EXPR")]
    pub f_minus: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Radial nodes of the momentum grid.
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..=2048))]
    pub n_k: Option<u32>,

    /// Polar nodes of the momentum grid.
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..=1024))]
    pub n_theta: Option<u32>,

    /// Azimuthal nodes of the momentum grid.
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..=1024))]
    pub n_phi: Option<u32>,

    /// Radial map scale s in k = s·x/(1−x); defaults to the amplitude's.
    #[arg(long)]
    pub k_scale: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct GammaArgs {
    #[command(flatten)]
    pub amplitude: AmplitudeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Axis of the polarization frame's string.
    #[arg(long, value_enum, default_value = "z")]
    pub frame: FrameAxis,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
#[command(group(ArgGroup::new("table").required(true).args(["angular", "radial", "gamma_table"])))]
pub struct SpectrumArgs {
    /// Monopole-harmonic eigenvalues j(j+1).
    #[arg(long)]
    pub angular: bool,
    /// Coulomb-like radial energies −Z²/(n_r+j+1)².
    #[arg(long)]
    pub radial: bool,
    /// Stationary values γ = (n_r+j+1)².
    #[arg(long)]
    pub gamma_table: bool,
    /// Largest n_r + j listed by the radial and γ tables.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub max_n: u32,
    /// Helicity λ of the angular problem.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub helicity: i32,
    /// Azimuthal number m; the angular table covers −1, 0, 1 when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i32>,
    /// Eigenvalues per (λ, m) in the angular table.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub count: u32,
    /// Charge Z of the radial problem.
    #[arg(long, default_value_t = 4.0)]
    pub charge: f64,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct BaselineArgs {
    /// Oscillator level.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u32).range(0..=40))]
    pub n: u32,
    /// Length scale of the ground state whose spreads are reported.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Momentum-space quadrature of the amplitude.
    Synthesis,
    /// Closed-form field of a saturating family.
    Whittaker,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub amplitude: AmplitudeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Axis of the polarization frame's string.
    #[arg(long, value_enum, default_value = "z")]
    pub frame: FrameAxis,
    /// Edge length of the box centred at the origin; defaults to 4a.
    #[arg(long)]
    pub side: Option<f64>,
    /// Points per box edge.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=201))]
    pub points: u32,
    /// Time t (units of length, c = 1).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "synthesis")]
    pub method: Method,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    /// Seed of the randomized amplitudes and momenta.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of randomized amplitudes per property.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=200))]
    pub samples: u32,
}

#[derive(Debug, Clone, Args)]
#[command(args_override_self = true)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub amplitude: AmplitudeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Trial value of γ.
    #[arg(long, default_value_t = 4.0)]
    pub gamma: f64,
    /// Helicity component whose residual is reported.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub helicity: i32,
}

/// Parsed `key = value` entries in file order.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(format!("line {}: invalid key `{key}`", n + 1));
        }
        if key == "config" {
            return Err(format!("line {}: config files cannot include other config files", n + 1));
        }
        entries.push((key, value.to_owned()));
    }
    Ok(entries)
}

/// Splices the entries of `--config` into the argument list.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut iter = argv.into_iter();
    let prog = iter.next().unwrap_or_else(|| "photon-ur".into());
    let mut rest = Vec::new();
    let mut config = None;
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            let path = iter.next().ok_or_else(|| CliError::Config("--config needs a path".into()))?;
            config = Some(PathBuf::from(path));
        } else if let Some(path) = text.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        let mut out = vec![prog];
        out.extend(rest);
        return Ok(out);
    };
    let entries = read_config(&path)?;

    let position = subcommand_position(&rest);
    let subcommand = match position {
        Some(i) => Some(rest.remove(i)),
        None => entries.iter().rev().find(|(k, _)| k == "command").map(|(_, v)| OsString::from(v)),
    };
    let mut out = vec![prog];
    out.extend(subcommand);
    for (key, value) in entries.into_iter().filter(|(k, _)| k != "command") {
        match value.as_str() {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    out.extend(rest);
    Ok(out)
}

/// Index of the subcommand name, skipping values of global options.
fn subcommand_position(args: &[OsString]) -> Option<usize> {
    let mut i = 0;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--output" || a == "--format" {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&a.as_ref()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: Vec<OsString>) -> Vec<String> {
        v.into_iter().map(|s| s.into_string().unwrap()).collect()
    }

    #[test]
    fn config_lines_parse() {
        let e = parse_config("# comment\n\ncommand = gamma\nn_k = 32\nfamily = \"sat-x\"\n").unwrap();
        assert_eq!(
            e,
            vec![
                ("command".into(), "gamma".into()),
                ("n-k".into(), "32".into()),
                ("family".into(), "sat-x".into())
            ]
        );
        assert!(parse_config("no equals sign").unwrap_err().contains("line 1"));
        assert!(parse_config("config = other.conf").is_err());
    }

    #[test]
    fn config_precedes_user_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "command = gamma\na = 2\nangular = true\nradial = false\n").unwrap();
        let argv = vec!["photon-ur".into(), "--config".into(), path.clone().into(), "--a".into(), "3".into()];
        assert_eq!(strings(expand_config(argv).unwrap()), ["photon-ur", "gamma", "--a", "2", "--angular", "--a", "3"]);
        let argv = vec!["photon-ur".into(), "--output".into(), "gamma".into(), "residual".into(), format!("--config={}", path.display()).into()];
        assert_eq!(
            strings(expand_config(argv).unwrap()),
            ["photon-ur", "residual", "--a", "2", "--angular", "--output", "gamma"]
        );
    }

    #[test]
    fn later_flags_override_earlier_ones() {
        let cli = Cli::try_parse_from(["photon-ur", "gamma", "--a", "2", "--n-k", "8", "--a", "3"]).unwrap();
        let Command::Gamma(g) = cli.command else { panic!("wrong subcommand") };
        assert_eq!(g.amplitude.a, 3.0);
        assert_eq!(g.grid.n_k, Some(8));
    }

    #[test]
    fn grid_counts_are_range_checked() {
        assert!(Cli::try_parse_from(["photon-ur", "gamma", "--n-k", "2"]).is_err());
        assert!(Cli::try_parse_from(["photon-ur", "spectrum"]).is_err());
        assert!(Cli::try_parse_from(["photon-ur", "gamma", "--family", "sat-z", "--f-plus", "k"]).is_err());
    }
}
