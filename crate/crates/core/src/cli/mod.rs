//! Command-line driver. `main.rs` only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 tolerance violation or numerical failure,
//! 2 configuration error.

pub mod config;
pub mod verify;

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use num_complex::Complex64;

use crate::quantize::{coupled_pencil_with_scheme, Grid1D};
use crate::spin::{commutator_table, CommutatorReport, DEFAULT_MAX_PARTICLES};
use crate::units::Units;
use crate::zeeman::{
    decompose_masses, format_larmor_mass, lamb_g_factor, larmor_frequency, splitting_table, ZeemanSystem,
};
use config::{
    CommandName, PotentialSpec, RunConfig, ZeemanConfig, ZeemanPreset, DEFAULT_SEED, DEFAULT_TRIALS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Grids with fewer interior points are flagged coarse.
pub const COARSE_GRID_POINTS: usize = 50;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Compute(String),
}

impl CliError {
    pub fn compute(e: impl Display) -> Self {
        Self::Compute(e.to_string())
    }

    fn config(e: impl Display) -> Self {
        Self::Config(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => EXIT_CONFIG,
            Self::Compute(_) => EXIT_TOLERANCE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "kfactor",
    version,
    about = "Linear factorizations of the extended Hamiltonian"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity verification suites.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Write the JSON report here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Spectrum of a 1-D potential from the eliminated pencil.
    Solve1d {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Weak-field Zeeman level table.
    Zeeman {
        #[arg(
            long,
            value_enum,
            required_unless_present = "config",
            conflicts_with = "config"
        )]
        preset: Option<ZeemanPreset>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Field strength; overrides the preset or config value.
        #[arg(long, allow_negative_numbers = true)]
        field: Option<f64>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Commutators of the embedded Pauli matrices.
    SpinReport {
        #[arg(long)]
        particles: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// Header block shared by every report.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub units: Units,
}

impl Metadata {
    pub fn new(command: &'static str, seed: Option<u64>, trials: Option<usize>, units: &Units) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            trials,
            units: *units,
        }
    }

    fn csv_header(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("tool".into(), self.tool.into()),
            ("version".into(), self.version.into()),
            ("command".into(), self.command.into()),
        ];
        if let Some(s) = self.seed {
            out.push(("seed".into(), s.to_string()));
        }
        out.push(("units.hbar".into(), self.units.hbar.to_string()));
        out.push(("units.charge".into(), self.units.charge.to_string()));
        out.push(("units.electron_mass".into(), self.units.electron_mass.to_string()));
        out.push(("units.light_speed".into(), self.units.light_speed.to_string()));
        out
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("kfactor: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Verify {
            config,
            seed,
            trials,
            output,
        } => {
            let cfg = load_optional(config.as_ref(), CommandName::Verify)?;
            cfg.tolerances.validate()?;
            let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            let trials = trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
            if trials == 0 {
                return Err(CliError::Config("trials must be at least 1".into()));
            }
            let report = verify::run_verify(&cfg, seed, trials)?;
            write_output(output.as_ref(), &to_json(&report)?)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!(
                    "kfactor: check {} failed: max error {:e} > tolerance {:e}",
                    c.name, c.max_error, c.tolerance
                );
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_TOLERANCE })
        }
        Command::Solve1d { config, output } => {
            let cfg = load_optional(Some(&config), CommandName::Solve1d)?;
            let table = solve1d_csv(&cfg)?;
            write_output(output.as_ref(), &table)?;
            Ok(EXIT_OK)
        }
        Command::Zeeman {
            preset,
            config,
            field,
            n_max,
            output,
        } => {
            let (zcfg, units) = match (&config, preset) {
                (Some(path), _) => {
                    let cfg = load_optional(Some(path), CommandName::Zeeman)?;
                    let z = cfg
                        .zeeman
                        .clone()
                        .ok_or_else(|| CliError::Config("missing `zeeman` block".into()))?;
                    (z, cfg.units)
                }
                (None, p) => (
                    ZeemanConfig {
                        preset: p,
                        ..Default::default()
                    },
                    Units::atomic(),
                ),
            };
            let table = zeeman_csv(&zcfg, &units, field, n_max)?;
            write_output(output.as_ref(), &table)?;
            Ok(EXIT_OK)
        }
        Command::SpinReport { particles, output } => {
            let report = spin_report(particles)?;
            write_output(output.as_ref(), &to_json(&report)?)?;
            Ok(EXIT_OK)
        }
    }
}

fn load_optional(path: Option<&PathBuf>, cmd: CommandName) -> Result<RunConfig, CliError> {
    let cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.check_command(cmd)?;
    cfg.validate_common()?;
    Ok(cfg)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CliError::compute)?;
    s.push('\n');
    Ok(s)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// `# key=value` lines followed by the CSV table.
fn csv_with_header<S: Serialize>(header: &[(String, String)], rows: &[S]) -> Result<String, CliError> {
    let mut out = String::new();
    for (k, v) in header {
        out.push_str(&format!("# {k}={v}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(CliError::compute)?;
    }
    let bytes = w.into_inner().map_err(CliError::compute)?;
    out.push_str(&String::from_utf8(bytes).map_err(CliError::compute)?);
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    k: usize,
    energy: f64,
    /// `|det G(E_k)| / Π_{j≠k} |E_k - E_j|`; empty when not available.
    normalized_pencil_det: Option<f64>,
    stacked_residual: f64,
}

pub fn solve1d_csv(cfg: &RunConfig) -> Result<String, CliError> {
    let s = cfg
        .solve1d
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `solve1d` block".into()))?;
    let grid = Grid1D::new(s.grid.x_min, s.grid.x_max, s.grid.n).map_err(CliError::config)?;
    if s.levels == 0 {
        return Err(CliError::Config("solve1d.levels must be at least 1".into()));
    }
    let (name, v): (String, Vec<f64>) = match &s.potential {
        PotentialSpec::Box => ("box".into(), vec![0.0; grid.n()]),
        PotentialSpec::Harmonic { omega } => (
            format!("harmonic(omega={omega})"),
            grid.points()
                .iter()
                .map(|x| 0.5 * s.mass * omega * omega * x * x)
                .collect(),
        ),
        PotentialSpec::Table { samples } => ("table".into(), samples.clone()),
    };
    let pencil =
        coupled_pencil_with_scheme(&grid, &v, s.mass, cfg.units.hbar, s.scheme).map_err(CliError::config)?;
    let levels = s.levels.min(grid.n());
    let mut rows = Vec::with_capacity(levels);
    match pencil.tridiagonal() {
        Some(t) => {
            let spectrum = t.eigenvalues().map_err(CliError::compute)?;
            let dets = pencil
                .normalized_pencil_dets(&spectrum, levels)
                .map_err(CliError::compute)?;
            for (k, (&e, det)) in spectrum.iter().zip(dets).take(levels).enumerate() {
                let psi1: Vec<Complex64> = t.eigenvector(e).into_iter().map(Complex64::from).collect();
                let res = pencil.stacked_residual(e, &psi1).map_err(CliError::compute)?;
                rows.push(SpectrumRow {
                    k: k + 1,
                    energy: e,
                    normalized_pencil_det: Some(det),
                    stacked_residual: res,
                });
            }
        }
        None => {
            for (k, (e, psi1)) in pencil
                .lowest_states(levels)
                .map_err(CliError::compute)?
                .into_iter()
                .enumerate()
            {
                let res = pencil.stacked_residual(e, &psi1).map_err(CliError::compute)?;
                rows.push(SpectrumRow {
                    k: k + 1,
                    energy: e,
                    normalized_pencil_det: None,
                    stacked_residual: res,
                });
            }
        }
    }
    let mut header = Metadata::new("solve1d", None, None, &cfg.units).csv_header();
    header.extend([
        ("potential".into(), name),
        ("scheme".into(), format!("{:?}", s.scheme).to_lowercase()),
        ("mass".into(), s.mass.to_string()),
        ("x_min".into(), grid.x_min().to_string()),
        ("x_max".into(), grid.x_max().to_string()),
        ("n".into(), grid.n().to_string()),
        ("h".into(), grid.h().to_string()),
        ("coarse".into(), (grid.n() < COARSE_GRID_POINTS).to_string()),
    ]);
    csv_with_header(&header, &rows)
}

#[derive(Debug, Serialize)]
struct ZeemanRow {
    n: u32,
    l: u32,
    m: i32,
    branch: u8,
    energy: f64,
    shift: f64,
    #[serde(rename = "omega_L")]
    omega_l: f64,
    #[serde(rename = "m_L")]
    m_l: String,
    #[serde(rename = "g_L")]
    g_l: f64,
}

pub fn zeeman_csv(
    z: &ZeemanConfig,
    units: &Units,
    field: Option<f64>,
    n_max: Option<u32>,
) -> Result<String, CliError> {
    let (pm1, pm2, pz) = z
        .preset
        .map(ZeemanPreset::masses)
        .unwrap_or((f64::NAN, f64::NAN, 1.0));
    let m1 = z.m1.unwrap_or(pm1 * units.electron_mass);
    let m2 = z.m2.unwrap_or(pm2 * units.electron_mass);
    if m1.is_nan() || m2.is_nan() {
        return Err(CliError::Config("zeeman needs a preset or both m1 and m2".into()));
    }
    let b = field.or(z.b).unwrap_or(1.0);
    let n_max = n_max.or(z.n_max).unwrap_or(2);
    if n_max == 0 {
        return Err(CliError::Config("n_max must be at least 1".into()));
    }
    let system = ZeemanSystem::new(m1, m2, z.z.unwrap_or(pz), b, *units).map_err(CliError::config)?;
    let masses = decompose_masses(&system).map_err(CliError::config)?;
    let omega = larmor_frequency(&system);
    let g = lamb_g_factor(&system);
    let m_l = format_larmor_mass(masses.larmor_mass);
    let rows: Vec<ZeemanRow> = splitting_table(&system, n_max)
        .map_err(CliError::compute)?
        .into_iter()
        .map(|r| ZeemanRow {
            n: r.label.n,
            l: r.label.l,
            m: r.label.m,
            branch: r.label.branch.number(),
            energy: r.energy,
            shift: r.shift + 0.0,
            omega_l: omega,
            m_l: m_l.clone(),
            g_l: g,
        })
        .collect();
    let mut header = Metadata::new("zeeman", None, None, units).csv_header();
    header.extend([
        (
            "preset".into(),
            z.preset.map_or("custom", ZeemanPreset::name).into(),
        ),
        ("m1".into(), m1.to_string()),
        ("m2".into(), m2.to_string()),
        ("z".into(), system.z.to_string()),
        ("b".into(), b.to_string()),
        ("n_max".into(), n_max.to_string()),
        ("reduced_mass".into(), masses.reduced.to_string()),
    ]);
    csv_with_header(&header, &rows)
}

#[derive(Debug, Serialize)]
pub struct SpinReport {
    pub metadata: Metadata,
    #[serde(flatten)]
    pub table: CommutatorReport,
}

pub fn spin_report(particles: usize) -> Result<SpinReport, CliError> {
    if particles == 0 || particles > DEFAULT_MAX_PARTICLES {
        return Err(CliError::Config(format!(
            "--particles must be in 1..={DEFAULT_MAX_PARTICLES}, got {particles}"
        )));
    }
    Ok(SpinReport {
        metadata: Metadata::new("spin-report", None, None, &Units::atomic()),
        table: commutator_table(particles).map_err(CliError::compute)?,
    })
}
