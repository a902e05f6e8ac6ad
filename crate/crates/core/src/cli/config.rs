use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::quantize::DifferenceScheme;
use crate::units::{Units, PROTON_ELECTRON_MASS_RATIO};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 100;

/// Deuteron-to-electron mass ratio.
pub const DEUTERON_ELECTRON_MASS_RATIO: f64 = 3670.48296788;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Verify,
    Solve1d,
    Zeeman,
    SpinReport,
}

impl CommandName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Verify => "verify",
            Self::Solve1d => "solve1d",
            Self::Zeeman => "zeeman",
            Self::SpinReport => "spin-report",
        }
    }
}

/// One JSON document per run. Every block is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present, must name the subcommand being run.
    pub command: Option<CommandName>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    #[serde(default)]
    pub units: Units,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub verify: VerifyConfig,
    pub solve1d: Option<Solve1dConfig>,
    pub zeeman: Option<ZeemanConfig>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("").trim();
            CliError::Config(format!("{origin}:{}:{}: {e}\n  | {line}", e.line(), e.column()))
        })
    }

    pub fn check_command(&self, expected: CommandName) -> Result<(), CliError> {
        match self.command {
            Some(c) if c != expected => Err(CliError::Config(format!(
                "config is for `{}` but `{}` was run",
                c.as_str(),
                expected.as_str()
            ))),
            _ => Ok(()),
        }
    }

    pub fn validate_common(&self) -> Result<(), CliError> {
        let bad = self.units.invalid_fields();
        if !bad.is_empty() {
            return Err(CliError::Config(format!(
                "unit constants must be positive and finite: {}",
                bad.join(", ")
            )));
        }
        if self.trials == Some(0) {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        Ok(())
    }
}

macro_rules! tolerances {
    ($($name:ident = $default:expr),* $(,)?) => {
        /// Per-check tolerances; unset entries take their defaults.
        #[derive(Debug, Clone, Default, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct Tolerances {
            $(#[serde(skip_serializing_if = "Option::is_none")] pub $name: Option<f64>,)*
        }

        impl Tolerances {
            /// `(name, effective value)` for every check.
            pub fn entries(&self) -> Vec<(&'static str, f64)> {
                vec![$((stringify!($name), self.$name.unwrap_or($default)),)*]
            }
        }
    };
}

tolerances! {
    det_identity = 1e-9,
    det_lu_schur = 1e-9,
    det_1d = 1e-13,
    null_spinor_1d = 1e-12,
    null_spinor = 1e-10,
    null_space = 1e-9,
    schur_factor = 1e-11,
    schur_det = 1e-10,
    spin_exact = 1e-15,
    sigma_square = 1e-12,
    spin_product = 1e-12,
    pauli_kinetic = 1e-12,
    pauli_hamiltonian = 1e-12,
    com_transform = 1e-12,
    vector_potential_split = 1e-12,
}

impl Tolerances {
    /// Fails with every check whose tolerance is not a positive finite number.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad: Vec<String> = self
            .entries()
            .into_iter()
            .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(n, v)| format!("{n}={v}"))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "tolerances must be positive and finite; offending checks: {}",
                bad.join(", ")
            )))
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.entries()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| v)
            .unwrap_or_else(|| panic!("unknown tolerance {name}"))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Particle counts for the determinant and null-spinor suites.
    pub particles: Vec<usize>,
    /// Degree of the random polynomial spinors in the Pauli suite.
    pub pauli_degree: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            particles: vec![1, 2, 3],
            pauli_degree: 4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "preset", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialSpec {
    Box,
    /// `V = ½ m ω² x²`
    Harmonic {
        #[serde(default = "one")]
        omega: f64,
    },
    /// Values at the interior grid points.
    Table {
        samples: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solve1dConfig {
    pub grid: GridSpec,
    #[serde(default = "one")]
    pub mass: f64,
    pub potential: PotentialSpec,
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default)]
    pub scheme: DifferenceScheme,
}

fn default_levels() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ZeemanPreset {
    Hydrogen,
    Positronium,
    DeuteriumLike,
}

impl ZeemanPreset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Hydrogen => "hydrogen",
            Self::Positronium => "positronium",
            Self::DeuteriumLike => "deuterium-like",
        }
    }

    /// `(m1, m2, Z)` in electron masses.
    pub fn masses(self) -> (f64, f64, f64) {
        match self {
            Self::Hydrogen => (1.0, PROTON_ELECTRON_MASS_RATIO, 1.0),
            Self::Positronium => (1.0, 1.0, 1.0),
            Self::DeuteriumLike => (1.0, DEUTERON_ELECTRON_MASS_RATIO, 1.0),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeemanConfig {
    pub preset: Option<ZeemanPreset>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub z: Option<f64>,
    pub b: Option<f64>,
    pub n_max: Option<u32>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected_with_line() {
        let err = RunConfig::parse(
            "{\n  \"seed\": 1,\n  \"tolerances\": {\"det_identiy\": 1e-9}\n}",
            "cfg.json",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg.json:3:"), "{msg}");
        assert!(msg.contains("det_identiy"));
    }

    #[test]
    fn zero_tolerances_all_listed() {
        let cfg = RunConfig::parse(r#"{"tolerances": {"det_identity": 0, "spin_exact": -1}}"#, "x").unwrap();
        let msg = cfg.tolerances.validate().unwrap_err().to_string();
        assert!(
            msg.contains("det_identity=0") && msg.contains("spin_exact=-1"),
            "{msg}"
        );
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::parse("{}", "x").unwrap();
        assert_eq!(cfg.units, Units::atomic());
        assert_eq!(cfg.tolerances.get("det_1d"), 1e-13);
        assert_eq!(cfg.verify.particles, vec![1, 2, 3]);
        assert!(cfg.tolerances.validate().is_ok());
    }

    #[test]
    fn potential_presets() {
        let c: Solve1dConfig = serde_json::from_str(
            r#"{"grid": {"x_min": -5, "x_max": 5, "n": 100}, "potential": {"preset": "harmonic"}}"#,
        )
        .unwrap();
        assert!(matches!(c.potential, PotentialSpec::Harmonic { omega } if omega == 1.0));
        assert!(serde_json::from_str::<PotentialSpec>(r#"{"preset": "morse"}"#).is_err());
        let z: ZeemanConfig = serde_json::from_str(r#"{"preset": "deuterium-like"}"#).unwrap();
        assert_eq!(z.preset, Some(ZeemanPreset::DeuteriumLike));
    }
}
