use serde::{Deserialize, Serialize};

/// Hartree-style atomic units: ħ = e = m_e = 1.
pub const ATOMIC_LIGHT_SPEED: f64 = 137.035999;

/// Proton-to-electron mass ratio used by the hydrogen presets.
pub const PROTON_ELECTRON_MASS_RATIO: f64 = 1836.15267;

/// Unit constants of the working unit system. The field couplings keep the
/// Gaussian-unit form `q A / c`, so `light_speed` enters explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Units {
    pub hbar: f64,
    /// Elementary charge magnitude `e`.
    pub charge: f64,
    pub electron_mass: f64,
    pub light_speed: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self::atomic()
    }
}

impl Units {
    pub const fn atomic() -> Self {
        Self {
            hbar: 1.0,
            charge: 1.0,
            electron_mass: 1.0,
            light_speed: ATOMIC_LIGHT_SPEED,
        }
    }

    /// Names of the constants that are not finite and positive.
    pub fn invalid_fields(&self) -> Vec<&'static str> {
        [
            ("hbar", self.hbar),
            ("charge", self.charge),
            ("electron_mass", self.electron_mass),
            ("light_speed", self.light_speed),
        ]
        .into_iter()
        .filter(|(_, v)| !(v.is_finite() && *v > 0.0))
        .map(|(name, _)| name)
        .collect()
    }
}
