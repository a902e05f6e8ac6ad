//! Weak-field Zeeman splitting of a two-particle hydrogen-like system.
//!
//! Particle 1 carries charge `-e` and particle 2 carries `+Ze`, both in the
//! uniform field `B ẑ` with `A = ½ B × r`. Separating centre-of-mass and
//! relative motion gives the two-particle Larmor frequency
//! `ω_L = (eB/2c)(1/m1 - 1/m2)`, and the spin branches shift each Bohr level
//! by `ħω_L(m + 1)` and `ħω_L(m - 1)`.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::quantize::{coupled_pencil, Grid1D, Poly, QuantizeError};
use crate::units::Units;

/// Radial grids below this many points are refused.
pub const MIN_RADIAL_POINTS: usize = 50;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZeemanError {
    #[error("mass {which} must be positive and finite, got {value}")]
    NonPositiveMass { which: &'static str, value: f64 },
    #[error("field strength must be finite, got {0}")]
    NonFiniteField(f64),
    #[error("charge number must be positive and finite, got {0}")]
    InvalidCharge(f64),
    #[error("invalid quantum numbers n={n}, l={l}, m={m}")]
    InvalidLabel { n: u32, l: u32, m: i32 },
    #[error("principal quantum number must be at least 1, got {0}")]
    InvalidPrincipal(u32),
    #[error("radial grid must start at r = 0, got {0}")]
    RadialOrigin(f64),
    #[error("radial grid of {n} points is coarser than the minimum {min}")]
    GridTooCoarse { n: usize, min: usize },
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeemanSystem {
    /// Mass of the negative particle (electron-like); conventionally `m1 <= m2`.
    pub m1: f64,
    pub m2: f64,
    /// Charge number of particle 2.
    pub z: f64,
    /// Field strength along `z`.
    pub b: f64,
    pub units: Units,
}

impl ZeemanSystem {
    pub fn new(m1: f64, m2: f64, z: f64, b: f64, units: Units) -> Result<Self, ZeemanError> {
        let s = Self { m1, m2, z, b, units };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ZeemanError> {
        for (which, value) in [("m1", self.m1), ("m2", self.m2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ZeemanError::NonPositiveMass { which, value });
            }
        }
        if !self.b.is_finite() {
            return Err(ZeemanError::NonFiniteField(self.b));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(ZeemanError::InvalidCharge(self.z));
        }
        Ok(())
    }

    pub fn with_field(self, b: f64) -> Self {
        Self { b, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassDecomposition {
    pub total: f64,
    pub reduced: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// `m1 m2 / (m2 - m1)`; `None` stands for the infinite mass of `m1 = m2`.
    pub larmor_mass: Option<f64>,
}

impl MassDecomposition {
    pub fn larmor_mass_is_infinite(&self) -> bool {
        self.larmor_mass.is_none()
    }
}

impl Serialize for MassDecomposition {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("MassDecomposition", 5)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("reduced", &self.reduced)?;
        st.serialize_field("mu1", &self.mu1)?;
        st.serialize_field("mu2", &self.mu2)?;
        st.serialize_field("larmor_mass", &format_larmor_mass(self.larmor_mass))?;
        st.end()
    }
}

/// `"inf"` for the infinite Larmor mass, else the shortest round-trip decimal.
pub fn format_larmor_mass(m: Option<f64>) -> String {
    m.map_or_else(|| "inf".to_string(), |v| v.to_string())
}

pub fn decompose_masses(s: &ZeemanSystem) -> Result<MassDecomposition, ZeemanError> {
    s.validate()?;
    let (m1, m2) = (s.m1, s.m2);
    let total = m1 + m2;
    Ok(MassDecomposition {
        total,
        reduced: m1 * m2 / total,
        mu1: m1 / total,
        mu2: m2 / total,
        larmor_mass: (m1 != m2).then(|| m1 * m2 / (m2 - m1)),
    })
}

/// `1/m1 - 1/m2`
pub fn lamb_g_factor(s: &ZeemanSystem) -> f64 {
    1.0 / s.m1 - 1.0 / s.m2
}

/// `ω_L = (eB/2c)(1/m1 - 1/m2)`; exactly zero for equal masses.
pub fn larmor_frequency(s: &ZeemanSystem) -> f64 {
    s.units.charge * s.b / (2.0 * s.units.light_speed) * lamb_g_factor(s)
}

/// The coordinate changes `r1 = R + μ2 r`, `r2 = R - μ1 r` as polynomial
/// images. Old variables are `(r1, r2)`, new ones `(r, R)`, three each.
fn com_images(mu1: f64, mu2: f64) -> Vec<Poly> {
    let mut images = Vec::with_capacity(6);
    for a in 0..3 {
        images.push(Poly::linear(6, 0.0, &[(3 + a, 1.0), (a, mu2)]));
    }
    for a in 0..3 {
        images.push(Poly::linear(6, 0.0, &[(3 + a, 1.0), (a, -mu1)]));
    }
    images
}

/// Checks `p1 = p_r + μ1 P_R` and `p2 = -p_r + μ2 P_R` on `f(r1, r2)`, and
/// that `r = r1 - r2`, `R = μ1 r1 + μ2 r2` invert the substitution. `f` is a
/// polynomial in `(x1, y1, z1, x2, y2, z2)`. Returns the largest coefficient
/// error; the common factor `ħ/i` is omitted.
pub fn com_transform_residual(masses: &MassDecomposition, f: &Poly) -> Result<f64, ZeemanError> {
    let (mu1, mu2) = (masses.mu1, masses.mu2);
    let images = com_images(mu1, mu2);
    let g = f.substitute(&images)?;
    let mut worst = 0.0_f64;
    for a in 0..3 {
        let d_r = g.derivative(a);
        let d_big_r = g.derivative(3 + a);
        let p1 = f.derivative(a).substitute(&images)?;
        let p2 = f.derivative(3 + a).substitute(&images)?;
        let rhs1 = d_r.add(&d_big_r.scale(mu1.into()))?;
        let rhs2 = d_big_r.scale(mu2.into()).sub(&d_r)?;
        worst = worst.max(p1.max_abs_diff(&rhs1)).max(p2.max_abs_diff(&rhs2));

        let r = images[a].sub(&images[3 + a])?;
        let big_r = images[a]
            .scale(mu1.into())
            .add(&images[3 + a].scale(mu2.into()))?;
        worst = worst
            .max(r.max_abs_diff(&Poly::var(6, a)))
            .max(big_r.max_abs_diff(&Poly::var(6, 3 + a)));
    }
    Ok(worst)
}

/// `A_X(v) = (B/2)(-v_y, v_x, 0)` in the variables starting at `offset`.
fn symmetric_gauge(b: f64, offset: usize, scale: f64) -> [Poly; 3] {
    [
        Poly::linear(6, 0.0, &[(offset + 1, -0.5 * b * scale)]),
        Poly::linear(6, 0.0, &[(offset, 0.5 * b * scale)]),
        Poly::zero(6),
    ]
}

/// Substitutes the centre-of-mass coordinates into `A(r1)` and `A(r2)` and
/// compares with `A_R(R) + μ2 A_r(r)` and `A_R(R) - μ1 A_r(r)`.
pub fn vector_potential_split_residual(masses: &MassDecomposition, b: f64) -> Result<f64, ZeemanError> {
    let (mu1, mu2) = (masses.mu1, masses.mu2);
    let images = com_images(mu1, mu2);
    let a1 = symmetric_gauge(b, 0, 1.0);
    let a2 = symmetric_gauge(b, 3, 1.0);
    let a_big_r = symmetric_gauge(b, 3, 1.0);
    let a_r1 = symmetric_gauge(b, 0, mu2);
    let a_r2 = symmetric_gauge(b, 0, -mu1);
    let mut worst = 0.0_f64;
    for c in 0..3 {
        let lhs1 = a1[c].substitute(&images)?;
        let lhs2 = a2[c].substitute(&images)?;
        let rhs1 = a_big_r[c].add(&a_r1[c])?;
        let rhs2 = a_big_r[c].add(&a_r2[c])?;
        worst = worst.max(lhs1.max_abs_diff(&rhs1)).max(lhs2.max_abs_diff(&rhs2));
    }
    Ok(worst)
}

/// `E_n = -μ Z² e⁴ / (2 ħ² n²)`
pub fn bohr_energy(n: u32, mu: f64, z: f64, units: &Units) -> Result<f64, ZeemanError> {
    if n < 1 {
        return Err(ZeemanError::InvalidPrincipal(n));
    }
    let e2 = units.charge * units.charge;
    Ok(-mu * z * z * e2 * e2 / (2.0 * units.hbar * units.hbar * (n * n) as f64))
}

/// Eigenvalues of `-(ħ²/2μ) u'' + [ħ² l(l+1) / 2μr² - Z e²/r] u` with
/// `u(0) = u(r_max) = 0`, eliminated from the 1-D pencil. Ascending.
pub fn radial_eigenvalues(
    l: u32,
    mu: f64,
    z: f64,
    grid: &Grid1D,
    units: &Units,
) -> Result<Vec<f64>, ZeemanError> {
    if grid.x_min() != 0.0 {
        return Err(ZeemanError::RadialOrigin(grid.x_min()));
    }
    if grid.n() < MIN_RADIAL_POINTS {
        return Err(ZeemanError::GridTooCoarse {
            n: grid.n(),
            min: MIN_RADIAL_POINTS,
        });
    }
    let centrifugal = units.hbar * units.hbar * (l * (l + 1)) as f64 / (2.0 * mu);
    let coulomb = z * units.charge * units.charge;
    let v: Vec<f64> = grid
        .points()
        .iter()
        .map(|&r| centrifugal / (r * r) - coulomb / r)
        .collect();
    let pencil = coupled_pencil(grid, &v, mu, units.hbar)?;
    Ok(pencil.spectrum()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    /// Shift `ħω_L(m + 1)`.
    One,
    /// Shift `ħω_L(m - 1)`.
    Two,
}

impl Branch {
    pub fn number(self) -> u8 {
        match self {
            Self::One => 1,
            Self::Two => 2,
        }
    }

    fn offset(self) -> i32 {
        match self {
            Self::One => 1,
            Self::Two => -1,
        }
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_u8(self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LevelLabel {
    pub n: u32,
    pub l: u32,
    pub m: i32,
    pub branch: Branch,
}

impl LevelLabel {
    pub fn new(n: u32, l: u32, m: i32, branch: Branch) -> Result<Self, ZeemanError> {
        if n < 1 || l >= n || m.unsigned_abs() > l {
            return Err(ZeemanError::InvalidLabel { n, l, m });
        }
        Ok(Self { n, l, m, branch })
    }
}

/// `ħ ω_L (m ± 1)` for the label's branch.
pub fn level_shift(s: &ZeemanSystem, label: &LevelLabel) -> f64 {
    s.units.hbar * larmor_frequency(s) * (label.m + label.branch.offset()) as f64
}

/// `E_n + ħω_L(m ± 1)` with `E_n` the reduced-mass Bohr energy.
pub fn zeeman_levels(s: &ZeemanSystem, label: &LevelLabel) -> Result<f64, ZeemanError> {
    LevelLabel::new(label.n, label.l, label.m, label.branch)?;
    let mu = decompose_masses(s)?.reduced;
    Ok(bohr_energy(label.n, mu, s.z, &s.units)? + level_shift(s, label))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelRow {
    #[serde(flatten)]
    pub label: LevelLabel,
    pub energy: f64,
    /// Shift from the field-free level.
    pub shift: f64,
}

/// Every `(n, l, m, branch)` with `n <= n_max`, in that nesting order.
pub fn splitting_table(s: &ZeemanSystem, n_max: u32) -> Result<Vec<LevelRow>, ZeemanError> {
    let mu = decompose_masses(s)?.reduced;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let base = bohr_energy(n, mu, s.z, &s.units)?;
        for l in 0..n {
            for m in -(l as i32)..=l as i32 {
                for branch in [Branch::One, Branch::Two] {
                    let label = LevelLabel { n, l, m, branch };
                    let shift = level_shift(s, &label);
                    rows.push(LevelRow {
                        label,
                        energy: base + shift,
                        shift,
                    });
                }
            }
        }
    }
    Ok(rows)
}
