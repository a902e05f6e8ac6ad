//! Extended-Hamiltonian values and their linear factor matrices.
//!
//! For one particle in one dimension the factor is the 2 x 2 matrix
//! `[[E - V, p/√2m], [p/√2m, 1]]` with determinant `-K`. For N spin-1/2
//! particles in three dimensions it is the Hermitian block matrix
//!
//! ```text
//!     [ aI  H_1 ... H_N ]
//! G = [ H_1  I          ]      a = E - U,  H_j = σ_j·(p_j - q_j A_j / c) / √(2 m_j)
//!     [ ...      ...    ]
//!     [ H_N          I  ]
//! ```
//!
//! of size `2^N (N+1)`. Its determinant is `|aI - Σ H_j²| = (-K)^(2^N)`, since
//! each `H_j²` is the scalar `(p_j - q_j A_j / c)² / 2m_j`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    block_det_schur, det_lu, vec_norm, BlockPartition, ComplexMatrix, ComplexVector, LinalgError,
};
use crate::spin::{sigma_dot_with_limit, RealVector3, SpinError, SpinSite, DEFAULT_MAX_PARTICLES};
use crate::units::Units;

/// Default |K| below which a sample counts as on shell.
pub const DEFAULT_SHELL_TOL: f64 = 1e-9;

/// Floor on the denominator of relative errors, so that near-zero
/// references are compared absolutely.
pub const REL_ERR_FLOOR: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtHamError {
    #[error("particle {index} has non-positive mass {mass}")]
    NonPositiveMass { index: usize, mass: f64 },
    #[error("sample has {particles} particles but {momenta} momenta and {potentials} vector potentials")]
    LengthMismatch {
        particles: usize,
        momenta: usize,
        potentials: usize,
    },
    #[error("sample needs at least one particle")]
    Empty,
    #[error("speed of light must be positive, got {0}")]
    NonPositiveLightSpeed(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("sample is off shell: |K| = {k:e} exceeds {tol:e}")]
    OffShell { k: f64, tol: f64 },
    #[error("split coefficient must be finite and nonzero, got {0}")]
    InvalidSplit(f64),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `|x - reference| / max(|reference|, REL_ERR_FLOOR)`.
pub fn rel_err(x: Complex64, reference: Complex64) -> f64 {
    (x - reference).norm() / reference.norm().max(REL_ERR_FLOOR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleSpec {
    pub mass: f64,
    /// Signed charge in the working unit system.
    pub charge: f64,
}

impl ParticleSpec {
    pub fn new(mass: f64, charge: f64) -> Result<Self, ExtHamError> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(ExtHamError::NonPositiveMass { index: 1, mass });
        }
        if !charge.is_finite() {
            return Err(ExtHamError::NonFinite("charge"));
        }
        Ok(Self { mass, charge })
    }
}

/// A phase-space point for N particles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSample {
    pub particles: Vec<ParticleSpec>,
    pub momenta: Vec<RealVector3>,
    /// Vector potential `A_k` evaluated at particle k.
    pub potentials: Vec<RealVector3>,
    /// `U`
    pub scalar_potential: f64,
    /// `E`
    pub energy: f64,
    pub light_speed: f64,
}

impl SystemSample {
    pub fn validate(&self) -> Result<(), ExtHamError> {
        let n = self.particles.len();
        if n == 0 {
            return Err(ExtHamError::Empty);
        }
        if self.momenta.len() != n || self.potentials.len() != n {
            return Err(ExtHamError::LengthMismatch {
                particles: n,
                momenta: self.momenta.len(),
                potentials: self.potentials.len(),
            });
        }
        for (i, p) in self.particles.iter().enumerate() {
            if !(p.mass.is_finite() && p.mass > 0.0) {
                return Err(ExtHamError::NonPositiveMass {
                    index: i + 1,
                    mass: p.mass,
                });
            }
        }
        if !(self.light_speed.is_finite() && self.light_speed > 0.0) {
            return Err(ExtHamError::NonPositiveLightSpeed(self.light_speed));
        }
        if !self.momenta.iter().all(RealVector3::is_finite) {
            return Err(ExtHamError::NonFinite("momenta"));
        }
        if !self.potentials.iter().all(RealVector3::is_finite) {
            return Err(ExtHamError::NonFinite("vector potentials"));
        }
        if !(self.energy.is_finite() && self.scalar_potential.is_finite())
            || self.particles.iter().any(|p| !p.charge.is_finite())
        {
            return Err(ExtHamError::NonFinite("scalars"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// `p_k - (q_k / c) A_k` for the 0-based particle `k`.
    pub fn kinetic_momentum(&self, k: usize) -> RealVector3 {
        let q_over_c = self.particles[k].charge / self.light_speed;
        self.momenta[k] - q_over_c * self.potentials[k]
    }

    /// `Σ_k (p_k - q_k A_k / c)² / 2m_k`
    pub fn kinetic_energy(&self) -> f64 {
        (0..self.len())
            .map(|k| self.kinetic_momentum(k).norm_sqr() / (2.0 * self.particles[k].mass))
            .sum()
    }

    /// The same sample with `E` moved onto the shell `K = 0`.
    pub fn on_shell(mut self) -> Self {
        self.energy = self.scalar_potential + self.kinetic_energy();
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample1D {
    pub mass: f64,
    pub momentum: f64,
    /// `V(x, t)` at the sample point.
    pub potential: f64,
    pub energy: f64,
}

impl Sample1D {
    pub fn validate(&self) -> Result<(), ExtHamError> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(ExtHamError::NonPositiveMass {
                index: 1,
                mass: self.mass,
            });
        }
        if !(self.momentum.is_finite() && self.potential.is_finite() && self.energy.is_finite()) {
            return Err(ExtHamError::NonFinite("1-D sample"));
        }
        Ok(())
    }

    pub fn on_shell(mut self) -> Self {
        self.energy = self.potential + self.momentum * self.momentum / (2.0 * self.mass);
        self
    }
}

/// `-K = E - V - p²/2m`
pub fn k_value_1d(s: &Sample1D) -> f64 {
    s.energy - s.potential - s.momentum * s.momentum / (2.0 * s.mass)
}

/// `[[E - V, p/√2m], [p/√2m, 1]]`
pub fn build_g_1d(s: &Sample1D) -> ComplexMatrix {
    let c = s.momentum / (2.0 * s.mass).sqrt();
    ComplexMatrix::from_real_rows(&[&[s.energy - s.potential, c], &[c, 1.0]])
}

/// Non-symmetric factor `[[E - V, b p], [a p, 1]]` with `a b = 1/2m`.
/// `a = 1/√2m` reproduces [`build_g_1d`].
pub fn build_g_1d_split(s: &Sample1D, a: f64) -> Result<ComplexMatrix, ExtHamError> {
    if !a.is_finite() || a == 0.0 {
        return Err(ExtHamError::InvalidSplit(a));
    }
    let b = 1.0 / (2.0 * s.mass * a);
    Ok(ComplexMatrix::from_real_rows(&[
        &[s.energy - s.potential, b * s.momentum],
        &[a * s.momentum, 1.0],
    ]))
}

/// `(λ, -(p/√2m) λ)`, which [`build_g_1d`] annihilates on shell.
pub fn null_spinor_1d(s: &Sample1D, lambda: Complex64) -> Result<ComplexVector, ExtHamError> {
    null_spinor_1d_with_tol(s, lambda, DEFAULT_SHELL_TOL)
}

pub fn null_spinor_1d_with_tol(
    s: &Sample1D,
    lambda: Complex64,
    tol: f64,
) -> Result<ComplexVector, ExtHamError> {
    s.validate()?;
    let k = k_value_1d(s).abs();
    if k > tol {
        return Err(ExtHamError::OffShell { k, tol });
    }
    let c = s.momentum / (2.0 * s.mass).sqrt();
    Ok(vec![lambda, -c * lambda])
}

/// `-K = E - U - Σ_k (p_k - q_k A_k / c)² / 2m_k`
pub fn k_value_n(s: &SystemSample) -> f64 {
    s.energy - s.scalar_potential - s.kinetic_energy()
}

/// `H_j = σ_j·(p_j - q_j A_j / c) / √(2 m_j)` for the 1-based particle `j`.
pub fn h_block(j: usize, s: &SystemSample) -> Result<ComplexMatrix, ExtHamError> {
    h_block_with_limit(j, s, DEFAULT_MAX_PARTICLES)
}

fn h_block_with_limit(
    j: usize,
    s: &SystemSample,
    max_particles: usize,
) -> Result<ComplexMatrix, ExtHamError> {
    s.validate()?;
    let site = SpinSite::new(j, s.len())?;
    let pi = s.kinetic_momentum(j - 1);
    let scale = 1.0 / (2.0 * s.particles[j - 1].mass).sqrt();
    Ok(sigma_dot_with_limit(&(scale * pi), site, max_particles)?)
}

pub fn build_g_n(s: &SystemSample) -> Result<ComplexMatrix, ExtHamError> {
    build_g_n_with_limit(s, DEFAULT_MAX_PARTICLES)
}

pub fn build_g_n_with_limit(s: &SystemSample, max_particles: usize) -> Result<ComplexMatrix, ExtHamError> {
    s.validate()?;
    let n = s.len();
    if n > max_particles {
        return Err(SpinError::TooManyParticles {
            n,
            max: max_particles,
        }
        .into());
    }
    let d = 1usize << n;
    let a = Complex64::new(s.energy - s.scalar_potential, 0.0);
    let hs = (1..=n)
        .map(|j| h_block_with_limit(j, s, max_particles))
        .collect::<Result<Vec<_>, _>>()?;

    let mut g = ComplexMatrix::zeros(d * (n + 1), d * (n + 1));
    g.set_block(0, 0, &ComplexMatrix::scalar(d, a));
    for (k, h) in hs.iter().enumerate() {
        let off = d * (k + 1);
        g.set_block(0, off, h);
        g.set_block(off, 0, h);
        g.set_block(off, off, &ComplexMatrix::identity(d));
    }
    Ok(g)
}

/// Both determinant routes compared against powers of `-K`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetIdentityReport {
    pub particles: usize,
    pub dim: usize,
    /// `-K`
    pub k_value: f64,
    pub det_direct: Complex64,
    pub det_schur: Complex64,
    /// `K²`
    pub k_squared: f64,
    /// The exponent `l` of this construction.
    pub exponent: u32,
    /// `(-K)^l`
    pub k_power: f64,
    /// Largest of the LU and Schur errors against `K²`, and LU vs Schur.
    pub max_rel_err: f64,
    /// Largest of the LU and Schur errors against `(-K)^l`, and LU vs Schur.
    pub power_rel_err: f64,
    pub lu_schur_rel_err: f64,
}

fn det_report(
    g: &ComplexMatrix,
    leading: usize,
    particles: usize,
    k_value: f64,
    exponent: u32,
) -> Result<DetIdentityReport, ExtHamError> {
    let det_direct = det_lu(g)?;
    let det_schur = block_det_schur(g, BlockPartition::new(leading, g.rows())?)?;
    let k_squared = k_value * k_value;
    let k_power = k_value.powi(exponent as i32);
    let lu_schur_rel_err = rel_err(det_schur, det_direct);
    let against = |target: f64| {
        let t = Complex64::new(target, 0.0);
        rel_err(det_direct, t)
            .max(rel_err(det_schur, t))
            .max(lu_schur_rel_err)
    };
    Ok(DetIdentityReport {
        particles,
        dim: g.rows(),
        k_value,
        det_direct,
        det_schur,
        k_squared,
        exponent,
        k_power,
        max_rel_err: against(k_squared),
        power_rel_err: against(k_power),
        lu_schur_rel_err,
    })
}

/// Determinant of `G_N` by LU and by the Schur complement of the trailing
/// identity block, against `K²` and against `(-K)^(2^N)`.
pub fn verify_det_identity(s: &SystemSample) -> Result<DetIdentityReport, ExtHamError> {
    let g = build_g_n(s)?;
    let n = s.len();
    det_report(&g, 1 << n, n, k_value_n(s), 1 << n)
}

/// The one-dimensional case, where the exponent is 1.
pub fn verify_det_identity_1d(s: &Sample1D) -> Result<DetIdentityReport, ExtHamError> {
    s.validate()?;
    det_report(&build_g_1d(s), 1, 1, k_value_1d(s), 1)
}

/// The `2^N` null spinors `(θ_1, -H_1 θ_1, ..., -H_N θ_1)` with `θ_1` running
/// over the standard basis.
pub fn null_spinors_n(s: &SystemSample) -> Result<Vec<ComplexVector>, ExtHamError> {
    null_spinors_n_with_tol(s, DEFAULT_SHELL_TOL)
}

pub fn null_spinors_n_with_tol(s: &SystemSample, tol: f64) -> Result<Vec<ComplexVector>, ExtHamError> {
    s.validate()?;
    let k = k_value_n(s).abs();
    if k > tol {
        return Err(ExtHamError::OffShell { k, tol });
    }
    let n = s.len();
    let d = 1usize << n;
    let hs = (1..=n).map(|j| h_block(j, s)).collect::<Result<Vec<_>, _>>()?;
    let spinors = (0..d)
        .map(|i| {
            let mut theta1 = vec![Complex64::new(0.0, 0.0); d];
            theta1[i] = Complex64::new(1.0, 0.0);
            let mut out = theta1.clone();
            for h in &hs {
                out.extend(h.mul_vec(&theta1).into_iter().map(|z| -z));
            }
            out
        })
        .collect();
    Ok(spinors)
}

/// `‖G θ‖ / (‖G‖_F ‖θ‖)`
pub fn relative_null_residual(g: &ComplexMatrix, theta: &[Complex64]) -> f64 {
    vec_norm(&g.mul_vec(theta)) / (g.frobenius_norm() * vec_norm(theta))
}

/// Draws an off-shell sample with `n` particles: masses in [0.5, 2] in units
/// of the electron mass, charges ±e, momenta in [-1, 1]³, vector potentials
/// in [-c/2, c/2]³ so that `qA/c` is of order one, and `E`, `U` in [-1, 1].
pub fn random_system_sample<R: Rng + ?Sized>(rng: &mut R, n: usize, units: &Units) -> SystemSample {
    let vec3 = |scale: f64, rng: &mut R| {
        RealVector3::new(
            scale * rng.gen_range(-1.0..1.0),
            scale * rng.gen_range(-1.0..1.0),
            scale * rng.gen_range(-1.0..1.0),
        )
    };
    let particles = (0..n)
        .map(|_| ParticleSpec {
            mass: units.electron_mass * rng.gen_range(0.5..2.0),
            charge: if rng.gen_bool(0.5) {
                units.charge
            } else {
                -units.charge
            },
        })
        .collect();
    let momenta = (0..n).map(|_| vec3(1.0, rng)).collect();
    let potentials = (0..n).map(|_| vec3(0.5 * units.light_speed, rng)).collect();
    SystemSample {
        particles,
        momenta,
        potentials,
        scalar_potential: rng.gen_range(-1.0..1.0),
        energy: rng.gen_range(-1.0..1.0),
        light_speed: units.light_speed,
    }
}

pub fn random_sample_1d<R: Rng + ?Sized>(rng: &mut R) -> Sample1D {
    Sample1D {
        mass: rng.gen_range(0.5..2.0),
        momentum: rng.gen_range(-2.0..2.0),
        potential: rng.gen_range(-1.0..1.0),
        energy: rng.gen_range(-2.0..2.0),
    }
}
