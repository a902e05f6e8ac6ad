//! Exact operator identities for spin-1/2 particles in uniform magnetic fields,
//! checked on polynomial spinors.
//!
//! With `Π_k = (ħ/i)∇_k - (q_k/c) A_k(r_k)` and `σ_k` the spin operator of
//! particle `k`,
//!
//! ```text
//! (σ_k·Π_k)² ψ = Π_k² ψ - (ħ q_k / c)(σ_k·B_k) ψ
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{Poly, PolySpinor};
use super::QuantizeError;
use crate::extham::ParticleSpec;
use crate::linalg::ComplexMatrix;
use crate::spin::{embed_spin_with_limit, sigma_dot_with_limit, RealVector3, SpinAxis, SpinSite};
use crate::units::Units;

/// Uniform field `B` with a linear gauge `A(r) = L r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    b: RealVector3,
    /// `A_a = Σ_c linear[a][c] r_c`
    linear: [[f64; 3]; 3],
}

impl FieldConfig {
    /// Symmetric gauge `A = ½ B × r`.
    pub fn symmetric(b: RealVector3) -> Self {
        let linear = [
            [0.0, -0.5 * b.z, 0.5 * b.y],
            [0.5 * b.z, 0.0, -0.5 * b.x],
            [-0.5 * b.y, 0.5 * b.x, 0.0],
        ];
        Self { b, linear }
    }

    /// Any linear gauge; fails unless `∇ × (L r)` equals `b`.
    pub fn from_linear(linear: [[f64; 3]; 3], b: RealVector3) -> Result<Self, QuantizeError> {
        let curl = curl_of(&linear);
        let scale = b.norm_sqr().sqrt().max(1.0);
        if (curl - b).norm_sqr().sqrt() > 1e-14 * scale {
            return Err(QuantizeError::CurlMismatch { curl, b });
        }
        Ok(Self { b, linear })
    }

    pub fn zero() -> Self {
        Self::symmetric(RealVector3::ZERO)
    }

    pub fn b(&self) -> RealVector3 {
        self.b
    }

    pub fn linear(&self) -> &[[f64; 3]; 3] {
        &self.linear
    }

    pub fn curl(&self) -> RealVector3 {
        curl_of(&self.linear)
    }

    pub fn vector_potential(&self, r: &RealVector3) -> RealVector3 {
        let row = |a: usize| self.linear[a][0] * r.x + self.linear[a][1] * r.y + self.linear[a][2] * r.z;
        RealVector3::new(row(0), row(1), row(2))
    }

    /// Component `a` of `A` at particle `k` (0-based) as a polynomial in all
    /// `3N` coordinates.
    fn component_poly(&self, a: usize, k: usize, nvars: usize) -> Poly {
        let coeffs: Vec<(usize, f64)> = (0..3).map(|c| (3 * k + c, self.linear[a][c])).collect();
        Poly::linear(nvars, 0.0, &coeffs)
    }
}

fn curl_of(l: &[[f64; 3]; 3]) -> RealVector3 {
    RealVector3::new(l[2][1] - l[1][2], l[0][2] - l[2][0], l[1][0] - l[0][1])
}

/// Particles, one uniform field per particle, and a scalar potential `U`.
#[derive(Debug, Clone)]
pub struct PauliSystem {
    pub particles: Vec<ParticleSpec>,
    pub fields: Vec<FieldConfig>,
    /// `U` as a polynomial in the `3N` coordinates.
    pub potential: Poly,
    pub units: Units,
}

impl PauliSystem {
    fn validate(&self, ps: &PolySpinor) -> Result<(), QuantizeError> {
        let n = self.particles.len();
        if n == 0 || self.fields.len() != n {
            return Err(QuantizeError::LengthMismatch {
                expected: n,
                got: self.fields.len(),
            });
        }
        if ps.particles() != n || self.potential.nvars() != 3 * n {
            return Err(QuantizeError::VariableMismatch {
                left: 3 * n,
                right: ps.nvars(),
            });
        }
        Ok(())
    }
}

fn minus_i_hbar(units: &Units) -> Complex64 {
    Complex64::new(0.0, -units.hbar)
}

/// `(ħ/i) ∂ψ/∂x_{k,axis}` for the 0-based particle `k`.
pub fn poly_apply_momentum(ps: &PolySpinor, k: usize, axis: SpinAxis, units: &Units) -> PolySpinor {
    ps.derivative(3 * k + axis.index()).scale(minus_i_hbar(units))
}

/// `Π_{k,axis} ψ = (ħ/i) ∂ψ - (q_k/c) A_{k,axis} ψ`
fn apply_pi(
    ps: &PolySpinor,
    k: usize,
    axis: SpinAxis,
    particle: &ParticleSpec,
    field: &FieldConfig,
    units: &Units,
) -> Result<PolySpinor, QuantizeError> {
    let p = poly_apply_momentum(ps, k, axis, units);
    let a = field
        .component_poly(axis.index(), k, ps.nvars())
        .scale(Complex64::new(particle.charge / units.light_speed, 0.0));
    p.sub(&ps.mul_poly(&a)?)
}

/// `Π_k² ψ = Σ_a Π_a Π_a ψ`
fn apply_pi_squared(
    ps: &PolySpinor,
    k: usize,
    particle: &ParticleSpec,
    field: &FieldConfig,
    units: &Units,
) -> Result<PolySpinor, QuantizeError> {
    let mut out = PolySpinor::zero(ps.particles());
    for axis in SpinAxis::ALL {
        let once = apply_pi(ps, k, axis, particle, field, units)?;
        out = out.add(&apply_pi(&once, k, axis, particle, field, units)?)?;
    }
    Ok(out)
}

/// `(σ_k·Π_k) ψ`
fn apply_sigma_pi(
    ps: &PolySpinor,
    k: usize,
    particle: &ParticleSpec,
    field: &FieldConfig,
    units: &Units,
) -> Result<PolySpinor, QuantizeError> {
    let n = ps.particles();
    let site = SpinSite::new(k + 1, n)?;
    let mut out = PolySpinor::zero(n);
    for axis in SpinAxis::ALL {
        let sigma = embed_spin_with_limit(axis, site, n)?;
        let pi = apply_pi(ps, k, axis, particle, field, units)?;
        out = out.add(&pi.apply_matrix(&sigma)?)?;
    }
    Ok(out)
}

/// `(ħ q_k / c) σ_k·B_k` as a matrix.
fn spin_field_matrix(
    k: usize,
    n: usize,
    particle: &ParticleSpec,
    field: &FieldConfig,
    units: &Units,
) -> Result<ComplexMatrix, QuantizeError> {
    let site = SpinSite::new(k + 1, n)?;
    let coupling = units.hbar * particle.charge / units.light_speed;
    Ok(sigma_dot_with_limit(&(coupling * field.b()), site, n)?)
}

/// Max coefficient difference between `(σ·Π)² ψ` and `Π² ψ - (ħq/c)(σ·B) ψ`
/// for a single particle.
pub fn pauli_kinetic_identity_residual(
    field: &FieldConfig,
    particle: &ParticleSpec,
    ps: &PolySpinor,
    units: &Units,
) -> Result<f64, QuantizeError> {
    if ps.particles() != 1 {
        return Err(QuantizeError::VariableMismatch {
            left: 3,
            right: ps.nvars(),
        });
    }
    let (lhs, rhs) = kinetic_identity_sides(0, field, particle, ps, units)?;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Both sides of the kinetic identity for particle `k` of a multi-particle spinor.
pub fn kinetic_identity_sides(
    k: usize,
    field: &FieldConfig,
    particle: &ParticleSpec,
    ps: &PolySpinor,
    units: &Units,
) -> Result<(PolySpinor, PolySpinor), QuantizeError> {
    let once = apply_sigma_pi(ps, k, particle, field, units)?;
    let lhs = apply_sigma_pi(&once, k, particle, field, units)?;
    let spin = spin_field_matrix(k, ps.particles(), particle, field, units)?;
    let rhs = apply_pi_squared(ps, k, particle, field, units)?.sub(&ps.apply_matrix(&spin)?)?;
    Ok((lhs, rhs))
}

/// `Σ_k (q_k ħ / 2 m_k c)(σ_k·B_k)`, the total spin magnetic-interaction energy.
pub fn spin_interaction_operator(system: &PauliSystem) -> Result<ComplexMatrix, QuantizeError> {
    let n = system.particles.len();
    let mut out = ComplexMatrix::zeros(1 << n, 1 << n);
    for (k, (particle, field)) in system.particles.iter().zip(&system.fields).enumerate() {
        let m = spin_field_matrix(k, n, particle, field, &system.units)?;
        out = &out + &m.scale_real(1.0 / (2.0 * particle.mass));
    }
    Ok(out)
}

/// Spatial part of the squared-block wave operator,
/// `Σ_k (σ_k·Π_k)² ψ / 2m_k + U ψ`.
pub fn squared_form(system: &PauliSystem, ps: &PolySpinor) -> Result<PolySpinor, QuantizeError> {
    system.validate(ps)?;
    let mut out = ps.mul_poly(&system.potential)?;
    for (k, (particle, field)) in system.particles.iter().zip(&system.fields).enumerate() {
        let once = apply_sigma_pi(ps, k, particle, field, &system.units)?;
        let twice = apply_sigma_pi(&once, k, particle, field, &system.units)?;
        out = out.add(&twice.scale(Complex64::new(1.0 / (2.0 * particle.mass), 0.0)))?;
    }
    Ok(out)
}

/// `Σ_k Π_k² ψ / 2m_k + U ψ`, without the spin term.
pub fn orbital_form(system: &PauliSystem, ps: &PolySpinor) -> Result<PolySpinor, QuantizeError> {
    system.validate(ps)?;
    let mut out = ps.mul_poly(&system.potential)?;
    for (k, (particle, field)) in system.particles.iter().zip(&system.fields).enumerate() {
        let sq = apply_pi_squared(ps, k, particle, field, &system.units)?;
        out = out.add(&sq.scale(Complex64::new(1.0 / (2.0 * particle.mass), 0.0)))?;
    }
    Ok(out)
}

/// `orbital_form(ψ) - E_spin ψ`
pub fn expanded_form(system: &PauliSystem, ps: &PolySpinor) -> Result<PolySpinor, QuantizeError> {
    let spin = spin_interaction_operator(system)?;
    orbital_form(system, ps)?.sub(&ps.apply_matrix(&spin)?)
}

/// Max coefficient difference between the squared-block and the expanded
/// form of the N-particle Pauli operator.
pub fn pauli_hamiltonian_residual(system: &PauliSystem, ps: &PolySpinor) -> Result<f64, QuantizeError> {
    Ok(squared_form(system, ps)?.max_abs_diff(&expanded_form(system, ps)?))
}
