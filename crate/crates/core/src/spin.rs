//! Pauli matrices and their tensor-product embeddings for N spin-1/2 particles.
//!
//! The operator for axis `a` on particle `j` of `n` is
//! `I_{2^{j-1}} ⊗ σ_a ⊗ I_{2^{n-j}}`. Entries are only 0, ±1 and ±i, so
//! squares, traces and cross-site commutators come out exact in floating point.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{kron_with_limit, ComplexMatrix, LinalgError, DEFAULT_MAX_DIM};

/// Default cap on the particle count (the factor matrix is then 80 x 80).
pub const DEFAULT_MAX_PARTICLES: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpinError {
    #[error("spin axis must be 1, 2 or 3, got {0}")]
    InvalidAxis(u8),
    #[error("particle index {j} is outside 1..={n}")]
    InvalidSite { j: usize, n: usize },
    #[error("{n} particles exceeds the configured maximum of {max}")]
    TooManyParticles { n: usize, max: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpinAxis {
    X,
    Y,
    Z,
}

impl SpinAxis {
    pub const ALL: [SpinAxis; 3] = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z];

    /// Axis from its conventional label 1, 2 or 3.
    pub fn from_label(label: u8) -> Result<Self, SpinError> {
        match label {
            1 => Ok(Self::X),
            2 => Ok(Self::Y),
            3 => Ok(Self::Z),
            other => Err(SpinError::InvalidAxis(other)),
        }
    }

    pub fn label(self) -> u8 {
        match self {
            Self::X => 1,
            Self::Y => 2,
            Self::Z => 3,
        }
    }

    pub fn index(self) -> usize {
        self.label() as usize - 1
    }

    /// The axis completing `(self, other)` to a permutation of (1, 2, 3).
    pub fn third(self, other: Self) -> Option<Self> {
        if self == other {
            return None;
        }
        Self::ALL.into_iter().find(|a| *a != self && *a != other)
    }

    /// +1 for cyclic order (1,2), (2,3), (3,1); -1 for the reverse; 0 if equal.
    pub fn levi_civita(self, other: Self) -> i8 {
        match (self.label() + 3 - other.label()) % 3 {
            0 => 0,
            2 => 1,
            _ => -1,
        }
    }
}

/// Particle `j` (1-based) in a system of `n` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinSite {
    j: usize,
    n: usize,
}

impl SpinSite {
    pub fn new(j: usize, n: usize) -> Result<Self, SpinError> {
        if j == 0 || j > n {
            return Err(SpinError::InvalidSite { j, n });
        }
        Ok(Self { j, n })
    }

    pub fn particle(&self) -> usize {
        self.j
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    /// Dimension `2^n` of the spin space.
    pub fn dim(&self) -> usize {
        1 << self.n
    }
}

/// Real 3-vector; momentum, vector potential or field depending on context.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RealVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl RealVector3 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn component(&self, axis: SpinAxis) -> f64 {
        match axis {
            SpinAxis::X => self.x,
            SpinAxis::Y => self.y,
            SpinAxis::Z => self.z,
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dot(self)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for RealVector3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for RealVector3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<RealVector3> for f64 {
    type Output = RealVector3;
    fn mul(self, v: RealVector3) -> RealVector3 {
        RealVector3::new(self * v.x, self * v.y, self * v.z)
    }
}

impl fmt::Display for RealVector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// The standard 2 x 2 Pauli matrix for `axis`.
pub fn pauli(axis: SpinAxis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match axis {
        SpinAxis::X => vec![o, one, one, o],
        SpinAxis::Y => vec![o, -i, i, o],
        SpinAxis::Z => vec![one, o, o, -one],
    };
    ComplexMatrix::from_row_major(2, 2, entries).expect("2x2 literal")
}

/// `I_{2^{j-1}} ⊗ σ_axis ⊗ I_{2^{n-j}}`, limited to [`DEFAULT_MAX_PARTICLES`].
pub fn embed_spin(axis: SpinAxis, site: SpinSite) -> Result<ComplexMatrix, SpinError> {
    embed_spin_with_limit(axis, site, DEFAULT_MAX_PARTICLES)
}

pub fn embed_spin_with_limit(
    axis: SpinAxis,
    site: SpinSite,
    max_particles: usize,
) -> Result<ComplexMatrix, SpinError> {
    if site.n > max_particles {
        return Err(SpinError::TooManyParticles {
            n: site.n,
            max: max_particles,
        });
    }
    let left = ComplexMatrix::identity(1 << (site.j - 1));
    let right = ComplexMatrix::identity(1 << (site.n - site.j));
    let partial = kron_with_limit(&left, &pauli(axis), DEFAULT_MAX_DIM)?;
    Ok(kron_with_limit(&partial, &right, DEFAULT_MAX_DIM)?)
}

/// `Σ_a v_a σ_{a,j}`.
pub fn sigma_dot(v: &RealVector3, site: SpinSite) -> Result<ComplexMatrix, SpinError> {
    sigma_dot_with_limit(v, site, DEFAULT_MAX_PARTICLES)
}

pub fn sigma_dot_with_limit(
    v: &RealVector3,
    site: SpinSite,
    max_particles: usize,
) -> Result<ComplexMatrix, SpinError> {
    let mut out = ComplexMatrix::zeros(site.dim(), site.dim());
    for axis in SpinAxis::ALL {
        let s = embed_spin_with_limit(axis, site, max_particles)?;
        out = &out + &s.scale_real(v.component(axis));
    }
    Ok(out)
}

/// max|(σ·α)(σ·β) - [(α·β) I + i σ·(α×β)]| at `site`.
pub fn pauli_product_identity_residual(
    alpha: &RealVector3,
    beta: &RealVector3,
    site: SpinSite,
) -> Result<f64, SpinError> {
    let a = sigma_dot(alpha, site)?;
    let b = sigma_dot(beta, site)?;
    let lhs = &a * &b;
    let cross = sigma_dot(&alpha.cross(beta), site)?.scale(Complex64::new(0.0, 1.0));
    let rhs = &ComplexMatrix::scalar(site.dim(), Complex64::new(alpha.dot(beta), 0.0)) + &cross;
    Ok(lhs.max_abs_diff(&rhs))
}

/// One measured commutator `[σ_{a,j}, σ_{b,k}] = coefficient · σ_{c,j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorEntry {
    pub a: SpinAxis,
    pub j: usize,
    pub b: SpinAxis,
    pub k: usize,
    /// The axis `c` of the fitted operator; `None` when the commutator vanishes.
    pub result_axis: Option<SpinAxis>,
    pub coefficient: Complex64,
    /// max|[σ_aj, σ_bk] - coefficient σ_cj|.
    pub residual: f64,
}

/// Structure constants measured from the concrete matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    pub particles: usize,
    pub entries: Vec<CommutatorEntry>,
    /// Coefficient `f` in `[σ_1j, σ_2j] = f σ_3j` (and cyclic), as measured.
    pub measured_structure_constant: Complex64,
    /// The coefficient `i` of the convention `[σ1, σ2] = i σ3`.
    pub stated_structure_constant: Complex64,
    pub matches_stated: bool,
    /// Largest fit residual over all entries; zero when every relation is exact.
    pub max_residual: f64,
    /// True when every cross-site commutator is exactly the zero matrix.
    pub cross_site_exactly_zero: bool,
}

pub fn commutator_table(n: usize) -> Result<CommutatorReport, SpinError> {
    if n > DEFAULT_MAX_PARTICLES {
        return Err(SpinError::TooManyParticles {
            n,
            max: DEFAULT_MAX_PARTICLES,
        });
    }
    let dim = 1usize << n;
    let mut ops = Vec::with_capacity(3 * n);
    for j in 1..=n {
        let site = SpinSite::new(j, n)?;
        for axis in SpinAxis::ALL {
            ops.push(((axis, j), embed_spin(axis, site)?));
        }
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut entries = Vec::new();
    let mut measured: Option<Complex64> = None;
    let mut max_residual = 0.0_f64;
    let mut cross_site_exactly_zero = true;
    for ((a, j), sa) in &ops {
        for ((b, k), sb) in &ops {
            let comm = &(sa * sb) - &(sb * sa);
            let (result_axis, coefficient, residual) = if comm.max_abs() == 0.0 {
                (None, zero, 0.0)
            } else {
                // fit comm = f σ_{c,j}; the third axis only exists for a != b
                match a.third(*b) {
                    Some(c) => {
                        let target = &ops[(j - 1) * 3 + c.index()].1;
                        let f = (&target.adjoint() * &comm).trace() / dim as f64;
                        let residual = comm.max_abs_diff(&target.scale(f));
                        (Some(c), f, residual)
                    }
                    None => (None, zero, comm.max_abs()),
                }
            };
            if j != k && comm.max_abs() != 0.0 {
                cross_site_exactly_zero = false;
            }
            if j == k && a.levi_civita(*b) == 1 && measured.is_none() {
                measured = Some(coefficient);
            }
            max_residual = max_residual.max(residual);
            entries.push(CommutatorEntry {
                a: *a,
                j: *j,
                b: *b,
                k: *k,
                result_axis,
                coefficient,
                residual,
            });
        }
    }

    let measured_structure_constant = measured.unwrap_or(zero);
    let stated = Complex64::new(0.0, 1.0);
    Ok(CommutatorReport {
        particles: n,
        entries,
        measured_structure_constant,
        stated_structure_constant: stated,
        matches_stated: measured_structure_constant == stated,
        max_residual,
        cross_site_exactly_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn site(j: usize, n: usize) -> SpinSite {
        SpinSite::new(j, n).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng) -> RealVector3 {
        RealVector3::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    #[test]
    fn literal_pauli_matrices() {
        assert_eq!(
            pauli(SpinAxis::X),
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
        );
        assert_eq!(
            pauli(SpinAxis::Z),
            ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
        );
        let y = pauli(SpinAxis::Y);
        assert_eq!(y[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(y[(1, 0)], Complex64::new(0.0, 1.0));
        for a in SpinAxis::ALL {
            let s = pauli(a);
            assert_eq!(&s * &s, ComplexMatrix::identity(2));
        }
    }

    #[test]
    fn axis_labels() {
        assert_eq!(SpinAxis::from_label(2).unwrap(), SpinAxis::Y);
        assert_eq!(SpinAxis::from_label(4), Err(SpinError::InvalidAxis(4)));
        assert_eq!(SpinAxis::X.levi_civita(SpinAxis::Y), 1);
        assert_eq!(SpinAxis::Z.levi_civita(SpinAxis::X), 1);
        assert_eq!(SpinAxis::Y.levi_civita(SpinAxis::X), -1);
        assert_eq!(SpinAxis::Y.levi_civita(SpinAxis::Y), 0);
    }

    #[test]
    fn single_particle_embedding_is_the_pauli_matrix() {
        assert_eq!(embed_spin(SpinAxis::Y, site(1, 1)).unwrap(), pauli(SpinAxis::Y));
    }

    #[test]
    fn second_of_two_is_identity_kron_sigma() {
        let expected = crate::linalg::kron(&ComplexMatrix::identity(2), &pauli(SpinAxis::X)).unwrap();
        assert_eq!(embed_spin(SpinAxis::X, site(2, 2)).unwrap(), expected);
    }

    #[test]
    fn embeddings_are_traceless_involutions() {
        for n in 1..=4 {
            for j in 1..=n {
                for a in SpinAxis::ALL {
                    let s = embed_spin(a, site(j, n)).unwrap();
                    assert_eq!(s.trace(), Complex64::new(0.0, 0.0));
                    assert_eq!(&s * &s, ComplexMatrix::identity(1 << n));
                    assert_eq!(s.hermitian_defect(), 0.0);
                }
            }
        }
    }

    #[test]
    fn site_and_particle_limits() {
        assert_eq!(SpinSite::new(0, 2), Err(SpinError::InvalidSite { j: 0, n: 2 }));
        assert_eq!(SpinSite::new(3, 2), Err(SpinError::InvalidSite { j: 3, n: 2 }));
        let err = embed_spin(SpinAxis::X, site(1, 5)).unwrap_err();
        assert_eq!(err, SpinError::TooManyParticles { n: 5, max: 4 });
        assert!(embed_spin_with_limit(SpinAxis::X, site(1, 5), 5).is_ok());
    }

    #[test]
    fn sigma_dot_single_particle_explicit_form() {
        let p = RealVector3::new(0.3, -1.1, 2.5);
        let m = sigma_dot(&p, site(1, 1)).unwrap();
        assert_eq!(m[(0, 0)], Complex64::new(p.z, 0.0));
        assert_eq!(m[(0, 1)], Complex64::new(p.x, -p.y));
        assert_eq!(m[(1, 0)], Complex64::new(p.x, p.y));
        assert_eq!(m[(1, 1)], Complex64::new(-p.z, 0.0));
    }

    #[test]
    fn sigma_dot_unit_z_is_the_z_embedding() {
        let s = site(2, 3);
        assert_eq!(
            sigma_dot(&RealVector3::new(0.0, 0.0, 1.0), s).unwrap(),
            embed_spin(SpinAxis::Z, s).unwrap()
        );
    }

    #[test]
    fn sigma_dot_squares_to_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let v = random_vec(&mut rng);
            let n = rng.gen_range(1..=3);
            let j = rng.gen_range(1..=n);
            let m = sigma_dot(&v, site(j, n)).unwrap();
            let sq = &m * &m;
            let expect = ComplexMatrix::scalar(1 << n, Complex64::new(v.norm_sqr(), 0.0));
            assert!(sq.max_abs_diff(&expect) <= 1e-12);
            assert_eq!(m.hermitian_defect(), 0.0);
        }
    }

    #[test]
    fn x_times_y_is_i_z() {
        let r = pauli_product_identity_residual(
            &RealVector3::new(1.0, 0.0, 0.0),
            &RealVector3::new(0.0, 1.0, 0.0),
            site(1, 1),
        )
        .unwrap();
        assert!(r <= 1e-14);
    }

    #[test]
    fn product_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (a, b) = (random_vec(&mut rng), random_vec(&mut rng));
            let n = rng.gen_range(1..=3);
            let j = rng.gen_range(1..=n);
            assert!(pauli_product_identity_residual(&a, &b, site(j, n)).unwrap() <= 1e-12);
            // equal vectors: the cross product vanishes
            assert!(pauli_product_identity_residual(&a, &a, site(j, n)).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn measured_structure_constant_is_two_i() {
        let report = commutator_table(1).unwrap();
        assert_eq!(report.measured_structure_constant, Complex64::new(0.0, 2.0));
        assert!(!report.matches_stated);
        assert_eq!(report.max_residual, 0.0);
    }

    #[test]
    fn two_particle_commutators() {
        let report = commutator_table(2).unwrap();
        assert!(report.cross_site_exactly_zero);
        let find = |a, j, b, k| {
            report
                .entries
                .iter()
                .find(|e| e.a == a && e.j == j && e.b == b && e.k == k)
                .unwrap()
                .clone()
        };
        let cross = find(SpinAxis::X, 1, SpinAxis::Y, 2);
        assert_eq!(cross.coefficient, Complex64::new(0.0, 0.0));
        assert_eq!(cross.result_axis, None);
        let same = find(SpinAxis::X, 1, SpinAxis::Y, 1);
        assert_eq!(same.result_axis, Some(SpinAxis::Z));
        assert_eq!(same.coefficient, Complex64::new(0.0, 2.0));
        let reversed = find(SpinAxis::Z, 2, SpinAxis::Y, 2);
        assert_eq!(reversed.result_axis, Some(SpinAxis::X));
        assert_eq!(reversed.coefficient, Complex64::new(0.0, -2.0));
        assert_eq!(report.entries.len(), 36);
    }
}
