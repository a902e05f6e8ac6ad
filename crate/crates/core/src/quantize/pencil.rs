//! The 1-D factor matrix with `p -> (ħ/i) d/dx` on a Dirichlet grid.
//!
//! `D` maps the `n` interior nodes to the `n + 1` cell edges,
//! `(Dψ)_e = (ħ/i)(ψ_e - ψ_{e-1}) / (h √2m)` with `ψ_{-1} = ψ_n = 0`. The pencil
//!
//! ```text
//! G(E) = [ E - V   D^H     ]     (E - V) ψ1 + D^H ψ2 = 0
//!        [ D       I_{n+1} ]     D ψ1 + ψ2 = 0
//! ```
//!
//! eliminates to `(E - H) ψ1 = 0` with `H = D^H D + V`, and `D^H D` is
//! `(ħ²/2m h²) tridiag(-1, 2, -1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuantizeError;
use crate::linalg::{
    hermitian_eigen, vec_norm, ComplexMatrix, ComplexVector, LuDecomposition, SymTridiagonal,
};

/// Largest grid for which the dense Jacobi fallback is attempted.
pub const DENSE_EIGEN_MAX_N: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, QuantizeError> {
        if n < 3 {
            return Err(QuantizeError::GridTooSmall(n));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(QuantizeError::InvalidInterval { x_min, x_max });
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    /// Interior node `i` (0-based), `x_min + (i + 1) h`.
    pub fn point(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// The grid with `2n + 1` interior points, which halves `h` exactly.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n + 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferenceScheme {
    /// Node-to-edge forward difference; `D^H D` is the 3-point Laplacian.
    #[default]
    Forward,
    /// Square central difference `(ψ_{i+1} - ψ_{i-1}) / 2h`. Its square
    /// couples only nodes of equal parity, so the spectrum comes in
    /// near-degenerate even/odd pairs and carries a spurious high-`k` branch.
    Central,
}

/// `D` for the given scheme: `(n+1) x n` forward or `n x n` central.
pub fn momentum_matrix(g: &Grid1D, mass: f64, hbar: f64) -> ComplexMatrix {
    momentum_matrix_with_scheme(g, mass, hbar, DifferenceScheme::Forward)
}

pub fn momentum_matrix_with_scheme(
    g: &Grid1D,
    mass: f64,
    hbar: f64,
    scheme: DifferenceScheme,
) -> ComplexMatrix {
    let n = g.n();
    let h = g.h();
    // (ħ/i) = -iħ
    let minus_i_hbar = Complex64::new(0.0, -hbar) / (2.0 * mass).sqrt();
    match scheme {
        DifferenceScheme::Forward => {
            let c = minus_i_hbar / h;
            let mut d = ComplexMatrix::zeros(n + 1, n);
            for e in 0..=n {
                if e < n {
                    d[(e, e)] = c;
                }
                if e >= 1 {
                    d[(e, e - 1)] = -c;
                }
            }
            d
        }
        DifferenceScheme::Central => {
            let c = minus_i_hbar / (2.0 * h);
            let mut d = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                if i + 1 < n {
                    d[(i, i + 1)] = c;
                }
                if i >= 1 {
                    d[(i, i - 1)] = -c;
                }
            }
            d
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pencil1D {
    grid: Grid1D,
    mass: f64,
    hbar: f64,
    scheme: DifferenceScheme,
    d: ComplexMatrix,
    v: Vec<f64>,
}

/// Forward scheme, Dirichlet boundaries.
pub fn coupled_pencil(g: &Grid1D, v: &[f64], mass: f64, hbar: f64) -> Result<Pencil1D, QuantizeError> {
    coupled_pencil_with_scheme(g, v, mass, hbar, DifferenceScheme::Forward)
}

pub fn coupled_pencil_with_scheme(
    g: &Grid1D,
    v: &[f64],
    mass: f64,
    hbar: f64,
    scheme: DifferenceScheme,
) -> Result<Pencil1D, QuantizeError> {
    if v.len() != g.n() {
        return Err(QuantizeError::LengthMismatch {
            expected: g.n(),
            got: v.len(),
        });
    }
    if !(mass.is_finite() && mass > 0.0) {
        return Err(QuantizeError::NonPositiveMass(mass));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(QuantizeError::NonPositiveHbar(hbar));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(QuantizeError::NonFinitePotential);
    }
    Ok(Pencil1D {
        grid: *g,
        mass,
        hbar,
        scheme,
        d: momentum_matrix_with_scheme(g, mass, hbar, scheme),
        v: v.to_vec(),
    })
}

/// `H = D^H D + V`, the Schur complement of the identity block.
pub fn eliminate_pencil(p: &Pencil1D) -> ComplexMatrix {
    let mut h = &p.d.adjoint() * &p.d;
    for (i, v) in p.v.iter().enumerate() {
        h[(i, i)] += *v;
    }
    h
}

/// `ψ2 = -D ψ1`, the second row of the pencil solved for `ψ2`.
pub fn reconstruct_psi2(p: &Pencil1D, psi1: &[Complex64]) -> Result<ComplexVector, QuantizeError> {
    if psi1.len() != p.grid.n() {
        return Err(QuantizeError::LengthMismatch {
            expected: p.grid.n(),
            got: psi1.len(),
        });
    }
    Ok(p.d.mul_vec(psi1).into_iter().map(|z| -z).collect())
}

impl Pencil1D {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn scheme(&self) -> DifferenceScheme {
        self.scheme
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn potential(&self) -> &[f64] {
        &self.v
    }

    /// Rows of the auxiliary block: `n + 1` (forward) or `n` (central).
    pub fn aux_dim(&self) -> usize {
        self.d.rows()
    }

    pub fn dim(&self) -> usize {
        self.grid.n() + self.aux_dim()
    }

    /// Dense `G(E)`; only sensible for small grids.
    pub fn g_matrix(&self, energy: f64) -> ComplexMatrix {
        let n = self.grid.n();
        let m = self.aux_dim();
        let mut g = ComplexMatrix::zeros(n + m, n + m);
        for (i, v) in self.v.iter().enumerate() {
            g[(i, i)] = Complex64::new(energy - v, 0.0);
        }
        g.set_block(0, n, &self.d.adjoint());
        g.set_block(n, 0, &self.d);
        for i in 0..m {
            g[(n + i, n + i)] = Complex64::new(1.0, 0.0);
        }
        g
    }

    /// `ln|det G(E)|` by dense LU.
    pub fn dense_log_abs_det(&self, energy: f64) -> Result<f64, QuantizeError> {
        Ok(LuDecomposition::new(&self.g_matrix(energy))?.log_abs_det())
    }

    /// `G(E) (ψ1, ψ2)` without assembling `G`, returned as the two block rows.
    pub fn apply(
        &self,
        energy: f64,
        psi1: &[Complex64],
        psi2: &[Complex64],
    ) -> Result<(ComplexVector, ComplexVector), QuantizeError> {
        let n = self.grid.n();
        if psi1.len() != n || psi2.len() != self.aux_dim() {
            return Err(QuantizeError::LengthMismatch {
                expected: n + self.aux_dim(),
                got: psi1.len() + psi2.len(),
            });
        }
        let mut dh_psi2 = vec![Complex64::new(0.0, 0.0); n];
        for (e, y) in psi2.iter().enumerate() {
            for (i, d) in self.d.row(e).iter().enumerate() {
                if d.re != 0.0 || d.im != 0.0 {
                    dh_psi2[i] += d.conj() * y;
                }
            }
        }
        let row1 = (0..n)
            .map(|i| (energy - self.v[i]) * psi1[i] + dh_psi2[i])
            .collect();
        let d_psi1 = self.d.mul_vec(psi1);
        let row2 = d_psi1.iter().zip(psi2).map(|(a, b)| a + b).collect();
        Ok((row1, row2))
    }

    /// `‖G(E) (ψ1, -D ψ1)‖ / ‖(ψ1, -D ψ1)‖`.
    pub fn stacked_residual(&self, energy: f64, psi1: &[Complex64]) -> Result<f64, QuantizeError> {
        let psi2 = reconstruct_psi2(self, psi1)?;
        let (r1, r2) = self.apply(energy, psi1, &psi2)?;
        let num = (vec_norm(&r1).powi(2) + vec_norm(&r2).powi(2)).sqrt();
        let den = (vec_norm(psi1).powi(2) + vec_norm(&psi2).powi(2)).sqrt();
        Ok(num / den)
    }

    /// `H` as a real symmetric tridiagonal matrix, when it is one (forward scheme).
    pub fn tridiagonal(&self) -> Option<SymTridiagonal> {
        SymTridiagonal::from_matrix(&eliminate_pencil(self))
    }

    /// Ascending spectrum of `H`. Uses the tridiagonal solver when possible,
    /// else dense Jacobi up to [`DENSE_EIGEN_MAX_N`].
    pub fn spectrum(&self) -> Result<Vec<f64>, QuantizeError> {
        let h = eliminate_pencil(self);
        if let Some(t) = SymTridiagonal::from_matrix(&h) {
            return Ok(t.eigenvalues()?);
        }
        if self.grid.n() > DENSE_EIGEN_MAX_N {
            return Err(QuantizeError::GridTooLarge {
                n: self.grid.n(),
                max: DENSE_EIGEN_MAX_N,
            });
        }
        Ok(hermitian_eigen(&h)?.values)
    }

    /// Lowest `count` eigenpairs `(E_k, ψ1_k)` of `H` with unit `ψ1`.
    pub fn lowest_states(&self, count: usize) -> Result<Vec<(f64, ComplexVector)>, QuantizeError> {
        let h = eliminate_pencil(self);
        let count = count.min(self.grid.n());
        if let Some(t) = SymTridiagonal::from_matrix(&h) {
            let vals = t.eigenvalues()?;
            return Ok(vals
                .into_iter()
                .take(count)
                .map(|e| {
                    let v = t
                        .eigenvector(e)
                        .into_iter()
                        .map(|x| Complex64::new(x, 0.0))
                        .collect();
                    (e, v)
                })
                .collect());
        }
        if self.grid.n() > DENSE_EIGEN_MAX_N {
            return Err(QuantizeError::GridTooLarge {
                n: self.grid.n(),
                max: DENSE_EIGEN_MAX_N,
            });
        }
        let eig = hermitian_eigen(&h)?;
        Ok((0..count).map(|k| (eig.values[k], eig.vector(k))).collect())
    }

    /// `ln|det G(E)|` through the Schur complement, `det G(E) = det(E - H)`
    /// because the auxiliary block is the identity. Forward scheme only.
    pub fn schur_log_abs_det(&self, energy: f64) -> Result<f64, QuantizeError> {
        let t = self.tridiagonal().ok_or(QuantizeError::NotTridiagonal)?;
        Ok(t.shifted_log_det(energy).0)
    }

    /// `|det G(E_k)| / Π_{j≠k} |E_k - E_j|` for each eigenvalue `E_k` of
    /// `spectrum`. This is the distance of `E_k` from the nearest root of
    /// `det G`, measured through the determinant.
    pub fn normalized_pencil_dets(&self, spectrum: &[f64], count: usize) -> Result<Vec<f64>, QuantizeError> {
        let t = self.tridiagonal().ok_or(QuantizeError::NotTridiagonal)?;
        Ok(spectrum
            .iter()
            .take(count)
            .enumerate()
            .map(|(k, &ek)| {
                let (log_det, _, _) = t.shifted_log_det(ek);
                let log_gaps: f64 = spectrum
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &ej)| (ek - ej).abs().ln())
                    .sum();
                (log_det - log_gaps).exp()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn box_pencil(n: usize) -> Pencil1D {
        let g = Grid1D::new(0.0, 1.0, n).unwrap();
        coupled_pencil(&g, &vec![0.0; n], 1.0, 1.0).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        assert!(Grid1D::new(1.0, 1.0, 5).is_err());
        let g = Grid1D::new(0.0, 1.0, 3).unwrap();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.points(), vec![0.25, 0.5, 0.75]);
        assert_eq!(g.refined().h(), 0.125);
    }

    #[test]
    fn three_point_laplacian_by_hand() {
        // h = 1 needs an interval of length n + 1 = 4; 2m = 1
        let g = Grid1D::new(0.0, 4.0, 3).unwrap();
        let d = momentum_matrix(&g, 0.5, 1.0);
        assert_eq!(d.shape(), (4, 3));
        let dtd = &d.adjoint() * &d;
        let expect =
            ComplexMatrix::from_real_rows(&[&[2.0, -1.0, 0.0], &[-1.0, 2.0, -1.0], &[0.0, -1.0, 2.0]]);
        assert!(dtd.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn constant_vector_only_hits_boundary_rows() {
        let g = Grid1D::new(0.0, 1.0, 6).unwrap();
        let d = momentum_matrix(&g, 1.0, 1.0);
        let ones = vec![Complex64::new(1.0, 0.0); 6];
        let out = d.mul_vec(&ones);
        assert!(out[1..6].iter().all(|z| z.norm() == 0.0));
        assert!(out[0].norm() > 0.0 && out[6].norm() > 0.0);
    }

    #[test]
    fn kinetic_block_is_positive_semidefinite() {
        let g = Grid1D::new(-1.0, 2.0, 12).unwrap();
        let d = momentum_matrix(&g, 0.7, 1.0);
        let eig = hermitian_eigen(&(&d.adjoint() * &d)).unwrap();
        assert!(eig.values[0] >= -1e-12);
    }

    #[test]
    fn zero_energy_free_pencil_layout() {
        let p = box_pencil(4);
        let g = p.g_matrix(0.0);
        assert_eq!(g.shape(), (9, 9));
        assert_eq!(g.block(0, 0, 4, 4), ComplexMatrix::zeros(4, 4));
        assert_eq!(g.block(4, 0, 5, 4), *p.d());
        assert_eq!(g.block(0, 4, 4, 5), p.d().adjoint());
        assert_eq!(g.block(4, 4, 5, 5), ComplexMatrix::identity(5));
        assert!(g.is_hermitian());
    }

    #[test]
    fn schur_complement_is_e_minus_h() {
        let g = Grid1D::new(0.0, 2.0, 5).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| x * x).collect();
        let p = coupled_pencil(&g, &v, 1.3, 1.0).unwrap();
        let e = 0.37;
        let gm = p.g_matrix(e);
        let n = 5;
        let a = gm.block(0, 0, n, n);
        let b = gm.block(0, n, n, n + 1);
        let c = gm.block(n, 0, n + 1, n);
        let complement = &a - &(&b * &c);
        let expect = &ComplexMatrix::scalar(n, Complex64::new(e, 0.0)) - &eliminate_pencil(&p);
        assert!(complement.max_abs_diff(&expect) < 1e-13);
        let dense = p.dense_log_abs_det(e).unwrap();
        let schur = p.schur_log_abs_det(e).unwrap();
        assert!((dense - schur).abs() < 1e-10);
    }

    #[test]
    fn eigenvalues_are_roots_of_the_pencil() {
        let g = Grid1D::new(-3.0, 3.0, 40).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 0.5 * x * x).collect();
        let p = coupled_pencil(&g, &v, 1.0, 1.0).unwrap();
        let spec = p.spectrum().unwrap();
        let gnorm = p.g_matrix(spec[0]).frobenius_norm();
        let guard = 1e-8_f64.ln() + p.dim() as f64 * gnorm.ln();
        for &e in &spec {
            let log_det = p.dense_log_abs_det(e).unwrap();
            assert!(log_det <= guard, "E={e}: {log_det} vs {guard}");
        }
        let hnorm = p.tridiagonal().unwrap().norm();
        for nd in p.normalized_pencil_dets(&spec, spec.len()).unwrap() {
            assert!(nd <= 1e-8 * hnorm, "{nd}");
        }
        // away from the spectrum the determinant is not small
        let mid = 0.5 * (spec[0] + spec[1]);
        assert!(p.normalized_pencil_dets(&[mid, spec[1]], 1).unwrap()[0] > 1e-3);
    }

    #[test]
    fn box_ground_state_converges() {
        let p = box_pencil(2000);
        let e0 = p.spectrum().unwrap()[0];
        let exact = PI * PI / 2.0;
        assert!(((e0 - exact) / exact).abs() <= 1e-5, "{e0}");
    }

    #[test]
    fn box_error_is_second_order() {
        for k in 0..3 {
            let exact = ((k + 1) as f64 * PI).powi(2) / 2.0;
            let coarse = box_pencil(99).spectrum().unwrap()[k];
            let fine = box_pencil(199).spectrum().unwrap()[k];
            let ratio = (coarse - exact) / (fine - exact);
            assert!((3.5..=4.5).contains(&ratio), "k={k}: {ratio}");
        }
    }

    #[test]
    fn harmonic_oscillator_ground_state() {
        let g = Grid1D::new(-10.0, 10.0, 2000).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 0.5 * x * x).collect();
        let p = coupled_pencil(&g, &v, 1.0, 1.0).unwrap();
        let e0 = p.spectrum().unwrap()[0];
        assert!((e0 - 0.5).abs() <= 1e-4, "{e0}");
    }

    #[test]
    fn reconstructed_null_vector() {
        let p = box_pencil(200);
        let states = p.lowest_states(2).unwrap();
        for (e, psi1) in &states {
            assert!(p.stacked_residual(*e, psi1).unwrap() <= 1e-8);
        }
        let zero = vec![Complex64::new(0.0, 0.0); 200];
        assert!(reconstruct_psi2(&p, &zero)
            .unwrap()
            .iter()
            .all(|z| z.norm() == 0.0));
        let a = &states[0].1;
        let b = &states[1].1;
        let combo: Vec<Complex64> = a
            .iter()
            .zip(b)
            .map(|(x, y)| 2.0 * x - Complex64::new(0.0, 3.0) * y)
            .collect();
        let lhs = reconstruct_psi2(&p, &combo).unwrap();
        let (ra, rb) = (reconstruct_psi2(&p, a).unwrap(), reconstruct_psi2(&p, b).unwrap());
        for i in 0..lhs.len() {
            assert!((lhs[i] - (2.0 * ra[i] - Complex64::new(0.0, 3.0) * rb[i])).norm() < 1e-12);
        }
        assert!(reconstruct_psi2(&p, &zero[..10]).is_err());
    }

    #[test]
    fn central_scheme_pairs_up_levels() {
        let g = Grid1D::new(0.0, 1.0, 60).unwrap();
        let p = coupled_pencil_with_scheme(&g, &vec![0.0; 60], 1.0, 1.0, DifferenceScheme::Central).unwrap();
        assert!(p.tridiagonal().is_none());
        assert!(p.g_matrix(0.0).is_hermitian());
        let spec = p.spectrum().unwrap();
        // even and odd sublattices each carry a copy of the low spectrum
        assert!((spec[0] - spec[1]).abs() / spec[0] < 0.1);
    }

    #[test]
    fn potential_length_checked() {
        let g = Grid1D::new(0.0, 1.0, 5).unwrap();
        assert!(matches!(
            coupled_pencil(&g, &[0.0; 4], 1.0, 1.0),
            Err(QuantizeError::LengthMismatch { expected: 5, got: 4 })
        ));
    }
}
