use num_complex::Complex64;

use super::{ComplexMatrix, ComplexVector, LinalgError};

/// Partial-pivot LU factorization `P A = L U`, packed in one matrix.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl LuDecomposition {
    pub fn new(a: &ComplexMatrix) -> Result<Self, LinalgError> {
        if !a.is_square() {
            return Err(LinalgError::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[(k, j)];
                    lu[(i, j)] -= factor * ukj;
                }
            }
        }

        Ok(Self {
            lu,
            perm,
            swaps,
            singular,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// True when an exactly zero pivot column was met.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex64 {
        let sign = if self.swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut d = Complex64::new(sign, 0.0);
        for i in 0..self.dim() {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// `ln|det|`, safe against overflow for large or badly scaled matrices.
    /// Returns negative infinity for an exactly singular matrix.
    pub fn log_abs_det(&self) -> f64 {
        (0..self.dim()).map(|i| self.lu[(i, i)].norm().ln()).sum()
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<ComplexVector, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch {
                op: "lu_solve",
                left: (n, n),
                right: (b.len(), 1),
            });
        }
        if self.singular {
            return Err(LinalgError::Singular);
        }
        let mut x: ComplexVector = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: Complex64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: Complex64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinalgError::DimensionMismatch {
                op: "lu_solve_matrix",
                left: (n, n),
                right: b.shape(),
            });
        }
        let mut out = ComplexMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: ComplexVector = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve(&col)?;
            for (i, xi) in x.into_iter().enumerate() {
                out[(i, j)] = xi;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix, LinalgError> {
        self.solve_matrix(&ComplexMatrix::identity(self.dim()))
    }
}

/// Determinant by partial-pivot LU with row-swap sign bookkeeping.
pub fn det_lu(m: &ComplexMatrix) -> Result<Complex64, LinalgError> {
    Ok(LuDecomposition::new(m)?.det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Laplace expansion along the first row; exponential, fine for n <= 7.
    fn cofactor_det(m: &ComplexMatrix) -> Complex64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let minor =
                ComplexMatrix::from_fn(n - 1, n - 1, |r, c| m[(r + 1, if c < j { c } else { c + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            total += m[(0, j)] * sign * cofactor_det(&minor);
        }
        total
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_has_unit_determinant() {
        assert_eq!(
            det_lu(&ComplexMatrix::identity(8)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn hand_expanded_two_by_two() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let d = det_lu(&m).unwrap();
        assert!((d - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn row_swaps_flip_the_sign() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(det_lu(&m).unwrap(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn matches_cofactor_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for _ in 0..10 {
                let m = random_matrix(&mut rng, n);
                let oracle = cofactor_det(&m);
                let d = det_lu(&m).unwrap();
                assert!(
                    (d - oracle).norm() <= 1e-11 * oracle.norm(),
                    "n={n}: lu {d} vs cofactor {oracle}"
                );
            }
        }
    }

    #[test]
    fn non_square_is_rejected() {
        let err = det_lu(&ComplexMatrix::zeros(2, 3)).unwrap_err();
        assert_eq!(err, LinalgError::NotSquare { rows: 2, cols: 3 });
    }

    #[test]
    fn singular_matrix_has_zero_determinant_and_refuses_to_solve() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let lu = LuDecomposition::new(&m).unwrap();
        assert_eq!(lu.det().norm(), 0.0);
        assert!(lu.solve(&[Complex64::new(1.0, 0.0); 2]).is_err());
        assert_eq!(lu.log_abs_det(), f64::NEG_INFINITY);
    }

    #[test]
    fn inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(&mut rng, 7);
        let inv = LuDecomposition::new(&m).unwrap().inverse().unwrap();
        let err = (&m * &inv).max_abs_diff(&ComplexMatrix::identity(7));
        assert!(err < 1e-12, "{err}");
    }
}
