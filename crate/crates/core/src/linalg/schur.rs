//! Partitioned-matrix determinant and the three-factor block factorization
//!
//! ```text
//! [A B]   [I  B D^-1] [A - B D^-1 C  0] [I       0]
//! [C D] = [0  I     ] [0             D] [D^-1 C  I]
//! ```
//!
//! which gives `|M| = |D| * |A - B D^-1 C|` whenever `D` is nonsingular.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError, LuDecomposition};

/// Condition estimate above which the trailing block counts as singular.
pub const SINGULAR_CONDITION: f64 = 1e12;

/// Split of an `n x n` matrix into a leading `k x k` block and a trailing
/// `(n-k) x (n-k)` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockPartition {
    k: usize,
}

impl BlockPartition {
    pub fn new(k: usize, n: usize) -> Result<Self, LinalgError> {
        if k == 0 || k >= n {
            return Err(LinalgError::InvalidPartition { k, n });
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

struct Blocks {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

fn split(m: &ComplexMatrix, part: BlockPartition) -> Result<Blocks, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let k = part.k;
    if k >= n {
        return Err(LinalgError::InvalidPartition { k, n });
    }
    let t = n - k;
    Ok(Blocks {
        a: m.block(0, 0, k, k),
        b: m.block(0, k, k, t),
        c: m.block(k, 0, t, k),
        d: m.block(k, k, t, t),
    })
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Factors `D` and returns `(|D|, D^-1)`, refusing ill-conditioned `D`.
fn factor_trailing(d: &ComplexMatrix) -> Result<(Complex64, ComplexMatrix), LinalgError> {
    let lu = LuDecomposition::new(d)?;
    if lu.is_singular() {
        return Err(LinalgError::SingularBlock {
            condition: f64::INFINITY,
        });
    }
    let inv = lu.inverse()?;
    let condition = one_norm(d) * one_norm(&inv);
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(LinalgError::SingularBlock { condition });
    }
    Ok((lu.det(), inv))
}

/// `|D| * |A - B D^-1 C|` for the partition `part`.
///
/// Fails with [`LinalgError::SingularBlock`] when the 1-norm condition
/// estimate of `D` exceeds [`SINGULAR_CONDITION`]; callers fall back to
/// [`super::det_lu`] in that case.
pub fn block_det_schur(m: &ComplexMatrix, part: BlockPartition) -> Result<Complex64, LinalgError> {
    let Blocks { a, b, c, d } = split(m, part)?;
    let (d_det, d_inv) = factor_trailing(&d)?;
    let complement = &a - &(&b * &(&d_inv * &c));
    let complement_det = LuDecomposition::new(&complement)?.det();
    Ok(d_det * complement_det)
}

/// max|M - U Σ L| for the three-factor block factorization.
pub fn schur_factor_check(m: &ComplexMatrix, part: BlockPartition) -> Result<f64, LinalgError> {
    let Blocks { a, b, c, d } = split(m, part)?;
    let k = a.rows();
    let t = d.rows();
    let (_, d_inv) = factor_trailing(&d)?;
    let dinv_c = &d_inv * &c;
    let b_dinv = &b * &d_inv;
    let complement = &a - &(&b * &dinv_c);

    let upper = ComplexMatrix::from_blocks(&[
        vec![ComplexMatrix::identity(k), b_dinv],
        vec![ComplexMatrix::zeros(t, k), ComplexMatrix::identity(t)],
    ])?;
    let middle = ComplexMatrix::from_blocks(&[
        vec![complement, ComplexMatrix::zeros(k, t)],
        vec![ComplexMatrix::zeros(t, k), d],
    ])?;
    let lower = ComplexMatrix::from_blocks(&[
        vec![ComplexMatrix::identity(k), ComplexMatrix::zeros(k, t)],
        vec![dinv_c, ComplexMatrix::identity(t)],
    ])?;
    let product = &(&upper * &middle) * &lower;
    Ok(m.max_abs_diff(&product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det_lu;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn two_by_two_example() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 1.0]]);
        let d = block_det_schur(&m, BlockPartition::new(1, 2).unwrap()).unwrap();
        assert!((d - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn block_diagonal_multiplies_block_determinants() {
        let a = ComplexMatrix::from_real_rows(&[&[3.0, 1.0], &[0.0, 2.0]]);
        let d = ComplexMatrix::from_real_rows(&[&[5.0]]);
        let m = ComplexMatrix::from_blocks(&[
            vec![a, ComplexMatrix::zeros(2, 1)],
            vec![ComplexMatrix::zeros(1, 2), d],
        ])
        .unwrap();
        let det = block_det_schur(&m, BlockPartition::new(2, 3).unwrap()).unwrap();
        assert!((det - Complex64::new(30.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn agrees_with_lu_on_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(&mut rng, 8);
        let part = BlockPartition::new(3, 8).unwrap();
        let lu = det_lu(&m).unwrap();
        let schur = block_det_schur(&m, part).unwrap();
        assert!((lu - schur).norm() <= 1e-10 * lu.norm());
    }

    #[test]
    fn identity_reconstructs_exactly() {
        let m = ComplexMatrix::identity(6);
        let r = schur_factor_check(&m, BlockPartition::new(2, 6).unwrap()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn random_ten_by_ten_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(&mut rng, 10);
        let r = schur_factor_check(&m, BlockPartition::new(4, 10).unwrap()).unwrap();
        assert!(r <= 1e-11 * m.max_abs(), "{r}");
    }

    #[test]
    fn singular_trailing_block_is_reported() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[4.0, 1.0, 1.0], &[5.0, 1.0, 1.0]]);
        let part = BlockPartition::new(1, 3).unwrap();
        assert!(matches!(
            block_det_schur(&m, part),
            Err(LinalgError::SingularBlock { .. })
        ));
        assert!(schur_factor_check(&m, part).is_err());
        // the LU route still works
        assert!(det_lu(&m).is_ok());
    }

    #[test]
    fn ill_conditioned_block_is_reported() {
        let eps = 1e-14;
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 1.0, 1.0 + eps]]);
        let err = block_det_schur(&m, BlockPartition::new(1, 3).unwrap()).unwrap_err();
        match err {
            LinalgError::SingularBlock { condition } => assert!(condition > SINGULAR_CONDITION),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partitions_must_be_proper() {
        assert!(BlockPartition::new(0, 4).is_err());
        assert!(BlockPartition::new(4, 4).is_err());
        assert!(BlockPartition::new(1, 4).is_ok());
    }
}
