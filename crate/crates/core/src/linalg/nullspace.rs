use num_complex::Complex64;

use super::{vec_dot, vec_norm, ComplexMatrix, ComplexVector};

/// Default relative tolerance for [`null_space`].
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

/// Orthonormal basis of the numerical null space of `m`.
///
/// Gaussian elimination with full pivoting stops once the largest remaining
/// entry drops to `tol * ||m||_F`; the columns never chosen as pivots span the
/// kernel. The resulting basis is orthonormalized with two passes of modified
/// Gram-Schmidt. Returns an empty list for a numerically nonsingular matrix.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> Vec<ComplexVector> {
    let (rows, cols) = m.shape();
    let threshold = tol * m.frobenius_norm();
    let mut work = m.clone();
    let mut col_perm: Vec<usize> = (0..cols).collect();
    let mut rank = 0;

    while rank < rows.min(cols) {
        let mut best = (rank, rank, -1.0_f64);
        for i in rank..rows {
            for j in rank..cols {
                let v = work[(i, j)].norm();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (pi, pj, pmax) = best;
        if pmax <= threshold {
            break;
        }
        if pi != rank {
            for j in 0..cols {
                let tmp = work[(rank, j)];
                work[(rank, j)] = work[(pi, j)];
                work[(pi, j)] = tmp;
            }
        }
        if pj != rank {
            for i in 0..rows {
                let tmp = work[(i, rank)];
                work[(i, rank)] = work[(i, pj)];
                work[(i, pj)] = tmp;
            }
            col_perm.swap(rank, pj);
        }
        let pivot = work[(rank, rank)];
        for i in rank + 1..rows {
            let factor = work[(i, rank)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            work[(i, rank)] = Complex64::new(0.0, 0.0);
            for j in rank + 1..cols {
                let u = work[(rank, j)];
                work[(i, j)] -= factor * u;
            }
        }
        rank += 1;
    }

    let mut basis: Vec<ComplexVector> = Vec::with_capacity(cols - rank);
    for free in rank..cols {
        // permuted coordinates: x[free] = 1, other free entries 0, pivots by back substitution
        let mut x = vec![Complex64::new(0.0, 0.0); cols];
        x[free] = Complex64::new(1.0, 0.0);
        for i in (0..rank).rev() {
            let mut s = -work[(i, free)];
            for j in i + 1..rank {
                s -= work[(i, j)] * x[j];
            }
            x[i] = s / work[(i, i)];
        }
        let mut v = vec![Complex64::new(0.0, 0.0); cols];
        for (slot, &orig) in col_perm.iter().enumerate() {
            v[orig] = x[slot];
        }
        basis.push(v);
    }
    orthonormalize(basis)
}

fn orthonormalize(mut vectors: Vec<ComplexVector>) -> Vec<ComplexVector> {
    for i in 0..vectors.len() {
        for _pass in 0..2 {
            for j in 0..i {
                let proj = vec_dot(&vectors[j], &vectors[i]);
                let (head, tail) = vectors.split_at_mut(i);
                for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                    *a -= proj * b;
                }
            }
        }
        let n = vec_norm(&vectors[i]);
        for a in vectors[i].iter_mut() {
            *a /= n;
        }
    }
    vectors
}
