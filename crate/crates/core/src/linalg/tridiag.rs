use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

const MAX_QL_ITERATIONS: usize = 60;

/// Real symmetric tridiagonal matrix: `diag[i]` on the diagonal and `off[i]`
/// coupling rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self, LinalgError> {
        if diag.len() != off.len() + 1 {
            return Err(LinalgError::DimensionMismatch {
                op: "tridiagonal",
                left: (diag.len(), 1),
                right: (off.len(), 1),
            });
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { diag, off })
    }

    /// Extracts the tridiagonal part of a real symmetric banded matrix.
    /// Returns `None` if `m` has entries outside the band, imaginary parts, or
    /// an asymmetric off-diagonal.
    pub fn from_matrix(m: &ComplexMatrix) -> Option<Self> {
        if !m.is_square() || m.rows() == 0 {
            return None;
        }
        let (lower, upper) = m.bandwidth();
        if lower > 1 || upper > 1 {
            return None;
        }
        let n = m.rows();
        let tiny = 1e-14 * m.max_abs();
        let diag: Vec<f64> = (0..n)
            .map(|i| m[(i, i)])
            .map(|z| (z.im.abs() <= tiny).then_some(z.re))
            .collect::<Option<_>>()?;
        let mut off = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let up = m[(i, i + 1)];
            let lo = m[(i + 1, i)];
            if up.im.abs() > tiny || lo.im.abs() > tiny || (up.re - lo.re).abs() > tiny {
                return None;
            }
            off.push(up.re);
        }
        Some(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(self.diag[i], 0.0);
            if i + 1 < n {
                m[(i, i + 1)] = Complex64::new(self.off[i], 0.0);
                m[(i + 1, i)] = Complex64::new(self.off[i], 0.0);
            }
        }
        m
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |x| x.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// All eigenvalues in ascending order (implicit QL with Wilkinson shifts).
    pub fn eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);

        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                if iter == MAX_QL_ITERATIONS {
                    return Err(LinalgError::NoConvergence { sweeps: iter });
                }
                iter += 1;

                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
                let mut deflated = false;
                for i in (l..m).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    /// Unit eigenvector for an (accurately known) eigenvalue, by inverse
    /// iteration with a pivoted tridiagonal solve.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * self.norm().max(f64::MIN_POSITIVE);
        // deterministic, non-degenerate starting vector
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i * 7919) % 101) as f64 / 101.0)
            .collect();
        normalize(&mut x);
        for _ in 0..3 {
            let shifted: Vec<f64> = self.diag.iter().map(|d| d - lambda).collect();
            x = solve_pivoted(&self.off, &shifted, &self.off, &x, tiny);
            normalize(&mut x);
        }
        // fix sign so the largest component is positive
        let (imax, _) =
            x.iter().enumerate().fold(
                (0, 0.0),
                |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best },
            );
        if x[imax] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        x
    }

    /// `ln|det(E I - T)|` and its sign, through the LDL^T continuant. Also
    /// returns how many pivots are negative, which is the number of
    /// eigenvalues above `energy` (Sturm count).
    pub fn shifted_log_det(&self, energy: f64) -> (f64, f64, usize) {
        let n = self.dim();
        let mut log_abs = 0.0;
        let mut sign = 1.0;
        let mut negatives = 0;
        let mut prev = 1.0;
        for i in 0..n {
            let mut pivot = energy - self.diag[i];
            if i > 0 {
                pivot -= self.off[i - 1] * self.off[i - 1] / prev;
            }
            if pivot == 0.0 {
                return (f64::NEG_INFINITY, 0.0, negatives);
            }
            if pivot < 0.0 {
                sign = -sign;
                negatives += 1;
            }
            log_abs += pivot.abs().ln();
            prev = pivot;
        }
        (log_abs, sign, negatives)
    }
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Gaussian elimination with partial pivoting for a general tridiagonal system.
fn solve_pivoted(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64], tiny: f64) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut dl = sub.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();
    if n == 1 {
        let p = if d[0] == 0.0 { tiny } else { d[0] };
        return vec![b[0] / p];
    }
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            b.swap(i, i + 1);
            b[i + 1] -= fact * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}
