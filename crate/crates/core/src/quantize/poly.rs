//! Multivariate polynomials with complex coefficients, and spinors of them.
//!
//! Coefficients are stored per exponent vector in a `BTreeMap`, so iteration
//! order (and therefore every floating-point sum) is deterministic.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::QuantizeError;
use crate::linalg::ComplexMatrix;

/// Default cap on the total degree of any polynomial.
pub const DEFAULT_MAX_DEGREE: u32 = 6;

type Exponents = Vec<u32>;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    max_degree: u32,
    terms: BTreeMap<Exponents, Complex64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self::zero_with_cap(nvars, DEFAULT_MAX_DEGREE)
    }

    pub fn zero_with_cap(nvars: usize, max_degree: u32) -> Self {
        Self {
            nvars,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Complex64::new(1.0, 0.0));
        p
    }

    /// `c0 + Σ_i c_i x_i`
    pub fn linear(nvars: usize, c0: f64, coeffs: &[(usize, f64)]) -> Self {
        let mut p = Self::constant(nvars, Complex64::new(c0, 0.0));
        for &(i, c) in coeffs {
            let mut e = vec![0; nvars];
            e[i] = 1;
            p.add_term(e, Complex64::new(c, 0.0));
        }
        p
    }

    /// Single term `c · x^exponents`.
    pub fn monomial(exponents: &[u32], c: Complex64) -> Result<Self, QuantizeError> {
        let mut p = Self::zero(exponents.len());
        let deg: u32 = exponents.iter().sum();
        if deg > p.max_degree {
            return Err(QuantizeError::DegreeOverflow {
                degree: deg,
                max: p.max_degree,
            });
        }
        p.add_term(exponents.to_vec(), c);
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let slot = self.terms.entry(e).or_insert(Complex64::new(0.0, 0.0));
        *slot += c;
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn with_cap(mut self, max_degree: u32) -> Result<Self, QuantizeError> {
        let deg = self.degree();
        if deg > max_degree {
            return Err(QuantizeError::DegreeOverflow {
                degree: deg,
                max: max_degree,
            });
        }
        self.max_degree = max_degree;
        Ok(self)
    }

    /// Total degree of the nonzero terms; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(e, _)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|c| c.norm() == 0.0)
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Complex64 {
        self.terms.get(exponents).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], Complex64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    fn check_vars(&self, other: &Self) -> Result<(), QuantizeError> {
        if self.nvars != other.nvars {
            return Err(QuantizeError::VariableMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        out.max_degree = self.max_degree.max(other.max_degree);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero_with_cap(self.nvars, self.max_degree);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.check_vars(other)?;
        let cap = self.max_degree.max(other.max_degree);
        let mut out = Self::zero_with_cap(self.nvars, cap);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let deg: u32 = e.iter().sum();
                if deg > cap {
                    return Err(QuantizeError::DegreeOverflow {
                        degree: deg,
                        max: cap,
                    });
                }
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    /// `∂/∂x_var`, exact.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero_with_cap(self.nvars, self.max_degree);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(d, c * k as f64);
        }
        out
    }

    /// Substitutes `x_i -> images[i]`, each a polynomial in a common new set
    /// of variables. Used for linear changes of coordinates.
    pub fn substitute(&self, images: &[Poly]) -> Result<Self, QuantizeError> {
        if images.len() != self.nvars {
            return Err(QuantizeError::VariableMismatch {
                left: self.nvars,
                right: images.len(),
            });
        }
        let new_vars = images.first().map_or(0, Poly::nvars);
        let cap = self.max_degree;
        let mut out = Self::zero_with_cap(new_vars, cap);
        for (e, c) in &self.terms {
            let mut term = Self::constant(new_vars, *c).with_cap(cap)?;
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term.mul(&images[i])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &v)| v.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&Exponents> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|e| (self.coefficient(e) - other.coefficient(e)).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Random polynomial of total degree at most `degree` with coefficients
    /// uniform in the unit square.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, nvars: usize, degree: u32) -> Self {
        let mut out = Self::zero(nvars);
        for e in exponents_up_to(nvars, degree) {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out.add_term(e, c);
        }
        out
    }
}

/// All exponent vectors with total degree `<= degree`, in lexicographic order.
fn exponents_up_to(nvars: usize, degree: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut cur = vec![0; nvars];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponents>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, degree, &mut cur, &mut out);
    out
}

/// A spinor with `2^N` polynomial components in the `3N` particle coordinates
/// `(x_1, y_1, z_1, ..., x_N, y_N, z_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolySpinor {
    particles: usize,
    components: Vec<Poly>,
}

impl PolySpinor {
    pub fn new(particles: usize, components: Vec<Poly>) -> Result<Self, QuantizeError> {
        let nvars = 3 * particles;
        if components.len() != 1 << particles {
            return Err(QuantizeError::SpinorLength {
                expected: 1 << particles,
                got: components.len(),
            });
        }
        if let Some(p) = components.iter().find(|p| p.nvars != nvars) {
            return Err(QuantizeError::VariableMismatch {
                left: nvars,
                right: p.nvars,
            });
        }
        Ok(Self {
            particles,
            components,
        })
    }

    pub fn zero(particles: usize) -> Self {
        Self {
            particles,
            components: vec![Poly::zero(3 * particles); 1 << particles],
        }
    }

    /// A spinor whose components are the constants `values`.
    pub fn constant(particles: usize, values: &[Complex64]) -> Result<Self, QuantizeError> {
        let comps = values.iter().map(|&c| Poly::constant(3 * particles, c)).collect();
        Self::new(particles, comps)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, particles: usize, degree: u32) -> Self {
        let components = (0..1 << particles)
            .map(|_| Poly::random(rng, 3 * particles, degree))
            .collect();
        Self {
            particles,
            components,
        }
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn nvars(&self) -> usize {
        3 * self.particles
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Poly, &Poly) -> Result<Poly, QuantizeError>,
    ) -> Result<Self, QuantizeError> {
        if self.particles != other.particles {
            return Err(QuantizeError::VariableMismatch {
                left: self.nvars(),
                right: other.nvars(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            particles: self.particles,
            components,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.zip_with(other, Poly::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, QuantizeError> {
        self.zip_with(other, Poly::sub)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            particles: self.particles,
            components: self.components.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Multiplies every component by the scalar polynomial `f`.
    pub fn mul_poly(&self, f: &Poly) -> Result<Self, QuantizeError> {
        let components = self
            .components
            .iter()
            .map(|p| p.mul(f))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            particles: self.particles,
            components,
        })
    }

    pub fn derivative(&self, var: usize) -> Self {
        Self {
            particles: self.particles,
            components: self.components.iter().map(|p| p.derivative(var)).collect(),
        }
    }

    /// `(M ψ)_i = Σ_j M_ij ψ_j` for a constant `2^N x 2^N` matrix.
    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<Self, QuantizeError> {
        let d = self.components.len();
        if m.shape() != (d, d) {
            return Err(QuantizeError::SpinorLength {
                expected: d,
                got: m.rows(),
            });
        }
        let mut components = vec![Poly::zero_with_cap(self.nvars(), self.cap()); d];
        for (i, out) in components.iter_mut().enumerate() {
            for (j, p) in self.components.iter().enumerate() {
                let c = m[(i, j)];
                if c != Complex64::new(0.0, 0.0) {
                    *out = out.add(&p.scale(c))?;
                }
            }
        }
        Ok(Self {
            particles: self.particles,
            components,
        })
    }

    fn cap(&self) -> u32 {
        self.components
            .iter()
            .map(Poly::max_degree)
            .max()
            .unwrap_or(DEFAULT_MAX_DEGREE)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.components
            .iter()
            .map(Poly::max_abs_coefficient)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn derivative_of_power() {
        let p = Poly::monomial(&[3, 1], c(2.0)).unwrap();
        let d = p.derivative(0);
        assert_eq!(d.coefficient(&[2, 1]), c(6.0));
        assert!(p
            .derivative(0)
            .derivative(0)
            .derivative(0)
            .derivative(0)
            .is_zero());
        assert!(Poly::constant(2, c(5.0)).derivative(1).is_zero());
    }

    #[test]
    fn product_and_degree_cap() {
        let x = Poly::var(1, 0);
        let mut p = Poly::constant(1, c(1.0));
        for _ in 0..6 {
            p = p.mul(&x).unwrap();
        }
        assert_eq!(p.degree(), 6);
        assert!(matches!(
            p.mul(&x),
            Err(QuantizeError::DegreeOverflow { degree: 7, max: 6 })
        ));
        assert!(Poly::monomial(&[4, 3], c(1.0)).is_err());
    }

    #[test]
    fn eval_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Poly::random(&mut rng, 3, 2);
        let b = Poly::random(&mut rng, 3, 3);
        let x = [0.3, -0.7, 1.1];
        let ab = a.mul(&b).unwrap();
        assert!((ab.eval(&x) - a.eval(&x) * b.eval(&x)).norm() < 1e-12);
    }

    #[test]
    fn leibniz_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Poly::random(&mut rng, 3, 2);
        let b = Poly::random(&mut rng, 3, 2);
        let lhs = a.mul(&b).unwrap().derivative(1);
        let rhs = a
            .derivative(1)
            .mul(&b)
            .unwrap()
            .add(&a.mul(&b.derivative(1)).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) <= 1e-13);
    }

    #[test]
    fn linear_substitution_agrees_with_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Poly::random(&mut rng, 2, 3);
        // x -> u + 2v, y -> u - v
        let images = [
            Poly::linear(2, 0.0, &[(0, 1.0), (1, 2.0)]),
            Poly::linear(2, 0.0, &[(0, 1.0), (1, -1.0)]),
        ];
        let g = f.substitute(&images).unwrap();
        let (u, v) = (0.4, -1.3);
        assert!((g.eval(&[u, v]) - f.eval(&[u + 2.0 * v, u - v])).norm() < 1e-12);
    }

    #[test]
    fn random_support_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // C(3 + 2, 2) = 10 monomials of degree <= 2 in 3 variables
        assert_eq!(Poly::random(&mut rng, 3, 2).terms().count(), 10);
        assert_eq!(exponents_up_to(6, 3).len(), 84);
    }

    #[test]
    fn spinor_matrix_application() {
        let psi = PolySpinor::new(1, vec![Poly::var(3, 0), Poly::var(3, 1)]).unwrap();
        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let out = psi.apply_matrix(&sx).unwrap();
        assert_eq!(out.components()[0], Poly::var(3, 1));
        assert_eq!(out.components()[1], Poly::var(3, 0));
        assert!(PolySpinor::new(1, vec![Poly::zero(3)]).is_err());
        assert!(PolySpinor::new(1, vec![Poly::zero(2), Poly::zero(2)]).is_err());
    }
}
