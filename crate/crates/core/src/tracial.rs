//! Finite tracial matrix algebras `(M_n, Tr/n)` with noncommutative `L_p`,
//! weak `L_p` and Lorentz norms computed from generalized singular numbers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues in `[-POSITIVITY_TOL, 0)` are treated as zero.
pub const POSITIVITY_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TracialAlgebra {
    n: usize,
}

impl TracialAlgebra {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("algebra dimension must be positive".into()));
        }
        Ok(Self { n })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Normalization factor of the trace: τ = Tr / n.
    pub fn trace_normalization(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.n)
    }

    pub fn zero(&self) -> Element {
        Element::zeros(self.n)
    }

    pub fn element(&self, matrix: DMatrix<Complex64>) -> Result<Element> {
        let x = Element::new(matrix)?;
        self.check(&x)?;
        Ok(x)
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// Matrix units `E_ij`, row-major, as elements.
    pub fn matrix_unit(&self, i: usize, j: usize) -> Element {
        let mut m = DMatrix::zeros(self.n, self.n);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        Element { matrix: m }
    }
}

/// Element of `M_n`. All norms use the normalized trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    matrix: DMatrix<Complex64>,
}

impl Element {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::Domain("empty matrix".into()));
        }
        Ok(Self { matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (k, d) in diag.iter().enumerate() {
            m[(k, k)] = Complex64::new(*d, 0.0);
        }
        Self { matrix: m }
    }

    pub fn from_real(n: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: row_major.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(row_major[i * n + j], 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    fn same_dim(&self, other: &Element) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// τ(x) = Tr(x)/n.
    pub fn trace(&self) -> Complex64 {
        self.matrix.trace() / self.dim() as f64
    }

    /// τ(x y).
    pub fn trace_product(&self, y: &Element) -> Result<Complex64> {
        self.same_dim(y)?;
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[(i, k)] * y.matrix[(k, i)];
            }
        }
        Ok(acc / n as f64)
    }

    /// ⟨x, y⟩ = τ(x* y).
    pub fn inner(&self, y: &Element) -> Result<Complex64> {
        self.same_dim(y)?;
        let s: Complex64 = self
            .matrix
            .iter()
            .zip(y.matrix.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s / self.dim() as f64)
    }

    pub fn adjoint(&self) -> Element {
        Element {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn mul(&self, y: &Element) -> Result<Element> {
        self.same_dim(y)?;
        Ok(Element {
            matrix: &self.matrix * &y.matrix,
        })
    }

    pub fn add(&self, y: &Element) -> Result<Element> {
        self.same_dim(y)?;
        Ok(Element {
            matrix: &self.matrix + &y.matrix,
        })
    }

    pub fn sub(&self, y: &Element) -> Result<Element> {
        self.same_dim(y)?;
        Ok(Element {
            matrix: &self.matrix - &y.matrix,
        })
    }

    pub fn scale(&self, c: f64) -> Element {
        Element {
            matrix: &self.matrix * Complex64::new(c, 0.0),
        }
    }

    pub fn scale_complex(&self, c: Complex64) -> Element {
        Element {
            matrix: &self.matrix * c,
        }
    }

    /// (x + x*)/2
    pub fn hermitian_part(&self) -> Element {
        Element {
            matrix: (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_defect() <= HERMITIAN_TOL * self.max_abs_entry().max(1.0)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        if !self.is_hermitian() {
            return Err(Error::Domain(format!(
                "element is not Hermitian (defect {:e})",
                self.hermiticity_defect()
            )));
        }
        Ok(sorted_eigen(&self.hermitian_part().matrix))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.hermitian_eigen()?.0[0])
    }

    pub fn is_positive(&self) -> bool {
        matches!(self.min_eigenvalue(), Ok(m) if m >= -POSITIVITY_TOL)
    }

    /// Eigenvalues of a positive semidefinite element, negative rounding
    /// noise clipped to zero.
    pub fn positive_eigen(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        let (vals, vecs) = self.hermitian_eigen().map_err(|_| Error::Positivity {
            min_eigenvalue: f64::NAN,
        })?;
        if vals[0] < -POSITIVITY_TOL {
            return Err(Error::Positivity {
                min_eigenvalue: vals[0],
            });
        }
        Ok((vals.into_iter().map(|v| v.max(0.0)).collect(), vecs))
    }

    /// f(x) for Hermitian `x` through its eigen-decomposition.
    pub fn map_hermitian(&self, f: impl Fn(f64) -> f64) -> Result<Element> {
        let (vals, vecs) = self.hermitian_eigen()?;
        Ok(Element {
            matrix: assemble(&vecs, &vals.iter().map(|v| f(*v)).collect::<Vec<_>>()),
        })
    }

    /// f(x) for positive semidefinite `x`.
    pub fn map_positive(&self, f: impl Fn(f64) -> f64) -> Result<Element> {
        let (vals, vecs) = self.positive_eigen()?;
        let mapped: Vec<f64> = vals.iter().map(|v| f(*v)).collect();
        if let Some(k) = mapped.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation { eigenvalue: vals[k] });
        }
        Ok(Element {
            matrix: assemble(&vecs, &mapped),
        })
    }

    /// x^r for positive semidefinite `x`, r > 0 (0^r = 0).
    pub fn pow_positive(&self, r: f64) -> Result<Element> {
        self.map_positive(|v| if v == 0.0 { 0.0 } else { v.powf(r) })
    }

    /// |x| = (x* x)^{1/2}
    pub fn abs(&self) -> Element {
        let xx = self.matrix.adjoint() * &self.matrix;
        let (vals, vecs) = sorted_eigen(&((&xx + xx.adjoint()) * Complex64::new(0.5, 0.0)));
        let roots: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
        Element {
            matrix: assemble(&vecs, &roots),
        }
    }

    /// Singular values in decreasing order (SVD).
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.clone().svd(false, false).singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Generalized singular numbers μ_t(x) as a step function on [0, 1).
    pub fn singular_numbers(&self) -> SingularFunction {
        let n = self.dim();
        SingularFunction {
            breakpoints: (1..=n).map(|k| k as f64 / n as f64).collect(),
            values: self.singular_values(),
        }
    }

    /// λ_s(x) = τ(1_{(s,∞)}(|x|)).
    pub fn distribution(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("distribution level must be nonnegative, got {s}")));
        }
        Ok(self.singular_numbers().distribution(s))
    }

    /// ‖x‖_p = τ(|x|^p)^{1/p}, the spectrum of |x| taken from an SVD;
    /// p = ∞ gives the operator norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("exponent must be positive, got {p}")));
        }
        let s = self.singular_values();
        if p.is_infinite() {
            return Ok(s[0]);
        }
        // scale by σ_max so large p cannot overflow
        let top = s[0];
        if top == 0.0 {
            return Ok(0.0);
        }
        let n = self.dim() as f64;
        let sum: f64 = s.iter().map(|v| if *v == 0.0 { 0.0 } else { (v / top).powf(p) }).sum();
        Ok(top * (sum / n).powf(1.0 / p))
    }

    /// Lorentz quasi-norm ‖x‖_{p,q}; q = ∞ is the weak norm sup_s s λ_s^{1/p}.
    pub fn lorentz_norm(&self, p: f64, q: f64) -> Result<f64> {
        self.singular_numbers().lorentz_norm(p, q)
    }

    /// τ(x^q log x) with 0·log 0 = 0.
    pub fn power_log_moment(&self, q: f64) -> Result<f64> {
        if !(q > 0.0) {
            return Err(Error::Domain(format!("moment exponent must be positive, got {q}")));
        }
        let (vals, _) = self.positive_eigen()?;
        let n = self.dim() as f64;
        Ok(vals
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { v.powf(q) * v.ln() })
            .sum::<f64>()
            / n)
    }

    /// τ(x² log x) − ‖x‖₂² log ‖x‖₂.
    pub fn entropy_gap(&self) -> Result<f64> {
        let (vals, _) = self.positive_eigen()?;
        let n = self.dim() as f64;
        let norm2_sq: f64 = vals.iter().map(|v| v * v).sum::<f64>() / n;
        if norm2_sq == 0.0 {
            return Err(Error::Degenerate("entropy gap of the zero element".into()));
        }
        let moment: f64 = vals
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { v * v * v.ln() })
            .sum::<f64>()
            / n;
        Ok(moment - norm2_sq * 0.5 * norm2_sq.ln())
    }

    /// Row-major coordinates in the orthonormal basis {√n E_ij}.
    pub fn to_vector(&self) -> DVector<Complex64> {
        let n = self.dim();
        let c = 1.0 / (n as f64).sqrt();
        DVector::from_fn(n * n, |k, _| self.matrix[(k / n, k % n)] * c)
    }

    pub fn from_vector(v: &DVector<Complex64>, n: usize) -> Result<Element> {
        if v.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: v.len(),
            });
        }
        let c = (n as f64).sqrt();
        Ok(Element {
            matrix: DMatrix::from_fn(n, n, |i, j| v[i * n + j] * c),
        })
    }

    pub fn to_literal(&self) -> MatrixLiteral {
        MatrixLiteral::from_matrix(&self.matrix)
    }
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
pub(crate) fn sorted_eigen(h: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(h.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// V diag(d) V*.
pub(crate) fn assemble(vecs: &DMatrix<Complex64>, d: &[f64]) -> DMatrix<Complex64> {
    let mut scaled = vecs.clone();
    for (j, dj) in d.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*dj);
    }
    scaled * vecs.adjoint()
}

/// Right-continuous decreasing step function on [0, 1): value `values[k]`
/// on `[breakpoints[k-1], breakpoints[k])` with an implicit 0 at the left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl SingularFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.is_empty() {
            return Err(Error::Dimension {
                expected: breakpoints.len(),
                found: values.len(),
            });
        }
        if breakpoints[0] <= 0.0 || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation("breakpoints must increase strictly from 0".into()));
        }
        if (breakpoints[breakpoints.len() - 1] - 1.0).abs() > 1e-15 {
            return Err(Error::Validation("final breakpoint must equal τ(1) = 1".into()));
        }
        if values.iter().any(|v| *v < 0.0) || values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Validation("values must be nonnegative and decreasing".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// μ_t for t in [0, 1); 0 beyond.
    pub fn eval(&self, t: f64) -> f64 {
        match self.breakpoints.iter().position(|b| t < *b) {
            Some(k) => self.values[k],
            None => 0.0,
        }
    }

    fn starts(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(0.0).chain(self.breakpoints.iter().copied())
    }

    /// Lebesgue measure of {t : μ_t > s}.
    pub fn distribution(&self, s: f64) -> f64 {
        self.starts()
            .zip(self.breakpoints.iter().zip(&self.values))
            .filter(|(_, (_, v))| **v > s)
            .map(|(a, (b, _))| b - a)
            .sum()
    }

    /// ∫₀¹ μ_t^p dt
    pub fn integral_power(&self, p: f64) -> f64 {
        self.starts()
            .zip(self.breakpoints.iter().zip(&self.values))
            .map(|(a, (b, v))| if *v == 0.0 { 0.0 } else { (b - a) * v.powf(p) })
            .sum()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values[0];
        }
        self.integral_power(p).powf(1.0 / p)
    }

    pub fn lorentz_norm(&self, p: f64, q: f64) -> Result<f64> {
        if p.is_infinite() {
            return Err(Error::UnsupportedParameter(
                "Lorentz norm with p = infinity (weak L_inf) is not defined".into(),
            ));
        }
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::Domain(format!("Lorentz exponents must be positive, got ({p}, {q})")));
        }
        let pieces = self.starts().zip(self.breakpoints.iter().zip(&self.values));
        if q.is_infinite() {
            return Ok(pieces
                .map(|(_, (b, v))| v * b.powf(1.0 / p))
                .fold(0.0, f64::max));
        }
        let e = q / p;
        let s: f64 = pieces
            .map(|(a, (b, v))| {
                if *v == 0.0 {
                    0.0
                } else {
                    v.powf(q) * (p / q) * (b.powf(e) - a.powf(e))
                }
            })
            .sum();
        Ok(s.powf(1.0 / q))
    }
}

/// JSON matrix literal `{ "n": int, "entries": [[[re, im], ...], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixLiteral {
    pub n: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixLiteral {
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        Self {
            n: m.nrows(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.entries.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: self.entries.len(),
            });
        }
        let cols = self.entries.first().map_or(0, |r| r.len());
        if let Some(bad) = self.entries.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(DMatrix::from_fn(self.n, cols, |i, j| {
            Complex64::new(self.entries[i][j][0], self.entries[i][j][1])
        }))
    }

    pub fn to_element(&self) -> Result<Element> {
        Element::new(self.to_matrix()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn diag31() -> Element {
        Element::from_real_diagonal(&[3.0, 1.0])
    }

    #[test]
    fn singular_numbers_of_diagonal() {
        let mu = diag31().singular_numbers();
        assert_eq!(mu.values(), &[3.0, 1.0]);
        assert_eq!(mu.breakpoints(), &[0.5, 1.0]);
        assert_eq!(mu.eval(0.2), 3.0);
        assert_eq!(mu.eval(0.5), 1.0);
        assert_eq!(Element::zeros(3).singular_numbers().values(), &[0.0; 3]);
        let mut r = random::rng(1);
        let u = Element::new(random::unitary(&mut r, 4)).unwrap();
        for v in u.singular_numbers().values() {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn non_square_rejected() {
        let m = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(Element::new(m), Err(Error::Dimension { .. })));
        let a = Element::zeros(2);
        let b = Element::zeros(3);
        assert!(matches!(a.trace_product(&b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn distribution_examples() {
        let x = diag31();
        assert_eq!(x.distribution(2.0).unwrap(), 0.5);
        assert_eq!(x.distribution(5.0).unwrap(), 0.0);
        assert_eq!(x.distribution(0.0).unwrap(), 1.0);
        assert!(matches!(x.distribution(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lp_norm_examples() {
        let x = diag31();
        assert_relative_eq!(x.lp_norm(1.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(x.lp_norm(2.0).unwrap(), 5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(x.lp_norm(f64::INFINITY).unwrap(), 3.0, epsilon = 1e-14);
        for p in [0.5, 1.0, 3.0, f64::INFINITY] {
            assert_relative_eq!(Element::identity(4).lp_norm(p).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn lorentz_examples() {
        let one = Element::identity(3);
        for (p, q) in [(1.0, 2.0), (2.0, 1.0), (0.5, 3.0)] {
            let expected: f64 = (p / q as f64).powf(1.0 / q);
            assert_relative_eq!(one.lorentz_norm(p, q).unwrap(), expected, epsilon = 1e-12);
        }
        assert_eq!(diag31().lorentz_norm(1.0, f64::INFINITY).unwrap(), 1.5);
        assert!(matches!(
            diag31().lorentz_norm(f64::INFINITY, 2.0),
            Err(Error::UnsupportedParameter(_))
        ));
        let mut r = random::rng(5);
        let x = Element::new(random::ginibre(&mut r, 5, 5)).unwrap();
        for p in [1.0, 2.5] {
            assert_relative_eq!(
                x.lorentz_norm(p, p).unwrap(),
                x.lp_norm(p).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn power_log_moment_examples() {
        let x = Element::from_real_diagonal(&[E, 1.0]);
        for q in [0.5, 1.0, 2.0, 3.0] {
            assert_relative_eq!(x.power_log_moment(q).unwrap(), E.powf(q) / 2.0, max_relative = 1e-14);
        }
        assert_eq!(Element::identity(3).power_log_moment(2.0).unwrap(), 0.0);
        let singular = Element::from_real_diagonal(&[0.0, 2.0]);
        assert_relative_eq!(singular.power_log_moment(1.0).unwrap(), 2f64.ln(), epsilon = 1e-15);
        let neg = Element::from_real_diagonal(&[-1e-6, 2.0]);
        assert!(matches!(neg.power_log_moment(2.0), Err(Error::Positivity { .. })));
        let clipped = Element::from_real_diagonal(&[-1e-13, 2.0]);
        assert!(clipped.power_log_moment(2.0).is_ok());
    }

    #[test]
    fn entropy_gap_examples() {
        assert_eq!(Element::identity(2).entropy_gap().unwrap(), 0.0);
        assert!(Element::identity(2).scale(3.0).entropy_gap().unwrap().abs() < 1e-14);
        let x = Element::from_real_diagonal(&[E, 1.0]);
        let n2 = (E * E + 1.0) / 2.0;
        let expected = E * E / 2.0 - n2 * n2.sqrt().ln();
        assert_relative_eq!(x.entropy_gap().unwrap(), expected, max_relative = 1e-14);
        assert!(matches!(Element::zeros(2).entropy_gap(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn vector_roundtrip_and_inner_product() {
        let mut r = random::rng(2);
        let x = Element::new(random::ginibre(&mut r, 3, 3)).unwrap();
        let y = Element::new(random::ginibre(&mut r, 3, 3)).unwrap();
        let back = Element::from_vector(&x.to_vector(), 3).unwrap();
        assert!((back.matrix() - x.matrix()).norm() < 1e-14);
        let ip = x.to_vector().dotc(&y.to_vector());
        assert!((ip - x.inner(&y).unwrap()).norm() < 1e-13);
        let tr = x.adjoint().trace_product(&y).unwrap();
        assert!((ip - tr).norm() < 1e-13);
    }

    #[test]
    fn literal_roundtrip() {
        let x = diag31();
        let json = serde_json::to_string(&x.to_literal()).unwrap();
        let lit: MatrixLiteral = serde_json::from_str(&json).unwrap();
        assert_eq!(lit.to_element().unwrap(), x);
        let bad: MatrixLiteral =
            serde_json::from_str(r#"{"n":2,"entries":[[[1,0],[0,0]]]}"#).unwrap();
        assert!(bad.to_element().is_err());
    }

    #[test]
    fn singular_function_validation() {
        assert!(SingularFunction::new(vec![0.5, 1.0], vec![1.0, 2.0]).is_err());
        assert!(SingularFunction::new(vec![0.5, 0.9], vec![2.0, 1.0]).is_err());
        let f = SingularFunction::new(vec![0.25, 1.0], vec![2.0, 1.0]).unwrap();
        assert_relative_eq!(f.integral_power(2.0), 0.25 * 4.0 + 0.75, epsilon = 1e-15);
    }
}
