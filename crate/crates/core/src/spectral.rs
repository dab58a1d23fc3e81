//! Superoperators on `L_2(M_n, τ)`, their spectral decomposition and the
//! functional calculus `m(L)`.
//!
//! A superoperator is stored as its `n² × n²` matrix in the orthonormal
//! basis `{√n E_ij}` (row-major index `i·n + j`). In that basis the entry
//! `M[(a·n+b, i·n+j)]` equals `T(E_ij)_ab`, so the storage coincides with
//! the usual matrix-unit vectorization and self-adjointness for
//! `⟨a, b⟩ = τ(a* b)` is plain Hermitian symmetry.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_line, LineWindow, QuadOptions};
use crate::tracial::{assemble, sorted_eigen, Element};

/// Self-adjointness and kernel detection threshold.
pub const SPECTRAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    n: usize,
    matrix: DMatrix<Complex64>,
    self_adjoint: bool,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

impl Superoperator {
    /// Wraps an `n² × n²` matrix; the self-adjoint flag is set when the
    /// Hermitian defect is below tolerance.
    pub fn from_matrix(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = n * n;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                found: if matrix.nrows() != d { matrix.nrows() } else { matrix.ncols() },
            });
        }
        let defect = max_abs(&(&matrix - matrix.adjoint()));
        Ok(Self {
            n,
            self_adjoint: defect <= SPECTRAL_TOL,
            matrix,
        })
    }

    /// Like [`from_matrix`](Self::from_matrix) but rejects non-self-adjoint
    /// input and removes the residual skew part.
    pub fn self_adjoint(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let op = Self::from_matrix(n, matrix)?;
        if !op.self_adjoint {
            return Err(Error::Symmetry {
                defect: op.adjoint_defect(),
            });
        }
        Ok(op.symmetrized())
    }

    /// Matrix of the linear map `f`, built column by column from matrix units.
    pub fn from_map(n: usize, f: impl Fn(&Element) -> Element) -> Result<Self> {
        let d = n * n;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..n {
            for j in 0..n {
                let mut e = DMatrix::zeros(n, n);
                e[(i, j)] = c(1.0);
                let image = f(&Element::new(e)?);
                if image.dim() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        found: image.dim(),
                    });
                }
                for a in 0..n {
                    for b in 0..n {
                        m[(a * n + b, i * n + j)] = image.matrix()[(a, b)];
                    }
                }
            }
        }
        Self::from_matrix(n, m)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            matrix: DMatrix::identity(n * n, n * n),
            self_adjoint: true,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            matrix: DMatrix::zeros(n * n, n * n),
            self_adjoint: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint
    }

    /// max |M − M*| entry.
    pub fn adjoint_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn symmetrized(&self) -> Self {
        Self {
            n: self.n,
            matrix: (&self.matrix + self.matrix.adjoint()) * c(0.5),
            self_adjoint: true,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            matrix: self.matrix.adjoint(),
            self_adjoint: self.self_adjoint,
        }
    }

    fn check(&self, other: &Superoperator) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.dim() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: x.dim(),
            });
        }
        Element::from_vector(&(&self.matrix * x.to_vector()), self.n)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Superoperator) -> Result<Self> {
        self.check(other)?;
        Self::from_matrix(self.n, &self.matrix * &other.matrix)
    }

    pub fn add(&self, other: &Superoperator) -> Result<Self> {
        self.check(other)?;
        Self::from_matrix(self.n, &self.matrix + &other.matrix)
    }

    pub fn sub(&self, other: &Superoperator) -> Result<Self> {
        self.check(other)?;
        Self::from_matrix(self.n, &self.matrix - &other.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            matrix: &self.matrix * c(s),
            self_adjoint: self.self_adjoint,
        }
    }

    /// `self + ε I`
    pub fn shifted(&self, eps: f64) -> Self {
        let d = self.n * self.n;
        Self {
            n: self.n,
            matrix: &self.matrix + DMatrix::<Complex64>::identity(d, d) * c(eps),
            self_adjoint: self.self_adjoint,
        }
    }

    /// Largest entry modulus of `self − other`.
    pub fn distance(&self, other: &Superoperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }

    /// Operator norm on `L_2(τ)`: largest singular value of the matrix.
    pub fn norm_2to2(&self) -> f64 {
        self.matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0, |m, v| m.max(*v))
    }

    /// Choi matrix `Σ_ij E_ij ⊗ T(E_ij)`, indexed `(i·n+a, j·n+b)`.
    pub fn choi_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n;
        DMatrix::from_fn(n * n, n * n, |r, s| {
            let (i, a) = (r / n, r % n);
            let (j, b) = (s / n, s % n);
            self.matrix[(a * n + b, i * n + j)]
        })
    }

    pub fn to_literal(&self) -> SuperoperatorLiteral {
        SuperoperatorLiteral {
            n: self.n,
            matrix: (0..self.matrix.nrows())
                .map(|i| {
                    (0..self.matrix.ncols())
                        .map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im])
                        .collect()
                })
                .collect(),
            basis: MATRIX_UNITS.into(),
        }
    }

    pub fn eigendecompose(&self) -> Result<SpectralDecomposition> {
        eigendecompose(self)
    }
}

const MATRIX_UNITS: &str = "matrix-units";

/// `{ "n": int, "matrix": [[[re, im], ...], ...], "basis": "matrix-units" }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperoperatorLiteral {
    pub n: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default = "default_basis")]
    pub basis: String,
}

fn default_basis() -> String {
    MATRIX_UNITS.into()
}

impl SuperoperatorLiteral {
    pub fn to_superoperator(&self) -> Result<Superoperator> {
        if self.basis != MATRIX_UNITS {
            return Err(Error::UnsupportedParameter(format!(
                "superoperator basis {:?}",
                self.basis
            )));
        }
        let d = self.n * self.n;
        if self.matrix.len() != d {
            return Err(Error::Dimension {
                expected: d,
                found: self.matrix.len(),
            });
        }
        if let Some(row) = self.matrix.iter().find(|r| r.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                found: row.len(),
            });
        }
        let m = DMatrix::from_fn(d, d, |i, j| {
            Complex64::new(self.matrix[i][j][0], self.matrix[i][j][1])
        });
        Superoperator::from_matrix(self.n, m)
    }
}

/// Orthonormal eigenbasis of a self-adjoint superoperator.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    n: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
    kernel_dim: usize,
}

pub fn eigendecompose(op: &Superoperator) -> Result<SpectralDecomposition> {
    let defect = op.adjoint_defect();
    if defect > SPECTRAL_TOL {
        return Err(Error::Symmetry { defect });
    }
    let (eigenvalues, eigenvectors) = sorted_eigen(&op.symmetrized().matrix);
    let kernel_dim = eigenvalues.iter().filter(|v| v.abs() <= SPECTRAL_TOL).count();
    Ok(SpectralDecomposition {
        n: op.n,
        eigenvalues,
        eigenvectors,
        kernel_dim,
    })
}

/// `L^{iu}` restricted to `range(I − P₀)`, zero on the kernel.
#[derive(Debug, Clone)]
pub struct ImaginaryPower {
    pub operator: Superoperator,
    pub kernel_dim: usize,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn eigen_elements(&self) -> Vec<Element> {
        (0..self.eigenvalues.len())
            .map(|k| {
                Element::from_vector(&self.eigenvectors.column(k).into_owned(), self.n)
                    .expect("eigenvector length n²")
            })
            .collect()
    }

    pub fn is_kernel(&self, k: usize) -> bool {
        self.eigenvalues[k].abs() <= SPECTRAL_TOL
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Smallest eigenvalue outside the kernel, if any.
    pub fn spectral_gap(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|v| v.abs() > SPECTRAL_TOL)
    }

    /// Checks that the operator is positive semidefinite up to tolerance.
    pub fn require_positive(&self) -> Result<()> {
        if self.min_eigenvalue() < -SPECTRAL_TOL {
            return Err(Error::Positivity {
                min_eigenvalue: self.min_eigenvalue(),
            });
        }
        Ok(())
    }

    /// Σ λ_k |e_k⟩⟨e_k|
    pub fn reconstruct(&self) -> Superoperator {
        self.function(|v| v).expect("identity symbol is finite")
    }

    /// Real functional calculus m(L) = Σ m(λ_k) P_k.
    pub fn function(&self, m: impl Fn(f64) -> f64) -> Result<Superoperator> {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|v| m(*v)).collect();
        if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                eigenvalue: self.eigenvalues[k],
            });
        }
        Ok(Superoperator {
            n: self.n,
            matrix: assemble(&self.eigenvectors, &vals),
            self_adjoint: true,
        })
    }

    /// Complex functional calculus.
    pub fn function_complex(&self, m: impl Fn(f64) -> Complex64) -> Result<Superoperator> {
        let vals: Vec<Complex64> = self.eigenvalues.iter().map(|v| m(*v)).collect();
        if let Some(k) = vals.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Evaluation {
                eigenvalue: self.eigenvalues[k],
            });
        }
        let mut scaled = self.eigenvectors.clone();
        for (j, v) in vals.iter().enumerate() {
            for e in scaled.column_mut(j).iter_mut() {
                *e *= *v;
            }
        }
        Superoperator::from_matrix(self.n, scaled * self.eigenvectors.adjoint())
    }

    /// Functional calculus on `range(I − P₀)`, zero on the kernel.
    pub fn function_off_kernel(&self, m: impl Fn(f64) -> Complex64) -> Result<Superoperator> {
        self.function_complex(|v| if v.abs() <= SPECTRAL_TOL { Complex64::new(0.0, 0.0) } else { m(v) })
    }

    /// m(L)x = Σ m(λ_k) P_k x.
    pub fn apply_function(&self, m: impl Fn(f64) -> f64, x: &Element) -> Result<Element> {
        self.function(m)?.apply(x)
    }

    /// Orthogonal projection P₀ onto the kernel.
    pub fn kernel_projection(&self) -> Superoperator {
        self.function(|v| if v.abs() <= SPECTRAL_TOL { 1.0 } else { 0.0 })
            .expect("indicator is finite")
    }

    pub fn imaginary_power(&self, u: f64) -> Result<ImaginaryPower> {
        self.require_positive()?;
        let operator = self.function_off_kernel(|v| Complex64::new(0.0, u * v.ln()).exp())?;
        Ok(ImaginaryPower {
            operator,
            kernel_dim: self.kernel_dim,
        })
    }

    /// λ^α by the spectral theorem (zero on the kernel).
    pub fn fractional_power(&self, alpha: f64) -> Result<Superoperator> {
        self.require_positive()?;
        self.function(|v| if v.abs() <= SPECTRAL_TOL { 0.0 } else { v.max(0.0).powf(alpha) })
    }
}

/// Free-function form of [`SpectralDecomposition::apply_function`].
pub fn apply_function(m: impl Fn(f64) -> f64, op: &Superoperator, x: &Element) -> Result<Element> {
    eigendecompose(op)?.apply_function(m, x)
}

pub fn imaginary_power(op: &Superoperator, u: f64) -> Result<ImaginaryPower> {
    eigendecompose(op)?.imaginary_power(u)
}

/// Options for [`fractional_power_resolvent`].
#[derive(Debug, Clone, Copy)]
pub struct ResolventOptions {
    pub abs_tol: f64,
    pub max_nodes: usize,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_nodes: 1 << 16,
        }
    }
}

/// L^α = (sin απ / π) ∫₀^∞ s^{α−1} (sI + L)^{-1} L ds, computed with
/// resolvent solves under `s = e^w`.
///
/// The kernel is handled by adding P₀ to L (making it invertible) and
/// projecting the result back onto `range(I − P₀)`. Beyond
/// `S = 10³ max(1, ‖L‖)` the Neumann series of the resolvent is integrated
/// in closed form, which keeps α close to 1 tractable.
pub fn fractional_power_resolvent(
    op: &Superoperator,
    alpha: f64,
    opts: ResolventOptions,
) -> Result<Superoperator> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("fractional order must lie in (0, 1), got {alpha}")));
    }
    let spec = eigendecompose(op)?;
    spec.require_positive()?;
    let n = op.n;
    let d = n * n;
    let p0 = spec.kernel_projection();
    let lt = op.symmetrized().add(&p0)?;
    let l = lt.matrix.clone();
    let id = DMatrix::<Complex64>::identity(d, d);

    let norm = lt.norm_2to2();
    let big_s = 1e3 * norm.max(1.0);
    let gap = spec.spectral_gap().unwrap_or(1.0).min(1.0);

    let mut failure = None;
    let integrand = |w: f64| -> DMatrix<Complex64> {
        let s = w.exp();
        let shifted = &l + &id * c(s);
        match shifted.lu().solve(&l) {
            Some(x) => x * c((alpha * w).exp()),
            None => {
                failure = Some(s);
                DMatrix::from_element(d, d, c(f64::NAN))
            }
        }
    };
    let window = LineWindow {
        center: 0.5 * (gap.ln() + norm.max(1.0).ln()),
        half_width: 0.5 * (norm.max(1.0).ln() - gap.ln()) + 2.0,
        min: -700.0,
        max: big_s.ln(),
        max_piece: 2.0,
        tail_fraction: 1e-16,
        closed_min: false,
        closed_max: true,
    };
    let quad_opts = QuadOptions::abs(opts.abs_tol * PI / (alpha * PI).sin().max(1e-300)).with_max_evals(opts.max_nodes);
    let body = integrate_line(integrand, window, quad_opts, "fractional power resolvent integral");
    if let Some(s) = failure {
        return Err(Error::Domain(format!("singular resolvent at s = {s:e}")));
    }
    let mut total = body?.value;

    // ∫_S^∞ s^{α−1} Σ_{k≥1} (−1)^{k+1} L^k s^{−k} ds
    let mut power = l.clone();
    let mut ratio = c(1.0);
    for k in 1..200 {
        let coef = (big_s.powf(alpha - k as f64)) / (k as f64 - alpha);
        let term = &power * c(coef) * ratio;
        let size = max_abs(&term);
        total += term;
        if size < 1e-18 {
            break;
        }
        power = &power * &l;
        ratio = -ratio;
    }

    let scaled = total * c((alpha * PI).sin() / PI);
    let range = &id - p0.matrix();
    let projected = &range * scaled * &range;
    Superoperator::from_matrix(n, projected).map(|s| s.symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use approx::assert_relative_eq;

    fn depolarizing(n: usize) -> Superoperator {
        Superoperator::from_map(n, |x| {
            x.sub(&Element::identity(n).scale_complex(x.trace())).unwrap()
        })
        .unwrap()
    }

    fn random_generator(seed: u64, n: usize) -> Superoperator {
        let mut r = random::rng(seed);
        let g = random::ginibre(&mut r, n * n, n * n);
        Superoperator::self_adjoint(n, &g * g.adjoint() / c((n * n) as f64)).unwrap()
    }

    #[test]
    fn from_map_matches_vectorization() {
        let mut r = random::rng(4);
        let a = Element::new(random::ginibre(&mut r, 3, 3)).unwrap();
        let op = Superoperator::from_map(3, |x| a.mul(x).unwrap()).unwrap();
        let x = Element::new(random::ginibre(&mut r, 3, 3)).unwrap();
        let direct = a.mul(&x).unwrap();
        assert!((op.apply(&x).unwrap().matrix() - direct.matrix()).norm() < 1e-13);
    }

    #[test]
    fn depolarizing_spectrum() {
        let spec = depolarizing(2).eigendecompose().unwrap();
        let ev = spec.eigenvalues();
        assert!(ev[0].abs() < 1e-12);
        for v in &ev[1..] {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-12);
        }
        assert_eq!(spec.kernel_dim(), 1);
    }

    #[test]
    fn schur_spectrum_is_symbol_entries() {
        let a = [0.0, 1.5, 0.3, 2.0];
        let op = Superoperator::from_map(2, |x| {
            let mut m = x.matrix().clone();
            for i in 0..2 {
                for j in 0..2 {
                    m[(i, j)] *= a[i * 2 + j];
                }
            }
            Element::new(m).unwrap()
        });
        // symbol need not be symmetric for a diagonal superoperator
        let spec = op.unwrap().eigendecompose().unwrap();
        let mut expected = a.to_vec();
        expected.sort_by(f64::total_cmp);
        for (v, e) in spec.eigenvalues().iter().zip(expected) {
            assert_relative_eq!(*v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_map_kernel() {
        let spec = Superoperator::zero(3).eigendecompose().unwrap();
        assert_eq!(spec.kernel_dim(), 9);
        assert!(spec.eigenvalues().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn non_self_adjoint_rejected() {
        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        m[(0, 1)] = c(1.0);
        let op = Superoperator::from_matrix(2, m).unwrap();
        assert!(!op.is_self_adjoint());
        assert!(matches!(op.eigendecompose(), Err(Error::Symmetry { .. })));
    }

    #[test]
    fn reconstruction() {
        let op = random_generator(11, 3);
        let spec = op.eigendecompose().unwrap();
        assert!(spec.reconstruct().distance(&op) < 1e-10);
        let elems = spec.eigen_elements();
        for (a, ea) in elems.iter().enumerate() {
            for (b, eb) in elems.iter().enumerate() {
                let ip = ea.inner(eb).unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - c(expected)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn calculus_examples() {
        let op = random_generator(12, 2);
        let spec = op.eigendecompose().unwrap();
        let one = spec.function(|_| 1.0).unwrap();
        assert!(one.distance(&Superoperator::identity(2)) < 1e-12);
        let t = 0.7;
        let heat = spec.function(|v| (-t * v).exp()).unwrap();
        let direct = (op.matrix() * c(-t)).exp();
        assert!(max_abs(&(heat.matrix() - direct)) < 1e-10);
        let dep = depolarizing(2);
        let sq = dep.eigendecompose().unwrap().function(|v| v * v).unwrap();
        assert!(sq.distance(&dep) < 1e-12);
        let err = spec.function(|v| if v > 0.5 { f64::NAN } else { v }).unwrap_err();
        assert!(matches!(err, Error::Evaluation { eigenvalue } if eigenvalue > 0.5));
    }

    #[test]
    fn imaginary_power_examples() {
        let op = random_generator(13, 2).shifted(0.1);
        let spec = op.eigendecompose().unwrap();
        for u in [0.5, 1.0, 7.0] {
            let p = spec.imaginary_power(u).unwrap();
            assert_eq!(p.kernel_dim, 0);
            assert_relative_eq!(p.operator.norm_2to2(), 1.0, epsilon = 1e-12);
        }
        let zero = spec.imaginary_power(0.0).unwrap();
        assert!(zero.operator.distance(&Superoperator::identity(2)) < 1e-12);

        let mut m = DMatrix::<Complex64>::zeros(4, 4);
        for (k, v) in [1.0, 2.0, 1.0, 2.0].iter().enumerate() {
            m[(k, k)] = c(*v);
        }
        let op = Superoperator::from_matrix(2, m).unwrap();
        let p = imaginary_power(&op, 3.0).unwrap().operator;
        let want = Complex64::new(0.0, 3.0 * 2f64.ln()).exp();
        assert!((p.matrix()[(1, 1)] - want).norm() < 1e-13);
        assert!((p.matrix()[(0, 0)] - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn resolvent_matches_spectral_powers() {
        let mut m = DMatrix::<Complex64>::zeros(1, 1);
        m[(0, 0)] = c(4.0);
        let scalar = Superoperator::from_matrix(1, m).unwrap();
        let r = fractional_power_resolvent(&scalar, 0.5, ResolventOptions::default()).unwrap();
        assert!((r.matrix()[(0, 0)] - c(2.0)).norm() < 1e-6);

        let mut m = DMatrix::<Complex64>::zeros(1, 1);
        m[(0, 0)] = c(2.0);
        let scalar = Superoperator::from_matrix(1, m).unwrap();
        let r = fractional_power_resolvent(&scalar, 0.999, ResolventOptions::default()).unwrap();
        assert!((r.matrix()[(0, 0)].re - 2f64.powf(0.999)).abs() < 1e-5);

        let dep = depolarizing(2);
        for alpha in [0.3, 0.8] {
            let r = fractional_power_resolvent(&dep, alpha, ResolventOptions::default()).unwrap();
            assert!(r.distance(&dep) < 1e-8);
        }
    }

    #[test]
    fn choi_of_identity_is_rank_one() {
        let choi = Superoperator::identity(2).choi_matrix();
        let (vals, _) = sorted_eigen(&choi);
        assert_relative_eq!(vals[3], 2.0, epsilon = 1e-12);
        assert!(vals[..3].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn literal_roundtrip() {
        let op = random_generator(3, 2);
        let lit = op.to_literal();
        let back: SuperoperatorLiteral =
            serde_json::from_str(&serde_json::to_string(&lit).unwrap()).unwrap();
        assert_eq!(back.to_superoperator().unwrap().matrix(), op.matrix());
    }
}
