//! Seeded random matrices for sampling and tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for sub-task `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let g = ginibre(rng, n, n);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// G G* / n: positive semidefinite, almost surely invertible.
pub fn positive<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let g = ginibre(rng, n, n);
    let p = &g * g.adjoint() / Complex64::new(n as f64, 0.0);
    (&p + p.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase fix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    let qr = ginibre(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Unit vector uniformly distributed on the complex sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> nalgebra::DVector<Complex64> {
    let v = nalgebra::DVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_is_unitary() {
        let mut r = rng(3);
        let u = unitary(&mut r, 5);
        let err = (&u * u.adjoint() - DMatrix::identity(5, 5)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = stream(9, 1).sample(StandardNormal);
        let b: f64 = stream(9, 1).sample(StandardNormal);
        let c: f64 = stream(9, 2).sample(StandardNormal);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
