//! Brackets for the factorization norm
//! `‖(x_k)‖_{L_p(ℓ_∞)} = inf ‖a‖_{2p} sup_k ‖y_k‖_∞ ‖b‖_{2p}`, `x_k = a y_k b`.
//!
//! The lower bound is the largest single `‖x_k‖_p`. The upper bound is the
//! smaller of `Σ ‖x_k‖_p` and the best symmetric factorization found:
//! with `A = a² > 0` the cost `‖A‖_p · max_k ‖A^{-1/2} x_k A^{-1/2}‖_∞`
//! is attained by an explicit factorization, so every candidate is a valid
//! upper bound.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::mellin::{mellin_transform, truncation_for};
use super::MultiplierSpec;
use crate::error::{Error, Result};
use crate::opnorm::{operator_norm, NormMode, NormOptions};
use crate::random;
use crate::spectral::Superoperator;
use crate::tracial::{assemble, sorted_eigen, Element};

pub const RIDGE: f64 = 1e-10;
const SEARCH_STEPS: usize = 300;
const SLACK: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct MaximalFamily {
    t_grid: Vec<f64>,
    elements: Vec<Element>,
    p: f64,
}

impl MaximalFamily {
    pub fn new(t_grid: Vec<f64>, elements: Vec<Element>, p: f64) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Domain("maximal family must be nonempty".into()));
        }
        if t_grid.len() != elements.len() {
            return Err(Error::Validation(format!(
                "family has {} elements for {} grid points",
                elements.len(),
                t_grid.len()
            )));
        }
        let n = elements[0].dim();
        if let Some(e) = elements.iter().find(|e| e.dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: e.dim(),
            });
        }
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("exponent must be at least 1, got {p}")));
        }
        Ok(Self { t_grid, elements, p })
    }

    /// Family indexed by its position.
    pub fn from_elements(elements: Vec<Element>, p: f64) -> Result<Self> {
        let grid = (1..=elements.len()).map(|k| k as f64).collect();
        Self::new(grid, elements, p)
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub sum_bound: f64,
    pub factorization: f64,
    pub ridge: f64,
}

fn herm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn spectral_map(a: &DMatrix<Complex64>, f: impl Fn(f64) -> f64) -> DMatrix<Complex64> {
    let (vals, vecs) = sorted_eigen(&herm(a));
    let d: Vec<f64> = vals.into_iter().map(f).collect();
    assemble(&vecs, &d)
}

fn power_norm(vals: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return vals.iter().cloned().fold(0.0, f64::max);
    }
    let top = vals.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    top * (vals.iter().map(|v| (v / top).powf(p)).sum::<f64>() / vals.len() as f64).powf(1.0 / p)
}

fn op_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

struct Problem<'a> {
    xs: &'a [DMatrix<Complex64>],
    p: f64,
    ridge: f64,
}

impl Problem<'_> {
    /// Regularized A and its factorization cost.
    fn cost(&self, a: &DMatrix<Complex64>) -> (f64, DMatrix<Complex64>) {
        let (vals, vecs) = sorted_eigen(&herm(a));
        let floor = self.ridge * vals.iter().cloned().fold(0.0, f64::max).max(1.0);
        let vals: Vec<f64> = vals.into_iter().map(|v| v.max(0.0) + floor).collect();
        let inv_sqrt = assemble(&vecs, &vals.iter().map(|v| v.powf(-0.5)).collect::<Vec<_>>());
        let worst = self
            .xs
            .iter()
            .map(|x| op_norm(&(&inv_sqrt * x * &inv_sqrt)))
            .fold(0.0, f64::max);
        (power_norm(&vals, self.p) * worst, assemble(&vecs, &vals))
    }

    /// A^{1/2} max(1, A^{-1/2} P A^{-1/2}) A^{1/2} ≥ A, P.
    fn upper_envelope(&self, a: &DMatrix<Complex64>, pk: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (vals, vecs) = sorted_eigen(&herm(a));
        let floor = self.ridge * vals.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let vals: Vec<f64> = vals.into_iter().map(|v| v.max(0.0) + floor).collect();
        let sq = assemble(&vecs, &vals.iter().map(|v| v.sqrt()).collect::<Vec<_>>());
        let isq = assemble(&vecs, &vals.iter().map(|v| v.powf(-0.5)).collect::<Vec<_>>());
        let inner = spectral_map(&(&isq * pk * &isq), |v| v.max(1.0));
        herm(&(&sq * inner * &sq))
    }
}

/// Lower and upper bounds for the L_p(ℓ_∞) norm of the family.
pub fn ellinf_norm_bracket(family: &MaximalFamily) -> Result<NormBracket> {
    ellinf_norm_bracket_seeded(family, 0)
}

pub fn ellinf_norm_bracket_seeded(family: &MaximalFamily, seed: u64) -> Result<NormBracket> {
    let p = family.p;
    let norms = family.elements.iter().map(|x| x.lp_norm(p)).collect::<Result<Vec<_>>>()?;
    let lower = norms.iter().cloned().fold(0.0, f64::max);
    let sum_bound: f64 = norms.iter().sum();
    if lower == 0.0 {
        return Ok(NormBracket {
            lower: 0.0,
            upper: 0.0,
            sum_bound: 0.0,
            factorization: 0.0,
            ridge: RIDGE,
        });
    }
    let n = family.elements[0].dim();
    let xs: Vec<DMatrix<Complex64>> = family.elements.iter().map(|x| x.matrix().clone()).collect();
    let problem = Problem { xs: &xs, p, ridge: RIDGE };
    // positive envelopes of each x_k
    let ps: Vec<DMatrix<Complex64>> = family
        .elements
        .iter()
        .map(|x| herm(&((x.abs().matrix() + x.adjoint().abs().matrix()) * Complex64::new(0.5, 0.0))))
        .collect();

    let mut candidates: Vec<DMatrix<Complex64>> = vec![DMatrix::identity(n, n)];
    candidates.push(ps.iter().fold(DMatrix::zeros(n, n), |acc, pk| acc + pk));
    for r in [2.0, 4.0, 8.0, 16.0] {
        let s = ps.iter().fold(DMatrix::zeros(n, n), |acc, pk| acc + spectral_map(pk, |v| v.max(0.0).powf(r)));
        candidates.push(spectral_map(&s, |v| v.max(0.0).powf(1.0 / r)));
    }
    for order in [false, true] {
        let seq: Vec<&DMatrix<Complex64>> = if order { ps.iter().rev().collect() } else { ps.iter().collect() };
        let mut b = seq[0].clone();
        for pk in &seq[1..] {
            b = problem.upper_envelope(&b, pk);
        }
        candidates.push(b);
    }
    let (mut best, mut a) = candidates
        .iter()
        .map(|c| problem.cost(c))
        .fold((f64::INFINITY, DMatrix::identity(n, n)), |acc, c| if c.0 < acc.0 { c } else { acc });

    // local search A ← A^{1/2} e^{δH} A^{1/2}
    let mut rng = random::rng(seed);
    let mut delta = 0.25;
    let mut misses = 0;
    for _ in 0..SEARCH_STEPS {
        let h = random::hermitian(&mut rng, n);
        let scale = op_norm(&h).max(1e-300);
        let step = spectral_map(&h, |v| (delta * v / scale).exp());
        let sq = spectral_map(&a, |v| v.max(0.0).sqrt());
        let trial = &sq * step * &sq;
        let (c, reg) = problem.cost(&trial);
        if c < best {
            best = c;
            a = reg;
            misses = 0;
        } else {
            misses += 1;
            if misses >= 10 {
                delta *= 0.5;
                misses = 0;
                if delta < 1e-4 {
                    break;
                }
            }
        }
    }

    // the true norm is at least `lower`; clamp rounding below it
    let upper = sum_bound.min(best).max(lower);
    Ok(NormBracket {
        lower,
        upper,
        sum_bound,
        factorization: best,
        ridge: RIDGE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximalCheck {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub exponent_relation: String,
    pub bracket: NormBracket,
    pub x_norm: f64,
    pub hypothesis_integral: Option<f64>,
    pub constant: Option<f64>,
    pub u_max: Option<f64>,
    pub bound: Option<f64>,
    pub within_slack: Option<bool>,
    pub hypothesis_failed: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct MaximalOptions {
    pub u_step: f64,
    pub norm: NormOptions,
}

impl Default for MaximalOptions {
    fn default() -> Self {
        Self {
            u_step: 0.25,
            norm: NormOptions {
                restarts: 16,
                ..NormOptions::default()
            },
        }
    }
}

/// Builds `(t^α m(tL) x)_t`, brackets its L_q(ℓ_∞) norm and compares the
/// upper end with `(1/2π) ∫ |[𝔐_α m](u)| |||L^{iu−α}|||_{p→q} du · ‖x‖_p`
/// up to a slack of 10.
#[allow(clippy::too_many_arguments)]
pub fn maximal_operator_check(
    m: &MultiplierSpec,
    alpha: f64,
    l: &Superoperator,
    x: &Element,
    p: f64,
    q: f64,
    t_grid: &[f64],
    opts: &MaximalOptions,
) -> Result<MaximalCheck> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("α must be nonnegative, got {alpha}")));
    }
    if x.dim() != l.n() {
        return Err(Error::Dimension {
            expected: l.n(),
            found: x.dim(),
        });
    }
    let spec = l.eigendecompose()?;
    spec.require_positive()?;
    let elements = t_grid
        .iter()
        .map(|&t| {
            let f = spec.function(|v| t.powf(alpha) * m.eval(t * v.max(0.0)))?;
            f.apply(x)
        })
        .collect::<Result<Vec<_>>>()?;
    let family = MaximalFamily::new(t_grid.to_vec(), elements, q)?;
    let bracket = ellinf_norm_bracket_seeded(&family, opts.norm.seed)?;
    let x_norm = x.lp_norm(p)?;

    let mut record = MaximalCheck {
        alpha,
        p,
        q,
        exponent_relation: "1 - 1/r = 1/p - 1/q = alpha/nu".into(),
        bracket,
        x_norm,
        hypothesis_integral: None,
        constant: None,
        u_max: None,
        bound: None,
        within_slack: None,
        hypothesis_failed: None,
    };
    if alpha > 0.0 && spec.kernel_dim() > 0 {
        record.hypothesis_failed = Some("L^{iu-alpha} is undefined on the kernel of L".into());
        return Ok(record);
    }
    let transform = |u: f64| mellin_transform(m, alpha, u);
    if let Err(e) = transform(0.0) {
        match e {
            Error::Divergence { .. } => {
                record.hypothesis_failed = Some(e.to_string());
                return Ok(record);
            }
            other => return Err(other),
        }
    }
    let (u_max, _tail, ok) = truncation_for(|u| transform(u).map(|v| v.norm()))?;
    if !ok {
        record.hypothesis_failed = Some("Mellin transform of the symbol does not decay within |u| <= 200".into());
        return Ok(record);
    }
    let steps = (2.0 * u_max / opts.u_step).round() as usize;
    let us: Vec<f64> = (0..=steps).map(|k| -u_max + 2.0 * u_max * k as f64 / steps as f64).collect();
    let values = us
        .par_iter()
        .map(|&u| {
            let mag = transform(u)?.norm();
            if mag == 0.0 {
                return Ok(0.0);
            }
            let power = spec.function_off_kernel(|v| Complex64::new(-alpha * v.ln(), u * v.ln()).exp())?;
            Ok(mag * operator_norm(&power, p, q, NormMode::Auto, &opts.norm)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let h = 2.0 * u_max / steps as f64;
    let integral = h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[steps]));
    let constant = integral / (2.0 * std::f64::consts::PI);
    let bound = SLACK * constant * x_norm;
    record.hypothesis_integral = Some(integral);
    record.constant = Some(constant);
    record.u_max = Some(u_max);
    record.bound = Some(bound);
    record.within_slack = Some(record.bracket.upper <= bound * (1.0 + 1e-12));
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{cosine_symbol, fourier};
    use approx::assert_relative_eq;
    use rand::Rng;

    fn diag(v: &[f64]) -> Element {
        Element::from_real_diagonal(v)
    }

    #[test]
    fn singleton_is_exact() {
        let mut rng = random::rng(2);
        let x = Element::new(random::ginibre(&mut rng, 3, 3)).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let b = ellinf_norm_bracket(&MaximalFamily::from_elements(vec![x.clone()], p).unwrap()).unwrap();
            let v = x.lp_norm(p).unwrap();
            assert!((b.lower - v).abs() <= 1e-12 * v && (b.upper - v).abs() <= 1e-12 * v);
        }
    }

    #[test]
    fn commuting_family_matches_envelope() {
        let mut rng = random::rng(5);
        let xs: Vec<Vec<f64>> = (0..5).map(|_| (0..4).map(|_| rng.random_range(0.0..2.0)).collect()).collect();
        let env: Vec<f64> = (0..4).map(|i| xs.iter().map(|x| x[i]).fold(0.0, f64::max)).collect();
        for p in [1.0, 2.0, 4.0] {
            let fam = MaximalFamily::from_elements(xs.iter().map(|x| diag(x)).collect(), p).unwrap();
            let b = ellinf_norm_bracket(&fam).unwrap();
            let oracle = (env.iter().map(|v| v.powf(p)).sum::<f64>() / 4.0).powf(1.0 / p);
            assert_relative_eq!(b.upper, oracle, max_relative = 1e-8);
            assert!(b.lower <= b.upper);
        }
    }

    #[test]
    fn orthogonal_rank_one() {
        let fam = MaximalFamily::from_elements(vec![diag(&[1.0, 0.0]), diag(&[0.0, 1.0])], 2.0).unwrap();
        let b = ellinf_norm_bracket(&fam).unwrap();
        assert!(b.lower <= b.upper && b.upper <= b.sum_bound + 1e-15);
        assert_relative_eq!(b.upper, 1.0, max_relative = 1e-8);
        let v = Element::new(DMatrix::from_fn(2, 2, |_, _| Complex64::new(0.5, 0.0))).unwrap();
        let w = Element::new(DMatrix::from_fn(2, 2, |i, j| Complex64::new(if i == j { 0.5 } else { -0.5 }, 0.0))).unwrap();
        let b = ellinf_norm_bracket(&MaximalFamily::from_elements(vec![v, w], 2.0).unwrap()).unwrap();
        assert!(b.lower <= b.upper && b.upper <= b.sum_bound + 1e-15);
    }

    #[test]
    fn family_validation() {
        assert!(MaximalFamily::from_elements(vec![], 2.0).is_err());
        assert!(matches!(
            MaximalFamily::from_elements(vec![diag(&[1.0]), diag(&[1.0, 2.0])], 2.0),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn maximal_checks() {
        let l = fourier(4, &cosine_symbol(4)).unwrap();
        let grid = crate::log_space(1e-2, 1e2, 9);
        let opts = MaximalOptions::default();
        let zero = MultiplierSpec::builtin("zero").unwrap();
        let x = diag(&[3.0, 1.0, 0.5, 0.2]);
        let r = maximal_operator_check(&zero, 0.0, &l, &x, 2.0, 2.0, &grid, &opts).unwrap();
        assert_eq!((r.bracket.lower, r.bracket.upper), (0.0, 0.0));

        let heat = MultiplierSpec::builtin("exp-decay").unwrap();
        let one = Element::identity(4);
        let r = maximal_operator_check(&heat, 0.0, &l, &one, 2.0, 2.0, &grid, &opts).unwrap();
        assert_relative_eq!(r.bracket.lower, 1.0, max_relative = 1e-12);
        assert_relative_eq!(r.bracket.upper, 1.0, max_relative = 1e-12);
        assert!(r.hypothesis_failed.is_some());

        // diagonal subalgebra is invariant: the classical pointwise sup
        let r = maximal_operator_check(&heat, 0.0, &l, &x, 2.0, 2.0, &grid, &opts).unwrap();
        let spec = l.eigendecompose().unwrap();
        let mut env = vec![0.0f64; 4];
        for &t in &grid {
            let y = spec.apply_function(|v| (-t * v).exp(), &x).unwrap();
            for (i, e) in env.iter_mut().enumerate() {
                *e = e.max(y.matrix()[(i, i)].re);
            }
        }
        let oracle = (env.iter().map(|v| v * v).sum::<f64>() / 4.0).sqrt();
        assert_relative_eq!(r.bracket.upper, oracle, max_relative = 1e-6);
    }

    #[test]
    fn shifted_generator_hypothesis() {
        let l = fourier(3, &cosine_symbol(3)).unwrap().shifted(0.5);
        let grid = crate::log_space(1e-2, 1e2, 7);
        let heat = MultiplierSpec::builtin("exp-decay").unwrap();
        let x = diag(&[2.0, 1.0, 0.5]);
        let r = maximal_operator_check(&heat, 0.5, &l, &x, 2.0, 2.0, &grid, &MaximalOptions::default()).unwrap();
        assert!(r.hypothesis_failed.is_none());
        assert!(r.within_slack.unwrap(), "{r:?}");
    }
}
