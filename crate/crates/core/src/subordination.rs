//! One-sided stable densities `f_{t,α}` (Laplace transform `e^{-t z^α}`)
//! and the subordinated semigroups `T_{t,α} = ∫ f_{t,α}(s) T_s ds`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate_line, LineWindow, QuadOptions};
use crate::special::ln_gamma;
use crate::spectral::{Superoperator, SPECTRAL_TOL};
use crate::tracial::assemble;

pub const TALBOT_NODES: usize = 32;
const NORMALIZATION_TOL: f64 = 1e-6;
const SERIES_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationMethod {
    ClosedFormHalf,
    ContourInversion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinatorDensity {
    alpha: f64,
    t: f64,
    method: EvaluationMethod,
    nodes: usize,
}

impl SubordinatorDensity {
    /// Closed form at α = 1/2, contour inversion otherwise.
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        let method = if alpha == 0.5 {
            EvaluationMethod::ClosedFormHalf
        } else {
            EvaluationMethod::ContourInversion
        };
        Self::with_method(alpha, t, method)
    }

    pub fn with_method(alpha: f64, t: f64, method: EvaluationMethod) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("subordination order must lie in (0, 1), got {alpha}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("subordinator time must be positive, got {t}")));
        }
        if method == EvaluationMethod::ClosedFormHalf && alpha != 0.5 {
            return Err(Error::UnsupportedParameter(format!("closed form exists only for α = 1/2, got {alpha}")));
        }
        Ok(Self {
            alpha,
            t,
            method,
            nodes: TALBOT_NODES,
        })
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes.max(4);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn method(&self) -> EvaluationMethod {
        self.method
    }

    fn raw(&self, s: f64) -> f64 {
        match self.method {
            EvaluationMethod::ClosedFormHalf => {
                let t = self.t;
                t / (2.0 * PI.sqrt()) * s.powf(-1.5) * (-t * t / (4.0 * s)).exp()
            }
            EvaluationMethod::ContourInversion => self.contour(s),
        }
    }

    fn contour(&self, s: f64) -> f64 {
        if self.t * s.powf(-self.alpha) <= SERIES_THRESHOLD {
            self.tail_series(s)
        } else {
            self.talbot(s)
        }
    }

    /// Fixed Talbot rule for `e^{zs − t z^α}`; the contour scale is pushed
    /// out to the saddle on the positive axis when that exceeds `2M/(5s)`.
    fn talbot(&self, s: f64) -> f64 {
        let m = self.nodes;
        let (a, t) = (self.alpha, self.t);
        let saddle = (t * a / s).powf(1.0 / (1.0 - a));
        let r = (2.0 * m as f64 / (5.0 * s)).max(saddle);
        let g = |z: Complex64| (z * s - z.powf(a) * t).exp();
        let mut acc = 0.5 * g(Complex64::new(r, 0.0)).re;
        for k in 1..m {
            let th = k as f64 * PI / m as f64;
            let cot = th.cos() / th.sin();
            let z = Complex64::new(r * th * cot, r * th);
            let sigma = th + (th * cot - 1.0) * cot;
            acc += (g(z) * Complex64::new(1.0, sigma)).re;
        }
        acc * r / m as f64
    }

    /// Convergent expansion in `x = t s^{-α}`, used where the contour sum
    /// loses relative accuracy in the heavy tail:
    /// `π s f = Σ (−1)^{k+1} Γ(kα+1)/k! sin(kπα) x^k`.
    fn tail_series(&self, s: f64) -> f64 {
        let x = self.t * s.powf(-self.alpha);
        let mut sum = 0.0;
        let mut log_fact = 0.0;
        for k in 1..200 {
            let kf = k as f64;
            log_fact += kf.ln();
            let mag = (ln_gamma(Complex64::new(kf * self.alpha + 1.0, 0.0)).re - log_fact + kf * x.ln()).exp();
            let term = mag * (kf * PI * self.alpha).sin();
            sum += if k % 2 == 1 { term } else { -term };
            if mag < 1e-17 * sum.abs() {
                break;
            }
        }
        sum / (PI * s)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("density argument must be positive, got {s}")));
        }
        Ok(self.raw(s))
    }

    /// ∫₀^∞ g(s) f(s) ds over s = e^w.
    pub fn integrate(&self, g: impl Fn(f64) -> f64, abs_tol: f64, context: &str) -> Result<f64> {
        let t_scale = self.t.powf(1.0 / self.alpha);
        let window = LineWindow {
            center: t_scale.ln(),
            half_width: 6.0,
            min: -700.0,
            max: 700.0,
            max_piece: 1.0,
            tail_fraction: 1e-14,
            closed_min: false,
            closed_max: false,
        };
        let opts = QuadOptions {
            abs_tol,
            rel_tol: 1e-13,
            max_evals: 1 << 16,
        };
        let r = integrate_line(
            |w: f64| {
                let s = w.exp();
                let gs = g(s);
                if gs == 0.0 { 0.0 } else { s * gs * self.raw(s) }
            },
            window,
            opts,
            context,
        )?;
        Ok(r.value)
    }

    pub fn normalization(&self) -> Result<f64> {
        self.integrate(|_| 1.0, 1e-10, "density normalization")
    }

    /// Errors when the unit-mass check fails by more than 1e-6.
    pub fn validated(self) -> Result<Self> {
        let mass = self.normalization()?;
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::accuracy("density normalization", (mass - 1.0).abs(), NORMALIZATION_TOL));
        }
        Ok(self)
    }
}

pub fn density_eval(d: &SubordinatorDensity, s: f64) -> Result<f64> {
    d.eval(s)
}

/// ∫ f_{1,α}(s) e^{-sλ} ds.
pub fn laplace_transform(alpha: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("λ must be nonnegative, got {lambda}")));
    }
    let d = SubordinatorDensity::new(alpha, 1.0)?;
    d.integrate(|s| (-s * lambda).exp(), 1e-10, "subordinator Laplace transform")
}

/// |∫ f_{1,α}(s) e^{-sλ} ds − e^{-λ^α}|.
pub fn verify_laplace(alpha: f64, lambda: f64) -> Result<f64> {
    Ok((laplace_transform(alpha, lambda)? - (-lambda.powf(alpha)).exp()).abs())
}

/// ∫ s^{-n} f_{1,α}(s) ds.
pub fn negative_moment(alpha: f64, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("moment order must be nonnegative, got {n}")));
    }
    let d = SubordinatorDensity::new(alpha, 1.0)?;
    d.integrate(|s| s.powf(-n), 1e-10, "negative moment")
}

/// T_{t,α} of the semigroup generated by `l`, one scalar quadrature per
/// distinct eigenvalue of `l`.
pub fn subordinate_semigroup(l: &Superoperator, alpha: f64, t: f64) -> Result<Superoperator> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let spec = l.eigendecompose()?;
    spec.require_positive()?;
    let d = SubordinatorDensity::new(alpha, 1.0)?;
    let scale = t.powf(1.0 / alpha);
    let mut values = Vec::with_capacity(spec.eigenvalues().len());
    let mut last: Option<(f64, f64)> = None;
    for (k, &lam) in spec.eigenvalues().iter().enumerate() {
        // λ^α amplifies round-off in the kernel
        let lam = if spec.is_kernel(k) { 0.0 } else { lam };
        let v = match last {
            Some((prev, v)) if (lam - prev).abs() <= SPECTRAL_TOL * prev.max(1.0) => v,
            _ => d.integrate(|s| (-s * scale * lam).exp(), 1e-10, "subordinated semigroup")?,
        };
        last = Some((lam, v));
        values.push(v);
    }
    let m = assemble(spec.eigenvectors(), &values);
    Superoperator::from_matrix(l.n(), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{depolarizing, semigroup_at};
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_values() {
        let d = SubordinatorDensity::new(0.5, 1.0).unwrap();
        assert_relative_eq!(d.eval(1.0).unwrap(), (-0.25f64).exp() / (2.0 * PI.sqrt()), max_relative = 1e-15);
        assert!(d.eval(0.0).is_err());
        for t in [0.3, 1.0, 4.0] {
            let mass = SubordinatorDensity::new(0.5, t).unwrap().normalization().unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "t = {t}: {mass}");
        }
    }

    #[test]
    fn contour_matches_closed_form() {
        let exact = SubordinatorDensity::new(0.5, 1.0).unwrap();
        let contour = SubordinatorDensity::with_method(0.5, 1.0, EvaluationMethod::ContourInversion).unwrap();
        for s in crate::log_space(0.01, 100.0, 81) {
            let (a, b) = (exact.eval(s).unwrap(), contour.eval(s).unwrap());
            assert!(((a - b) / a).abs() < 1e-6, "s = {s}: {a} vs {b}");
        }
    }

    #[test]
    fn contour_densities_are_probability_densities() {
        for alpha in [0.3, 0.7] {
            let d = SubordinatorDensity::new(alpha, 1.0).unwrap().validated().unwrap();
            for s in crate::log_space(1e-2, 1e3, 40) {
                assert!(d.eval(s).unwrap() >= -1e-10);
            }
        }
    }

    #[test]
    fn laplace_identity() {
        assert!(verify_laplace(0.5, 1.0).unwrap() < 1e-6);
        assert!(verify_laplace(0.5, 0.0).unwrap() < 1e-8);
        for alpha in [0.3, 0.7] {
            for lambda in [0.5, 2.0, 10.0] {
                let e = verify_laplace(alpha, lambda).unwrap();
                assert!(e < 1e-6, "α = {alpha}, λ = {lambda}: {e}");
            }
        }
        assert!(verify_laplace(0.5, -1.0).is_err());
    }

    #[test]
    fn moments() {
        assert_relative_eq!(negative_moment(0.5, 1.0).unwrap(), 2.0, max_relative = 1e-6);
        assert_relative_eq!(negative_moment(0.5, 0.0).unwrap(), 1.0, max_relative = 1e-8);
        let m = negative_moment(0.3, 2.0).unwrap();
        // E S^{-p} = Γ(1 + p/α) / Γ(1 + p)
        let oracle = statrs::function::gamma::gamma(1.0 + 2.0 / 0.3) / statrs::function::gamma::gamma(3.0);
        assert_relative_eq!(m, oracle, max_relative = 1e-6);
    }

    #[test]
    fn subordinated_depolarizing() {
        let l = depolarizing(2).unwrap();
        // spectrum {0, 1}: T_{t,α} = P₀ + e^{-t}(I − P₀) for every α
        for alpha in [0.3, 0.5, 0.7] {
            let sub = subordinate_semigroup(&l, alpha, 1.3).unwrap();
            let plain = semigroup_at(&l, 1.3).unwrap();
            assert!(sub.distance(&plain) < 1e-6, "α = {alpha}: {}", sub.distance(&plain));
        }
        let near = subordinate_semigroup(&l, 0.5, 1e-6).unwrap();
        assert!(near.sub(&Superoperator::identity(2)).unwrap().norm_2to2() < 1e-4);
    }
}
