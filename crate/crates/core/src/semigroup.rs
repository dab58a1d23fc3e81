//! Symmetric Markov semigroups `T_t = e^{-tL}` built from generator
//! families, Markov diagnostics, and ultracontractivity profiles.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opnorm::{operator_norm, Certificate, NormMode, NormOptions};
use crate::random;
use crate::spectral::{SpectralDecomposition, Superoperator, SuperoperatorLiteral};
use crate::tracial::{sorted_eigen, Element};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// JSON form `{ "family": string, "params": {...}, "shift": number }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub family: String,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
    #[serde(default)]
    pub shift: f64,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DepolarizingParams {
    n: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchurParams {
    symbol: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FourierParams {
    m: usize,
    /// ψ(0), …, ψ(m−1); defaults to 1 − cos(2πk/m).
    #[serde(default)]
    psi: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CustomParams {
    superoperator: SuperoperatorLiteral,
}

fn params<T: serde::de::DeserializeOwned>(spec: &GeneratorSpec) -> Result<T> {
    serde_json::from_value(spec.params.clone())
        .map_err(|e| Error::Validation(format!("{} generator parameters: {e}", spec.family)))
}

impl GeneratorSpec {
    pub fn depolarizing(n: usize, shift: f64) -> Self {
        Self {
            family: "depolarizing".into(),
            params: serde_json::json!({ "n": n }),
            shift,
        }
    }

    pub fn schur(symbol: Vec<Vec<f64>>, shift: f64) -> Self {
        Self {
            family: "schur".into(),
            params: serde_json::json!({ "symbol": symbol }),
            shift,
        }
    }

    pub fn fourier(m: usize, psi: Option<Vec<f64>>, shift: f64) -> Self {
        Self {
            family: "fourier-finite-abelian-group".into(),
            params: serde_json::json!({ "m": m, "psi": psi }),
            shift,
        }
    }

    pub fn custom(op: &Superoperator, shift: f64) -> Self {
        Self {
            family: "custom".into(),
            params: serde_json::json!({ "superoperator": op.to_literal() }),
            shift,
        }
    }
}

/// Builds the generator `L` (plus `shift·I`) described by `spec`.
pub fn build_generator(spec: &GeneratorSpec) -> Result<Superoperator> {
    if !(spec.shift >= 0.0) || !spec.shift.is_finite() {
        return Err(Error::Validation(format!("shift must be a nonnegative number, got {}", spec.shift)));
    }
    let base = match spec.family.as_str() {
        "depolarizing" => {
            let p: DepolarizingParams = params(spec)?;
            depolarizing(p.n)?
        }
        "schur" => {
            let p: SchurParams = params(spec)?;
            schur(&p.symbol)?
        }
        "fourier-finite-abelian-group" | "fourier" => {
            let p: FourierParams = params(spec)?;
            let psi = match p.psi {
                Some(v) => v,
                None => cosine_symbol(p.m),
            };
            fourier(p.m, &psi)?
        }
        "custom" => {
            let p: CustomParams = params(spec)?;
            let op = p.superoperator.to_superoperator()?;
            if !op.is_self_adjoint() {
                return Err(Error::Validation(format!(
                    "custom generator is not symmetric for the trace inner product (defect {:e})",
                    op.adjoint_defect()
                )));
            }
            op.symmetrized()
        }
        other => {
            return Err(Error::Validation(format!("unknown generator family {other:?}")));
        }
    };
    let op = base.shifted(spec.shift);
    let spec_dec = op.eigendecompose()?;
    if spec_dec.min_eigenvalue() < -1e-10 {
        return Err(Error::Validation(format!(
            "generator is not positive (minimum eigenvalue {:e})",
            spec_dec.min_eigenvalue()
        )));
    }
    Ok(op)
}

/// L(x) = x − τ(x)1
pub fn depolarizing(n: usize) -> Result<Superoperator> {
    if n == 0 {
        return Err(Error::Validation("depolarizing generator needs n ≥ 1".into()));
    }
    Superoperator::from_map(n, |x| {
        x.sub(&Element::identity(n).scale_complex(x.trace())).expect("same dimension")
    })
}

/// Schur multiplier L(x) = A ∘ x with a real symmetric nonnegative symbol
/// of zero diagonal.
pub fn schur(symbol: &[Vec<f64>]) -> Result<Superoperator> {
    let n = symbol.len();
    if n == 0 || symbol.iter().any(|r| r.len() != n) {
        return Err(Error::Validation("schur symbol must be a nonempty square matrix".into()));
    }
    for i in 0..n {
        if symbol[i][i] != 0.0 {
            return Err(Error::Validation(format!(
                "schur symbol must have zero diagonal (entry ({i},{i}) = {})",
                symbol[i][i]
            )));
        }
        for j in 0..n {
            let a = symbol[i][j];
            if !(a >= 0.0) || !a.is_finite() {
                return Err(Error::Validation(format!("schur symbol entry ({i},{j}) = {a} is not a nonnegative number")));
            }
            if (a - symbol[j][i]).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::Validation(format!("schur symbol is not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(schur_unchecked(symbol))
}

/// Schur multiplier without symbol validation (diagonal superoperator).
pub fn schur_unchecked(symbol: &[Vec<f64>]) -> Superoperator {
    let n = symbol.len();
    let d = n * n;
    let mut m = DMatrix::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + j, i * n + j)] = c(symbol[i][j]);
        }
    }
    Superoperator::from_matrix(n, m).expect("n² × n² matrix")
}

/// Weyl operator X^a Z^b on C^m (X shift, Z clock).
fn weyl(m: usize, a: usize, b: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, m, |j, k| {
        if j == (k + a) % m {
            Complex64::from_polar(1.0, 2.0 * PI * ((b * k) % m) as f64 / m as f64)
        } else {
            c(0.0)
        }
    })
}

/// ψ(k) = 1 − cos(2πk/m), the default symbol on ℤ_m.
pub fn cosine_symbol(m: usize) -> Vec<f64> {
    (0..m).map(|k| 1.0 - (2.0 * PI * k as f64 / m as f64).cos()).collect()
}

/// Fourier multiplier of the group ℤ_m realized on M_m:
/// L(X^a Z^b) = ψ(b) X^a Z^b. Then T_t = Σ_c μ_t(c) Ad(X^c) with μ_t the
/// convolution semigroup of ψ, and on the diagonal subalgebra `ℓ_∞(ℤ_m)`
/// it is the classical Fourier multiplier `e^{-tψ}`.
pub fn fourier(m: usize, psi: &[f64]) -> Result<Superoperator> {
    if m == 0 || psi.len() != m {
        return Err(Error::Validation(format!(
            "fourier generator needs ψ on all {m} group elements, got {}",
            psi.len()
        )));
    }
    if psi[0].abs() > 1e-12 {
        return Err(Error::Validation(format!("ψ(identity) must vanish, got {}", psi[0])));
    }
    for k in 0..m {
        if !(psi[k] >= 0.0) {
            return Err(Error::Validation(format!("ψ({k}) = {} is negative", psi[k])));
        }
        if (psi[k] - psi[(m - k) % m]).abs() > 1e-12 * psi[k].abs().max(1.0) {
            return Err(Error::Validation(format!("ψ is not symmetric under inversion at {k}")));
        }
    }
    let basis: Vec<(usize, DMatrix<Complex64>)> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (b, weyl(m, a, b))))
        .collect();
    let op = Superoperator::from_map(m, |x| {
        let mut out = DMatrix::zeros(m, m);
        for (b, w) in &basis {
            if psi[*b] == 0.0 {
                continue;
            }
            // coefficient τ(W* x); the Weyl basis is orthonormal for τ
            let coef = w.iter().zip(x.matrix().iter()).map(|(wi, xi)| wi.conj() * xi).sum::<Complex64>() / m as f64;
            out += w * (coef * psi[*b]);
        }
        Element::new(out).expect("square")
    })?;
    Ok(op.symmetrized())
}

/// Cached spectral data for evaluating `T_t = e^{-tL}`.
#[derive(Debug, Clone)]
pub struct Semigroup {
    generator: Superoperator,
    spectrum: SpectralDecomposition,
}

impl Semigroup {
    pub fn new(generator: &Superoperator) -> Result<Self> {
        let spectrum = generator.eigendecompose()?;
        Ok(Self {
            generator: generator.clone(),
            spectrum,
        })
    }

    pub fn generator(&self) -> &Superoperator {
        &self.generator
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn n(&self) -> usize {
        self.generator.n()
    }

    pub fn at(&self, t: f64) -> Result<Superoperator> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("semigroup time must be nonnegative, got {t}")));
        }
        self.spectrum.function(|v| (-t * v).exp())
    }
}

/// e^{-tL} by spectral calculus.
pub fn semigroup_at(generator: &Superoperator, t: f64) -> Result<Superoperator> {
    Semigroup::new(generator)?.at(t)
}

/// Outcome of the Markov checks at one time.
#[derive(Debug, Clone, Serialize)]
pub struct MarkovPoint {
    pub t: f64,
    /// |||T_t|||_{∞→∞} estimate, condition (i).
    pub contraction_norm: f64,
    /// max τ(T_t x) − τ(x) over positive samples, condition (ii).
    pub trace_excess: f64,
    /// minimum Choi eigenvalue, condition (iii) (complete positivity).
    pub choi_min_eigenvalue: f64,
    /// max |τ(T_t(y)* x) − τ(y* T_t(x))|, condition (iv).
    pub symmetry_defect: f64,
    /// ‖T_t(1) − 1‖_∞.
    pub unitality_defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarkovDiagnostics {
    pub points: Vec<MarkovPoint>,
    pub contraction: bool,
    pub trace_decreasing: bool,
    pub completely_positive: bool,
    pub symmetric: bool,
    pub unital: bool,
}

impl MarkovDiagnostics {
    /// Conditions (i)–(iv) of a symmetric Markov semigroup.
    pub fn markov(&self) -> bool {
        self.contraction && self.trace_decreasing && self.completely_positive && self.symmetric
    }

    pub fn all_pass(&self) -> bool {
        self.markov() && self.unital
    }
}

pub const CONTRACTION_TOL: f64 = 1e-8;
pub const MARKOV_TOL: f64 = 1e-10;

/// Checks conditions (i)–(iv) and unitality at each sample time.
pub fn markov_check(generator: &Superoperator, t_samples: &[f64], seed: u64) -> Result<MarkovDiagnostics> {
    let sg = Semigroup::new(generator)?;
    let n = sg.n();
    let points: Vec<MarkovPoint> = t_samples
        .par_iter()
        .enumerate()
        .map(|(idx, &t)| -> Result<MarkovPoint> {
            let tt = sg.at(t)?;
            let opts = NormOptions {
                restarts: 16,
                seed: seed ^ (idx as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15),
                ..NormOptions::default()
            };
            let contraction_norm = operator_norm(&tt, f64::INFINITY, f64::INFINITY, NormMode::Auto, &opts)?.value;
            let mut rng = random::stream(seed, 1000 + idx as u64);
            let mut trace_excess = f64::NEG_INFINITY;
            let mut symmetry_defect: f64 = 0.0;
            for _ in 0..20 {
                let x = Element::new(random::positive(&mut rng, n))?;
                let excess = tt.apply(&x)?.trace().re - x.trace().re;
                trace_excess = trace_excess.max(excess);
                let a = Element::new(random::ginibre(&mut rng, n, n))?;
                let b = Element::new(random::ginibre(&mut rng, n, n))?;
                let lhs = tt.apply(&b)?.inner(&a)?;
                let rhs = b.inner(&tt.apply(&a)?)?;
                let scale = a.lp_norm(2.0)? * b.lp_norm(2.0)?;
                symmetry_defect = symmetry_defect.max((lhs - rhs).norm() / scale.max(1e-300));
            }
            let (choi, _) = sorted_eigen(&{
                let ch = tt.choi_matrix();
                (&ch + ch.adjoint()) * c(0.5)
            });
            let unit = tt.apply(&Element::identity(n))?.sub(&Element::identity(n))?;
            Ok(MarkovPoint {
                t,
                contraction_norm,
                trace_excess,
                choi_min_eigenvalue: choi[0],
                symmetry_defect,
                unitality_defect: unit.lp_norm(f64::INFINITY)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MarkovDiagnostics {
        contraction: points.iter().all(|p| p.contraction_norm <= 1.0 + CONTRACTION_TOL),
        trace_decreasing: points.iter().all(|p| p.trace_excess <= MARKOV_TOL),
        completely_positive: points.iter().all(|p| p.choi_min_eigenvalue >= -MARKOV_TOL),
        symmetric: points.iter().all(|p| p.symmetry_defect <= MARKOV_TOL),
        unital: points.iter().all(|p| p.unitality_defect <= MARKOV_TOL),
        points,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct UltracontractivityProfile {
    pub t_grid: Vec<f64>,
    pub norms: Vec<f64>,
    pub certificates: Vec<Certificate>,
    /// sup_t φ(t)·|||T_t|||_{1→∞} and its argmax, when φ was supplied.
    pub phi_constant: Option<f64>,
    pub phi_argmax: Option<f64>,
}

impl UltracontractivityProfile {
    /// Weak monotone decrease along the grid, tolerance 1e-8.
    pub fn is_monotone(&self) -> bool {
        self.norms.windows(2).all(|w| w[1] <= w[0] + 1e-8)
    }
}

/// |||T_t|||_{1→∞} estimates on `t_grid`.
pub fn ultracontractivity_profile(
    generator: &Superoperator,
    t_grid: &[f64],
    phi: Option<&(dyn Fn(f64) -> f64 + Sync)>,
    opts: &NormOptions,
) -> Result<UltracontractivityProfile> {
    if t_grid.iter().any(|t| !(*t > 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("profile grid must be positive and strictly increasing".into()));
    }
    let sg = Semigroup::new(generator)?;
    let results: Vec<(f64, Certificate)> = t_grid
        .par_iter()
        .enumerate()
        .map(|(k, &t)| {
            let tt = sg.at(t)?;
            let o = NormOptions {
                seed: random_seed_for(opts.seed, k),
                ..*opts
            };
            let est = operator_norm(&tt, 1.0, f64::INFINITY, NormMode::Auto, &o)?;
            Ok((est.value, est.certificate))
        })
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = results.iter().map(|r| r.0).collect();
    let certificates = results.iter().map(|r| r.1).collect();
    let (phi_constant, phi_argmax) = match phi {
        Some(f) => {
            let (v, t) = t_grid
                .iter()
                .zip(&norms)
                .map(|(t, v)| (f(*t) * v, *t))
                .fold((f64::NEG_INFINITY, f64::NAN), |b, x| if x.0 > b.0 { x } else { b });
            (Some(v), Some(t))
        }
        None => (None, None),
    };
    Ok(UltracontractivityProfile {
        t_grid: t_grid.to_vec(),
        norms,
        certificates,
        phi_constant,
        phi_argmax,
    })
}

fn random_seed_for(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}
