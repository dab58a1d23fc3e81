//! Spectral multiplier symbols `m` on `ℝ₊`, their Hörmander constants, and
//! the holomorphic kernel `Λ` that appears when `m(tL)` is written through
//! imaginary powers.

pub mod maximal;
pub mod mellin;

use std::fmt;
use std::io::Read;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pairs::RegularPair;
use crate::quad::{integrate, QuadOptions};

pub use maximal::{ellinf_norm_bracket, maximal_operator_check, MaximalCheck, MaximalFamily, NormBracket};
pub use mellin::{hypothesis_integral, inverse_mellin, mellin_m_n, mellin_transform, GrowthModel, HypothesisIntegral};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub struct AnalyticExtension {
    pub omega: f64,
    pub f: ComplexFn,
}

/// A symbol with optional derivatives `m', m'', ...` and an optional
/// holomorphic extension to a sector.
#[derive(Clone)]
pub struct MultiplierSpec {
    name: String,
    symbol: RealFn,
    derivatives: Vec<RealFn>,
    analytic: Option<AnalyticExtension>,
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSpec")
            .field("name", &self.name)
            .field("derivatives", &self.derivatives.len())
            .field("analytic", &self.analytic.as_ref().map(|a| a.omega))
            .finish()
    }
}

fn falling(g: f64, j: usize) -> f64 {
    (0..j).map(|i| g - i as f64).product()
}

impl MultiplierSpec {
    pub fn new(name: impl Into<String>, symbol: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            symbol: Arc::new(symbol),
            derivatives: Vec::new(),
            analytic: None,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivatives.push(Arc::new(d));
        self
    }

    pub fn with_analytic(mut self, omega: f64, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        self.analytic = Some(AnalyticExtension { omega, f: Arc::new(f) });
        self
    }

    pub fn constant(c: f64) -> Self {
        let mut m = Self::new(format!("constant:{c}"), move |_| c).with_analytic(std::f64::consts::FRAC_PI_2, move |_| Complex64::new(c, 0.0));
        for _ in 0..4 {
            m = m.with_derivative(|_| 0.0);
        }
        m
    }

    /// Built-ins: `one`, `zero`, `exp-decay` (e^{-η}), `rational-1`
    /// ((1+η)^{-1}) and `power:γ` (η^γ), each with four derivatives.
    pub fn builtin(name: &str) -> Result<Self> {
        let spec = match name {
            "one" => Self::constant(1.0),
            "zero" => Self::constant(0.0),
            "exp-decay" => {
                let mut m = Self::new(name, |x: f64| (-x).exp()).with_analytic(std::f64::consts::FRAC_PI_2, |z: Complex64| (-z).exp());
                for j in 1..=4 {
                    let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
                    m = m.with_derivative(move |x: f64| sign * (-x).exp());
                }
                m
            }
            "rational-1" => {
                let mut m = Self::new(name, |x: f64| 1.0 / (1.0 + x)).with_analytic(std::f64::consts::PI * 0.999, |z: Complex64| (z + 1.0).inv());
                let mut fact = 1.0;
                for j in 1..=4 {
                    fact *= j as f64;
                    let c = if j % 2 == 1 { -fact } else { fact };
                    m = m.with_derivative(move |x: f64| c * (1.0 + x).powi(-(j as i32) - 1));
                }
                m
            }
            _ => {
                let Some(g) = name.strip_prefix("power:") else {
                    return Err(Error::Specification(format!("unknown multiplier symbol `{name}`")));
                };
                let g: f64 = g
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("power exponent in `{name}` is not a number")))?;
                let mut m = Self::new(name, move |x: f64| x.powf(g)).with_analytic(std::f64::consts::PI * 0.999, move |z: Complex64| z.powf(g));
                for j in 1..=4 {
                    let c = falling(g, j);
                    m = m.with_derivative(move |x: f64| c * x.powf(g - j as f64));
                }
                m
            }
        };
        Ok(spec)
    }

    /// Tabulated symbol; `order` 1 is piecewise linear, 3 a natural cubic
    /// spline. Constant extension outside the table.
    pub fn tabulated(name: impl Into<String>, points: Vec<(f64, f64)>, order: u8) -> Result<Self> {
        let spline = Arc::new(Spline::new(points, order)?);
        let (s0, s1) = (spline.clone(), spline.clone());
        let mut m = Self::new(name, move |x| s0.eval(x).0).with_derivative(move |x| s1.eval(x).1);
        if order == 3 {
            let s2 = spline.clone();
            m = m.with_derivative(move |x| s2.eval(x).2);
        }
        Ok(m)
    }

    /// CSV with columns `eta,m` (a header row is optional).
    pub fn from_csv(name: impl Into<String>, reader: impl Read, order: u8) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut points = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse(format!("symbol table: {e}")))?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("symbol table line {}: expected two columns", line + 1)));
            }
            let (a, b) = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match (a, b) {
                (Ok(x), Ok(y)) => points.push((x, y)),
                _ if line == 0 => continue,
                _ => return Err(Error::Parse(format!("symbol table line {}: non-numeric entry", line + 1))),
            }
        }
        Self::tabulated(name, points, order)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.symbol)(x)
    }

    pub fn symbol(&self) -> impl Fn(f64) -> f64 + Send + Sync + '_ {
        move |x| self.eval(x)
    }

    pub fn derivative_order(&self) -> usize {
        self.derivatives.len()
    }

    /// `m⁽ʲ⁾`, with `j = 0` the symbol itself.
    pub fn derivative(&self, j: usize) -> Result<&RealFn> {
        if j == 0 {
            return Ok(&self.symbol);
        }
        self.derivatives
            .get(j - 1)
            .ok_or_else(|| Error::Specification(format!("symbol `{}` has no derivative of order {j}", self.name)))
    }

    pub fn analytic(&self) -> Option<&AnalyticExtension> {
        self.analytic.as_ref()
    }

    /// Central differences of `m` against `m'` at 20 probe points.
    pub fn check_derivatives(&self) -> Result<f64> {
        let Some(d) = self.derivatives.first() else {
            return Ok(0.0);
        };
        let mut worst: f64 = 0.0;
        for x in crate::log_space(0.05, 20.0, 20) {
            let h = 1e-5 * x;
            let fd = (self.eval(x + h) - self.eval(x - h)) / (2.0 * h);
            let exact = d(x);
            let rel = (fd - exact).abs() / exact.abs().max(1e-6);
            worst = worst.max(rel);
        }
        if worst > 1e-5 {
            return Err(Error::Validation(format!(
                "derivative of `{}` disagrees with finite differences (relative {worst:e})",
                self.name
            )));
        }
        Ok(worst)
    }
}

struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the knots (zero for order 1)
    m2: Vec<f64>,
    cubic: bool,
}

impl Spline {
    fn new(mut points: Vec<(f64, f64)>, order: u8) -> Result<Self> {
        if order != 1 && order != 3 {
            return Err(Error::UnsupportedParameter(format!("spline order must be 1 or 3, got {order}")));
        }
        if points.len() < 2 {
            return Err(Error::Parse("symbol table needs at least two points".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || !(points[0].0 > 0.0) {
            return Err(Error::Parse("symbol table abscissae must be positive and distinct".into()));
        }
        let (x, y): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        let n = x.len();
        let mut m2 = vec![0.0; n];
        if order == 3 && n > 2 {
            // tridiagonal solve for the natural spline
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - h0 * d[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m2[i] = d[i] - c[i] * m2[i + 1];
            }
        }
        Ok(Self {
            x,
            y,
            m2,
            cubic: order == 3,
        })
    }

    /// (value, first, second derivative)
    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            return (self.y[0], 0.0, 0.0);
        }
        if t >= self.x[n - 1] {
            return (self.y[n - 1], 0.0, 0.0);
        }
        let k = self.x.partition_point(|v| *v <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let (a, b) = ((self.x[k + 1] - t) / h, (t - self.x[k]) / h);
        let slope = (self.y[k + 1] - self.y[k]) / h;
        if !self.cubic {
            return (a * self.y[k] + b * self.y[k + 1], slope, 0.0);
        }
        let (m0, m1) = (self.m2[k], self.m2[k + 1]);
        let v = a * self.y[k] + b * self.y[k + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = slope + h / 6.0 * (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1);
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

/// sup over `r_grid` of |ψ(R)|^α max_{j ≤ χ} ∫_R^{2R} |η^j m⁽ʲ⁾(η)| dη/η.
pub fn hormander_constant(
    m: &MultiplierSpec,
    alpha: f64,
    chi: usize,
    pair: Option<&RegularPair>,
    r_grid: &[f64],
) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("Hörmander order α must be nonnegative, got {alpha}")));
    }
    if alpha > 0.0 && pair.is_none() {
        return Err(Error::Specification("Hörmander condition with α > 0 needs ψ from a regular pair".into()));
    }
    let derivs = (0..=chi).map(|j| m.derivative(j)).collect::<Result<Vec<_>>>()?;
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        max_evals: 1 << 14,
    };
    let mut best: f64 = 0.0;
    for &r in r_grid {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("R-grid points must be positive, got {r}")));
        }
        let weight = match pair {
            Some(p) if alpha > 0.0 => p.psi_real(r).abs().powf(alpha),
            _ => 1.0,
        };
        let mut shell: f64 = 0.0;
        for (j, d) in derivs.iter().enumerate() {
            // η = R e^v, v ∈ [0, log 2]
            let v = integrate(
                |v: f64| {
                    let eta = r * v.exp();
                    (eta.powi(j as i32) * d(eta)).abs()
                },
                0.0,
                std::f64::consts::LN_2,
                opts,
            )?;
            shell = shell.max(v.value);
        }
        best = best.max(weight * shell);
    }
    Ok(best)
}

/// Bounded coefficient `a` on ℝ₊ for [`lambda_u`].
#[derive(Clone)]
pub enum Coefficient {
    /// Right-continuous step function: `values[k]` on `[breaks[k-1], breaks[k])`
    /// with `breaks[-1] = 0` and the last value extended to ∞.
    Step { breaks: Vec<f64>, values: Vec<Complex64> },
    /// Continuous in t; jumps belong in `Step`.
    Function(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl Coefficient {
    pub fn constant(c: Complex64) -> Self {
        Coefficient::Step {
            breaks: Vec::new(),
            values: vec![c],
        }
    }

    fn sup_sampled(&self) -> f64 {
        match self {
            Coefficient::Step { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            Coefficient::Function(f) => crate::log_space(1e-6, 1e6, 241).into_iter().map(|t| f(t).norm()).fold(0.0, f64::max),
        }
    }
}

/// Λ(η) = ∫₀^∞ a(t) tη e^{-tη/2} dt/t for Re η > 0. Step coefficients are
/// integrated exactly segment by segment.
pub fn lambda_u(a: &Coefficient, eta: Complex64) -> Result<Complex64> {
    if !(eta.re > 0.0) {
        return Err(Error::Domain(format!("Λ needs Re η > 0, got {eta}")));
    }
    let sup = a.sup_sampled();
    if sup > 1.0 + 1e-12 {
        return Err(Error::Contract(format!("coefficient exceeds 1 in modulus ({sup})")));
    }
    match a {
        Coefficient::Step { breaks, values } => {
            if values.len() != breaks.len() + 1 {
                return Err(Error::Validation("step coefficient needs one more value than breakpoints".into()));
            }
            // ∫_{t0}^{t1} η e^{-tη/2} dt = 2(e^{-t0 η/2} − e^{-t1 η/2})
            let mut acc = Complex64::new(0.0, 0.0);
            let mut prev = Complex64::new(1.0, 0.0);
            for (k, v) in values.iter().enumerate() {
                let next = match breaks.get(k) {
                    Some(t) => (-eta * (*t / 2.0)).exp(),
                    None => Complex64::new(0.0, 0.0),
                };
                acc += v * (prev - next) * 2.0;
                prev = next;
            }
            Ok(acc)
        }
        Coefficient::Function(f) => {
            let window = crate::quad::LineWindow {
                center: (2.0 / eta.re).ln(),
                max_piece: 0.5,
                ..Default::default()
            };
            let opts = QuadOptions {
                abs_tol: 1e-11,
                rel_tol: 1e-12,
                max_evals: 1 << 17,
            };
            crate::quad::integrate_line(
                |w: f64| {
                    let t = w.exp();
                    let decay = -eta * (t / 2.0);
                    if decay.re < -745.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        f(t) * eta * t * decay.exp()
                    }
                },
                window,
                opts,
                "Λ kernel",
            )
            .map(|r| r.value)
        }
    }
}
