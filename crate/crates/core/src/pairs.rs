//! Regularly related pairs `(φ, ψ)`: the built-in power, power-ratio and
//! power-log families, grid witnesses for the regularity conditions, and
//! the Laplace companion `ψ_θ(z) = ∫₀^∞ e^{-zt} φ(t)^θ dt/t`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Endpoint, Error, Result};
use crate::quad::{integrate_line, LineWindow, QuadOptions};
use crate::random;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairFamily {
    Power,
    PowerRatio,
    PowerLog,
    Custom,
}

/// JSON form `{ "family": ..., "alpha": number, "beta": number }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub family: PairFamily,
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type ComplexFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub struct RegularPair {
    family: PairFamily,
    alpha: f64,
    beta: f64,
    phi: RealFn,
    psi: ComplexFn,
}

impl fmt::Debug for RegularPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegularPair")
            .field("family", &self.family)
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .finish()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!("pair parameter {name} must be positive, got {v}")))
    }
}

impl RegularPair {
    /// (a) φ = t^α, ψ = z^α
    pub fn power(alpha: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        Ok(Self {
            family: PairFamily::Power,
            alpha,
            beta: 0.0,
            phi: Arc::new(move |t| t.powf(alpha)),
            psi: Arc::new(move |z| z.powf(alpha)),
        })
    }

    /// (b) φ = t^α (1+t)^{β−α}, ψ = z^β (1+z)^{α−β}
    pub fn power_ratio(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(Self {
            family: PairFamily::PowerRatio,
            alpha,
            beta,
            phi: Arc::new(move |t| t.powf(alpha) * (1.0 + t).powf(beta - alpha)),
            psi: Arc::new(move |z| z.powf(beta) * (z + 1.0).powf(alpha - beta)),
        })
    }

    /// (c) φ = t^α log(2+t)^β, ψ = z^α log(2 + 1/z)^{−β}
    pub fn power_log(alpha: f64, beta: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(Self {
            family: PairFamily::PowerLog,
            alpha,
            beta,
            phi: Arc::new(move |t| t.powf(alpha) * (2.0 + t).ln().powf(beta)),
            psi: Arc::new(move |z| z.powf(alpha) * (z.inv() + 2.0).ln().powf(-beta)),
        })
    }

    pub fn custom(
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            family: PairFamily::Custom,
            alpha: f64::NAN,
            beta: f64::NAN,
            phi: Arc::new(phi),
            psi: Arc::new(psi),
        }
    }

    pub fn from_spec(spec: &PairSpec) -> Result<Self> {
        match spec.family {
            PairFamily::Power => Self::power(spec.alpha),
            PairFamily::PowerRatio => Self::power_ratio(spec.alpha, spec.beta),
            PairFamily::PowerLog => Self::power_log(spec.alpha, spec.beta),
            PairFamily::Custom => Err(Error::Specification(
                "custom pairs need φ and ψ supplied programmatically".into(),
            )),
        }
    }

    pub fn family(&self) -> PairFamily {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn phi(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    pub fn psi(&self, z: Complex64) -> Complex64 {
        (self.psi)(z)
    }

    /// ψ on the positive axis (real by conjugate symmetry).
    pub fn psi_real(&self, x: f64) -> f64 {
        self.psi(Complex64::new(x, 0.0)).re
    }

    pub fn phi_fn(&self) -> impl Fn(f64) -> f64 + Send + Sync + '_ {
        move |t| self.phi(t)
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::Domain("grid points must be positive and finite".into()));
    }
    Ok(())
}

/// max over the grid of φ(2t)/φ(t): the Δ₂ constant witnessed on the grid.
pub fn delta2_constant(pair: &RegularPair, t_grid: &[f64]) -> Result<f64> {
    check_grid(t_grid)?;
    let mut best = f64::NEG_INFINITY;
    for &t in t_grid {
        let (a, b) = (pair.phi(t), pair.phi(2.0 * t));
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::Domain(format!("φ is not positive near t = {t:e}")));
        }
        best = best.max(b / a);
    }
    Ok(best)
}

fn half_line_window() -> LineWindow {
    LineWindow {
        center: 2.0,
        half_width: 2.0,
        min: 0.0,
        max: 745.0,
        max_piece: 2.0,
        tail_fraction: 1e-17,
        closed_min: true,
        closed_max: false,
    }
}

fn condition3_options() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-13,
        max_evals: 1 << 16,
    }
}

/// ∫₀^t φ(s)^θ ds/s ÷ φ(t)^θ, via s = t e^{-v}.
pub fn head_ratio(pair: &RegularPair, theta: f64, t: f64) -> Result<f64> {
    let pt = pair.phi(t);
    let f = |v: f64| {
        let s = (t * (-v).exp()).max(f64::MIN_POSITIVE);
        (pair.phi(s) / pt).powf(theta)
    };
    integrate_line(f, half_line_window(), condition3_options(), "integral condition head")
        .map(|r| r.value)
        .map_err(|e| match e {
            Error::Divergence { context, .. } => Error::Divergence {
                context,
                endpoint: Endpoint::Zero,
            },
            other => other,
        })
}

/// ∫_t^∞ φ(s)^{-θ} ds/s ÷ φ(t)^{-θ}, via s = t e^{v}.
pub fn tail_ratio(pair: &RegularPair, theta: f64, t: f64) -> Result<f64> {
    let pt = pair.phi(t);
    let f = |v: f64| {
        let p = pair.phi((t * v.exp()).min(f64::MAX));
        if p.is_infinite() { 0.0 } else { (pt / p).powf(theta) }
    };
    integrate_line(f, half_line_window(), condition3_options(), "integral condition tail").map(|r| r.value)
}

/// Grid estimate of D_{φ,θ}: the larger of the head and tail ratios.
pub fn integral_condition(pair: &RegularPair, theta: f64, t_grid: &[f64]) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("θ must be positive, got {theta}")));
    }
    check_grid(t_grid)?;
    let mut best: f64 = 0.0;
    for &t in t_grid {
        best = best.max(tail_ratio(pair, theta, t)?);
        best = best.max(head_ratio(pair, theta, t)?);
    }
    Ok(best)
}

/// Γ_{R,ω} = {R < Re z < 2R, |arg z| < ω}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub omega: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl SectorSpec {
    pub fn new(omega: f64, r: f64) -> Result<Self> {
        if !(omega > 0.0 && omega < PI / 2.0) {
            return Err(Error::Domain(format!("sector angle must lie in (0, π/2), got {omega}")));
        }
        if !(r > 0.0) {
            return Err(Error::Domain(format!("sector scale R must be positive, got {r}")));
        }
        Ok(Self { omega, r })
    }

    /// Closure samples: `rays` angles in [−ω, ω] plus the real axis, with
    /// `radii` log-spaced moduli per ray spanning R ≤ Re z ≤ 2R.
    pub fn samples(&self, rays: usize, radii: usize) -> Vec<Complex64> {
        let mut angles: Vec<f64> = (0..rays)
            .map(|a| -self.omega + 2.0 * self.omega * a as f64 / (rays - 1).max(1) as f64)
            .collect();
        if rays % 2 == 0 {
            angles.push(0.0);
        }
        let mut out = Vec::with_capacity(angles.len() * radii);
        for theta in angles {
            let c = theta.cos();
            out.extend(
                crate::log_space(self.r / c, 2.0 * self.r / c, radii)
                    .into_iter()
                    .map(|rad| Complex64::from_polar(rad, theta)),
            );
        }
        out
    }
}

pub const SECTOR_RAYS: usize = 32;
pub const SECTOR_RADII: usize = 64;

/// inf|ψ| / sup|ψ| over a sample of Γ_{R,ω}.
pub fn sector_ratio(pair: &RegularPair, sector: &SectorSpec, samples: usize) -> Result<f64> {
    if samples < 100 {
        return Err(Error::Domain(format!("sector sampling needs at least 100 points, got {samples}")));
    }
    let radii = SECTOR_RADII.max(samples.div_ceil(SECTOR_RAYS));
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for z in sector.samples(SECTOR_RAYS, radii) {
        let m = pair.psi(z).norm();
        if m == 0.0 {
            return Err(Error::Zero(format!("{z}")));
        }
        lo = lo.min(m);
        hi = hi.max(m);
    }
    Ok(lo / hi)
}

/// min over an R-grid of [`sector_ratio`]; condition (5) is witnessed when
/// this stays away from zero.
pub fn sector_ratio_over(pair: &RegularPair, omega: f64, r_grid: &[f64], samples: usize) -> Result<f64> {
    let mut best = f64::INFINITY;
    for &r in r_grid {
        best = best.min(sector_ratio(pair, &SectorSpec::new(omega, r)?, samples)?);
    }
    Ok(best)
}

/// ψ_θ(z) = ∫₀^∞ e^{-zt} φ(t)^θ dt/t with absolute tolerance 1e-9.
pub fn psi_theta(pair: &RegularPair, theta: f64, z: Complex64) -> Result<Complex64> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("θ must be positive, got {theta}")));
    }
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("ψ_θ needs Re z > 0, got {z}")));
    }
    // t = e^w; the mass sits near t ~ 1/|z|
    let center = -z.norm().ln();
    let f = |w: f64| {
        let t = w.exp();
        let decay = -z * t;
        if decay.re < -745.0 {
            Complex64::new(0.0, 0.0)
        } else {
            decay.exp() * pair.phi(t).powf(theta)
        }
    };
    let window = LineWindow {
        center,
        half_width: 4.0,
        min: center - 2000.0,
        max: center + 60.0,
        max_piece: 1.0,
        tail_fraction: 1e-17,
        closed_min: false,
        closed_max: false,
    };
    let opts = QuadOptions {
        abs_tol: 1e-9,
        rel_tol: 1e-12,
        max_evals: 1 << 17,
    };
    integrate_line(f, window, opts, "Laplace companion ψ_θ").map(|r| r.value).map_err(|e| match e {
        Error::Divergence { .. } => e,
        Error::Accuracy { achieved, .. } => Error::accuracy("Laplace companion ψ_θ", achieved, 1e-9),
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

/// min / max of |ψ(z)^θ ψ_θ(z)| over rays of Γ_ω, radii log-spaced in
/// [1e-3, 1e3].
pub fn equivalence_check(pair: &RegularPair, theta: f64, omega: f64, samples: usize) -> Result<Bracket> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("θ must be positive, got {theta}")));
    }
    if !(omega > 0.0 && omega < PI / 2.0) {
        return Err(Error::Domain(format!("sector angle must lie in (0, π/2), got {omega}")));
    }
    let rays = 5;
    let radii = samples.div_ceil(rays).max(2);
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    for a in 0..rays {
        let arg = -omega + 2.0 * omega * a as f64 / (rays - 1) as f64;
        for r in crate::log_space(1e-3, 1e3, radii) {
            let z = Complex64::from_polar(r, arg);
            let v = (pair.psi(z).powf(theta) * psi_theta(pair, theta, z)?).norm();
            lower = lower.min(v);
            upper = upper.max(v);
        }
    }
    Ok(Bracket { lower, upper })
}

/// min over grid pairs of φ(ts)/(φ(t)φ(s)): the constant C_φ.
pub fn submultiplicative_constant(pair: &RegularPair, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    let mut best = f64::INFINITY;
    for &t in grid {
        for &s in grid {
            best = best.min(pair.phi(t * s) / (pair.phi(t) * pair.phi(s)));
        }
    }
    Ok(best)
}

/// sup over grids of φ(t)^α |ψ(z)|^α e^{-tz} (z real positive).
pub fn psi_control_constant(pair: &RegularPair, alpha: f64, t_grid: &[f64], z_grid: &[f64]) -> Result<f64> {
    check_grid(t_grid)?;
    check_grid(z_grid)?;
    let mut best = 0.0f64;
    for &t in t_grid {
        let pt = pair.phi(t).powf(alpha);
        for &z in z_grid {
            let v = pt * pair.psi_real(z).abs().powf(alpha) * (-t * z).exp();
            best = best.max(v);
        }
    }
    Ok(best)
}

/// Smallest forward difference of φ along the grid (condition (1)).
pub fn increase_margin(pair: &RegularPair, grid: &[f64]) -> f64 {
    grid.windows(2)
        .map(|w| pair.phi(w[1]) - pair.phi(w[0]))
        .fold(f64::INFINITY, f64::min)
}

/// max |ψ(z̄) − conj ψ(z)| / max(1, |ψ(z)|) over random points of Γ.
pub fn conjugate_symmetry_defect(pair: &RegularPair, samples: usize, seed: u64) -> f64 {
    let mut rng = random::rng(seed);
    (0..samples)
        .map(|_| {
            let r = 10f64.powf(rng.random_range(-3.0..3.0));
            let arg = rng.random_range(-0.49 * PI..0.49 * PI);
            let z = Complex64::from_polar(r, arg);
            let a = pair.psi(z.conj());
            let b = pair.psi(z).conj();
            (a - b).norm() / b.norm().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_real;
    use approx::assert_relative_eq;

    fn grid() -> Vec<f64> {
        crate::log_space(1e-3, 1e3, 25)
    }

    #[test]
    fn delta2_examples() {
        assert_relative_eq!(delta2_constant(&RegularPair::power(1.0).unwrap(), &grid()).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(delta2_constant(&RegularPair::power(2.0).unwrap(), &grid()).unwrap(), 4.0, epsilon = 1e-13);
        let c = RegularPair::power_log(1.0, 1.0).unwrap();
        let d = delta2_constant(&c, &grid()).unwrap();
        assert!(d.is_finite() && d <= 2.0 * (2.0 + 2e3f64).ln() / 2f64.ln());
        let bad = RegularPair::custom(|t| t - 1.0, |z| z);
        assert!(matches!(delta2_constant(&bad, &grid()), Err(Error::Domain(_))));
    }

    #[test]
    fn integral_condition_examples() {
        let g = grid();
        let d = integral_condition(&RegularPair::power(1.0).unwrap(), 1.0, &g).unwrap();
        assert_relative_eq!(d, 1.0, max_relative = 1e-10);
        let d = integral_condition(&RegularPair::power(0.5).unwrap(), 1.5, &g).unwrap();
        assert_relative_eq!(d, 1.0 / 0.75, max_relative = 1e-10);
        let constant = RegularPair::custom(|_| 3.0, |_| Complex64::new(1.0, 0.0));
        let err = integral_condition(&constant, 1.0, &g).unwrap_err();
        assert!(matches!(err, Error::Divergence { endpoint: Endpoint::Infinity, .. }));
        assert!(matches!(tail_ratio(&constant, 1.0, 1.0), Err(Error::Divergence { endpoint: Endpoint::Infinity, .. })));
        assert!(matches!(head_ratio(&constant, 1.0, 1.0), Err(Error::Divergence { endpoint: Endpoint::Zero, .. })));
    }

    #[test]
    fn sector_examples() {
        let omega = 0.8f64.acos();
        let lin = RegularPair::power(1.0).unwrap();
        let r = sector_ratio(&lin, &SectorSpec::new(omega, 2.5).unwrap(), 200).unwrap();
        assert_relative_eq!(r, 0.4, epsilon = 1e-12);
        let constant = RegularPair::custom(|t| t, |_| Complex64::new(2.0, 0.0));
        assert_eq!(sector_ratio(&constant, &SectorSpec::new(0.5, 1.0).unwrap(), 100).unwrap(), 1.0);
        let c = RegularPair::power_log(1.0, 1.0).unwrap();
        let v = sector_ratio_over(&c, PI / 4.0, &grid(), 100).unwrap();
        assert!(v > 0.0);
        assert!(SectorSpec::new(PI / 2.0, 1.0).is_err());
        let vanishing = RegularPair::custom(|t| t, |z| z - 1.0);
        assert!(matches!(
            sector_ratio(&vanishing, &SectorSpec::new(0.3, 1.0).unwrap(), 100),
            Err(Error::Zero(_))
        ));
    }

    #[test]
    fn psi_theta_power_family() {
        let a = RegularPair::power(1.0).unwrap();
        let v = psi_theta(&a, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-9);
        let a = RegularPair::power(0.5).unwrap();
        let v = psi_theta(&a, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((v.re - PI.sqrt()).abs() < 1e-6);
        for r in [0.01, 1.0, 50.0] {
            let z = Complex64::from_polar(r, PI / 4.0);
            let v = (a.psi(z) * psi_theta(&a, 1.0, z).unwrap()).norm();
            assert_relative_eq!(v, PI.sqrt(), max_relative = 1e-6);
        }
        assert!(psi_theta(&a, 1.0, Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn equivalence_brackets() {
        let a = RegularPair::power(0.5).unwrap();
        let b = equivalence_check(&a, 1.4, PI / 3.0, 20).unwrap();
        let g = gamma_real(0.7);
        assert_relative_eq!(b.lower, g, max_relative = 1e-6);
        assert_relative_eq!(b.upper, g, max_relative = 1e-6);
        let ratio = RegularPair::power_ratio(1.0, 2.0).unwrap();
        let b = equivalence_check(&ratio, 0.5, PI / 3.0, 20).unwrap();
        assert!(b.lower > 0.0 && b.upper.is_finite() && b.lower <= b.upper);
        assert!(matches!(equivalence_check(&a, 0.0, 0.5, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn submultiplicative_examples() {
        let g = grid();
        assert_relative_eq!(submultiplicative_constant(&RegularPair::power(1.3).unwrap(), &g).unwrap(), 1.0, max_relative = 1e-12);
        let b = RegularPair::power_ratio(1.0, 2.0).unwrap();
        assert!(submultiplicative_constant(&b, &g).unwrap() < 1.0);
        let c = RegularPair::power_log(1.0, 1.0).unwrap();
        assert!(submultiplicative_constant(&c, &g).unwrap() > 0.0);
    }

    #[test]
    fn structural_conditions() {
        let g = grid();
        for pair in [
            RegularPair::power(0.7).unwrap(),
            RegularPair::power_ratio(0.5, 2.0).unwrap(),
            RegularPair::power_log(1.0, 2.0).unwrap(),
        ] {
            assert!(increase_margin(&pair, &g) > 0.0);
            assert!(conjugate_symmetry_defect(&pair, 100, 3) < 1e-12);
            for alpha in [0.25, 0.5] {
                let c = psi_control_constant(&pair, alpha, &g, &g).unwrap();
                assert!(c.is_finite() && c > 0.0);
            }
        }
    }

    #[test]
    fn spec_parsing() {
        let s: PairSpec = serde_json::from_str(r#"{"family":"power-log","alpha":1,"beta":2}"#).unwrap();
        let p = RegularPair::from_spec(&s).unwrap();
        assert_eq!(p.family(), PairFamily::PowerLog);
        let s: PairSpec = serde_json::from_str(r#"{"family":"custom","alpha":1}"#).unwrap();
        assert!(matches!(RegularPair::from_spec(&s), Err(Error::Specification(_))));
        assert!(RegularPair::power(-1.0).is_err());
    }
}
