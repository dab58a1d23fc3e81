//! Mellin transforms `[𝔐_ξ m](u) = ∫₀^∞ η^{ξ−iu} m(η) dη/η`, computed in
//! `w = log η` with pieces no longer than one period of `e^{-iuw}`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use num_complex::Complex64;
use serde::Serialize;

use super::MultiplierSpec;
use crate::error::{Endpoint, Error, Result};
use crate::quad::{integrate, integrate_line, integrate_segmented, LineWindow, QuadOptions};

const SCAN: f64 = 60.0;
const REACH: f64 = 400.0;

fn piece_for(freq: f64) -> f64 {
    if freq == 0.0 {
        1.0
    } else {
        (2.0 * PI / freq.abs()).min(1.0)
    }
}

/// Line integral in `w = log η` of an integrand already carrying the
/// factor `e^{(ξ−iu)w}`: locate the mass, screen both ends for decay,
/// then integrate with pieces of at most one oscillation period.
fn line_mellin(g: impl Fn(f64) -> Complex64, u: f64, context: &str) -> Result<Complex64> {
    let mag = |w: f64| g(w).norm();
    let mut peak = 0.0;
    let mut center = 0.0;
    let mut w = -SCAN;
    while w <= SCAN {
        let v = mag(w);
        if v.is_finite() && v > peak {
            peak = v;
            center = w;
        }
        w += 0.5;
    }
    if peak == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    for (dir, endpoint) in [(-1.0, Endpoint::Zero), (1.0, Endpoint::Infinity)] {
        let probe = |d: f64| {
            let v = mag(center + dir * d);
            if v.is_nan() { f64::INFINITY } else { v * d }
        };
        let (near, far) = (probe(100.0), probe(200.0));
        if far >= 1e-12 * peak && far >= 0.5 * near {
            return Err(Error::divergence(context, endpoint));
        }
    }
    let window = LineWindow {
        center,
        half_width: 8.0,
        min: center - REACH,
        max: center + REACH,
        max_piece: piece_for(u),
        tail_fraction: 1e-16,
        closed_min: false,
        closed_max: false,
    };
    let opts = QuadOptions {
        abs_tol: 1e-10 * peak.min(1.0),
        rel_tol: 1e-12,
        max_evals: 1 << 17,
    };
    integrate_line(g, window, opts, context).map(|r| r.value)
}

/// ∫₀^∞ η^{ξ−iu} f(η) dη/η for a real `f`.
pub fn mellin_of(f: impl Fn(f64) -> f64, xi: f64, u: f64, context: &str) -> Result<Complex64> {
    line_mellin(
        |w: f64| {
            let v = f(w.exp());
            if v == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar((xi * w).exp(), -u * w) * v
            }
        },
        u,
        context,
    )
}

/// Same transform along the ray arg η = φ (Cauchy's theorem, `f`
/// holomorphic and decaying in the sector swept). The factor e^{φu} is
/// taken out exactly, which keeps relative accuracy when the transform is
/// exponentially small in |u|.
pub fn mellin_on_ray(f: impl Fn(Complex64) -> Complex64, phi: f64, xi: f64, u: f64, context: &str) -> Result<Complex64> {
    let rot = Complex64::from_polar(1.0, phi);
    let inner = line_mellin(
        |w: f64| {
            let v = f(rot * w.exp());
            if v == Complex64::new(0.0, 0.0) {
                v
            } else {
                Complex64::from_polar((xi * w).exp(), -u * w) * v
            }
        },
        u,
        context,
    )?;
    Ok(inner * Complex64::new(phi * u, phi * xi).exp())
}

/// Rotation used for |u| > 1 when a holomorphic extension to |arg η| < ω
/// is known.
fn ray_angle(omega: f64, u: f64) -> f64 {
    -u.signum() * 0.98 * omega.min(FRAC_PI_2)
}

pub fn mellin_transform(m: &MultiplierSpec, xi: f64, u: f64) -> Result<Complex64> {
    match m.analytic() {
        Some(ext) if u.abs() > 1.0 => mellin_on_ray(|z| (ext.f)(z), ray_angle(ext.omega, u), xi, u, "Mellin transform"),
        _ => mellin_of(m.symbol(), xi, u, "Mellin transform"),
    }
}

/// [𝔐 m_N](t, u) with m_N(t, η) = (tη)^N e^{-tη/2} m(η).
pub fn mellin_m_n(m: &MultiplierSpec, n: u32, t: f64, u: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let nf = n as f64;
    let context = "Mellin transform of m_N";
    if let Some(ext) = m.analytic().filter(|_| u.abs() > 1.0) {
        return mellin_on_ray(
            |z| {
                let s = z * t;
                let weight = if n == 0 { (-s / 2.0).exp() } else { (s.ln() * nf - s / 2.0).exp() };
                if weight.norm() == 0.0 { weight } else { weight * (ext.f)(z) }
            },
            ray_angle(ext.omega, u),
            0.0,
            u,
            context,
        );
    }
    mellin_of(
        |eta| {
            let s = t * eta;
            let weight = if n == 0 { (-s / 2.0).exp() } else { (nf * s.ln() - s / 2.0).exp() };
            if weight == 0.0 { 0.0 } else { weight * m.eval(eta) }
        },
        0.0,
        u,
        context,
    )
}

const TAIL_TARGET: f64 = 1e-8;
const MAX_U: f64 = 200.0;
const U_STEP: f64 = 5.0;

/// Smallest U on the 5, 10, ..., 200 scan where an exponential-decay fit
/// of `mag` bounds the tail beyond U by `target(running max of mag)`.
/// Returns (U, tail, reached).
fn truncation(mut mag: impl FnMut(f64) -> f64, target: impl Fn(f64) -> f64) -> (f64, f64, bool) {
    let mut prev = mag(0.0);
    let mut peak = prev;
    let mut last_tail = f64::INFINITY;
    let mut u = U_STEP;
    while u <= MAX_U + 1e-9 {
        let cur = mag(u);
        peak = peak.max(cur);
        let tail = if cur == 0.0 {
            0.0
        } else if cur < prev {
            let rate = (prev / cur).ln() / U_STEP;
            cur / rate
        } else {
            f64::INFINITY
        };
        last_tail = tail;
        if tail < target(peak) {
            return (u, tail, true);
        }
        prev = cur;
        u += U_STEP;
    }
    (MAX_U, last_tail, false)
}

/// [`truncation`] for a fallible magnitude, with a target relative to its
/// running maximum.
pub(crate) fn truncation_for(mag: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64, bool)> {
    let mut err = None;
    let out = truncation(
        |u| match mag(u).and_then(|a| mag(-u).map(|b| a + b)) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        |peak| TAIL_TARGET * peak.max(1e-300),
    );
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// m(η) = (1/2π) ∫ η^{iu−ξ} F(u) du over |u| ≤ U.
pub fn inverse_mellin(transform: impl Fn(f64) -> Complex64, xi: f64, eta: f64) -> Result<Complex64> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("η must be positive, got {eta}")));
    }
    let scale = eta.powf(-xi) / (2.0 * PI);
    let (big_u, tail, ok) = truncation(|u| transform(u).norm() + transform(-u).norm(), |_| TAIL_TARGET / scale.max(1e-300));
    if !ok {
        return Err(Error::accuracy("inverse Mellin truncation", tail * scale, TAIL_TARGET));
    }
    let le = eta.ln();
    let r = integrate_segmented(
        |u: f64| Complex64::from_polar(1.0, u * le) * transform(u),
        -big_u,
        big_u,
        piece_for(le),
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_evals: 1 << 16,
        },
    )?;
    Ok(r.value * scale)
}

/// |||L^{iu}||| ≤ C (1 + |u|)^κ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthModel {
    pub c: f64,
    pub kappa: f64,
}

impl GrowthModel {
    pub fn eval(&self, u: f64) -> f64 {
        self.c * (1.0 + u.abs()).powf(self.kappa)
    }

    /// Least-squares fit of log N(u) = log C + κ log(1+|u|), raised so the
    /// model dominates every sample. Returns the model and the RMS residual.
    pub fn fit(samples: &[(f64, f64)]) -> Result<(Self, f64)> {
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|(_, v)| *v > 0.0)
            .map(|(u, v)| ((1.0 + u.abs()).ln(), v.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::Degenerate("growth fit needs two positive samples".into()));
        }
        let n = pts.len() as f64;
        let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
        let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let kappa = if sxx > 0.0 { (sxy / sxx).max(0.0) } else { 0.0 };
        let resid: Vec<f64> = pts.iter().map(|(x, y)| y - (my + kappa * (x - mx))).collect();
        let lift = resid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rms = (resid.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
        Ok((
            Self {
                c: (my - kappa * mx + lift).exp(),
                kappa,
            },
            rms,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisIntegral {
    pub value: f64,
    pub tail_bound: f64,
    pub u_max: f64,
    pub finite: bool,
    /// Largest relative change of sup_t under grid refinement at the probe u's.
    pub sup_refinement_change: f64,
    pub unstable: bool,
    pub divergence: Option<String>,
}

fn sup_over(m: &MultiplierSpec, n: u32, u: f64, t_grid: &[f64]) -> Result<f64> {
    let values = t_grid
        .par_iter()
        .map(|&t| mellin_m_n(m, n, t, u).map(|v| v.norm()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// ∫ sup_t |[𝔐 m_N](t,u)| C(1+|u|)^κ du. For real symbols the integrand
/// is even in u (𝔐(−u) is the conjugate of 𝔐(u)), so only u ≥ 0 is
/// evaluated.
pub fn hypothesis_integral(m: &MultiplierSpec, n: u32, growth: GrowthModel, t_grid: &[f64]) -> Result<HypothesisIntegral> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::Domain("t-probe grid must be nonempty and positive".into()));
    }
    let h = |u: f64| sup_over(m, n, u, t_grid).map(|s| s * growth.eval(u));
    let divergent = |e: Error| match e {
        Error::Divergence { context, endpoint } => Ok(HypothesisIntegral {
            value: f64::INFINITY,
            tail_bound: f64::INFINITY,
            u_max: 0.0,
            finite: false,
            sup_refinement_change: 0.0,
            unstable: false,
            divergence: Some(format!("{context} diverges at {endpoint}")),
        }),
        other => Err(other),
    };
    let h0 = match h(0.0) {
        Ok(v) => v,
        Err(e) => return divergent(e),
    };

    // stabilization of the sup on a refined grid
    let refined: Vec<f64> = {
        let mut g: Vec<f64> = t_grid.to_vec();
        g.extend(t_grid.windows(2).map(|w| (w[0] * w[1]).sqrt()));
        g
    };
    let mut change: f64 = 0.0;
    for u in [0.0, 1.0, 5.0, 10.0] {
        let a = sup_over(m, n, u, t_grid)?;
        let b = sup_over(m, n, u, &refined)?;
        if b > 0.0 {
            change = change.max((b - a).abs() / b);
        }
    }

    let mut err = None;
    let (u_max, tail, ok) = truncation(
        |u| match h(u) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        |peak| TAIL_TARGET * peak.max(h0).max(1.0),
    );
    if let Some(e) = err {
        return Err(e);
    }
    let mut total = 0.0;
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-9,
        max_evals: 1 << 14,
    };
    let mut a = 0.0;
    while a < u_max {
        let b = (a + U_STEP).min(u_max);
        let mut inner = None;
        let r = integrate(
            |u: f64| match h(u) {
                Ok(v) => v,
                Err(e) => {
                    inner.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            opts,
        )?;
        if let Some(e) = inner {
            return Err(e);
        }
        total += r.value;
        a = b;
    }
    Ok(HypothesisIntegral {
        value: 2.0 * total,
        tail_bound: 2.0 * tail,
        u_max,
        finite: ok,
        sup_refinement_change: change,
        unstable: change > 0.01,
        divergence: None,
    })
}
