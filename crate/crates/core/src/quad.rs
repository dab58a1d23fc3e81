//! Adaptive Gauss–Kronrod quadrature for scalar, complex, vector and
//! matrix valued integrands.
//!
//! The driver is a global adaptive bisection on a 7/15-point Gauss–Kronrod
//! pair: the interval with the largest error estimate is split until the
//! summed estimate falls below the requested tolerance or the evaluation
//! budget runs out. Half-line and whole-line integrals are handled in
//! logarithmic coordinates by [`integrate_line`], which grows the window in
//! doubling chunks until the integrand mass is negligible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Endpoint, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values the quadrature driver can accumulate.
pub trait QuadValue: Clone {
    fn zero_like(&self) -> Self;
    /// `self += weight * other`
    fn add_scaled(&mut self, other: &Self, weight: f64);
    /// Size used for error control (max-abs entry for aggregates).
    fn magnitude(&self) -> f64;
    fn distance(&self, other: &Self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        *self += weight * other;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        *self += other * weight;
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl QuadValue for Vec<f64> {
    fn zero_like(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += weight * b;
        }
    }
    fn magnitude(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl QuadValue for Vec<Complex64> {
    fn zero_like(&self) -> Self {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b * weight;
        }
    }
    fn magnitude(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl QuadValue for DMatrix<Complex64> {
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add_scaled(&mut self, other: &Self, weight: f64) {
        for (a, b) in self.iter_mut().zip(other.iter()) {
            *a += b * weight;
        }
    }
    fn magnitude(&self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_evals: 1 << 16,
        }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }

    pub fn with_rel(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    fn target(&self, magnitude: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * magnitude)
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult<V> {
    pub value: V,
    /// Estimated absolute error (sum of per-segment Gauss/Kronrod gaps).
    pub error: f64,
    /// Estimated integral of the integrand magnitude.
    pub mass: f64,
    pub evaluations: usize,
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    mass: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<V, F>(f: &mut F, a: f64, b: f64) -> Result<Segment<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite() {
        return Err(Error::Domain(format!("integrand not finite at {center:e}")));
    }
    let mut kron = fc.zero_like();
    let mut gauss = fc.zero_like();
    kron.add_scaled(&fc, WGK[7]);
    gauss.add_scaled(&fc, WG[3]);
    let mut mass = WGK[7] * fc.magnitude();
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::Domain(format!(
                "integrand not finite near {:e}",
                center + x
            )));
        }
        kron.add_scaled(&f1, WGK[j]);
        kron.add_scaled(&f2, WGK[j]);
        mass += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss.add_scaled(&f1, WG[j / 2]);
            gauss.add_scaled(&f2, WG[j / 2]);
        }
    }
    let mut value = fc.zero_like();
    value.add_scaled(&kron, half);
    let mut g = fc.zero_like();
    g.add_scaled(&gauss, half);
    let error = value.distance(&g);
    Ok(Segment {
        a,
        b,
        value,
        error,
        mass: mass * half.abs(),
    })
}

/// Integrates `f` over the union of `intervals` with a single global error
/// budget.
pub fn integrate_intervals<V, F>(
    mut f: F,
    intervals: &[(f64, f64)],
    opts: QuadOptions,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    assert!(!intervals.is_empty(), "no integration intervals");
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for &(a, b) in intervals {
        heap.push(kronrod(&mut f, a, b)?);
        evaluations += 15;
    }
    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        let magnitude = total_of(&heap).magnitude();
        if total_error <= opts.target(magnitude) {
            break;
        }
        if evaluations + 30 > opts.max_evals {
            return Err(Error::accuracy(
                "adaptive quadrature",
                total_error,
                opts.target(magnitude),
            ));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // interval can no longer be bisected in floating point
            return Err(Error::accuracy(
                "adaptive quadrature (interval underflow)",
                total_error,
                opts.target(magnitude),
            ));
        }
        heap.push(kronrod(&mut f, worst.a, mid)?);
        heap.push(kronrod(&mut f, mid, worst.b)?);
        evaluations += 30;
    }
    let error = heap.iter().map(|s| s.error).sum();
    let mass = heap.iter().map(|s| s.mass).sum();
    Ok(QuadResult {
        value: total_of(&heap),
        error,
        mass,
        evaluations,
    })
}

fn total_of<V: QuadValue>(heap: &BinaryHeap<Segment<V>>) -> V {
    let mut iter = heap.iter();
    let first = iter.next().expect("non-empty heap");
    let mut acc = first.value.clone();
    for s in iter {
        acc.add_scaled(&s.value, 1.0);
    }
    acc
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<V, F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    integrate_intervals(f, &[(a, b)], opts)
}

/// Integrates `f` over `[a, b]` after cutting it into pieces no longer than
/// `max_piece`; used for oscillatory integrands.
pub fn integrate_segmented<V, F>(
    f: F,
    a: f64,
    b: f64,
    max_piece: f64,
    opts: QuadOptions,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let pieces = (((b - a) / max_piece).ceil() as usize).max(1);
    let h = (b - a) / pieces as f64;
    let intervals: Vec<(f64, f64)> = (0..pieces)
        .map(|k| (a + k as f64 * h, if k + 1 == pieces { b } else { a + (k + 1) as f64 * h }))
        .collect();
    integrate_intervals(f, &intervals, opts)
}

/// Window description for whole-line integrals in logarithmic coordinates.
#[derive(Debug, Clone, Copy)]
pub struct LineWindow {
    /// Where the integrand mass is expected to sit.
    pub center: f64,
    /// Half width of the first window around `center`.
    pub half_width: f64,
    /// Hard limits on the window; reaching one without decay is divergence.
    pub min: f64,
    pub max: f64,
    /// Longest single piece handed to the driver (oscillation control).
    pub max_piece: f64,
    /// A chunk whose magnitude integral is below this fraction of the
    /// running mass ends the growth in that direction.
    pub tail_fraction: f64,
    /// Treat `min` / `max` as finite integration limits instead of
    /// divergence barriers.
    pub closed_min: bool,
    pub closed_max: bool,
}

impl Default for LineWindow {
    fn default() -> Self {
        Self {
            center: 0.0,
            half_width: 4.0,
            min: -700.0,
            max: 700.0,
            max_piece: 2.0,
            tail_fraction: 1e-16,
            closed_min: false,
            closed_max: false,
        }
    }
}

impl LineWindow {
    pub fn centered(center: f64) -> Self {
        Self {
            center,
            ..Self::default()
        }
    }
}

/// Integrates `f` over the real line, where `f(w)` must decay as
/// `w -> ±∞`. In the usual substitution `s = e^w`, the left end
/// corresponds to `s -> 0` and the right end to `s -> ∞`; divergence errors
/// name the endpoint accordingly.
pub fn integrate_line<V, F>(
    mut f: F,
    window: LineWindow,
    opts: QuadOptions,
    context: &str,
) -> Result<QuadResult<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> V,
{
    let lo0 = (window.center - window.half_width).max(window.min);
    let hi0 = (window.center + window.half_width).min(window.max);
    let piece_opts = opts;
    let mut total = integrate_segmented(&mut f, lo0, hi0, window.max_piece, piece_opts)?;

    for (direction, endpoint) in [(1.0, Endpoint::Infinity), (-1.0, Endpoint::Zero)] {
        let mut edge = if direction > 0.0 { hi0 } else { lo0 };
        let limit = if direction > 0.0 { window.max } else { window.min };
        let closed = if direction > 0.0 { window.closed_max } else { window.closed_min };
        if closed {
            if (limit - edge) * direction > 0.0 {
                let (a, b) = if direction > 0.0 { (edge, limit) } else { (limit, edge) };
                let chunk = integrate_segmented(&mut f, a, b, window.max_piece, piece_opts)?;
                total.value.add_scaled(&chunk.value, 1.0);
                total.error += chunk.error;
                total.mass += chunk.mass;
                total.evaluations += chunk.evaluations;
            }
            continue;
        }
        let mut width = window.half_width.max(1.0);
        let mut quiet = 0;
        while quiet < 2 {
            if (limit - edge) * direction <= 0.0 {
                return Err(Error::divergence(context, endpoint));
            }
            let next = edge + direction * width;
            let next = if (next - limit) * direction > 0.0 { limit } else { next };
            let (a, b) = if direction > 0.0 { (edge, next) } else { (next, edge) };
            let chunk = integrate_segmented(&mut f, a, b, window.max_piece, piece_opts)?;
            let threshold = (window.tail_fraction * total.mass).max(0.01 * opts.abs_tol * 1e-3);
            if chunk.mass <= threshold {
                quiet += 1;
            } else {
                quiet = 0;
            }
            total.value.add_scaled(&chunk.value, 1.0);
            total.error += chunk.error;
            total.mass += chunk.mass;
            total.evaluations += chunk.evaluations;
            if total.evaluations > opts.max_evals * 8 {
                return Err(Error::accuracy(context, total.error, opts.abs_tol));
            }
            edge = next;
            width *= 2.0;
            if (limit - edge) * direction <= 0.0 {
                // doubling can land on the limit one quiet chunk early
                if quiet == 0 {
                    return Err(Error::divergence(context, endpoint));
                }
                break;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 4.0 - 4.0, epsilon = 1e-14);
        let r = integrate(|x: f64| x.powi(6), -1.0, 1.0, QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0 / 7.0, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_handles_kink() {
        let r = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, QuadOptions::abs(1e-11)).unwrap();
        assert_relative_eq!(r.value, 4.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn complex_oscillation() {
        // ∫_0^{2π} e^{i 5 x} dx = 0
        let r = integrate_segmented(
            |x: f64| Complex64::new(0.0, 5.0 * x).exp(),
            0.0,
            std::f64::consts::TAU,
            1.0,
            QuadOptions::abs(1e-12),
        )
        .unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn line_integral_gamma() {
        // ∫ e^{w} e^{-e^w} dw = Γ(1) = 1
        let r = integrate_line(
            |w: f64| (w - w.exp()).exp(),
            LineWindow::default(),
            QuadOptions::abs(1e-12),
            "gamma",
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-11);
    }

    #[test]
    fn line_integral_divergence_names_endpoint() {
        let err = integrate_line(
            |w: f64| (-(w.min(0.0)).abs()).exp().max(if w > 0.0 { 1.0 } else { 0.0 }),
            LineWindow::default(),
            QuadOptions::abs(1e-10),
            "flat tail",
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Divergence {
                endpoint: Endpoint::Infinity,
                ..
            }
        ));
        let err = integrate_line(
            |w: f64| if w < 0.0 { 1.0 } else { (-w).exp() },
            LineWindow::default(),
            QuadOptions::abs(1e-10),
            "flat head",
        )
        .unwrap_err();
        assert!(matches!(
            err,
            Error::Divergence {
                endpoint: Endpoint::Zero,
                ..
            }
        ));
    }

    #[test]
    fn budget_exhaustion_is_accuracy_error() {
        let err = integrate(
            |x: f64| (1.0 / x).sin(),
            1e-9,
            1.0,
            QuadOptions::abs(1e-14).with_max_evals(300),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }
}
