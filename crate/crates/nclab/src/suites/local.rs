//! Nonhomogeneous Sobolev inequality ‖x‖_q ≤ C(‖L^s x‖₂ + ‖x‖₂) with
//! s = (1/2 − 1/q)ν, and its variant with ‖L^s x‖_q in place of ‖x‖₂.

use nclab_core::opnorm::operator_norm;
use nclab_core::{Element, NormMode, Result, Superoperator};
use rand::Rng;
use rayon::prelude::*;

use super::{fmax, ginibre_sample, positive_sample, Context};
use crate::report::VerificationReport;

const SALT_LOCAL: u64 = 51;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// second term ‖x‖₂
    Local,
    /// second term ‖L^s x‖_q; needs a trivial kernel
    AtInfinity,
}

fn power(ctx: &Context, s: f64) -> Result<Superoperator> {
    if s == 0.0 {
        return Ok(Superoperator::identity(ctx.n()));
    }
    ctx.spectrum.fractional_power(s)
}

fn ratio(ls: &Superoperator, x: &Element, q: f64, variant: Variant) -> Result<f64> {
    let y = ls.apply(x)?;
    let second = match variant {
        Variant::Local => x.lp_norm(2.0)?,
        Variant::AtInfinity => y.lp_norm(q)?,
    };
    let den = y.lp_norm(2.0)? + second;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(x.lp_norm(q)? / den)
}

/// Best ratio over `samples` random starts, the eigenelements and the
/// identity, refined by random-walk ascent from the four best starts.
pub fn best_ratio(ctx: &Context, q: f64, s: f64, variant: Variant, samples: usize) -> Result<f64> {
    let n = ctx.n();
    let ls = power(ctx, s)?;
    let mut starts: Vec<Element> = vec![Element::identity(n)];
    starts.extend(ctx.spectrum.eigen_elements().iter().cloned());
    for k in 0..samples {
        let mut rng = ctx.rng(SALT_LOCAL, k as u64);
        starts.push(if k % 2 == 0 { ginibre_sample(&mut rng, n)? } else { positive_sample(&mut rng, n, 0.0)? });
    }
    let mut scored: Vec<(f64, usize)> = starts
        .par_iter()
        .enumerate()
        .map(|(k, x)| Ok((ratio(&ls, x, q, variant)?, k)))
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let climbed: Vec<f64> = scored[..scored.len().min(4)]
        .par_iter()
        .map(|&(v0, k)| {
            let mut rng = ctx.rng(SALT_LOCAL ^ 0xff, k as u64);
            let mut x = starts[k].clone();
            let mut v = v0;
            let mut step = 0.3;
            for _ in 0..300 {
                if step < 1e-6 {
                    break;
                }
                let scale = x.lp_norm(2.0)?.max(1e-300);
                let dir = ginibre_sample(&mut rng, n)?;
                let dn = dir.lp_norm(2.0)?.max(1e-300);
                let trial = x.add(&dir.scale(step * scale / dn))?;
                let tv = ratio(&ls, &trial, q, variant)?;
                if tv > v {
                    x = trial;
                    v = tv;
                    step *= 1.3;
                } else if rng.random::<f64>() < 0.5 {
                    step *= 0.7;
                }
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(fmax(scored.iter().map(|s| s.0).chain(climbed)))
}

pub fn verify_local_sobolev(ctx: &Context) -> Result<VerificationReport> {
    let e = &ctx.cfg.exponents;
    let q = e.local_q;
    let s = e.local_alpha() * e.nu;
    let samples = ctx.cfg.samples.local;
    let c = best_ratio(ctx, q, s, Variant::Local, samples)?;
    let c_doubled = best_ratio(ctx, q, s, Variant::Local, 2 * samples)?;
    let stability = (c_doubled - c).abs() / c_doubled.max(1e-300);
    // ‖x‖_q ≤ |||(I + L^s)^{-1}|||_{2→q}(‖L^s x‖₂ + ‖x‖₂), so that norm bounds C
    let ls = power(ctx, s)?;
    let resolvent = ctx.spectrum.function(|v| 1.0 / (1.0 + if s == 0.0 { 1.0 } else if v <= 0.0 { 0.0 } else { v.powf(s) }))?;
    let reference = operator_norm(&resolvent, 2.0, q, NormMode::Auto, &ctx.norm_options(SALT_LOCAL))?.value;
    let unit = ratio(&ls, &Element::identity(ctx.n()), q, Variant::Local)?;

    let mut r = ctx.report("local-sobolev");
    r.constant("C", c).constant("C_doubled_samples", c_doubled).constant("s", s);
    r.constant("resolvent_2_to_q", reference);
    r.margin("stability", stability).margin("C_over_resolvent", c / reference);
    r.check("finite", c.is_finite() && c > 0.0);
    r.check_estimate("stable_under_doubling", stability <= ctx.cfg.tolerances.local_stability);
    r.check_estimate("resolvent_domination", c <= reference * 1.01);
    r.margin("unit_ratio", unit);
    if ctx.spectrum.kernel_dim() == 0 {
        let ci = best_ratio(ctx, q, s, Variant::AtInfinity, samples)?;
        r.constant("C_at_infinity", ci);
        r.check("at_infinity_finite", ci.is_finite() && ci > 0.0);
    } else {
        r.note("at_infinity", "skipped: generator has a nontrivial kernel");
    }
    Ok(r)
}

/// The localization-at-infinity variant alone; errors on a nontrivial kernel.
pub fn verify_localization_at_infinity(ctx: &Context) -> Result<VerificationReport> {
    ctx.require_trivial_kernel("localization at infinity")?;
    let e = &ctx.cfg.exponents;
    let c = best_ratio(ctx, e.local_q, e.local_alpha() * e.nu, Variant::AtInfinity, ctx.cfg.samples.local)?;
    let mut r = ctx.report("localization-at-infinity");
    r.constant("C", c);
    r.check("finite", c.is_finite() && c > 0.0);
    Ok(r)
}
