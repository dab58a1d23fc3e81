//! Spectral multipliers through the Mellin representation, and the
//! maximal-function bound.

use std::f64::consts::PI;

use nclab_core::multiplier::maximal::{maximal_operator_check, MaximalOptions};
use nclab_core::multiplier::mellin::{hypothesis_integral, inverse_mellin, mellin_m_n, mellin_transform, GrowthModel};
use nclab_core::multiplier::{hormander_constant, lambda_u, Coefficient};
use nclab_core::opnorm::operator_norm;
use nclab_core::{log_space, Error, MultiplierSpec, NormMode, NormOptions, Result};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{fmax, ginibre_sample, Context};
use crate::report::VerificationReport;

const SALT_MULT: u64 = 71;
const SALT_MAX: u64 = 72;

/// The configured symbol: a CSV table when given, else a built-in.
pub fn symbol(ctx: &Context) -> Result<MultiplierSpec> {
    let mc = &ctx.cfg.multiplier;
    match &mc.table {
        Some(path) => {
            let full = match &ctx.base_dir {
                Some(dir) => dir.join(path),
                None => path.into(),
            };
            let file = std::fs::File::open(&full)
                .map_err(|e| Error::Validation(format!("multiplier table {}: {e}", full.display())))?;
            MultiplierSpec::from_csv(path.clone(), file, mc.table_order)
        }
        None => MultiplierSpec::builtin(&mc.symbol),
    }
}

/// |||L^{iu}|||_{p→p} on the u-grid.
pub fn imaginary_power_norms(ctx: &Context, p: f64) -> Result<Vec<(f64, f64)>> {
    ctx.cfg
        .grids
        .u
        .points()
        .par_iter()
        .enumerate()
        .map(|(k, &u)| {
            let op = ctx.spectrum.imaginary_power(u)?.operator;
            Ok((u, operator_norm(&op, p, p, NormMode::Auto, &ctx.norm_options(SALT_MULT + k as u64))?.value))
        })
        .collect()
}

/// max |Λ(η)| sin ε over random step coefficients and η with
/// |arg η| ≤ π/2 − ε; the bound says this stays ≤ 2.
pub fn lambda_bound_samples(ctx: &Context, samples: usize) -> Result<f64> {
    let rows: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ctx.rng(SALT_MULT ^ 0x1a, k as u64);
            let eps: f64 = rng.random_range(0.02..1.5);
            let arg = rng.random_range(-1.0..1.0) * (PI / 2.0 - eps);
            let eta = Complex64::from_polar(10f64.powf(rng.random_range(-2.0..2.0)), arg);
            let pieces = rng.random_range(0..6);
            let mut breaks: Vec<f64> = (0..pieces).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect();
            breaks.sort_by(f64::total_cmp);
            let values = (0..=pieces)
                .map(|_| Complex64::from_polar(rng.random_range(0.0..1.0), rng.random_range(-PI..PI)))
                .collect();
            let a = Coefficient::Step { breaks, values };
            Ok(lambda_u(&a, eta)?.norm() * eps.sin())
        })
        .collect::<Result<_>>()?;
    Ok(fmax(rows))
}

pub fn verify_multiplier(ctx: &Context) -> Result<VerificationReport> {
    let mc = &ctx.cfg.multiplier;
    let m = symbol(ctx)?;
    let p = ctx.cfg.exponents.p;
    let r_grid = ctx.cfg.grids.r.points();
    let horm = hormander_constant(&m, mc.hormander_alpha, mc.chi, Some(&ctx.pair), &r_grid)?;

    let norms = imaginary_power_norms(ctx, p)?;
    let (growth, fit_rms) = match mc.growth {
        Some(g) => (GrowthModel::from(g), None),
        None => {
            let (g, rms) = GrowthModel::fit(&norms)?;
            (g, Some(rms))
        }
    };
    let hyp = hypothesis_integral(&m, mc.n, growth, &ctx.cfg.grids.mellin_t.points())?;

    let etas = log_space(0.1, 10.0, 5);
    let xi = mc.xi;
    let transform = |u: f64| mellin_transform(&m, xi, u).unwrap_or(Complex64::new(f64::NAN, 0.0));
    let roundtrip = fmax(
        etas.iter()
            .map(|&eta| inverse_mellin(transform, xi, eta).map(|v| (v - m.eval(eta)).norm()))
            .collect::<Result<Vec<_>>>()?,
    );

    let one = MultiplierSpec::builtin("one")?;
    let m1_defect = fmax(
        [0.5, 1.0, 2.0]
            .iter()
            .map(|&t| mellin_m_n(&one, 1, t, 0.0).map(|v| (v - 2.0).norm()))
            .collect::<Result<Vec<_>>>()?,
    );

    let m_of_l = ctx.spectrum.function(|v| m.eval(v.max(0.0)))?;
    let m_norm = operator_norm(&m_of_l, p, p, NormMode::Auto, &ctx.norm_options(SALT_MULT ^ 0x2b))?.value;
    let lambda = lambda_bound_samples(ctx, ctx.cfg.samples.lambda)?;

    let mut r = ctx.report("multiplier");
    r.constant("hormander", horm).constant("m_L_p_norm", m_norm);
    r.constant("growth_c", growth.c).constant("growth_kappa", growth.kappa);
    r.constant("hypothesis_integral", hyp.value).constant("hypothesis_u_max", hyp.u_max);
    r.margin("hypothesis_tail", hyp.tail_bound).margin("sup_refinement_change", hyp.sup_refinement_change);
    r.margin("mellin_roundtrip_err", roundtrip).margin("m1_n1_defect", m1_defect);
    r.margin("lambda_times_sin_eps", lambda);
    if let Some(rms) = fit_rms {
        r.margin("growth_fit_rms", rms);
    }
    r.check("hormander_finite", horm.is_finite());
    r.check("hypothesis_finite", hyp.finite);
    r.check_estimate("hypothesis_sup_stable", !hyp.unstable);
    r.check("mellin_roundtrip", roundtrip <= ctx.cfg.tolerances.mellin_roundtrip);
    r.check("m1_n1_equals_two", m1_defect <= 1e-6);
    r.check("lambda_bound", lambda <= 2.0 + 1e-9);
    r.check("multiplier_norm_finite", m_norm.is_finite());
    if let Some(d) = &hyp.divergence {
        r.note("hypothesis_divergence", d.clone());
    }
    r.note("symbol", m.name());
    r.data("imaginary_power_norms", &norms);
    Ok(r)
}

pub fn verify_maximal(ctx: &Context) -> Result<VerificationReport> {
    ctx.require_trivial_kernel("the maximal-function suite")?;
    let e = &ctx.cfg.exponents;
    let m = MultiplierSpec::builtin(&ctx.cfg.multiplier.maximal_symbol)?;
    let alpha = e.nu * (1.0 / e.p - 1.0 / e.q);
    let x = ginibre_sample(&mut ctx.rng(SALT_MAX, 0), ctx.n())?;
    let opts = MaximalOptions {
        norm: NormOptions {
            restarts: ctx.cfg.samples.norm_restarts.min(16),
            ..ctx.norm_options(SALT_MAX)
        },
        ..MaximalOptions::default()
    };
    let check = maximal_operator_check(&m, alpha, &ctx.generator, &x, e.p, e.q, &ctx.cfg.grids.maximal_t.points(), &opts)?;

    let mut r = ctx.report("maximal");
    r.constant("alpha", alpha).constant("bracket_lower", check.bracket.lower).constant("bracket_upper", check.bracket.upper);
    r.check("bracket_ordered", check.bracket.lower <= check.bracket.upper * (1.0 + 1e-12));
    match (&check.hypothesis_failed, check.bound, check.within_slack) {
        (Some(why), _, _) => {
            r.verdict("bound_within_slack", crate::report::Verdict::Flagged);
            r.note("hypothesis", why.clone());
        }
        (None, Some(bound), Some(ok)) => {
            r.constant("bound", bound);
            r.margin("upper_over_bound", check.bracket.upper / bound);
            r.check_estimate("bound_within_slack", ok);
        }
        _ => {}
    }
    r.data("check", &check);
    Ok(r)
}
