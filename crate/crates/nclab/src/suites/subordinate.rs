//! Stable subordinators and the subordinated semigroup e^{-tL^α}.

use nclab_core::special::gamma_real;
use nclab_core::spectral::{fractional_power_resolvent, ResolventOptions};
use nclab_core::subordination::{
    density_eval, negative_moment, subordinate_semigroup, verify_laplace, EvaluationMethod, SubordinatorDensity,
};
use nclab_core::{log_space, Result, Superoperator};
use rayon::prelude::*;

use super::{fmax, Context};
use crate::report::VerificationReport;

const LAMBDAS: [f64; 5] = [0.0, 0.5, 1.0, 2.0, 10.0];

/// Largest entry difference relative to the larger 2→2 norm.
fn op_err(a: &Superoperator, b: &Superoperator) -> f64 {
    a.distance(b) / a.norm_2to2().max(b.norm_2to2()).max(1e-300)
}

pub fn verify_subordinate(ctx: &Context) -> Result<VerificationReport> {
    let alphas = &ctx.cfg.exponents.subordination_alpha;
    let tol = &ctx.cfg.tolerances;
    let l = &ctx.generator;

    let laplace = fmax(
        alphas
            .par_iter()
            .flat_map_iter(|&a| LAMBDAS.iter().map(move |&lam| verify_laplace(a, lam)))
            .collect::<Result<Vec<_>>>()?,
    );

    let closed = SubordinatorDensity::with_method(0.5, 1.0, EvaluationMethod::ClosedFormHalf)?;
    let contour = SubordinatorDensity::with_method(0.5, 1.0, EvaluationMethod::ContourInversion)?;
    let density_gap = fmax(
        log_space(0.05, 20.0, 12)
            .into_iter()
            .map(|s| Ok((density_eval(&closed, s)? - density_eval(&contour, s)?).abs()))
            .collect::<Result<Vec<_>>>()?,
    );

    // E[S^{-1}] = Γ(1 + 1/α) for the one-sided α-stable law at time 1
    let moments = fmax(
        alphas
            .iter()
            .map(|&a| Ok((negative_moment(a, 1.0)? - gamma_real(1.0 + 1.0 / a)).abs()))
            .collect::<Result<Vec<_>>>()?,
    );
    let half_moment = negative_moment(0.5, 1.0)?;

    let (s, t) = (0.5, 1.0);
    let mut law: f64 = 0.0;
    let mut spectral: f64 = 0.0;
    let mut generator: f64 = 0.0;
    let mut resolvent: f64 = 0.0;
    for &a in alphas {
        let ts = subordinate_semigroup(l, a, s)?;
        let tt = subordinate_semigroup(l, a, t)?;
        let tst = subordinate_semigroup(l, a, s + t)?;
        law = law.max(op_err(&ts.compose(&tt)?, &tst));
        let exact = ctx.spectrum.function(|v| (-t * v.max(0.0).powf(a)).exp())?;
        spectral = spectral.max(op_err(&tt, &exact));

        let la = ctx.spectrum.fractional_power(a)?;
        let lr = fractional_power_resolvent(l, a, ResolventOptions::default())?;
        resolvent = resolvent.max(op_err(&lr, &la));
        // Richardson on (I − T_h)/h = L^α − (h/2)L^{2α} + O(h²)
        let h = 1e-3;
        let id = Superoperator::identity(ctx.n());
        let d = |h: f64| -> Result<Superoperator> { Ok(id.sub(&subordinate_semigroup(l, a, h)?)?.scale(1.0 / h)) };
        let rich = d(h / 2.0)?.scale(2.0).sub(&d(h)?)?;
        generator = generator.max(op_err(&rich, &lr));
    }

    let mut r = ctx.report("subordinate");
    r.margin("laplace_err", laplace).margin("closed_vs_contour", density_gap);
    r.margin("negative_moment_err", moments).constant("negative_moment_half_1", half_moment);
    r.margin("semigroup_law_err", law).margin("spectral_err", spectral);
    r.margin("generator_err", generator).margin("resolvent_power_err", resolvent);
    r.check("laplace", laplace < tol.laplace);
    r.check("closed_form_matches_contour", density_gap < tol.laplace);
    r.check("negative_moment", moments < tol.laplace && (half_moment - 2.0).abs() < tol.laplace);
    r.check("semigroup_law", law < tol.semigroup_law);
    r.check("spectral_agreement", spectral < tol.semigroup_law);
    r.check("fractional_power_resolvent", resolvent < tol.fractional_power);
    r.check("generator_consistency", generator < tol.fractional_generator);
    r.data("alpha", alphas);
    Ok(r)
}
