//! Ultracontractivity profile on the t-grid, plus the Markov diagnostics.

use nclab_core::semigroup::{markov_check, UltracontractivityProfile};
use nclab_core::Result;

use super::theorem11::{phi_profile, SALT_T11};
use super::Context;
use crate::report::VerificationReport;

pub fn profile(ctx: &Context) -> Result<UltracontractivityProfile> {
    phi_profile(ctx, &ctx.generator, SALT_T11)
}

pub fn verify_profile(ctx: &Context) -> Result<VerificationReport> {
    let p = profile(ctx)?;
    let markov = markov_check(&ctx.generator, &ctx.cfg.samples.markov_times, ctx.cfg.seed)?;
    let mut r = ctx.report("profile");
    r.check("markov", markov.markov());
    if ctx.cfg.generator.shift == 0.0 {
        r.check_estimate("unital", markov.unital);
    } else {
        r.note("unital", "not expected: T_t(1) = e^{-shift t} 1");
    }
    r.check_estimate("monotone", p.is_monotone());
    r.check("finite", p.norms.iter().all(|v| v.is_finite() && *v >= 0.0));
    if let (Some(a), Some(t)) = (p.phi_constant, p.phi_argmax) {
        r.constant("A", a).constant("A_argmax", t);
    }
    r.data("t", &p.t_grid).data("norm", &p.norms);
    r.data("certificate", p.certificates.iter().map(|c| c.as_str()).collect::<Vec<_>>());
    r.data("markov", &markov);
    Ok(r)
}
