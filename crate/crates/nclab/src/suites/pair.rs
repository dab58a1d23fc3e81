//! Conditions (1)–(6) for the configured pair, with closed-form checks for
//! the power family.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

use nclab_core::pairs::{
    conjugate_symmetry_defect, delta2_constant, equivalence_check, increase_margin, integral_condition,
    psi_control_constant, sector_ratio_over, submultiplicative_constant,
};
use nclab_core::special::gamma_real;
use nclab_core::{PairFamily, Result};

use super::Context;
use crate::report::VerificationReport;

pub fn verify_pair(ctx: &Context) -> Result<VerificationReport> {
    let pair = &ctx.pair;
    let t = ctx.cfg.grids.t.points();
    let r_grid = ctx.cfg.grids.r.points();
    let theta = 1.0;
    let delta2 = delta2_constant(pair, &t)?;
    let d = integral_condition(pair, theta, &t)?;
    let sector = sector_ratio_over(pair, FRAC_PI_4, &r_grid, 400)?;
    let bracket = equivalence_check(pair, theta, FRAC_PI_3, 50)?;
    let sub = submultiplicative_constant(pair, &t)?;
    let control = psi_control_constant(pair, ctx.cfg.exponents.alpha(), &t, &r_grid)?;
    let increase = increase_margin(pair, &t);
    let symmetry = conjugate_symmetry_defect(pair, 200, ctx.cfg.seed);

    let mut r = ctx.report("verify-pair");
    r.constant("delta2", delta2).constant("D_phi_theta", d).constant("C_psi_omega", sector);
    r.constant("equivalence_lower", bracket.lower).constant("equivalence_upper", bracket.upper);
    r.constant("C_phi", sub).constant("psi_control", control);
    r.margin("increase", increase).margin("conjugate_symmetry_defect", symmetry);
    r.check("delta2_finite", delta2.is_finite());
    r.check("integral_condition_finite", d.is_finite());
    r.check("sector_ratio_positive", sector > 0.0);
    r.check("equivalence_bracket", bracket.lower > 0.0 && bracket.upper.is_finite());
    r.check("increasing", increase > 0.0);
    r.check("conjugate_symmetry", symmetry <= 1e-12);
    r.check("psi_control_finite", control.is_finite());
    if pair.family() == PairFamily::Power {
        let a = pair.alpha();
        let g = gamma_real(a * theta);
        r.check("delta2_closed_form", (delta2 - 2f64.powf(a)).abs() <= 1e-8);
        r.check("integral_condition_closed_form", (d - 1.0 / (a * theta)).abs() <= 1e-8);
        r.check("equivalence_closed_form", (bracket.lower - g).abs() <= 1e-6 && (bracket.upper - g).abs() <= 1e-6);
        r.check("submultiplicative_equality", (sub - 1.0).abs() <= 1e-12);
    }
    r.note("family", format!("{:?}", pair.family()));
    Ok(r)
}
