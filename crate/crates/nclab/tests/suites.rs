use nclab::config::LoadedConfig;
use nclab::report::Verdict;
use nclab::suites::{self, local, multiplier, pair, Context, Profile};
use nclab_core::{Element, Error};

fn ctx(text: &str) -> Context {
    Context::new(&LoadedConfig::from_text(text, "inline").unwrap()).unwrap()
}

fn config(generator: &str, extra: &str) -> String {
    format!(r#"{{ "generator": {generator}, "pair": {{ "family": "power", "alpha": 1.0 }}, "seed": 9{extra} }}"#)
}

const DEPOL2: &str = r#"{ "family": "depolarizing", "params": { "n": 2 } }"#;
const DEPOL2_SHIFTED: &str = r#"{ "family": "depolarizing", "params": { "n": 2 }, "shift": 1.0 }"#;

#[test]
fn local_sobolev_unit_forces_c_at_least_one() {
    let c = ctx(&config(DEPOL2, r#", "samples": { "local": 8 }"#));
    let r = suites::verify_local_sobolev(&c).unwrap();
    assert_eq!(r.margins["unit_ratio"], 1.0);
    assert!(r.constants["C"] >= 1.0);
    assert!(r.notes.contains_key("at_infinity"));
    assert!(matches!(local::verify_localization_at_infinity(&c), Err(Error::Precondition(_))));
}

#[test]
fn local_sobolev_q2_is_the_identity_inequality() {
    let c = ctx(&config(DEPOL2_SHIFTED, r#", "exponents": { "local_q": 2.0 }, "samples": { "local": 8 }"#));
    let r = suites::verify_local_sobolev(&c).unwrap();
    assert_eq!(r.constants["s"], 0.0);
    assert!((r.constants["C"] - 0.5).abs() < 1e-12);
}

#[test]
fn local_sobolev_is_stable_on_a_schur_generator() {
    let g = r#"{ "family": "schur", "params": { "symbol": [[0,1,2,3],[1,0,1,2],[2,1,0,1],[3,2,1,0]] }, "shift": 0.5 }"#;
    let c = ctx(&config(g, r#", "exponents": { "local_q": 4.0 }, "samples": { "local": 32 }"#));
    let r = suites::verify_local_sobolev(&c).unwrap();
    assert_eq!(r.verdicts["stable_under_doubling"], Verdict::Pass, "{:?}", r.margins);
    assert!(r.constants["C_at_infinity"].is_finite());
}

#[test]
fn increasing_profile_is_rejected() {
    let c = ctx(&config(DEPOL2_SHIFTED, ""));
    let up = Profile::Tabulated {
        t: vec![0.01, 1.0, 10.0],
        values: vec![1.0, 2.0, 3.0],
    };
    assert!(matches!(suites::verify_log_sobolev(&c, &up), Err(Error::Validation(_))));
}

#[test]
fn non_markov_generator_is_a_precondition_error() {
    // x ↦ x − xᵀ: positive and self-adjoint, but the transpose is not completely positive
    let op = nclab_core::Superoperator::from_map(2, |x| {
        x.sub(&Element::new(x.matrix().transpose()).unwrap()).unwrap()
    })
    .unwrap();
    let spec = nclab_core::GeneratorSpec::custom(&op, 0.0);
    let g = serde_json::to_string(&spec).unwrap();
    let c = ctx(&config(&g, ""));
    assert!(matches!(suites::verify_prop_4_4(&c), Err(Error::Precondition(_))));
}

#[test]
fn maximal_needs_trivial_kernel() {
    let c = ctx(&config(DEPOL2, ""));
    assert!(matches!(multiplier::verify_maximal(&c), Err(Error::Precondition(_))));
}

#[test]
fn pair_suite_other_families() {
    for fam in [
        r#"{ "family": "power-ratio", "alpha": 1.0, "beta": 0.5 }"#,
        r#"{ "family": "power-log", "alpha": 1.0, "beta": 1.0 }"#,
    ] {
        let text = format!(r#"{{ "generator": {DEPOL2_SHIFTED}, "pair": {fam} }}"#);
        let r = pair::verify_pair(&ctx(&text)).unwrap();
        assert!(!r.failed(), "{fam}: {:?}", r.verdicts);
        assert!(!r.verdicts.contains_key("delta2_closed_form"));
    }
}

#[test]
fn power_pair_closed_forms() {
    let text = format!(r#"{{ "generator": {DEPOL2_SHIFTED}, "pair": {{ "family": "power", "alpha": 2.0 }} }}"#);
    let r = pair::verify_pair(&ctx(&text)).unwrap();
    assert_eq!(r.verdicts["delta2_closed_form"], Verdict::Pass);
    assert!((r.constants["delta2"] - 4.0).abs() < 1e-12);
    assert!((r.constants["D_phi_theta"] - 0.5).abs() < 1e-8);
}

#[test]
fn derivative_lemmas_on_a_schur_generator() {
    let g = r#"{ "family": "schur", "params": { "symbol": [[0,1,2],[1,0,1],[2,1,0]] } }"#;
    let c = ctx(&config(g, r#", "samples": { "derivative": 20 }"#));
    let r = suites::verify_derivative_lemmas(&c).unwrap();
    assert!(!r.failed(), "{:?} {:?}", r.verdicts, r.margins);
    assert_eq!(r.verdicts["unit_t_derivative_vanishes"], Verdict::Pass);
}

#[test]
fn tabulated_profile_route() {
    // a non-depolarizing generator goes through the estimated profile
    let g = r#"{ "family": "fourier-finite-abelian-group", "params": { "m": 3 }, "shift": 1.0 }"#;
    let c = ctx(&config(g, r#", "samples": { "logsobolev": 10 }"#));
    let p = Profile::for_context(&c).unwrap();
    assert!(matches!(p, Profile::Tabulated { .. }));
    let r = suites::verify_log_sobolev(&c, &p).unwrap();
    assert_eq!(r.verdicts["scale_invariance"], Verdict::Pass);
    assert_eq!(r.verdicts["profile_dominates_estimate"], Verdict::Pass, "{:?}", r.margins);
}
