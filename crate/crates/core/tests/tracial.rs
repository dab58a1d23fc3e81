use nclab_core::random::{ginibre, positive, rng};
use nclab_core::Element;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

fn element(seed: u64, n: usize) -> Element {
    Element::new(ginibre(&mut rng(seed), n, n)).unwrap()
}

fn positive_element(seed: u64, n: usize) -> Element {
    Element::new(positive(&mut rng(seed), n)).unwrap()
}

/// ∫₀¹ μ_t(x)^p dt by midpoint rule on a fine grid; μ is constant on [k/n, (k+1)/n).
fn rearrangement_norm(x: &Element, p: f64) -> f64 {
    let mu = x.singular_numbers();
    let m = 12_000;
    let s: f64 = (0..m).map(|k| mu.eval((k as f64 + 0.5) / m as f64).powf(p)).sum();
    (s / m as f64).powf(1.0 / p)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn lp_norm_is_the_rearrangement_norm(seed in any::<u64>(), n in 2usize..5, p in 0.5f64..6.0) {
        let x = element(seed, n);
        let direct = x.lp_norm(p).unwrap();
        prop_assert!((direct - rearrangement_norm(&x, p)).abs() <= 1e-9 * direct);
        prop_assert!((x.adjoint().lp_norm(p).unwrap() - direct).abs() <= 1e-10 * direct);
    }

    #[test]
    fn holder(seed in any::<u64>(), n in 2usize..5, p in 1.05f64..8.0) {
        let x = element(seed, n);
        let y = element(seed ^ 0x9e37, n);
        let q = p / (p - 1.0);
        let lhs = x.trace_product(&y).unwrap().norm();
        let rhs = x.lp_norm(p).unwrap() * y.lp_norm(q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn lp_norms_increase_with_p(seed in any::<u64>(), n in 2usize..5, p in 0.5f64..4.0, dp in 0.1f64..4.0) {
        // τ is a normalized trace, so ‖·‖_p is nondecreasing in p
        let x = element(seed, n);
        prop_assert!(x.lp_norm(p).unwrap() <= x.lp_norm(p + dp).unwrap() * (1.0 + 1e-12));
        prop_assert!(x.lp_norm(p + dp).unwrap() <= x.lp_norm(f64::INFINITY).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn weak_norm_below_strong_norm(seed in any::<u64>(), n in 2usize..5, p in 1.0f64..5.0) {
        let x = element(seed, n);
        prop_assert!(x.lorentz_norm(p, f64::INFINITY).unwrap() <= x.lp_norm(p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn entropy_gap_scales_quadratically(seed in any::<u64>(), n in 2usize..5, c in 0.05f64..20.0) {
        let x = positive_element(seed, n);
        let g = x.entropy_gap().unwrap();
        let gc = x.scale(c).entropy_gap().unwrap();
        prop_assert!((gc - c * c * g).abs() <= 1e-10 * (c * c * g.abs()).max(1e-12));
        prop_assert!(g >= -1e-12);
    }

    #[test]
    fn entropy_gap_matches_eigenvalue_formula(seed in any::<u64>(), n in 2usize..5) {
        let x = positive_element(seed, n);
        // diagonal element with the same spectrum
        let (vals, _) = x.positive_eigen().unwrap();
        let d = Element::from_real_diagonal(&vals);
        let nf = n as f64;
        let norm2 = vals.iter().map(|v| v * v).sum::<f64>() / nf;
        let exact = vals.iter().map(|v| v * v * v.ln()).sum::<f64>() / nf - 0.5 * norm2 * norm2.ln();
        prop_assert!((d.entropy_gap().unwrap() - exact).abs() <= 1e-10 * exact.abs().max(1e-12));
        prop_assert!((x.entropy_gap().unwrap() - exact).abs() <= 1e-9 * exact.abs().max(1e-9));
    }
}

#[test]
fn identity_has_unit_norms() {
    let one = Element::identity(3);
    for p in [0.5, 1.0, 2.0, 7.0, f64::INFINITY] {
        assert!((one.lp_norm(p).unwrap() - 1.0).abs() < 1e-14);
    }
    assert!(one.entropy_gap().unwrap().abs() < 1e-15);
}
