use std::f64::consts::LN_2;

use nclab_core::multiplier::maximal::{ellinf_norm_bracket_seeded, MaximalFamily};
use nclab_core::multiplier::mellin::{inverse_mellin, mellin_of};
use nclab_core::multiplier::{hormander_constant, lambda_u, Coefficient};
use nclab_core::random::{positive, rng};
use nclab_core::special::gamma;
use nclab_core::{log_space, Element, MultiplierSpec};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn step(seed: u64, pieces: usize) -> Coefficient {
    let mut r = rng(seed);
    let mut breaks: Vec<f64> = (1..pieces).map(|_| r.random_range(0.01..50.0)).collect();
    breaks.sort_by(f64::total_cmp);
    let values = (0..pieces)
        .map(|_| Complex64::from_polar(r.random_range(0.0..1.0), r.random_range(-3.2..3.2)))
        .collect();
    Coefficient::Step { breaks, values }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mellin_of_exponential_is_gamma(xi in 0.3f64..3.0) {
        let got = mellin_of(|x| (-x).exp(), xi, 0.0, "test").unwrap();
        let want = statrs::function::gamma::gamma(xi);
        prop_assert!((got.re - want).abs() <= 1e-9 * want && got.im.abs() <= 1e-9 * want);
    }

    #[test]
    fn inverse_mellin_recovers_exponential(eta in 0.1f64..10.0) {
        let xi = 1.0;
        let got = inverse_mellin(|u| gamma(Complex64::new(xi, -u)), xi, eta).unwrap();
        prop_assert!((got.re - (-eta).exp()).abs() <= 1e-8 && got.im.abs() <= 1e-8);
    }

    #[test]
    fn lambda_is_bounded_by_two_over_cos_arg(seed in any::<u64>(), pieces in 1usize..6, r in 0.01f64..100.0, arg in -1.5f64..1.5) {
        // |Λ(η)| ≤ ∫ |η| e^{-t Re η/2} dt = 2|η|/Re η for |a| ≤ 1
        let eta = Complex64::from_polar(r, arg);
        let lam = lambda_u(&step(seed, pieces), eta).unwrap();
        prop_assert!(lam.norm() * arg.cos() <= 2.0 * (1.0 + 1e-12));
    }

    #[test]
    fn lambda_of_constant_is_twice_the_constant(re in -1.0f64..1.0, r in 0.01f64..100.0, arg in -1.5f64..1.5) {
        let c = Complex64::new(re, 0.0);
        let lam = lambda_u(&Coefficient::constant(c), Complex64::from_polar(r, arg)).unwrap();
        prop_assert!((lam - 2.0 * c).norm() <= 1e-12);
    }

    #[test]
    fn hormander_of_constant_is_c_log2(c in -5.0f64..5.0) {
        let m = MultiplierSpec::constant(c);
        let h = hormander_constant(&m, 0.0, 0, None, &log_space(1e-2, 1e2, 9)).unwrap();
        prop_assert!((h - c.abs() * LN_2).abs() <= 1e-10 * c.abs().max(1e-3));
    }

    #[test]
    fn ellinf_bracket_is_ordered(seed in any::<u64>(), n in 2usize..4, k in 1usize..4, p in 1.0f64..4.0) {
        let mut r = rng(seed);
        let xs: Vec<Element> = (0..k).map(|_| Element::new(positive(&mut r, n)).unwrap()).collect();
        let norms: Vec<f64> = xs.iter().map(|x| x.lp_norm(p).unwrap()).collect();
        let b = ellinf_norm_bracket_seeded(&MaximalFamily::from_elements(xs, p).unwrap(), seed).unwrap();
        let tol = 1e-9 * b.sum_bound;
        prop_assert!(b.lower <= b.upper + tol);
        prop_assert!(b.upper <= b.sum_bound + tol);
        // the largest member is a lower bound, the sum of norms an upper bound
        prop_assert!((b.lower - norms.iter().cloned().fold(0.0, f64::max)).abs() <= tol);
        prop_assert!((b.sum_bound - norms.iter().sum::<f64>()).abs() <= tol);
    }
}
