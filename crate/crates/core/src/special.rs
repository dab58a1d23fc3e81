//! Complex Gamma function (Lanczos, g = 7) and small complex helpers.

use std::f64::consts::PI;

use num_complex::Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for complex `z` away from the poles; relative accuracy about 1e-14
/// on moderate arguments.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection
        let s = (z * PI).sin();
        return Complex64::new(PI, 0.0) / (s * gamma(Complex64::new(1.0, 0.0) - z));
    }
    ln_gamma(z).exp()
}

/// Principal-branch-free log Γ for Re z ≥ 1/2 (sum of logs, so the
/// imaginary part is continuous in z).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    assert!(z.re >= 0.5, "ln_gamma needs Re z >= 1/2");
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += *c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Real Γ via the complex routine.
pub fn gamma_real(x: f64) -> f64 {
    gamma(Complex64::new(x, 0.0)).re
}

/// e^z − 1 without cancellation for small |z|.
pub fn expm1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        z * (1.0 + z * (0.5 + z / 6.0))
    } else if z.norm() < 0.5 {
        // e^{x+iy} - 1 = e^x (cos y - 1) + (e^x - 1) + i e^x sin y
        let ex = z.re.exp();
        let hs = (0.5 * z.im).sin();
        Complex64::new(z.re.exp_m1() - 2.0 * ex * hs * hs, ex * z.im.sin())
    } else {
        z.exp() - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn real_values() {
        assert_relative_eq!(gamma_real(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma_real(5.0), 24.0, max_relative = 1e-13);
        assert_relative_eq!(gamma_real(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma_real(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(
            gamma_real(0.3),
            statrs::function::gamma::gamma(0.3),
            max_relative = 1e-13
        );
    }

    #[test]
    fn modulus_on_imaginary_line() {
        // |Γ(1+iy)|² = πy / sinh(πy)
        for y in [0.1, 1.0, 3.0, 10.0, 40.0] {
            let g = gamma(Complex64::new(1.0, y));
            let expected = PI * y / (PI * y).sinh();
            assert_relative_eq!(g.norm_sqr(), expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn recurrence() {
        let z = Complex64::new(0.7, -2.3);
        let lhs = gamma(z + 1.0);
        let rhs = z * gamma(z);
        assert!((lhs - rhs).norm() < 1e-13 * lhs.norm());
    }

    #[test]
    fn expm1_small() {
        let z = Complex64::new(1e-9, -2e-9);
        assert!((expm1(z) - z).norm() < 1e-17);
        let z = Complex64::new(-0.2, 0.3);
        assert!((expm1(z) - (z.exp() - 1.0)).norm() < 1e-15);
    }
}
