//! Noncommutative `L_p` analysis on finite tracial matrix algebras.
//!
//! Elements of `M_n` carry the normalized trace `τ = Tr/n`. Superoperators
//! act on the `n²`-dimensional Hilbert space `L_2(M_n, τ)` and are stored as
//! dense matrices in the orthonormal basis `{√n E_ij}`.

pub mod error;
pub mod multiplier;
pub mod opnorm;
pub mod pairs;
pub mod quad;
pub mod random;
pub mod semigroup;
pub mod special;
pub mod spectral;
pub mod subordination;
pub mod tracial;

pub use error::{Endpoint, Error, Result};
pub use multiplier::MultiplierSpec;
pub use opnorm::{operator_norm, Certificate, NormEstimate, NormMode, NormOptions};
pub use pairs::{PairFamily, PairSpec, RegularPair};
pub use semigroup::{build_generator, GeneratorSpec, Semigroup};
pub use spectral::{SpectralDecomposition, Superoperator};
pub use tracial::{Element, SingularFunction, TracialAlgebra};

/// `count` points log-spaced from `a` to `b` inclusive.
pub fn log_space(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..count)
                .map(|k| {
                    if k + 1 == count {
                        b
                    } else {
                        (la + (lb - la) * k as f64 / (count - 1) as f64).exp()
                    }
                })
                .collect()
        }
    }
}
