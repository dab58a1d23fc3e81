//! Verification suites. Each suite takes the loaded configuration and
//! returns a [`VerificationReport`]; sample loops run in parallel and
//! reduce in sample order, so reports do not depend on the thread count.

use nclab_core::random::{self, SeededRng};
use nclab_core::{
    build_generator, Element, Error, NormOptions, RegularPair, Result, SpectralDecomposition, Superoperator,
};

use crate::config::{LoadedConfig, SuiteConfig};
use crate::report::{Provenance, VerificationReport};

pub mod local;
pub mod logsobolev;
pub mod multiplier;
pub mod pair;
pub mod profile;
pub mod subordinate;
pub mod theorem11;

pub use local::verify_local_sobolev;
pub use logsobolev::{verify_derivative_lemmas, verify_log_sobolev, verify_prop_4_4, Profile};
pub use theorem11::{verify_lemma_2_1, verify_theorem_1_1};

/// Everything a suite needs, built once from the configuration.
pub struct Context {
    pub cfg: SuiteConfig,
    pub generator: Superoperator,
    pub spectrum: SpectralDecomposition,
    pub pair: RegularPair,
    pub provenance: Provenance,
    pub base_dir: Option<std::path::PathBuf>,
}

impl Context {
    pub fn new(loaded: &LoadedConfig) -> Result<Self> {
        Self::with_seed(loaded, loaded.config.seed)
    }

    pub fn with_seed(loaded: &LoadedConfig, seed: u64) -> Result<Self> {
        let mut cfg = loaded.config.clone();
        cfg.seed = seed;
        let generator = build_generator(&cfg.generator)?;
        let spectrum = generator.eigendecompose()?;
        let pair = RegularPair::from_spec(&cfg.pair)?;
        Ok(Self {
            provenance: Provenance::new(&loaded.text, seed),
            cfg,
            generator,
            spectrum,
            pair,
            base_dir: loaded.base_dir.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.generator.n()
    }

    pub fn report(&self, suite: &str) -> VerificationReport {
        VerificationReport::new(suite, self.provenance.clone())
    }

    pub fn norm_options(&self, salt: u64) -> NormOptions {
        NormOptions {
            restarts: self.cfg.samples.norm_restarts,
            seed: self.cfg.seed.wrapping_add(salt.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
            ..NormOptions::default()
        }
    }

    /// Stream `index` of suite `salt`.
    pub fn rng(&self, salt: u64, index: u64) -> SeededRng {
        random::stream(self.cfg.seed ^ salt.wrapping_mul(0xd134_2543_de82_ef95), index)
    }

    pub fn require_trivial_kernel(&self, suite: &str) -> Result<()> {
        if self.spectrum.kernel_dim() > 0 {
            return Err(Error::Precondition(format!(
                "{suite} needs a generator with trivial kernel (kernel dimension {}); set a positive shift",
                self.spectrum.kernel_dim()
            )));
        }
        Ok(())
    }
}

/// Random strictly positive element G G*/n + floor·1, scaled to ‖x‖_∞ ≤ ~1.
pub fn positive_sample(rng: &mut SeededRng, n: usize, floor: f64) -> Result<Element> {
    let p = Element::new(random::positive(rng, n))?;
    let top = p.lp_norm(f64::INFINITY)?.max(1e-300);
    p.scale(1.0 / top).add(&Element::identity(n).scale(floor))
}

pub fn ginibre_sample(rng: &mut SeededRng, n: usize) -> Result<Element> {
    Element::new(random::ginibre(rng, n, n))
}

/// Worst relative error `|a − b| / max(|b|, tiny)`.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Max of finite values; NaN propagates as NaN.
pub fn fmax(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

pub fn fmin(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.min(v) })
}
