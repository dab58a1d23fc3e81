//! Suite configuration: JSON with top-level keys `generator`, `pair`,
//! `exponents`, `grids`, `seed`, `tolerances`, and optionally `samples`
//! and `multiplier`.

use std::fmt;
use std::path::Path;

use nclab_core::multiplier::GrowthModel;
use nclab_core::{log_space, GeneratorSpec, PairSpec};
use serde::{Deserialize, Serialize};

/// A config problem, anchored to a line of the source text.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.source, self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Either explicit points or `{ "min", "max", "count" }` log-spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Points(Vec<f64>),
    Log { min: f64, max: f64, count: usize },
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::Points(v) => v.clone(),
            GridSpec::Log { min, max, count } => log_space(*min, *max, *count),
        }
    }

    fn log(min: f64, max: f64, count: usize) -> Self {
        GridSpec::Log { min, max, count }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grids {
    /// Profile and sup-over-t grid.
    pub t: GridSpec,
    /// Sample points for the |||L^{iu}||| growth fit.
    pub u: GridSpec,
    #[serde(rename = "R")]
    pub r: GridSpec,
    /// ε grid of the log-Sobolev suite.
    pub eps: GridSpec,
    /// t probes for sup_t |[𝔐 m_N](t,u)|.
    pub mellin_t: GridSpec,
    /// Family index of the maximal operator.
    pub maximal_t: GridSpec,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            t: GridSpec::log(1e-3, 1e3, 61),
            u: GridSpec::Points(vec![0.0, 0.5, 1.0, 2.0, 4.0, 8.0]),
            r: GridSpec::log(1e-3, 1e3, 25),
            eps: GridSpec::log(1e-2, 1e1, 20),
            mellin_t: GridSpec::log(1e-2, 1e2, 9),
            maximal_t: GridSpec::log(1e-2, 1e2, 9),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    /// Must equal 1/p − 1/q when given.
    pub alpha: Option<f64>,
    /// Intermediate exponent p < r < q of the weak-type splitting.
    pub r: f64,
    /// Weak (1, r) exponent of item (iv), α = 1 − 1/r.
    pub weak_r: f64,
    pub dirichlet_q: Vec<f64>,
    /// Target exponent of the local Sobolev suite, α = 1/2 − 1/q.
    pub local_q: f64,
    pub local_alpha: Option<f64>,
    pub nu: f64,
    pub subordination_alpha: Vec<f64>,
}

impl Default for Exponents {
    fn default() -> Self {
        Self {
            p: 1.5,
            q: 3.0,
            alpha: None,
            r: 2.0,
            weak_r: 2.0,
            dirichlet_q: vec![2.0, 2.5, 3.0, 4.0, 10.0],
            local_q: 4.0,
            local_alpha: None,
            nu: 1.0,
            subordination_alpha: vec![0.3, 0.5, 0.7],
        }
    }
}

impl Exponents {
    pub fn alpha(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }

    pub fn local_alpha(&self) -> f64 {
        0.5 - 1.0 / self.local_q
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Allowed ratio in estimate-versus-estimate comparisons.
    pub slack: f64,
    pub dirichlet_margin: f64,
    pub dirichlet_equality: f64,
    pub derivative_q: f64,
    pub derivative_t: f64,
    pub laplace: f64,
    pub semigroup_law: f64,
    pub fractional_generator: f64,
    pub fractional_power: f64,
    pub mellin_roundtrip: f64,
    pub local_stability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            slack: 10.0,
            dirichlet_margin: 1e-9,
            dirichlet_equality: 1e-10,
            derivative_q: 1e-6,
            derivative_t: 1e-5,
            laplace: 1e-6,
            semigroup_law: 1e-6,
            fractional_generator: 1e-4,
            fractional_power: 1e-6,
            mellin_roundtrip: 1e-6,
            local_stability: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Samples {
    pub norm_restarts: usize,
    pub weak_type: usize,
    pub splitting: usize,
    pub splitting_eps: usize,
    pub dirichlet: usize,
    pub derivative: usize,
    pub logsobolev: usize,
    pub local: usize,
    pub lambda: usize,
    pub markov_times: Vec<f64>,
}

impl Default for Samples {
    fn default() -> Self {
        Self {
            norm_restarts: 64,
            weak_type: 64,
            splitting: 50,
            splitting_eps: 20,
            dirichlet: 1000,
            derivative: 100,
            logsobolev: 50,
            local: 64,
            lambda: 1000,
            markov_times: vec![0.1, 1.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultiplierConfig {
    /// Built-in name (`one`, `exp-decay`, `rational-1`, `power:γ`, …).
    pub symbol: String,
    /// CSV table `eta,m` replacing `symbol`; relative to the config file.
    pub table: Option<String>,
    pub table_order: u8,
    #[serde(rename = "N")]
    pub n: u32,
    pub hormander_alpha: f64,
    pub chi: usize,
    /// Fixed growth model for |||L^{iu}|||_p; fitted from `grids.u` when absent.
    pub growth: Option<GrowthConfig>,
    /// Mellin abscissa of the round-trip check.
    pub xi: f64,
    pub maximal_symbol: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub c: f64,
    pub kappa: f64,
}

impl From<GrowthConfig> for GrowthModel {
    fn from(g: GrowthConfig) -> Self {
        GrowthModel { c: g.c, kappa: g.kappa }
    }
}

impl Default for MultiplierConfig {
    fn default() -> Self {
        Self {
            symbol: "exp-decay".into(),
            table: None,
            table_order: 3,
            n: 1,
            hormander_alpha: 0.0,
            chi: 2,
            growth: None,
            xi: 1.0,
            maximal_symbol: "exp-decay".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub generator: GeneratorSpec,
    pub pair: PairSpec,
    #[serde(default)]
    pub exponents: Exponents,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub multiplier: MultiplierConfig,
}

/// Parsed config plus the text it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: SuiteConfig,
    pub text: String,
    pub source: String,
    pub base_dir: Option<std::path::PathBuf>,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let source = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            source: source.clone(),
            line: 0,
            column: 0,
            message: format!("cannot read config: {e}"),
        })?;
        let mut loaded = Self::from_text(&text, &source)?;
        loaded.base_dir = path.parent().map(|p| p.to_path_buf());
        Ok(loaded)
    }

    pub fn from_text(text: &str, source: &str) -> Result<Self, ConfigError> {
        let config: SuiteConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            source: source.into(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let loaded = Self {
            config,
            text: text.into(),
            source: source.into(),
            base_dir: None,
        };
        loaded.validate()?;
        Ok(loaded)
    }

    /// Error anchored at the first occurrence of `"key"` in the text.
    pub fn error_at(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let needle = format!("\"{key}\"");
        let (line, column) = self
            .text
            .lines()
            .enumerate()
            .find_map(|(i, l)| l.find(&needle).map(|c| (i + 1, c + 1)))
            .unwrap_or((1, 1));
        ConfigError {
            source: self.source.clone(),
            line,
            column,
            message: message.into(),
        }
    }

    /// Like [`Self::error_at`], but searches for `key` only after the
    /// first occurrence of `"section"`.
    pub fn error_in(&self, section: &str, key: &str, message: impl Into<String>) -> ConfigError {
        let lines: Vec<&str> = self.text.lines().collect();
        let start = lines.iter().position(|l| l.contains(&format!("\"{section}\"")));
        let Some(start) = start else {
            return self.error_at(key, message);
        };
        let needle = format!("\"{key}\"");
        let (line, column) = lines[start..]
            .iter()
            .enumerate()
            .find_map(|(i, l)| {
                // the section line itself may hold the key after the section name
                let from = if i == 0 { l.find(&format!("\"{section}\"")).unwrap_or(0) + 1 } else { 0 };
                l[from..].find(&needle).map(|c| (start + i + 1, from + c + 1))
            })
            .unwrap_or((start + 1, 1));
        ConfigError {
            source: self.source.clone(),
            line,
            column,
            message: message.into(),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let e = &self.config.exponents;
        if !(e.p > 1.0 && e.p < e.q && e.q.is_finite()) {
            return Err(self.error_in("exponents", "p", format!("need 1 < p < q < ∞, got p = {}, q = {}", e.p, e.q)));
        }
        if let Some(a) = e.alpha {
            if (a - e.alpha()).abs() > 1e-12 {
                return Err(self.error_in("exponents", "alpha", format!("alpha must equal 1/p − 1/q = {}, got {a}", e.alpha())));
            }
        }
        if !(e.r > e.p && e.r < e.q) {
            return Err(self.error_in("exponents", "r", format!("need p < r < q, got r = {}", e.r)));
        }
        if !(e.weak_r > 1.0 && e.weak_r.is_finite()) {
            return Err(self.error_in("exponents", "weak_r", format!("need 1 < weak_r < ∞, got {}", e.weak_r)));
        }
        if let Some(q) = e.dirichlet_q.iter().find(|q| !(**q >= 2.0 && q.is_finite())) {
            return Err(self.error_in("exponents", "dirichlet_q", format!("exponents must be finite and at least 2, got {q}")));
        }
        if !(e.local_q >= 2.0 && e.local_q.is_finite()) {
            return Err(self.error_in("exponents", "local_q", format!("need 2 ≤ local_q < ∞, got {}", e.local_q)));
        }
        if let Some(a) = e.local_alpha {
            if (a - e.local_alpha()).abs() > 1e-12 {
                return Err(self.error_in(
                    "exponents",
                    "local_alpha",
                    format!("local_alpha must equal 1/2 − 1/local_q = {}, got {a}", e.local_alpha()),
                ));
            }
        }
        if !(e.nu > 0.0 && e.nu.is_finite()) {
            return Err(self.error_in("exponents", "nu", format!("ν must be positive, got {}", e.nu)));
        }
        if let Some(a) = e.subordination_alpha.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(self.error_in("exponents", "subordination_alpha", format!("orders must lie in (0, 1), got {a}")));
        }
        let g = &self.config.grids;
        for (key, grid, allow_zero) in [
            ("t", &g.t, false),
            ("u", &g.u, true),
            ("R", &g.r, false),
            ("eps", &g.eps, false),
            ("mellin_t", &g.mellin_t, false),
            ("maximal_t", &g.maximal_t, false),
        ] {
            let pts = grid.points();
            let ok = !pts.is_empty()
                && pts.iter().all(|v| v.is_finite() && (*v > 0.0 || (allow_zero && *v == 0.0)))
                && pts.windows(2).all(|w| w[1] > w[0]);
            if !ok {
                return Err(self.error_in("grids", key, "grid must be nonempty, finite, positive and strictly increasing"));
            }
        }
        let t = &self.config.tolerances;
        if !(t.slack >= 1.0) {
            return Err(self.error_in("tolerances", "slack", "slack must be at least 1"));
        }
        let s = &self.config.samples;
        if s.norm_restarts == 0 || s.splitting == 0 || s.splitting_eps == 0 || s.local == 0 {
            return Err(self.error_at("samples", "sample counts must be positive"));
        }
        if self.config.multiplier.growth.is_some_and(|g| !(g.c > 0.0 && g.kappa >= 0.0)) {
            return Err(self.error_in("multiplier", "growth", "growth model needs c > 0 and kappa ≥ 0"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "generator": {"family": "depolarizing", "params": {"n": 2}, "shift": 1.0},
  "pair": {"family": "power", "alpha": 1.0}
}"#;

    #[test]
    fn defaults_fill_in() {
        let c = LoadedConfig::from_text(MINIMAL, "inline").unwrap().config;
        assert_eq!(c.grids.t.points().len(), 61);
        assert_eq!(c.grids.r.points().len(), 25);
        assert!((c.exponents.alpha() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn errors_are_line_anchored() {
        let bad = "{\n  \"generator\": {\"family\": \"depolarizing\", \"params\": {\"n\": 2}},\n  \"pair\": {\"family\": \"power\", \"alpha\": 1.0},\n  \"exponents\": {\"p\": 1.5, \"q\": 3.0,\n    \"alpha\": 0.5}\n}";
        let e = LoadedConfig::from_text(bad, "c.json").unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.to_string().starts_with("c.json:5:"));

        let syntax = "{\n  \"generator\": {\"family\": \"depolarizing\"\n  \"pair\": 1\n}";
        let e = LoadedConfig::from_text(syntax, "c.json").unwrap_err();
        assert_eq!(e.line, 3);

        let unknown = MINIMAL.replace("\"pair\"", "\"colour\": 1,\n  \"pair\"");
        assert!(LoadedConfig::from_text(&unknown, "c.json").is_err());
    }

    #[test]
    fn grid_forms() {
        let g: GridSpec = serde_json::from_str("[1, 2, 5]").unwrap();
        assert_eq!(g.points(), vec![1.0, 2.0, 5.0]);
        let g: GridSpec = serde_json::from_str(r#"{"min": 1, "max": 100, "count": 3}"#).unwrap();
        let p = g.points();
        assert!((p[1] - 10.0).abs() < 1e-12 && p[2] == 100.0);
    }
}
