//! Run configuration: JSON file, then `DTC_*` environment variables, then
//! command-line flags, each layer overriding the previous one.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dtc_core::experiments::InitialStateSpec;
use dtc_core::SpinNetworkConfig;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Prefix of environment overrides, e.g. `DTC_GAMMA_T=0.05`.
pub const ENV_PREFIX: &str = "DTC_";

/// Every run parameter, in units where the drive period is `T = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n_sites: usize,
    /// Coupling `J0 T / 2 pi`.
    pub j0_t_over_2pi: f64,
    pub alpha: f64,
    /// Dephasing `gamma T`.
    #[serde(alias = "gammaT")]
    pub gamma_t: f64,
    /// Rotational error of the pi kick.
    pub epsilon: f64,
    /// Kick segment `T1 / T`; the kick strength keeps `2 g T1 = pi`.
    pub t1_over_t: f64,
    /// Disorder strength `W / J0` for single runs.
    pub w_over_j0: f64,
    /// Disorder seed of single runs and base seed of sweeps.
    pub seed: u64,
    /// `0`/`1`/`+` pattern, `mixed_b`, or `seed:<k>`; defaults to `1` on the
    /// first half and `+` on the rest.
    pub initial_state: Option<String>,
    pub n_periods: usize,
    /// `W / J0` grid of `gap-sweep` and `twosite`.
    pub w_over_j0_values: Option<Vec<f64>>,
    pub n_realizations: usize,
    /// Output directory.
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_sites: 6,
            j0_t_over_2pi: 0.2,
            alpha: 1.51,
            gamma_t: 0.02,
            epsilon: 0.0,
            t1_over_t: 0.5,
            w_over_j0: 0.0,
            seed: 0,
            initial_state: None,
            n_periods: 200,
            w_over_j0_values: None,
            n_realizations: dtc_core::experiments::DEFAULT_REALIZATIONS,
            output: PathBuf::from("out"),
        }
    }
}

fn key_error(key: &str, reason: impl std::fmt::Display) -> anyhow::Error {
    let alias = if key == "gamma_t" { " (gammaT)" } else { "" };
    anyhow::anyhow!("invalid value for `{key}`{alias}: {reason}")
}

impl RunConfig {
    pub fn j0(&self) -> f64 {
        self.j0_t_over_2pi * 2.0 * PI
    }

    /// Checks every field, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let finite = |key: &str, v: f64| if v.is_finite() { Ok(()) } else { Err(key_error(key, format!("{v} is not finite"))) };
        if !(2..=dtc_core::config::DEFAULT_DENSE_LIMIT).contains(&self.n_sites) {
            return Err(key_error("n_sites", format!("{} outside [2, {}]", self.n_sites, dtc_core::config::DEFAULT_DENSE_LIMIT)));
        }
        for (key, v) in [
            ("j0_t_over_2pi", self.j0_t_over_2pi),
            ("alpha", self.alpha),
            ("gamma_t", self.gamma_t),
            ("epsilon", self.epsilon),
            ("w_over_j0", self.w_over_j0),
        ] {
            finite(key, v)?;
            if v < 0.0 {
                return Err(key_error(key, format!("{v} is negative")));
            }
        }
        finite("t1_over_t", self.t1_over_t)?;
        if !(self.t1_over_t > 0.0 && self.t1_over_t < 1.0) {
            return Err(key_error("t1_over_t", format!("{} outside (0, 1)", self.t1_over_t)));
        }
        if self.n_periods == 0 {
            return Err(key_error("n_periods", "must be at least 1"));
        }
        if self.n_realizations == 0 {
            return Err(key_error("n_realizations", "must be at least 1"));
        }
        if let Some(values) = &self.w_over_j0_values {
            if values.is_empty() {
                return Err(key_error("w_over_j0_values", "is empty"));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(key_error("w_over_j0_values", format!("{v} is not a finite non-negative value")));
            }
        }
        self.initial_state_spec().map_err(|e| key_error("initial_state", e))?;
        Ok(())
    }

    pub fn initial_state_pattern(&self) -> String {
        self.initial_state.clone().unwrap_or_else(|| {
            (0..self.n_sites).map(|l| if l < self.n_sites / 2 { '1' } else { '+' }).collect()
        })
    }

    pub fn initial_state_spec(&self) -> Result<InitialStateSpec> {
        let raw = self.initial_state_pattern();
        let spec = if raw == "mixed_b" {
            InitialStateSpec::MixedB
        } else if let Some(k) = raw.strip_prefix("seed:") {
            InitialStateSpec::SeedSize(k.parse().with_context(|| format!("bad seed size {k:?}"))?)
        } else {
            InitialStateSpec::PurePattern(raw)
        };
        if let InitialStateSpec::PurePattern(p) = &spec {
            if p.chars().count() != self.n_sites {
                bail!("pattern {p:?} has {} symbols for {} sites", p.chars().count(), self.n_sites);
            }
            if let Some(c) = p.chars().find(|c| !matches!(c, '0' | '1' | '+')) {
                bail!("invalid symbol {c:?} (expected 0, 1 or +)");
            }
        }
        if let InitialStateSpec::SeedSize(k) = spec {
            if k > self.n_sites {
                bail!("seed size {k} exceeds {} sites", self.n_sites);
            }
        }
        Ok(spec)
    }

    /// Network parameters at disorder strength `w_over_j0` and `seed`.
    pub fn network(&self) -> SpinNetworkConfig {
        let mut cfg = self.clean_network();
        if self.w_over_j0 > 0.0 {
            cfg = cfg.sampled_disorder(self.w_over_j0 * self.j0(), self.seed);
        }
        cfg
    }

    /// Network parameters without disorder.
    pub fn clean_network(&self) -> SpinNetworkConfig {
        let mut cfg = SpinNetworkConfig::with_sites(self.n_sites)
            .j0(self.j0())
            .alpha(self.alpha)
            .gamma(self.gamma_t)
            .epsilon(self.epsilon);
        cfg.t1 = self.t1_over_t;
        cfg.t2 = 1.0 - self.t1_over_t;
        cfg.g = PI / (2.0 * cfg.t1);
        cfg
    }
}

/// Config keys, sorted.
pub fn keys() -> Vec<String> {
    match serde_json::to_value(RunConfig::default()) {
        Ok(Value::Object(m)) => m.keys().cloned().collect(),
        _ => unreachable!("RunConfig serializes to an object"),
    }
}

fn normalize(mut map: Map<String, Value>) -> Result<Map<String, Value>> {
    if let Some(v) = map.remove("gammaT") {
        if map.contains_key("gamma_t") {
            bail!("both `gamma_t` and its alias `gammaT` are set");
        }
        map.insert("gamma_t".into(), v);
    }
    Ok(map)
}

/// Reads a JSON object from `path`.
pub fn read_file_layer(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))? {
        Value::Object(m) => normalize(m),
        _ => bail!("config {} is not a JSON object", path.display()),
    }
}

/// `DTC_<KEY>` variables for every known key. Values parse as JSON when
/// possible and as plain strings otherwise.
pub fn env_layer(vars: impl IntoIterator<Item = (String, String)>) -> Map<String, Value> {
    let keys = keys();
    let mut out = Map::new();
    for (name, raw) in vars {
        let Some(rest) = name.strip_prefix(ENV_PREFIX) else { continue };
        let key = rest.to_ascii_lowercase();
        if keys.contains(&key) {
            let value = serde_json::from_str(&raw).unwrap_or(Value::String(raw));
            out.insert(key, value);
        }
    }
    out
}

/// Merges layers left to right and validates the result.
pub fn resolve(layers: impl IntoIterator<Item = Map<String, Value>>) -> Result<RunConfig> {
    let mut merged = Map::new();
    for layer in layers {
        merged.extend(normalize(layer)?);
    }
    let cfg: RunConfig = serde_json::from_value(Value::Object(merged)).map_err(|e| anyhow::anyhow!("config: {e}"))?;
    cfg.validate()?;
    Ok(cfg)
}
