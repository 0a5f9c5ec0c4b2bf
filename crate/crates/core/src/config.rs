//! Drive and network parameters.
//!
//! Units: hbar = 1 and, for the default parameter set, the drive period
//! T = T1 + T2 = 1, so rates and energies are in units of 1/T.

use core::f64::consts::PI;

use alloc::format;

use crate::prelude::*;

/// Largest site count handled by the dense 4^N superoperator routines.
pub const DEFAULT_DENSE_LIMIT: usize = 6;

/// Largest site count accepted by the excitation-sector block routines.
pub const BLOCK_LIMIT: usize = 8;

/// Parameters of the two-segment drive on an N-site network.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinNetworkConfig {
    pub n_sites: usize,
    /// Coupling strength J0 (1/T).
    pub j0: f64,
    /// Interaction-range exponent; couplings fall off as J0 / |l - m|^alpha.
    pub alpha: f64,
    /// Kick strength g (1/T).
    pub g: f64,
    /// Rotational error of the kick.
    pub epsilon: f64,
    /// Kick segment duration.
    pub t1: f64,
    /// Interaction segment duration.
    pub t2: f64,
    /// Dephasing rate (1/T).
    pub gamma: f64,
    /// Declared disorder strength W; every on-site energy lies in [0, W].
    pub disorder_strength: f64,
    /// On-site energies W_l (1/T), one per site.
    pub disorder: Vec<f64>,
}

impl Default for SpinNetworkConfig {
    fn default() -> Self {
        Self::paper_default()
    }
}

impl SpinNetworkConfig {
    /// N = 6, J0 T / 2pi = 0.2, alpha = 1.51, gamma T = 0.02, eps = 0, W = 0,
    /// T1 = T2 = 1/2 and g = pi so that 2 g T1 = pi.
    pub fn paper_default() -> Self {
        Self::with_sites(6)
    }

    /// Default drive parameters on `n_sites` sites.
    pub fn with_sites(n_sites: usize) -> Self {
        Self {
            n_sites,
            j0: 0.2 * 2.0 * PI,
            alpha: 1.51,
            g: PI,
            epsilon: 0.0,
            t1: 0.5,
            t2: 0.5,
            gamma: 0.02,
            disorder_strength: 0.0,
            disorder: vec![0.0; n_sites],
        }
    }

    pub fn j0(mut self, j0: f64) -> Self {
        self.j0 = j0;
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Sets explicit on-site energies; the declared strength becomes their maximum.
    pub fn disorder(mut self, disorder: Vec<f64>) -> Self {
        self.disorder_strength = disorder.iter().copied().fold(0.0, f64::max);
        self.disorder = disorder;
        self
    }

    /// Draws on-site energies uniformly from [0, w] with the given seed.
    pub fn sampled_disorder(mut self, w: f64, seed: u64) -> Self {
        self.disorder = crate::operators::sample_disorder(self.n_sites, w, seed);
        self.disorder_strength = w;
        self
    }

    /// Drive period T = T1 + T2.
    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    /// Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: String| Err(Error::InvalidParameter { field, reason });
        if self.n_sites == 0 {
            return bad("n_sites", "must be at least 1".into());
        }
        if self.n_sites > BLOCK_LIMIT {
            return Err(Error::ExceedsDenseLimit { n_sites: self.n_sites, limit: BLOCK_LIMIT });
        }
        for (field, v) in [
            ("j0", self.j0),
            ("alpha", self.alpha),
            ("g", self.g),
            ("epsilon", self.epsilon),
            ("t1", self.t1),
            ("t2", self.t2),
            ("gamma", self.gamma),
            ("disorder_strength", self.disorder_strength),
        ] {
            if !v.is_finite() {
                return bad(field, format!("{v} is not finite"));
            }
        }
        if self.alpha < 0.0 {
            return bad("alpha", format!("{} is negative", self.alpha));
        }
        if self.epsilon < 0.0 {
            return bad("epsilon", format!("{} is negative", self.epsilon));
        }
        if self.t1 <= 0.0 {
            return bad("t1", format!("{} is not positive", self.t1));
        }
        if self.t2 <= 0.0 {
            return bad("t2", format!("{} is not positive", self.t2));
        }
        if self.gamma < 0.0 {
            return bad("gamma", format!("{} is negative", self.gamma));
        }
        if self.disorder.len() != self.n_sites {
            return bad(
                "disorder",
                format!("has {} entries for {} sites", self.disorder.len(), self.n_sites),
            );
        }
        if let Some(w) = self
            .disorder
            .iter()
            .find(|w| !w.is_finite() || **w < 0.0 || **w > self.disorder_strength)
        {
            return bad("disorder", format!("entry {w} outside [0, {}]", self.disorder_strength));
        }
        Ok(())
    }

    /// Validates and additionally rejects networks beyond the dense limit.
    pub fn validate_dense(&self) -> Result<()> {
        self.validate()?;
        if self.n_sites > DEFAULT_DENSE_LIMIT {
            return Err(Error::ExceedsDenseLimit { n_sites: self.n_sites, limit: DEFAULT_DENSE_LIMIT });
        }
        Ok(())
    }

    /// Whether every on-site energy is zero.
    pub fn is_clean(&self) -> bool {
        self.disorder.iter().all(|w| *w == 0.0)
    }
}
