//! Exact two-site results: the effective hopping of the two-period
//! Hamiltonian in the one-excitation sector, its critical disorder and the
//! two-site Liouvillian gap.
//!
//! Sites 0 and 1 carry on-site energies 0 and `W`. In the basis
//! `{|10>, |01>}` the interaction block is `2 J0 sx - W sz` and the pi kick
//! acts as `sx`, so two periods compose two SU(2) rotations about
//! `(2 J0, 0, -/+ W) / Omega` by the angle `a = -T2 Omega`. The drive period
//! is `T = 2 T2`.

use core::f64::consts::PI;

use crate::floquet::{floquet_map_2t, kick_unitary, matrix_exp, BRANCH_TOLERANCE};
use crate::linalg::eigensystem;
use crate::operators::hamiltonian_interaction;
use crate::prelude::*;
use crate::spectra::{liouvillian_gap, map_spectrum, DEFAULT_ZERO_THRESHOLD};
use crate::SpinNetworkConfig;

/// Two-period effective Hamiltonian `[[eps0, K], [conj K, eps1]]` on
/// `{|10>, |01>}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteEffective {
    pub eps0: f64,
    pub eps1: f64,
    pub k: c64,
    /// Rotation angle of one segment, `-T2 Omega`.
    pub a: f64,
    /// Composed rotation angle in `[0, pi]`.
    pub c: f64,
    /// Set when an eigenphase of the two-period block sits within
    /// [`BRANCH_TOLERANCE`] of the log branch cut.
    pub near_branch: bool,
}

impl TwoSiteEffective {
    pub fn coupling(&self) -> f64 {
        self.k.norm()
    }
}

fn check(j0: f64, w: f64, t2: f64) -> Result<()> {
    for (field, v, ok) in [("j0", j0, j0 > 0.0), ("w", w, w >= 0.0), ("t2", t2, t2 > 0.0)] {
        if !ok || !v.is_finite() {
            return Err(Error::InvalidParameter { field, reason: alloc::format!("{v} out of range") });
        }
    }
    Ok(())
}

/// Closed-form effective coupling.
pub fn analytic_effective_coupling(j0: f64, w: f64, t2: f64) -> Result<TwoSiteEffective> {
    check(j0, w, t2)?;
    let period = 2.0 * t2;
    let omega = (4.0 * j0 * j0 + w * w).sqrt();
    let a = -t2 * omega;
    let (s, co) = (t2 * omega).sin_cos();
    let (p, q) = (2.0 * j0 / omega, w / omega);
    // sin(c / 2) = p |sin a|; cos(c) = 1 - 2 p^2 sin^2 a
    let half = (p * s.abs()).min(1.0);
    let c = 2.0 * half.asin();
    // the rotation axis, with the 1 / sin(c) of the log already cancelled
    let norm = (co * co + q * q * s * s).sqrt();
    let k = if s == 0.0 || norm == 0.0 {
        c64::new(0.0, 0.0)
    } else {
        c64::new(co, q * s) * (c / (2.0 * period) * s.signum() / norm)
    };
    let near_branch = (c - PI).abs() < BRANCH_TOLERANCE;
    Ok(TwoSiteEffective { eps0: 0.0, eps1: 0.0, k, a, c, near_branch })
}

/// N = 2 network with energies `(0, W)`, `T1 = T2` and an exact pi kick.
pub fn two_site_config(j0: f64, w: f64, t2: f64, gamma: f64) -> SpinNetworkConfig {
    let mut cfg = SpinNetworkConfig::with_sites(2).j0(j0).gamma(gamma).disorder(vec![0.0, w]);
    cfg.t1 = t2;
    cfg.t2 = t2;
    cfg.g = PI / (2.0 * t2);
    cfg
}

/// `(i / 2T) log` of the one-excitation block of the squared Floquet
/// operator, from explicit matrix exponentials.
pub fn two_site_numeric_coupling(j0: f64, w: f64, t2: f64) -> Result<TwoSiteEffective> {
    check(j0, w, t2)?;
    let cfg = two_site_config(j0, w, t2, 0.0);
    let h2 = hamiltonian_interaction(&cfg);
    let u2 = matrix_exp((h2 * faer::Scale(c64::new(0.0, -t2))).as_ref())?;
    let f = u2 * kick_unitary(&cfg);
    let f2 = &f * &f;
    let idx = [2usize, 1];
    let block = Mat::from_fn(2, 2, |r, c| f2[(idx[r], idx[c])]);
    let es = eigensystem(block.as_ref())?;
    let near_branch = es.values.iter().any(|mu| PI - mu.arg().abs() < BRANCH_TOLERANCE);
    let h = crate::linalg::spectral_function(&es, |mu| c64::new(0.0, 1.0 / (2.0 * cfg.period())) * mu.ln());
    let composed = es.values.iter().map(|mu| mu.arg().abs()).fold(0.0, f64::max);
    Ok(TwoSiteEffective {
        eps0: h[(0, 0)].re,
        eps1: h[(1, 1)].re,
        k: h[(0, 1)],
        a: -t2 * (4.0 * j0 * j0 + w * w).sqrt(),
        c: composed,
        near_branch,
    })
}

/// Rough critical disorder `pi / T2 (1 - gamma / (2 J0 + gamma))`.
pub fn critical_disorder_estimate(j0: f64, gamma: f64, t2: f64) -> f64 {
    PI / t2 * (1.0 - gamma / (2.0 * j0 + gamma))
}

/// Grid resolution of the crossing scan.
const SCAN_POINTS: usize = 4000;

/// Smallest `W` in `(0, w_max]` with `|K|(W) = gamma`, from the closed form:
/// a uniform scan for the first sign change, then bisection.
pub fn numeric_crossing(j0: f64, gamma: f64, t2: f64, w_max: f64) -> Result<f64> {
    let f = |w: f64| analytic_effective_coupling(j0, w, t2).map(|e| e.coupling() - gamma);
    let mut lo = 0.0;
    if f(lo)? <= 0.0 {
        return Err(Error::NoCrossing);
    }
    for k in 1..=SCAN_POINTS {
        let hi = w_max * k as f64 / SCAN_POINTS as f64;
        let f_hi = f(hi)?;
        if f_hi <= 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if f(m)? > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        lo = hi;
    }
    Err(Error::NoCrossing)
}

/// Liouvillian gap of the dephased two-site network for each `W`, from the
/// full two-period map; `None` when nothing decays.
pub fn two_site_gap_curve(j0: f64, gamma: f64, t2: f64, w_values: &[f64]) -> Result<Vec<Option<f64>>> {
    w_values
        .iter()
        .map(|&w| {
            check(j0, w, t2)?;
            let map = floquet_map_2t(&two_site_config(j0, w, t2, gamma))?;
            Ok(liouvillian_gap(&map_spectrum(&map)?, DEFAULT_ZERO_THRESHOLD).gap)
        })
        .collect()
}
