//! Spectra of dynamical maps and generators: ordering, gap, steady states
//! and excitation-sector structure.

use crate::config::SpinNetworkConfig;
use crate::floquet::{floquet_map_2t, DynamicalMap};
use crate::linalg::{self, hermitian_part, trace};
use crate::operators::excitations;
use crate::prelude::*;
use crate::sectors::SectorBlocks;
use crate::superop::devectorize;

/// Default threshold on `|Re Lambda|` (units of `1/T`) below which an
/// eigenvalue belongs to the steady manifold.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-10;

/// Leakage allowed between sector blocks before the block path is refused.
pub const SECTOR_LEAKAGE_TOLERANCE: f64 = 1e-10;

/// Eigenvalues `Lambda` sorted by descending real part (then descending
/// imaginary part), with optional map multipliers and eigenvectors.
///
/// Left vectors are stored as columns normalized so that
/// `<<L_j|R_k>> = delta_jk`; the expansion coefficients of a state are
/// `c_l = <<L_l|rho>>`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<c64>,
    /// Map eigenvalues `mu = exp(Lambda * horizon)`, when the source is a map.
    pub multipliers: Option<Vec<c64>>,
    pub right_vectors: Option<Mat<c64>>,
    pub left_vectors: Option<Mat<c64>>,
    /// Duration generated by the source map, or `None` for a generator.
    pub source_horizon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResult {
    /// `-Re Lambda` of the slowest decaying mode outside the steady manifold,
    /// or `None` when every eigenvalue lies within the threshold.
    pub gap: Option<f64>,
    pub n_steady: usize,
    pub zero_threshold: f64,
}

impl GapResult {
    /// Relaxation time `1 / gap`.
    pub fn relaxation_time(&self) -> Option<f64> {
        self.gap.map(|g| 1.0 / g)
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStates {
    /// Hermitian, unit-trace fixed points.
    pub states: Vec<Mat<c64>>,
    /// Traceless zero modes.
    pub coherence_modes: Vec<Mat<c64>>,
}

/// `max |[Phi, N ⊗ I]|` and `max |[Phi, I ⊗ N^T]|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutantResidual {
    pub left: f64,
    pub right: f64,
}

impl CommutantResidual {
    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }
}

fn sort_order(values: &[c64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].re.total_cmp(&values[a].re).then(values[b].im.total_cmp(&values[a].im)));
    order
}

fn permute_columns(m: &Mat<c64>, order: &[usize]) -> Mat<c64> {
    Mat::from_fn(m.nrows(), order.len(), |i, j| m[(i, order[j])])
}

fn log_rates(mu: &[c64], horizon: f64) -> Vec<c64> {
    mu.iter().map(|z| z.ln() / horizon).collect()
}

impl SpectralData {
    /// Eigenvalues only, from map multipliers over `horizon`.
    pub fn from_multipliers(mu: Vec<c64>, horizon: f64) -> Self {
        let lambda = log_rates(&mu, horizon);
        let order = sort_order(&lambda);
        SpectralData {
            eigenvalues: order.iter().map(|&k| lambda[k]).collect(),
            multipliers: Some(order.iter().map(|&k| mu[k]).collect()),
            right_vectors: None,
            left_vectors: None,
            source_horizon: Some(horizon),
        }
    }

    /// Eigenvalues only, from generator eigenvalues.
    pub fn from_generator_eigenvalues(lambda: Vec<c64>) -> Self {
        let order = sort_order(&lambda);
        SpectralData {
            eigenvalues: order.iter().map(|&k| lambda[k]).collect(),
            multipliers: None,
            right_vectors: None,
            left_vectors: None,
            source_horizon: None,
        }
    }

    /// Evolves a vectorized state through time `t` using the spectral
    /// expansion `sum_l exp(Lambda_l t) c_l |R_l>>`.
    pub fn evolve(&self, v: &Col<c64>, t: f64) -> Result<Col<c64>> {
        let (right, left) = self.vectors()?;
        let coeffs = left.adjoint() * v;
        let weighted = Col::from_fn(coeffs.nrows(), |l| coeffs[l] * (self.eigenvalues[l] * t).exp());
        Ok(right * weighted)
    }

    /// `max |<<L_j|R_k>> - delta_jk|`.
    pub fn biorthogonality_error(&self) -> Result<f64> {
        let (right, left) = self.vectors()?;
        let g = left.adjoint() * right;
        let eye = linalg::identity(g.nrows());
        Ok(linalg::max_abs_diff(g.as_ref(), eye.as_ref()))
    }

    fn vectors(&self) -> Result<(&Mat<c64>, &Mat<c64>)> {
        match (&self.right_vectors, &self.left_vectors) {
            (Some(r), Some(l)) => Ok((r, l)),
            _ => Err(Error::InvalidParameter { field: "spectrum", reason: "eigenvectors were not computed".into() }),
        }
    }
}

fn from_eigensystem(es: linalg::Eigensystem, horizon: Option<f64>) -> SpectralData {
    let lambda = match horizon {
        Some(h) => log_rates(&es.values, h),
        None => es.values.clone(),
    };
    let order = sort_order(&lambda);
    let left = es.inverse.adjoint().to_owned();
    SpectralData {
        eigenvalues: order.iter().map(|&k| lambda[k]).collect(),
        multipliers: horizon.map(|_| order.iter().map(|&k| es.values[k]).collect()),
        right_vectors: Some(permute_columns(&es.right, &order)),
        left_vectors: Some(permute_columns(&left, &order)),
        source_horizon: horizon,
    }
}

/// Full eigensystem of a dynamical map; `Lambda = log(mu) / horizon` on the
/// principal branch.
pub fn eigendecompose_map(map: &DynamicalMap) -> Result<SpectralData> {
    let es = linalg::eigensystem(map.matrix.as_ref())?;
    Ok(from_eigensystem(es, Some(map.horizon)))
}

/// Full eigensystem of a generator.
pub fn eigendecompose_generator(l: MatRef<'_, c64>) -> Result<SpectralData> {
    let es = linalg::eigensystem(l)?;
    Ok(from_eigensystem(es, None))
}

/// Eigenvalues of a dense map, without eigenvectors.
pub fn map_spectrum(map: &DynamicalMap) -> Result<SpectralData> {
    Ok(SpectralData::from_multipliers(linalg::eigenvalues(map.matrix.as_ref())?, map.horizon))
}

/// Eigenvalues of a Hermiticity-preserving map given by its sector blocks.
pub fn block_spectrum(blocks: &SectorBlocks, horizon: f64) -> Result<SpectralData> {
    Ok(SpectralData::from_multipliers(blocks.eigenvalues_hermiticity_preserving()?, horizon))
}

/// Gap `-Re Lambda` of the first eigenvalue below `-zero_threshold`; every
/// eigenvalue with `|Re Lambda| <= zero_threshold` counts as steady.
pub fn liouvillian_gap(spec: &SpectralData, zero_threshold: f64) -> GapResult {
    let n_steady = spec.eigenvalues.iter().filter(|z| z.re.abs() <= zero_threshold).count();
    let gap = spec.eigenvalues.iter().map(|z| z.re).filter(|re| *re < -zero_threshold).fold(None, |acc: Option<f64>, re| {
        Some(acc.map_or(-re, |g| g.min(-re)))
    });
    GapResult { gap, n_steady, zero_threshold }
}

fn classify(modes: impl Iterator<Item = Mat<c64>>) -> SteadyStates {
    let mut out = SteadyStates { states: Vec::new(), coherence_modes: Vec::new() };
    for x in modes {
        let tr = trace(x.as_ref());
        let scale = linalg::max_norm(x.as_ref()).max(f64::MIN_POSITIVE);
        if tr.norm() > 1e-8 * scale {
            let y = Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] / tr);
            out.states.push(hermitian_part(y.as_ref()));
        } else {
            out.coherence_modes.push(x);
        }
    }
    out
}

fn is_zero_mode(z: c64, zero_threshold: f64) -> bool {
    z.re.abs() <= zero_threshold && z.im.abs() <= zero_threshold
}

/// Zero modes of a decomposed spectrum, split into trace-normalized,
/// Hermitized states and traceless coherence modes.
pub fn steady_states(spec: &SpectralData, zero_threshold: f64) -> Result<SteadyStates> {
    let (right, _) = spec.vectors()?;
    let modes = spec
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, z)| is_zero_mode(**z, zero_threshold))
        .map(|(k, _)| devectorize(&right.col(k).to_owned()))
        .collect::<Result<Vec<_>>>()?;
    Ok(classify(modes.into_iter()))
}

/// Zero modes of a sector-block map over `horizon`, computed block by block.
pub fn block_steady_states(blocks: &SectorBlocks, horizon: f64, zero_threshold: f64) -> Result<SteadyStates> {
    let d = blocks.layout.dim();
    let mut modes = Vec::new();
    for b in &blocks.blocks {
        let es = linalg::eigensystem(b.matrix.as_ref())?;
        let idx = blocks.layout.block_indices(b.k_left, b.k_right);
        for (k, mu) in es.values.iter().enumerate() {
            if is_zero_mode(mu.ln() / horizon, zero_threshold) {
                let mut v = Col::<c64>::zeros(d * d);
                for (r, &ir) in idx.iter().enumerate() {
                    v[ir] = es.right[(r, k)];
                }
                modes.push(devectorize(&v)?);
            }
        }
    }
    Ok(classify(modes.into_iter()))
}

/// Commutator of a dense superoperator with the left and right
/// excitation-number superoperators `N ⊗ I` and `I ⊗ N^T`. Both are
/// diagonal, so `[Phi, D]_rc = Phi_rc (D_c - D_r)`.
pub fn commutant_residual(map: MatRef<'_, c64>, n_sites: usize) -> CommutantResidual {
    let d = 1usize << n_sites;
    let left = |k: usize| excitations(k / d) as f64;
    let right = |k: usize| excitations(k % d) as f64;
    let mut out = CommutantResidual { left: 0.0, right: 0.0 };
    for c in 0..map.ncols() {
        for r in 0..map.nrows() {
            let m = map[(r, c)].norm();
            out.left = out.left.max(m * (left(c) - left(r)).abs());
            out.right = out.right.max(m * (right(c) - right(r)).abs());
        }
    }
    out
}

/// Residual of `[Phi_2T, N]` for both the left and right excitation
/// superoperators; vanishes when the kick maps sectors onto sectors.
pub fn excitation_superop_commutant_check(config: &SpinNetworkConfig) -> Result<CommutantResidual> {
    let map = floquet_map_2t(config)?;
    Ok(commutant_residual(map.matrix.as_ref(), config.n_sites))
}

/// Splits a dense map into sector blocks, refusing above
/// [`SECTOR_LEAKAGE_TOLERANCE`] so callers can fall back to the dense path.
pub fn sector_block_decompose(map: &DynamicalMap, n_sites: usize) -> Result<SectorBlocks> {
    SectorBlocks::from_dense(map.matrix.as_ref(), n_sites, SECTOR_LEAKAGE_TOLERANCE)
}
