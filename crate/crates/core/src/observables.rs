//! Stroboscopic observables: local magnetization, negativity across a
//! bipartition, purity and total excitation number.

use crate::operators::{excitations, site_bit, z_sign};
use crate::prelude::*;

/// Split of the sites into regions A and B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub sites_a: Vec<usize>,
    pub sites_b: Vec<usize>,
}

impl Partition {
    pub fn new(sites_a: Vec<usize>, sites_b: Vec<usize>, n_sites: usize) -> Result<Self> {
        let mut seen = vec![false; n_sites];
        for &s in sites_a.iter().chain(&sites_b) {
            if s >= n_sites {
                return Err(Error::SiteOutOfRange { site: s, n_sites });
            }
            if seen[s] {
                return Err(Error::InvalidParameter { field: "partition", reason: alloc::format!("site {s} listed twice") });
            }
            seen[s] = true;
        }
        if let Some(s) = seen.iter().position(|x| !x) {
            return Err(Error::InvalidParameter { field: "partition", reason: alloc::format!("site {s} unassigned") });
        }
        Ok(Self { sites_a, sites_b })
    }

    /// A = the first `N / 2` sites, B = the rest; `{0,1,2} | {3,4,5}` for N = 6.
    pub fn halves(n_sites: usize) -> Self {
        let half = n_sites / 2;
        Self { sites_a: (0..half).collect(), sites_b: (half..n_sites).collect() }
    }

    pub fn n_sites(&self) -> usize {
        self.sites_a.len() + self.sites_b.len()
    }

    fn mask_b(&self) -> usize {
        let n = self.n_sites();
        self.sites_b.iter().map(|&s| 1 << site_bit(s, n)).sum()
    }
}

fn sites_of(rho: MatRef<'_, c64>) -> Result<usize> {
    let d = rho.nrows();
    if rho.ncols() != d {
        return Err(Error::NotSquare { rows: d, cols: rho.ncols() });
    }
    if !d.is_power_of_two() {
        return Err(Error::DimensionMismatch { expected: d.next_power_of_two(), found: d });
    }
    Ok(d.trailing_zeros() as usize)
}

/// Imaginary residue tolerated in expectation values of Hermitian operators.
const IMAGINARY_TOLERANCE: f64 = 1e-10;

fn real_expectation(value: c64) -> f64 {
    debug_assert!(value.im.abs() < IMAGINARY_TOLERANCE, "imaginary residue {}", value.im);
    value.re
}

/// `Tr(rho sigma_z_site)`.
pub fn magnetization(rho: MatRef<'_, c64>, site: usize) -> Result<f64> {
    let n = sites_of(rho)?;
    if site >= n {
        return Err(Error::SiteOutOfRange { site, n_sites: n });
    }
    let v: c64 = (0..rho.nrows()).map(|i| rho[(i, i)] * z_sign(i, site, n)).sum();
    Ok(real_expectation(v))
}

/// Magnetization of every site.
pub fn magnetizations(rho: MatRef<'_, c64>) -> Result<Vec<f64>> {
    let n = sites_of(rho)?;
    (0..n).map(|l| magnetization(rho, l)).collect()
}

/// Transposes the B factors: `rho^T_B[(a b), (a' b')] = rho[(a b'), (a' b)]`.
pub fn partial_transpose(rho: MatRef<'_, c64>, partition: &Partition) -> Result<Mat<c64>> {
    let n = sites_of(rho)?;
    if partition.n_sites() != n {
        return Err(Error::DimensionMismatch { expected: n, found: partition.n_sites() });
    }
    let mb = partition.mask_b();
    Ok(Mat::from_fn(rho.nrows(), rho.ncols(), |i, j| {
        let (i2, j2) = ((i & !mb) | (j & mb), (j & !mb) | (i & mb));
        rho[(i2, j2)]
    }))
}

/// `(||rho^T_B||_1 - 1) / 2`, with the trace norm from singular values.
pub fn negativity(rho: MatRef<'_, c64>, partition: &Partition) -> Result<f64> {
    let pt = partial_transpose(rho, partition)?;
    let sv = pt.singular_values().map_err(|_| Error::EigenFailed)?;
    let norm: f64 = sv.iter().sum();
    let tr = real_expectation(crate::linalg::trace(rho));
    Ok((norm - tr) / 2.0)
}

/// `Tr(rho^2)`.
pub fn purity(rho: MatRef<'_, c64>) -> Result<f64> {
    let d = rho.nrows();
    sites_of(rho)?;
    let mut s = c64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += rho[(i, j)] * rho[(j, i)];
        }
    }
    Ok(real_expectation(s))
}

/// `Tr(rho N)` with `N` the excitation-number operator.
pub fn total_excitations(rho: MatRef<'_, c64>) -> Result<f64> {
    sites_of(rho)?;
    let v: c64 = (0..rho.nrows()).map(|i| rho[(i, i)] * excitations(i) as f64).sum();
    Ok(real_expectation(v))
}

/// Observables recorded at stroboscopic times `n T`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableTrace {
    pub periods: Vec<usize>,
    /// `magnetization[k][l]` is site `l` at `periods[k]`.
    pub magnetization: Vec<Vec<f64>>,
    pub negativity: Vec<f64>,
    pub purity: Vec<f64>,
    pub excitations: Vec<f64>,
    /// `|Tr rho - 1|` at each record.
    pub trace_error: Vec<f64>,
    /// `max |rho - rho^H|` at each record.
    pub hermiticity_error: Vec<f64>,
    /// Smallest eigenvalue of `rho` at each record.
    pub min_eigenvalue: Vec<f64>,
}

impl ObservableTrace {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    /// Magnetization time series of one site.
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.magnetization.iter().map(|row| row[site]).collect()
    }

    /// First even period `n` from which `|m_l(n + 2) - m_l(n)| < tolerance`
    /// holds at every site for `run` consecutive even periods.
    pub fn settling_period(&self, tolerance: f64, run: usize) -> Option<usize> {
        let even: Vec<usize> = (0..self.len()).filter(|&k| self.periods[k] % 2 == 0).collect();
        let mut streak = 0;
        for w in even.windows(2) {
            let (a, b) = (w[0], w[1]);
            if self.periods[b] != self.periods[a] + 2 {
                streak = 0;
                continue;
            }
            let settled = self.magnetization[a].iter().zip(&self.magnetization[b]).all(|(x, y)| (y - x).abs() < tolerance);
            streak = if settled { streak + 1 } else { 0 };
            if streak == run {
                let first = even.iter().position(|&k| k == a).unwrap() + 1 - run;
                return Some(self.periods[even[first]]);
            }
        }
        None
    }
}

/// Default settling tolerance on the per-site two-period change.
pub const SETTLING_TOLERANCE: f64 = 0.01;
/// Default number of consecutive settled even periods.
pub const SETTLING_RUN: usize = 10;
