//! Pauli operators, site embeddings and the two drive Hamiltonians.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SpinNetworkConfig;
use crate::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Bit of basis index that stores `site`; site 0 is the most significant bit.
#[inline]
pub fn site_bit(site: usize, n_sites: usize) -> usize {
    n_sites - 1 - site
}

/// `sigma_z` eigenvalue (+1 for `|1>`, -1 for `|0>`) of `site` in basis state `index`.
#[inline]
pub fn z_sign(index: usize, site: usize, n_sites: usize) -> f64 {
    if index >> site_bit(site, n_sites) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Pauli matrix in the ordered basis (|0>, |1>), with `sigma_z |1> = +|1>`.
pub fn pauli(mu: Axis) -> Mat<c64> {
    let o = c64::new(0.0, 0.0);
    let one = c64::new(1.0, 0.0);
    let i = c64::new(0.0, 1.0);
    let m = match mu {
        Axis::X => [[o, one], [one, o]],
        Axis::Y => [[o, i], [-i, o]],
        Axis::Z => [[-one, o], [o, one]],
    };
    Mat::from_fn(2, 2, |r, c| m[r][c])
}

/// `I ⊗ .. ⊗ op ⊗ .. ⊗ I` with `op` acting on `site`.
pub fn embed(op: MatRef<'_, c64>, site: usize, n_sites: usize) -> Result<Mat<c64>> {
    if site >= n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    if op.nrows() != 2 || op.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: op.nrows().max(op.ncols()) });
    }
    let bit = site_bit(site, n_sites);
    let mask = !(1usize << bit);
    let dim = 1usize << n_sites;
    Ok(Mat::from_fn(dim, dim, |i, j| {
        if i & mask == j & mask {
            op[(i >> bit & 1, j >> bit & 1)]
        } else {
            c64::new(0.0, 0.0)
        }
    }))
}

/// `J0 / |l - m|^alpha` off the diagonal, zero on it.
pub fn coupling_matrix(n_sites: usize, j0: f64, alpha: f64) -> Mat<f64> {
    Mat::from_fn(n_sites, n_sites, |l, m| {
        if l == m {
            0.0
        } else {
            j0 / (l.abs_diff(m) as f64).powf(alpha)
        }
    })
}

/// Kick Hamiltonian `g (1 - eps) sum_l sigma_x_l`.
pub fn hamiltonian_kick(config: &SpinNetworkConfig) -> Mat<c64> {
    let n = config.n_sites;
    let dim = 1usize << n;
    let amp = config.g * (1.0 - config.epsilon);
    let mut h = Mat::<c64>::zeros(dim, dim);
    for i in 0..dim {
        for site in 0..n {
            h[(i ^ 1 << site_bit(site, n), i)] += amp;
        }
    }
    h
}

/// Interaction Hamiltonian
/// `sum_{l<m} J_lm (sigma_x_l sigma_x_m + sigma_y_l sigma_y_m) + sum_l W_l sigma_z_l`.
///
/// Each XY pair term moves one excitation between `l` and `m` with amplitude `2 J_lm`.
pub fn hamiltonian_interaction(config: &SpinNetworkConfig) -> Mat<c64> {
    let n = config.n_sites;
    let dim = 1usize << n;
    let j = coupling_matrix(n, config.j0, config.alpha);
    let mut h = Mat::<c64>::zeros(dim, dim);
    for i in 0..dim {
        let mut diag = 0.0;
        for (site, w) in config.disorder.iter().enumerate() {
            diag += w * z_sign(i, site, n);
        }
        h[(i, i)] = c64::new(diag, 0.0);
        for l in 0..n {
            for m in l + 1..n {
                let (bl, bm) = (site_bit(l, n), site_bit(m, n));
                if (i >> bl & 1) != (i >> bm & 1) {
                    h[(i ^ (1 << bl | 1 << bm), i)] += 2.0 * j[(l, m)];
                }
            }
        }
    }
    h
}

/// Number of excitations (set bits) of a basis state.
#[inline]
pub fn excitations(index: usize) -> usize {
    index.count_ones() as usize
}

/// `N = sum_l (sigma_z_l + 1) / 2`, diagonal in the computational basis.
pub fn excitation_number_operator(n_sites: usize) -> Mat<c64> {
    let dim = 1usize << n_sites;
    Mat::from_fn(dim, dim, |i, j| {
        if i == j {
            c64::new(excitations(i) as f64, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// On-site energies drawn independently and uniformly from `[0, w]`.
pub fn sample_disorder(n_sites: usize, w: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sites).map(|_| rng.random::<f64>() * w).collect()
}
