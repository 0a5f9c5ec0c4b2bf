//! Row-stacking vectorization and the Lindblad generator with local
//! `sigma_z` dephasing.

use crate::operators::{excitations, z_sign};
use crate::prelude::*;
use crate::sectors::SectorLayout;

/// Row-stacked vector: component `i * cols + j` holds `rho[i][j]`.
pub fn vectorize(rho: MatRef<'_, c64>) -> Col<c64> {
    let c = rho.ncols();
    Col::from_fn(rho.nrows() * c, |k| rho[(k / c, k % c)])
}

/// Inverse of [`vectorize`] for square matrices.
pub fn devectorize(v: &Col<c64>) -> Result<Mat<c64>> {
    let d = v.nrows().isqrt();
    if d * d != v.nrows() {
        return Err(Error::NotPerfectSquare(v.nrows()));
    }
    Ok(Mat::from_fn(d, d, |i, j| v[i * d + j]))
}

/// `<<A|B>> = sum conj(a_k) b_k`, equal to `Tr(A^H B)`.
pub fn inner_product(a: &Col<c64>, b: &Col<c64>) -> c64 {
    (0..a.nrows()).map(|k| a[k].conj() * b[k]).sum()
}

/// Vectorized identity `<<I|` used for trace checks.
pub fn vectorized_identity(dim: usize) -> Col<c64> {
    Col::from_fn(dim * dim, |k| if k / dim == k % dim { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

/// Largest deviation of `<<I| S` from `<<I|`: zero for trace-preserving maps.
pub fn trace_preservation_error(s: MatRef<'_, c64>, is_generator: bool) -> f64 {
    let dim = s.nrows().isqrt();
    let mut worst = 0.0f64;
    for col in 0..s.ncols() {
        let mut acc: c64 = (0..dim).map(|i| s[(i * dim + i, col)]).sum();
        if !is_generator && col / dim == col % dim {
            acc -= 1.0;
        }
        worst = worst.max(acc.norm());
    }
    worst
}

/// `-i (H ⊗ I - I ⊗ H^T)`, the superoperator of `rho -> -i [H, rho]`.
pub fn hamiltonian_superop(h: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let d = h.nrows();
    if h.ncols() != d {
        return Err(Error::NotSquare { rows: d, cols: h.ncols() });
    }
    let mi = c64::new(0.0, -1.0);
    Ok(Mat::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        let mut v = c64::new(0.0, 0.0);
        if j == l {
            v += h[(i, k)];
        }
        if i == k {
            v -= h[(l, j)];
        }
        mi * v
    }))
}

/// Superoperator `U ⊗ conj(U)` of the conjugation `rho -> U rho U^H`.
pub fn unitary_superop(u: MatRef<'_, c64>) -> Mat<c64> {
    let d = u.nrows();
    Mat::from_fn(d * d, d * d, |r, c| u[(r / d, c / d)] * u[(r % d, c % d)].conj())
}

/// Diagonal of the dephasing superoperator: element `(i, j)` decays at
/// `2 gamma` times the number of sites where `i` and `j` differ.
pub fn dephasing_rates(n_sites: usize, gamma: f64) -> Vec<f64> {
    let d = 1usize << n_sites;
    (0..d * d).map(|k| -2.0 * gamma * excitations((k / d) ^ (k % d)) as f64).collect()
}

/// `gamma sum_l (sigma_z_l ⊗ sigma_z_l - I ⊗ I)`.
pub fn dephasing_superop(n_sites: usize, gamma: f64) -> Mat<c64> {
    let rates = dephasing_rates(n_sites, gamma);
    Mat::from_fn(rates.len(), rates.len(), |r, c| if r == c { c64::new(rates[r], 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn liouvillian(h: MatRef<'_, c64>, n_sites: usize, gamma: f64) -> Result<Mat<c64>> {
    let d = 1usize << n_sites;
    if h.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: h.nrows() });
    }
    let mut l = hamiltonian_superop(h)?;
    for (k, rate) in dephasing_rates(n_sites, gamma).into_iter().enumerate() {
        l[(k, k)] += rate;
    }
    Ok(l)
}

/// Block `(k_left, k_right)` of [`liouvillian`], indexed as in
/// [`SectorLayout::block_indices`]. Valid when `h` conserves excitations.
pub fn liouvillian_block(h: MatRef<'_, c64>, layout: &SectorLayout, gamma: f64, k_left: usize, k_right: usize) -> Mat<c64> {
    let (left, right) = (&layout.states[k_left], &layout.states[k_right]);
    let nr = right.len();
    let mi = c64::new(0.0, -1.0);
    Mat::from_fn(left.len() * nr, left.len() * nr, |r, c| {
        let (i, j) = (left[r / nr], right[r % nr]);
        let (k, l) = (left[c / nr], right[c % nr]);
        let mut v = c64::new(0.0, 0.0);
        if j == l {
            v += h[(i, k)];
        }
        if i == k {
            v -= h[(l, j)];
        }
        let mut out = mi * v;
        if r == c {
            out += -2.0 * gamma * excitations(i ^ j) as f64;
        }
        out
    })
}

/// `d rho / dt = -i [H, rho] + gamma sum_l (Z_l rho Z_l - rho)`, evaluated on
/// matrices without forming any superoperator.
pub fn lindblad_rhs(rho: MatRef<'_, c64>, h: MatRef<'_, c64>, n_sites: usize, gamma: f64) -> Result<Mat<c64>> {
    let d = 1usize << n_sites;
    for m in [rho, h] {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.nrows() });
        }
    }
    let hr = h * rho;
    let rh = rho * h;
    let mut out = Mat::from_fn(d, d, |i, j| c64::new(0.0, -1.0) * (hr[(i, j)] - rh[(i, j)]));
    if gamma != 0.0 {
        for j in 0..d {
            for i in 0..d {
                let mut s = 0.0;
                for l in 0..n_sites {
                    s += z_sign(i, l, n_sites) * z_sign(j, l, n_sites) - 1.0;
                }
                out[(i, j)] += rho[(i, j)] * (gamma * s);
            }
        }
    }
    Ok(out)
}
