//! Excitation-sector block structure of superoperators.
//!
//! A superoperator that conserves the excitation number on both sides of
//! `rho` only couples vectorized elements `(i, j)` and `(i', j')` with
//! `|i| = |i'|` and `|j| = |j'|`, where `|i|` counts set bits. It is then
//! block diagonal over sector pairs `(k_left, k_right)`, with block
//! dimension `C(N, k_left) * C(N, k_right)`.

use crate::linalg;
use crate::operators::excitations;
use crate::prelude::*;

/// Basis states grouped by excitation number.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorLayout {
    pub n_sites: usize,
    /// `states[k]` lists the basis indices with `k` excitations, ascending.
    pub states: Vec<Vec<usize>>,
    /// Position of each basis index inside its sector.
    pub position: Vec<usize>,
}

impl SectorLayout {
    pub fn new(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        let mut states = vec![Vec::new(); n_sites + 1];
        let mut position = vec![0; dim];
        for i in 0..dim {
            let k = excitations(i);
            position[i] = states[k].len();
            states[k].push(i);
        }
        Self { n_sites, states, position }
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    pub fn block_dim(&self, k_left: usize, k_right: usize) -> usize {
        self.states[k_left].len() * self.states[k_right].len()
    }

    /// All sector pairs, `k_left` major.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n_sites;
        (0..=n).flat_map(move |a| (0..=n).map(move |b| (a, b)))
    }

    /// Vectorized indices covered by a block, in block order: block element
    /// `a * C(N, k_right) + b` is `states[k_left][a] * D + states[k_right][b]`.
    pub fn block_indices(&self, k_left: usize, k_right: usize) -> Vec<usize> {
        let d = self.dim();
        let mut out = Vec::with_capacity(self.block_dim(k_left, k_right));
        for &i in &self.states[k_left] {
            for &j in &self.states[k_right] {
                out.push(i * d + j);
            }
        }
        out
    }

    /// Sector pair of a vectorized index.
    pub fn pair_of(&self, vec_index: usize) -> (usize, usize) {
        let d = self.dim();
        (excitations(vec_index / d), excitations(vec_index % d))
    }

    fn slot(&self, k_left: usize, k_right: usize) -> usize {
        k_left * (self.n_sites + 1) + k_right
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBlock {
    pub k_left: usize,
    pub k_right: usize,
    pub matrix: Mat<c64>,
}

/// A block-diagonal superoperator stored as its `(N + 1)^2` sector blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBlocks {
    pub layout: SectorLayout,
    /// Ordered as [`SectorLayout::pairs`].
    pub blocks: Vec<SectorBlock>,
}

impl SectorBlocks {
    /// Builds every block from `f(k_left, k_right)`.
    pub fn try_from_fn(layout: SectorLayout, mut f: impl FnMut(usize, usize) -> Result<Mat<c64>>) -> Result<Self> {
        let mut blocks = Vec::with_capacity((layout.n_sites + 1).pow(2));
        for (k_left, k_right) in layout.pairs() {
            let matrix = f(k_left, k_right)?;
            let dim = layout.block_dim(k_left, k_right);
            if matrix.nrows() != dim || matrix.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows() });
            }
            blocks.push(SectorBlock { k_left, k_right, matrix });
        }
        Ok(Self { layout, blocks })
    }

    /// Builds the blocks with `k_left <= k_right` from `f` and fills the rest
    /// by [`conj_swap`], valid for Hermiticity-preserving superoperators.
    pub fn try_from_upper(layout: SectorLayout, mut f: impl FnMut(usize, usize) -> Result<Mat<c64>>) -> Result<Self> {
        let n = layout.n_sites;
        let mut upper: Vec<Option<Mat<c64>>> = vec![None; (n + 1) * (n + 1)];
        for (a, b) in layout.pairs().filter(|(a, b)| a <= b) {
            upper[layout.slot(a, b)] = Some(f(a, b)?);
        }
        for (a, b) in layout.pairs().filter(|(a, b)| a > b) {
            let swapped = conj_swap(upper[layout.slot(b, a)].as_ref().unwrap(), &layout, b, a);
            upper[layout.slot(a, b)] = Some(swapped);
        }
        Self::try_from_fn(layout.clone(), |a, b| Ok(upper[layout.slot(a, b)].take().unwrap()))
    }

    pub fn n_sites(&self) -> usize {
        self.layout.n_sites
    }

    pub fn block(&self, k_left: usize, k_right: usize) -> &SectorBlock {
        &self.blocks[self.layout.slot(k_left, k_right)]
    }

    /// Extracts the blocks of a dense superoperator, refusing when the
    /// largest off-block entry exceeds `tolerance`.
    pub fn from_dense(m: MatRef<'_, c64>, n_sites: usize, tolerance: f64) -> Result<Self> {
        let layout = SectorLayout::new(n_sites);
        let d2 = layout.dim() * layout.dim();
        if m.nrows() != d2 || m.ncols() != d2 {
            return Err(Error::DimensionMismatch { expected: d2, found: m.nrows() });
        }
        let leak = leakage(m, &layout);
        if !(leak <= tolerance) {
            return Err(Error::SectorLeakage { leakage: leak, tolerance });
        }
        Self::try_from_fn(layout.clone(), |a, b| {
            let idx = layout.block_indices(a, b);
            Ok(Mat::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]))
        })
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let d2 = self.layout.dim() * self.layout.dim();
        let mut out = Mat::<c64>::zeros(d2, d2);
        for b in &self.blocks {
            let idx = self.layout.block_indices(b.k_left, b.k_right);
            for (c, &ic) in idx.iter().enumerate() {
                for (r, &ir) in idx.iter().enumerate() {
                    out[(ir, ic)] = b.matrix[(r, c)];
                }
            }
        }
        out
    }

    /// Blockwise product `self * other`.
    pub fn mul(&self, other: &SectorBlocks) -> SectorBlocks {
        assert_eq!(self.layout, other.layout);
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| SectorBlock { k_left: a.k_left, k_right: a.k_right, matrix: &a.matrix * &b.matrix })
            .collect();
        SectorBlocks { layout: self.layout.clone(), blocks }
    }

    /// Product of this block-diagonal superoperator with a dense
    /// `D^2 x ncols` matrix whose entries are supplied by `entry(row, col)`.
    pub fn left_mul(&self, ncols: usize, entry: impl Fn(usize, usize) -> c64) -> Mat<c64> {
        let d2 = self.layout.dim() * self.layout.dim();
        let mut out = Mat::<c64>::zeros(d2, ncols);
        for b in &self.blocks {
            let idx = self.layout.block_indices(b.k_left, b.k_right);
            let rows = Mat::from_fn(idx.len(), ncols, |r, c| entry(idx[r], c));
            let prod = &b.matrix * rows;
            for c in 0..ncols {
                for (r, &ir) in idx.iter().enumerate() {
                    out[(ir, c)] = prod[(r, c)];
                }
            }
        }
        out
    }

    /// Applies the superoperator to a vectorized state.
    pub fn apply(&self, v: &Col<c64>) -> Col<c64> {
        let mut out = Col::<c64>::zeros(v.nrows());
        for b in &self.blocks {
            let idx = self.layout.block_indices(b.k_left, b.k_right);
            let x = Col::from_fn(idx.len(), |r| v[idx[r]]);
            let y = &b.matrix * x;
            for (r, &ir) in idx.iter().enumerate() {
                out[ir] = y[r];
            }
        }
        out
    }

    /// Union of all block spectra.
    pub fn eigenvalues(&self) -> Result<Vec<c64>> {
        let mut out = Vec::with_capacity(self.layout.dim().pow(2));
        for b in &self.blocks {
            out.extend(linalg::eigenvalues(b.matrix.as_ref())?);
        }
        Ok(out)
    }

    /// Union of all block spectra for a Hermiticity-preserving superoperator:
    /// the `(k_right, k_left)` block is the conjugate of the `(k_left, k_right)`
    /// block, so only half of the off-diagonal blocks are diagonalized.
    pub fn eigenvalues_hermiticity_preserving(&self) -> Result<Vec<c64>> {
        let mut out = Vec::with_capacity(self.layout.dim().pow(2));
        for b in self.blocks.iter().filter(|b| b.k_left <= b.k_right) {
            let ev = linalg::eigenvalues(b.matrix.as_ref())?;
            if b.k_left < b.k_right {
                out.extend(ev.iter().map(|z| z.conj()));
            }
            out.extend(ev);
        }
        Ok(out)
    }
}

/// Largest entry of `m` coupling different sector pairs.
pub fn leakage(m: MatRef<'_, c64>, layout: &SectorLayout) -> f64 {
    let pairs: Vec<(usize, usize)> = (0..m.nrows()).map(|k| layout.pair_of(k)).collect();
    let mut worst = 0.0f64;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if pairs[r] != pairs[c] {
                worst = worst.max(m[(r, c)].norm());
            }
        }
    }
    worst
}

/// Maps the `(k_left, k_right)` block of a Hermiticity-preserving
/// superoperator to its `(k_right, k_left)` block.
///
/// Hermiticity preservation means `S(X^H) = S(X)^H`, i.e.
/// `S[(i, j), (k, l)] = conj(S[(j, i), (l, k)])`.
pub fn conj_swap(block: &Mat<c64>, layout: &SectorLayout, k_left: usize, k_right: usize) -> Mat<c64> {
    let nl = layout.states[k_left].len();
    let nr = layout.states[k_right].len();
    // source element (a, b) with a < nl, b < nr becomes (b, a) in the swapped block
    let dim = nl * nr;
    let src = |swapped: usize| {
        let (b, a) = (swapped / nl, swapped % nl);
        a * nr + b
    };
    Mat::from_fn(dim, dim, |r, c| block[(src(r), src(c))].conj())
}
