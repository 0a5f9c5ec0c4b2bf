//! One- and two-period dynamical maps and their effective generators.
//!
//! A drive period is a unitary kick `U1 = exp(-i H1 T1)` followed by Lindblad
//! evolution under `H2` with dephasing for `T2`. Dephasing is off during the
//! kick. With `K = U1 ⊗ conj(U1)` and `E2 = exp(L2 T2)`, `Phi_T = E2 K`.
//!
//! `E2` conserves excitations on both sides, so it is assembled from sector
//! blocks. Dense maps are then built by block-times-dense products, which
//! avoids ever multiplying two dense `4^N x 4^N` matrices.

use core::f64::consts::PI;

use crate::config::SpinNetworkConfig;
use crate::linalg::{self, Eigensystem};
use crate::operators::{excitations, hamiltonian_interaction};
use crate::prelude::*;
use crate::sectors::{SectorBlocks, SectorLayout};
use crate::superop::liouvillian_block;

pub use crate::linalg::matrix_exp;

/// Eigenphases closer than this to the log branch cut are flagged.
pub const BRANCH_TOLERANCE: f64 = 1e-6;

/// Tolerance used to decide that the kick is an exact pi or 2 pi rotation.
const KICK_TOLERANCE: f64 = 1e-12;

/// A superoperator propagating vectorized states over `period_multiple` periods.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMap {
    pub matrix: Mat<c64>,
    pub period_multiple: usize,
    /// Duration covered, `period_multiple * T`.
    pub horizon: f64,
}

/// Record of the logarithm branch used for an effective generator.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchNote {
    /// Imaginary parts are defined modulo this value, `2 pi / horizon`.
    pub imaginary_period: f64,
    /// Eigenvalues whose phase lies within [`BRANCH_TOLERANCE`] of `+-pi`.
    pub near_cut: usize,
}

#[derive(Debug, Clone)]
pub struct EffectiveGenerator {
    pub matrix: Mat<c64>,
    pub horizon: f64,
    pub branch_note: BranchNote,
}

/// Rotation angle `g (1 - eps) T1` of each spin during the kick.
pub fn kick_angle(config: &SpinNetworkConfig) -> f64 {
    config.g * (1.0 - config.epsilon) * config.t1
}

/// `U1 = exp(-i H1 T1) = prod_l (cos t - i sin t sigma_x_l)`, so
/// `U1[i][j] = cos(t)^(N - d) (-i sin t)^d` with `d` the Hamming distance.
pub fn kick_unitary(config: &SpinNetworkConfig) -> Mat<c64> {
    let n = config.n_sites;
    let t = kick_angle(config);
    let (s, c) = t.sin_cos();
    let factor = [c64::new(c, 0.0), c64::new(0.0, -s)];
    let mut powers = vec![c64::new(1.0, 0.0); n + 1];
    for d in 0..=n {
        for k in 0..n {
            powers[d] *= factor[usize::from(k < d)];
        }
    }
    let dim = 1usize << n;
    Mat::from_fn(dim, dim, |i, j| powers[excitations(i ^ j)])
}

/// Kind of kick that maps excitation sectors onto sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SectorKick {
    /// `U1` is a phase times the identity.
    Identity,
    /// `U1` is a phase times the global spin flip.
    Flip,
}

fn sector_kick(config: &SpinNetworkConfig) -> Option<SectorKick> {
    let t = kick_angle(config);
    if t.cos().abs() < KICK_TOLERANCE {
        Some(SectorKick::Flip)
    } else if t.sin().abs() < KICK_TOLERANCE {
        Some(SectorKick::Identity)
    } else {
        None
    }
}

/// Sector blocks of `E2 = exp(L2 T2)`.
pub fn interaction_propagator_blocks(config: &SpinNetworkConfig) -> Result<SectorBlocks> {
    config.validate()?;
    let h = hamiltonian_interaction(config);
    let layout = SectorLayout::new(config.n_sites);
    let t2 = c64::new(config.t2, 0.0);
    SectorBlocks::try_from_upper(layout.clone(), |a, b| {
        let l = liouvillian_block(h.as_ref(), &layout, config.gamma, a, b);
        matrix_exp((l * faer::Scale(t2)).as_ref())
    })
}

/// `Phi_T = exp(L2 T2) (U1 ⊗ conj(U1))`, kick first.
pub fn floquet_map(config: &SpinNetworkConfig) -> Result<DynamicalMap> {
    config.validate_dense()?;
    let e2 = interaction_propagator_blocks(config)?;
    let u1 = kick_unitary(config);
    let d = config.dim();
    let matrix = e2.left_mul(d * d, |r, c| u1[(r / d, c / d)] * u1[(r % d, c % d)].conj());
    Ok(DynamicalMap { matrix, period_multiple: 1, horizon: config.period() })
}

/// `Phi_2T = Phi_T Phi_T`, built as `E2 (K Phi_T)` with `K` applied by
/// conjugating each column of `Phi_T` as a matrix.
pub fn floquet_map_2t(config: &SpinNetworkConfig) -> Result<DynamicalMap> {
    let one = floquet_map(config)?;
    let e2 = interaction_propagator_blocks(config)?;
    let u1 = kick_unitary(config);
    let u1h = u1.adjoint().to_owned();
    let d = config.dim();
    let mut y = one.matrix;
    for c in 0..d * d {
        let x = Mat::from_fn(d, d, |i, j| y[(i * d + j, c)]);
        let conj = &u1 * x * &u1h;
        for i in 0..d {
            for j in 0..d {
                y[(i * d + j, c)] = conj[(i, j)];
            }
        }
    }
    let matrix = e2.left_mul(d * d, |r, c| y[(r, c)]);
    Ok(DynamicalMap { matrix, period_multiple: 2, horizon: 2.0 * config.period() })
}

/// Sector blocks of `Phi_2T` without forming any dense superoperator.
///
/// Requires a kick that permutes the sectors (an exact pi or 2 pi rotation,
/// which at the default drive means `eps = 0`). For a pi kick
/// `K` is the global flip `P` on both sides and `Phi_2T = E2 (P E2 P)`.
pub fn floquet_map_2t_blocks(config: &SpinNetworkConfig) -> Result<SectorBlocks> {
    config.validate()?;
    let kick = sector_kick(config).ok_or(Error::SectorsBroken(config.epsilon))?;
    let e2 = interaction_propagator_blocks(config)?;
    let layout = e2.layout.clone();
    let n = config.n_sites;
    let full = layout.dim() - 1;
    SectorBlocks::try_from_upper(layout.clone(), |a, b| {
        let first = &e2.block(a, b).matrix;
        match kick {
            SectorKick::Identity => Ok(first * first),
            SectorKick::Flip => {
                let flipped = &e2.block(n - a, n - b).matrix;
                let (left, right) = (&layout.states[a], &layout.states[b]);
                let nr = right.len();
                let map = |r: usize| {
                    layout.position[full ^ left[r / nr]] * nr + layout.position[full ^ right[r % nr]]
                };
                let dim = left.len() * nr;
                let second = Mat::from_fn(dim, dim, |r, c| flipped[(map(r), map(c))]);
                Ok(first * second)
            }
        }
    })
}

/// Unitary `U2 U1` of one period without dephasing.
fn closed_period_unitary(config: &SpinNetworkConfig) -> Result<Mat<c64>> {
    let h = hamiltonian_interaction(config);
    let u2 = matrix_exp((h * faer::Scale(c64::new(0.0, -config.t2))).as_ref())?;
    Ok(u2 * kick_unitary(config))
}

/// Two-period effective Hamiltonian, `U(2T) = exp(-i H_eff 2T)`.
///
/// For a pi kick on a clean network this is the closed form
/// `(T2 / T) H2`. Otherwise the principal logarithm of `U(2T)` is taken;
/// for a pi kick the global phase `(-1)^N` of two ideal pulses is removed
/// first. Eigenphases within [`BRANCH_TOLERANCE`] of `+-pi` are rejected.
pub fn effective_hamiltonian_2t(config: &SpinNetworkConfig) -> Result<Mat<c64>> {
    config.validate_dense()?;
    let kick = sector_kick(config);
    if kick == Some(SectorKick::Flip) && config.is_clean() {
        let h = hamiltonian_interaction(config);
        return Ok(h * faer::Scale(c64::new(config.t2 / config.period(), 0.0)));
    }
    let one = closed_period_unitary(config)?;
    let mut u = &one * &one;
    if kick == Some(SectorKick::Flip) && config.n_sites % 2 == 1 {
        u *= faer::Scale(c64::new(-1.0, 0.0));
    }
    let es = linalg::eigensystem(u.as_ref())?;
    if let Some(z) = es.values.iter().find(|z| PI - z.arg().abs() < BRANCH_TOLERANCE) {
        return Err(Error::BranchAmbiguity { phase: z.arg(), tolerance: BRANCH_TOLERANCE });
    }
    let scale = c64::new(0.0, 1.0 / (2.0 * config.period()));
    let h = linalg::spectral_function(&es, |z| z.ln() * scale);
    Ok(linalg::hermitian_part(h.as_ref()))
}

fn count_near_cut(values: &[c64]) -> usize {
    values.iter().filter(|z| z.norm() > 0.0 && PI - z.arg().abs() < BRANCH_TOLERANCE).count()
}

fn log_generator(es: &Eigensystem, horizon: f64) -> Mat<c64> {
    linalg::spectral_function(es, |z| z.ln() / horizon)
}

/// `L_eff = log(Phi_2T) / 2T` from the eigendecomposition of the map, on the
/// principal branch. Real parts are branch independent; imaginary parts are
/// defined modulo `2 pi / 2T`.
pub fn effective_liouvillian_2t(map: &DynamicalMap) -> Result<EffectiveGenerator> {
    if map.period_multiple != 2 {
        return Err(Error::InvalidParameter {
            field: "period_multiple",
            reason: alloc::format!("expected a two-period map, got {}", map.period_multiple),
        });
    }
    let es = linalg::eigensystem(map.matrix.as_ref())?;
    Ok(EffectiveGenerator {
        matrix: log_generator(&es, map.horizon),
        horizon: map.horizon,
        branch_note: BranchNote { imaginary_period: 2.0 * PI / map.horizon, near_cut: count_near_cut(&es.values) },
    })
}

/// Blockwise [`effective_liouvillian_2t`] for a sector-block `Phi_2T`.
pub fn effective_liouvillian_2t_blocks(map: &SectorBlocks, horizon: f64) -> Result<(SectorBlocks, BranchNote)> {
    let mut near_cut = 0;
    let blocks = SectorBlocks::try_from_fn(map.layout.clone(), |a, b| {
        let es = linalg::eigensystem(map.block(a, b).matrix.as_ref())?;
        near_cut += count_near_cut(&es.values);
        Ok(log_generator(&es, horizon))
    })?;
    Ok((blocks, BranchNote { imaginary_period: 2.0 * PI / horizon, near_cut }))
}

/// Closed form of the two-period effective Liouvillian for a pi kick on a
/// clean network: `(T2 / T) L2`, i.e. the interaction generator with both
/// the Hamiltonian and the dephasing rate scaled by `T2 / T`.
pub fn effective_liouvillian_2t_closed_form(config: &SpinNetworkConfig) -> Result<Mat<c64>> {
    config.validate_dense()?;
    if sector_kick(config) != Some(SectorKick::Flip) || !config.is_clean() {
        return Err(Error::InvalidParameter {
            field: "disorder",
            reason: "closed form needs a clean network and an exact pi kick".into(),
        });
    }
    let h = hamiltonian_interaction(config);
    let l = crate::superop::liouvillian(h.as_ref(), config.n_sites, config.gamma)?;
    Ok(l * faer::Scale(c64::new(config.t2 / config.period(), 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, kron, max_abs_diff, max_norm};
    use crate::operators::{embed, hamiltonian_kick, pauli, Axis};
    use crate::superop::{liouvillian, trace_preservation_error, unitary_superop, vectorize};
    use proptest::prelude::*;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    // Reference route: dense exponentials and dense products.
    fn brute_force_map(config: &SpinNetworkConfig) -> Mat<c64> {
        let h2 = hamiltonian_interaction(config);
        let l2 = liouvillian(h2.as_ref(), config.n_sites, config.gamma).unwrap();
        let e2 = matrix_exp((l2 * faer::Scale(c(config.t2))).as_ref()).unwrap();
        let h1 = hamiltonian_kick(config);
        let u1 = matrix_exp((h1 * faer::Scale(c64::new(0.0, -config.t1))).as_ref()).unwrap();
        e2 * unitary_superop(u1.as_ref())
    }

    #[test]
    fn kick_closed_form_matches_exponential() {
        for eps in [0.0, 0.03, 0.4] {
            let cfg = SpinNetworkConfig::with_sites(3).epsilon(eps);
            let want = matrix_exp((hamiltonian_kick(&cfg) * faer::Scale(c64::new(0.0, -cfg.t1))).as_ref()).unwrap();
            assert!(max_abs_diff(kick_unitary(&cfg).as_ref(), want.as_ref()) < 1e-14);
        }
    }

    #[test]
    fn pi_kick_reverses_sigma_z() {
        let cfg = SpinNetworkConfig::with_sites(3);
        let u = kick_unitary(&cfg);
        for l in 0..3 {
            let z = embed(pauli(Axis::Z).as_ref(), l, 3).unwrap();
            let conj = &u * &z * u.adjoint();
            assert!(max_abs_diff(conj.as_ref(), (z * faer::Scale(c(-1.0))).as_ref()) < 1e-14);
        }
        assert_eq!(kick_unitary(&cfg.epsilon(1.0)), identity(8));
    }

    #[test]
    fn imperfect_kick_single_qubit() {
        let u = kick_unitary(&SpinNetworkConfig::with_sites(1).epsilon(0.03));
        let z = pauli(Axis::Z);
        let m = u.adjoint() * &z * &u;
        assert!((m[(1, 1)] - c(-(0.03 * PI).cos())).norm() < 1e-14);
    }

    #[test]
    fn map_matches_dense_reference() {
        for eps in [0.0, 0.05] {
            let cfg = SpinNetworkConfig::with_sites(3).epsilon(eps).sampled_disorder(4.0, 2);
            let map = floquet_map(&cfg).unwrap();
            assert!(max_abs_diff(map.matrix.as_ref(), brute_force_map(&cfg).as_ref()) < 1e-12);
            assert!(trace_preservation_error(map.matrix.as_ref(), false) < 1e-12);
            let two = floquet_map_2t(&cfg).unwrap();
            let sq = &map.matrix * &map.matrix;
            assert!(max_abs_diff(two.matrix.as_ref(), sq.as_ref()) < 1e-12);
            assert_eq!((two.period_multiple, two.horizon), (2, 2.0));
        }
    }

    #[test]
    fn isolated_pulses_flip_magnetization() {
        let cfg = SpinNetworkConfig::with_sites(3).j0(0.0).gamma(0.0);
        let map = floquet_map(&cfg).unwrap();
        let d = 8;
        let rho = Mat::from_fn(d, d, |i, j| if i == 7 && j == 7 { c(1.0) } else { c(0.0) });
        let out = crate::superop::devectorize(&(&map.matrix * vectorize(rho.as_ref()))).unwrap();
        assert!((out[(0, 0)] - c(1.0)).norm() < 1e-14);
        let two = floquet_map_2t(&cfg).unwrap();
        assert!(max_abs_diff(two.matrix.as_ref(), identity(64).as_ref()) < 1e-14);
    }

    #[test]
    fn two_period_blocks_match_dense() {
        let cfg = SpinNetworkConfig::with_sites(4).sampled_disorder(6.0, 21);
        let dense = floquet_map_2t(&cfg).unwrap();
        let blocks = floquet_map_2t_blocks(&cfg).unwrap();
        assert!(max_abs_diff(blocks.to_dense().as_ref(), dense.matrix.as_ref()) < 1e-12);
        let from_dense = SectorBlocks::from_dense(dense.matrix.as_ref(), 4, 1e-10).unwrap();
        assert_eq!(from_dense.blocks.len(), 25);
        assert!(matches!(floquet_map_2t_blocks(&cfg.epsilon(0.05)), Err(Error::SectorsBroken(_))));
        let silent = SpinNetworkConfig::with_sites(3).epsilon(1.0);
        let b = floquet_map_2t_blocks(&silent).unwrap();
        let e = interaction_propagator_blocks(&silent).unwrap().to_dense();
        assert!(max_abs_diff(b.to_dense().as_ref(), (&e * &e).as_ref()) < 1e-12);
    }

    #[test]
    fn effective_hamiltonian_identity_for_clean_pi_kick() {
        let cfg = SpinNetworkConfig::with_sites(4).gamma(0.0);
        let heff = effective_hamiltonian_2t(&cfg).unwrap();
        let half = hamiltonian_interaction(&cfg) * faer::Scale(c(0.5));
        assert_eq!(heff, half);
        let u = matrix_exp((heff * faer::Scale(c64::new(0.0, -2.0 * cfg.period()))).as_ref()).unwrap();
        let map = floquet_map_2t(&cfg).unwrap();
        assert!(max_abs_diff(map.matrix.as_ref(), unitary_superop(u.as_ref()).as_ref()) < 1e-10);
        let zero = effective_hamiltonian_2t(&SpinNetworkConfig::with_sites(3).j0(0.0)).unwrap();
        assert_eq!(max_norm(zero.as_ref()), 0.0);
    }

    #[test]
    fn effective_hamiltonian_log_route_reproduces_two_periods() {
        let cfg = SpinNetworkConfig::with_sites(3).gamma(0.0).j0(0.3).sampled_disorder(1.5, 4);
        let heff = effective_hamiltonian_2t(&cfg).unwrap();
        let u = matrix_exp((heff * faer::Scale(c64::new(0.0, -2.0 * cfg.period()))).as_ref()).unwrap();
        let one = closed_period_unitary(&cfg).unwrap();
        let want = (&one * &one) * faer::Scale(c(-1.0));
        assert!(max_abs_diff(u.as_ref(), want.as_ref()) < 1e-10);
    }

    #[test]
    fn effective_liouvillian_examples() {
        let trivial = SpinNetworkConfig::with_sites(2).j0(0.0).gamma(0.0);
        let g = effective_liouvillian_2t(&floquet_map_2t(&trivial).unwrap()).unwrap();
        assert!(max_norm(g.matrix.as_ref()) < 1e-14);
        assert!(effective_liouvillian_2t(&floquet_map(&trivial).unwrap()).is_err());

        let cfg = SpinNetworkConfig::with_sites(3);
        let map = floquet_map_2t(&cfg).unwrap();
        let g = effective_liouvillian_2t(&map).unwrap();
        let back = matrix_exp((&g.matrix * faer::Scale(c(g.horizon))).as_ref()).unwrap();
        assert!(max_abs_diff(back.as_ref(), map.matrix.as_ref()) < 1e-8);
        let closed = effective_liouvillian_2t_closed_form(&cfg).unwrap();
        let back = matrix_exp((&closed * faer::Scale(c(g.horizon))).as_ref()).unwrap();
        assert!(max_abs_diff(back.as_ref(), map.matrix.as_ref()) < 1e-10);
        assert!((g.branch_note.imaginary_period - PI).abs() < 1e-15);
    }

    #[test]
    fn kick_superoperator_is_kron_of_unitaries() {
        let cfg = SpinNetworkConfig::with_sites(2).epsilon(0.1);
        let u = kick_unitary(&cfg);
        let uc = Mat::from_fn(4, 4, |i, j| u[(i, j)].conj());
        assert_eq!(unitary_superop(u.as_ref()), kron(u.as_ref(), uc.as_ref()));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn maps_preserve_trace_and_contract(
            n in 1usize..=3,
            eps in 0.0f64..0.2,
            gamma in 0.0f64..0.3,
            w in 0.0f64..10.0,
            seed in any::<u64>(),
        ) {
            let cfg = SpinNetworkConfig::with_sites(n).epsilon(eps).gamma(gamma).sampled_disorder(w, seed);
            let map = floquet_map_2t(&cfg).unwrap();
            prop_assert!(trace_preservation_error(map.matrix.as_ref(), false) < 1e-10);
            let ev = map.matrix.eigenvalues().unwrap();
            prop_assert!(ev.iter().all(|z| z.norm() <= 1.0 + 1e-8));
            if gamma == 0.0 {
                prop_assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() < 1e-10));
            }
        }
    }
}
