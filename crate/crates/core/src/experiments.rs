//! Initial states, stroboscopic runs, the RK4 reference integrator and
//! disorder-averaged gap sweeps.

use alloc::format;

use crate::floquet::{floquet_map, floquet_map_2t, floquet_map_2t_blocks, DynamicalMap};
use crate::linalg::{hermiticity_error, max_abs_diff, min_hermitian_eigenvalue, trace};
use crate::observables::{magnetizations, negativity, purity, total_excitations, ObservableTrace, Partition};
use crate::operators::{hamiltonian_interaction, hamiltonian_kick};
use crate::prelude::*;
use crate::spectra::{block_spectrum, liouvillian_gap, map_spectrum, SpectralData, DEFAULT_ZERO_THRESHOLD};
use crate::superop::{devectorize, lindblad_rhs, vectorize};
use crate::SpinNetworkConfig;

/// How to prepare the initial density matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialStateSpec {
    /// Product state, one symbol per site from `0`, `1`, `+`.
    PurePattern(String),
    /// First `N / 2` sites in `|1>`, the rest maximally mixed.
    MixedB,
    /// `|1>` on the first `k` sites, `|+>` on the rest.
    SeedSize(usize),
}

fn site_state(symbol: char) -> Result<[[f64; 2]; 2]> {
    match symbol {
        '0' => Ok([[1.0, 0.0], [0.0, 0.0]]),
        '1' => Ok([[0.0, 0.0], [0.0, 1.0]]),
        '+' => Ok([[0.5, 0.5], [0.5, 0.5]]),
        // not a pattern symbol, used internally for the mixed region
        'm' => Ok([[0.5, 0.0], [0.0, 0.5]]),
        other => Err(Error::InvalidSymbol(other)),
    }
}

/// Tensor product of single-site density matrices, site 0 leftmost. Every
/// entry is a product of dyadic rationals, so the trace is exactly one.
fn product_state(symbols: &[char]) -> Result<Mat<c64>> {
    let factors = symbols.iter().map(|&s| site_state(s)).collect::<Result<Vec<_>>>()?;
    let n = factors.len();
    let d = 1usize << n;
    Ok(Mat::from_fn(d, d, |i, j| {
        let mut v = 1.0;
        for (l, f) in factors.iter().enumerate() {
            let b = n - 1 - l;
            v *= f[i >> b & 1][j >> b & 1];
        }
        c64::new(v, 0.0)
    }))
}

pub fn build_initial_state(spec: &InitialStateSpec, n_sites: usize) -> Result<Mat<c64>> {
    let symbols: Vec<char> = match spec {
        InitialStateSpec::PurePattern(p) => {
            let s: Vec<char> = p.chars().collect();
            if s.len() != n_sites {
                return Err(Error::DimensionMismatch { expected: n_sites, found: s.len() });
            }
            if let Some(&bad) = s.iter().find(|c| !matches!(c, '0' | '1' | '+')) {
                return Err(Error::InvalidSymbol(bad));
            }
            s
        }
        InitialStateSpec::MixedB => (0..n_sites).map(|l| if l < n_sites / 2 { '1' } else { 'm' }).collect(),
        InitialStateSpec::SeedSize(k) => {
            if *k > n_sites {
                return Err(Error::InvalidParameter { field: "seed_sites", reason: format!("{k} exceeds {n_sites} sites") });
            }
            (0..n_sites).map(|l| if l < *k { '1' } else { '+' }).collect()
        }
    };
    product_state(&symbols)
}

/// Per-period bounds on the state checked during a stroboscopic run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantBounds {
    pub trace: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl Default for InvariantBounds {
    fn default() -> Self {
        Self { trace: 1e-9, hermiticity: 1e-9, min_eigenvalue: -1e-8 }
    }
}

fn record(out: &mut ObservableTrace, n: usize, rho: &Mat<c64>, partition: &Partition, bounds: &InvariantBounds) -> Result<()> {
    let r = rho.as_ref();
    let trace_error = (trace(r) - c64::new(1.0, 0.0)).norm();
    let herm = hermiticity_error(r);
    let min_eig = min_hermitian_eigenvalue(r)?;
    for (what, value, bad) in [
        ("trace", trace_error, trace_error > bounds.trace),
        ("hermiticity", herm, herm > bounds.hermiticity),
        ("positivity", min_eig, min_eig < bounds.min_eigenvalue),
    ] {
        if bad || !value.is_finite() {
            return Err(Error::InvariantViolation { period: n, what, value });
        }
    }
    out.periods.push(n);
    out.magnetization.push(magnetizations(r)?);
    out.negativity.push(negativity(r, partition)?);
    out.purity.push(purity(r)?);
    out.excitations.push(total_excitations(r)?);
    out.trace_error.push(trace_error);
    out.hermiticity_error.push(herm);
    out.min_eigenvalue.push(min_eig);
    Ok(())
}

/// Applies `Phi_T` `n_periods` times, recording every observable at
/// `n = 0, 1, ..., n_periods` across the half-chain bipartition.
pub fn run_stroboscopic(rho0: MatRef<'_, c64>, config: &SpinNetworkConfig, n_periods: usize) -> Result<ObservableTrace> {
    let map = floquet_map(config)?;
    run_stroboscopic_with_map(rho0, &map, &Partition::halves(config.n_sites), n_periods, &InvariantBounds::default())
}

/// As [`run_stroboscopic`], with a prebuilt one-period map.
pub fn run_stroboscopic_with_map(
    rho0: MatRef<'_, c64>,
    map: &DynamicalMap,
    partition: &Partition,
    n_periods: usize,
    bounds: &InvariantBounds,
) -> Result<ObservableTrace> {
    if n_periods == 0 {
        return Err(Error::InvalidParameter { field: "n_periods", reason: "must be at least 1".into() });
    }
    if map.period_multiple != 1 {
        return Err(Error::InvalidParameter { field: "map", reason: "expected a one-period map".into() });
    }
    let d = rho0.nrows();
    if map.matrix.nrows() != d * d {
        return Err(Error::DimensionMismatch { expected: map.matrix.nrows(), found: d * d });
    }
    let mut out = ObservableTrace::default();
    let mut v = vectorize(rho0);
    let mut rho = rho0.to_owned();
    record(&mut out, 0, &rho, partition, bounds)?;
    for n in 1..=n_periods {
        v = &map.matrix * &v;
        rho = devectorize(&v)?;
        record(&mut out, n, &rho, partition, bounds)?;
    }
    Ok(out)
}

/// Richardson tolerance of the reference integrator.
pub const ODE_TOLERANCE: f64 = 1e-6;

fn steps_for(segment: f64, dt: f64) -> Result<usize> {
    let k = (segment / dt).round();
    if k < 1.0 || (k * dt - segment).abs() > 1e-9 * segment.max(dt) {
        return Err(Error::StepDoesNotDivide { dt });
    }
    Ok(k as usize)
}

fn rk4(rho: &mut Mat<c64>, h: MatRef<'_, c64>, n: usize, gamma: f64, dt: f64, steps: usize) -> Result<()> {
    let half = faer::Scale(c64::new(dt / 2.0, 0.0));
    let full = faer::Scale(c64::new(dt, 0.0));
    let sixth = faer::Scale(c64::new(dt / 6.0, 0.0));
    for _ in 0..steps {
        let k1 = lindblad_rhs(rho.as_ref(), h, n, gamma)?;
        let k2 = lindblad_rhs((&*rho + &k1 * half).as_ref(), h, n, gamma)?;
        let k3 = lindblad_rhs((&*rho + &k2 * half).as_ref(), h, n, gamma)?;
        let k4 = lindblad_rhs((&*rho + &k3 * full).as_ref(), h, n, gamma)?;
        let incr = (k1 + (k2 + k3) * faer::Scale(c64::new(2.0, 0.0)) + k4) * sixth;
        *rho += incr;
    }
    Ok(())
}

/// Fixed-step RK4 integration of the master equation over `n_periods`, kick
/// segment first with dephasing switched off, with no accuracy check.
pub fn ode_oracle_evolve_unchecked(rho0: MatRef<'_, c64>, config: &SpinNetworkConfig, n_periods: usize, dt: f64) -> Result<Mat<c64>> {
    config.validate_dense()?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter { field: "dt", reason: format!("{dt} is not positive") });
    }
    let (s1, s2) = (steps_for(config.t1, dt)?, steps_for(config.t2, dt)?);
    let h1 = hamiltonian_kick(config);
    let h2 = hamiltonian_interaction(config);
    let n = config.n_sites;
    let mut rho = rho0.to_owned();
    for _ in 0..n_periods {
        rk4(&mut rho, h1.as_ref(), n, 0.0, dt, s1)?;
        rk4(&mut rho, h2.as_ref(), n, config.gamma, dt, s2)?;
    }
    Ok(rho)
}

/// RK4 state plus its step-doubling error estimate `|rho_h - rho_h'| / 15`,
/// where `h'` is `2 dt` when both segments allow it and `dt / 2` otherwise.
pub fn ode_oracle_with_estimate(rho0: MatRef<'_, c64>, config: &SpinNetworkConfig, n_periods: usize, dt: f64) -> Result<(Mat<c64>, f64)> {
    let rho = ode_oracle_evolve_unchecked(rho0, config, n_periods, dt)?;
    let even = steps_for(config.t1, dt)? % 2 == 0 && steps_for(config.t2, dt)? % 2 == 0;
    let other = ode_oracle_evolve_unchecked(rho0, config, n_periods, if even { 2.0 * dt } else { dt / 2.0 })?;
    let estimate = max_abs_diff(rho.as_ref(), other.as_ref()) / 15.0;
    Ok((rho, estimate))
}

/// Reference evolution, refused when the step-doubling estimate exceeds
/// [`ODE_TOLERANCE`].
pub fn ode_oracle_evolve(rho0: MatRef<'_, c64>, config: &SpinNetworkConfig, n_periods: usize, dt: f64) -> Result<Mat<c64>> {
    let (rho, estimate) = ode_oracle_with_estimate(rho0, config, n_periods, dt)?;
    if estimate > ODE_TOLERANCE {
        return Err(Error::StepTooCoarse { dt, estimate, tolerance: ODE_TOLERANCE });
    }
    Ok(rho)
}

/// Disorder sweep: every realization `r` draws its on-site energies from
/// [`realization_seed`]`(base_seed, r)`, the same draw for every `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Disorder strengths `W` (1/T).
    pub w_values: Vec<f64>,
    pub n_realizations: usize,
    pub base_seed: u64,
    /// Everything except the disorder.
    pub config: SpinNetworkConfig,
}

/// Default number of realizations per disorder strength.
pub const DEFAULT_REALIZATIONS: usize = 20;
/// Realizations per point in the published band.
pub const PAPER_REALIZATIONS: usize = 200;

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameter { field: "n_realizations", reason: "must be at least 1".into() });
        }
        if let Some(w) = self.w_values.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter { field: "w_values", reason: format!("{w} is not a finite non-negative strength") });
        }
        self.config.validate()
    }

    /// `(w_index, realization)` for every task, in aggregation order.
    pub fn tasks(&self) -> Vec<(usize, usize)> {
        (0..self.w_values.len()).flat_map(|w| (0..self.n_realizations).map(move |r| (w, r))).collect()
    }

    pub fn realization_config(&self, w_index: usize, realization: usize) -> SpinNetworkConfig {
        self.config.clone().sampled_disorder(self.w_values[w_index], realization_seed(self.base_seed, realization))
    }
}

/// SplitMix64 finalizer applied to the realization's position in the
/// base seed's stream; earlier realizations never depend on later ones.
pub fn realization_seed(base_seed: u64, realization: usize) -> u64 {
    let mut z = base_seed.wrapping_add((realization as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Liouvillian gap of one configuration in units of `1/T`, `None` when no
/// eigenvalue decays. Uses the sector blocks of `Phi_2T` when the kick
/// respects them and the dense map otherwise.
pub fn realization_gap(config: &SpinNetworkConfig) -> Result<Option<f64>> {
    let spec = two_period_spectrum(config)?;
    Ok(liouvillian_gap(&spec, DEFAULT_ZERO_THRESHOLD).gap.map(|g| g * config.period()))
}

fn two_period_spectrum(config: &SpinNetworkConfig) -> Result<SpectralData> {
    let horizon = 2.0 * config.period();
    match floquet_map_2t_blocks(config) {
        Ok(blocks) => block_spectrum(&blocks, horizon),
        Err(Error::SectorsBroken(_)) => map_spectrum(&floquet_map_2t(config)?),
        Err(e) => Err(e),
    }
}

/// Gap `Delta T` of task `(w_index, realization)`.
pub fn run_sweep_task(spec: &SweepSpec, w_index: usize, realization: usize) -> Result<Option<f64>> {
    realization_gap(&spec.realization_config(w_index, realization))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub w: f64,
    /// `Delta T` per realization; `None` when it failed or had no gap.
    pub gaps: Vec<Option<f64>>,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    /// Realizations entering the statistics.
    pub n_valid: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub w_index: usize,
    pub realization: usize,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Disorder seed of each realization index.
    pub seeds: Vec<u64>,
    pub failures: Vec<SweepFailure>,
}

/// Collects task outcomes in any order into a [`SweepResult`]; sums run over
/// realization index so the result does not depend on arrival order.
pub fn aggregate_sweep(spec: &SweepSpec, outcomes: Vec<((usize, usize), Result<Option<f64>>)>) -> SweepResult {
    let mut outcomes = outcomes;
    outcomes.sort_by_key(|(k, _)| *k);
    let mut gaps = vec![vec![None; spec.n_realizations]; spec.w_values.len()];
    let mut failures = Vec::new();
    for ((w_index, realization), outcome) in outcomes {
        match outcome {
            Ok(g) => gaps[w_index][realization] = g,
            Err(error) => failures.push(SweepFailure { w_index, realization, error }),
        }
    }
    let points = gaps
        .into_iter()
        .zip(&spec.w_values)
        .map(|(gaps, &w)| {
            let valid: Vec<f64> = gaps.iter().flatten().copied().collect();
            let n_valid = valid.len();
            let (mean, min, max) = if n_valid == 0 {
                (None, None, None)
            } else {
                let sum: f64 = valid.iter().sum();
                let min = valid.iter().copied().fold(f64::INFINITY, f64::min);
                let max = valid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                // an all-equal set must report mean == min == max exactly
                let mean = (sum / n_valid as f64).clamp(min, max);
                (Some(mean), Some(min), Some(max))
            };
            SweepPoint { w, gaps, mean, min, max, n_valid }
        })
        .collect();
    let seeds = (0..spec.n_realizations).map(|r| realization_seed(spec.base_seed, r)).collect();
    SweepResult { points, seeds, failures }
}

/// Sequential sweep over every `(W, realization)` pair.
pub fn disorder_gap_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let outcomes = spec.tasks().into_iter().map(|k| (k, run_sweep_task(spec, k.0, k.1))).collect();
    Ok(aggregate_sweep(spec, outcomes))
}

/// Every eigenvalue `Lambda` of the two-period effective Liouvillian, in
/// units of `1/T`, sorted by decreasing real part.
pub fn spectrum_snapshot(config: &SpinNetworkConfig) -> Result<Vec<c64>> {
    config.validate()?;
    Ok(two_period_spectrum(config)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_norm;
    use crate::observables::magnetization;
    use proptest::prelude::*;

    #[test]
    fn initial_state_examples() {
        let rho = build_initial_state(&InitialStateSpec::PurePattern("111+++".into()), 6).unwrap();
        assert_eq!(trace(rho.as_ref()), c64::new(1.0, 0.0));
        assert!((purity(rho.as_ref()).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(total_excitations(rho.as_ref()).unwrap(), 4.5);
        let mixed = build_initial_state(&InitialStateSpec::MixedB, 6).unwrap();
        assert_eq!(trace(mixed.as_ref()), c64::new(1.0, 0.0));
        assert_eq!(purity(mixed.as_ref()).unwrap(), 0.125);
        assert_eq!(total_excitations(mixed.as_ref()).unwrap(), 4.5);
        let seed = build_initial_state(&InitialStateSpec::SeedSize(1), 6).unwrap();
        assert_eq!(magnetizations(seed.as_ref()).unwrap(), vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(hermiticity_error(seed.as_ref()), 0.0);
        let zero = build_initial_state(&InitialStateSpec::PurePattern("0+".into()), 2).unwrap();
        assert_eq!(magnetization(zero.as_ref(), 0).unwrap(), -1.0);
    }

    #[test]
    fn initial_state_errors() {
        let bad = build_initial_state(&InitialStateSpec::PurePattern("11x".into()), 3);
        assert_eq!(bad, Err(Error::InvalidSymbol('x')));
        assert!(matches!(build_initial_state(&InitialStateSpec::PurePattern("11".into()), 3), Err(Error::DimensionMismatch { .. })));
        assert!(build_initial_state(&InitialStateSpec::SeedSize(4), 3).is_err());
        // the internal mixed-site marker is not a user symbol
        assert_eq!(build_initial_state(&InitialStateSpec::PurePattern("1m".into()), 2), Err(Error::InvalidSymbol('m')));
    }

    #[test]
    fn decoupled_pulses_alternate_exactly() {
        let cfg = SpinNetworkConfig::with_sites(4).j0(0.0).gamma(0.0);
        let rho = build_initial_state(&InitialStateSpec::PurePattern("1+0+".into()), 4).unwrap();
        let trace = run_stroboscopic(rho.as_ref(), &cfg, 6).unwrap();
        let m0 = &trace.magnetization[0];
        for (n, row) in trace.magnetization.iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for (a, b) in row.iter().zip(m0) {
                assert!((a - sign * b).abs() < 1e-12, "n={n}: {a} vs {b}");
            }
        }
        assert_eq!(trace.len(), 7);
    }

    #[test]
    fn stroboscopic_requires_periods() {
        let cfg = SpinNetworkConfig::with_sites(2);
        let rho = build_initial_state(&InitialStateSpec::SeedSize(1), 2).unwrap();
        assert!(run_stroboscopic(rho.as_ref(), &cfg, 0).is_err());
    }

    #[test]
    fn invariant_violation_reports_period() {
        let cfg = SpinNetworkConfig::with_sites(2);
        let mut map = floquet_map(&cfg).unwrap();
        // leak a little trace every period
        map.matrix = &map.matrix * faer::Scale(c64::new(1.0 - 1e-6, 0.0));
        let rho = build_initial_state(&InitialStateSpec::SeedSize(1), 2).unwrap();
        let err = run_stroboscopic_with_map(rho.as_ref(), &map, &Partition::halves(2), 5, &InvariantBounds::default()).unwrap_err();
        match err {
            Error::InvariantViolation { period, what, value } => {
                assert_eq!((period, what), (1, "trace"));
                assert!((value - 1e-6).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oracle_matches_map_after_one_period() {
        let cfg = SpinNetworkConfig::with_sites(3);
        let rho = build_initial_state(&InitialStateSpec::PurePattern("1++".into()), 3).unwrap();
        let map = floquet_map(&cfg).unwrap();
        let via_map = devectorize(&(&map.matrix * vectorize(rho.as_ref()))).unwrap();
        let via_ode = ode_oracle_evolve(rho.as_ref(), &cfg, 1, cfg.period() / 2000.0).unwrap();
        assert!(max_abs_diff(via_map.as_ref(), via_ode.as_ref()) < 1e-9);
    }

    #[test]
    fn oracle_is_fourth_order() {
        let cfg = SpinNetworkConfig::with_sites(3);
        let rho = build_initial_state(&InitialStateSpec::PurePattern("1+0".into()), 3).unwrap();
        let map = floquet_map(&cfg).unwrap();
        let exact = devectorize(&(&map.matrix * vectorize(rho.as_ref()))).unwrap();
        let err = |steps: f64| {
            let r = ode_oracle_evolve_unchecked(rho.as_ref(), &cfg, 1, cfg.period() / steps).unwrap();
            max_abs_diff(r.as_ref(), exact.as_ref())
        };
        let ratio = err(40.0) / err(80.0);
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn oracle_unitary_limit_keeps_purity() {
        let cfg = SpinNetworkConfig::with_sites(3).gamma(0.0);
        let rho = build_initial_state(&InitialStateSpec::SeedSize(1), 3).unwrap();
        let out = ode_oracle_evolve(rho.as_ref(), &cfg, 2, cfg.period() / 2000.0).unwrap();
        assert!((purity(out.as_ref()).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn oracle_step_errors() {
        let cfg = SpinNetworkConfig::with_sites(2);
        let rho = build_initial_state(&InitialStateSpec::SeedSize(1), 2).unwrap();
        assert_eq!(ode_oracle_evolve(rho.as_ref(), &cfg, 1, 0.3), Err(Error::StepDoesNotDivide { dt: 0.3 }));
        assert!(matches!(ode_oracle_evolve(rho.as_ref(), &cfg, 1, 0.25), Err(Error::StepTooCoarse { .. })));
        assert!(ode_oracle_evolve(rho.as_ref(), &cfg, 1, -1.0).is_err());
    }

    fn small_sweep(n_realizations: usize, w_values: Vec<f64>) -> SweepSpec {
        SweepSpec { w_values, n_realizations, base_seed: 7, config: SpinNetworkConfig::with_sites(4) }
    }

    #[test]
    fn clean_sweep_is_degenerate() {
        let res = disorder_gap_sweep(&small_sweep(3, vec![0.0])).unwrap();
        let p = &res.points[0];
        assert_eq!(p.n_valid, 3);
        assert_eq!(p.min, p.max);
        assert_eq!(p.mean, p.min);
        assert!((p.mean.unwrap() - 0.02).abs() < 1e-10);
        assert!(res.failures.is_empty());
    }

    #[test]
    fn sweep_is_deterministic_and_ordered() {
        let spec = small_sweep(3, vec![0.0, 5.0]);
        let a = disorder_gap_sweep(&spec).unwrap();
        let b = disorder_gap_sweep(&spec).unwrap();
        assert_eq!(a, b);
        let mut outcomes: Vec<_> = spec.tasks().into_iter().map(|k| (k, run_sweep_task(&spec, k.0, k.1))).collect();
        outcomes.reverse();
        assert_eq!(aggregate_sweep(&spec, outcomes), a);
        for p in &a.points {
            assert!(p.min.unwrap() <= p.mean.unwrap() && p.mean.unwrap() <= p.max.unwrap());
        }
        // growing the ensemble keeps existing realizations
        let bigger = disorder_gap_sweep(&small_sweep(4, vec![0.0, 5.0])).unwrap();
        assert_eq!(&bigger.seeds[..3], &a.seeds[..]);
        assert_eq!(&bigger.points[1].gaps[..3], &a.points[1].gaps[..]);
    }

    #[test]
    fn sweep_records_failures() {
        let spec = small_sweep(2, vec![1.0]);
        let outcomes = vec![((0, 0), Ok(Some(0.01))), ((0, 1), Err(Error::EigenFailed))];
        let res = aggregate_sweep(&spec, outcomes);
        assert_eq!(res.failures, vec![SweepFailure { w_index: 0, realization: 1, error: Error::EigenFailed }]);
        assert_eq!(res.points[0].n_valid, 1);
        assert_eq!(res.points[0].mean, Some(0.01));
        let empty = aggregate_sweep(&spec, vec![((0, 0), Err(Error::EigenFailed)), ((0, 1), Err(Error::EigenFailed))]);
        assert_eq!(empty.points[0].mean, None);
        let mut bad = spec.clone();
        bad.n_realizations = 0;
        assert!(disorder_gap_sweep(&bad).is_err());
        bad.n_realizations = 1;
        bad.w_values = vec![-1.0];
        assert!(disorder_gap_sweep(&bad).is_err());
    }

    #[test]
    fn realization_seeds_are_distinct() {
        let seeds: Vec<u64> = (0..100).map(|r| realization_seed(1, r)).collect();
        let mut sorted = seeds.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_ne!(realization_seed(1, 0), realization_seed(2, 0));
    }

    #[test]
    fn snapshot_examples() {
        let cfg = SpinNetworkConfig::with_sites(4);
        let lambda = spectrum_snapshot(&cfg).unwrap();
        assert_eq!(lambda.len(), 256);
        assert!(lambda.iter().filter(|z| z.norm() < 1e-10).count() >= 5);
        let closed = spectrum_snapshot(&cfg.clone().gamma(0.0)).unwrap();
        assert!(closed.iter().all(|z| z.re.abs() < 1e-10));
        // a broken kick falls back to the dense route
        let tilted = spectrum_snapshot(&SpinNetworkConfig::with_sites(3).epsilon(0.05)).unwrap();
        assert_eq!(tilted.len(), 64);
        assert!(tilted.iter().all(|z| z.re < 1e-10));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn stroboscopic_drift_is_tiny(pattern in "[01+]{3}", gamma in 0.0..0.2f64, eps in 0.0..0.1f64) {
            let cfg = SpinNetworkConfig::with_sites(3).gamma(gamma).epsilon(eps);
            let rho = build_initial_state(&InitialStateSpec::PurePattern(pattern), 3).unwrap();
            let trace = run_stroboscopic(rho.as_ref(), &cfg, 40).unwrap();
            prop_assert!(trace.trace_error.iter().all(|e| *e < 1e-12));
            prop_assert!(trace.hermiticity_error.iter().all(|e| *e < 1e-12));
            for w in trace.purity.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-10);
            }
            prop_assert!(max_norm(rho.as_ref()) <= 1.0);
        }
    }
}
