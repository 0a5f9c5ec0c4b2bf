//! Cross-module checks: independent routes to the same dynamics.

use dtc_core::experiments::{
    build_initial_state, ode_oracle_evolve, realization_gap, run_stroboscopic, spectrum_snapshot, InitialStateSpec,
};
use dtc_core::floquet::{floquet_map, floquet_map_2t, floquet_map_2t_blocks};
use dtc_core::linalg::{max_abs_diff, max_norm};
use dtc_core::spectra::{block_spectrum, liouvillian_gap, map_spectrum, DEFAULT_ZERO_THRESHOLD};
use dtc_core::superop::{devectorize, vectorize};
use dtc_core::SpinNetworkConfig;

#[test]
fn map_and_oracle_agree_over_several_periods() {
    let cfg = SpinNetworkConfig::with_sites(4).sampled_disorder(3.0, 11).epsilon(0.03);
    let rho = build_initial_state(&InitialStateSpec::PurePattern("11++".into()), 4).unwrap();
    let map = floquet_map(&cfg).unwrap();
    let mut v = vectorize(rho.as_ref());
    for _ in 0..3 {
        v = &map.matrix * &v;
    }
    let via_map = devectorize(&v).unwrap();
    let via_ode = ode_oracle_evolve(rho.as_ref(), &cfg, 3, cfg.period() / 1000.0).unwrap();
    assert!(max_abs_diff(via_map.as_ref(), via_ode.as_ref()) < 1e-8);
}

#[test]
fn dense_and_block_gaps_agree_with_disorder() {
    let cfg = SpinNetworkConfig::with_sites(4).sampled_disorder(12.0, 5);
    let dense = liouvillian_gap(&map_spectrum(&floquet_map_2t(&cfg).unwrap()).unwrap(), DEFAULT_ZERO_THRESHOLD);
    let blocks = floquet_map_2t_blocks(&cfg).unwrap();
    let fast = liouvillian_gap(&block_spectrum(&blocks, 2.0 * cfg.period()).unwrap(), DEFAULT_ZERO_THRESHOLD);
    assert_eq!(dense.n_steady, fast.n_steady);
    assert!((dense.gap.unwrap() - fast.gap.unwrap()).abs() < 1e-10);
    assert!((realization_gap(&cfg).unwrap().unwrap() - fast.gap.unwrap()).abs() < 1e-14);
}

#[test]
fn six_site_snapshot() {
    let lambda = spectrum_snapshot(&SpinNetworkConfig::paper_default()).unwrap();
    assert_eq!(lambda.len(), 4096);
    assert!(lambda.iter().filter(|z| z.norm() < 1e-10).count() >= 7);
    let slowest = lambda.iter().map(|z| -z.re).filter(|g| *g > 1e-10).fold(f64::INFINITY, f64::min);
    assert!((slowest - 0.02).abs() < 1e-10, "{slowest}");
    assert!(lambda.iter().all(|z| z.re < 1e-10));
}

#[test]
fn imperfect_kick_keeps_period_doubling() {
    // smoke threshold: region-B amplitude above 0.05 at n = 150
    let cfg = SpinNetworkConfig::paper_default().epsilon(0.02);
    let rho = build_initial_state(&InitialStateSpec::PurePattern("111+++".into()), 6).unwrap();
    let trace = run_stroboscopic(rho.as_ref(), &cfg, 151).unwrap();
    for l in 3..6 {
        let (a, b) = (trace.magnetization[150][l], trace.magnetization[151][l]);
        assert!(a.abs() > 0.05, "site {l}: {a}");
        assert!(a * b < 0.0, "site {l}: {a} then {b}");
    }
    assert!(trace.trace_error.iter().all(|e| *e < 1e-9));
}

#[test]
fn maps_are_finite_and_contractive() {
    let cfg = SpinNetworkConfig::with_sites(3).gamma(0.5).epsilon(0.2);
    let map = floquet_map(&cfg).unwrap();
    assert!(max_norm(map.matrix.as_ref()).is_finite());
    for mu in map_spectrum(&map).unwrap().multipliers.unwrap() {
        assert!(mu.norm() <= 1.0 + 1e-12);
    }
}
