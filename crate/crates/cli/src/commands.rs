//! One function per subcommand. Each writes its tables into the output
//! directory and returns what goes into the manifest.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, Result};
use dtc_core::experiments::{
    aggregate_sweep, build_initial_state, ode_oracle_evolve, run_stroboscopic, run_stroboscopic_with_map, run_sweep_task,
    spectrum_snapshot, InvariantBounds, SweepSpec,
};
use dtc_core::floquet::{effective_hamiltonian_2t, floquet_map, floquet_map_2t, matrix_exp};
use dtc_core::linalg::max_abs_diff;
use dtc_core::observables::{Partition, SETTLING_RUN, SETTLING_TOLERANCE};
use dtc_core::spectra::{excitation_superop_commutant_check, liouvillian_gap, SpectralData, DEFAULT_ZERO_THRESHOLD};
use dtc_core::superop::{devectorize, trace_preservation_error, unitary_superop, vectorize};
use dtc_core::twosite_oracle::{
    analytic_effective_coupling, critical_disorder_estimate, numeric_crossing, two_site_gap_curve, two_site_numeric_coupling,
};
use dtc_core::{c64, Scale};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{header_line, write_table, Cell, Table};

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub seeds: Vec<u64>,
    pub results: Value,
    /// Set when the run finished but something failed; reported after the
    /// manifest is written.
    pub failure: Option<String>,
}

/// `W / J0` grid of `gap-sweep` when none is configured.
pub fn default_sweep_grid() -> Vec<f64> {
    (0..=8).map(|k| 5.0 * k as f64).collect()
}

/// `W / J0` grid of `twosite` when none is configured.
pub fn default_twosite_grid() -> Vec<f64> {
    (0..=80).map(|k| 0.5 * k as f64).collect()
}

fn table_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output.join(name)
}

fn emit(cfg: &RunConfig, command: &str, name: &str, table: &Table, outcome: &mut Outcome) -> Result<()> {
    let path = table_path(cfg, name);
    write_table(&path, &header_line(command, cfg)?, table)?;
    outcome.outputs.push(path);
    Ok(())
}

pub fn evolve(cfg: &RunConfig) -> Result<Outcome> {
    let net = cfg.network();
    let rho = build_initial_state(&cfg.initial_state_spec()?, cfg.n_sites)?;
    let trace = run_stroboscopic(rho.as_ref(), &net, cfg.n_periods)?;
    let mut columns = vec!["n".to_string()];
    columns.extend((0..cfg.n_sites).map(|l| format!("mz_{l}")));
    columns.extend(["negativity", "purity", "excitations"].map(String::from));
    let mut table = Table::new(columns);
    for k in 0..trace.len() {
        let mut row: Vec<Cell> = vec![trace.periods[k].into()];
        row.extend(trace.magnetization[k].iter().map(|&m| Cell::from(m)));
        row.extend([trace.negativity[k], trace.purity[k], trace.excitations[k]].map(Cell::from));
        table.push(row);
    }
    let mut out = Outcome { seeds: vec![cfg.seed], ..Default::default() };
    emit(cfg, "evolve", "evolve.csv", &table, &mut out)?;
    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
    out.results = json!({
        "settling_period": trace.settling_period(SETTLING_TOLERANCE, SETTLING_RUN),
        "max_trace_error": fold(&trace.trace_error, f64::max, 0.0),
        "max_hermiticity_error": fold(&trace.hermiticity_error, f64::max, 0.0),
        "min_eigenvalue": fold(&trace.min_eigenvalue, f64::min, f64::INFINITY),
        "disorder": net.disorder,
    });
    Ok(out)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let net = cfg.network();
    let lambda = spectrum_snapshot(&net)?;
    let mut table = Table::new(["re_lambda", "im_lambda"]);
    for z in &lambda {
        table.push(vec![z.re.into(), z.im.into()]);
    }
    let gap = liouvillian_gap(&SpectralData::from_generator_eigenvalues(lambda), DEFAULT_ZERO_THRESHOLD);
    let mut out = Outcome { seeds: vec![cfg.seed], ..Default::default() };
    emit(cfg, "spectrum", "spectrum.csv", &table, &mut out)?;
    out.results = json!({
        "gap_t": gap.gap,
        "relaxation_time_over_t": gap.relaxation_time(),
        "n_steady": gap.n_steady,
        "zero_threshold": gap.zero_threshold,
        "disorder": net.disorder,
    });
    Ok(out)
}

pub fn gap_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let grid = cfg.w_over_j0_values.clone().unwrap_or_else(default_sweep_grid);
    let j0 = cfg.j0();
    let spec = SweepSpec {
        w_values: grid.iter().map(|w| w * j0).collect(),
        n_realizations: cfg.n_realizations,
        base_seed: cfg.seed,
        config: cfg.clean_network(),
    };
    spec.validate()?;
    let outcomes: Vec<_> = spec.tasks().into_par_iter().map(|k| (k, run_sweep_task(&spec, k.0, k.1))).collect();
    let res = aggregate_sweep(&spec, outcomes);

    let mut summary = Table::new(["W_over_J0", "mean_gapT", "min_gapT", "max_gapT", "n_realizations"]);
    let mut raw = Table::new(["W_over_J0", "realization", "seed", "gapT"]);
    for (p, &w) in res.points.iter().zip(&grid) {
        summary.push(vec![w.into(), p.mean.into(), p.min.into(), p.max.into(), p.n_valid.into()]);
        for (r, g) in p.gaps.iter().enumerate() {
            raw.push(vec![w.into(), r.into(), res.seeds[r].into(), (*g).into()]);
        }
    }
    let mut out = Outcome { seeds: res.seeds.clone(), ..Default::default() };
    emit(cfg, "gap-sweep", "gap_sweep.csv", &summary, &mut out)?;
    emit(cfg, "gap-sweep", "gap_sweep_raw.csv", &raw, &mut out)?;
    let failures: Vec<Value> = res
        .failures
        .iter()
        .map(|f| json!({"W_over_J0": grid[f.w_index], "realization": f.realization, "error": f.error.to_string()}))
        .collect();
    if !failures.is_empty() {
        out.failure = Some(format!("{} realization(s) failed; see the manifest", failures.len()));
    }
    out.results = json!({ "failures": failures });
    Ok(out)
}

pub fn twosite(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.t1_over_t != 0.5 {
        bail!("invalid value for `t1_over_t`: twosite requires equal segments (0.5), got {}", cfg.t1_over_t);
    }
    let (j0, gamma, t2) = (cfg.j0(), cfg.gamma_t, 0.5);
    if j0 <= 0.0 {
        bail!("invalid value for `j0_t_over_2pi`: twosite requires a positive coupling");
    }
    let grid = cfg.w_over_j0_values.clone().unwrap_or_else(default_twosite_grid);
    let ws: Vec<f64> = grid.iter().map(|w| w * j0).collect();
    let gaps = two_site_gap_curve(j0, gamma, t2, &ws)?;
    let mut table =
        Table::new(["W_over_J0", "abs_K_analytic", "abs_K_numeric", "re_K", "im_K", "branch_flag", "gapT"]);
    for ((&w_rel, &w), gap) in grid.iter().zip(&ws).zip(&gaps) {
        let a = analytic_effective_coupling(j0, w, t2)?;
        let n = two_site_numeric_coupling(j0, w, t2)?;
        let flag = u64::from(a.near_branch || n.near_branch);
        table.push(vec![
            w_rel.into(),
            a.coupling().into(),
            n.coupling().into(),
            a.k.re.into(),
            a.k.im.into(),
            flag.into(),
            (*gap).into(),
        ]);
    }
    let mut out = Outcome::default();
    emit(cfg, "twosite", "twosite.csv", &table, &mut out)?;
    let crossing = numeric_crossing(j0, gamma, t2, PI / t2).ok().map(|w| w / j0);
    out.results = json!({
        "crossing_W_over_J0": crossing,
        "estimate_W_over_J0": critical_disorder_estimate(j0, gamma, t2) / j0,
    });
    Ok(out)
}

struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn below(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check { name, value, tolerance, pass: value < tolerance }
}

/// The invariant suite at the configured parameters.
pub fn validate(cfg: &RunConfig) -> Result<Outcome> {
    let net = cfg.network();
    let mut checks = Vec::new();

    // closed-system identity at eps = 0, W = 0
    let closed = cfg.clean_network().gamma(0.0).epsilon(0.0);
    let phi = floquet_map_2t(&closed)?;
    let heff = effective_hamiltonian_2t(&closed)?;
    let u = matrix_exp((heff * Scale(c64::new(0.0, -2.0 * closed.period()))).as_ref())?;
    checks.push(below("heff_identity", max_abs_diff(phi.matrix.as_ref(), unitary_superop(u.as_ref()).as_ref()), 1e-10));

    let sectored = net.clone().epsilon(0.0);
    checks.push(below("excitation_commutant", excitation_superop_commutant_check(&sectored)?.max(), 1e-10));

    let map = floquet_map(&net)?;
    checks.push(below("trace_preservation", trace_preservation_error(map.matrix.as_ref(), false), 1e-10));

    let rho = build_initial_state(&cfg.initial_state_spec()?, cfg.n_sites)?;
    let via_map = devectorize(&(&map.matrix * vectorize(rho.as_ref())))?;
    let via_ode = ode_oracle_evolve(rho.as_ref(), &net, 1, net.period() / 2000.0)?;
    checks.push(below("oracle_route", max_abs_diff(via_map.as_ref(), via_ode.as_ref()), 1e-6));

    let loose = InvariantBounds { trace: f64::INFINITY, hermiticity: f64::INFINITY, min_eigenvalue: f64::NEG_INFINITY };
    let trace = run_stroboscopic_with_map(rho.as_ref(), &map, &Partition::halves(cfg.n_sites), cfg.n_periods, &loose)?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    checks.push(below("trace_drift", max(&trace.trace_error), 1e-9));
    checks.push(below("hermiticity_drift", max(&trace.hermiticity_error), 1e-9));
    let min_eig = trace.min_eigenvalue.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check { name: "min_eigenvalue", value: min_eig, tolerance: -1e-8, pass: min_eig > -1e-8 });
    if net.gamma > 0.0 {
        let rise = trace.purity.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        checks.push(below("purity_increase", rise, 1e-10));
    }

    let mut table = Table::new(["check", "value", "tolerance", "pass"]);
    for c in &checks {
        table.push(vec![Cell::Text(c.name.into()), c.value.into(), c.tolerance.into(), u64::from(c.pass).into()]);
    }
    let mut out = Outcome { seeds: vec![cfg.seed], ..Default::default() };
    emit(cfg, "validate", "validate.csv", &table, &mut out)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if !failed.is_empty() {
        out.failure = Some(format!("failed checks: {}", failed.join(", ")));
    }
    out.results = json!({ "passed": failed.is_empty(), "failed": failed });
    Ok(out)
}
