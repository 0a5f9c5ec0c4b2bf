//! End-to-end runs of the `dtc` binary.

use std::path::Path;
use std::process::{Command, Output};

use dtc_cli::output::{format_float, read_table, Manifest};

fn dtc(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dtc"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn dtc")
}

fn manifest(dir: &Path, command: &str) -> Manifest {
    let text = std::fs::read_to_string(dir.join(format!("{command}.manifest.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn flags_override_env_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"n_sites": 3, "gammaT": 0.05, "n_periods": 5, "initial_state": "1++"}"#).unwrap();
    let out_dir = dir.path().join("a");
    let o = out_dir.to_str().unwrap();
    let c = cfg.to_str().unwrap();

    ok(&dtc(&["evolve", "--config", c, "--output", o], &[]));
    let m = manifest(&out_dir, "evolve");
    assert_eq!((m.config.gamma_t, m.config.n_periods), (0.05, 5));

    ok(&dtc(&["evolve", "--config", c, "--output", o], &[("DTC_N_PERIODS", "7"), ("DTC_GAMMA_T", "0.03")]));
    let m = manifest(&out_dir, "evolve");
    assert_eq!((m.config.gamma_t, m.config.n_periods), (0.03, 7));

    ok(&dtc(&["evolve", "--config", c, "--output", o, "--n-periods", "9"], &[("DTC_N_PERIODS", "7")]));
    let m = manifest(&out_dir, "evolve");
    assert_eq!(m.config.n_periods, 9);
    let (_, _, rows) = read_table(&out_dir.join("evolve.csv")).unwrap();
    assert_eq!(rows.len(), 10);
}

#[test]
fn invalid_values_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"gammaT": -0.1}"#).unwrap();
    let out = dtc(&["evolve", "--config", cfg.to_str().unwrap()], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("gammaT"));

    std::fs::write(&cfg, r#"{"gamma": 0.1}"#).unwrap();
    let out = dtc(&["evolve", "--config", cfg.to_str().unwrap()], &[]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));

    let out = dtc(&["evolve", "--n-sites", "3", "--initial-state", "1x+"], &[]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial_state"));
}

#[test]
fn tables_round_trip_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    ok(&dtc(&["evolve", "--n-sites", "3", "--initial-state", "1++", "--n-periods", "12", "--output", o], &[]));
    let (header, columns, rows) = read_table(&dir.path().join("evolve.csv")).unwrap();
    assert!(header.starts_with("# dtc ") && header.contains("command=evolve"));
    assert_eq!(columns, ["n", "mz_0", "mz_1", "mz_2", "negativity", "purity", "excitations"]);
    for row in &rows {
        for cell in &row[1..] {
            let v: f64 = cell.parse().unwrap();
            assert_eq!(&format_float(v), cell);
            let digits = cell.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17);
        }
    }

    // the same run through the library gives the same numbers
    let cfg = dtc_core::SpinNetworkConfig::with_sites(3);
    let spec = dtc_core::experiments::InitialStateSpec::PurePattern("1++".into());
    let rho = dtc_core::experiments::build_initial_state(&spec, 3).unwrap();
    let trace = dtc_core::experiments::run_stroboscopic(rho.as_ref(), &cfg, 12).unwrap();
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[1].parse::<f64>().unwrap(), trace.magnetization[k][0]);
        assert_eq!(row[4].parse::<f64>().unwrap(), trace.negativity[k]);
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = |o: &str| {
        ["gap-sweep", "--n-sites", "4", "--n-realizations", "3", "--w-over-j0-values", "0,12", "--seed", "42", "--output"]
            .iter()
            .map(|s| s.to_string())
            .chain([o.to_string()])
            .collect::<Vec<_>>()
    };
    for d in [&a, &b] {
        let v = args(d.path().to_str().unwrap());
        ok(&dtc(&v.iter().map(String::as_str).collect::<Vec<_>>(), &[]));
    }
    for name in ["gap_sweep.csv", "gap_sweep_raw.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let (mut ma, mut mb) = (manifest(a.path(), "gap-sweep"), manifest(b.path(), "gap-sweep"));
    for m in [&mut ma, &mut mb] {
        m.wall_time_s = 0.0;
        m.timestamp_unix = 0;
        m.config.output = Default::default();
        m.outputs.iter_mut().for_each(|p| *p = p.file_name().unwrap().into());
    }
    assert_eq!(ma, mb);
    assert_eq!(ma.seeds.len(), 3);
    let (_, _, rows) = read_table(&a.path().join("gap_sweep.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    let min: f64 = rows[1][2].parse().unwrap();
    let mean: f64 = rows[1][1].parse().unwrap();
    let max: f64 = rows[1][3].parse().unwrap();
    assert!(min <= mean && mean <= max);
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    ok(&dtc(&["spectrum", "--n-sites", "3", "--output", o], &[]));
    let (_, cols, rows) = read_table(&dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(cols, ["re_lambda", "im_lambda"]);
    assert_eq!(rows.len(), 64);
    assert_eq!(manifest(dir.path(), "spectrum").results["n_steady"], 4);

    ok(&dtc(&["twosite", "--w-over-j0-values", "0,3", "--output", o], &[]));
    let (_, _, rows) = read_table(&dir.path().join("twosite.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    let m = manifest(dir.path(), "twosite");
    assert!((m.results["crossing_W_over_J0"].as_f64().unwrap() - 4.496951373874).abs() < 1e-9);

    ok(&dtc(&["validate", "--n-sites", "3", "--n-periods", "20", "--output", o], &[]));
    assert_eq!(manifest(dir.path(), "validate").results["passed"], true);

    let help = dtc(&["--help"], &[]);
    assert!(help.status.success());
    assert!(String::from_utf8_lossy(&help.stdout).contains("gap-sweep"));
}

#[test]
fn paper_realizations_flag_sets_ensemble_size() {
    let cli = <dtc_cli::Cli as clap::Parser>::try_parse_from(["dtc", "gap-sweep", "--paper-realizations"]).unwrap();
    let cfg = dtc_cli::resolve_config(&cli.command, Vec::new()).unwrap();
    assert_eq!(cfg.n_realizations, 200);
    assert!(<dtc_cli::Cli as clap::Parser>::try_parse_from(["dtc", "gap-sweep", "--paper-realizations", "--n-realizations", "3"]).is_err());
}
