use std::fs;
use std::process::Command;

use onoff_cli::{run, Experiment, ExperimentConfig};

fn small(e: Experiment, out: &std::path::Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::preset(e);
    cfg.replications = 40;
    cfg.out = out.to_path_buf();
    cfg
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    for e in [Experiment::Decomposition, Experiment::Stationarity] {
        let a = run(&small(e, &dir.path().join("a"))).unwrap();
        let b = run(&small(e, &dir.path().join("b"))).unwrap();
        assert_eq!(fs::read(a.csv).unwrap(), fs::read(b.csv).unwrap());
    }
}

#[test]
fn different_seed_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(Experiment::Stationarity, &dir.path().join("a"));
    let a = run(&cfg).unwrap();
    cfg.seed += 1;
    cfg.out = dir.path().join("b");
    let b = run(&cfg).unwrap();
    assert_ne!(fs::read(a.csv).unwrap(), fs::read(b.csv).unwrap());
}

#[test]
fn serial_and_parallel_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(Experiment::Decomposition, &dir.path().join("serial"));
    cfg.threads = Some(1);
    let serial = run(&cfg).unwrap();
    cfg.threads = Some(3);
    cfg.out = dir.path().join("parallel");
    let parallel = run(&cfg).unwrap();
    assert_eq!(serial.report, parallel.report);
    assert_eq!(fs::read(serial.csv).unwrap(), fs::read(parallel.csv).unwrap());
}

#[test]
fn csv_schema_is_long_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&small(Experiment::Decomposition, dir.path())).unwrap();
    let text = fs::read_to_string(out.csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "experiment,replication,t,series,value");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "decomposition");
    assert_eq!(first[1], "0");
    assert_eq!(first[3], "lhs");
    let mantissa = first[4].trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);
}

#[test]
fn manifest_echoes_config_and_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(Experiment::RegimeTable, dir.path());
    let out = run(&cfg).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.manifest).unwrap()).unwrap();
    let echoed: serde_json::Value = serde_json::to_value(&cfg).unwrap();
    assert_eq!(manifest["config"], echoed);
    for key in echoed.as_object().unwrap().keys() {
        assert!(manifest["config"].get(key).is_some(), "{key}");
    }
    let derived = &manifest["derived"];
    for key in [
        "a",
        "fcr_normalization",
        "scr_normalization",
        "sigma_gamma",
        "sigma_zero",
        "epsilon",
        "region_mass",
        "compensator_mass",
        "truncation_variance",
    ] {
        assert!(derived[key].is_number(), "{key}");
    }
    assert!((derived["fcr_normalization"].as_f64().unwrap() - 31_622.776_601_683_792).abs() < 1e-6);
    assert!((derived["scr_normalization"].as_f64().unwrap() - 46_415.888_336_127_79).abs() < 1e-6);
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn regime_table_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&small(Experiment::RegimeTable, dir.path())).unwrap();
    let text = fs::read_to_string(out.csv).unwrap();
    let fcr = text.lines().find(|l| l.contains(",fcr_normalization,")).unwrap();
    let v: f64 = fcr.rsplit(',').next().unwrap().parse().unwrap();
    assert!((v - 31_622.8).abs() < 0.05);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_onoff-traffic"))
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = binary()
        .args(["--experiment", "decomposition", "--replications", "20", "--out"])
        .arg(dir.path().join("ok"))
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "experiment = \"no-such-thing\"\n").unwrap();
    let status = binary().arg("--config").arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(1));

    let zero = binary()
        .args(["--experiment", "decomposition", "--replications", "0", "--out"])
        .arg(dir.path().join("zero"))
        .status()
        .unwrap();
    assert_eq!(zero.code(), Some(1));

    let file = dir.path().join("unwritable");
    fs::write(&file, "").unwrap();
    let status = binary()
        .args(["--experiment", "regime-table", "--out"])
        .arg(file.join("sub"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn failed_check_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    // increasing dilations reverse the skewness ordering the check expects
    let config = dir.path().join("bridge.toml");
    fs::write(&config, "experiment = \"bridge\"\nreplications = 2000\nscales = [100.0, 1.0]\n").unwrap();
    let status = binary()
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("bridge"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn flags_override_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "experiment = \"decomposition\"\nseed = 5\nreplications = 3\n").unwrap();
    let out = dir.path().join("o");
    let status = binary()
        .arg("--config")
        .arg(&config)
        .args(["--seed", "9", "--replications", "4", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 9);
    assert_eq!(manifest["config"]["replications"], 4);
}
