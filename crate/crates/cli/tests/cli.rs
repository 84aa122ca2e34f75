use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn etcsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etcsim")).args(args).output().expect("binary runs")
}

fn write_cfg(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validation_error_exits_with_2_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "etm.variant = sample_relative_capped\netm.epsilon = 0.3\n");
    let out = etcsim(&["simulate", "--config", &cfg, "--outdir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tau_max"));

    let cfg = write_cfg(dir.path(), "etm.epsilon = 0.3\nsim.t_endd = 3\n");
    let out = etcsim(&["simulate", "--config", &cfg, "--outdir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn simulate_writes_csv_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "system.preset = heat_cascade\nsystem.n = 6\netm.variant = sample_relative_capped\netm.epsilon = 0.3\netm.tau_max = 1\nsim.t_end = 4\n",
    );
    let out_dir = dir.path().join("out");
    let out = etcsim(&["simulate", "--config", &cfg, "--outdir", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let traj = fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,norm_x,u_1,event_flag\n"));
    let events = fs::read_to_string(out_dir.join("events.csv")).unwrap();
    assert!(events.starts_with("k,t_k,inter_event,reason,norm_x_tk\n"));
    let m: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("metrics.json")).unwrap()).unwrap();
    assert!(m["T_s"].as_f64().unwrap() > 0.0);
    let echoed = fs::read_to_string(out_dir.join("run.cfg")).unwrap();
    assert!(etcsim_cli::parse_config(&echoed).is_ok());
}

#[test]
fn certify_strict_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_cfg(
        dir.path(),
        "system.preset = heat_cascade\nsystem.n = 6\netm.variant = sample_relative_capped\netm.epsilon = 0.3\netm.tau_max = 1\n",
    );
    let report = dir.path().join("r.json");
    let out = etcsim(&["certify", "--config", &ok, "--out", report.to_str().unwrap(), "--strict"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"bounded_threshold") && names.contains(&"cascade_poles"));
    for r in v.as_array().unwrap() {
        for key in ["name", "verdict", "inputs", "outputs", "notes"] {
            assert!(r.get(key).is_some(), "{key} missing");
        }
    }

    let too_large = write_cfg(
        dir.path(),
        "system.preset = heat_cascade\nsystem.n = 6\netm.variant = sample_relative_capped\netm.epsilon = 0.5\netm.tau_max = 1\ncert.m = 1.571\n",
    );
    let out = etcsim(&["certify", "--config", &too_large, "--out", report.to_str().unwrap()]);
    assert!(out.status.success());
    let out = etcsim(&["certify", "--config", &too_large, "--out", report.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_scenario_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = etcsim(&["reproduce", "fig9", "--outdir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn reproduce_is_byte_identical() {
    for name in ["fig2", "fig3", "zeno_shift", "zeno_heat"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert!(etcsim(&["reproduce", name, "--outdir", a.path().to_str().unwrap()]).status.success());
        let out = Command::new(env!("CARGO_BIN_EXE_etcsim"))
            .args(["reproduce", name, "--outdir", b.path().to_str().unwrap()])
            .env("ETCSIM_THREADS", "1")
            .output()
            .unwrap();
        assert!(out.status.success());
        let (fa, fb) = (dir_bytes(a.path()), dir_bytes(b.path()));
        assert!(!fa.is_empty());
        assert_eq!(fa, fb, "{name}");
    }
}

#[test]
fn fig3_metrics() {
    let dir = tempfile::tempdir().unwrap();
    assert!(etcsim(&["reproduce", "fig3", "--outdir", dir.path().to_str().unwrap()]).status.success());
    let m: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("fig3_metrics.json")).unwrap()).unwrap();
    assert!((m["T_s_event"].as_f64().unwrap() - 1.882).abs() <= 0.02);
    assert!((m["T_s_periodic"].as_f64().unwrap() - 1.912).abs() <= 0.02);
    assert_eq!(m["updates_event"], 10);
    assert_eq!(m["updates_periodic"], 12);
    for f in ["fig3_event_trajectory.csv", "fig3_event_events.csv", "fig3_periodic_trajectory.csv", "fig3_periodic_events.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn zeno_heat_first_row() {
    let dir = tempfile::tempdir().unwrap();
    assert!(etcsim(&["reproduce", "zeno_heat", "--outdir", dir.path().to_str().unwrap()]).status.success());
    let csv = fs::read_to_string(dir.path().join("zeno_heat.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    let want = 1.3f64.ln() / (std::f64::consts::PI).powi(2);
    assert_eq!(row[0], 1.0);
    assert!((row[1] - want).abs() < 1e-14);
    assert!((row[2] - want).abs() / want < 1e-4);
}

#[test]
fn zeno_shift_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert!(etcsim(&["reproduce", "zeno_shift", "--outdir", dir.path().to_str().unwrap()]).status.success());
    for f in ["zeno_shift_sample_relative.csv", "zeno_shift_current_relative.csv"] {
        let csv = fs::read_to_string(dir.path().join(f)).unwrap();
        assert_eq!(csv.lines().count(), 52);
        for line in csv.lines().skip(1) {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert!((v[1] - v[2]).abs() < 1e-11);
        }
    }
}
