use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use quanputer::PRESETS;
use quanputer_core::qreg::QuantumRegister;
use tempfile::TempDir;

fn quanputer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quanputer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.cfg");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_is_sorted_stable_and_complete() {
    let a = quanputer(&["list"]);
    let b = quanputer(&["list"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    for (name, kind) in [
        ("harmonic-coherent", "quantum"),
        ("rotation-transport", "liouville"),
        ("catmap-costate", "dynsys"),
    ] {
        let line = text.lines().find(|l| l.starts_with(name)).unwrap();
        assert_eq!(line.split_whitespace().nth(1), Some(kind));
    }
}

#[test]
fn every_preset_runs_with_defaults() {
    let tmp = TempDir::new().unwrap();
    for p in PRESETS {
        let out = tmp.path().join(p.name);
        let o = quanputer(&["run", p.name, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}: {}", p.name, stderr(&o));
        let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
        assert!(manifest.contains(&format!("kind = {}", p.kind)));
        assert!(manifest.contains(&format!("preset = {}", p.name)));
    }
}

#[test]
fn verify_bch_defaults_report_third_order() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "# all defaults\n");
    let out = tmp.path().join("bch");
    let o = quanputer(&["verify-bch", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["group-commutator_seed0.csv", "resolvent-commutator_seed0.csv"] {
        let csv = fs::read_to_string(out.join(name)).unwrap();
        let slope: f64 = csv
            .lines()
            .find_map(|l| l.strip_prefix("# slope="))
            .and_then(|rest| rest.split_whitespace().next())
            .unwrap()
            .parse()
            .unwrap();
        assert!((slope - 3.0).abs() <= 0.2, "{name}: {slope}");
        assert!(csv.lines().any(|l| l == "# expected_slope=3.0000000000000000e0 tolerance=2.0000000000000001e-1 pass=true"));
    }
}

#[test]
fn free_particle_keeps_norm() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[state]\nname = gaussian(-1, 2, 0.8)\n[evolution]\nt_total = 2\nsteps = 40\n",
    );
    let out = tmp.path().join("free");
    let o = quanputer(&["quantum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("steps.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,time,norm,energy,x_mean,p_mean"));
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(rows.len(), 41);
    assert!(rows.iter().all(|n| (n - 1.0).abs() <= 1e-10));

    let csv_state = fs::read_to_string(out.join("final_state.csv")).unwrap();
    let reg = QuantumRegister::read_binary(fs::File::open(out.join("final_state.qreg")).unwrap()).unwrap();
    assert_eq!(csv_state.lines().count(), reg.grid().total_points() + 1);
    assert!((reg.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn missing_key_is_a_config_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[evolution]\nt_total = 1\n");
    let out = tmp.path().join("never");
    let o = quanputer(&["quantum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("evolution.steps"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unknown_key_rejected_with_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[evolution]\nt_total = 1\nsteps = 4\nstep = 5\n");
    let o = quanputer(&["quantum", "--config", &cfg, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("evolution.step`") && err.contains("line 4"), "{err}");
}

#[test]
fn overrides_kind_and_syntax_checks() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[evolution]\nt_total = 1\n");
    let out = tmp.path().join("set");
    let o = quanputer(&["quantum", "--config", &cfg, "--set", "evolution.steps=3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(out.join("manifest.txt")).unwrap().contains("evolution.steps = 3 (--set)"));

    let cfg = write_config(tmp.path(), "kind = dynsys\n[evolution]\nt_total = 1\nsteps = 2\n");
    assert_eq!(quanputer(&["quantum", "--config", &cfg]).status.code(), Some(2));

    let cfg = write_config(tmp.path(), "[evolution\n");
    let o = quanputer(&["quantum", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));

    let o = quanputer(&["run", "no-such-scenario"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_order_check_exits_4_and_keeps_report() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("order");
    let o = quanputer(&[
        "run",
        "trotter-harmonic",
        "--set",
        "sweep.expected_slope=-2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    let csv = fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert!(csv.contains("pass=false"));
}

#[test]
fn numeric_failure_exits_3_without_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[state]\nname = basis(100000)\n[evolution]\nt_total = 1\nsteps = 2\n",
    );
    let out = tmp.path().join("never");
    let o = quanputer(&["quantum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("qreg error"));
    assert!(!out.exists());

    let cfg = write_config(tmp.path(), "[map]\nname = quadratic1d\n[run]\nsteps = 3\ns0 = 0\n");
    let o = quanputer(&["dynsys", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("dynsys error"));
}

#[test]
fn same_seed_same_bytes() {
    let tmp = TempDir::new().unwrap();
    let run = |dir: &str, seed: &str| {
        let out = tmp.path().join(dir);
        let o = quanputer(&["run", "catmap-costate", "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        fs::read(out.join("trajectory.csv")).unwrap()
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn verify_kernel_eps_points() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("kernel");
    let o = quanputer(&["verify", "kernel", "--eps-points", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS kernel")).count(), 3);
    let csv = fs::read_to_string(out.join("kernel.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with('#')).count(), 3);
}
