use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

fn floqlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floqlat"))
        .args(args)
        .env_remove("FLOQLAT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

fn summary_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == key).then(|| v.trim().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("no `{key}` in summary:\n{text}"))
}

#[test]
fn fourier_table() {
    let o = floqlat(&["fourier", "--lambda", "0.5", "--phi", "0", "--nmax", "8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "n,xi,phi_rad");
    let r = rows(&out);
    assert_eq!(r.len(), 9);
    assert_eq!(r[1][0], 1.0);
    assert!((r[1][1] - 0.6188).abs() < 1e-4);
    assert!((r[1][2] - PI).abs() < 1e-9);
}

#[test]
fn circulator_preset_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let o = floqlat(&["circulator", "--figure5", "--delta-steps", "21", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let summary = stdout(&o);
    assert!((summary_value(&summary, "J12_MHz") - 0.1025).abs() < 1e-6);
    assert!((summary_value(&summary, "kappa_half_MHz") - 0.1).abs() < 1e-9);
    assert!((summary_value(&summary, "phi_c_rad") - PI / 6.0).abs() < 1e-5);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "delta_d_MHz,T1,T2,T3");
    let r = rows(&csv);
    assert_eq!(r.len(), 21);
    assert!(r[10][2] > 0.95);
}

#[test]
fn ab_destructive_row() {
    let o = floqlat(&["ab", "--flux-steps", "101", "--kappa-p", "0.02"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 101);
    assert!((r[50][0] - PI).abs() < 1e-10);
    assert!(r[50][1] < 1e-10);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = floqlat(&["ab", "--figure7", "--output", "json", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["columns"].as_array().unwrap().len(), 3);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ladder.json",
        r#"{"command": "ladder", "parameters": {"n_rungs": 6, "t_prime": 1.0, "j_rung": 0.5, "phi": 0.4}}"#,
    );
    let o = floqlat(&["--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&stdout(&o)).len(), 6);
    let o = floqlat(&["ladder", "--config", &cfg, "--n-rungs", "9", "--spectrum", "direct"]);
    assert!(o.status.success());
    assert_eq!(rows(&stdout(&o)).len(), 18);
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"command": "ab", "parameters": {"j": 0.1, "speed": 3}}"#);
    let o = floqlat(&["--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("speed"));

    let o = floqlat(&["fourier", "--lambda", "1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lambda"));

    let o = floqlat(&["rabi", "--g12", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = write(dir.path(), "clash.json", r#"{"command": "ab"}"#);
    assert_eq!(floqlat(&["ladder", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn singular_network_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let lattice = write(
        dir.path(),
        "dark.json",
        r#"{"n_sites": 2, "hoppings": [], "onsite_MHz": [0.0, 0.0], "kappa_MHz": [0.2, 0.0]}"#,
    );
    let o = floqlat(&["circulator", "--lattice", &lattice, "--delta-steps", "3"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn thread_cap_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_floqlat"))
            .args(["ab", "--flux-steps", "11"])
            .env("FLOQLAT_THREADS", v)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn help_lists_presets() {
    let text = stdout(&floqlat(&["--help"]));
    for p in ["--figure2", "--figure3", "--figure5", "--figure7"] {
        assert!(text.contains(p), "{p}");
    }
}
