use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use geodens::snapshot::Snapshot;
use tempfile::TempDir;

fn geodens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geodens"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(config: &Path, out: &Path) -> Output {
    geodens(&[
        "run",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

/// Column `name` of a diagnostics file.
fn column(csv_path: &Path, name: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(csv_path).unwrap();
    let idx = reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    reader
        .records()
        .map(|r| r.unwrap()[idx].parse().unwrap())
        .collect()
}

const WKB_AT_REST: &str = r#"
schema_version = 1
system = "newton_wo"
dt = 1e-3
t_end = 0.0

[grid]
shape = [64]

[initial]
profile = "wkb"
epsilon = 0.3
"#;

#[test]
fn shallow_water_conserves_the_hamiltonian() {
    let tmp = TempDir::new().unwrap();
    let out = run(&scenarios_dir().join("shallow_water.toml"), tmp.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let h = column(&tmp.path().join("diagnostics.csv"), "hamiltonian");
    let t = column(&tmp.path().join("diagnostics.csv"), "t");
    assert_eq!(*t.last().unwrap(), 0.1);
    let drift = h.iter().map(|x| (x - h[0]).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-8, "hamiltonian drift {drift:e}");
}

#[test]
fn config_errors_exit_with_code_three_and_write_nothing() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        ("garbage", "schema_version = 1\nsystem = [[[".to_string()),
        (
            "unknown_key",
            WKB_AT_REST.replace("t_end = 0.0", "t_end = 0.0\ntolerence = 1e-9"),
        ),
        (
            "empty_grid",
            WKB_AT_REST.replace("shape = [64]", "shape = []"),
        ),
        (
            "bad_grid",
            WKB_AT_REST.replace("shape = [64]", "shape = [48]"),
        ),
        ("zero_dt", WKB_AT_REST.replace("dt = 1e-3", "dt = 0.0")),
        (
            "negative_t_end",
            WKB_AT_REST.replace("t_end = 0.0", "t_end = -1.0"),
        ),
        (
            "schema",
            WKB_AT_REST.replace("schema_version = 1", "schema_version = 2"),
        ),
        ("profile", WKB_AT_REST.replace("\"wkb\"", "\"gaussian\"")),
        ("system", WKB_AT_REST.replace("newton_wo", "navier_stokes")),
        (
            "diagnostic",
            WKB_AT_REST.replace("t_end = 0.0", "t_end = 0.0\ndiagnostics = [\"helicity\"]"),
        ),
        (
            "velocity_profile",
            WKB_AT_REST
                .replace("shape = [64]", "shape = [16, 16, 16]")
                .replace(
                    "profile = \"wkb\"\nepsilon = 0.3",
                    "profile = \"abc\"\na = 1.0\nb = 1.0\nc = 1.0",
                ),
        ),
        (
            "missing_hbar",
            WKB_AT_REST.replace("newton_wo", "schrodinger"),
        ),
    ];
    for (name, text) in cases {
        let config = write_config(tmp.path(), &format!("{name}.toml"), &text);
        let out_dir = tmp.path().join(format!("out_{name}"));
        let out = run(&config, &out_dir);
        assert_eq!(
            out.status.code(),
            Some(3),
            "case {name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(stderr.trim().lines().count(), 1, "case {name}: {stderr}");
        assert!(!out_dir.exists(), "case {name} created output");
    }
}

#[test]
fn missing_config_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let out = run(&tmp.path().join("absent.toml"), &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn usage_errors_exit_with_code_two() {
    assert_eq!(geodens(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        geodens(&["test-invariants", "everything"]).status.code(),
        Some(2)
    );
}

#[test]
fn loss_of_positivity_has_its_own_exit_code() {
    let tmp = TempDir::new().unwrap();
    let text = WKB_AT_REST.replace("epsilon = 0.3", "epsilon = 1.0");
    let out = run(
        &write_config(tmp.path(), "c.toml", &text),
        &tmp.path().join("out"),
    );
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn running_past_the_shock_reports_spectral_blowup() {
    let tmp = TempDir::new().unwrap();
    let text = r#"
schema_version = 1
system = "eulerian"
dt = 1e-2
t_end = 3.0

[grid]
shape = [64]

[initial]
profile = "cosine-bump"
epsilon = 1.0
"#;
    let out_dir = tmp.path().join("out");
    let out = run(&write_config(tmp.path(), "c.toml", text), &out_dir);
    assert_eq!(
        out.status.code(),
        Some(5),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = column(&out_dir.join("diagnostics.csv"), "t");
    assert!(t.len() > 1 && *t.last().unwrap() < 3.0);
}

#[test]
fn final_step_lands_on_t_end() {
    let tmp = TempDir::new().unwrap();
    let text = WKB_AT_REST.replace(
        "t_end = 0.0",
        "t_end = 0.0105\ndiagnostics_every = 4\nsnapshot_every = 5",
    );
    let out_dir = tmp.path().join("out");
    let out = run(&write_config(tmp.path(), "c.toml", &text), &out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = column(&out_dir.join("diagnostics.csv"), "t");
    assert_eq!(t.len(), 4);
    assert!((t[2] - 0.008).abs() < 1e-15);
    assert_eq!(*t.last().unwrap(), 0.0105);
    let snaps: Vec<_> = [0, 5, 10, 11]
        .iter()
        .map(|k| out_dir.join(format!("snap_{k:06}.toml")))
        .collect();
    assert!(snaps.iter().all(|p| p.exists()));
    let last = Snapshot::read(&snaps[3]).unwrap();
    assert_eq!(last.time(), Some(0.0105));
}

#[test]
fn transform_round_trip() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&write_config(tmp.path(), "c.toml", WKB_AT_REST), &out_dir);
    assert!(out.status.success());
    let start = out_dir.join("snap_000000.toml");
    let psi = tmp.path().join("psi.toml");
    let back = tmp.path().join("back.toml");
    for (from, to, repr) in [(&start, &psi, "psi"), (&psi, &back, "rho-theta")] {
        let out = geodens(&[
            "transform",
            from.to_str().unwrap(),
            to.to_str().unwrap(),
            "--to",
            repr,
            "--hbar",
            "0.7",
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = Snapshot::read(&start).unwrap();
    let p = Snapshot::read(&psi).unwrap();
    let b = Snapshot::read(&back).unwrap();
    assert!(p.get("rho").is_none() && p.complex("psi").is_ok());
    let rho_err = a
        .scalar("rho")
        .unwrap()
        .linf_distance(b.scalar("rho").unwrap());
    let theta_err = a
        .scalar("theta")
        .unwrap()
        .linf_distance(b.scalar("theta").unwrap());
    assert!(
        rho_err < 1e-10 && theta_err < 1e-10,
        "{rho_err:e} {theta_err:e}"
    );
}

#[test]
fn transform_needs_the_source_fields() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("out");
    run(&write_config(tmp.path(), "c.toml", WKB_AT_REST), &out_dir);
    let start = out_dir.join("snap_000000.toml");
    let out = geodens(&[
        "transform",
        start.to_str().unwrap(),
        tmp.path().join("x.toml").to_str().unwrap(),
        "--to",
        "rho-theta",
        "--hbar",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn diagnose_reports_abc_helicity() {
    let tmp = TempDir::new().unwrap();
    let text = fs::read_to_string(scenarios_dir().join("abc_flow.toml"))
        .unwrap()
        .replace("t_end = 0.1", "t_end = 0.0")
        .replace("shape = [32, 32, 32]", "shape = [16, 16, 16]");
    let out_dir = tmp.path().join("out");
    let out = run(&write_config(tmp.path(), "abc.toml", &text), &out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let snap = out_dir.join("snap_000000.toml");
    let out = geodens(&["diagnose", snap.to_str().unwrap()]);
    assert!(out.status.success());
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(
        reader.headers().unwrap(),
        vec!["snapshot", "time", "quantity", "value"]
    );
    let helicity: f64 = reader
        .records()
        .map(|r| r.unwrap())
        .find(|r| &r[2] == "helicity")
        .expect("helicity row")[3]
        .parse()
        .unwrap();
    assert!((helicity - 3.0).abs() < 1e-10, "{helicity}");
}

#[test]
fn madelung_suite_passes() {
    let out = geodens(&[
        "test-invariants",
        "madelung",
        "--seed",
        "7",
        "--trials",
        "20",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() >= 4);
    assert!(rows.iter().all(|r| &r[5] == "pass"));
    assert!(rows.iter().any(|r| &r[1] == "symplectomorphism"));
}

#[test]
fn limits_suite_finds_second_order() {
    let out = geodens(&["test-invariants", "limits"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn runs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let config = scenarios_dir().join("smoke.toml");
    let read = |name: &str| {
        let out_dir = tmp.path().join(name);
        let out = run(&config, &out_dir);
        assert!(out.status.success());
        fs::read(out_dir.join("diagnostics.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn every_shipped_scenario_runs_within_a_minute() {
    let tmp = TempDir::new().unwrap();
    let mut configs: Vec<_> = fs::read_dir(scenarios_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    configs.sort();
    assert!(configs.len() >= 10);
    for config in configs {
        let name = config.file_stem().unwrap().to_str().unwrap().to_string();
        let start = Instant::now();
        let out = run(&config, &tmp.path().join(&name));
        let elapsed = start.elapsed();
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(elapsed < Duration::from_secs(60), "{name} took {elapsed:?}");
        let header = fs::read_to_string(tmp.path().join(&name).join("diagnostics.csv")).unwrap();
        assert!(header.starts_with("t,"), "{name}");
    }
}
