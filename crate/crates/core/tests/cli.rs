use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_electroconv"));
    c.env("RUST_LOG", "error");
    c
}

fn code(cmd: &mut Command) -> i32 {
    cmd.output().unwrap().status.code().unwrap()
}

#[test]
fn run_writes_outputs_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        r#"{"grid": {"n": 32, "half_period": 10.0}, "integrator": {"t_end": 0.5}}"#,
    )
    .unwrap();
    assert_eq!(code(bin().arg("run").arg(&cfg).arg("--out").arg(&out)), 0);
    for f in ["series.csv", "summary.json", "checkpoint.bin"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let first = std::fs::read(out.join("series.csv")).unwrap();
    assert_eq!(
        code(bin().arg("run").arg(&cfg).arg("--out").arg(&out).arg("--resume")),
        0
    );
    assert_eq!(std::fs::read(out.join("series.csv")).unwrap(), first);
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"grid": {"n": 32, "half_period": 10.0}, "init": {"preset": "random"}, "seed": 5, "integrator": {"t_end": 1.0}}"#,
    )
    .unwrap();
    let read = |sub: &str| {
        let out = dir.path().join(sub);
        assert_eq!(code(bin().arg("run").arg(&cfg).arg("--out").arg(&out)), 0);
        std::fs::read(out.join("series.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn missing_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(bin().arg("accept").arg(dir.path())), 2);
    assert_eq!(code(bin().arg("run").arg(dir.path().join("nope.json"))), 2);
    let csv = dir.path().join("absent.csv");
    assert_eq!(
        code(
            bin()
                .args(["fit"])
                .arg(&csv)
                .args(["--column", "l2q2", "--window", "1,2"])
        ),
        2
    );
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"grid": {"n": 15}}"#).unwrap();
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.n"));
}

#[test]
fn unknown_scenario_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["scenario", "S7"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("S4_linear_oracle"));
}

#[test]
fn fit_reports_the_slope() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let mut text = String::from(electroconv::io::SERIES_HEADER);
    for i in 0..40 {
        let t = 1.0 + i as f64 * 0.5;
        text.push_str(&format!("\n{t}"));
        text.push_str(&format!(",{}", (1.0 + t).powf(-1.5)));
        text.push_str(&",1".repeat(15));
    }
    text.push('\n');
    std::fs::write(&csv, text).unwrap();
    let out = bin()
        .arg("fit")
        .arg(&csv)
        .args(["--column", "l2q2", "--window", "1,20"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let fit: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((fit["slope"].as_f64().unwrap() + 1.5).abs() < 1e-12);
}

#[test]
fn check_suite_passes() {
    let out = bin()
        .args(["check", "identities", "--seed", "3", "--n", "32"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(code(bin().args(["check", "bogus", "--seed", "1"])), 1);
}

#[test]
fn scenario_writes_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s4");
    assert_eq!(code(bin().args(["scenario", "S4_linear_oracle", "--out"]).arg(&out)), 0);
    assert!(Path::new(&out.join("config.json")).exists());
    assert!(out.join("series.csv").exists());
}
