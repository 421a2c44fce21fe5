use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relstandby_core::config::RunConfig;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn relstandby(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relstandby"))
        .args(args)
        .current_dir(configs())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn curve(rows: &str) -> Vec<(f64, f64)> {
    rows.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

const EXP1: &str = r#"{"family": "exponential", "params": {"rate": 1}}"#;

#[test]
fn validate_warns_on_improper_density_and_strict_fails() {
    let o = relstandby(&["validate", "--config", "figure2-case2.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("-1.3"), "{}", stderr(&o));
    assert!(stdout(&o).contains("false"));

    let o = relstandby(&["validate", "--config", "figure2-case2.json", "--strict"]);
    assert_eq!(o.status.code(), Some(1));

    let o = relstandby(&["validate", "--config", "simulate-exp1-fgm-weak.json", "--strict", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["is_proper_density"], true);
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let k0 = write_config(
        dir.path(),
        "k0.json",
        &format!(r#"{{"system": {{"n": 3, "k": 0, "marginal": {EXP1}, "copula": {{"family": "independence", "params": {{}}}}}}}}"#),
    );
    let o = relstandby(&["validate", "--config", &k0]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("k"), "{}", stderr(&o));

    let broken = write_config(dir.path(), "broken.json", "{\"system\": {\n  \"n\": 3,,\n}}");
    let o = relstandby(&["validate", "--config", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    assert_eq!(relstandby(&["validate", "--config", "missing.json"]).status.code(), Some(2));
    assert_eq!(relstandby(&["curve", "--config", "table1-row1.json"]).status.code(), Some(2));
    assert_eq!(relstandby(&["curve", "--config", "table1-row1.json", "--grid", "0:1"]).status.code(), Some(2));
    assert_eq!(relstandby(&["curve", "--config", "table1-row1.json", "--grid", "1:0:5"]).status.code(), Some(2));
    assert_eq!(relstandby(&["frobnicate", "--config", "table1-row1.json"]).status.code(), Some(2));
    assert_eq!(relstandby(&["curve"]).status.code(), Some(2));
}

#[test]
fn simulation_refuses_improper_density() {
    let o = relstandby(&["simulate", "--config", "figure2-case2.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("-1.3"), "{}", stderr(&o));
}

#[test]
fn simulation_with_no_draws_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        "zero.json",
        &format!(
            r#"{{"system": {{"n": 3, "k": 2, "marginal": {EXP1}, "copula": {{"family": "independence", "params": {{}}}}}},
                "simulate": {{"count": 0, "targets": [{{"kind": "mttf"}}]}}}}"#
        ),
    );
    assert_eq!(relstandby(&["simulate", "--config", &p]).status.code(), Some(2));
}

#[test]
fn simulation_is_reproducible_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        dir.path(),
        "sim.json",
        &format!(
            r#"{{"system": {{"n": 3, "k": 2, "marginal": {EXP1}, "copula": {{"family": "independence", "params": {{}}}}}},
                "simulate": {{"count": 20000, "targets": [{{"kind": "mttf"}}, {{"kind": "psi3_at", "at": [0.5]}}]}}}}"#
        ),
    );
    let a = relstandby(&["simulate", "--config", &p, "--seed", "9", "--format", "csv"]);
    let b = relstandby(&["simulate", "--config", &p, "--seed", "9", "--format", "csv"]);
    let c = relstandby(&["simulate", "--config", &p, "--seed", "10", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(stdout(&a).starts_with("quantity,x,value,standard_error,draws\n"));
}

#[test]
fn curve_csv_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_relstandby"))
            .args(["curve", "--config", "figure1-case2.json", "--grid", "0:2:9"])
            .current_dir(configs())
            .env("RELSTANDBY_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("x,value,error_bound,path\n"));
    assert_eq!(text.lines().count(), 10);
    assert_eq!(run("lots").status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.json");
    let o = relstandby(&[
        "curve",
        "--config",
        "figure2-case1.json",
        "--quantity",
        "psi1",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 16);
}

#[test]
fn standby_survival_dominates_bare_survival() {
    for case in ["figure1-case1.json", "figure1-case2.json", "figure1-case3.json"] {
        let t = relstandby(&["curve", "--config", case, "--quantity", "survival-t"]);
        let b = relstandby(&["curve", "--config", case, "--quantity", "survival-bare"]);
        assert_eq!(t.status.code(), Some(0), "{}", stderr(&t));
        let (t, b) = (curve(&stdout(&t)), curve(&stdout(&b)));
        assert_eq!(t.len(), 60);
        for ((x, st), (_, sb)) in t.iter().zip(&b) {
            assert!(st >= sb, "{case} at {x}: {st} < {sb}");
        }
    }
}

#[test]
fn independent_exponential_psi3_is_flat() {
    let o = relstandby(&["curve", "--config", "figure2-case1.json", "--quantity", "psi3"]);
    assert_eq!(o.status.code(), Some(0));
    for (x, v) in curve(&stdout(&o)) {
        assert!((v - 4.0 / 3.0).abs() < 1e-4, "psi3({x}) = {v}");
    }
}

#[test]
fn table_flags_the_inconsistent_cost_rate() {
    let o = relstandby(&["table", "--config", "table1-row1.json", "table1-row2.json", "table1-row3.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    let flagged: Vec<&str> = csv.lines().filter(|l| l.ends_with(",true")).collect();
    assert_eq!(flagged.len(), 1, "{csv}");
    assert!(flagged[0].starts_with("table1-row3,cost_rate_bare,6.97674418605,"), "{}", flagged[0]);
    assert!(stderr(&o).contains("9.302325"));
}

#[test]
fn shipped_configs_round_trip_and_build() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = RunConfig::load(&path).unwrap();
            cfg.spec().unwrap();
            assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg, "{}", path.display());
            seen += 1;
        }
    }
    assert_eq!(seen, 16);
}
