use std::path::Path;
use std::process::{Command, Output};

fn dissim(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dissim"));
    cmd.args(args).env_remove("DISSIM_TOL_TABLE");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn freeze_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"hamiltonian": "pauli_z_half", "t_values": [1.0], "delta": 1e-3}"#,
    );
    let out = dir.path().join("out");
    let o = dissim(&["freeze", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("freeze.json")).unwrap()).unwrap();
    assert_eq!(v["experiment"], "freeze");
    assert!(v["report"]["max_distance"].as_f64().unwrap() <= 2e-3);
    assert!(v["report"]["control_max_distance"].as_f64().unwrap() > 0.4);
}

#[test]
fn sweep_csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"experiment": "sweep", "t_values": [1.0, 2.0, 4.0], "epsilon_values": [0.1], "grid_n": 8, "timing": false}"#,
    );
    let mut csvs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = dissim(
            &[
                "sweep",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "--threads",
                threads,
            ],
            &[],
        );
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(std::fs::read(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs.remove(0)).unwrap();
    assert!(text.starts_with("t,epsilon,delta_star,T,achieved_error,grid_slack,wall_time_ms\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn sweep_svg_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"t_values": [1.0, 2.0, 4.0], "epsilon_values": [0.1], "grid_n": 8, "method": "sandwich"}"#,
    );
    let out = dir.path().to_str().unwrap();
    let o = dissim(&["sweep", "--config", &cfg, "--out", out, "--format", "svg"], &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = std::fs::read_to_string(dir.path().join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "c.json", r#"{"t_values": [1.0], "delta": 1e-3}"#);
    let bad = write(dir.path(), "bad.json", r#"{"t_values": [-1.0]}"#);
    let missing = dir.path().join("nope.json");
    let out = dir.path().to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["freeze", "--config", missing.to_str().unwrap()],
        vec!["freeze", "--config", &bad, "--out", out],
        vec!["teleport", "--config", &good],
        vec!["freeze", "--config", &good, "--method", "guess", "--out", out],
        vec!["freeze", "--config", &good, "--format", "svg", "--out", out],
        vec!["freeze", "--config", &good, "--threads", "0", "--out", out],
        vec!["freeze"],
    ];
    for args in cases {
        let o = dissim(&args, &[]);
        assert_eq!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"t_values": [1.0], "delta": 1e-3}"#);
    let blocker = write(dir.path(), "file", "x");
    let o = dissim(
        &["freeze", "--config", &cfg, "--out", &format!("{blocker}/sub")],
        &[],
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("file"));
}

#[test]
fn tolerance_table_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"t_values": [1.0], "delta": 1e-3}"#);
    let out = dir.path().to_str().unwrap();
    // A negative partial-trace tolerance cannot be met, so the CPTP check fails.
    let strict = dir.path().join("tol.json");
    std::fs::write(&strict, r#"{"partial_trace": -1.0}"#).unwrap();
    let o = dissim(
        &["freeze", "--config", &cfg, "--out", out],
        &[("DISSIM_TOL_TABLE", &strict)],
    );
    assert_eq!(code(&o), 2);
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"no_such_key": 1}"#).unwrap();
    let o = dissim(
        &["freeze", "--config", &cfg, "--out", out],
        &[("DISSIM_TOL_TABLE", &broken)],
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn certificate_runs_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"t_values": [4.0], "epsilon_values": [0.01], "nu": 1.0}"#,
    );
    let o = dissim(
        &[
            "certificate",
            "--config",
            &cfg,
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("certificate.json")).unwrap()).unwrap();
    assert_eq!(v["report"]["verified"], true);
    assert_eq!(v["report"]["contradicted"], false);
}

#[test]
fn remaining_experiments_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cases = [
        ("gauge", r#"{"delta": 0.1}"#),
        ("rigidity", r#"{"hamiltonian": "tfim_2"}"#),
        ("diamond", r#"{}"#),
        (
            "convert",
            r#"{"t_values": [2.0], "epsilon_values": [0.05], "grid_n": 8, "jumps": [[[[0,0],[0.5477225575051661,0]],[[0,0],[0,0]]]]}"#,
        ),
    ];
    for (exp, text) in cases {
        let cfg = write(dir.path(), &format!("{exp}.cfg.json"), text);
        let o = dissim(&[exp, "--config", &cfg, "--out", out], &[]);
        assert_eq!(code(&o), 0, "{exp}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(dir.path().join(format!("{exp}.json")).exists());
    }
}
