use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperwave"))
        .args(args)
        .env_remove("HYPERWAVE_TOLERANCE_SCALE")
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn json(p: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn classify_reference() {
    let out = hyperwave(&["classify", "--mu", "-1", "--k", "1", "--c", "1", "--b", "-3"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["case"], "CaseI");
    assert!((v["kappa"].as_f64().unwrap() - 1.3229).abs() < 1e-4);
}

#[test]
fn usage_and_regime_errors() {
    assert_eq!(hyperwave(&["classify", "--frobnicate"]).status.code(), Some(64));
    assert_eq!(hyperwave(&["nothing"]).status.code(), Some(64));
    let case3 = hyperwave(&["solve", "--mu", "1", "--c", "-3", "--a-max", "2"]);
    assert_eq!(case3.status.code(), Some(2));
    let blowup = hyperwave(&["solve", "--target", "h2", "--mu", "1", "--a-max", "100"]);
    assert_eq!(blowup.status.code(), Some(3));
}

#[test]
fn solve_validate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "cfg.json");
    fs::write(&cfg, r#"{"target": "s2", "mu": -1.0, "k": 1, "c": 1, "b": -3, "q0": 0.1, "a_max": 50}"#).unwrap();
    let (traj, sum) = (path(dir.path(), "traj.csv"), path(dir.path(), "sum.json"));
    let out = hyperwave(&["solve", "--config", &cfg, "--out", &traj, "--summary", &sum]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&traj).unwrap();
    assert_eq!(text.lines().next(), Some("a,s,s_a,sigma,energy"));
    let s = json(&sum);
    assert_eq!(s["config"]["a_max"], 50.0);
    assert_eq!(s["config"]["mode"], "solve");

    let ok = hyperwave(&["validate", "--config", &sum, "--in", &traj]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut cols: Vec<String> = lines[200].split(',').map(String::from).collect();
    let sigma: f64 = cols[3].parse().unwrap();
    cols[3] = format!("{:.16e}", sigma * 1.01);
    lines[200] = cols.join(",");
    let bad = path(dir.path(), "bad.csv");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();
    let fail = hyperwave(&["validate", "--config", &sum, "--in", &bad]);
    assert_eq!(fail.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&fail.stderr).contains("sigma_identity"));
}

#[test]
fn key_value_config_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    fs::write(&cfg, "# reference run\nmu = -1\nq0 = 0.1\na_max = 20\n").unwrap();
    let sum = path(dir.path(), "sum.json");
    let out = hyperwave(&["solve", "--config", &cfg, "--a-max", "30", "--out", &path(dir.path(), "t.csv"), "--summary", &sum]);
    assert_eq!(out.status.code(), Some(0));
    let s = json(&sum);
    assert_eq!(s["config"]["a_max"], 30.0);
    assert_eq!(s["a_end"], 30.0);
    fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(hyperwave(&["solve", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn tolerance_scale_is_applied_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let sum = path(dir.path(), "sum.json");
    let out = Command::new(env!("CARGO_BIN_EXE_hyperwave"))
        .args(["solve", "--a-max", "10", "--out", &path(dir.path(), "t.csv"), "--summary", &sum])
        .env("HYPERWAVE_TOLERANCE_SCALE", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = json(&sum);
    assert!((s["config"]["rtol"].as_f64().unwrap() - 1e-8).abs() < 1e-20);
}

#[test]
fn parallel_sweep_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, tag: &str| {
        let out = hyperwave(&[
            "solve",
            "--a-max",
            "60",
            "--sweep",
            "mu=-1,-0.5,-0.25,-2",
            "--jobs",
            jobs,
            "--out",
            &path(dir.path(), &format!("{tag}.csv")),
            "--summary",
            &path(dir.path(), &format!("{tag}.json")),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run("1", "seq");
    run("4", "par");
    for i in 0..4 {
        let a = fs::read(path(dir.path(), &format!("seq_{i}.csv"))).unwrap();
        let b = fs::read(path(dir.path(), &format!("par_{i}.csv"))).unwrap();
        assert_eq!(a, b);
    }
    let seq = json(&path(dir.path(), "seq.json"));
    assert_eq!(seq.as_array().unwrap().len(), 4);
    assert_eq!(seq[1]["config"]["mu"], -0.5);
}

#[test]
fn selfsim_and_asym_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, sum) = (path(dir.path(), "ss.csv"), path(dir.path(), "ss.json"));
    let out = hyperwave(&["selfsim", "--mu", "3", "--c", "-1", "--out", &csv, "--summary", &sum]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(&csv).unwrap().starts_with("r,s,s_r,sigma,H_residual\n"));
    let s = json(&sum);
    for key in ["s_star", "rate", "s_one", "interior_condition"] {
        assert!(s.get(key).is_some(), "{key}");
    }
    assert_eq!(s["interior_condition"], true);

    let fit = hyperwave(&["asym", "--a-max", "1000"]);
    assert_eq!(fit.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&fit.stdout).unwrap();
    assert_eq!(v["scenario"], "DecayToCenter");
    for key in ["E_inf", "theta0", "freq", "log_drift", "rate_exponent", "window"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn field_output_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, rep) = (path(dir.path(), "f.csv"), path(dir.path(), "r.json"));
    let out = hyperwave(&["field", "--nx", "21", "--ny", "21", "--xmin", "-2", "--xmax", "2", "--ymin", "-2", "--ymax", "2", "--out", &csv, "--report", &rep]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("t,x,y,u0,u1,u2,phi,cone"));
    assert!(text.lines().any(|l| l.ends_with(",LOG_SINGULAR,cross")));
    let r = json(&rep);
    let mut keys: Vec<&str> = r.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort();
    let mut want = vec![
        "phi1_plus", "phi1_minus", "phi2_plus", "phi2_minus", "jump_phi1", "jump_phi2", "c1", "c2", "c3", "c4",
        "u_xi_decay_exponent", "verdicts",
    ];
    want.sort();
    assert_eq!(keys, want);
    assert_eq!(r["verdicts"]["overall"], "Pass");
}
