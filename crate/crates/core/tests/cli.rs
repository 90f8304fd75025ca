use std::path::Path;
use std::process::{Command, Output};

fn nph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "id,time,status,arm\n1,1,1,treatment\n2,2,0,control\n";

#[test]
fn wlrt_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "d.csv", SMALL);
    let o = nph(&[
        "wlrt", "--input", &input, "--rho", "0", "--gamma", "0", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["z"], 1.0);
    assert_eq!(v["numerator"], 0.5);
    let text = stdout(&o);
    let pos: Vec<usize> = ["rho", "gamma", "numerator", "variance", "z", "p_two_sided"]
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "keys out of order: {text}");
    let back: serde_json::Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(back, v);
}

#[test]
fn usage_errors_exit_two() {
    let o = nph(&["wlrt", "--input", "d.csv", "--rho", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho must be ≥ 0"));

    let o = nph(&["dgm", "--scenario", "delayed", "--gamma", "1", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--s2-tau"));

    let o = nph(&[
        "dgm",
        "--scenario",
        "diminishing",
        "--e-delta",
        "2",
        "--rho",
        "1",
        "--gamma",
        "1",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--gamma does not apply"));
}

#[test]
fn domain_errors_exit_one_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "d.csv",
        "id,time,status,arm\n1,2,1,treatment\n2,1,0,control\n",
    );
    let o = nph(&["wlrt", "--input", &input]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("nph: wlrt::weighted_logrank:"), "{err}");

    let bad = write(dir.path(), "bad.csv", "id,time,status,arm\n1,x,1,treatment\n");
    let o = nph(&["km", "--input", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("row 1"));
}

#[test]
fn simulated_data_feeds_the_analysis_commands() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("sim.csv");
    let data = data.to_str().unwrap();
    let o = nph(&[
        "dgm",
        "--scenario",
        "diminishing",
        "--e-delta",
        "4",
        "--rho",
        "1",
        "--n",
        "80",
        "--seed",
        "3",
        "--out",
        data,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = nph(&[
        "whr",
        "--input",
        data,
        "--rho",
        "1",
        "--format",
        "json",
        "--profile-grid",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let beta = v["beta_hat"].as_f64().unwrap();
    assert!(beta > 0.0);
    let profile = v["profile"].as_array().unwrap();
    assert_eq!(profile.len(), 5);
    assert_eq!(profile[0]["a"], 1.0);

    let o = nph(&["km", "--input", data, "--arm", "control", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scope"], "control");

    let again = nph(&[
        "dgm",
        "--scenario",
        "diminishing",
        "--e-delta",
        "4",
        "--rho",
        "1",
        "--n",
        "80",
        "--seed",
        "3",
    ]);
    assert_eq!(stdout(&again), std::fs::read_to_string(data).unwrap());
}

#[test]
fn emit_truth_grid() {
    let o = nph(&[
        "dgm",
        "--scenario",
        "delayed",
        "--gamma",
        "1",
        "--s2-tau",
        "0.25",
        "--emit-truth",
        "--truth-points",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,s1,s2,hr_true");
    assert_eq!(lines.len(), 6);
    let last: Vec<f64> = lines[5].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 2.0);
    assert!((last[2] - 0.25).abs() < 1e-9);
    assert!((last[3] - 1.73).abs() < 0.01);
}

#[test]
fn simulate_seed_rules_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "dim.json",
        r#"{"family":"diminishing","rho":1,"e_delta":1.4,"horizon":3,"n_per_arm":50,"n_reps":20,"seed":5}"#,
    );
    let o = nph(&["simulate", "--config", &cfg, "--seed", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("conflicts"));

    let out = dir.path().join("out");
    let o = nph(&[
        "simulate",
        "--config",
        &cfg,
        "--seed",
        "5",
        "--workers",
        "2",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scenario"], "dim");
    assert_eq!(v["n_reps"], 20);
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("scenario,mean_beta,exp_mean_beta,mc_se,failures\ndim,"));
    assert!(out.join("profile_dim.csv").exists());
    assert!(out.join("profile_dim.svg").exists());
}

#[test]
fn verify_taylor_delayed_passes() {
    let o = nph(&["verify-taylor", "--family", "delayed"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 3);
}
