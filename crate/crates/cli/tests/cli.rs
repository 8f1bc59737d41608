use std::path::Path;
use std::process::{Command, Output};

use momsos::relax::import_sdpa;
use momsos_cli::Report;

fn momsos(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_momsos"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    Report::parse(&String::from_utf8_lossy(&out.stdout)).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn relax_motzkin_nominal_dual() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.dat-s");
    let r = report(&momsos(
        &["relax", "motzkin", "--order", "8", "--formulation", "nominal-dual", "--out", path_str(&file)],
        &[],
    ));
    assert_eq!(r.stage("relax").unwrap()["constraints"], 153);
    let sdp = import_sdpa(&file).unwrap();
    assert_eq!(sdp.num_constraints(), 153);
    assert_eq!(sdp.block_sizes().iter().filter(|&&s| s == 45).count(), 1);
}

#[test]
fn relax_priority_psd_adds_diagonal_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let plain = dir.path().join("a.dat-s");
    let noisy = dir.path().join("b.dat-s");
    report(&momsos(&["relax", "motzkin", "--formulation", "nominal-primal", "--out", path_str(&plain)], &[]));
    report(&momsos(
        &["relax", "motzkin", "--formulation", "priority-psd", "--eps", "1e-8", "--out", path_str(&noisy)],
        &[],
    ));
    let (a, b) = (import_sdpa(&plain).unwrap(), import_sdpa(&noisy).unwrap());
    assert!(a.block_sizes().iter().all(|&s| s > 0));
    assert!(b.block_sizes().iter().any(|&s| s < 0));
    assert!(b.num_constraints() > a.num_constraints());
}

#[test]
fn malformed_problem_file_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(&file, r#"{"variables": 1, "objective": ["1 2", "1 0", "x 1"]}"#).unwrap();
    let out = momsos(&["relax", path_str(&file), "--out", path_str(&dir.path().join("o"))], &[]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn solve_x_squared_gives_zero_at_origin() {
    let r = report(&momsos(&["solve", "x2"], &[]));
    let s = r.stage("solve").unwrap();
    assert_eq!(s["status"], "OPTIMAL");
    assert!(s["bound"].as_f64().unwrap().abs() < 1e-6);
    let x = r.stage("extract").unwrap()["points"][0]["x"][0].as_f64().unwrap();
    assert!(x.abs() < 1e-3);
    assert_eq!(r.stage("certify").unwrap()["result"], "PASS");
}

#[test]
fn solve_motzkin_priority_psd_finds_four_points() {
    let r = report(&momsos(
        &["solve", "motzkin", "--formulation", "priority-psd", "--eps", "1e-8", "--order", "8"],
        &[],
    ));
    assert_eq!(r.stage("solve").unwrap()["status"], "OPTIMAL");
    let pts = r.stage("extract").unwrap()["points"].as_array().unwrap().clone();
    assert_eq!(pts.len(), 4);
    for p in pts {
        for c in p["x"].as_array().unwrap() {
            assert!((c.as_f64().unwrap().abs() - 3f64.sqrt() / 3.0).abs() < 1e-3);
        }
    }
    assert_eq!(r.stages("certify").count(), 4);
}

#[test]
fn reports_are_deterministic_and_rerunnable() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.jsonl");
    let args = ["solve", "univariate", "--gamma", "1/1000", "--formulation", "priority-trace", "--eta", "1e-6", "--seed", "3"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path_str(&first)]);
    let a = report(&momsos(&with_out, &[]));
    let b = report(&momsos(&args, &[]));
    let strip = |r: &Report| {
        let mut r = r.without_timings();
        r.records[0]["out"] = serde_json::Value::Null;
        r
    };
    assert_eq!(strip(&a), strip(&b));
    let c = report(&momsos(&["solve", "ignored", "--manifest", path_str(&first)], &[]));
    assert_eq!(a.without_timings(), c.without_timings());
}

#[test]
fn environment_overrides_flags() {
    let r = report(&momsos(&["solve", "x2"], &[("MOMSOS_ORDER", "2"), ("MOMSOS_EPSILON_STAR", "1e-8")]));
    let m = r.stage("manifest").unwrap();
    assert_eq!(m["order"], 2);
    assert_eq!(m["solver"]["epsilon_star"], 1e-8);
    assert_eq!(r.stage("relax").unwrap()["problem"]["order"], 2);
}

#[test]
fn verify_psd_game_on_x_squared() {
    let r = report(&momsos(&["verify", "x2", "--game", "psd", "--eps", "1/2"], &[]));
    let g = r.stage("game").unwrap();
    assert_eq!(g["result"], "PASS");
    assert!((g["value_penalized"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn reproduce_univariate_prints_table() {
    let r = report(&momsos(&["reproduce", "univariate"], &[]));
    let points: Vec<String> = r
        .stages("table")
        .map(|t| t["point"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(points, ["0.9961", "0.9961", "99.9961", "1.0039", "1.0039", "99.9961"]);
}

#[test]
fn unknown_builtin_is_an_error() {
    let out = momsos(&["solve", "nonexistent-problem"], &[]);
    assert!(!out.status.success());
}
