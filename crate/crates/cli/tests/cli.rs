use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_relhyp"));
    c.env_remove("RELHYP_CAP_OVERRIDE");
    c
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn report(out: &Path, name: &str) -> Value {
    let text = std::fs::read_to_string(out.join(format!("{name}.json"))).expect("report written");
    serde_json::from_str(&text).expect("report is JSON")
}

#[test]
fn ball_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["ball", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path(), "ball");
    assert_eq!(r["status"], "pass");
    assert_eq!(r["result"]["spheres"], serde_json::json!([1, 6, 26]));
    assert_eq!(r["config_hash"].as_str().unwrap().len(), 64);
    assert!(dir.path().join("ball.txt").exists());
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--ledger-radius", "2", "--max-syllables", "3", "combine", "--q", "Q"];
    assert_eq!(run(a.path(), &args).status.code(), Some(0));
    assert_eq!(run(b.path(), &["--threads", "1"].iter().chain(&args).copied().collect::<Vec<_>>()).status.code(), Some(0));
    let ja = std::fs::read(a.path().join("combine.json")).unwrap();
    let jb = std::fs::read(b.path().join("combine.json")).unwrap();
    let (va, vb): (Value, Value) = (serde_json::from_slice(&ja).unwrap(), serde_json::from_slice(&jb).unwrap());
    assert_eq!(va["result"], vb["result"]);
    assert_eq!(va["ledger"], vb["ledger"]);
    let c = tempfile::tempdir().unwrap();
    run(c.path(), &args);
    assert_eq!(ja, std::fs::read(c.path().join("combine.json")).unwrap());
    assert_eq!(
        std::fs::read(a.path().join("combine.csv")).unwrap(),
        std::fs::read(c.path().join("combine.csv")).unwrap()
    );
}

#[test]
fn config_hash_tracks_the_configuration() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(a.path(), &["ball", "--radius", "2"]);
    run(b.path(), &["ball", "--radius", "3"]);
    assert_ne!(report(a.path(), "ball")["config_hash"], report(b.path(), "ball")["config_hash"]);
}

#[test]
fn full_rank_double_exits_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--ledger-radius", "2", "double", "--q", "P", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let r = report(dir.path(), "double");
    assert_eq!(r["status"], "counterexample");
    assert!(r["result"]["error"].as_str().unwrap().contains("rank"));
}

#[test]
fn non_injective_combination_exits_with_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let group = dir.path().join("g.json");
    std::fs::write(
        &group,
        r#"{"abelian_factors": [["a","b"]], "free_generators": ["t"],
            "subgroups": {"Q": {"generators": ["a", "t"]}, "R": {"generators": ["a b"]}}}"#,
    )
    .unwrap();
    let g = group.to_str().unwrap();
    let o = run(
        dir.path(),
        &["--group", g, "--ledger-radius", "2", "--max-syllables", "3", "combine", "--q", "Q", "--r", "R", "--skip-sigma"],
    );
    assert_eq!(o.status.code(), Some(1));
    let r = report(dir.path(), "combine");
    assert_eq!(r["status"], "counterexample");
    assert_eq!(r["result"]["pass"], false);
}

#[test]
fn cap_exceeded_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--cap", "2", "ball", "--radius", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(dir.path(), "ball")["status"], "cap-exceeded");
    let o = bin()
        .env("RELHYP_CAP_OVERRIDE", "ball_radius=1")
        .arg("--out")
        .arg(dir.path())
        .args(["ball", "--radius", "2"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["sigma", "--subgroup", "NOPE"]).status.code(), Some(2));
    assert_eq!(report(dir.path(), "sigma")["status"], "config-error");
    assert_eq!(run(dir.path(), &["--mode", "theorem-3", "ball"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["geodesics", "--word", "z^2"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["no-such-command"]).status.code(), Some(2));
    let o = run(dir.path(), &["--group", "/nonexistent/g.json", "ball"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .env("RELHYP_CAP_OVERRIDE", "bogus")
        .arg("--out")
        .arg(dir.path())
        .arg("ball")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn geodesics_and_components() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["geodesics", "--word", "a^3 t b"]).status.code(), Some(0));
    let r = report(dir.path(), "geodesics");
    assert_eq!(r["result"]["rel_distance"], 3);
    assert_eq!(run(dir.path(), &["components", "--path", "t H1(1,0) t^-1 H1(0,1)"]).status.code(), Some(0));
    let r = report(dir.path(), "components");
    assert_eq!(r["result"]["components"].as_array().unwrap().len(), 2);
}

#[test]
fn parabolics_of_sample_group() {
    let dir = tempfile::tempdir().unwrap();
    let g = data("two-cusps.json");
    let o = run(dir.path(), &["--group", g.to_str().unwrap(), "parabolics", "--subgroup", "AC"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path(), "parabolics");
    assert_eq!(r["result"]["classes"]["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn construction_commands_pass_on_desk() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["--ledger-radius", "2", "--max-syllables", "3"];
    let cases: [&[&str]; 4] = [
        &["double", "--q", "Q", "--k", "2"],
        &["fully-qc", "--q", "AT"],
        &["axis", "--q", "Q", "--word", "L:t | R:a^C"],
        &["--mode", "theorem-2", "combine", "--q", "Q", "--r", "Q"],
    ];
    for args in cases {
        let all: Vec<&str> = base.iter().chain(args).copied().collect();
        let o = run(dir.path(), &all);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let r = report(dir.path(), "fully-qc");
    assert_eq!(r["result"]["steps"].as_array().unwrap().len(), 1);
    assert!(r["ledger"]["eta"].as_u64().unwrap() > 0);
}

#[test]
fn constants_reports_ledger_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--ledger-radius", "2", "constants"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(dir.path(), "constants");
    assert_eq!(r["result"]["checks"]["tau_is_5D"], true);
    assert_eq!(r["ledger"]["lambda_0"], 3);
    let csv = std::fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    assert!(csv.starts_with("constant,value,radius,stable"));
    assert!(csv.contains("eta,"));
}
