use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_zeta-gaps"));
    c.env_remove("ZETA_GAPS_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const SCENARIO: &str = r#"{
  "qstar": {"a": 1, "b": 0, "c": 1},
  "delta0": 1, "h": 16, "k": 33, "t": 10000.0,
  "T": 10000.0, "K": 194.0, "N": 64.0, "Nprime": 128.0, "Delta": 4
}"#;

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn eval_direct_and_theta_agree() {
    let o = run(&["eval", "--form", "1,0,1", "--s", "2,0", "--method", "direct,theta"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).take(3).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    let diff = (rows[0][0] - rows[1][0]).hypot(rows[0][1] - rows[1][1]);
    assert!(diff <= rows[0][2] + rows[1][2], "{out}");
}

#[test]
fn eval_rejects_indefinite_form() {
    let o = run(&["eval", "--form", "1,0,-1", "--s", "2,0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("not positive definite"));
}

#[test]
fn eval_approx_auto_cutoff_is_cubic() {
    let o = run(&["eval", "--form", "1,0,1", "--s", "0.5,20", "--method", "approx", "--X", "auto"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[0], "approx");
    assert_eq!(cols[5].parse::<f64>().unwrap(), 8000.0);
    assert!(cols[3].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn eval_bad_method_is_usage_error() {
    let o = run(&["eval", "--form", "1,0,1", "--s", "2,0", "--method", "magic"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eval", "--form", "1,0,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zeros_small_range() {
    let o = run(&["zeros", "--form", "1,0,1", "--from", "5", "--to", "15", "--step", "0.01"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("gamma,t_lo,t_hi,w_residual"));
    let gammas: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(gammas.len(), 4);
    for (g, want) in gammas.iter().zip([6.02, 10.24, 12.99, 14.13]) {
        assert!((g - want).abs() < 0.01, "{g}");
    }
}

#[test]
fn zeros_reversed_range_is_usage_error() {
    let o = run(&["zeros", "--from", "9", "--to", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn zeros_law_table() {
    let o = run(&["zeros", "--form", "1,0,1", "--from", "5", "--to", "40", "--gaps", "--laws", "0.5:1,0.4286:1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let (_, table) = out.split_once("\n\n").expect("law table after a blank line");
    let rows: Vec<&str> = table.lines().collect();
    assert!(rows[0].starts_with("law,exponent,constant"));
    assert!(rows[1].starts_with("0.5:1,0.5,1,"));
    assert!(rows[2].starts_with("0.4286:1,0.4286,1,"));
}

#[test]
fn expsum_scenario_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "s1.json", SCENARIO);
    let o = run(&["expsum", "--scenario", path.to_str().unwrap(), "--m-max", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reorder_all_equal"], true);
    assert_eq!(v["reorder"].as_array().unwrap().len(), 4);
    assert!(v["reorder"][0]["tolerance"].as_f64().unwrap() > 0.0);
    assert!(v["bound_report"]["raw_abs"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["windows"].as_array().unwrap().len(), 5);
    assert!(v["bound_report_csv"]["header"].as_str().unwrap().starts_with("T,K,N"));
}

#[test]
fn expsum_coprimality_violation_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SCENARIO.replace("\"h\": 16, \"k\": 33", "\"h\": 11, \"k\": 33");
    let path = write(dir.path(), "bad.json", &bad);
    let o = run(&["expsum", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("coprimality"), "{}", stderr(&o));
}

#[test]
fn expsum_lemma_suite() {
    let o = run(&["expsum", "--suite", "lemmas", "--trials", "1000", "--seed", "7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["weyl"][0]["lambda"], 1);
    assert_eq!(v["weyl"][0]["violations"], 0);
    assert_eq!(v["bprocess"]["all_within"], true);
    assert!(v["vdc"]["max_ratio"].as_f64().unwrap() <= 10.0);
}

#[test]
fn expsum_needs_a_mode() {
    assert_eq!(run(&["expsum"]).status.code(), Some(2));
}

#[test]
fn seeded_output_is_byte_identical() {
    let args = ["expsum", "--suite", "lemmas", "--trials", "200", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let z = ["zeros", "--from", "5", "--to", "30"];
    assert_eq!(run(&z).stdout, run(&z).stdout);
}

#[test]
fn config_from_env_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "scan_step = 0.01\nseed = 5\n");
    let out = dir.path().join("zeros.csv");
    let o = bin()
        .env("ZETA_GAPS_CONFIG", &cfg)
        .args(["zeros", "--from", "5", "--to", "15", "--output", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5);

    let broken = write(dir.path(), "broken.toml", "bprocess_constant = -1.0\n");
    let o = bin()
        .env("ZETA_GAPS_CONFIG", &broken)
        .args(["zeros", "--from", "5", "--to", "15"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
