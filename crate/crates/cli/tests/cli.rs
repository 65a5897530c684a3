use std::process::{Command, Output};

use serde_json::Value;

fn qcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcf")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid json")
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn s2_table_up_to_nine_has_one_matching_row() {
    let o = qcf(&["verify-table", "--family", "S2", "--m-max", "9"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["m"], 9);
    assert_eq!(rows[0]["matches"], true);
    assert_eq!(rows[0]["residue_q_n"], serde_json::json!(["0", "0", "0", "0", "1"]));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&qcf(&["verify-table", "--family", "GG"])), 1);
    assert_eq!(code(&qcf(&["witness", "--family", "GG"])), 1);
    assert_eq!(code(&qcf(&["verify-table", "--family", "X9"])), 1);
    assert_eq!(code(&qcf(&["schur", "--precision", "32"])), 1);
    assert_eq!(code(&qcf(&["schur", "--m-min", "9", "--m-max", "3"])), 1);
    assert_eq!(code(&qcf(&["outside-limits", "--q", "1"])), 1);
    assert_eq!(code(&qcf(&["corollary-digits", "--digits", "0"])), 1);
    assert_eq!(code(&qcf(&["frobnicate"])), 1);
    assert_eq!(code(&qcf(&["--help"])), 0);
}

#[test]
fn unmet_tolerance_exits_two() {
    let o = qcf(&["outside-limits", "--q", "2", "--precision", "64", "--j-max", "40"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["summary"]["all_passed"], false);
}

#[test]
fn reports_are_deterministic_apart_from_the_timestamp() {
    let args = ["schur", "--m-max", "12", "--precision", "128"];
    let (a, b) = (qcf(&args), qcf(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(without_timestamp(json(&a)), without_timestamp(json(&b)));
    let csv = ["verify-table", "--m-max", "40", "--format", "csv"];
    assert_eq!(qcf(&csv).stdout, qcf(&csv).stdout);
}

#[test]
fn key_order_is_stable() {
    let text = String::from_utf8(qcf(&["product-identity", "--m-max", "9"]).stdout).unwrap();
    let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
    let order = ["tool", "version", "config", "results", "summary", "timestamp"].map(pos);
    assert!(order.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn k_witness_stage_one_passes_with_gap_above_an_eighth() {
    let o = qcf(&["witness", "--family", "K", "--stages", "1", "--precision", "512"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let ver = &v["results"][0]["verification"];
    assert_eq!(ver["passed"], true);
    assert_eq!(ver["threshold"], "1/8");
    assert_eq!(ver["gap"]["precision_bits"], 512);
    let gap: f64 = ver["gap"]["value"].as_str().unwrap().parse().unwrap();
    assert!(gap > 0.125);
}

#[test]
fn s2_witness_csv_carries_a_quarter_threshold() {
    let o = qcf(&["witness", "--family", "S2", "--stages", "1", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,|Q_n(y)|,gap,threshold"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 33);
    assert!(rows.iter().all(|r| r.ends_with(",0.25")));
}

#[test]
fn deep_stages_are_labelled_unverified() {
    let o = qcf(&["witness", "--family", "K", "--stages", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let st = v["results"].as_array().unwrap();
    assert_eq!(st[1]["n_star"], "4145");
    assert_eq!(st[1]["verification"]["passed"], true);
    assert_eq!(st[2]["status"], "constructed, not verified");
    assert!(st[2]["verification"].is_null());
    assert!(st[2]["log2_e_lower_bound"].is_string());
}

#[test]
fn corollary_digits_match() {
    let o = qcf(&["corollary-digits", "--digits", "110"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let s = v["results"][0]["expansion"].as_str().unwrap();
    assert!(s.ends_with("49277885083112437522992318812011"));
    assert_eq!(s.len(), 112);
}

#[test]
fn gg_exploration_has_its_banner_and_never_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gg.json");
    let o = qcf(&["gg-explore", "--m-max", "12", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["banner"], "CONJECTURE-EXPLORATION");
    assert!(v["details"]["exceptional_orders"].is_array());
}
