use std::process::{Command, Output};

use serde_json::Value;

fn genfun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genfun")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = genfun(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().unwrap())
}

fn entry<'a>(rep: &'a Value, name: &str) -> &'a Value {
    rep["results"].as_array().unwrap().iter().find(|e| e["name"] == name).unwrap()
}

#[test]
fn norm_of_n_squared() {
    let (rep, code) = report(&["norm", "--seq", r#"{"gamma": 2}"#, "--scale", r#"{"kind": "log"}"#]);
    assert_eq!(code, 0);
    assert_eq!(rep["schema_version"], 1);
    let exact = entry(&rep, "exact");
    assert_eq!(exact["mode"], "exact");
    let v = exact["value"].as_f64().unwrap();
    assert!((v - 2f64.exp()).abs() < 1e-9 * v);
    let est = entry(&rep, "estimated");
    let (lo, hi) = (est["ci"][0].as_f64().unwrap(), est["ci"][1].as_f64().unwrap());
    assert!(lo <= v && v <= hi);
}

#[test]
fn constant_five_has_norm_one() {
    let seq = format!(r#"{{"c0": {}}}"#, 5f64.ln());
    let (rep, _) = report(&["norm", "--seq", &seq]);
    assert_eq!(entry(&rep, "exact")["value"], 1.0);
}

#[test]
fn oscillating_black_box_is_inconclusive_at_default_tolerance() {
    let seq = r#"{"blackbox": {"form": "oscillating-power", "gamma": 1}}"#;
    let (rep, code) = report(&["norm", "--seq", seq]);
    assert_eq!(code, 3);
    assert_eq!(rep["outcome"], "inconclusive");
}

#[test]
fn classify_s_one() {
    let (rep, code) = report(&["classify", "--seq", r#"{"s": 1}"#]);
    assert_eq!(code, 0);
    assert_eq!(entry(&rep, "classification")["verdict"], "moderate-not-negligible");
    assert!((entry(&rep, "norm")["value"].as_f64().unwrap() - 1f64.exp()).abs() < 1e-9);
    assert_eq!(entry(&rep, "maddox_linf")["verdict"], "holds");
    assert_eq!(entry(&rep, "maddox_c0")["verdict"], "fails");
}

#[test]
fn files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("seq.json");
    let scale = dir.path().join("scale.json");
    std::fs::write(&seq, r#"{"terms": [{"gamma": 1}, {"s": -1}]}"#).unwrap();
    std::fs::write(&scale, r#"{"kind": "power", "m": 2}"#).unwrap();
    let (rep, code) = report(&["classify", "--seq", seq.to_str().unwrap(), "--scale", scale.to_str().unwrap()]);
    assert_eq!(code, 0);
    // n dominates e^{-√n} and has norm 1 on n^{-1/2}
    assert_eq!(entry(&rep, "norm")["value"], 1.0);
}

#[test]
fn malformed_json_is_a_usage_error() {
    let out = genfun(&["norm", "--seq", r#"{"gamma": "#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("malformed JSON"));
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_descriptors_are_usage_errors() {
    for args in [
        &["norm", "--seq", r#"{"gamma": 1}"#, "--scale", r#"{"kind": "cubic"}"#][..],
        &["norm", "--seq", r#"{"gama": 1}"#],
        &["norm", "--seq", r#"{"gamma": 1}"#, "--scale", r#"{"kind": "power", "m": -1}"#],
        &["assoc", "--flavor", "weak", "--demo", "delta-pairing"],
        &["temperate-check", "--spec", r#"{"phi": "cube"}"#],
        &["convert-scale", "--asym", "infra-exp", "--m", "2"],
        &["norm", "--seq", "/nonexistent/seq.json"],
    ] {
        assert_eq!(genfun(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unknown_flags_exit_two() {
    assert_eq!(genfun(&["norm", "--seq", "{}", "--bogus"]).status.code(), Some(2));
    assert_eq!(genfun(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(genfun(&["aclassify", "--seq", "{}", "--scale-kind", "cubic"]).status.code(), Some(2));
}

#[test]
fn delta_pairing_association() {
    let (rep, code) = report(&["assoc", "--flavor", "weak", "--s", "0.5", "--demo", "delta-pairing"]);
    assert_eq!(code, 0);
    assert_eq!(entry(&rep, "result")["verdict"], "holds");
    let (rep, code) = report(&["assoc", "--flavor", "weak", "--s", "0.8", "--demo", "delta-pairing"]);
    assert_eq!(code, 1);
    assert!(entry(&rep, "result")["detail"].as_str().unwrap().contains("does not tend to 0"));
}

#[test]
fn number_association() {
    let lhs = r#"{"terms": [{"gamma": 1}, {"gamma": -2}]}"#;
    let rhs = r#"{"gamma": 1}"#;
    let (_, code) = report(&["assoc", "--flavor", "s", "--s", "1.5", "--lhs", lhs, "--rhs", rhs]);
    assert_eq!(code, 0);
    let (_, code) = report(&["assoc", "--flavor", "s", "--s", "2.5", "--lhs", lhs, "--rhs", rhs]);
    assert_eq!(code, 1);
    let (_, code) = report(&["assoc", "--flavor", "strong-s", "--s", "1.5", "--lhs", lhs, "--rhs", rhs]);
    assert_eq!(code, 0);
}

#[test]
fn embed_labels() {
    let (rep, code) = report(&["embed", "--coeffs", r#"{"form": "subexp", "beta": 1}"#]);
    assert_eq!(code, 0);
    assert_eq!(entry(&rep, "coefficient_class")["verdict"], "hyperfunction");
    let (rep, _) = report(&["embed", "--coeffs", r#"{"form": "geometric", "rho": 0.5}"#]);
    assert_eq!(entry(&rep, "coefficient_class")["verdict"], "analytic");
    assert_eq!(entry(&rep, "sup_norm")["value"], 1.0);
}

#[test]
fn delta_squared_demo_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (rep, code) = report(&["demo-delta2", "--csv", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(entry(&rep, "delta_sup_norm")["value"], 1.0);
    assert_eq!(entry(&rep, "delta2_sup_norm")["value"], 1.0);
    let csv = std::fs::read_to_string(dir.path().join("demo-delta2_unboundedness.csv")).unwrap();
    assert!(csv.starts_with("n,sup_delta\n"));
    assert!(csv.lines().any(|l| l == "1024.0,13.0"));
    let traces = rep["traces"].as_array().unwrap();
    assert!(traces.iter().all(|t| t["path"].is_string()));
}

#[test]
fn norm_csv_trace_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = genfun(&["norm", "--seq", r#"{"gamma": 1}"#, "--csv", dir.path().to_str().unwrap(), "--ladder-max-exp", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(dir.path().join("norm_powered.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["n", "p_value", "powered_value"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let n: f64 = row[0].parse().unwrap();
        let p: f64 = row[1].parse().unwrap();
        let powered: f64 = row[2].parse().unwrap();
        assert!((p - n).abs() < 1e-9 * n);
        assert!((powered - 1f64.exp()).abs() < 1e-9);
    }
}

#[test]
fn temperate_checks() {
    let (rep, code) = report(&["temperate-check", "--spec", r#"{"phi": "exp"}"#]);
    assert_eq!(code, 1);
    assert_eq!(entry(&rep, "g_moderate")["verdict"], "fails");
    let (_, code) = report(&["temperate-check", "--spec", r#"{"phi": "square"}"#]);
    assert_eq!(code, 0);
    let (_, code) = report(&["temperate-check", "--spec", r#"{"phi": "linear:2,-1"}"#, "--family", "power-rows"]);
    assert_eq!(code, 0);
    let (rep, code) = report(&["temperate-check", "--spec", r#"{"phi": "square", "h": {"fn": "identity"}}"#]);
    assert_eq!(code, 1);
    assert_eq!(entry(&rep, "temperate")["verdict"], "fails");
}

#[test]
fn asymptotic_classification() {
    let (rep, code) = report(&["aclassify", "--seq", r#"{"gamma": 3}"#, "--scale-kind", "polynomial"]);
    assert_eq!(code, 0);
    assert_eq!(entry(&rep, "a_class")["value"], -3);
    assert_eq!(entry(&rep, "family_agrees")["verdict"], "holds");
    let seq = r#"{"exps": [{"basis": "pow", "param": 1, "coef": 2}]}"#;
    let (rep, _) = report(&["aclassify", "--seq", seq, "--scale-kind", "exp-iter"]);
    assert_eq!(entry(&rep, "a_class")["verdict"], "in-algebra");
    let seq = r#"{"exps": [{"basis": "pow", "param": 0.5, "coef": 1}]}"#;
    let (rep, _) = report(&["aclassify", "--seq", seq, "--scale-kind", "infra-exp"]);
    assert_eq!(entry(&rep, "second_kind")["verdict"], "in-subalgebra");
}

#[test]
fn convert_scale_rows() {
    let (rep, code) = report(&["convert-scale", "--asym", "exp-iter", "--m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(entry(&rep, "scale")["value"]["kind"], "expiter");
    let (rep, _) = report(&["convert-scale", "--asym", "infra-exp", "--sigma", "0.5"]);
    assert_eq!(entry(&rep, "scale")["value"], serde_json::json!({"kind": "power", "m": 1.0, "factor": 2.0}));
}

#[test]
fn text_format() {
    let out = genfun(&["classify", "--seq", r#"{"gamma": -1}"#, "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("classify (holds)\n"));
    assert!(text.contains("classification: moderate-not-negligible"));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["demo-delta2", "--ladder-max-exp", "16", "--format", "text"];
    assert_eq!(genfun(&args).stdout, genfun(&args).stdout);
}
