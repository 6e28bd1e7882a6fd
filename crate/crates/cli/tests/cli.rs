use std::process::{Command, Output};

use serde_json::Value;

fn commlp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_commlp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = commlp(args);
    let code = out.status.code().unwrap();
    assert!(code != 1, "{}", String::from_utf8_lossy(&out.stderr));
    (serde_json::from_slice(&out.stdout).expect("json report"), code)
}

fn value(v: &Value) -> &str {
    v["value"].as_str().expect("exact value")
}

#[test]
fn and_lovasz_is_one() {
    let (r, code) = json(&["bound", "--family", "AND", "--n", "1", "--lp", "lovasz", "--eps", "0"]);
    assert_eq!(code, 0);
    assert_eq!(value(&r["optimum"]), "1");
    assert_eq!(r["optimum"]["mode"], "exact-rational");
    assert_eq!(r["log2_optimum"]["value"], 0.0);
}

#[test]
fn smooth_report_carries_lovasz() {
    let (r, _) = json(&["bound", "--family", "NDISJ", "--n", "2", "--lp", "smooth", "--eps", "0"]);
    assert_eq!(value(&r["optimum"]), "5/2");
    assert_eq!(value(&r["lovasz"]["optimum"]), "2");
    assert_eq!(r["smooth_ge_lovasz"], true);
}

#[test]
fn search_solvers_agree() {
    let base = ["bound", "--lp", "search", "--n", "2", "--k", "1", "--sigma", "1", "--solver"];
    let (full, _) = json(&[&base[..], &["full"]].concat());
    let (cg, _) = json(&[&base[..], &["cg"]].concat());
    assert_eq!(value(&full["optimum"]), "3");
    assert_eq!(full["optimum"], cg["optimum"]);
    let (float, _) = json(&[&base[..], &["full", "--arith", "float"]].concat());
    assert_eq!(float["optimum"]["mode"], "float-tol");
    assert!((float["optimum"]["value"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn truth_table_file_matches_family() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eq.txt");
    std::fs::write(&path, "2\n1000\n0100\n0010\n0001\n").unwrap();
    let (file, _) = json(&["bound", "--table", path.to_str().unwrap(), "--lp", "lovasz"]);
    let (named, _) = json(&["bound", "--family", "EQ", "--n", "2", "--lp", "lovasz"]);
    assert_eq!(value(&file["optimum"]), "4");
    assert_eq!(file["optimum"], named["optimum"]);
}

#[test]
fn bad_table_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "1\n01\n2\n").unwrap();
    let out = commlp(&["bound", "--table", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certificate_value_is_exact() {
    let (r, code) = json(&["certify", "--n", "3", "--k", "1", "--m", "1", "--alpha", "1", "--beta", "1/3"]);
    assert_eq!(code, 0);
    // 2^{beta n} 2^{-alpha k} = 2 / 2.
    assert_eq!(value(&r["value"]), "1");
    assert_eq!(r["value_matches"], true);
    assert_eq!(r["modes_agree"], true);
}

#[test]
fn zero_certificate_is_feasible() {
    let (r, code) = json(&["certify", "--kind", "zero", "--universe", "2"]);
    assert_eq!(code, 0);
    assert_eq!(value(&r["value"]), "0");
    assert_eq!(r["feasible"], true);
}

#[test]
fn inflated_certificate_fails_with_witness() {
    let (r, code) = json(&["certify", "--n", "3", "--k", "1", "--m", "1", "--alpha", "0", "--beta", "2"]);
    assert_eq!(code, 2);
    assert_eq!(r["feasible"], false);
    for check in r["verification"].as_array().unwrap() {
        assert!(check["witness_rectangle"]["rows"].as_array().is_some_and(|v| !v.is_empty()));
    }
}

#[test]
fn saved_certificate_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let (a, _) = json(&["certify", "--n", "2", "--k", "1", "--m", "1", "--alpha", "1", "--beta", "1/2", "--save", p]);
    let (b, _) = json(&["certify", "--input", p]);
    assert_eq!(a, b);
}

#[test]
fn scan_full_only_is_one_row() {
    let out = commlp(&["scan", "--n", "8", "--m", "2", "--seed", "1", "--population", "full-only"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,28,28,1,1,1,1,true"));
    assert!(lines[2].starts_with("summary,"));
}

#[test]
fn scan_is_byte_reproducible() {
    let args = ["scan", "--n", "8", "--m", "2", "--k", "1", "--seed", "7", "--samples", "500"];
    let a = commlp(&args).stdout;
    let b = commlp(&args).stdout;
    assert_eq!(a, b);
    let c = commlp(&["scan", "--n", "8", "--m", "2", "--k", "1", "--seed", "8", "--samples", "500"]).stdout;
    assert_ne!(a, c);
}

#[test]
fn scan_requires_seed() {
    assert_eq!(commlp(&["scan", "--n", "8"]).status.code(), Some(2));
}

#[test]
fn scan_huge_bar_warns() {
    let out = commlp(&["scan", "--n", "8", "--m", "2", "--seed", "7", "--samples", "50", "--gamma", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let summary = text.lines().last().unwrap();
    assert!(summary.contains("empty population"));
}

#[test]
fn trivial_ndisj_protocol() {
    let (r, code) = json(&["protocol", "--which", "trivial-ndisj", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(value(&r["success"]), "1");
    assert_eq!(r["bits_max"], 4);
}

#[test]
fn halving_composition_matches_formula() {
    let (r, _) = json(&["protocol", "--which", "ndisj-to-search", "--n", "8", "--k", "1", "--s", "2"]);
    assert_eq!(value(&r["success"]), "1");
    assert_eq!(r["bits_match_formula"], true);
    assert_eq!(r["bits_max"], r["analytic"]["cost_formula"]);
}

#[test]
fn permutation_composition_meets_bound() {
    let (r, code) = json(&["protocol", "--which", "search-from-kfold", "--n", "1", "--k", "2", "--big-k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["meets_analytic"], true);
}

#[test]
fn monte_carlo_needs_seed_and_is_tagged() {
    assert_eq!(
        commlp(&["protocol", "--which", "trivial-ndisj", "--n", "2", "--mode", "monte-carlo"]).status.code(),
        Some(1)
    );
    let args = ["protocol", "--which", "trivial-ndisj", "--n", "2", "--mode", "monte-carlo", "--trials", "200", "--seed", "3"];
    let (r, _) = json(&args);
    assert_eq!(r["success"]["mode"], "monte-carlo-ci");
    assert_eq!(commlp(&args).stdout, commlp(&args).stdout);
}

#[test]
fn protocol_from_tree_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("guess.json");
    let tree = serde_json::json!({
        "input_len": 1,
        "branches": [
            { "probability": "1/2", "tree": { "node": "leaf", "output": { "decisions": [true] } } },
            { "probability": "1/2", "tree": { "node": "leaf", "output": { "decisions": [false] } } }
        ]
    });
    std::fs::write(&path, tree.to_string()).unwrap();
    let (r, _) = json(&["protocol", "--which", "file", "--tree", path.to_str().unwrap(), "--task", "ndisj:1:1"]);
    assert_eq!(value(&r["success"]), "1/2");
    assert_eq!(r["bits_max"], 0);
}

#[test]
fn timing_is_opt_in() {
    let (r, _) = json(&["bound", "--family", "AND", "--n", "1"]);
    assert!(r.get("runtime_ms").is_none());
    let (r, _) = json(&["bound", "--family", "AND", "--n", "1", "--timing"]);
    assert!(r["runtime_ms"].as_f64().is_some());
}

#[test]
fn env_cap_override_applies() {
    let out = Command::new(env!("CARGO_BIN_EXE_commlp"))
        .args(["protocol", "--which", "trivial-ndisj", "--n", "3"])
        .env("COMMLP_EVAL_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds cap"));
}
