use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nehari(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nehari")).args(args).output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nehari-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn pzero_and_lift() {
    let r = records(&nehari(&["pzero"]));
    let p0 = r[0]["p0"].as_f64().unwrap();
    assert!((p0 - 5.738_817_179).abs() < 1e-8);

    let r = records(&nehari(&["lift", "--n", "12"]));
    assert_eq!(r[0]["exponents"], serde_json::json!([2, 1]));
    let r = records(&nehari(&["lift", "--exponents", "0,0,1"]));
    assert_eq!(r[0]["n"], 5);
}

#[test]
fn verify_thm1_reports_the_p8_counterexample() {
    let r = records(&nehari(&["verify-thm1", "--d", "2", "--p", "8", "--method", "grid"]));
    assert_eq!(r[0]["exceeded_one"], true);
    assert_eq!(r[0]["spectrum_ok"], true);
    let ratio = r[0]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.018_535_404_444).abs() < 1e-4, "{ratio}");
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = nehari(&["schatten", "--d", "3", "--p", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1.4142135623730951e0"), "{text}");
}

#[test]
fn stochastic_output_is_deterministic_and_echoes_seed() {
    let args = ["ratio", "--d", "6", "--p", "6", "--method", "mc", "--samples", "50000", "--seed", "17"];
    let a = nehari(&args);
    let b = nehari(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut seq = vec!["--threads", "1"];
    seq.extend(args);
    assert_eq!(nehari(&seq).stdout, a.stdout);
    let r = records(&a);
    assert_eq!(r[0]["seed"], 17);
    assert_eq!(r[0]["report"]["l1"]["seed"], 17);
}

#[test]
fn matrix_export_round_trips_through_svd() {
    let csv = scratch("phi.csv");
    let csv_s = csv.to_str().unwrap();
    let r = records(&nehari(&["matrix", "--d", "4", "--csv", csv_s]));
    assert_eq!(r[0]["dim"], 5);
    let labels = std::fs::read_to_string(format!("{csv_s}.labels")).unwrap();
    assert_eq!(labels.lines().collect::<Vec<_>>(), ["[]", "[1]", "[0,1]", "[0,0,1]", "[0,0,0,1]"]);

    let direct = records(&nehari(&["svd", "--d", "4"]));
    let imported = records(&nehari(&["svd", "--matrix", csv_s]));
    assert_eq!(direct[0]["singular_values"], imported[0]["singular_values"]);
}

#[test]
fn symbol_files_and_output_path() {
    let sym = scratch("z1z2.json");
    std::fs::write(&sym, r#"[{"exponents":[1,1],"re":1.0,"im":0.0}]"#).unwrap();
    let out = scratch("svd.jsonl");
    let status = nehari(&["svd", "--symbol", sym.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(std::fs::read_to_string(&out).unwrap().trim()).unwrap();
    assert_eq!(v["dim"], 4);
    assert_eq!(v["rank"], 4);
}

#[test]
fn scan_emits_one_line_per_d_and_a_summary() {
    let r = records(&nehari(&["scan", "--p", "8", "--d-max", "3", "--tol", "1e-7"]));
    assert_eq!(r.len(), 4);
    assert_eq!(r[0]["exceeded_one"], false);
    assert_eq!(r[1]["exceeded_one"], true);
    assert_eq!(r[3]["minimal_d"], 2);
}

#[test]
fn verify_thm2_and_maximize() {
    let r = records(&nehari(&["verify-thm2", "--a", "1,0.5-2i", "--b", "1i,1", "--p", "2"]));
    assert_eq!(r[0]["holds"], true);
    let r = records(&nehari(&["maximize", "--d", "2", "--p", "inf", "--restarts", "2", "--iters", "20", "--seed", "3"]));
    assert_eq!(r[0]["seed"], 3);
    assert!(r[0]["best_ratio"].as_f64().unwrap() > 1.0);
}

#[test]
fn exit_codes() {
    assert_eq!(nehari(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(nehari(&["ratio", "--p", "x"]).status.code(), Some(2));
    assert_eq!(nehari(&["lift", "--n", "0"]).status.code(), Some(2));
    assert_eq!(nehari(&["verify-thm2", "--a", "1", "--b", "1", "--p", "7"]).status.code(), Some(2));
    assert_eq!(nehari(&["svd", "--matrix", "/nonexistent/m.csv"]).status.code(), Some(2));
    // computational failures
    assert_eq!(nehari(&["l1", "--d", "9"]).status.code(), Some(3));
    assert_eq!(nehari(&["svd", "--d", "5", "--max-dim", "3"]).status.code(), Some(3));
    assert_eq!(nehari(&["lift", "--exponents", "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,20"]).status.code(), Some(3));
}
