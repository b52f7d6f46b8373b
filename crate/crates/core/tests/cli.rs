use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const GOLDEN_M: &str = include_str!("golden/matrix_m.txt");

fn qdesign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdesign")).args(args).env_clear().output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn qbinom_examples() {
    for (args, want) in
        [(["6", "3", "2"], "1395"), (["5", "0", "7"], "1"), (["4", "2", "2"], "35"), (["8", "4", "2"], "200787")]
    {
        let o = qdesign(&["qbinom", args[0], args[1], args[2]]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).trim(), want);
    }
    assert_eq!(code(&qdesign(&["qbinom", "6", "3"])), 2);
    assert_eq!(code(&qdesign(&["qbinom", "6", "x", "2"])), 2);
}

#[test]
fn family_matrix_text_is_golden() {
    let o = qdesign(&["km", "--n", "6", "--q", "2", "--t", "2", "--K", "3,4", "--family-layout", "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), GOLDEN_M);
}

#[test]
fn km_csv_header_and_rows() {
    let o = qdesign(&["km", "--n", "4", "--q", "2", "--t", "1", "--K", "2", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "row,k2:E(1 2),k2:E(1 3),k2:E(1 4),k2:E(2 3),k2:E(2 4),k2:E(3 4)");
    assert_eq!(lines.next().unwrap(), "E(1),1,2,4,0,0,0");
    assert_eq!(lines.count(), 3);
}

#[test]
fn trivial_group_gives_containment_matrix() {
    let o = qdesign(&["km", "--group", "trivial", "--n", "3", "--q", "2", "--t", "1", "--K", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 7);
    for row in entries {
        let row: Vec<u64> = row.as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).collect();
        assert_eq!(row.len(), 7);
        assert!(row.iter().all(|&e| e <= 1));
        assert_eq!(row.iter().sum::<u64>(), 3);
    }
}

#[test]
fn singer_rows_sum_to_fifty() {
    let o = qdesign(&["km", "--group", "singer", "--n", "6", "--q", "2", "--t", "2", "--K", "3,4"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["group"]["kind"], "singer");
    assert_eq!(v["group"]["poly"], serde_json::json!([1, 1, 0, 0, 0, 0, 1]));
    for row in v["entries"].as_array().unwrap() {
        assert_eq!(row.as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).sum::<u64>(), 50);
    }
}

#[test]
fn construct_and_verify_family() {
    let dir = tempfile::tempdir().unwrap();
    let d22 = dir.path().join("d22.json");
    assert_eq!(code(&qdesign(&["construct", "2", "2", "-o", path(&d22)])), 0);
    let v = json_file(&d22);
    assert_eq!(v["params"]["lambda"], 15);
    assert_eq!(v["params"]["n"], 6);
    assert_eq!(v["representatives"].as_array().unwrap().len(), 15);
    assert_eq!(v["representatives"][0], serde_json::json!({"pivots": [1, 2, 6]}));
    let o = qdesign(&["verify", path(&d22)]);
    assert_eq!((code(&o), stdout(&o)), (0, "lambda=15\n".into()));

    let d32 = dir.path().join("d32.json");
    assert_eq!(code(&qdesign(&["construct", "3", "2", "-o", path(&d32)])), 0);
    let v = json_file(&d32);
    assert_eq!((v["params"]["lambda"].as_u64(), v["params"]["n"].as_u64()), (Some(15), Some(7)));
    assert_eq!(stdout(&qdesign(&["verify", path(&d32)])), "lambda=15\n");

    let o = qdesign(&["construct", "1", "1"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["params"]["q"], 1);
    assert_eq!(v["representatives"].as_array().unwrap().len(), 8);
    let s11 = dir.path().join("s11.json");
    fs::write(&s11, stdout(&o)).unwrap();
    assert_eq!(stdout(&qdesign(&["verify", path(&s11)])), "lambda=4\n");
}

#[test]
fn deleting_a_block_breaks_the_balance() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full.json");
    assert_eq!(code(&qdesign(&["construct", "2", "2", "--explicit-blocks", "-o", path(&full)])), 0);
    let mut v = json_file(&full);
    // sum of 2^(stars) over the 15 selected classes
    assert_eq!(v["blocks"].as_array().unwrap().len(), 1271);
    assert_eq!(stdout(&qdesign(&["verify", path(&full)])), "lambda=15\n");
    v["blocks"].as_array_mut().unwrap().remove(0);
    let cut = dir.path().join("cut.json");
    fs::write(&cut, serde_json::to_string(&v).unwrap()).unwrap();
    let o = qdesign(&["verify", path(&cut)]);
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.starts_with("unbalanced: expected lambda=15\n"), "{text}");
    assert!(text.lines().skip(1).all(|l| l.ends_with("count=14")));
}

#[test]
fn trivial_design_has_lambda_max() {
    let mut reps = Vec::new();
    for k in [3usize, 4] {
        for pi in qdesign::enum_pivot_sets(6, k) {
            reps.push(serde_json::json!({"pivots": pi.to_vec()}));
        }
    }
    let design = serde_json::json!({
        "params": {"t": 2, "n": 6, "K": [3, 4], "lambda": 50, "q": 2},
        "group": {"kind": "borel"},
        "representatives": reps,
    });
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("trivial.json");
    fs::write(&p, design.to_string()).unwrap();
    let o = qdesign(&["verify", path(&p)]);
    assert_eq!((code(&o), stdout(&o)), (0, "lambda=50\n".into()));
}

#[test]
fn km_solve_verify_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let km = dir.path().join("km.json");
    let sol = dir.path().join("sol.json");
    let args = ["km", "--group", "singer", "--n", "6", "--q", "2", "--t", "2", "--K", "3,4", "-o", path(&km)];
    assert_eq!(code(&qdesign(&args)), 0);
    assert_eq!(code(&qdesign(&["solve", path(&km), "--lambda", "8", "--max-solutions", "2", "-o", path(&sol)])), 0);
    let v = json_file(&sol);
    assert!(!v["solutions"].as_array().unwrap().is_empty());
    let o = qdesign(&["verify", path(&sol)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().all(|l| l.ends_with("lambda=8")));

    // a request file carries its own lambda
    let req = dir.path().join("req.json");
    let body = serde_json::json!({"matrix": json_file(&km), "lambda": 15, "max_solutions": 1});
    fs::write(&req, body.to_string()).unwrap();
    let o = qdesign(&["solve", path(&req)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lambda"], 15);
    assert_eq!(v["status"], "truncated");
}

#[test]
fn family_matrix_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let args = ["km", "--n", "6", "--q", "2", "--t", "2", "--family-layout", "-o", path(&m)];
    assert_eq!(code(&qdesign(&args)), 0);

    let o = qdesign(&["solve", path(&m), "--lambda", "15", "--max-solutions", "1000"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "complete");
    let all: Vec<usize> = (0..15).collect();
    let found: Vec<Vec<usize>> = v["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| serde_json::from_value(s["columns"].clone()).unwrap())
        .collect();
    assert!(found.contains(&all));

    let o = qdesign(&["solve", path(&m), "--lambda", "0"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["solutions"][0]["columns"], serde_json::json!([]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&qdesign(&["km", "--n", "6", "--q", "6", "--t", "2", "--K", "3"])), 2);
    assert_eq!(code(&qdesign(&["verify", "/nonexistent/design.json"])), 2);
    let o = qdesign(&[
        "--guard-orbit-size",
        "100",
        "km",
        "--group",
        "singer",
        "--n",
        "6",
        "--q",
        "2",
        "--t",
        "2",
        "--K",
        "3",
    ]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&qdesign(&["--guard-orbit-size", "100", "km", "--n", "6", "--q", "2", "--t", "2", "--K", "3"])), 3);

    let dir = tempfile::tempdir().unwrap();
    let km = dir.path().join("km.json");
    assert_eq!(
        code(&qdesign(&["km", "--group", "trivial", "--n", "5", "--q", "2", "--t", "1", "--K", "2", "-o", path(&km)])),
        0
    );
    let o =
        qdesign(&["solve", path(&km), "--lambda", "7", "--max-solutions", "1000000000", "--time-limit", "0.000001"]);
    assert_eq!(code(&o), 4);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "timeout");
}

#[test]
fn environment_overrides_flags() {
    let o = Command::new(env!("CARGO_BIN_EXE_qdesign"))
        .args(["lambda-max"])
        .env_clear()
        .envs([("QDESIGN_N", "7"), ("QDESIGN_T", "2"), ("QDESIGN_K", "3,4,5"), ("QDESIGN_Q", "2")])
        .output()
        .unwrap();
    assert_eq!((code(&o), stdout(&o)), (0, "341\n".into()));
}

#[test]
fn poly_file_sets_the_field_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("moduli.txt");
    fs::write(&p, "# GF(8) via x^3 + x^2 + 1\n8 3 1 0 1 1\n").unwrap();
    let o = qdesign(&["--poly-file", path(&p), "km", "--n", "3", "--q", "8", "--t", "1", "--K", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["modulus"], serde_json::json!([1, 0, 1, 1]));
    let o = qdesign(&["km", "--n", "3", "--q", "8", "--t", "1", "--K", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["modulus"], serde_json::json!([1, 1, 0, 1]));
}

#[test]
fn borel_check_is_deterministic() {
    let args = ["borel-check", "--n", "6", "--q", "3", "--k", "3", "--seed", "42", "--trials", "300"];
    let a = qdesign(&args);
    let b = qdesign(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(stdout(&a), "borel-check n=6 q=3 k=3 seed=42 trials=300 failures=0\n");
}
