use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bhtqaoa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|s| s.as_str().expect("string").to_owned())
        .collect()
}

const SOP: &str = "(a & b & ~c) | (~a & c) | (~b & c)";
const ESOP: &str = "(a & b & ~c) ^ (~a & c) ^ (~b & c)";
const SUDOKU: &str =
    "(cell_1 ^ cell_2) & (cell_1 ^ cell_3) & (cell_2 ^ cell_4) & (cell_3 ^ cell_4)";
const HALF_ADDER: &str =
    "((a0 ^ b0) | ((a0 & b0) ^ (a1 ^ b1))) & ((a1 & b1) | ((a0 & b0) & (a1 ^ b1)))";

#[test]
fn parse_reports_variables_and_minterms() {
    let v = json(&["parse", "(a | b | ~c) & (~a | c) & (~b | c)"]);
    assert_eq!(strings(&v["variables"]), ["a", "b", "c"]);
    assert_eq!(v["num_minterms"], 4);
    let v = json(&["parse", "1"]);
    assert_eq!(v["constant"], true);
}

#[test]
fn solve_sop_and_esop_applications() {
    let v = json(&["solve", SOP]);
    assert_eq!(strings(&v["solutions"]), ["011", "100", "101", "110"]);
    assert_eq!(v["verified"], true);
    for key in [
        "success_probability",
        "approximation_ratio",
        "nfev",
        "p",
        "histogram",
        "gate_report",
        "seed",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let v = json(&["solve", ESOP]);
    assert_eq!(strings(&v["solutions"]), ["011", "101", "110"]);
}

#[test]
fn verify_sudoku_half_adder_and_tautology() {
    assert_eq!(strings(&json(&["verify", SUDOKU])), ["0110", "1001"]);
    let v = json(&["verify", HALF_ADDER, "--vars", "a0,a1,b0,b1"]);
    assert_eq!(strings(&v), ["1011", "1110", "1111"]);
    assert_eq!(strings(&json(&["verify", "a | ~a"])).len(), 2);
}

#[test]
fn hamiltonian_for_cube_list() {
    let v = json(&["hamiltonian", "--cubes", "~a~b~c ^ a~bc ^ bc"]);
    assert_eq!(
        strings(&v["hc"]["paulis"]),
        ["III", "ZII", "ZIZ", "ZZI", "ZZZ"]
    );
    let coeffs: Vec<f64> = v["hc"]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_f64().unwrap())
        .collect();
    assert_eq!(coeffs, [-0.5, 0.25, -0.25, -0.25, -0.25]);
    assert_eq!(strings(&v["hm"]["paulis"]), ["XII", "IXI", "IIX"]);
    let v = json(&["hamiltonian", "0"]);
    assert!(v["hc"]["paulis"].as_array().unwrap().is_empty());
}

#[test]
fn compile_sudoku_phase_oracle() {
    let v = json(&["compile", SUDOKU]);
    let row = &v["gate_report"]["phase_oracle"];
    assert_eq!(row["x"], 8);
    assert_eq!(row["mcz"]["4"], 2);
    assert_eq!(row["ancilla_qubits"], 0);
}

#[test]
fn json_output_is_byte_identical_under_fixed_seed() {
    for objective in ["exact", "sampled"] {
        let args = ["solve", ESOP, "--seed", "99", "--objective", objective];
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn input_may_come_from_a_file() {
    let path = std::env::temp_dir().join(format!("bhtqaoa_cli_{}.txt", std::process::id()));
    std::fs::write(&path, format!("{SUDOKU}\n")).unwrap();
    let v = json(&["verify", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(strings(&v), ["0110", "1001"]);
}

#[test]
fn exit_codes() {
    let out = run(&["parse", "a & (b"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte"));

    let out = run(&["compile", "~1 | a", "--no-fallback"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(run(&["compile", "~1 | a"]).status.code(), Some(0));

    let out = run(&["solve", "a & ~a"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no solutions"));

    assert_eq!(
        run(&["solve", "a ^ b", "--budget", "3"]).status.code(),
        Some(5)
    );
}
