use assert_cmd::Command;
use serde_json::Value;

fn sqalg() -> Command {
    let mut c = Command::cargo_bin("sqalg").unwrap();
    c.env_remove("SQALG_CAPS");
    c
}

fn stdout(args: &[&str]) -> String {
    let out = sqalg().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    sqalg().args(args).output().unwrap().status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = vec!["--format", "json"];
    a.extend_from_slice(args);
    let out = sqalg().args(&a).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    validate(&v);
    v
}

fn validate(v: &Value) {
    let schema: Value = serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("schema violations: {msgs:?}\n{v}");
    };
}

#[test]
fn adem_normalizes() {
    assert_eq!(stdout(&["adem", "Sq[1,2]"]), "Sq[3]\n");
    assert_eq!(stdout(&["adem", "Sq[2,2]"]), "Sq[3,1]\n");
    assert_eq!(stdout(&["adem", "Sq[2,2,2]"]), "Sq[5,1]\n");
}

#[test]
fn products_coproducts_antipode() {
    assert_eq!(stdout(&["mul", "Sq[2]", "Sq[2]"]), "Sq[3,1]\n");
    assert_eq!(stdout(&["coprod", "Sq[2]"]), "1 ⊗ Sq[2] + Sq[1] ⊗ Sq[1] + Sq[2] ⊗ 1\n");
    assert_eq!(stdout(&["antipode", "Sq[3]"]), "Sq[2,1]\n");
}

#[test]
fn pairing_and_milnor() {
    assert_eq!(stdout(&["pair", "xi[0,1]", "Sq[2,1]"]), "1\n");
    assert_eq!(stdout(&["pair", "xi[0,1]", "Sq[3]"]), "0\n");
    assert_eq!(stdout(&["pair", "xi[3]", "Sq[2,1]"]), "1\n");
    assert_eq!(stdout(&["milnor", "Sq[2,1]"]), "SqM(3) + SqM(0,1)\n");
    assert_eq!(stdout(&["milnor", "Q1"]), "SqM(0,1)\n");
}

#[test]
fn a1_basis_has_eight_elements() {
    let v = json(&["basis", "--sub", "A1"]);
    assert_eq!(v["result"]["count"], 8);
    assert_eq!(stdout(&["basis", "4"]), "Sq[4]\nSq[3,1]\n");
}

#[test]
fn action_on_presets() {
    assert_eq!(stdout(&["sq", "--preset", "bsu3", "--k", "2", "--expr", "y4"]), "y6\n");
    assert_eq!(stdout(&["sq", "--space", "BSpin", "--k", "2", "--expr", "w4"]), "w6\n");
    assert_eq!(stdout(&["sq", "--preset", "bpsp3", "--k", "1", "--expr", "t2*t12"]), "t3*t12\n");
}

#[test]
fn transfers() {
    assert_eq!(stdout(&["transfer", "--bundle", "cp2", "--expr", "x2^2"]), "1\n");
    assert_eq!(stdout(&["transfer", "--bundle", "cp2", "--expr", "x4"]), "1\n");
    assert_eq!(stdout(&["transfer", "--bundle", "cp2", "--expr", "x4^2"]), "y4\n");
    assert_eq!(stdout(&["transfer", "--bundle", "cp2", "--expr", "x2"]), "0\n");
}

#[test]
fn module_commands() {
    assert_eq!(stdout(&["module-type", "--family", "J", "--restrict", "--algebra", "e1"]), "Σ^2 Z2 + E(1)\n");
    assert_eq!(stdout(&["margolis", "--family", "A1"]), "0\n");
    let v = json(&["split-check", "--source", "J", "--shift", "2", "--target", "A1", "--image", "Sq[2]"]);
    assert_eq!(v["result"]["split_guaranteed"], false);
    assert_eq!(v["result"]["witness_degree"], 4);
    let dot = stdout(&["module-type", "--family", "J", "--format", "dot"]);
    assert!(dot.starts_with("digraph"));
}

#[test]
fn primitives_table() {
    let v = json(&["primitives", "--space", "BSpin", "--max", "20"]);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r["verified"] == true));
    let dims: Vec<u64> = rows.iter().map(|r| r["dimension"].as_u64().unwrap()).collect();
    assert_eq!(dims[..8], [0, 0, 0, 1, 0, 1, 1, 1]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&["adem", ""]), 2);
    assert_eq!(code(&["adem", "Sq[1,"]), 2);
    assert_eq!(code(&["pair", "xi[", "Sq[1]"]), 2);
    assert_eq!(code(&["sq", "--preset", "nope", "--k", "1", "--expr", "x"]), 2);
    assert_eq!(code(&["verify-paper", "--suite", "nope"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    let out = sqalg().args(["adem", ""]).output().unwrap();
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn verify_exit_codes() {
    assert_eq!(code(&["verify-paper", "--suite", "steenrod-hopf", "--max", "6"]), 0);
    // The degree-6 class is not detected by either transfer leg, so this suite fails.
    assert_eq!(code(&["verify-paper", "--suite", "lemma37", "--max", "8"]), 1);
}

#[test]
fn appendix_c_at_larger_exponents() {
    let out = stdout(&["verify-paper", "--suite", "appendixC", "--max", "20"]);
    assert!(out.contains("[pass] pi_! base case, exponents <= 20"), "{out}");
    assert!(out.contains("0 fail"));
}

#[test]
fn verify_json_and_caps() {
    let v = json(&["verify-paper", "--suite", "appendixA,hp2-transfer"]);
    let suites = v["result"]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 2);
    assert_eq!(suites[0]["suite"], "appendixA");
    assert_eq!(v["result"]["fail"], 0);
    let out = sqalg().env("SQALG_CAPS", "steenrod-hopf=5").args(["--format", "json", "verify-paper", "--suite", "steenrod-hopf"]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["suites"][0]["max"], 5);
}

#[test]
fn every_command_validates_against_schema() {
    for args in [
        &["adem", "Sq[3,2]"][..],
        &["mul", "Sq[1]", "Sq[2]"],
        &["coprod", "Sq[2,1]"],
        &["antipode", "Sq[4]"],
        &["pair", "xi1^2", "Sq[2]"],
        &["milnor", "Sq[4,2]"],
        &["basis", "6"],
        &["sq", "--preset", "bu3", "--k", "2", "--expr", "c2"],
        &["module-type", "--family", "K"],
        &["margolis", "--family", "J", "--q", "q1"],
        &["transfer", "--bundle", "hp2", "--expr", "u4^2"],
    ] {
        let v = json(args);
        assert_eq!(v["command"], args[0]);
    }
}

#[test]
fn output_is_deterministic() {
    for args in [&["verify-paper", "--suite", "appendixA"][..], &["primitives", "--space", "BSpinc", "--max", "24"], &["module-type", "--preset", "bsu3", "--algebra", "e1", "--max", "20"]] {
        assert_eq!(stdout(args), stdout(args));
    }
}
