use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn graf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graf")).args(args).env_remove("GRAF_MAX_DIM").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}\nstdout: {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graf-cli-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn check_algebra_single_signature() {
    let out = graf(&["check-algebra", "--signature", "2,1", "--trials", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["signatures"].as_array().unwrap().len(), 1);
}

#[test]
fn malformed_signature_is_a_usage_error() {
    for bad in ["x", "3", "1,2,3", "-1,2"] {
        let out = graf(&["verify-fierz", "--signature", bad]);
        assert_eq!(code(&out), 2, "{bad}");
    }
    assert_eq!(code(&graf(&["no-such-command"])), 2);
}

#[test]
fn dimension_cap_from_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_graf"))
            .args(["build-rep", "--signature", "3,2"])
            .env("GRAF_MAX_DIM", cap)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("4")), 2);
    assert_eq!(code(&run("40")), 2);
    assert_eq!(code(&run("five")), 2);
    assert_eq!(code(&run("5")), 0);
}

#[test]
fn build_rep_lists_pairings() {
    let out = graf(&["build-rep", "--signature", "1,2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let pairings = v["admissible_pairings"].as_array().unwrap();
    assert_eq!(pairings.len(), 4);
    assert!(pairings.iter().all(|p| p["pairing_hash"].as_str().unwrap().len() == 64));
}

#[test]
fn verify_fierz_in_nine_dimensions_flags_printed_forms() {
    let out = graf(&["verify-fierz", "--signature", "9,0", "--trials", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["oracle_pass"], true);
    let flagged: Vec<&str> = v["flagged"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(flagged.contains(&"unit-coefficient-identity"));
    assert!(!flagged.contains(&"lifted-identity"));
}

#[test]
fn zero_pinor_is_class_seven() {
    let path = scratch("zero.json", &serde_json::to_string(&vec![0; 16]).unwrap());
    let out = graf(&["classify", "--signature", "9,0", "--spinor", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["class_index"], 7);
    let prov = &v["provenance"];
    for key in ["tool_version", "signature", "metric", "volume_sign", "pairing_hash", "seed"] {
        assert!(!prov[key].is_null(), "missing {key}");
    }
}

#[test]
fn basis_pinor_has_nonzero_scalar() {
    let mut e = vec![0; 16];
    e[0] = 1;
    let path = scratch("basis.json", &serde_json::to_string(&e).unwrap());
    let out = graf(&["classify", "--signature", "9,0", "--spinor", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!([2, 3, 6, 8].contains(&json(&out)["class_index"].as_i64().unwrap()));
}

#[test]
fn lorentzian_spinor_needs_projection() {
    let path = scratch("s4.json", r#"["1/2", 3, 0, -1]"#);
    let p = path.to_str().unwrap();
    assert_eq!(code(&graf(&["classify", "--signature", "1,2", "--spinor", p])), 2);
    let out = graf(&["classify", "--signature", "1,2", "--spinor", p, "--project"]);
    assert_eq!(code(&out), 0);
    assert!([1, 3].contains(&json(&out)["class_index"].as_i64().unwrap()));
}

#[test]
fn injected_covariants() {
    let scalar_only = scratch("scalar.json", r#"{"psi0": "1"}"#);
    assert_eq!(code(&graf(&["classify", "--signature", "9,0", "--covariants", scalar_only.to_str().unwrap()])), 1);

    let null = scratch("null12.json", r#"{"phi2": "1*e{1,2} + 1*e{2,3}"}"#);
    let out = graf(&["classify", "--signature", "1,2", "--covariants", null.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["class_index"], 3);
    assert_eq!(v["injected"], true);

    let stray = scratch("stray.json", r#"{"psi4": "1*e{1,2}"}"#);
    assert_eq!(code(&graf(&["classify", "--signature", "9,0", "--covariants", stray.to_str().unwrap()])), 2);
}

#[test]
fn census_is_reproducible() {
    let args = ["census", "--signature", "1,2", "--samples", "60", "--seed", "11"];
    let a = graf(&args);
    let b = graf(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    for p in v["populations"].as_array().unwrap() {
        let total: u64 = p["classes"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).sum();
        assert_eq!(total + p["refused"].as_u64().unwrap(), 60);
    }
}

#[test]
fn census_edge_cases() {
    let out = graf(&["census", "--signature", "9,0", "--samples", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["samples"], 0);
    assert_eq!(code(&graf(&["census", "--signature", "2,1", "--samples", "1"])), 2);
    assert_eq!(code(&graf(&["census", "--signature", "1,2", "--volume-sign", "-", "--samples", "1"])), 2);
}

#[test]
fn appendix_check_signature() {
    let out = graf(&["appendix-check", "--trials", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["expansions"].as_array().unwrap().len(), 12);
    assert_eq!(code(&graf(&["appendix-check", "--signature", "1,2"])), 2);
}

#[test]
fn text_output_to_file() {
    let path = std::env::temp_dir().join(format!("graf-cli-out-{}.txt", std::process::id()));
    let out = graf(&["build-rep", "--signature", "2,0", "--format", "text", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("admissible_pairings:"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
    std::fs::remove_file(path).unwrap();
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let out = graf(&["classify", "--signature", "9,0", "--spinor", "/nonexistent/graf.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}
