use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cantor_core::{BitFunctional, FiniteSupportPermutation, RecoveryInstance, TestStage};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn cantor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantor"))
        .args(args)
        .output()
        .expect("spawn cantor")
}

fn f(name: &str) -> String {
    fixture(name).display().to_string()
}

/// Report and exit code, with the timing field dropped.
fn run(args: &[&str]) -> (Value, i32) {
    let out = cantor(args);
    let code = out.status.code().expect("exit code");
    if code == 2 {
        return (Value::Null, code);
    }
    let mut report: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad report ({e}): {}", String::from_utf8_lossy(&out.stderr)));
    report.as_object_mut().unwrap().remove("elapsed_ms");
    (report, code)
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name} in {report}"))
}

#[test]
fn measure_examples() {
    let (r, code) = run(&["measure", &f("one.txt"), "--poly"]);
    assert_eq!(code, 0);
    assert_eq!(check(&r, "measure_poly")["value"], serde_json::json!([0, 1]));

    let (r, _) = run(&["measure", &f("zero_one.txt"), "--p", "1/2"]);
    assert_eq!(check(&r, "measure")["value"]["measure"], "1/4");

    let (r, _) = run(&["measure", &f("four_cylinders.txt"), "--poly", "--p", "2/7"]);
    assert_eq!(check(&r, "measure_poly")["value"], serde_json::json!([0, 1]));
    assert_eq!(check(&r, "measure")["value"]["measure"], "2/7");
}

#[test]
fn measure_parse_error_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "01\n# fine\n0x1\n").unwrap();
    let out = cantor(&["measure", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn certify_blockcode_examples() {
    let (r, code) = run(&["certify-blockcode", &f("identity_code.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["preserves_all_bernoulli"], true);
    assert_eq!(r["output"]["induced_by_coordinate_permutation"]["map"], serde_json::json!([0, 1, 2]));

    let (r, code) = run(&["certify-blockcode", &f("swap_code.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["preserves_all_bernoulli"], true);
    assert!(r["output"]["induced_by_coordinate_permutation"].is_null());

    let (r, code) = run(&["certify-blockcode", &f("weight_breaking_code.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["preserves_all_bernoulli"], false);
    assert!(r["output"]["induced_by_coordinate_permutation"].is_null());

    let (r, _) = run(&["certify-blockcode", &f("rotation_code.json")]);
    assert_eq!(r["output"]["induced_by_coordinate_permutation"]["map"], serde_json::json!([1, 2, 0]));
}

#[test]
fn transport_identity_keeps_levels() {
    let text = std::fs::read_to_string(fixture("stage_mixed.json")).unwrap();
    let stage = TestStage::from_json(&text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("moved.json");
    let (r, code) = run(&[
        "transport",
        &f("stage_mixed.json"),
        &f("identity3.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{r}");
    let moved = TestStage::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(moved.to_json(), stage.to_json());
}

#[test]
fn transport_swap_moves_cylinder() {
    let (r, code) = run(&["transport", &f("stage_10.json"), &f("swap01.json")]);
    assert_eq!(code, 0);
    let moved = TestStage::from_json(&r["output"].to_string()).unwrap();
    assert_eq!(moved.levels[0].antichain(), vec!["01".parse().unwrap()]);
}

#[test]
fn transport_regression_fixture_all_equal() {
    let (r, code) = run(&["transport", &f("stage_mixed.json"), &f("perm6.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["pass"], true);
    assert_eq!(r["results"].as_array().unwrap().len(), 6);
}

#[test]
fn transport_rejects_invalid_stage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // level 1 needs measure at most 1/2
    std::fs::write(&path, r#"{"p":"1/2","levels":[{"cylinders":[{}]},{"cylinders":[{}]}]}"#).unwrap();
    let out = cantor(&["transport", path.to_str().unwrap(), &f("swap01.json")]);
    assert_eq!(out.status.code(), Some(2));
}

fn synthesize(extra: &[&str]) -> (Value, i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst.json");
    let mut args = vec!["synthesize".to_owned(), f("perm6.json")];
    args.extend(extra.iter().map(|s| s.to_string()));
    args.extend(["--out".to_owned(), out.display().to_string()]);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let (mut r, code) = run(&args);
    if let Some(obj) = r.as_object_mut() {
        obj.remove("output");
    }
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (r, code, text)
}

#[test]
fn synthesize_mass_zero_is_exact_tabulation() {
    let (_, code, text) = synthesize(&["--sigma", "01", "--depth", "10", "--mass", "0", "--seed", "1"]);
    assert_eq!(code, 0);
    let inst = RecoveryInstance::from_json(&text).unwrap();
    let perm: FiniteSupportPermutation =
        serde_json::from_str(&std::fs::read_to_string(fixture("perm6.json")).unwrap()).unwrap();
    assert_eq!(inst.phi, BitFunctional::tabulate_pullback(&perm, 10, 6).unwrap());
}

#[test]
fn synthesize_fixed_seed_matches_golden_instance() {
    let args = ["--sigma", "01", "--depth", "10", "--mass", "3/100", "--seed", "42"];
    let (a, _, text_a) = synthesize(&args);
    let (b, _, text_b) = synthesize(&args);
    assert_eq!(a, b);
    assert_eq!(text_a, text_b);
    assert_eq!(text_a, std::fs::read_to_string(fixture("instance_seed42.json")).unwrap());
}

#[test]
fn synthesize_counts_corrupted_extensions() {
    let (r, code, _) = synthesize(&["--sigma", "01", "--depth", "10", "--mass", "1/32", "--seed", "5"]);
    assert_eq!(code, 0);
    assert_eq!(check(&r, "corrupted extensions")["value"]["corrupted"], 8);
}

#[test]
fn synthesize_refuses_mass_above_promise() {
    let (_, code, _) = synthesize(&["--depth", "8", "--mass", "1/10", "--seed", "1"]);
    assert_eq!(code, 2);
    let (_, code, _) = synthesize(&["--depth", "8", "--mass", "1/10", "--seed", "1", "--below-promise"]);
    assert_eq!(code, 0);
}

#[test]
fn recover_exact_instance_has_full_margins() {
    let (r, code) = run(&["recover", &f("instance_exact.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["table"], serde_json::json!([1, 3, 5, 0, 4, 2]));
    for n in 0..6 {
        let scan = &check(&r, &format!("n={n} unique candidate"))["value"];
        for c in scan["candidates"].as_array().unwrap() {
            let want = if c["accepted"] == true { "1/1" } else { "0/1" };
            assert_eq!(c["measure"], want);
        }
    }
}

#[test]
fn recover_seed42_matches_golden_reports() {
    let golden = |name: &str| -> Value {
        serde_json::from_str(&std::fs::read_to_string(fixture(&format!("golden/{name}"))).unwrap()).unwrap()
    };
    let inst = f("instance_seed42.json");
    let (r, code) = run(&["recover", &inst]);
    assert_eq!(code, 0);
    assert_eq!(r, golden("recover_seed42.json"));
    let (r, code) = run(&["recover", &inst, "--mode", "mc", "--samples", "4000", "--seed", "9"]);
    assert_eq!(code, 0);
    assert_eq!(r, golden("recover_seed42_mc.json"));
}

#[test]
fn recover_below_promise_fails() {
    let (r, code) = run(&["recover", &f("instance_below_promise.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["pass"], false);
    assert_eq!(check(&r, "matches expected inverse")["pass"], false);
}

#[test]
fn recover_window_and_p_flags() {
    let (r, code) = run(&["recover", &f("instance_exact.json"), "--window", "3", "--p", "1/3"]);
    assert_eq!(code, 0);
    assert_eq!(r["output"]["table"], serde_json::json!([1, 3, 5]));
    assert!(!r["warnings"].as_array().unwrap().is_empty());
    let out = cantor(&["recover", &f("instance_exact.json"), "--window", "11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let runs: [&[&str]; 4] = [
        &["measure", &f("four_cylinders.txt"), "--poly"],
        &["transport", &f("stage_mixed.json"), &f("perm6.json")],
        &["certify-blockcode", &f("swap_code.json")],
        &["recover", &f("instance_seed42.json"), "--mode", "mc", "--samples", "2000", "--seed", "3"],
    ];
    for args in runs {
        let (a, _) = run(args);
        let (b, _) = run(args);
        assert_eq!(a, b, "{args:?}");
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), a);
    }
}

#[test]
fn report_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = cantor(&["certify-blockcode", &f("swap_code.json"), "--report", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["command"], "certify-blockcode");
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
}
