use std::process::Command;

fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_stablefrac"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
        .output()
        .expect("binary runs");
    (String::from_utf8(out.stdout).unwrap().trim().to_string(), out.status.code().unwrap())
}

#[test]
fn threshold_single_branch() {
    let (out, code) = run(&["threshold", "--model", r#"{"branches":[{"L":1,"q":[1]}]}"#, "--Q", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, r#"{"p_star":"3/2","open":true}"#);
    let (out, _) = run(&["threshold", "--P", "y+x+2*i*x^2", "--Q", "x"]);
    assert_eq!(out, r#"{"p_star":"3","open":true}"#);
}

#[test]
fn dims_from_model_file() {
    assert_eq!(run(&["dims", "--model", "models/pexample.json", "--p", "3"]), ("7".to_string(), 0));
    let (out, _) = run(&["dims", "--model", "models/pexample.json", "--p", "inf,2"]);
    assert_eq!(out, r#"[{"dim":4,"p":"inf"},{"dim":11,"p":"2"}]"#);
}

#[test]
fn disk_first_order_condition() {
    let (out, code) = run(&["analyze", "--disk", "2-z-w", "--Q", "1-z", "--p", "2,3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["reports"][0]["verdict"], "member");
    assert_eq!(v["reports"][1]["verdict"], "non_member");
}

#[test]
fn transfer_output() {
    let (out, _) = run(&["transfer", "--disk", "1-z*w"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["bidegree"], serde_json::json!([1, 1]));
    assert_eq!(v["vanishes_at_center"], true);
}

#[test]
fn basis_and_proper_t() {
    let (out, _) = run(&["basis", "--model", "models/pexample.json", "--p", "inf"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["dim"], 4);
    assert_eq!(v["bounds"], serde_json::json!([[2, 5], [6, 7], [10, 10]]));
    let (out, code) = run(&["proper-t", "--model", "models/exex.json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["t"], "1");
}

#[test]
fn numeric_and_quadrature() {
    let (out, code) = run(&["verify-numeric", "--P", "y+x+2*i*x^2", "--p", "2", "--k1", "12"]);
    assert_eq!(code, 0);
    assert!(out.contains(r#""verdict":"diverges""#));
    // exactly at the threshold the slope vanishes and no verdict is given
    let (_, code) = run(&["verify-numeric", "--P", "y+x+2*i*x^2", "--p", "3/2", "--k1", "12"]);
    assert_eq!(code, 2);
    let (out, code) = run(&["quadrature-check", "--poly", "(y+i)^2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["quadrature"]["weights"], serde_json::json!([0.25, 0.25]));
    assert_eq!(v["parseval"]["pass"], true);
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(run(&["dims", "--model", "missing.json", "--p", "3"]).1, 3);
    assert_eq!(run(&["analyze", "--P", "y+x+"]).1, 3);
    assert_eq!(run(&["analyze", "--P", "y-i*x^2"]).1, 3);
    assert_eq!(run(&["dims", "--model", "models/pexample.json", "--p", "1/2"]).1, 3);
    assert_eq!(run(&["frobnicate"]).1, 3);
    assert_eq!(run(&["quadrature-check", "--poly", "y-i"]).1, 3);
}

#[test]
fn output_is_deterministic() {
    let args = ["analyze", "--model", "models/pexample.json", "--Q", "x^2*y", "--p", "5/4,3,inf"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn selftest_subset() {
    let (out, code) = run(&["selftest", "--only", "2,6"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}
