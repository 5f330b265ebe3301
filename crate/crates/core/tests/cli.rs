use std::process::{Command, Output};

use serde_json::Value;

fn qplane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qplane"))
        .args(args)
        .output()
        .expect("spawn qplane")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let o = qplane(&full);
    (
        serde_json::from_str(&stdout(&o)).expect("valid json"),
        o.status.code().unwrap(),
    )
}

#[test]
fn normalize_both_modes() {
    let o = qplane(&["normalize", "y*x"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(-1 - j) * x*y");
    let o = qplane(&["--q-mode", "symbolic", "normalize", "y*x"]);
    assert_eq!(stdout(&o).trim(), "q^-1 * x*y");
}

#[test]
fn strategies_agree_on_output() {
    let l = qplane(&["normalize", "dy*y*x*dx*d2y", "--strategy", "leftmost"]);
    let r = qplane(&["normalize", "dy*y*x*dx*d2y", "--strategy", "rightmost"]);
    assert_eq!(stdout(&l), stdout(&r));
}

#[test]
fn differential_and_grade() {
    assert_eq!(stdout(&qplane(&["d", "x*y", "--times", "3"])).trim(), "0");
    assert_eq!(stdout(&qplane(&["d", "x^-1"])).trim(), "-j * dx*x^-1*x^-1");
    assert_eq!(stdout(&qplane(&["grade", "dx*d2y"])).trim(), "0");
    assert_eq!(stdout(&qplane(&["grade", "x*dx"])).trim(), "1");
}

#[test]
fn coproduct_action_pairing() {
    assert_eq!(
        stdout(&qplane(&["coproduct", "H", "--map", "op"])).trim(),
        "H (x) 1 + q^-N (x) H"
    );
    assert_eq!(stdout(&qplane(&["pair", "B", "y*x"])).trim(), "-1 - j");
    assert_eq!(
        stdout(&qplane(&["act", "x^2*y", "--op", "day"])).trim(),
        "x*x"
    );
}

#[test]
fn json_report_schema() {
    let (v, code) = json(&["verify", "complex"]);
    assert_eq!(code, 0);
    assert_eq!(v["suite"], "complex");
    assert_eq!(v["config"]["q_mode"], "specialized");
    for key in ["max_degree", "window", "tensor_twist", "seed"] {
        assert!(!v["config"][key].is_null(), "missing config.{key}");
    }
    let items = v["items"].as_array().unwrap();
    assert!(!items.is_empty());
    for it in items {
        for key in ["id", "paper_eq", "status", "residual"] {
            assert!(it[key].is_string(), "item missing {key}: {it}");
        }
        assert_eq!(it["status"], "pass");
    }
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["pass"].as_u64().unwrap() as usize, items.len());
}

#[test]
fn failing_suite_exits_one() {
    let (v, code) = json(&["--q-mode", "symbolic", "verify", "complex"]);
    assert_eq!(code, 1);
    assert!(v["summary"]["fail"].as_u64().unwrap() > 0);
    let dz3 = v["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|it| it["id"] == "dz^3")
        .unwrap();
    assert_eq!(dz3["status"], "fail");
    assert_ne!(dz3["residual"], "0");
}

#[test]
fn errors_exit_two() {
    let (v, code) = json(&["normalize", "x**"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("parse"));
    let o = qplane(&["normalize", "x*dtheta"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(qplane(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        qplane(&["solve-coefficients", "--set", "Z=1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn solve_coefficients_override_is_inconsistent() {
    let o = qplane(&["solve-coefficients"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("F = q"));
    let o = qplane(&["solve-coefficients", "--set", "F=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dumped_rules_round_trip_and_corruption_is_detected() {
    let dir = std::env::temp_dir().join(format!("qplane-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let dump = stdout(&qplane(&["dump-rules", "--system", "main"]));
    let good = dir.join("main.json");
    std::fs::write(&good, &dump).unwrap();
    let o = qplane(&["verify", "confluence", "--rules", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    // Change the y*x coefficient: the overlaps with y*x^-1 and x*x^-1 no longer join.
    let mut v: Value = serde_json::from_str(&dump).unwrap();
    let rules = v["rules"].as_array_mut().unwrap();
    let yx = rules
        .iter_mut()
        .find(|r| r["lhs"] == serde_json::json!(["y", "x"]))
        .unwrap();
    yx["rhs"][0]["coeff"] = "2".into();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let (report, code) = json(&["verify", "confluence", "--rules", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    let cp = report["items"]
        .as_array()
        .unwrap()
        .iter()
        .find(|it| it["id"] == "main/critical-pairs")
        .unwrap();
    assert_eq!(cp["status"], "fail");

    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        qplane(&["verify", "confluence", "--rules", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tensor_twist_off_breaks_omega_hopf() {
    let (on, code_on) = json(&["--window", "3", "verify", "hopf"]);
    assert_eq!(code_on, 0, "{on}");
    let (off, code_off) = json(&["--window", "3", "--tensor-twist", "off", "verify", "hopf"]);
    assert_eq!(code_off, 1);
    assert!(off["summary"]["fail"].as_u64().unwrap() > 0);
}
