use std::process::{Command, Output};

fn goldman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goldman")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap().trim().to_string()
}

fn ok(args: &[&str]) -> String {
    let out = goldman(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    stdout(&out)
}

#[test]
fn pairing_and_center() {
    assert_eq!(ok(&["pair", "--closed", "1", "a1^2 a2", "a1 a2^3"]), r#"{"value":"5"}"#);
    assert_eq!(ok(&["center", "--boundary", "1", "3"]), r#"{"generators":["a3","a4"]}"#);
    assert_eq!(ok(&["center", "--closed", "2"]), r#"{"generators":[]}"#);
    assert_eq!(ok(&["--format", "text", "pair", "--closed", "1", "a1", "a2"]), "1");
}

#[test]
fn bracket_of_words() {
    assert_eq!(
        ok(&["bracket", "--closed", "1", "a1^2 a2", "a1 a2^3"]),
        r#"{"ring":"Z","terms":[{"exp":[3,4],"coef":"5"}]}"#
    );
}

#[test]
fn ideal_check_verdicts_and_exit_codes() {
    let good = goldman(&["ideal-check", "--closed", "1", "--rule", "ik", "--K", "[(1,0)]", "--box", "6", "--seed", "3"]);
    assert_eq!(good.status.code(), Some(0));
    assert!(stdout(&good).starts_with(r#"{"verdict":true"#));

    let bad = goldman(&[
        "ideal-check", "--closed", "1", "--rule", "table", "--entry", "(1,0)=2", "--entry", "(1,1)=3",
        "--box", "10", "--samples", "10000", "--seed", "7",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(report["verdict"], false);
    assert!(report["counterexample"].is_object());

    let exhaustive = goldman(&["ideal-check", "--closed", "1", "--rule", "ik", "--box", "3", "--exhaustive"]);
    assert_eq!(exhaustive.status.code(), Some(0));
}

#[test]
fn closure_then_membership() {
    let gen = r#"{"ring":"Q","terms":[{"exp":[1,0,0],"coef":"1"},{"exp":[1,0,1],"coef":"3/2"}]}"#;
    let ideal = ok(&["ideal-closure", "--boundary", "1", "2", "--gen", gen]);
    let member = r#"{"ring":"Q","terms":[{"exp":[0,1,0],"coef":"2"},{"exp":[0,1,1],"coef":"3"}]}"#;
    assert_eq!(ok(&["ideal-member", "--ideal", &ideal, "--elem", member]), r#"{"verdict":true}"#);
    let outsider = r#"{"ring":"Q","terms":[{"exp":[0,1,0],"coef":"1"}]}"#;
    let out = goldman(&["ideal-member", "--ideal", &ideal, "--elem", outsider]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out), r#"{"verdict":false}"#);
}

#[test]
fn chain_commands() {
    assert_eq!(ok(&["chain-project", "--n", "1", "--c", "1", "a1^5"]), r#"{"word":"a1"}"#);
    assert_eq!(ok(&["chain-separate", "--c", "1", "--nmax", "10", "a1^8", ""]), r#"{"level":4}"#);
    let none = goldman(&["chain-separate", "--c", "1", "--nmax", "2", "a1^8", ""]);
    assert_eq!(none.status.code(), Some(1));
    let conj = goldman(&["chain-separate", "--c", "1", "--nmax", "4", "a1 a2", "a2 a1"]);
    assert_eq!(conj.status.code(), Some(2));
}

#[test]
fn ik_family_lists_sets() {
    let out: serde_json::Value = serde_json::from_str(&ok(&["ik-family", "--closed", "1", "--K", "[(1,0)]", "--count", "3"])).unwrap();
    assert_eq!(out["sets"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["pair", "--closed", "1", "--boundary", "1", "2", "a1", "a2"][..],
        &["pair", "--closed", "1", "a7", "a1"],
        &["ideal-check", "--closed", "1", "--rule", "ik", "--box", "4"],
        &["selftest"],
    ] {
        let out = goldman(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = goldman(&["pair", "--closed", "1", "a7", "a1"]);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].is_string());
}

#[test]
fn selftest_is_deterministic_and_catches_the_fault() {
    let a = goldman(&["selftest", "--seed", "5"]);
    let b = goldman(&["selftest", "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let faulty = goldman(&["selftest", "--seed", "5", "--inject-fault"]);
    assert_eq!(faulty.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&faulty.stdout).contains("jacobi"));
}
