//! Black-box checks of the command-line driver and its exit-code contract.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bvforms"))
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn parse_normalizes() {
    let out = bin().args(["parse", "dp1*dx1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "dx1*dp1\n");

    // The context is inferred from the largest index.
    let out = bin().args(["parse", "x3 + p1*dx3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "p1*dx3 + x3\n");
}

#[test]
fn parse_reports_positions() {
    let out = bin().args(["parse", "x1 + 3/0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("byte 7"), "stderr: {}", stderr(&out));
}

#[test]
fn apply_operators() {
    let out = bin()
        .args(["apply", "--op", "delta", "--n", "1", "x1^2*p1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "2*x1\n");

    let out = bin()
        .args(["apply", "--op", "d", "--n", "1", "p1*dx1"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out), "dx1*dp1\n");

    let out = bin()
        .args(["apply", "--op", "reduce", "--n", "1", "x1*dx1"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out), "x1\n");

    // Inverting at the top auxiliary degree is an invalid request.
    let out = bin()
        .args(["apply", "--op", "invert-omega", "--n", "1", "dx1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("top auxiliary degree"));
}

#[test]
fn pullback_through_a_map_file() {
    let path = std::env::temp_dir().join(format!("bvforms-map-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"n": 2, "xprime": ["x1", "x2 + x1^2"], "pprime": ["p1 - 2*x1*p2", "p2"]}"#,
    )
    .unwrap();
    let out = bin()
        .args(["pullback", "--map", path.to_str().unwrap(), "dx1*dx2"])
        .output()
        .unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "dx1*dx2\n");

    let out = bin()
        .args(["pullback", "--map", "/nonexistent/map.json", "x1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_passes_and_reports() {
    let out = bin().args(["check", "manin", "--n", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("pass"));

    let out = bin()
        .args(["check", "homotopy", "--n", "1", "--max-xdeg", "3", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["check", "nope", "--n", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["check", "d3", "--n", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("invalid parameters"));

    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
