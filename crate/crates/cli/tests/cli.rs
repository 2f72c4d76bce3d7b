use std::process::{Command, Output};

fn qweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qweyl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = qweyl(&full);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("json report"))
}

#[test]
fn orbit_table_for_a2() {
    let o = qweyl(&["orbit", "--type", "A2", "--node", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].contains("[0,-1]") && rows[2].ends_with("Psi[2,-3]^-1"), "{}", rows[2]);
}

#[test]
fn qq_verify_sl2_passes() {
    let (code, report) = json(&["qq-verify", "--type", "A1", "--height", "8"]);
    assert_eq!(code, 0);
    assert_eq!(report["status"], "pass");
    assert_eq!(report["config"]["height"], 8);
    assert!(report["tool_version"].is_string());
    let cases = report["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 2);
    for c in cases {
        assert_eq!(c["status"], "pass");
        assert_eq!(c["max_height"], 8);
        assert!(c.get("witness").is_none());
    }
}

#[test]
fn chi_of_g2_lowest_weight() {
    let o = qweyl(&["chi", "--type", "G2", "--weight=-w2", "--height", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(1 - a1^-1 a2^-3)^3"), "{text}");
    assert!(text.contains("(1 - a1^-2 a2^-3)^3"), "{text}");
    assert!(text.contains("misprint"));
}

#[test]
fn q_series_reports_closed_forms() {
    let (code, report) = json(&["q-series", "--type", "B2", "--weight=w1-2w2", "--height", "4"]);
    assert_eq!(code, 0);
    assert_eq!(report["cases"][0]["closed_form"]["status"], "agrees with the closed form");
    let (code, report) = json(&["q-series", "--type", "B2", "--weight=-w2", "--height", "3", "--shift", "5"]);
    assert_eq!(code, 0);
    assert!(report["cases"][0]["closed_form"]["status"].as_str().unwrap().contains("corrected range"));
}

#[test]
fn verification_commands_pass() {
    for args in [
        vec!["tq-verify", "--type", "A2", "--height", "3"],
        vec!["braid-check", "--type", "B2", "--seed", "11"],
        vec!["shifted-char", "--type", "B2", "--node", "2", "--weyl", "s2 s1", "--height", "3"],
        vec!["sigma", "--type", "G2", "--node", "2", "--shift", "-3", "--height", "5"],
        vec!["qq-verify", "--type", "G2", "--max-len", "2", "--height", "2"],
        vec!["qq-verify", "--type", "B2", "--weyl", "s1;s2 s1", "--node", "1", "--height", "3"],
    ] {
        let (code, report) = json(&args);
        assert_eq!(code, 0, "{args:?}: {report}");
        assert_eq!(report["status"], "pass");
    }
}

#[test]
fn theta_of_an_invariant_piece() {
    let o = qweyl(&["theta", "--type", "A1", "--weyl", "s1", "--poly", "Y[1,0] + Y[1,2]^-1", "--height", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("h=0: 1 * Y[1,0]^1") && text.contains("h=1: 1 * Y[1,2]^-1"), "{text}");
    assert!(!text.contains("h=2"));
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let a = qweyl(&["qq-verify", "--type", "B2", "--height", "3", "--jobs", "1"]);
    let b = qweyl(&["qq-verify", "--type", "B2", "--height", "3", "--jobs", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = qweyl(&["braid-check", "--type", "G2", "--seed", "5", "--format", "json"]);
    let d = qweyl(&["braid-check", "--type", "G2", "--seed", "5", "--format", "json"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn matrix_file_input() {
    let dir = std::env::temp_dir().join(format!("qweyl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("b2.json");
    std::fs::write(&path, "[[2,-1],[-2,2]]").unwrap();
    let o = qweyl(&["orbit", "--matrix", path.to_str().unwrap(), "--node", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["frobnicate"],
        vec!["orbit", "--type", "A2", "--height", "x"],
        vec!["orbit", "--type", "Q7"],
        vec!["chi", "--type", "A2", "--weight=w1+w2"],
        vec!["q-series", "--type", "A2", "--node", "1", "--weyl", "s1 s1"],
        vec!["orbit", "--node", "1"],
    ] {
        assert_eq!(qweyl(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn runtime_failure_exits_1() {
    let o = qweyl(&["sigma", "--type", "A2", "--node", "1", "--branch", "si"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("component"));
}
