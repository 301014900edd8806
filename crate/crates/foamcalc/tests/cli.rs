//! End-to-end checks of the command-line binary: output schemas, exit
//! codes, and byte-identical output across thread counts.

use std::process::Command;

fn foamcalc(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_foamcalc"))
        .args(args)
        .env_remove("FOAMCALC_THREADS")
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn unknot_homology_json_schema() {
    let (stdout, _, code) = foamcalc(&[
        "homology", "--pd", "U1", "--a", "0", "--h", "0", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["mode"], "graded");
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["i"], 0);
    assert_eq!(entries[0]["j"], -1);
    assert_eq!(entries[0]["rank"], 1);
    assert_eq!(entries[1]["j"], 1);
    assert_eq!(entries[1]["rank"], 1);
}

#[test]
fn surface_genus_one_prints_two() {
    let (stdout, _, code) = foamcalc(&["surface", "--genus", "1"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "2");
}

#[test]
fn foam_eval_values() {
    let (stdout, _, code) = foamcalc(&["foam-eval", "--genus", "3"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "2*h^2 + 8*a");
    let (dotted, _, _) = foamcalc(&["foam-eval", "--genus", "0", "--dots", "1"]);
    assert_eq!(dotted.trim(), "1");
}

#[test]
fn euler_agrees_with_skein() {
    for args in [
        ["--braid", "s1 s1 s1", "--strands", "2"],
        ["--braid", "s1 s2^-1 s1 s2^-1", "--strands", "3"],
        ["--pd", "X+(1,2,3,4) X+(4,3,2,1)", "--strands", "2"],
    ] {
        let mut euler = vec!["euler"];
        euler.extend_from_slice(&args[..if args[0] == "--pd" { 2 } else { 4 }]);
        let mut skein = vec!["skein"];
        skein.extend_from_slice(&args[..if args[0] == "--pd" { 2 } else { 4 }]);
        let (e, _, ec) = foamcalc(&euler);
        let (s, _, sc) = foamcalc(&skein);
        assert_eq!((ec, sc), (0, 0));
        assert_eq!(e, s);
    }
}

#[test]
fn colorings_reject_repeated_root_with_exit_two() {
    let (_, stderr, code) = foamcalc(&["colorings", "--pd", "U1", "--a=-1/4", "--h", "1"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("repeated root"), "stderr: {stderr}");
}

#[test]
fn invariance_check_pass_and_fail() {
    let (stdout, _, code) = foamcalc(&[
        "invariance-check",
        "--pd",
        "U1",
        "--braid2",
        "s1",
        "--strands2",
        "2",
        "--a",
        "0",
        "--h",
        "0",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("pass"));

    let (_, stderr, code) = foamcalc(&[
        "invariance-check",
        "--pd",
        "U1",
        "--braid2",
        "s1 s1",
        "--strands2",
        "2",
        "--a",
        "1",
        "--h",
        "0",
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("fail"));
}

#[test]
fn parse_error_reports_position_and_exits_two() {
    let (_, stderr, code) = foamcalc(&["skein", "--pd", "X+(1,2,3"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("column"), "stderr: {stderr}");
}

#[test]
fn identical_output_across_thread_counts() {
    let base = [
        "homology",
        "--braid",
        "s1 s2^-1 s1 s2^-1",
        "--strands",
        "3",
        "--a",
        "1",
        "--h",
        "0",
        "--format",
        "json",
    ];
    let mut one = base.to_vec();
    one.extend_from_slice(&["--threads", "1"]);
    let mut many = base.to_vec();
    many.extend_from_slice(&["--threads", "4"]);
    let (out1, _, c1) = foamcalc(&one);
    let (out4, _, c4) = foamcalc(&many);
    assert_eq!((c1, c4), (0, 0));
    assert_eq!(out1, out4);
}

#[test]
fn threads_env_var_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_foamcalc"))
        .args(["euler", "--pd", "U1"])
        .env("FOAMCALC_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "q^-1 + q");
}
