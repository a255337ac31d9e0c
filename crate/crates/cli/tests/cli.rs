use std::process::{Command, Output};

fn malle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_malle"))
        .args(args)
        .output()
        .expect("spawn malle")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn assert_round_trips(out: &Output) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let again = format!("{}\n", serde_json::to_string_pretty(&v).unwrap());
    assert_eq!(text, again);
}

#[test]
fn index_natural_13() {
    let out = malle(&[
        "index", "--ell", "13", "--rep", "natural", "--group", "GL2", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["malle_ind"], 78);
    assert_eq!(
        v["lower_exponent"],
        serde_json::json!({"num": 1, "den": 288})
    );
    assert_round_trips(&out);
}

#[test]
fn surjective_cm_curve_not_certified() {
    let out = malle(&[
        "surjective",
        "--A",
        "0",
        "--B",
        "1",
        "--ell",
        "13",
        "--budget",
        "10000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "not_certified");
    assert!(v["missing"].as_array().unwrap().contains(&"W2".into()));
    assert_round_trips(&out);
}

#[test]
fn surjective_1_1_certified() {
    let out = malle(&["surjective", "--A", "1", "--B", "1", "--ell", "13"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["status"], "certified");
    assert_eq!(v["witnesses"]["W2"], 5);
    assert_eq!(v["witnesses"]["W3"], 5);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["index", "--ell", "4", "--rep", "natural"][..],
        &["index", "--ell", "13", "--rep", "nope"],
        &["index", "--ell", "13"],
        &["index", "--ell", "13", "--rep", "natural", "--bogus", "1"],
        &["sieve", "--A", "1", "--b-min", "1"],
        &[
            "family", "--ell", "13", "--A", "1", "--b-max", "5", "--x-grid", "10^x",
        ],
        &[
            "frobenius",
            "--A",
            "1",
            "--B",
            "1",
            "--ell",
            "13",
            "--format",
            "xml",
        ],
        &["selfcheck", "--threads", "0"],
    ] {
        let out = malle(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_1() {
    for args in [
        &["surjective", "--A", "0", "--B", "0", "--ell", "13"][..],
        &[
            "family", "--ell", "13", "--A", "0", "--b-max", "5", "--x-grid", "10^9",
        ],
        &["sieve", "--A", "1", "--b-min", "5", "--b-max", "1"],
        &["surjective", "--A", "1", "--B", "1", "--ell", "3"],
        &["index", "--ell", "2", "--rep", "coset:nonsplit-normalizer"],
    ] {
        let out = malle(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).starts_with("error:"),
            "{args:?}"
        );
    }
}

#[test]
fn selfcheck_passes() {
    let out = malle(&["selfcheck"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let checks = v.as_array().unwrap();
    assert_eq!(checks.len(), 26);
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn exponent_is_index_all_reps() {
    let a = malle(&["exponent", "--ell", "7"]);
    let b = malle(&["index", "--ell", "7", "--all-reps"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    let kinds: Vec<_> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["kind"].clone())
        .collect();
    assert_eq!(kinds, ["natural", "projective", "regular"]);
    assert_round_trips(&a);
}

#[test]
fn negative_arguments_parse() {
    let out = malle(&[
        "sieve", "--A", "-1", "--b-min", "-3", "--b-max", "3", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("B,delta_f,squarefree\n-3,239,1\n"));
}

#[test]
fn frobenius_first_sample() {
    let out = malle(&[
        "frobenius",
        "--A",
        "1",
        "--B",
        "1",
        "--ell",
        "13",
        "--budget",
        "5",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["p"], 5);
    assert_eq!(v[0]["a_p"], -3);
    assert_eq!(v[0]["disc_mod_ell"], 2);
    assert_eq!(v[0]["u_mod_ell"], 7);
}

#[test]
fn family_output_independent_of_threads() {
    let args = [
        "family",
        "--ell",
        "13",
        "--A",
        "1",
        "--rep",
        "projective",
        "--b-max",
        "60",
        "--budget",
        "300",
    ];
    let grid = ["--x-grid", "10^20,10^30,10^40"];
    let one = malle(&[&args[..], &grid, &["--threads", "1"]].concat());
    let many = malle(&[&args[..], &grid, &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    assert_round_trips(&one);
}

#[test]
fn coset_rep_matches_projective() {
    let coset = stdout_json(&malle(&["index", "--ell", "7", "--rep", "coset:borel"]));
    let proj = stdout_json(&malle(&["index", "--ell", "7", "--rep", "projective"]));
    for key in ["degree", "malle_ind", "inertia_ind", "lower_exponent"] {
        assert_eq!(coset[key], proj[key], "{key}");
    }
}
