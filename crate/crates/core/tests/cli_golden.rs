mod common;

use common::{check_case, run, CASES};

#[test]
fn golden_cases() {
    let failures: Vec<String> = CASES
        .iter()
        .filter_map(|case| {
            check_case(case)
                .err()
                .map(|e| format!("{}: {e}", case.name))
        })
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn every_subcommand_is_covered() {
    for sub in [
        "ybe-check",
        "ybe-scan",
        "smatrix",
        "bound",
        "wavefn-check",
        "duality-check",
    ] {
        assert!(
            CASES.iter().any(|c| c.args[0] == sub && c.code == 0),
            "{sub}"
        );
    }
    for code in [0, 1, 2, 3] {
        assert!(CASES.iter().any(|c| c.code == code), "exit {code}");
    }
}

#[test]
fn seeds_change_sampled_output() {
    let a = run(&[
        "smatrix", "--family", "delta", "--c", "1", "--N", "3", "--seed", "1",
    ]);
    let b = run(&[
        "smatrix", "--family", "delta", "--c", "1", "--N", "3", "--seed", "2",
    ]);
    assert_eq!((a.code, b.code), (0, 0));
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn help_exits_zero() {
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    for sub in [
        "ybe-check",
        "ybe-scan",
        "smatrix",
        "bound",
        "wavefn-check",
        "duality-check",
    ] {
        assert!(r.stdout.contains(sub));
    }
}

#[test]
fn bound_reports_ladder_and_energy() {
    let r = run(&["bound", "--N", "3", "--h", "-1"]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["energy"], -8.0);
    let ims: Vec<f64> = v["momenta"]
        .as_array()
        .unwrap()
        .iter()
        .map(|z| z["im"].as_f64().unwrap())
        .collect();
    assert_eq!(ims, vec![-2.0, 0.0, 2.0]);
}

#[test]
fn smatrix_scalar_is_minus_i() {
    let r = run(&[
        "smatrix", "--N", "2", "--n", "1", "--stats", "boson", "--family", "delta", "--c", "1",
        "--k", "1,2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["re"][0][0], 0.0);
    assert_eq!(v["im"][0][0], -1.0);
}

#[test]
fn duality_identity_is_exact() {
    let r = run(&["duality-check", "--N", "3", "--n", "2", "--c", "1"]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["y_identity_residual"], 0.0);
    assert_eq!(v["y_identity_bitwise"], true);
    assert_eq!(v["kink"]["verified_sign"], -1);
}
