//! Golden-file cases for the `contact` binary.
//!
//! Set `CONTACT_BLESS=1` to rewrite the expected outputs under `tests/golden`.

#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Json,
    Csv,
    /// Error cases: nothing on stdout, message on stderr.
    Empty,
}

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
    pub shape: Shape,
}

pub const CASES: &[Case] = &[
    Case {
        name: "ybe_check_delta",
        args: &[
            "ybe-check",
            "--family",
            "delta",
            "--c",
            "1.7",
            "--n",
            "2",
            "--k",
            "0.3,1.1,2.9",
        ],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "ybe_check_general_b",
        args: &[
            "ybe-check",
            "--general",
            "--theta",
            "0",
            "--a",
            "1",
            "--b",
            "0.5",
            "--c",
            "0",
            "--n",
            "2",
            "--k",
            "0.3,1.1,2.9",
        ],
        code: 1,
        shape: Shape::Json,
    },
    Case {
        name: "ybe_check_wall_csv",
        args: &[
            "ybe-check",
            "--family",
            "separated",
            "--h",
            "inf",
            "--n",
            "1",
            "--k",
            "1,2,3",
            "--format",
            "csv",
        ],
        code: 0,
        shape: Shape::Csv,
    },
    Case {
        name: "ybe_check_sampled",
        args: &[
            "ybe-check",
            "--family",
            "antidelta",
            "--c",
            "-0.8",
            "--n",
            "2",
            "--stats",
            "fermion",
            "--seed",
            "7",
        ],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "ybe_check_config",
        args: &[
            "ybe-check",
            "--config",
            "tests/golden/wall.toml",
            "--k",
            "1,2,3",
        ],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "ybe_check_pole",
        args: &[
            "ybe-check",
            "--family",
            "separated",
            "--h",
            "1",
            "--n",
            "1",
            "--k",
            "0,2i,1",
        ],
        code: 3,
        shape: Shape::Empty,
    },
    Case {
        name: "ybe_check_usage",
        args: &["ybe-check", "--bogus"],
        code: 2,
        shape: Shape::Empty,
    },
    Case {
        name: "ybe_scan_default",
        args: &["ybe-scan"],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "ybe_scan_default_csv",
        args: &["ybe-scan", "--format", "csv"],
        code: 0,
        shape: Shape::Csv,
    },
    Case {
        name: "ybe_scan_separated_csv",
        args: &["ybe-scan", "--family", "separated", "--format", "csv"],
        code: 0,
        shape: Shape::Csv,
    },
    Case {
        name: "ybe_scan_n1",
        args: &["ybe-scan", "--n", "1", "--format", "csv"],
        code: 0,
        shape: Shape::Csv,
    },
    Case {
        name: "ybe_scan_empty",
        args: &["ybe-scan", "--thetas", ""],
        code: 2,
        shape: Shape::Empty,
    },
    Case {
        name: "smatrix_two_body",
        args: &[
            "smatrix", "--N", "2", "--n", "1", "--stats", "boson", "--family", "delta", "--c", "1",
            "--k", "1,2",
        ],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "smatrix_three_body",
        args: &[
            "smatrix",
            "--family",
            "delta",
            "--c",
            "1.5",
            "--N",
            "3",
            "--n",
            "2",
            "--k",
            "0.1,0.9,2.2",
        ],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "smatrix_sampled_csv",
        args: &[
            "smatrix",
            "--family",
            "separated",
            "--h",
            "-2",
            "--N",
            "4",
            "--n",
            "1",
            "--seed",
            "3",
            "--format",
            "csv",
        ],
        code: 0,
        shape: Shape::Csv,
    },
    Case {
        name: "smatrix_cluster",
        args: &[
            "smatrix",
            "--family",
            "separated",
            "--h",
            "-1",
            "--n",
            "1",
            "--clusters",
            "2,3",
            "--shifts",
            "0.4,-0.2",
        ],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "smatrix_general",
        args: &["smatrix", "--general", "--a", "1", "--k", "1,2"],
        code: 2,
        shape: Shape::Empty,
    },
    Case {
        name: "bound_three",
        args: &["bound", "--N", "3", "--h", "-1"],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "bound_spin_csv",
        args: &[
            "bound", "--N", "3", "--h", "-0.5", "--n", "2", "--format", "csv",
        ],
        code: 0,
        shape: Shape::Csv,
    },
    Case {
        name: "bound_positive_h",
        args: &["bound", "--N", "2", "--h", "0.5"],
        code: 2,
        shape: Shape::Empty,
    },
    Case {
        name: "wavefn_delta",
        args: &[
            "wavefn-check",
            "--family",
            "delta",
            "--c",
            "1.3",
            "--N",
            "3",
            "--n",
            "2",
            "--samples",
            "2",
        ],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "wavefn_wall_csv",
        args: &[
            "wavefn-check",
            "--family",
            "separated",
            "--h",
            "inf",
            "--N",
            "3",
            "--format",
            "csv",
        ],
        code: 0,
        shape: Shape::Csv,
    },
    Case {
        name: "wavefn_pole",
        args: &[
            "wavefn-check",
            "--family",
            "delta",
            "--c",
            "1",
            "--k",
            "0,1i",
        ],
        code: 3,
        shape: Shape::Empty,
    },
    Case {
        name: "duality_default",
        args: &["duality-check", "--N", "3", "--n", "2", "--c", "1"],
        code: 0,
        shape: Shape::Json,
    },
    Case {
        name: "duality_csv",
        args: &[
            "duality-check",
            "--N",
            "2",
            "--n",
            "1",
            "--c",
            "-2",
            "--format",
            "csv",
        ],
        code: 0,
        shape: Shape::Csv,
    },
];

pub struct RunResult {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn run(args: &[&str]) -> RunResult {
    let out = Command::new(env!("CARGO_BIN_EXE_contact"))
        .args(args)
        .current_dir(manifest_dir())
        .output()
        .expect("binary runs");
    RunResult {
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
        code: out.status.code().unwrap_or(-1),
    }
}

fn require(v: &Value, keys: &[&str]) -> Result<(), String> {
    for k in keys {
        if v.get(k).is_none() {
            return Err(format!("missing key {k:?}"));
        }
    }
    Ok(())
}

fn require_complex_list(v: &Value, key: &str) -> Result<(), String> {
    let list = v[key].as_array().ok_or(format!("{key} is not a list"))?;
    for z in list {
        if !(z["re"].is_f64() && z["im"].is_f64()) {
            return Err(format!("{key} entry {z} is not {{re, im}}"));
        }
    }
    Ok(())
}

/// Per-subcommand JSON schema and the agreement between exit code and verdict.
pub fn check_json(subcommand: &str, text: &str, code: i32) -> Result<(), String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("invalid json: {e}"))?;
    let verdict_key = match subcommand {
        "ybe-check" => {
            require(
                &v,
                &[
                    "n",
                    "statistics",
                    "params",
                    "momenta",
                    "residual_ybe",
                    "residual_inverse",
                    "residual_commute",
                    "tol",
                    "verdict",
                ],
            )?;
            require_complex_list(&v, "momenta")?;
            "verdict"
        }
        "ybe-scan" => {
            require(
                &v,
                &[
                    "spin_states",
                    "statistics",
                    "tol",
                    "fail_floor",
                    "base_triples",
                    "rows",
                    "skipped_points",
                    "matches_prediction",
                ],
            )?;
            for row in v["rows"].as_array().ok_or("rows is not a list")? {
                require(row, &["params", "max_residual", "verdict", "predicted"])?;
            }
            "matches_prediction"
        }
        "smatrix" => {
            require(
                &v,
                &[
                    "family",
                    "N",
                    "n",
                    "statistics",
                    "momenta",
                    "dim",
                    "re",
                    "im",
                    "unitarity",
                    "symmetry",
                    "pass",
                ],
            )?;
            require_complex_list(&v, "momenta")?;
            let dim = v["dim"].as_u64().ok_or("dim")? as usize;
            for key in ["re", "im"] {
                let rows = v[key].as_array().ok_or("matrix rows")?;
                if rows.len() != dim
                    || rows
                        .iter()
                        .any(|r| r.as_array().map(|r| r.len()) != Some(dim))
                {
                    return Err(format!("{key} is not {dim}x{dim}"));
                }
            }
            "pass"
        }
        "bound" => {
            require(
                &v,
                &[
                    "N",
                    "h",
                    "n",
                    "statistics",
                    "momenta",
                    "energy",
                    "pattern_count",
                    "realized_degeneracy",
                    "states",
                    "pass",
                ],
            )?;
            require_complex_list(&v, "momenta")?;
            for s in v["states"].as_array().ok_or("states is not a list")? {
                require(s, &["pattern", "eigenspace_dim", "residuals"])?;
            }
            "pass"
        }
        "wavefn-check" => {
            require(
                &v,
                &[
                    "family",
                    "N",
                    "n",
                    "statistics",
                    "momenta",
                    "boundary_residual",
                    "path_independence",
                    "samples",
                    "pass",
                ],
            )?;
            require_complex_list(&v, "momenta")?;
            for s in v["samples"].as_array().ok_or("samples is not a list")? {
                require(s, &["x", "re", "im"])?;
            }
            "pass"
        }
        "duality-check" => {
            require(
                &v,
                &[
                    "c",
                    "dual_c",
                    "N",
                    "n",
                    "momenta",
                    "y_identity_residual",
                    "y_identity_bitwise",
                    "kink",
                    "pass",
                ],
            )?;
            require(
                &v["kink"],
                &[
                    "residual_opposite_sign",
                    "verified_sign",
                    "pointwise_residual",
                ],
            )?;
            "pass"
        }
        other => return Err(format!("unknown subcommand {other}")),
    };
    let verdict = v[verdict_key]
        .as_bool()
        .ok_or(format!("{verdict_key} is not a bool"))?;
    if verdict != (code == 0) {
        return Err(format!("{verdict_key} = {verdict} but exit code {code}"));
    }
    Ok(())
}

pub fn check_csv(text: &str) -> Result<(), String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let width = reader.headers().map_err(|e| e.to_string())?.len();
    if width == 0 {
        return Err("empty csv header".into());
    }
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != width {
            return Err(format!("row has {} fields, header {width}", rec.len()));
        }
        rows += 1;
    }
    if rows == 0 {
        return Err("csv has no rows".into());
    }
    Ok(())
}

/// Exit code, schema, run-to-run byte identity and golden comparison.
pub fn check_case(case: &Case) -> Result<(), String> {
    let first = run(case.args);
    if first.code != case.code {
        return Err(format!(
            "exit {} (want {}), stderr: {}",
            first.code,
            case.code,
            first.stderr.trim()
        ));
    }
    let second = run(case.args);
    if second.stdout != first.stdout || second.code != first.code {
        return Err("output differs between identical runs".into());
    }
    match case.shape {
        Shape::Json => check_json(case.args[0], &first.stdout, first.code)?,
        Shape::Csv => check_csv(&first.stdout)?,
        Shape::Empty => {
            if !first.stdout.is_empty() {
                return Err("error case wrote to stdout".into());
            }
            if first.stderr.trim().is_empty() {
                return Err("error case wrote nothing to stderr".into());
            }
            return Ok(());
        }
    }
    let path = manifest_dir()
        .join("tests/golden")
        .join(format!("{}.out", case.name));
    if std::env::var_os("CONTACT_BLESS").is_some() {
        fs::write(&path, &first.stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let golden = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if golden != first.stdout {
        return Err(format!("stdout differs from {}", path.display()));
    }
    Ok(())
}
