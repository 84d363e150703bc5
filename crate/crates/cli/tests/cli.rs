use std::path::Path;
use std::process::{Command, Output};

use fotlx::protocol::floodset;
use tempfile::TempDir;

fn fotlx(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fotlx"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("p.sig"), "xorset s: a b\npreds: q/1 r/0\n").unwrap();
    std::fs::write(dir.path().join("floodset.protocol"), floodset().to_string()).unwrap();
    dir
}

fn task(dir: &Path, property: &str) {
    let text = format!("protocol: floodset.protocol\nproperty: {property}\n");
    std::fs::write(dir.join("t.task"), text).unwrap();
}

#[test]
fn sat_and_unsat() {
    let dir = workspace();
    let o = fotlx(
        dir.path(),
        &[
            "sat",
            "--sig",
            "p.sig",
            "--formula",
            "forall x. (a(x) & sometime q(x))",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("SAT\n"));
    let o = fotlx(
        dir.path(),
        &[
            "sat",
            "--sig",
            "p.sig",
            "--formula",
            "exists x. (a(x) & b(x))",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "UNSAT\n");
}

#[test]
fn valid_and_invalid() {
    let dir = workspace();
    let o = fotlx(
        dir.path(),
        &[
            "valid",
            "--sig",
            "p.sig",
            "--formula",
            "always r -> sometime r",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "VALID\n");
    let o = fotlx(
        dir.path(),
        &[
            "valid",
            "--sig",
            "p.sig",
            "--formula",
            "sometime r -> always r",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("INVALID\ncountermodel:"));
}

#[test]
fn formula_from_file_with_dsnf_dump() {
    let dir = workspace();
    std::fs::write(dir.path().join("f.txt"), "forall x. (q(x) W a(x))\n").unwrap();
    let o = fotlx(
        dir.path(),
        &["sat", "--sig", "p.sig", "--file", "f.txt", "--dsnf-dump"],
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("SAT\n"));
    assert!(out.len() > "SAT\n".len());
}

#[test]
fn json_verdict_matches_text() {
    let dir = workspace();
    for (formula, verdict) in [("always r -> r", "valid"), ("r", "invalid")] {
        let o = fotlx(
            dir.path(),
            &["--json", "valid", "--sig", "p.sig", "--formula", formula],
        );
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["verdict"], verdict);
        let text = fotlx(
            dir.path(),
            &["valid", "--sig", "p.sig", "--formula", formula],
        );
        assert_eq!(text.status.code(), o.status.code());
        assert!(stdout(&text).starts_with(&verdict.to_uppercase()));
    }
}

#[test]
fn oracle_model_and_exhaustion() {
    let dir = workspace();
    let o = fotlx(
        dir.path(),
        &[
            "oracle",
            "--sig",
            "p.sig",
            "--formula",
            "exists x. next q(x)",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("MODEL\n"));
    let o = fotlx(
        dir.path(),
        &["oracle", "--sig", "p.sig", "--formula", "r & ~r"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("EXHAUSTED"));
}

#[test]
fn simulation_is_reproducible() {
    let dir = workspace();
    let args = [
        "simulate",
        "--protocol",
        "floodset.protocol",
        "--n",
        "3",
        "--seed",
        "5",
        "--horizon",
        "12",
    ];
    let a = fotlx(dir.path(), &args);
    let b = fotlx(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("note: "));
}

#[test]
fn translate_writes_a_problem() {
    let dir = workspace();
    let o = fotlx(
        dir.path(),
        &[
            "translate",
            "--protocol",
            "floodset.protocol",
            "--delivery",
            "finite",
            "--out",
            "fs.problem",
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("II(o_1, ~0): "));
    let problem = std::fs::read_to_string(dir.path().join("fs.problem")).unwrap();
    assert!(!problem.is_empty());
    let o = fotlx(
        dir.path(),
        &["graph", "--problem", "fs.problem", "--out", "fs.graph"],
    );
    // The explicit graph of the full translation may exceed its budget.
    assert!(matches!(o.status.code(), Some(0 | 2)));
}

#[test]
fn verify_reports_a_countermodel_run() {
    let dir = workspace();
    task(dir.path(), "forall x. (i_0(x) | i_1(x))");
    let o = fotlx(dir.path(), &["verify", "--task", "t.task"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "VALID\n");

    task(dir.path(), "forall x. i_0(x)");
    let o = fotlx(dir.path(), &["verify", "--task", "t.task"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("INVALID\ncountermodel run"), "{out}");
    assert!(out.contains("i_1"));
}

#[test]
fn bad_input_exits_with_two() {
    let dir = workspace();
    let cases: [&[&str]; 5] = [
        &["sat", "--sig", "p.sig", "--formula", "forall x. (a(x) &"],
        &["sat", "--sig", "missing.sig", "--formula", "r"],
        &["sat", "--sig", "p.sig", "--formula", "unknown(x)"],
        &[
            "simulate",
            "--protocol",
            "floodset.protocol",
            "--n",
            "2",
            "--scheduler",
            "lazy",
        ],
        &["bogus"],
    ];
    for args in cases {
        let o = fotlx(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}
