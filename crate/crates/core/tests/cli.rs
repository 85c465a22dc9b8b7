use std::path::Path;
use std::process::{Command, Output};

use supercong_core::harness::{read_jsonl, ResultRecord};

fn supercong(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_supercong"));
    cmd.args(args).env_remove("SUPERCONG_OUTPUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("SUPERCONG_OUTPUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gamma_prints_value_and_digits() {
    let o = supercong(&["gamma", "--p", "7", "--x", "1", "--precision", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "Gamma_7(1) mod 7^3 = 342\ndigits: 6,6,6\n");

    let o = supercong(&["gamma", "--p", "7", "--x", "1/4", "--precision", "1"], None);
    assert!(stdout(&o).starts_with("Gamma_7(1/4) mod 7^1 = 1\n"));

    let o = supercong(&["gamma", "--p", "7", "--x", "1/7"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not p-integral"));

    let o = supercong(&["gamma", "--p", "7", "--x", "1/x"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn negative_rational_literal() {
    let o = supercong(&["gamma", "--p", "5", "--x", "-3/4", "--precision", "2"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn verify_exit_code_contract() {
    let o = supercong(&["verify", "--claim", "thm-1-1", "--p", "3", "--r", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    let rec: ResultRecord = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(rec.pass);
    assert!(rec.residual_valuation.unwrap().at_least(3));
    assert_eq!(rec.precision, Some(5));

    let o = supercong(&["verify", "--claim", "f1", "--p", "5"], None);
    assert_eq!(o.status.code(), Some(0));
    let rec: ResultRecord = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(rec.modulus_exp, 3);

    // p = 5 is outside the hypotheses
    let o = supercong(&["verify", "--claim", "thm-1-1", "--p", "5", "--r", "3"], None);
    assert_eq!(o.status.code(), Some(2));

    // a congruence that fails on this input is exit 1, not an error
    let o = supercong(&["verify", "--claim", "thm-1-1", "--p", "7", "--r", "3"], None);
    assert_eq!(o.status.code(), Some(1));
    let rec: ResultRecord = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(!rec.pass);

    let o = supercong(&["verify", "--claim", "thm-1-1", "--p", "3", "--r", "3", "--precision", "40"], None);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    assert_eq!(supercong(&["verify", "--p", "3"], None).status.code(), Some(2));
}

#[test]
fn verify_csv_and_text() {
    let o = supercong(&["verify", "--claim", "swisher-f3-case2", "--p", "3", "--r", "2", "--format", "csv"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("swisher-f3-case2,3,2,4,2,4,"));

    let o = supercong(&["verify", "--claim", "f3", "--p", "7", "--format", "text"], None);
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn sum_command() {
    let o = supercong(&["sum", "--m", "1"], None);
    assert_eq!(stdout(&o), "S_4(1) = 55/64\n");
    let o = supercong(&["sum", "--m", "1", "--d", "3"], None);
    assert_eq!(stdout(&o), "S_3(1) = 20/27\n");
    let o = supercong(&["sum", "--m", "1", "--p", "5"], None);
    assert!(stdout(&o).contains("vp = 1"));
    let o = supercong(&["sum", "--m", "2000", "--tolerance", "1e-4"], None);
    assert_eq!(o.status.code(), Some(0));
    let o = supercong(&["sum", "--m", "6", "--modular", "--p", "3", "--precision", "6"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = supercong(&["sum", "--m", "6", "--modular"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wz_checks() {
    let o = supercong(&["wz", "--check", "grid", "--nmax", "25", "--kmax", "25"], None);
    assert_eq!(o.status.code(), Some(0));
    let o = supercong(&["wz", "--check", "certificate"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"difference\": \"0\""));
    let o = supercong(&["wz", "--check", "lemma33", "--p", "3", "--r", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    let o = supercong(&["wz", "--check", "lemma23", "--p", "3", "--r", "3", "--which", "b"], None);
    assert_eq!(o.status.code(), Some(0));
    let o = supercong(&["wz", "--check", "indices", "--p", "7"], None);
    assert_eq!(o.status.code(), Some(0));
    let o = supercong(&["wz", "--check", "lemma32"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = supercong(&["wz", "--check", "lemma23", "--p", "5", "--r", "3"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_writes_to_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = supercong(
        &["sweep", "--claim", "f3", "--p-max", "50", "--residue", "3", "--jobs", "4"],
        Some(dir.path()),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body = std::fs::read_to_string(dir.path().join("sweep-f3.jsonl")).unwrap();
    let records = read_jsonl(&body).unwrap();
    let ps: Vec<u64> = records.iter().map(|r| r.p).collect();
    assert_eq!(ps, vec![3, 7, 11, 19, 23, 31, 43, 47]);
    assert!(records.iter().all(|r| r.pass));
    assert!(stdout(&o).contains("8 records, 8 pass, 0 fail"));
}

#[test]
fn empty_sweep_is_empty_file_and_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("none.csv");
    let o = supercong(
        &["sweep", "--claim", "f1", "--p-max", "50", "--residue", "3", "--format", "csv", "--output", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn sweep_with_failures_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let o = supercong(
        &["sweep", "--claim", "thm-1-1", "--p-max", "7", "--r", "3", "--output", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    let records = read_jsonl(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(records.iter().map(|r| (r.p, r.pass)).collect::<Vec<_>>(), vec![(3, true), (7, false)]);
}

#[test]
fn sweep_rejects_zero_jobs() {
    let o = supercong(&["sweep", "--claim", "f3", "--p-max", "20", "--jobs", "0"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn guo_sweep_all_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let o = supercong(
        &["sweep", "--claim", "guo-f4", "--d", "3", "--r", "1,2,3", "--p-max", "20", "--format", "csv", "--output", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.records().count(), 6);
}

#[test]
fn help_exits_zero() {
    assert_eq!(supercong(&["--help"], None).status.code(), Some(0));
}
