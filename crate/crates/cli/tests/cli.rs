//! End-to-end runs of the binary: output schemas, exit codes, determinism.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn case_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../cases")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_folcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf8 stderr")
}

fn temp_case(text: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(text.as_bytes()).expect("write temp case");
    file
}

#[test]
fn strata_json_rows_match_snapshot() {
    let case = case_path("u21-inert.json");
    let output = run(&["strata", case.to_str().unwrap(), "--format", "json"]);
    assert!(output.status.success());
    let rows: Vec<serde_json::Value> = stdout_of(&output)
        .lines()
        .map(|line| serde_json::from_str(line).expect("each line parses"))
        .collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let object = row.as_object().unwrap();
        for key in ["label", "dim", "rV", "inSigma", "bruhatOverFol"] {
            assert!(object.contains_key(key), "missing {key}");
        }
    }
    assert_eq!(rows[0]["label"], "1-2-3");
    assert_eq!(rows[0]["dim"], 0);
    assert_eq!(rows[0]["rV"], serde_json::json!([2]));
    assert_eq!(rows[0]["inSigma"], false);
    assert_eq!(rows[1]["dim"], 1);
    assert_eq!(rows[1]["inSigma"], true);
    assert_eq!(rows[1]["bruhatOverFol"], true);
    assert_eq!(rows[2]["label"], "3-1-2");
    assert_eq!(rows[2]["dim"], 2);
    assert_eq!(rows[2]["rV"], serde_json::json!([1]));
}

#[test]
fn strata_csv_and_table_headers() {
    let case = case_path("u21-inert.json");
    let csv = run(&["strata", case.to_str().unwrap(), "--format", "csv"]);
    assert!(csv.status.success());
    let text = stdout_of(&csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("label,dim,rV,inSigma,bruhatOverFol"));
    assert_eq!(lines.next(), Some("1-2-3,0,2,false,false"));
    assert!(text.lines().all(|l| l.split(',').count() == 5));

    let table = run(&["strata", case.to_str().unwrap()]);
    assert!(table.status.success());
    let text = stdout_of(&table);
    let header = text.lines().next().unwrap();
    for key in ["label", "dim", "rV", "inSigma", "bruhatOverFol"] {
        assert!(header.contains(key), "table header missing {key}");
    }
}

#[test]
fn runs_are_deterministic() {
    let case = case_path("d4-split-pair.json");
    let first = run(&["strata", case.to_str().unwrap(), "--format", "json"]);
    let second = run(&["strata", case.to_str().unwrap(), "--format", "json"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    for line in stdout_of(&first).lines() {
        serde_json::from_str::<serde_json::Value>(line).expect("stable JSON");
    }
}

#[test]
fn case_format_field_is_honored_and_overridden() {
    // d4-split-pair.json names table format; no flag means table
    let case = case_path("d4-split-pair.json");
    let table = run(&["strata", case.to_str().unwrap()]);
    assert!(stdout_of(&table).starts_with("label  "));
    let json = run(&["strata", case.to_str().unwrap(), "--format", "json"]);
    assert!(stdout_of(&json).starts_with('{'));
}

#[test]
fn foliation_report_fields() {
    let case = case_path("u21-inert.json");
    let output = run(&["foliation", case.to_str().unwrap(), "--format", "json"]);
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(stdout_of(&output).trim()).unwrap();
    assert_eq!(report["dimM"], 2);
    assert_eq!(report["rank"], 1);
    assert_eq!(report["corank"], 1);
    assert_eq!(report["dimMFol"], 1);
    assert_eq!(report["slopes"][0].as_array().unwrap().len(), 3);
    assert_eq!(report["cascade"][0]["pass"], true);
}

#[test]
fn hilbert_report_fields() {
    let case = case_path("hilbert-g3.json");
    let output = run(&["hilbert", case.to_str().unwrap(), "--format", "json"]);
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(stdout_of(&output).trim()).unwrap();
    assert_eq!(report["p"], 3);
    assert_eq!(report["pClosed"], true);
    assert_eq!(report["go"]["dim"], 1);
    assert_eq!(report["go"]["thetaDegreeExps"], serde_json::json!([2, 1]));
    let weights = report["weights"].as_array().unwrap();
    assert_eq!(weights[0]["witness"], serde_json::json!([0, 2, 0]));
    assert_eq!(weights[0]["residue"], serde_json::json!([0, 0, 0]));
    assert_eq!(weights[1]["inMin"], true);
    assert_eq!(weights[2]["inHasse"], true);
    assert_eq!(weights[2]["inStd"], false);
    assert_eq!(report["idempotents"]["pass"], true);
}

#[test]
fn hilbert_open_sigma_names_obstruction() {
    let file = temp_case(
        r#"{"kind":"hilbert","p":3,"g":3,"orbitSizes":[1,2],"sigma":[1],"weights":[]}"#,
    );
    let output = run(&["hilbert", file.path().to_str().unwrap(), "--format", "json"]);
    assert!(output.status.success());
    let report: serde_json::Value = serde_json::from_str(stdout_of(&output).trim()).unwrap();
    assert_eq!(report["pClosed"], false);
    assert_eq!(report["obstruction"]["sigma"], 1);
    assert_eq!(report["obstruction"]["tau"], 2);
    assert_eq!(report["obstruction"]["weight"], serde_json::json!([0, 6, -2]));
    assert!(report.get("go").is_none());
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let missing = run(&["strata", "no-such-file.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr_of(&missing).contains("error:"));

    let garbage = temp_case("not json at all");
    let malformed = run(&["strata", garbage.path().to_str().unwrap()]);
    assert_eq!(malformed.status.code(), Some(2));

    let unknown = temp_case(r#"{"kind":"siegel","p":3}"#);
    let bad_kind = run(&["strata", unknown.path().to_str().unwrap()]);
    assert_eq!(bad_kind.status.code(), Some(2));
    assert!(stderr_of(&bad_kind).contains("siegel"));

    let usage = run(&["strata"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn kind_mismatch_exits_2() {
    let hilbert = case_path("hilbert-g3.json");
    let output = run(&["strata", hilbert.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("unitary"));

    let unitary = case_path("u21-inert.json");
    let output = run(&["hilbert", unitary.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("hilbert"));
}

#[test]
fn strata_cap_exits_3() {
    let case = case_path("u21-inert.json");
    let output = run(&["strata", case.to_str().unwrap(), "--cap", "2"]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr_of(&output).contains("cap"));
}

#[test]
fn verify_passes_and_records_seed() {
    let output = run(&[
        "verify", "--max-d", "2", "--orbit-max", "2", "--seed", "11", "--format", "json",
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["seed"], 11);
    assert_eq!(header["maxD"], 2);
    let suites: Vec<serde_json::Value> = lines
        .map(|line| serde_json::from_str(line).unwrap())
        .collect();
    assert_eq!(suites.len(), 8);
    assert!(suites.iter().all(|s| s["pass"] == true));
}

#[test]
fn corrupted_formula_fails_with_counterexample() {
    let output = run(&["verify", "--max-d", "2", "--orbit-max", "2", "--corrupt-formula"]);
    assert_eq!(output.status.code(), Some(1));
    let text = stdout_of(&output);
    assert!(text.contains("formula-vs-kernel: FAIL"));
    assert!(text.contains("counterexample:"));
    assert!(stderr_of(&output).contains("formula-vs-kernel"));
}
