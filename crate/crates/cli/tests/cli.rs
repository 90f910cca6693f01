use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(r: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../core/tests/fixtures/water/water_R{r}.fcidump"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermicorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A two-orbital table with no electrons.
const VACUUM: &str = "&FCI NORB=2,NELEC=0,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n\
  0.5 1 1 1 1\n -1.0 1 1 0 0\n 0.1 2 1 0 0\n 0.3 0 0 0 0\n";

#[test]
fn solve_reports_dissociated_water() {
    let out = run(&["solve", path_arg(&fixture("4.0"))]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["tag"].as_f64(), Some(4.0));
    assert_eq!(doc["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(doc["sector"]["dim"], 441);
    let energies = doc["energies"].as_array().unwrap();
    assert_eq!(energies.len(), 13);
    assert!((energies[0].as_f64().unwrap() + 74.737).abs() < 5e-3);
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports[0]["state"], "gs");
    assert_eq!(reports[1]["state"], "thermal");
    let s_p = reports[1]["report"]["s_p"].as_f64().unwrap();
    assert!((s_p - 12f64.log2()).abs() < 0.01);
    assert_eq!(doc["config"]["beta"].as_f64(), Some(1000.0));
}

#[test]
fn solve_is_deterministic() {
    let file = fixture("1.4");
    let args = ["solve", path_arg(&file), "--state", "gs,eigen2"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["reports"][1]["state"], "eigen2");
}

#[test]
fn vacuum_sector_has_no_correlations() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty_R1.0.fcidump");
    std::fs::write(&file, VACUUM).unwrap();
    let out = run(&["solve", path_arg(&file)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["energies"][0].as_f64(), Some(0.3));
    for rep in doc["reports"].as_array().unwrap() {
        let r = &rep["report"];
        for key in ["s_rho_up", "i_updown", "i2_updown", "n_updown", "n2_updown", "e1", "e2"] {
            assert_eq!(r[key].as_f64(), Some(0.0), "{key}");
        }
    }
}

#[test]
fn scan_sorts_rows_and_records_failures() {
    let dir = tempfile::tempdir().unwrap();
    for r in ["2.0", "0.6"] {
        std::fs::copy(fixture(r), dir.path().join(format!("water_R{r}.fcidump"))).unwrap();
    }
    std::fs::write(dir.path().join("broken_R1.0.fcidump"), "&FCI NORB=2\n").unwrap();
    let csv_path = dir.path().join("scan.csv");
    let out = run(&[
        "scan",
        path_arg(dir.path()),
        "--n-roots",
        "3",
        "-o",
        path_arg(&csv_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "R");
    assert_eq!(&header[header.len() - 1], "error");
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let key: Vec<(String, String)> = rows.iter().map(|r| (r[0].to_string(), r[1].to_string())).collect();
    assert_eq!(
        key,
        [
            ("0.6", "gs"),
            ("0.6", "thermal"),
            ("1", ""),
            ("2", "gs"),
            ("2", "thermal")
        ]
        .map(|(a, b)| (a.to_string(), b.to_string()))
    );
    assert!(!rows[2][header.len() - 1].is_empty());
    for row in [&rows[0], &rows[1], &rows[3], &rows[4]] {
        assert!(row[header.len() - 1].is_empty());
        assert_eq!(row.len(), header.len());
        let e0: f64 = row[3].parse().unwrap();
        assert!(e0.is_finite());
    }
}

#[test]
fn scan_json_format() {
    let out = run(&["scan", path_arg(&fixture("1.0")), "--format", "json", "--state", "gs"]);
    assert!(out.status.success());
    let docs: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(docs.as_array().unwrap().len(), 1);
    assert_eq!(docs[0]["reports"].as_array().unwrap().len(), 1);
}

#[test]
fn check_limits_exit_codes() {
    assert_eq!(run(&["check-limits", "--analytic"]).status.code(), Some(0));
    let far = run(&["check-limits", path_arg(&fixture("4.0"))]);
    assert_eq!(far.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&far.stdout).contains("PASS"));
    let near = run(&["check-limits", path_arg(&fixture("1.0"))]);
    assert_eq!(near.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&near.stdout).contains("FAIL"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty.fcidump");
    std::fs::write(&file, VACUUM).unwrap();
    assert_eq!(run(&["check-limits", path_arg(&file)]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(
        run(&["solve", "/nonexistent/water_R1.0.fcidump"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve", path_arg(&fixture("1.0")), "--beta", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve", path_arg(&fixture("1.0")), "--state", "eigen999"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve", path_arg(&fixture("1.0")), "--sector", "9,9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["solve", path_arg(&fixture("1.0")), "--dense-limit", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["check-limits"]).status.code(), Some(2));
}

#[test]
fn sector_override_and_tag() {
    let out = run(&[
        "solve",
        path_arg(&fixture("1.0")),
        "--sector",
        "5,4",
        "--tag",
        "9.5",
        "--state",
        "gs",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["sector"]["n_up"], 5);
    assert_eq!(doc["sector"]["n_down"], 4);
    assert_eq!(doc["tag"].as_f64(), Some(9.5));
    assert_eq!(doc["reports"][0]["report"]["geometry"].as_f64(), Some(9.5));
}
