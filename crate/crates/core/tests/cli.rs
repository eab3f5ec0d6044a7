use std::process::{Command, Output};

fn mtlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtlab")).args(args).output().expect("run mtlab")
}

fn csv_rows(out: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn constants_row() {
    let out = mtlab(&["constants", "--dim", "2", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    let m_p: f64 = rows[0][column(&h, "m_p")].parse().unwrap();
    assert!((m_p - 9.1385324785902674905).abs() < 1e-12);
    assert_eq!(rows[0][column(&h, "level_formula_valid")], "true");
}

#[test]
fn constants_below_threshold_and_domain_error() {
    let out = mtlab(&["constants", "--dim", "2", "--p", "1.2"]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(&out);
    assert_eq!(rows[0][column(&h, "m_p")], "");
    assert_eq!(rows[0][column(&h, "m_p_gamma_form")], "");
    assert_eq!(rows[0][column(&h, "level_formula_valid")], "false");
    let out = mtlab(&["constants", "--dim", "2", "--p", "2.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mtlab(&["sweep-mp", "--dim", "2", "--p-grid", "1.9:1.9999:1"]).status.code(), Some(2));
    assert_eq!(mtlab(&["sweep-mp", "--dim", "2", "--p-grid", "1.9:1.99"]).status.code(), Some(2));
    assert_eq!(mtlab(&["constants", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(mtlab(&["constants", "--dim", "2", "--p", "x"]).status.code(), Some(2));
    assert_eq!(mtlab(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(mtlab(&["constants", "--dim", "2", "--p", "1.5", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(mtlab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(mtlab(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_mp_gap_decreases() {
    for (dim, grid) in [("2", "1.9:1.9999:5"), ("3", "2.9:2.9999:5")] {
        let out = mtlab(&["sweep-mp", "--dim", dim, "--p-grid", grid]);
        assert_eq!(out.status.code(), Some(0));
        let (h, rows) = csv_rows(&out);
        let gaps: Vec<f64> = rows
            .iter()
            .filter(|r| r[0] == "gamma_form")
            .map(|r| r[column(&h, "abs_gap")].parse().unwrap())
            .collect();
        assert_eq!(gaps.len(), 5);
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn concentrate_cases() {
    assert_eq!(mtlab(&["concentrate", "--dim", "2", "--p", "1.5"]).status.code(), Some(0));
    let single = mtlab(&["concentrate", "--dim", "2", "--p", "1.5", "--epsilons", "0.5"]);
    assert_eq!(single.status.code(), Some(0));
    let (_, rows) = csv_rows(&single);
    assert!(rows.iter().filter(|r| r[0] == "f_p").count() == 1);
    let geo = mtlab(&["concentrate", "--dim", "2", "--p", "1.5", "--epsilons", "1e-1:1e-3:3", "--panels", "100"]);
    assert_eq!(geo.status.code(), Some(0));
    assert_eq!(mtlab(&["concentrate", "--dim", "2", "--p", "1.2"]).status.code(), Some(3));
    assert_eq!(
        mtlab(&["concentrate", "--dim", "2", "--p", "1.5", "--order", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn json_matches_csv() {
    let csv_out = mtlab(&["two-bubble", "--dim", "2", "--p", "1.5"]);
    let json_out = mtlab(&["two-bubble", "--dim", "2", "--p", "1.5", "--format", "json"]);
    let (h, rows) = csv_rows(&csv_out);
    let v: serde_json::Value = serde_json::from_slice(&json_out.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), rows.len());
    for (row, obj) in rows.iter().zip(arr) {
        for (k, cell) in h.iter().zip(row) {
            match &obj[k] {
                serde_json::Value::Null => assert_eq!(cell, ""),
                serde_json::Value::String(s) => assert_eq!(s, cell),
                serde_json::Value::Number(n) => assert_eq!(n.as_f64().unwrap(), cell.parse::<f64>().unwrap()),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("limit.csv");
    let path_s = path.to_str().unwrap();
    let to_file = mtlab(&["limit-f", "--out", path_s]);
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    let stdout = mtlab(&["limit-f"]);
    assert_eq!(std::fs::read(&path).unwrap(), stdout.stdout);
}

#[test]
fn verify_and_maximize_tables() {
    let out = mtlab(&["verify", "--suite", "elementary", "--trials", "300", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_rows(&out).1.len(), 300);
    let out = mtlab(&["verify", "--suite", "alvino", "--trials", "20", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let out = mtlab(&["maximize", "--dim", "2", "--p", "1.5", "--knots", "8", "--iters", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let (h, rows) = csv_rows(&out);
    let vol = std::f64::consts::PI;
    assert_eq!(rows.iter().filter(|r| r[column(&h, "is_winner")] == "true").count(), 1);
    for r in &rows {
        assert!(r[column(&h, "value")].parse::<f64>().unwrap() >= vol);
        assert!(["converged", "concentrating", "iteration-capped"].contains(&r[column(&h, "outcome")].as_str()));
    }
}

#[test]
fn semicontinuity_runs() {
    let out = mtlab(&["semicontinuity", "--dim", "3", "--moser-t", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
