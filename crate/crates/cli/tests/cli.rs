use std::path::Path;
use std::process::{Command, Output};

fn walk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walk")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn auto_steps_emit_n_opt_plus_one_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = walk(&["run", "--n", "50", "--k", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(header[0], "step");
    assert_eq!(rows.len(), 28);
    let (_, summary) = read_csv(&dir.path().join("run.summary.csv"));
    assert_eq!(summary.len(), 1);
    assert_eq!(summary[0][5], "27");
    assert_eq!(summary[0][9], "54");
}

#[test]
fn invalid_input_exits_2() {
    let o = walk(&["run", "--n", "8", "--k", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("K=9"));
    assert_eq!(walk(&["run", "--n", "20", "--k", "2", "--phase", "pi", "--engine", "oracle", "--steps", "3"]).status.code(), Some(2));
    assert_eq!(walk(&["run", "--n", "20", "--k", "2", "--phase", "pi"]).status.code(), Some(2));
    assert_eq!(walk(&["run", "--n", "20", "--marked-list", "1,1"]).status.code(), Some(2));
    assert_eq!(walk(&["stats", "--k", "3", "--runs", "2", "--mode", "mc"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let o = walk(&["run", "--n", "20", "--k", "2", "--out", "/nonexistent/dir/run.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn full_and_reduced_engines_agree() {
    let dir = tempfile::tempdir().unwrap();
    let curve = |engine: &str| {
        let out = dir.path().join(format!("{engine}.csv"));
        let o = walk(&["run", "--n", "100", "--k", "2", "--engine", engine, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        read_csv(&out).1
    };
    let full = curve("full");
    let reduced = curve("reduced");
    let oracle = curve("oracle");
    assert_eq!(full.len(), reduced.len());
    for ((f, r), q) in full.iter().zip(&reduced).zip(&oracle) {
        for col in 1..6 {
            let (a, b, c): (f64, f64, f64) = (f[col].parse().unwrap(), r[col].parse().unwrap(), q[col].parse().unwrap());
            assert!((a - b).abs() < 1e-9, "step {} column {col}: {a} vs {b}", f[0]);
            assert!((a - c).abs() < 1e-12);
        }
        let residual: f64 = f[6].parse().unwrap();
        assert!(residual < 1e-10);
    }
}

#[test]
fn unreducible_k_writes_nan_columns() {
    let o = walk(&["run", "--n", "12", "--k", "1", "--engine", "full", "--steps", "4", "--phase", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[2..7], ["NaN"; 5]);
}

#[test]
fn sweep_writes_one_summary_row_per_n() {
    let o = walk(&["run", "--n-range", "100:400:100", "--k", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("n,k,phase,engine,steps,n_opt"));
    let ns: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["100", "200", "300", "400"]);
}

#[test]
fn json_document_has_spec_rows_and_summary() {
    let o = walk(&["run", "--n", "30", "--k", "3", "--steps", "5", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["spec"]["k_marked"], 3);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 6);
    assert_eq!(doc["summary"][0]["quantum_oracle_calls"], 10);
    assert_eq!(doc["rows"][0]["p_w"].as_array().unwrap().len(), 4);
}

#[test]
fn marked_list_is_equivalent_to_first_k() {
    let a = walk(&["run", "--n", "25", "--k", "3", "--steps", "10", "--engine", "full"]);
    let b = walk(&["run", "--n", "25", "--marked-list", "4,17,9", "--steps", "10", "--engine", "full"]);
    let p = |o: &Output| -> Vec<f64> {
        stdout(o)
            .lines()
            .skip(1)
            .take(11)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect()
    };
    for (x, y) in p(&a).iter().zip(p(&b)) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn stats_reports_exact_rationals() {
    let o = walk(&["stats", "--k", "3", "--runs", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("p_discovered,3,6.6666666666666663e-1,2/3"));
    assert!(text.contains("expected_runs_to_cover,,2.5000000000000000e0,5/2"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("stats.csv");
    let o = walk(&["stats", "--k", "4", "--runs", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("j=4: 0.52777777777777779 (19/36)"), "{text}");
    assert!(text.contains("j=3: 0.44444444444444442 (4/9)"), "{text}");
}

#[test]
fn stats_monte_carlo_counts_oracle_calls() {
    let o = walk(&["stats", "--k", "3", "--runs", "2", "--mode", "mc", "--n", "100", "--trials", "400", "--format", "json"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let calls = rows.iter().find(|r| r["quantity"] == "oracle_calls").unwrap();
    // 400 trials x 2 runs x 2 calls per step x 32 steps
    assert_eq!(calls["value"], 51200.0);
    assert_eq!(doc["spec"]["kind"], "simulated");
}

#[test]
fn verify_strict_passes() {
    let o = walk(&["verify", "--profile", "strict"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 7);
}

#[test]
fn verify_names_failing_case() {
    let o = walk(&["verify", "--inject-fault", "reflection-sum"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL unitarity: N=3 K=0 phi=0"));
}
