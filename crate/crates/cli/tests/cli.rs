use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn powertree(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powertree"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SQUARE: &str = "\
nodes 4
edge 0 1 1
edge 1 2 2
edge 2 3 1
edge 3 0 3
terminals 0 2
root 0
";

#[test]
fn solve_exact_prints_tree_record() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.mpst"), SQUARE).unwrap();
    let out = powertree(&["solve", "x.mpst", "--algo", "exact"], dir.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["tree"]["total_power"], "5");
    assert_eq!(v["tree"]["edges"], serde_json::json!([0, 1]));
}

#[test]
fn irr_record_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.mpst"), SQUARE).unwrap();
    let args = ["solve", "x.mpst", "--algo", "irr", "--k", "2", "--seed", "3", "--trace"];
    let a = powertree(&args, dir.path());
    let b = powertree(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(v["iterations"].as_u64().unwrap() >= 1);
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = powertree(&["solve", "x.mpst", "--frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(powertree(&["transmogrify"], dir.path()).status.code(), Some(2));
}

#[test]
fn failures_emit_error_record() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.mpst"), "nodes 2\nedge 0 1 -1\nterminals 0 1\n").unwrap();
    let out = powertree(&["solve", "bad.mpst", "--algo", "exact"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(v["error"], "instance");
    let out = powertree(&["path", "missing.mpst", "--from", "0", "--to", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.mpst"), SQUARE).unwrap();
    let star = "nodes 6\nedge 0 1 1\nedge 0 2 5\nedge 0 3 2\nedge 0 4 4\nedge 0 5 3\nterminals 1 2 3 4 5\nroot 1\n";
    fs::write(dir.path().join("star.mpst"), star).unwrap();
    let runs: [&[&str]; 9] = [
        &["path", "x.mpst", "--from", "0", "--to", "2"],
        &["component", "x.mpst", "--terminals", "0,2"],
        &["lp", "x.mpst", "--k", "2"],
        &["decompose", "star.mpst", "--delta", "3"],
        &["decompose", "star.mpst", "--method", "hpower", "--q", "1"],
        &["analyze", "classify", "star.mpst"],
        &["analyze", "witness", "star.mpst", "--node", "0", "--i", "2", "--trials", "1000"],
        &["analyze", "delta", "--kind", "spanning", "--max-i", "4"],
        &["gen", "--kind", "two-level", "--nodes", "6", "--terminals", "3", "--seed", "2"],
    ];
    for args in runs {
        let out = powertree(args, dir.path());
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let lp: Value = serde_json::from_str(&stdout(&powertree(runs[2], dir.path()))).unwrap();
    assert!((lp["objective"].as_f64().unwrap() - 5.0).abs() < 1e-6);
    let delta = stdout(&powertree(runs[7], dir.path()));
    assert_eq!(delta.lines().nth(2), Some("2,3/2"));
}

#[test]
fn gen_is_deterministic_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--nodes", "9", "--terminals", "4", "--seed", "11"];
    let a = stdout(&powertree(&args, dir.path()));
    assert_eq!(a, stdout(&powertree(&args, dir.path())));
    assert!(powertree::parse_instance(&a).is_ok());
}

fn strip_wall(csv_text: &str) -> Vec<String> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let wall = headers.iter().position(|h| h == "wall_ms").unwrap();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            r.iter().enumerate().filter(|&(i, _)| i != wall).map(|(_, f)| f).collect::<Vec<_>>().join(",")
        })
        .collect()
}

#[test]
fn bench_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let suite = "\
seed = 5
instance kind=uniform-random nodes=6 count=10 mode=spanning
solver exact
solver mst
solver irr k=3
";
    fs::write(dir.path().join("suite.cfg"), suite).unwrap();
    let one = powertree(&["bench", "suite.cfg", "--out", "a.csv", "--threads", "1"], dir.path());
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    let many = powertree(&["bench", "suite.cfg", "--out", "b.csv", "--threads", "4"], dir.path());
    assert!(many.status.success());
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let rows = strip_wall(&a);
    assert_eq!(rows.len(), 30);
    assert_eq!(rows, strip_wall(&b));
    assert!(a.starts_with("row,instance,kind,mode,"));
    let summary = stdout(&one);
    assert!(summary.contains("irr k=3,10,0,"));
    assert!(summary.contains("theoretical_factor_spanning,1.5000000"));

    let mut rdr = csv::Reader::from_reader(a.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let solver = headers.iter().position(|h| h == "solver").unwrap();
    let ratio = headers.iter().position(|h| h == "ratio").unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        if &rec[solver] == "mincost" {
            assert!(rec[ratio].parse::<f64>().unwrap() <= 2.0);
        }
    }
}

#[test]
fn bench_records_row_errors_without_aborting() {
    let dir = tempfile::tempdir().unwrap();
    // 14 nodes is above the branch-and-bound guard
    let suite = "instance nodes=14 terminals=3 count=2 density=0.1\nsolver exact\nsolver mincost\n";
    fs::write(dir.path().join("s.cfg"), suite).unwrap();
    let out = powertree(&["bench", "s.cfg"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains(",error,"));
    assert!(text.contains("exact,2,2,"));
}
