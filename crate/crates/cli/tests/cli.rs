use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subnorm")).args(args).output().expect("spawn subnorm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn star_ensemble_reports_mean_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let star = dir.path().join("star.json");
    let g = run(&["gen", "star", "--n", "20", "--f", "1", "--norm", "linf", "--out", path_str(&star)]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let o = run(&["ofl", "run", "--instance", path_str(&star), "--seeds", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert_eq!(column(&csv, "runs"), ["200"]);
    assert_eq!(column(&csv, "opt"), ["2"]);
    assert_eq!(column(&csv, "bound"), ["10"]);
    let mean: f64 = column(&csv, "mean")[0].parse().unwrap();
    assert!(mean <= 10.0, "mean {mean}");
}

#[test]
fn naive_on_star_pays_one_per_leaf() {
    let dir = tempfile::tempdir().unwrap();
    let star = dir.path().join("star.json");
    let trace = dir.path().join("trace.csv");
    assert!(run(&["gen", "star", "--n", "12", "--out", path_str(&star)]).status.success());
    let o = run(&["ofl", "naive", "--instance", path_str(&star), "--trace", path_str(&trace)]);
    assert!(o.status.success());
    assert_eq!(column(&stdout(&o), "mean"), ["12"]);
    let t = std::fs::read_to_string(&trace).unwrap();
    assert!(t.starts_with("step,opened,level,d,dhat,tau,p0,p1\n"));
    assert_eq!(t.lines().count(), 13);
}

#[test]
fn sweep_emits_gap_table_with_max_ratio() {
    let o = run(&["probe", "sweep", "--n", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert!(csv.starts_with("id,adap,na,ratio,norm_kind,family_kind,max_ratio\n"));
    let ratios: Vec<f64> = column(&csv, "ratio").iter().map(|r| r.parse().unwrap()).collect();
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(max <= 2.0 + 1e-9);
    let reported: f64 = csv.lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((reported - max).abs() < 1e-12);
}

#[test]
fn probing_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("p.json");
    assert!(run(&["gen", "probing", "--n", "3", "--support", "3", "--seed", "9", "--out", path_str(&inst)]).status.success());
    let gap = run(&["probe", "gap", "--instance", path_str(&inst)]);
    assert!(gap.status.success());
    let v: serde_json::Value = serde_json::from_slice(&gap.stdout).unwrap();
    let adap = v["adaptive"].as_f64().unwrap();
    let na = v["nonadaptive"].as_f64().unwrap();
    assert!(adap >= na - 1e-9);
    let a = run(&["probe", "adap", "--instance", path_str(&inst)]);
    let av: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((av["value"].as_f64().unwrap() - adap).abs() < 1e-12);
}

#[test]
fn generators_are_byte_identical_across_runs() {
    let a = run(&["gen", "euclid", "--points", "6", "--requests", "5", "--costs", "pow2:0:3", "--seed", "42"]);
    let b = run(&["gen", "euclid", "--points", "6", "--requests", "5", "--costs", "pow2:0:3", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "probing", "--seed", "42"]);
    let d = run(&["gen", "probing", "--seed", "42"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn norm_subcommands() {
    let o = run(&["norms", "rho", "--norm", "lp:2", "--dim", "16"]);
    assert_eq!(stdout(&o).trim(), "4");
    let o = run(&["norms", "rho", "--norm", r#"{"kind":"top_k","dim":20,"k":5}"#]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "5");
    let o = run(&["norms", "check", "--norm", "l2", "--dim", "4", "--trials", "500"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["submodular"], true);
    assert_eq!(v["dr_submodular"], false);
    let o = run(&["norms", "approx", "--norm", "l1", "--dim", "8"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["levels"], serde_json::json!([1, 2, 4, 8]));
}

#[test]
fn loadbal_greedy_and_opt() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("lb.json");
    std::fs::write(
        &inst,
        r#"{"schema":1,"p":[[1,2,3],[2,1,1]],"inner_norms":[{"kind":"lp","dim":3,"p":1},{"kind":"lp","dim":3,"p":1}]}"#,
    )
    .unwrap();
    let o = run(&["loadbal", "opt", "--instance", path_str(&inst)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    assert_eq!(column(&csv, "greedy_cost"), column(&csv, "opt_cost"));
    assert_eq!(column(&csv, "ratio"), ["1"]);
}

#[test]
fn lowerbound_writes_one_row_per_height() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lb.csv");
    let o = run(&["ofl", "lowerbound", "--k", "2,3", "--seeds", "20", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(column(&csv, "k"), ["2", "3"]);
    assert_eq!(column(&csv, "n"), ["4", "27"]);
}

#[test]
fn unknown_flag_exits_one_with_usage() {
    let o = run(&["ofl", "run", "--definitely-not-a-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn validation_error_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("bad.json");
    std::fs::write(
        &inst,
        r#"{"schema":1,"metric":{"type":"matrix","dist":[[0,1],[2,0]]},"requests":[0],"costs":{"uniform":1},"norm":{"kind":"lp","dim":1,"p":1}}"#,
    )
    .unwrap();
    let o = run(&["ofl", "opt", "--instance", path_str(&inst)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let o = run(&["ofl", "opt", "--instance", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn budget_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("big.json");
    assert!(run(&["gen", "euclid", "--points", "30", "--requests", "5", "--out", path_str(&inst)]).status.success());
    let o = run(&["ofl", "opt", "--instance", path_str(&inst)]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["probe", "sweep", "--n", "5"]);
    assert_ne!(o.status.code(), Some(0));
}
