use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pursuit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pursuit")).args(args).output().expect("run pursuit")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn unknown_family_is_a_config_fault() {
    let o = pursuit(&["solve", "--graph", "moebius n=5", "--objective", "finite(0)"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown graph family"));
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "graph.family = cycle\ngraph.n = 500\ncops.agent = sprinter\nrobber.agent = cycle\n").unwrap();
    let o = pursuit(&["play", path_str(&cfg)]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn path_is_cop_win_and_small_cycle_is_robber_win() {
    let o = pursuit(&["solve", "--graph", "path n=20", "--objective", "finite(0,19)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("winner cops"), "{}", stdout(&o));

    let o = pursuit(&["solve", "--graph", "cycle n=4", "--objective", "finite(0,1,2,3)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("winner robber"), "{}", stdout(&o));
}

#[test]
fn oversized_arena_is_inconclusive() {
    let o = pursuit(&["solve", "--graph", "complete n=30", "--cops", "3", "--objective", "finite(0)", "--budget", "1000"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn solve_writes_table_and_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.txt");
    let strat = dir.path().join("s.txt");
    let o = pursuit(&[
        "solve",
        "--graph",
        "cycle n=5",
        "--objective",
        "ball(center=0,radius=1)",
        "--table",
        path_str(&table),
        "--strategy",
        path_str(&strat),
    ]);
    assert_eq!(code(&o), 0);
    assert!(!fs::read_to_string(&table).unwrap().is_empty());
    assert!(fs::metadata(&strat).is_ok());
}

#[test]
fn trees_are_zero_hyperbolic() {
    let o = pursuit(&["verify", "hyperbolicity", "--graph", "random_tree n=40 seed=2", "--expect", "0"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("delta 0"));
}

#[test]
fn wrong_hyperbolicity_expectation_fails() {
    let o = pursuit(&["verify", "hyperbolicity", "--graph", "cycle n=12", "--budget", "16", "--expect", "1"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
}

#[test]
fn planted_fatness_violation_is_caught_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("k4.model");
    let o = pursuit(&["verify", "fatminor", "--pattern", "k4", "--fatness", "6", "--write", path_str(&model)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = pursuit(&["verify", "fatminor", "--model", path_str(&model)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = pursuit(&["verify", "fatminor", "--model", path_str(&model), "--claim", "30"]);
    assert_eq!(code(&o), 2);
    let out = stdout(&o);
    assert!(out.contains("FAIL"), "{}", out);
    assert!(out.contains("d("), "{}", out);
}

#[test]
fn complete_graph_havens() {
    let o = pursuit(&["verify", "haven", "--graph", "complete n=4", "--order", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("found"), "{}", stdout(&o));

    let o = pursuit(&["verify", "haven", "--graph", "complete n=4", "--order", "5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("none"), "{}", stdout(&o));
}

#[test]
fn decomposition_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let td = dir.path().join("g.td");
    let o = pursuit(&["verify", "treedecomp", "--graph", "square_grid rows=3 cols=3", "--write", path_str(&td)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("treewidth 3"), "{}", stdout(&o));
    let o = pursuit(&["verify", "treedecomp", "--graph", "square_grid rows=3 cols=3", "--decomp", path_str(&td)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    fs::write(&td, "bag 0: 0 1 2\n").unwrap();
    let o = pursuit(&["verify", "treedecomp", "--graph", "square_grid rows=3 cols=3", "--decomp", path_str(&td)]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
}

#[test]
fn qi_builtin_passes() {
    let o = pursuit(&["verify", "qi", "--builtin", "path-row", "--pairs", "500"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

const CONFIG: &str = "\
# two cycle lengths against two cop scripts
graph.family = cycle
graph.n = [400, 500]
cops.agent = [greedy, random]
cops.count = 1
cops.speed = 1
cops.reach = 1
robber.agent = cycle
horizon = 1200
seed = 3
";

#[test]
fn play_reports_are_reproducible_and_traces_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, CONFIG).unwrap();
    let r1 = dir.path().join("r1.txt");
    let r2 = dir.path().join("r2.txt");
    let traces = dir.path().join("traces");

    let o = pursuit(&["play", path_str(&cfg), "--workers", "4", "--report", path_str(&r1), "--traces", path_str(&traces)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = pursuit(&["play", path_str(&cfg), "--workers", "1", "--report", path_str(&r2)]);
    assert_eq!(code(&o), 0);
    let a = fs::read_to_string(&r1).unwrap();
    assert_eq!(a, fs::read_to_string(&r2).unwrap());
    assert!(a.contains("cells 4"));

    for i in 0..4 {
        let t = traces.join(format!("cell-{}.trace", i));
        let o = pursuit(&["replay", path_str(&t)]);
        assert_eq!(code(&o), 0, "cell {}: {}", i, stdout(&o));
    }
}

#[test]
fn tampered_trace_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, CONFIG.replace("[400, 500]", "400").replace("[greedy, random]", "greedy")).unwrap();
    let traces = dir.path().join("traces");
    let o = pursuit(&["play", path_str(&cfg), "--traces", path_str(&traces)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let t = traces.join("cell-0.trace");
    let text = fs::read_to_string(&t).unwrap();
    let line = text.lines().find(|l| l.contains("mover=robber")).expect("robber move").to_string();
    let path_field = line.split_whitespace().find(|f| f.starts_with("path=")).expect("path field").to_string();
    let tampered = text.replacen(&line, &line.replacen(&path_field, "path=0,210", 1), 1);
    fs::write(&t, tampered).unwrap();
    let o = pursuit(&["replay", path_str(&t)]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
}

#[test]
fn unknown_suite_is_a_config_fault() {
    let o = pursuit(&["suite", "nonsense"]);
    assert_eq!(code(&o), 4);
}
