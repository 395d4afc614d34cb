use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnc-engine")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_counts() {
    let o = run(&["enumerate", "bnc", "--chi", "lrlllr"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("count: 132\n"));

    let o = run(&["enumerate", "bncffb", "--chihat", "rbl", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 4);

    let o = run(&["enumerate", "lr", "--chi", "lr", "--eps", "1,2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 4);
}

#[test]
fn mobius_of_two_points() {
    let o = run(&["mobius", "--chi", "ll", "--pi", "0,1", "--sigma", "0,0"]);
    assert_eq!(stdout(&o), "-1\n");
    let o = run(&["mobius", "--chi", "lr", "--sigma", "0,0"]);
    assert_eq!(stdout(&o), "{1,2} 1\n{1},{2} -1\n");
}

#[test]
fn cumulants_round_trip_and_are_deterministic() {
    let a = run(&["cumulants", "--chi", "lrl", "--seed", "7"]);
    let b = run(&["cumulants", "--chi", "lrl", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["round_trip"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["enumerate", "bnc", "--chi", "lrx"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "bnc", "--chi", "llllllllllll"]).status.code(), Some(3));
    assert_eq!(run(&["enumerate", "bnc", "--chi", "lllllllllll", "--cap", "11", "--format", "json"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "bb-axioms", "--fixture", "diag2-bad"]).status.code(), Some(4));
    assert_eq!(run(&["verify", "bb-axioms", "--fixture", "diag2"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "bifree", "--chi", "lrl", "--eps", "1,2,1", "--perturb"]).status.code(), Some(5));
    assert_eq!(run(&["mobius", "--chi", "ll"]).status.code(), Some(2));
}

#[test]
fn ffb_suites() {
    let o = run(&["verify", "ffb-system", "--word-cap", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["verify", "ffb-system", "--word-cap", "3", "--perturb"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("FAIL embedding/system/annihilation-d"));

    assert!(run(&["verify", "ffb-independence", "--word-cap", "3"]).status.success());
    assert_eq!(run(&["verify", "ffb-independence", "--fixture", "m2-scalar", "--word-cap", "3"]).status.code(), Some(5));
    assert_eq!(run(&["verify", "ffb-independence", "--perturb", "--word-cap", "3"]).status.code(), Some(5));
}

#[test]
fn lr_decompose_and_bifree_pass() {
    let o = run(&["verify", "lr-decompose", "--chi", "lrl", "--eps", "1,2,1", "--projected", "2"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = run(&["verify", "bifree", "--chi", "lrrl", "--eps", "1,2,2,1", "--format", "json"]);
    assert!(o.status.success());
}

#[test]
fn render_outputs() {
    let o = run(&["render", "--chi", "lrlllr", "--pi", "{1,2,5,6},{3,4}"]);
    assert!(stdout(&o).starts_with("\\documentclass[tikz]{standalone}"));
    let o = run(&["render", "--chi", "lrlllr", "--pi", "{1,4,5,6},{2,3}"]);
    assert_ne!(o.status.code(), Some(0));
    let o = run(&["render", "--chi", "lr", "--eps", "1,2", "--index", "1", "--format", "dot"]);
    assert!(stdout(&o).starts_with("graph"));
    assert_eq!(run(&["render", "--chi", "lr", "--eps", "1,2", "--index", "9"]).status.code(), Some(2));
}
