use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_birkhoff")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("birkhoff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

const J4: &str = "n 4\n1/4 1/4 1/4 1/4\n1/4 1/4 1/4 1/4\n1/4 1/4 1/4 1/4\n1/4 1/4 1/4 1/4\n";
const MID3: &str = "n 3\n2/3 1/6 1/6\n1/6 2/3 1/6\n1/6 1/6 2/3\n";

#[test]
fn delta_of_j4() {
    let f = write_tmp("j4.txt", J4);
    let out = run(&["delta", f.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().next(), Some("delta = 0, erdos = true"));
}

#[test]
fn delta_json() {
    let f = write_tmp("mid3.txt", MID3);
    let out = run(&["--json", "delta", f.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta"], "1/2");
    assert_eq!(v["is_erdos"], false);
    assert_eq!(v["witness"]["sigma"], "1 2 3");
}

#[test]
fn exit_codes() {
    let mid = write_tmp("mid3b.txt", MID3);
    assert_eq!(run(&["delta", "--require-erdos", mid.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["delta", mid.to_str().unwrap()]).status.code(), Some(0));

    let bad = write_tmp("bad.txt", "n 2\n1 1\n0 0\n");
    let out = run(&["delta", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty() && !out.stderr.is_empty());

    let garbled = write_tmp("garbled.txt", "n 2\n1 x\n0 1\n");
    assert_eq!(run(&["maxtrace", garbled.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["delta", "/definitely/not/here"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["orbits", "--n", "4"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--n", "5"]).status.code(), Some(2));
    assert_eq!(run(&["kernel-check", "--kernel", "cosine:2", "--m", "2"]).status.code(), Some(2));
    assert_eq!(run(&["alpha3", "--alpha", "0.1", "--x", "0.9"]).status.code(), Some(2));
}

#[test]
fn maxtrace_methods_agree() {
    let f = write_tmp("m.txt", "n 3\n1 -2 3/2\n0 5 -1\n7/3 1 0\n");
    let a = stdout(&run(&["maxtrace", "--method", "brute", f.to_str().unwrap()]));
    let b = stdout(&run(&["maxtrace", "--method", "assign", f.to_str().unwrap()]));
    assert_eq!(a, b);
    assert!(a.starts_with("maxtrace = 53/6\n"), "{a}");
}

#[test]
fn equiv_reports_witness() {
    let a = write_tmp("ea.txt", "n 3\n1/2 1/2 0\n0 1/2 1/2\n1/2 0 1/2\n");
    let b = write_tmp("eb.txt", "n 3\n0 1/2 1/2\n1/2 1/2 0\n1/2 0 1/2\n");
    let out = stdout(&run(&["equiv", a.to_str().unwrap(), b.to_str().unwrap()]));
    assert!(out.starts_with("equivalent = true\n"));
    let j = write_tmp("ej.txt", "n 3\n1/3 1/3 1/3\n1/3 1/3 1/3\n1/3 1/3 1/3\n");
    let out = stdout(&run(&["equiv", a.to_str().unwrap(), j.to_str().unwrap()]));
    assert_eq!(out, "equivalent = false\n");
}

#[test]
fn enumerate_n3_round_trips() {
    let out = stdout(&run(&["enumerate", "--n", "3"]));
    let (head, body) = out.split_once('\n').unwrap();
    assert_eq!(head, "6 classes (6 up to transpose)");
    let records = birkhoff::format::parse_records(body).unwrap();
    assert_eq!(records.len(), 6);
    let mats: Vec<_> = records.iter().map(|r| r.matrix.clone()).collect();
    assert_eq!(birkhoff::format::write_records(&mats), body.trim_start_matches('\n'));
}

#[test]
fn orbits_commands() {
    assert_eq!(stdout(&run(&["orbits", "--n", "4", "--k", "4"])), "41\n");
    assert_eq!(stdout(&run(&["orbits", "--n", "4", "--k", "4", "--method", "burnside"])), "41\n");
    assert_eq!(stdout(&run(&["orbits", "--n", "5", "--k", "3"])), "37\n");
    let table = stdout(&run(&["orbits-table", "--n", "3", "--kmax", "6"]));
    assert_eq!(table, "k\tf\n1\t1\n2\t2\n3\t2\n4\t2\n5\t1\n6\t1\n");
}

#[test]
fn alpha_commands() {
    let out = run(&["alpha3", "--alpha", "0.1", "--x", "0.36"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("identity witness = true, symmetric = true"));
    let out = run(&["--json", "alpha-n", "--n", "5", "--alpha", "0.5", "--x", "0.3"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["report"]["delta"].as_f64().unwrap() - 0.5).abs() < 1e-10, "{v}");

    let base = write_tmp("base.txt", "n 3\n1 0 0\n0 1/2 1/2\n0 1/2 1/2\n");
    let out = run(&["alpha-curve", "--n", "5", "--alpha", "0.5", "--base", base.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("t = "));
    assert!(text.contains("\nn 5\n"));
}

#[test]
fn array_command() {
    let out = stdout(&run(&["array", "--rows", "8", "--l2", "--pairing", "4", "--max-col", "3"]));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("1 1 1/2"));
    assert!(out.contains("pairing(4) = 85/64\n"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("l2 = ")));
    // Pairing terms beyond the generated rows are refused.
    assert_eq!(run(&["array", "--rows", "4", "--pairing", "3"]).status.code(), Some(2));
}

#[test]
fn kernel_check_is_reproducible() {
    let a = run(&["kernel-check", "--kernel", "random:17", "--m", "5"]);
    let b = run(&["kernel-check", "--kernel", "random:17", "--m", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = run(&["--json", "kernel-check", "--kernel", "cosine:0.5", "--m", "4"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn mc_is_reproducible() {
    let a = run(&["mc", "--n", "5", "--iters", "100", "--seed", "9"]);
    let b = run(&["mc", "--n", "5", "--iters", "100", "--seed", "9", "--workers", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("n\titers\td\testimate\tci_low\tci_high\n5\t100\t"));
}
