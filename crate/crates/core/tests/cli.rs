use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tabsem"))
}

fn example(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tabsem-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn example_matches_golden_file() {
    let (code, stdout, _) = run(&["example"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, include_str!("golden/example.txt"));
}

#[test]
fn fixpoint_reports_depth_and_convergence() {
    let (code, stdout, _) = run(&["fixpoint", &example("appmem.pl"), "--depth", "1"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("depth: 1\n"));
    assert!(stdout.contains("converged: true\n"));
    assert!(stdout.contains("app/3:"));
    assert!(stdout.contains("mem/2:"));
}

#[test]
fn depth_defaults_to_two() {
    let (_, stdout, _) = run(&["fixpoint", &example("appmem.pl"), "--format", "records"]);
    assert!(stdout.contains("depth: 2\n"));
    assert!(stdout.contains("\n(nil,'.'(nil,nil))\n"));
}

#[test]
fn iteration_cap_exits_with_two() {
    let (code, stdout, _) = run(&["fixpoint", &example("appmem.pl"), "--max-iters", "1"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("converged: false"));
}

#[test]
fn syntax_errors_exit_with_one() {
    let bad = scratch("bad.pl", "p(X :- q.\n");
    let (code, stdout, stderr) = run(&["fixpoint", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stdout.is_empty());
    assert!(stderr.contains("bad.pl: 1:5: syntax error"), "{stderr}");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&["fixpoint"]).0, 1);
    assert_eq!(run(&["nonsense"]).0, 1);
    assert_eq!(
        run(&["fixpoint", &example("appmem.pl"), "--max-iters", "0"]).0,
        1
    );
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn query_answers() {
    let file = example("appmem.pl");
    let (code, stdout, _) = run(&["query", &file, "app(X, Y, [a])"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("answers: 2\n"));
    assert!(
        stdout.ends_with("\nX || '.'(a,nil) | nil\nY || nil        | '.'(a,nil)\n"),
        "{stdout}"
    );
    assert!(run(&["query", &file, "mem(a, [b, a])"])
        .1
        .ends_with("\nyes\n"));
    assert!(run(&["query", &file, "mem(a, [b, b])"])
        .1
        .ends_with("\nno\n"));
    let (_, records, _) = run(&["query", &file, "app(X, Y, [a])", "--format", "records"]);
    assert!(records.ends_with("\nX='.'(a,nil) Y=nil\nX=nil Y='.'(a,nil)\n"));
    assert_eq!(run(&["query", &file, "len(X)"]).0, 1);
}

#[test]
fn extern_relations_stay_fixed() {
    let prog = scratch(
        "path.pl",
        "path(X, Y) :- edge(X, Y).\npath(X, Z) :- edge(X, Y), path(Y, Z).\n",
    );
    let edges = scratch("edge.rel", "(a,b)\n(b,c)\n");
    let binding = format!("edge={}", edges.display());
    let (code, stdout, _) = run(&[
        "fixpoint",
        prog.to_str().unwrap(),
        "--extern",
        &binding,
        "--format",
        "records",
        "--depth",
        "0",
    ]);
    assert_eq!(code, 0, "{stdout}");
    assert!(
        stdout.ends_with("edge/2:\n(a,b)\n(b,c)\npath/2:\n(a,b)\n(a,c)\n(b,c)\n"),
        "{stdout}"
    );

    let defined = scratch("defined.pl", "edge(a, b).\n");
    assert_eq!(
        run(&["fixpoint", defined.to_str().unwrap(), "--extern", &binding]).0,
        1
    );
    assert_eq!(
        run(&["fixpoint", prog.to_str().unwrap(), "--extern", "edge"]).0,
        1
    );
}

#[test]
fn extra_symbols_widen_the_universe() {
    let prog = scratch("facts.pl", "p(a).\nq(X) :- p(a).\n");
    let (_, narrow, _) = run(&["fixpoint", prog.to_str().unwrap(), "--format", "records"]);
    assert!(narrow.ends_with("q/1:\n(a)\n"));
    let (_, wide, _) = run(&[
        "fixpoint",
        prog.to_str().unwrap(),
        "--format",
        "records",
        "--symbol",
        "b",
    ]);
    assert!(wide.ends_with("q/1:\n(a)\n(b)\n"));
    assert_eq!(
        run(&["fixpoint", prog.to_str().unwrap(), "--symbol", "p/x"]).0,
        1
    );
}

#[test]
fn check_laws_is_deterministic() {
    let args = [
        "check-laws",
        "--seed",
        "11",
        "--cases",
        "30",
        "--depth",
        "1",
    ];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    assert!(first.contains("depth: 1"));
    assert!(first.ends_with("all laws hold\n"));
    assert_eq!(run(&args).1, first);
}
