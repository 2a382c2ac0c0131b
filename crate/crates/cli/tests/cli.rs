use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn probsat(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_probsat"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TWO_WORLDS: &str = r#"{"kind": "pl", "worlds": [
  {"id": "u", "measure": "1/2", "valuation": {"p": true}},
  {"id": "v", "measure": "1/2", "valuation": {"p": false}}
]}"#;

#[test]
fn solve_verdicts_and_exit_codes() {
    let o = probsat(&["solve", "--logic", "ppl"], "P>=0.8 P>=0.6 p");
    assert_eq!((code(&o), stdout(&o).trim()), (0, "SAT"));
    let o = probsat(&["solve"], "P>=3/5 p & P>=3/5 ~p");
    assert_eq!((code(&o), stdout(&o).trim()), (1, "UNSAT"));
    let o = probsat(&["solve"], "P>=2 p");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("outside [0,1]"), "{}", stderr(&o));
    assert!(stderr(&o).contains('^'));
}

#[test]
fn solve_detects_the_logic() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    for (input, kind) in [("P>=1/2 p", "pl"), ("p & P>=1/2 ~p", "ppl"), ("[]p & <>q", "kripke")] {
        let o = probsat(&["solve", "--model", path_str(&model)], input);
        assert_eq!(code(&o), 0, "{input}");
        let json = std::fs::read_to_string(&model).unwrap();
        assert!(json.contains(&format!("\"kind\": \"{kind}\"")), "{input}: {json}");
    }
    let o = probsat(&["solve", "--logic", "pl"], "P>=1/2 P>=1/2 p");
    assert_eq!(code(&o), 2);
    let o = probsat(&["solve", "--logic", "d"], "P>=1/2 p");
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.txt");
    let o = probsat(&["solve", "--logic", "ppl", "--no-memo", "--trace", path_str(&trace)], "P>=1/2 p & ~P>=1/2 q");
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("NODE w T "));
    assert!(text.lines().any(|l| l.starts_with("PROB w:0-1 atoms=4")));
    assert!(text.lines().any(|l| l == "REALIZABLE w:0-1 yes"));
}

#[test]
fn check_pl_models() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.json");
    std::fs::write(&model, TWO_WORLDS).unwrap();
    let o = probsat(&["check", "--model", path_str(&model)], "P>=1/2 p");
    assert_eq!((code(&o), stdout(&o).trim()), (0, "HOLDS"));
    let o = probsat(&["check", "--model", path_str(&model)], "P>1/2 p");
    assert_eq!((code(&o), stdout(&o).trim()), (1, "FAILS"));
    std::fs::write(&model, TWO_WORLDS.replacen("1/2", "1/4", 1)).unwrap();
    let o = probsat(&["check", "--model", path_str(&model)], "P>=1/2 p");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("3/4"), "{}", stderr(&o));
}

#[test]
fn check_worlds_and_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("k.json");
    let o = probsat(&["solve", "--model", path_str(&model)], "~[]p & ~[]~p");
    assert_eq!(code(&o), 0);
    let o = probsat(&["check", "--model", path_str(&model)], "<>p & <>~p");
    assert_eq!(code(&o), 0);
    let o = probsat(&["check", "--model", path_str(&model), "--world", "nowhere"], "p");
    assert_eq!(code(&o), 2);
    let o = probsat(&["check", "--model", path_str(&model)], "P>=1 p");
    assert_eq!(code(&o), 2);
}

#[test]
fn translate_boxes() {
    for (input, out) in [("[]p", "P>=1 p"), ("<>p", "~P>=1 ~p"), ("[]([]p)", "P>=1 P>=1 p")] {
        let o = probsat(&["translate"], input);
        assert_eq!((code(&o), stdout(&o).trim()), (0, out));
    }
    assert_eq!(code(&probsat(&["translate"], "[]p &")), 2);
}

#[test]
fn fuzz_runs() {
    let o = probsat(&["fuzz", "--seed", "0", "--count", "100", "--profile", "pl"], "");
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = probsat(&["fuzz", "--profile", "modal", "--count", "100"], "");
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&probsat(&["fuzz", "--profile", "nope"], "")), 2);
}

#[test]
fn atoms_listing() {
    let o = probsat(&["atoms"], "P>=1/2 p & ~P>=1/3 q");
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("generators: p, q"));
    assert_eq!(out.lines().filter(|l| l.starts_with('a')).count(), 4);
    let o = probsat(&["atoms"], "p");
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with('a')).count(), 2);
    let many: Vec<String> = (0..17).map(|i| format!("x{i}")).collect();
    let o = probsat(&["atoms"], &many.join(" & "));
    assert_eq!(code(&o), 2);
}
