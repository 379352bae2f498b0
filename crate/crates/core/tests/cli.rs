use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lio")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn program(dir: &Path, name: &str, src: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, src).unwrap();
    p
}

#[test]
fn run_prints_result_and_labels() {
    let dir = tempfile::tempdir().unwrap();
    let p = program(dir.path(), "a.lio", "unlabel(secret s) + 1\n");
    let o = lio(&["run", p.to_str().unwrap(), "--lattice", "two-point", "--secret", "s=H:4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "result: 5\nlabel: H\nclearance: H\n");
}

#[test]
fn observer_sees_nothing_of_a_high_result() {
    let dir = tempfile::tempdir().unwrap();
    let p = program(dir.path(), "a.lio", "unlabel(secret s) + 1\n");
    let o = lio(&["run", p.to_str().unwrap(), "--lattice", "two-point", "--secret", "s=H:4", "--observe", "L"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "observer L\noutcome: hidden\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let stop = program(dir.path(), "stop.lio", "let r = newRef L 0 in writeRef r (unlabel(secret s))");
    let o = lio(&["run", stop.to_str().unwrap(), "--lattice", "two-point", "--secret", "s=H:4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("result: monitor stop IFCViolation"));

    let throw = program(dir.path(), "throw.lio", "throw 1");
    assert_eq!(lio(&["run", throw.to_str().unwrap(), "--lattice", "two-point"]).status.code(), Some(3));

    let bad = program(dir.path(), "bad.lio", "1 +");
    let o = lio(&["run", bad.to_str().unwrap(), "--lattice", "two-point"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));

    assert_eq!(lio(&["run", throw.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn trace_file_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = program(dir.path(), "a.lio", "unlabel(secret s)");
    let out = dir.path().join("trace.json");
    let o = lio(&[
        "run",
        p.to_str().unwrap(),
        "--lattice",
        "principal",
        "--secret",
        "s=<{A}|{}>:1",
        "--trace",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert!(v.is_object());
}

#[test]
fn ni_check_passes_and_mutation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("ni.json");
    let o = lio(&["ni-check", "--pairs", "300", "--json", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("pairs 300 pass 300 fail 0"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["fail"], 0);

    let o = lio(&["ni-check", "--pairs", "300", "--mutation", "unlabel-no-taint"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("FAIL seed "));
}

#[test]
fn chair_demo_golden_and_bless() {
    let scripts = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/chair");
    let script = scripts.join("normal_review.json");
    let golden = scripts.join("normal_review.golden");
    let o = lio(&["chair-demo", script.to_str().unwrap(), "--golden", golden.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), fs::read_to_string(&golden).unwrap());

    let dir = tempfile::tempdir().unwrap();
    let fresh = dir.path().join("fresh.golden");
    fs::write(&fresh, "[1] something else\n").unwrap();
    let o = lio(&["chair-demo", script.to_str().unwrap(), "--golden", fresh.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at line 1"));
    let o = lio(&["chair-demo", script.to_str().unwrap(), "--golden", fresh.to_str().unwrap(), "--bless"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&fresh).unwrap(), fs::read_to_string(&golden).unwrap());

    assert_eq!(lio(&["chair-demo", script.to_str().unwrap(), "--bless"]).status.code(), Some(1));
}
