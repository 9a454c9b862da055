use std::io::Write;
use std::process::{Command, Output, Stdio};

fn quotree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quotree"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_prints_one_record_per_derivation() {
    let o = quotree(&[
        "--format",
        "records",
        "classify",
        "``That is the woman'', said he.",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(!out.is_empty());
    for line in out.lines() {
        assert!(line.starts_with("construction="), "{}", line);
    }
    assert!(out.contains("position=final inverted=true"));
}

#[test]
fn parse_failure_exits_one() {
    let o = quotree(&["parse", "sleeps Alice."]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no parse"));
    let o = quotree(&["parse", "Zork sleeps."]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown word"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(quotree(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        quotree(&["--format", "xml", "parse", "Alice sleeps."])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn normalize_reads_stdin_and_reports() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_quotree"))
        .args(["normalize", "--report"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"``It is,'' he said.\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "`` It is '' , he said .\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("commas=1 periods=0"));
}

#[test]
fn corpus_reports_totals() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/quoted-speech.corpus");
    let o = quotree(&["corpus", path]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let last = out.lines().last().unwrap();
    assert!(
        last.starts_with("PASS ") && last.ends_with("/40"),
        "{}",
        last
    );
}

#[test]
fn dumped_grammar_loads_back() {
    let o = quotree(&["dump-grammar"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("quotree-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("dumped.grammar");
    std::fs::write(&path, &o.stdout).unwrap();
    let again = quotree(&["--grammar", path.to_str().unwrap(), "dump-grammar"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(again.stdout, o.stdout);
}
