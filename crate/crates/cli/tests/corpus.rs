use std::path::PathBuf;
use std::process::Command;

struct Case {
    args: String,
    stdout: Vec<String>,
    code: i32,
}

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn cases() -> Vec<Case> {
    let text = std::fs::read_to_string(corpus().join("expected.txt")).unwrap();
    let mut cases: Vec<Case> = Vec::new();
    for line in text.lines() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(args) = line.strip_prefix("$ episteme ") {
            cases.push(Case {
                args: args.to_string(),
                stdout: Vec::new(),
                code: 0,
            });
            continue;
        }
        let case = cases.last_mut().expect("output before the first command");
        match line.strip_prefix("[exit ").and_then(|r| r.strip_suffix(']')) {
            Some(code) => case.code = code.parse().unwrap(),
            None => case.stdout.push(line.to_string()),
        }
    }
    cases
}

fn run(args: &str) -> (Vec<String>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_episteme"))
        .args(shlex::split(args).expect("balanced quotes"))
        .current_dir(corpus())
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    (stdout.lines().map(str::to_string).collect(), out.status.code().unwrap_or(-1))
}

#[test]
fn corpus_reproduces_recorded_output() {
    let cases = cases();
    assert!(cases.len() >= 40);
    let mut bad = Vec::new();
    for case in &cases {
        let (stdout, code) = run(&case.args);
        if stdout != case.stdout || code != case.code {
            bad.push(format!("{}\n  got exit {code}: {:?}", case.args, stdout));
        }
    }
    assert!(bad.is_empty(), "{} mismatches:\n{}", bad.len(), bad.join("\n"));
}

#[test]
fn corpus_output_is_stable_across_runs() {
    for case in cases().iter().filter(|c| c.args.starts_with("update") || c.args.starts_with("closure")) {
        assert_eq!(run(&case.args), run(&case.args), "{}", case.args);
    }
}
