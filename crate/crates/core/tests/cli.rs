//! End-to-end tests of the `feynmotic` binary: golden reports for every
//! example graph, input-format agreement, numerical reports and error
//! documents.  Set `UPDATE_GOLDEN=1` to rewrite the golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde_json::Value;

const COMMANDS: &[&[&str]] = &[
    &["poly", "--reconstruct"],
    &["motic"],
    &["coproduct", "--antipode"],
    &["factor-check"],
    &["converge", "-d", "4"],
    &["strata", "--max-degree", "2"],
    &["atlas"],
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn graph_files() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(golden_dir().join("graphs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

fn run(args: &[&str], stdin: Option<&str>) -> (i32, String) {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_feynmotic"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    let out = child.wait_with_output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = run(args, None);
    assert_eq!(code, 0, "{args:?}: {out}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn golden_reports() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for file in graph_files() {
        let name = file.file_stem().unwrap().to_str().unwrap().to_string();
        for cmd in COMMANDS {
            // The wheel's atlas has 96 charts; it is covered by the library tests.
            if name == "wheel3" && cmd[0] == "atlas" {
                continue;
            }
            let mut args: Vec<&str> = vec![cmd[0], file.to_str().unwrap()];
            args.extend_from_slice(&cmd[1..]);
            let (code, out) = run(&args, None);
            assert_eq!(code, 0, "{args:?}: {out}");
            let path = golden_dir().join(format!("{name}.{}.json", cmd[0]));
            if update {
                std::fs::write(&path, &out).unwrap();
            } else if std::fs::read_to_string(&path).ok().as_deref() != Some(out.as_str()) {
                mismatches.push(path.display().to_string());
            }
        }
    }
    assert!(mismatches.is_empty(), "reports differ from golden files: {mismatches:?}");
}

#[test]
fn files_agree_with_builtins_and_stdin() {
    for file in graph_files() {
        let name = file.file_stem().unwrap().to_str().unwrap();
        let from_file = json(&["poly", file.to_str().unwrap()]);
        let builtin = json(&["poly", &format!("builtin:{name}")]);
        assert_eq!(from_file, builtin, "{name}");
        let text = std::fs::read_to_string(&file).unwrap();
        let (code, out) = run(&["poly", "-"], Some(&text));
        assert_eq!(code, 0);
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap(), builtin, "{name} via stdin");
    }
}

#[test]
fn documented_examples_on_the_command_line() {
    let g = golden_dir().join("graphs");
    let dunce = g.join("dunce.json");
    let v = json(&["converge", dunce.to_str().unwrap(), "-d", "4"]);
    assert_eq!(v["convergent"], false);
    assert_eq!(v["witness"], serde_json::json!([3, 4]));
    assert_eq!(v["schema"], "feynmotic-report/1");

    let w3 = g.join("wheel3.json");
    let v = json(&["integrate", w3.to_str().unwrap(), "-d", "4", "--rel-tol", "1e-3"]);
    let value = v["result"]["value"]["re"].as_f64().unwrap();
    let err = v["result"]["error"].as_f64().unwrap();
    assert!((value - 7.2123414189).abs() < 0.01 * 7.2123414189, "{value}");
    assert!(err > 0.0 && err < 0.02);
    // Fixed seed: identical reports.
    assert_eq!(v, json(&["integrate", w3.to_str().unwrap(), "-d", "4", "--rel-tol", "1e-3"]));

    let bubble = g.join("bubble.txt");
    let v = json(&["integrate", bubble.to_str().unwrap(), "-d", "2", "--point", "s1_1=1, msq1=1"]);
    let closed = 2.0 / 5f64.sqrt() * ((3.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((v["result"]["value"]["re"].as_f64().unwrap() - closed).abs() < 1e-6);
}

#[test]
fn error_documents_and_exit_codes() {
    let (code, out) = run(&["poly", "-"], Some("vertices: 2\ne 1: 1 3\n"));
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["exit_code"], 2);
    assert!(v["error"]["line"].is_number());

    let (code, out) = run(&["poly", "-"], Some("vertices: 2\nleg: 1 q1\nleg: 2 q2\n"));
    assert_eq!(code, 2, "legs in two components: {out}");

    let (code, _) = run(&["poly", "-"], Some("vertices: 1\n"));
    assert_eq!(code, 0, "a single vertex without edges is a valid graph");

    let dunce = golden_dir().join("graphs/dunce.json");
    let (code, out) = run(&["integrate", dunce.to_str().unwrap(), "-d", "4", "--point", "s1_1=1, msq1=1"], None);
    assert_eq!(code, 3, "divergent integral: {out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["witness"], serde_json::json!([3, 4]));

    let (code, _) = run(&["no-such-command"], None);
    assert_eq!(code, 2);
}
