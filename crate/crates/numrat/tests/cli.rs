//! End-to-end tests of the command line binary: exit codes, pinned outputs,
//! byte determinism, and a blowup/minimalize file round trip.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numrat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Materialize a catalogue fixture as a config file via the binary itself.
fn fixture_file(dir: &Path, name: &str) -> PathBuf {
    let out = run(&["catalogue", "fixture", name]);
    assert_eq!(code(&out), 0, "fixture {name}: {}", stderr_of(&out));
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, out.stdout).unwrap();
    path
}

#[test]
fn exit_codes_separate_input_precondition_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let e6 = fixture_file(dir.path(), "e6");
    let crepant = fixture_file(dir.path(), "crepant");

    // Verdicts are data, not exit codes: both directions exit 0.
    assert_eq!(code(&run(&["rational", crepant.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["rational", e6.to_str().unwrap()])), 0);

    // Input errors exit 2.
    let garbled = dir.path().join("garbled.json");
    fs::write(&garbled, "{not json").unwrap();
    assert_eq!(code(&run(&["validate", garbled.to_str().unwrap()])), 2);

    let bad_rank = dir.path().join("bad_rank.json");
    fs::write(
        &bad_rank,
        r#"{"rank": 3, "vertices": [{"id": "A", "self_intersection": -2}], "edges": [], "curves": []}"#,
    )
    .unwrap();
    let out = run(&["classify", bad_rank.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr_of(&out).contains("perfect square"), "{}", stderr_of(&out));

    let dangling = dir.path().join("dangling.json");
    fs::write(
        &dangling,
        r#"{"rank": 1, "vertices": [{"id": "A", "self_intersection": -2}], "edges": [{"a": "A", "b": "B"}], "curves": []}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["validate", dangling.to_str().unwrap()])), 2);

    assert_eq!(code(&run(&["chi", "/nonexistent/config.json", "--divisor", "E:1"])), 2);
    assert_eq!(code(&run(&["catalogue", "fixture", "no-such-fixture"])), 2);
    assert_eq!(
        code(&run(&["rational", crepant.to_str().unwrap(), "--method", "brute", "--bound", "0"])),
        2
    );

    // Precondition failures exit 3: the special criterion needs a log
    // terminal graph, and the elliptic fixture is not one.
    let out = run(&["rational", e6.to_str().unwrap(), "--method", "special"]);
    assert_eq!(code(&out), 3, "{}", stderr_of(&out));
}

#[test]
fn pinned_outputs_match_exact_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    let e6 = fixture_file(dir.path(), "e6");
    let crepant = fixture_file(dir.path(), "crepant");

    let out = run(&["rational", e6.to_str().unwrap(), "--method", "brute", "--bound", "3", "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["rational"], Value::Bool(false));
    assert_eq!(v["method"], "bruteforce");
    assert_eq!(v["bound"], 3);
    assert_eq!(v["witness"]["E"], 1);
    assert_eq!(v["witness_value"], "-3/2");
    assert_eq!(v["chi"], "-3");

    let out = run(&["chi", crepant.to_str().unwrap(), "--divisor", "E:1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_of(&out).trim(), "8");

    // Hirzebruch-Jung chain of (12,5): weights [3,2,3], all alpha = -1/2.
    let out = run(&["catalogue", "cyclic", "--n", "12", "--q", "5"]);
    assert_eq!(code(&out), 0);
    let chain = dir.path().join("c12_5.json");
    fs::write(&chain, out.stdout).unwrap();
    let out = run(&["disc", chain.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let alpha = v["alpha"].as_object().unwrap();
    assert_eq!(alpha.len(), 3);
    for value in alpha.values() {
        assert_eq!(value, "-1/2");
    }

    // The validate verdict is part of the output, not the exit code.
    let lopsided = dir.path().join("lopsided.json");
    fs::write(
        &lopsided,
        r#"{"rank": 4, "vertices": [{"id": "A", "self_intersection": -2, "ram_index": 4}], "edges": [], "curves": []}"#,
    )
    .unwrap();
    let out = run(&["validate", lopsided.to_str().unwrap(), "--json"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(v["ok"], Value::Bool(false));
    let codes: Vec<&str> = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["code"].as_str().unwrap())
        .collect();
    assert!(codes.contains(&"index-divisibility"), "{codes:?}");
}

#[test]
fn output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let e6 = fixture_file(dir.path(), "e6");
    let case = fixture_file(dir.path(), "case2_32");

    for args in [
        vec!["classify", e6.to_str().unwrap(), "--json"],
        vec!["rational", e6.to_str().unwrap(), "--json"],
        vec!["special", case.to_str().unwrap(), "--json"],
        vec!["cycle", case.to_str().unwrap()],
        vec!["catalogue", "cyclic", "--n", "40", "--q", "11"],
    ] {
        let first = run(&args);
        let second = run(&args);
        assert_eq!(code(&first), 0);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        assert_eq!(first.stderr, second.stderr, "{args:?}");
    }
}

#[test]
fn blowup_then_minimalize_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let e6 = fixture_file(dir.path(), "e6");
    let original = fs::read(&e6).unwrap();

    let blown = run(&["blowup", e6.to_str().unwrap(), "--at", "E"]);
    assert_eq!(code(&blown), 0);
    let blown_path = dir.path().join("blown.json");
    fs::write(&blown_path, &blown.stdout).unwrap();
    assert_ne!(blown.stdout, original);

    let restored = run(&["minimalize", blown_path.to_str().unwrap()]);
    assert_eq!(code(&restored), 0);
    assert_eq!(restored.stdout, original);
}
