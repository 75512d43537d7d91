use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn padyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padyn")).args(args).output().expect("failed to run padyn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SQUARE_PLUS_ONE: &str = r#"
n = 1
numerators = ["x1^2 + 1"]
prime = 3
lift = "naive"
"#;

#[test]
fn certify_then_verify_in_separate_processes() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.toml", SQUARE_PLUS_ONE);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let res = padyn(&["certify", "--map", &map, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap(), "certificates differ between runs");

    let res = padyn(&["verify", "--cert", a.to_str().unwrap()]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stdout));

    let mut json: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(json["bound"]["n"], 9);
    json["bound"]["n"] = Value::from(8);
    let bad = write(dir.path(), "bad.json", &serde_json::to_string_pretty(&json).unwrap());
    let res = padyn(&["verify", "--cert", &bad]);
    assert_eq!(code(&res), 3);
    assert!(String::from_utf8_lossy(&res.stdout).contains("'bound'"));

    let garbage = write(dir.path(), "garbage.json", "{ not json");
    assert_eq!(code(&padyn(&["verify", "--cert", &garbage])), 3);
}

#[test]
fn overrides_and_auto_prime() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.toml", "n = 1\nnumerators = [\"x1^2\"]\n");
    let cert = dir.path().join("c.json");
    let res = padyn(&[
        "certify",
        "--map",
        &map,
        "--prime",
        "5",
        "--precision",
        "40",
        "--degree",
        "6",
        "--kmax",
        "16",
        "--budget",
        "8",
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let json: Value = serde_json::from_slice(&std::fs::read(&cert).unwrap()).unwrap();
    assert_eq!(json["context"]["p"], 5);
    assert_eq!(json["context"]["precision"], 40);
    assert_eq!(json["neighborhood"]["degree_checked"], 6);
    assert_eq!(json["witness"], serde_json::json!(["6"]));

    let res = padyn(&["certify", "--map", &map, "--prime", "auto", "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    assert_eq!(code(&padyn(&["verify", "--cert", cert.to_str().unwrap()])), 0);
}

#[test]
fn finite_order_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "id.toml", "n = 1\nnumerators = [\"x1\"]\nprime = 5\nbudget = 5\n");
    let out = dir.path().join("never.json");
    let res = padyn(&["certify", "--map", &map, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stdout).contains("finite order suspected"));
    assert!(!out.exists());
}

#[test]
fn interpolate_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "map.toml", SQUARE_PLUS_ONE);
    let report = dir.path().join("r.json");
    let res = padyn(&[
        "interpolate",
        "--map",
        &map,
        "--point",
        "-4",
        "--kmax",
        "12",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let json: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["l_an"], 1);
    assert_eq!(json["valuation_profile"][0].as_array().unwrap().len(), 12);
    assert_eq!(json["convergence"][0]["certified"], true);
    assert_eq!(json["convergence"][1]["certified"], false);

    let res = padyn(&["interpolate", "--map", &map, "--point", "3", "--out", report.to_str().unwrap()]);
    assert_eq!(code(&res), 1);
}

#[test]
fn malformed_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "bad.toml", "n = 1\nnumerators = [\"x1^^2\"]\n");
    let out = dir.path().join("c.json");
    assert_eq!(code(&padyn(&["certify", "--map", &map, "--out", out.to_str().unwrap()])), 1);
    let map = write(dir.path(), "extra.toml", "n = 1\nnumerators = [\"x1^2\"]\ncolour = 1\n");
    assert_eq!(code(&padyn(&["certify", "--map", &map, "--out", out.to_str().unwrap()])), 1);
    assert_eq!(code(&padyn(&["certify", "--map", "/nonexistent/map.toml", "--out", "x"])), 1);
}

#[test]
fn sample_maps_certify_and_verify() {
    let maps = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../maps");
    let dir = tempfile::tempdir().unwrap();
    let mut count = 0;
    for entry in std::fs::read_dir(&maps).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        let cert = dir.path().join("cert.json");
        let res = padyn(&["certify", "--map", path.to_str().unwrap(), "--out", cert.to_str().unwrap()]);
        assert_eq!(code(&res), 0, "{}: {}", path.display(), String::from_utf8_lossy(&res.stderr));
        let res = padyn(&["verify", "--cert", cert.to_str().unwrap()]);
        assert_eq!(code(&res), 0, "{}: {}", path.display(), String::from_utf8_lossy(&res.stdout));
        count += 1;
    }
    assert!(count >= 5);
}
