use std::path::Path;
use std::process::{Command, Output};

fn fibdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibdiv"))
        .args(args)
        .env_remove("FIBDIV_CACHE")
        .output()
        .expect("run fibdiv")
}

fn stdout(args: &[&str]) -> String {
    let out = fibdiv(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["z", "12"]), "12\n");
    assert_eq!(stdout(&["count", "--limit", "180"]), "16\n");
    assert_eq!(
        stdout(&["verdict", "9"]),
        "empty: divisible by 3^(e(3)+1)\n"
    );
}

#[test]
fn other_subcommands() {
    assert_eq!(stdout(&["e", "3"]), "1\n");
    assert_eq!(stdout(&["c", "7"]), "168\n");
    assert_eq!(stdout(&["class", "3", "--limit", "200"]), "36\n108\n180\n");
    assert_eq!(
        stdout(&["verdict", "12"]),
        "nonempty: 2:free 3:free(threshold 0) 5:free\n"
    );
    assert_eq!(
        stdout(&["census", "--limit", "180", "--method", "direct"]),
        "count 16\n1 5 12 24 25 36 48 60 72 96 108 120 125 144 168 180\n"
    );
    assert_eq!(
        stdout(&["reconcile", "1", "--limit", "1000"]),
        "k 1 x 1000 enumerated 5 brute 8\nmissing 12 60 300\nextra \n"
    );
    assert_eq!(stdout(&["scan-c", "--limit", "1000"]).lines().last().unwrap(), "scanned 506 violations 0");
    assert_eq!(
        stdout(&["tree", "7", "--depth", "5"]),
        "7\n  2^3\n    3\n      2^2 [repeat]\n"
    );
    let bounds = stdout(&["bounds", "--limit", "180"]);
    assert!(bounds.starts_with("x 180\ncount 16\nlog_a 2.77259\n"), "{bounds}");
}

#[test]
fn machine_readable_formats() {
    let json = stdout(&["--format", "json", "reconcile", "1", "--limit", "1000"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["k"], 1);
    assert_eq!(v["x"], 1000);
    assert_eq!(v["missing"], serde_json::json!([12, 60, 300]));
    assert_eq!(v["extra"], serde_json::json!([]));
    assert_eq!(v["counts"]["brute"], 8);

    let csv = stdout(&["census", "--limit", "30", "--format", "csv"]);
    assert_eq!(csv, "n\n1\n5\n12\n24\n25\n");

    let json = stdout(&["census", "--limit", "30", "--method", "classification", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["count"], 5);
    assert_eq!(v["patched"], serde_json::json!([12]));
    assert_eq!(v["method"], "classification");

    let json = stdout(&["--format", "json", "z", "10"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["z"], 15);

    let json = stdout(&["--format", "json", "tree", "5"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["root"]["children"][0]["cut"], "repeat");

    let json = stdout(&["--format", "json", "bounds", "--limit", "16"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["count"], 3);
}

#[test]
fn exit_codes() {
    assert_eq!(fibdiv(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fibdiv(&["z", "twelve"]).status.code(), Some(2));
    assert_eq!(fibdiv(&["count", "--limit", "0"]).status.code(), Some(2));
    assert_eq!(fibdiv(&["z", "0"]).status.code(), Some(2));
    assert_eq!(fibdiv(&["--format", "xml", "z", "3"]).status.code(), Some(2));
    assert_eq!(fibdiv(&["--jobs", "0", "z", "3"]).status.code(), Some(2));
    // computation errors
    assert_eq!(fibdiv(&["c", "5"]).status.code(), Some(1));
    assert_eq!(fibdiv(&["e", "9"]).status.code(), Some(1));
    assert_eq!(fibdiv(&["bounds", "--limit", "10"]).status.code(), Some(1));
    assert_eq!(fibdiv(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["census", "--limit", "5000", "--format", "json"][..],
        &["--jobs", "1", "census", "--limit", "5000", "--method", "classification", "--format", "json"],
        &["--format", "json", "scan-c", "--limit", "3000"],
    ] {
        assert_eq!(stdout(args), stdout(args));
    }
    let a = stdout(&["--jobs", "1", "census", "--limit", "5000", "--format", "json"]);
    let b = stdout(&["--jobs", "4", "census", "--limit", "5000", "--format", "json"]);
    assert_eq!(a, b);
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn cache_file_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("entry.csv");
    let p = path.to_str().unwrap();
    assert_eq!(stdout(&["--cache", p, "z", "91"]), "56\n");
    assert_eq!(read(&path), "p,z,e\n7,8,1\n13,7,1\n");
    assert_eq!(stdout(&["--cache", p, "e", "11"]), "1\n");
    assert_eq!(read(&path), "p,z,e\n7,8,1\n11,10,1\n13,7,1\n");

    // the environment variable selects the same file
    let out = Command::new(env!("CARGO_BIN_EXE_fibdiv"))
        .args(["c", "17"])
        .env("FIBDIV_CACHE", p)
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "612\n");
    assert!(read(&path).contains("\n17,9,1\n"));

    // entries in the file are trusted on load
    std::fs::write(&path, "p,z,e\n7,8,1\n").unwrap();
    assert_eq!(stdout(&["--cache", p, "z", "7"]), "8\n");
    std::fs::write(&path, "bogus\n").unwrap();
    assert_eq!(fibdiv(&["--cache", p, "z", "7"]).status.code(), Some(1));
}

#[test]
fn in_process_runner() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = fibdiv_cli::run(["fibdiv", "c", "2"], &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, b"24\n");
    let code = fibdiv_cli::run(["fibdiv", "c"], &mut out, &mut err);
    assert_eq!(code, 2);
}
