#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures().join(name)
}

/// Runs the binary in `dir` with the given arguments.
pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combicov"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn combicov")
}

pub fn run(args: &[&str]) -> Output {
    run_in(&fixtures(), args)
}

pub fn json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON document")
}

pub fn ratio(doc: &serde_json::Value, key: &str) -> (u64, u64) {
    let r = &doc["result"][key];
    (
        r["numerator"].as_u64().unwrap(),
        r["denominator"].as_u64().unwrap(),
    )
}

/// Writes rows of value indices as a factor table with labels equal to indices.
pub fn write_table(path: &Path, k: usize, prefix: &str, rows: &[Vec<usize>]) {
    let mut text = String::from("id");
    for f in 0..k {
        text.push_str(&format!(",f{f}"));
    }
    text.push('\n');
    for (i, row) in rows.iter().enumerate() {
        text.push_str(&format!("{prefix}{i}"));
        for v in row {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

pub fn write_schema(path: &Path, domains: &[usize]) {
    let factors: Vec<serde_json::Value> = domains
        .iter()
        .enumerate()
        .map(|(f, &d)| {
            serde_json::json!({
                "name": format!("f{f}"),
                "values": (0..d).map(|v| v.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    std::fs::write(
        path,
        serde_json::to_vec(&serde_json::json!({ "factors": factors })).unwrap(),
    )
    .unwrap();
}
