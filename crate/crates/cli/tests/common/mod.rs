//! Shared helpers for the CLI integration tests: spawning the binary,
//! writing fixture corpora, reading JSONL artifacts, and a minimal scripted
//! HTTP responder for tests that exercise real endpoint configs.

// Each test binary compiles this module separately and uses its own subset.
#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output};

use tagt_core::table::{synth_fixture, write_csv, Genre};

/// Command for the compiled `tagt` binary.
pub fn tagt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tagt"))
}

/// Runs the binary with `args`, returning captured output.
pub fn run_tagt(args: &[&str]) -> Output {
    tagt()
        .args(args)
        .output()
        .expect("failed to spawn tagt binary")
}

/// Runs and asserts success, returning stdout.
pub fn run_ok(args: &[&str]) -> String {
    let out = run_tagt(args);
    assert!(
        out.status.success(),
        "tagt {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Runs and asserts the given exit code, returning stderr.
pub fn run_expect(args: &[&str], code: i32) -> String {
    let out = run_tagt(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "tagt {args:?} exited {:?}, expected {code}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes `per_genre` synthetic tables per genre as
/// `{dir}/{genre}/t{i}.csv` and returns the expected table ids in
/// discovery (sorted) order.
pub fn write_fixture_corpus(dir: &Path, per_genre: usize) -> Vec<String> {
    let mut ids = Vec::new();
    for (g, genre) in Genre::ALL.into_iter().enumerate() {
        let sub = dir.join(genre.as_str());
        std::fs::create_dir_all(&sub).unwrap();
        for i in 0..per_genre {
            let table = synth_fixture(genre, (g * per_genre + i) as u64);
            std::fs::write(sub.join(format!("t{i}.csv")), write_csv(&table)).unwrap();
            ids.push(format!("{genre}/t{i}"));
        }
    }
    ids.sort();
    ids
}

/// Reads a JSONL file into generic JSON values, one per line.
pub fn read_jsonl_values(path: &Path) -> Vec<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad JSONL line: {e}\n{l}")))
        .collect()
}

/// Reads a JSON file into a generic value.
pub fn read_json(path: &Path) -> serde_json::Value {
    let bytes = std::fs::read(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    serde_json::from_slice(&bytes).unwrap_or_else(|e| panic!("bad JSON {}: {e}", path.display()))
}

/// Spawns a detached responder that answers every request on its port with
/// a subjectivity classification marking all inputs objective. Returns the
/// base URL. The thread runs until the test process exits.
pub fn spawn_objective_classifier() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind classifier mock");
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            if reader.read_line(&mut line).is_err() {
                continue;
            }
            let mut content_length = 0usize;
            loop {
                let mut header = String::new();
                if reader.read_line(&mut header).is_err() || header.trim().is_empty() {
                    break;
                }
                if let Some(v) = header
                    .to_ascii_lowercase()
                    .strip_prefix("content-length:")
                    .map(str::trim)
                {
                    content_length = v.parse().unwrap_or(0);
                }
            }
            let mut body = vec![0u8; content_length];
            if reader.read_exact(&mut body).is_err() {
                continue;
            }
            let request: serde_json::Value = match serde_json::from_slice(&body) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let n = request["inputs"].as_array().map_or(0, Vec::len);
            let labels: Vec<&str> = vec!["objective"; n];
            let payload =
                serde_json::to_string(&serde_json::json!({ "outputs": [], "labels": labels }))
                    .unwrap();
            let response = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{payload}",
                payload.len(),
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    format!("http://{addr}")
}

