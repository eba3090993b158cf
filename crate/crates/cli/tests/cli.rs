//! The `smartreview` binary driven as a subprocess.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use smartreview::repository::LOG_FILE;
use smartreview_testkit::fixture_oracle::QUERY_1;

fn run(data: &Path, args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_smartreview"))
        .args(args)
        .env("SMARTREVIEW_DATA_DIR", data)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(data: &Path, args: &[&str]) -> String {
    let out = run(data, args, b"");
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn log_len(data: &Path) -> u64 {
    std::fs::metadata(data.join(LOG_FILE)).unwrap().len()
}

#[test]
fn render_before_seeding_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["render", "R135360", "-o", "/dev/null"], b"");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown article"));
}

#[test]
fn seeding_twice_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["seed-fixture"]);
    let before = log_len(dir.path());
    ok(dir.path(), &["seed-fixture"]);
    assert_eq!(log_len(dir.path()), before);
}

#[test]
fn query_prints_csv_from_file_or_stdin() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["seed-fixture"]);
    let file = dir.path().join("q1.rq");
    std::fs::write(&file, QUERY_1).unwrap();
    let csv = ok(dir.path(), &["query", file.to_str().unwrap()]);
    // SPARQL CSV results use CRLF line ends.
    assert_eq!(csv, "smartReview\r\nhttp://orkg.org/orkg/resource/R135360\r\n");

    let out = run(dir.path(), &["query", "-"], QUERY_1.as_bytes());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), csv);

    let out = run(dir.path(), &["query", "-"], b"SELECT ?s WHERE { ?s ?p ?o } LIMIT 1");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn export_import_round_trip_on_a_second_directory() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    ok(a.path(), &["seed-fixture"]);
    let dump = ok(a.path(), &["export-rdf"]);
    let out = run(b.path(), &["import-rdf", "-"], dump.as_bytes());
    assert!(out.status.success());
    assert_eq!(ok(b.path(), &["export-rdf"]), dump);

    let turtle = ok(a.path(), &["export-rdf", "--article", "R135360", "--format", "turtle"]);
    assert!(turtle.starts_with("@prefix"));
    let with_prov = ok(a.path(), &["export-rdf", "--provenance"]);
    assert!(with_prov.len() > dump.len());
}

#[test]
fn publish_render_and_diff() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["seed-fixture"]);
    assert_eq!(ok(dir.path(), &["publish", "R135360", "-m", "First version"]), "1\n");
    assert_eq!(ok(dir.path(), &["publish", "R135360", "-m", "Second"]), "2\n");
    assert_eq!(ok(dir.path(), &["diff", "R135360", "1", "2"]), "");
    assert_eq!(ok(dir.path(), &["diff", "R135360", "v1", "HEAD"]), "");

    let html = dir.path().join("v1.html");
    ok(
        dir.path(),
        &["render", "R135360", "-o", html.to_str().unwrap(), "--version", "1"],
    );
    let text = std::fs::read_to_string(&html).unwrap();
    assert!(text.contains("First version"));

    let frozen = ok(dir.path(), &["export-rdf", "--article", "R135360", "--version", "1"]);
    assert!(!frozen.is_empty());
    let out = run(dir.path(), &["diff", "R135360", "1", "9"], b"");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["no-such-command"], b"").status.code(), Some(1));
    assert_eq!(run(dir.path(), &["diff", "R1", "x", "y"], b"").status.code(), Some(1));
    assert_eq!(
        run(dir.path(), &["export-rdf", "--version", "1"], b"").status.code(),
        Some(1)
    );
    let missing = run(dir.path(), &["query", "/definitely/not/here.rq"], b"");
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    assert_eq!(
        run(dir.path(), &["import-rdf", "-"], b"not n-triples").status.code(),
        Some(1)
    );
    assert_eq!(run(dir.path(), &["--help"], b"").status.code(), Some(0));

    // A data directory that is a file cannot be opened.
    let file = dir.path().join("plain-file");
    std::fs::write(&file, "x").unwrap();
    assert_eq!(run(&file, &["seed-fixture"], b"").status.code(), Some(2));
}

#[test]
fn serve_answers_http() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["seed-fixture"]);
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_smartreview"))
        .args(["serve", "--port", &port.to_string()])
        .env("SMARTREVIEW_DATA_DIR", dir.path())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();

    let deadline = Instant::now() + Duration::from_secs(10);
    let stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if Instant::now() < deadline => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => {
                child.kill().unwrap();
                panic!("service did not start: {e}");
            }
        }
    };
    let mut stream = stream;
    stream
        .write_all(b"GET /articles HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
        .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();

    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("Scholarly Knowledge Graphs"));
}
