mod common;
#[path = "../../core/tests/stub/mod.rs"]
mod stub;

use common::{args, Workspace};

/// Points every provider URL at a listener that counts connections.
fn routed(base_url: &str, extra: &[&str]) -> Vec<String> {
    let mut a = args(&["--set", "embedding.kind=mock", "--set", "generator.provider=echo"]);
    a.extend([
        "--set".into(),
        format!("embedding.base_url={base_url}"),
        "--set".into(),
        format!("generator.base_url={base_url}"),
    ]);
    a.extend(extra.iter().map(|s| s.to_string()));
    a
}

#[test]
fn mock_providers_open_no_connections() {
    let stub = stub::serve(vec![(500, String::new())]);
    let ws = Workspace::new();
    for cmd in [&["ingest"][..], &["retrieve"], &["verify"], &["evaluate"], &["cache", "inspect"], &["cache", "clear"]] {
        ws.run_ok(&routed(&stub.base_url, cmd));
    }
    assert_eq!(*stub.connections.lock().unwrap(), 0);
}

#[test]
fn harness_detects_traffic() {
    let stub = stub::serve(vec![(500, "{}".into())]);
    let ws = Workspace::new().with_env("FACTCHECK_TEST_KEY", "k");
    let run = ws.run(&routed(
        &stub.base_url,
        &[
            "--set",
            "generator.provider=http",
            "--set",
            "generator.api_key_env=FACTCHECK_TEST_KEY",
            "--set",
            "generator.http_retries=0",
            "--set",
            "generator.max_retries=0",
            "verify",
            "--claim-id",
            "101",
        ],
    ));
    assert_eq!(run.code, 1, "{}", run.stderr);
    assert!(*stub.connections.lock().unwrap() > 0);
}
