//! The HTTP backend against a local stub server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use crewline::llm::{ChatMessage, Gateway, LlmConfig, LlmError, Provider};

/// Serve one scripted status per connection; returns the base URL and the
/// number of requests seen.
fn stub(statuses: Vec<u16>) -> (String, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let seen = Arc::new(AtomicUsize::new(0));
    let count = seen.clone();
    std::thread::spawn(move || {
        for (stream, status) in listener.incoming().zip(statuses) {
            let mut stream = stream.unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some((k, v)) = line.split_once(':') {
                    if k.eq_ignore_ascii_case("content-length") {
                        length = v.trim().parse().unwrap();
                    }
                }
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            let request: serde_json::Value = serde_json::from_slice(&body).unwrap();
            assert_eq!(request["model"], "gpt-3.5");
            count.fetch_add(1, Ordering::SeqCst);
            let reply = if status == 200 {
                r#"{"choices":[{"message":{"role":"assistant","content":"Recruitment"}}]}"#.to_string()
            } else {
                format!(r#"{{"error":"status {status}"}}"#)
            };
            let head = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
                reply.len()
            );
            stream.write_all(head.as_bytes()).unwrap();
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, seen)
}

fn config(url: &str, retries: u32) -> LlmConfig {
    let mut c = LlmConfig::new(Provider::LocalChat);
    c.base_url = url.into();
    c.max_retries = retries;
    c.retry_base = Duration::from_millis(1);
    c.timeout = Duration::from_secs(5);
    c
}

#[test]
fn retries_server_errors_then_succeeds() {
    let (url, seen) = stub(vec![500, 503, 200]);
    let gw = Gateway::from_config(&config(&url, 3)).unwrap();
    let reply = gw.complete(&[ChatMessage::user("Classify")]).unwrap();
    assert_eq!(reply, "Recruitment");
    assert_eq!(seen.load(Ordering::SeqCst), 3);
}

#[test]
fn attempts_are_one_plus_max_retries() {
    let (url, seen) = stub(vec![500; 10]);
    let gw = Gateway::from_config(&config(&url, 2)).unwrap();
    match gw.complete(&[ChatMessage::user("Classify")]) {
        Err(LlmError::ProviderError { status: 500, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(seen.load(Ordering::SeqCst), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen) = stub(vec![400, 200]);
    let gw = Gateway::from_config(&config(&url, 3)).unwrap();
    assert!(matches!(gw.complete(&[ChatMessage::user("x")]), Err(LlmError::ProviderError { status: 400, .. })));
    assert_eq!(seen.load(Ordering::SeqCst), 1);
}

#[test]
fn rate_limit_is_retried() {
    let (url, seen) = stub(vec![429, 200]);
    let gw = Gateway::from_config(&config(&url, 1)).unwrap();
    assert_eq!(gw.complete(&[ChatMessage::user("x")]).unwrap(), "Recruitment");
    assert_eq!(seen.load(Ordering::SeqCst), 2);
}
