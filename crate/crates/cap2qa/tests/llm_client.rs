use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use cap2qa::llm::{
    prompt_hash, AssistantClient, Backend, BackendSpec, CallError, ManualTimer, MockScript, ResponseCache, RetryPolicy,
    ScriptEntry,
};
use cap2qa_core::{cache_key, Assistant, AssistantError, AssistantRequest};

fn request(prompt: &str) -> AssistantRequest {
    AssistantRequest {
        prompt_text: prompt.into(),
        model_id: "gpt-3.5-turbo".into(),
        temperature: 0.0,
        max_output_tokens: 256,
        sample: 0,
    }
}

fn mock(script: MockScript) -> AssistantClient {
    AssistantClient::new(BackendSpec::Mock(script).build().unwrap())
}

#[test]
fn mock_echoes_script() {
    let client = mock(MockScript::ordered(["Question: Q1? Answer: A1."]));
    let r = client.complete(&request("p")).unwrap();
    assert_eq!(r.text, "Question: Q1? Answer: A1.");
    assert!(!r.from_cache);
    assert_eq!(client.complete(&request("p")).unwrap_err(), AssistantError::ScriptExhausted);
}

#[test]
fn empty_script_is_exhausted() {
    assert_eq!(mock(MockScript::default()).complete(&request("p")).unwrap_err(), AssistantError::ScriptExhausted);
}

#[test]
fn hashed_entries_are_indexed_by_sample() {
    let h = prompt_hash("p");
    let script = MockScript {
        entries: vec![
            ScriptEntry { prompt_hash: Some(h.clone()), response_text: "first".into() },
            ScriptEntry { prompt_hash: None, response_text: "fallback".into() },
            ScriptEntry { prompt_hash: Some(h), response_text: "second".into() },
        ],
    };
    let client = mock(script);
    let mut req = request("p");
    assert_eq!(client.complete(&req).unwrap().text, "first");
    assert_eq!(client.complete(&req).unwrap().text, "first");
    req.sample = 1;
    assert_eq!(client.complete(&req).unwrap().text, "second");
    req.sample = 2;
    assert_eq!(client.complete(&req).unwrap_err(), AssistantError::ScriptExhausted);
    assert_eq!(client.complete(&request("other")).unwrap().text, "fallback");
}

#[test]
fn whitespace_response_is_empty() {
    let client = mock(MockScript::ordered(["  \n"]));
    assert_eq!(client.complete(&request("p")).unwrap_err(), AssistantError::ResponseEmpty);
}

#[test]
fn invalid_request_rejected_before_backend() {
    let client = mock(MockScript::ordered(["x"]));
    let mut req = request("p");
    req.temperature = 2.5;
    assert!(matches!(client.complete(&req), Err(AssistantError::InvalidRequest(_))));
    assert_eq!(client.complete(&request("p")).unwrap().text, "x");
}

#[test]
fn cache_hit_is_byte_equal() {
    let dir = tempfile::tempdir().unwrap();
    let client = mock(MockScript::ordered(["Question: Q? Answer: ünïcode."]))
        .with_cache(ResponseCache::open(dir.path()).unwrap());
    let first = client.complete(&request("p")).unwrap();
    let second = client.complete(&request("p")).unwrap();
    assert!(!first.from_cache);
    assert!(second.from_cache);
    assert_eq!(first.text, second.text);

    // A fresh client over the same directory replays without a backend.
    let replay = mock(MockScript::default()).with_cache(ResponseCache::open(dir.path()).unwrap());
    assert_eq!(replay.complete(&request("p")).unwrap().text, first.text);
    let mut next = request("p");
    next.sample = 1;
    assert_eq!(replay.complete(&next).unwrap_err(), AssistantError::ScriptExhausted);
}

#[test]
fn cache_keys() {
    let a = request("a dog");
    assert_eq!(cache_key(&a), cache_key(&a.clone()));
    let mut t = a.clone();
    t.temperature = 0.7;
    assert_ne!(cache_key(&a), cache_key(&t));
    assert_ne!(cache_key(&a), cache_key(&request("a  dog")));
    let mut s = a.clone();
    s.sample = 4;
    assert_eq!(cache_key(&a), cache_key(&s));
}

/// Counts calls and fails transiently the first `failures` times.
struct Flaky {
    failures: u32,
    calls: Mutex<u32>,
}

impl Backend for Flaky {
    fn call(&self, _: &AssistantRequest) -> Result<String, CallError> {
        let mut calls = self.calls.lock().unwrap();
        *calls += 1;
        if *calls <= self.failures {
            Err(CallError::Transient { message: "HTTP 503".into(), retry_after: None })
        } else {
            Ok("ok".into())
        }
    }
}

#[test]
fn transient_failures_back_off_then_give_up() {
    let timer = Arc::new(ManualTimer::default());
    let client = AssistantClient::new(Box::new(Flaky { failures: 2, calls: Mutex::new(0) }))
        .with_timer(timer.clone())
        .with_seed(1);
    assert_eq!(client.complete(&request("p")).unwrap().text, "ok");
    let sleeps = timer.sleeps();
    assert_eq!(sleeps.len(), 2);
    assert!(sleeps[0] >= Duration::from_millis(500) && sleeps[0] <= Duration::from_secs(1));
    assert!(sleeps[1] >= Duration::from_secs(1) && sleeps[1] <= Duration::from_secs(2));

    let timer = Arc::new(ManualTimer::default());
    let client = AssistantClient::new(Box::new(Flaky { failures: 100, calls: Mutex::new(0) }))
        .with_timer(timer.clone())
        .with_retry_policy(RetryPolicy { retries: 3, ..RetryPolicy::default() });
    match client.complete(&request("p")) {
        Err(AssistantError::BackendUnavailable { attempts, .. }) => assert_eq!(attempts, 4),
        other => panic!("{other:?}"),
    }
    assert_eq!(timer.sleeps().len(), 3);
}

struct Counting {
    timer: Arc<ManualTimer>,
    stamps: Mutex<Vec<Duration>>,
}

impl Backend for Counting {
    fn call(&self, _: &AssistantRequest) -> Result<String, CallError> {
        use cap2qa::llm::Timer;
        self.stamps.lock().unwrap().push(self.timer.now());
        Ok("ok".into())
    }
}

#[test]
fn rate_limit_holds_over_any_window() {
    let timer = Arc::new(ManualTimer::default());
    let backend = Arc::new(Counting { timer: timer.clone(), stamps: Mutex::new(Vec::new()) });
    struct Shared(Arc<Counting>);
    impl Backend for Shared {
        fn call(&self, r: &AssistantRequest) -> Result<String, CallError> {
            self.0.call(r)
        }
    }
    let client = AssistantClient::new(Box::new(Shared(backend.clone()))).with_timer(timer.clone()).with_rate_limit(7);
    for i in 0..40 {
        client.complete(&request(&format!("p{i}"))).unwrap();
        timer.advance(Duration::from_millis(1500));
    }
    let stamps = backend.stamps.lock().unwrap().clone();
    assert_eq!(stamps.len(), 40);
    for (i, &t) in stamps.iter().enumerate() {
        let n = stamps[i..].iter().filter(|&&u| u - t < Duration::from_secs(60)).count();
        assert!(n <= 7, "{n} calls in the minute after call {i}");
    }
}

struct Served {
    request_line: String,
    headers: Vec<String>,
    body: String,
}

/// Serves one canned response per connection, in order, and records what
/// it received.
fn serve(responses: Vec<(u16, Vec<(&'static str, &'static str)>, String)>) -> (String, Arc<Mutex<Vec<Served>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1", listener.local_addr().unwrap());
    let log = Arc::new(Mutex::new(Vec::new()));
    let seen = log.clone();
    thread::spawn(move || {
        for (status, headers, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            let mut got_headers = Vec::new();
            let mut len = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let line = line.trim_end().to_string();
                if line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                got_headers.push(line);
            }
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            seen.lock().unwrap().push(Served {
                request_line: request_line.trim_end().into(),
                headers: got_headers,
                body: String::from_utf8(buf).unwrap(),
            });
            let mut resp = format!("HTTP/1.1 {status} X\r\nContent-Length: {}\r\nConnection: close\r\n", body.len());
            for (k, v) in headers {
                resp.push_str(&format!("{k}: {v}\r\n"));
            }
            resp.push_str("\r\n");
            resp.push_str(&body);
            let mut stream = stream;
            stream.write_all(resp.as_bytes()).unwrap();
        }
    });
    (url, log)
}

fn chat_body(text: &str) -> String {
    serde_json::json!({"choices": [{"message": {"role": "assistant", "content": text}}]}).to_string()
}

fn http_client(url: &str, key: Option<&str>, timer: Arc<ManualTimer>) -> AssistantClient {
    let spec =
        BackendSpec::Http { base_url: url.into(), api_key: key.map(String::from), timeout: Duration::from_secs(5) };
    AssistantClient::new(spec.build().unwrap()).with_timer(timer)
}

#[test]
fn http_retries_429_and_maps_fields() {
    let (url, log) = serve(vec![
        (429, vec![("Retry-After", "7")], "slow down".into()),
        (200, vec![], chat_body("Question: Q? Answer: A.")),
    ]);
    let timer = Arc::new(ManualTimer::default());
    let client = http_client(&url, Some("sk-test"), timer.clone());
    let r = client.complete(&request("Caption: a dog")).unwrap();
    assert_eq!(r.text, "Question: Q? Answer: A.");
    assert_eq!(timer.sleeps(), [Duration::from_secs(7)]);

    let log = log.lock().unwrap();
    assert_eq!(log.len(), 2);
    assert_eq!(log[1].request_line, "POST /v1/chat/completions HTTP/1.1");
    assert!(log[1].headers.iter().any(|h| h == "authorization: Bearer sk-test"));
    let body: serde_json::Value = serde_json::from_str(&log[1].body).unwrap();
    assert_eq!(body["model"], "gpt-3.5-turbo");
    assert_eq!(body["messages"][0]["role"], "user");
    assert_eq!(body["messages"][0]["content"], "Caption: a dog");
    assert_eq!(body["temperature"], 0.0);
    assert_eq!(body["max_tokens"], 256);
}

#[test]
fn http_auth_failure_is_not_retried() {
    let (url, log) = serve(vec![(401, vec![], "no".into()), (200, vec![], chat_body("x"))]);
    let timer = Arc::new(ManualTimer::default());
    let err = http_client(&url, None, timer.clone()).complete(&request("p")).unwrap_err();
    assert_eq!(err, AssistantError::AuthFailure { status: 401 });
    assert!(timer.sleeps().is_empty());
    assert_eq!(log.lock().unwrap().len(), 1);
}

#[test]
fn http_bad_request_and_server_errors() {
    let (url, _) = serve(vec![(400, vec![], "bad model".into())]);
    let err = http_client(&url, None, Arc::new(ManualTimer::default())).complete(&request("p")).unwrap_err();
    assert!(matches!(err, AssistantError::Rejected { status: 400, ref message } if message == "bad model"));

    let (url, log) = serve((0..3).map(|_| (503, vec![], String::new())).collect());
    let client = http_client(&url, None, Arc::new(ManualTimer::default()))
        .with_retry_policy(RetryPolicy { retries: 2, ..RetryPolicy::default() });
    assert!(matches!(client.complete(&request("p")), Err(AssistantError::BackendUnavailable { attempts: 3, .. })));
    assert_eq!(log.lock().unwrap().len(), 3);
}

#[test]
fn http_unreachable_is_unavailable() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let client = http_client(&format!("http://127.0.0.1:{port}"), None, Arc::new(ManualTimer::default()))
        .with_retry_policy(RetryPolicy { retries: 1, ..RetryPolicy::default() });
    assert!(matches!(client.complete(&request("p")), Err(AssistantError::BackendUnavailable { attempts: 2, .. })));
}

#[test]
fn script_file_loading() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.jsonl");
    std::fs::write(&p, "{\"response_text\": \"a\"}\n\n{\"prompt_hash\": \"zz\", \"response_text\": \"b\"}\n").unwrap();
    assert!(matches!(MockScript::load(&p), Err(cap2qa::Error::SchemaViolation { index: 3, .. })));
    std::fs::write(&p, "{\"response_text\": \"a\"}\n").unwrap();
    assert_eq!(MockScript::load(&p).unwrap(), MockScript::ordered(["a"]));
}

#[test]
fn client_is_shareable_across_threads() {
    let client = Arc::new(mock(MockScript::ordered((0..64).map(|i| format!("r{i}")))));
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let c = client.clone();
            thread::spawn(move || (0..8).map(|_| c.complete(&request("p")).unwrap().text).collect::<Vec<_>>())
        })
        .collect();
    let mut all: Vec<String> = handles.into_iter().flat_map(|h| h.join().unwrap()).collect();
    all.sort();
    all.dedup();
    assert_eq!(all.len(), 64);
}
