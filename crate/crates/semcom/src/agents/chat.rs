//! Minimal chat-service client with record/replay fixtures.
//!
//! The wire shape is deliberately vendor-neutral: POST `{endpoint}/v1/chat`
//! with `{"system": ..., "user": ...}`, answered by `{"text": ...}`.
//! Fixtures are keyed by the SHA-256 of the canonical (key-sorted,
//! whitespace-free) request JSON, one file per request.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde_json::Value;
use sha2::{Digest, Sha256};

use super::AgentError;

/// Retry and timeout policy for live calls.
#[derive(Debug, Clone)]
pub struct ChatPolicy {
    pub timeout: Duration,
    pub max_attempts: usize,
    /// Delay before retry k is `backoff[min(k - 1, len - 1)]`.
    pub backoff: Vec<Duration>,
}

impl Default for ChatPolicy {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(30),
            max_attempts: 3,
            backoff: vec![
                Duration::from_secs(1),
                Duration::from_secs(2),
                Duration::from_secs(4),
            ],
        }
    }
}

/// How the client resolves requests.
#[derive(Debug, Clone)]
pub enum ChatMode {
    /// Call the service.
    Live,
    /// Call the service and write each response as a fixture.
    Record(PathBuf),
    /// Serve exclusively from fixtures; a miss is an error.
    Replay(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ChatClient {
    endpoint: String,
    mode: ChatMode,
    policy: ChatPolicy,
}

/// Canonical request encoding and its fixture key.
pub fn fixture_key(system_text: &str, user_text: &str) -> String {
    let canonical = canonical_request(system_text, user_text);
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn canonical_request(system_text: &str, user_text: &str) -> String {
    // BTreeMap serialization is key-sorted; to_string emits no whitespace.
    let map = BTreeMap::from([("system", system_text), ("user", user_text)]);
    serde_json::to_string(&map).expect("string map serializes")
}

impl ChatClient {
    pub fn new(endpoint: impl Into<String>, mode: ChatMode, policy: ChatPolicy) -> Self {
        Self {
            endpoint: endpoint.into(),
            mode,
            policy,
        }
    }

    pub fn replay(fixtures_dir: impl Into<PathBuf>) -> Self {
        Self::new(String::new(), ChatMode::Replay(fixtures_dir.into()), ChatPolicy::default())
    }

    /// Resolves one request according to the mode.
    pub fn call(&self, system_text: &str, user_text: &str) -> Result<String, AgentError> {
        let key = fixture_key(system_text, user_text);
        match &self.mode {
            ChatMode::Replay(dir) => read_fixture(dir, &key),
            ChatMode::Live => self.call_live(system_text, user_text),
            ChatMode::Record(dir) => {
                let text = self.call_live(system_text, user_text)?;
                write_fixture(dir, &key, &text)?;
                Ok(text)
            }
        }
    }

    fn call_live(&self, system_text: &str, user_text: &str) -> Result<String, AgentError> {
        let url = format!("{}/v1/chat", self.endpoint.trim_end_matches('/'));
        let body = canonical_request(system_text, user_text);
        let mut last_error = String::new();
        for attempt in 0..self.policy.max_attempts {
            if attempt > 0 {
                let idx = (attempt - 1).min(self.policy.backoff.len().saturating_sub(1));
                if let Some(delay) = self.policy.backoff.get(idx) {
                    std::thread::sleep(*delay);
                }
            }
            match self.send_once(&url, &body) {
                Ok(text) => return Ok(text),
                // A bad response shape will not improve on retry.
                Err(e @ AgentError::MalformedResponse { .. }) => return Err(e),
                Err(e) => last_error = e.to_string(),
            }
        }
        Err(AgentError::Exhausted {
            attempts: self.policy.max_attempts,
            last: last_error,
        })
    }

    fn send_once(&self, url: &str, body: &str) -> Result<String, AgentError> {
        let response = ureq::post(url)
            .timeout(self.policy.timeout)
            .set("content-type", "application/json")
            .send_string(body);
        let response = match response {
            Ok(r) => r,
            Err(ureq::Error::Status(code, _)) => return Err(AgentError::HttpStatus(code)),
            Err(e) => {
                return Err(AgentError::Exhausted {
                    attempts: 1,
                    last: e.to_string(),
                })
            }
        };
        let text = response
            .into_string()
            .map_err(|e| AgentError::Io(std::io::Error::other(e)))?;
        extract_text(&text)
    }
}

fn extract_text(raw: &str) -> Result<String, AgentError> {
    let value: Value = serde_json::from_str(raw)?;
    value
        .get("text")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or(AgentError::MalformedResponse {
            missing: "text".to_string(),
        })
}

fn fixture_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

fn read_fixture(dir: &Path, key: &str) -> Result<String, AgentError> {
    let path = fixture_path(dir, key);
    if !path.exists() {
        return Err(AgentError::MissingFixture {
            key: key.to_string(),
        });
    }
    extract_text(&std::fs::read_to_string(path)?)
}

/// Writes atomically (temp file + rename) so concurrent recorders of the
/// same request cannot interleave partial content.
fn write_fixture(dir: &Path, key: &str, text: &str) -> Result<(), AgentError> {
    std::fs::create_dir_all(dir)?;
    let body = serde_json::to_string_pretty(&serde_json::json!({ "text": text }))?;
    let tmp = dir.join(format!(".{key}.tmp"));
    std::fs::write(&tmp, body)?;
    std::fs::rename(&tmp, fixture_path(dir, key))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;

    /// One-shot HTTP server answering every request with `body`.
    fn spawn_server(responses: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<()>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut buffer = [0u8; 4096];
                let _ = stream.read(&mut buffer);
                let reason = if status == 200 { "OK" } else { "ERR" };
                let response = format!(
                    "HTTP/1.1 {status} {reason}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(response.as_bytes()).unwrap();
            }
        });
        (format!("http://{addr}"), handle)
    }

    fn fast_policy() -> ChatPolicy {
        ChatPolicy {
            timeout: Duration::from_secs(2),
            max_attempts: 3,
            backoff: vec![Duration::from_millis(1)],
        }
    }

    #[test]
    fn live_call_parses_the_text_field() {
        let (endpoint, handle) =
            spawn_server(vec![(200, r#"{"text": "male, white, long, black, long, black"}"#.into())]);
        let client = ChatClient::new(endpoint, ChatMode::Live, fast_policy());
        let text = client.call("sys", "user").unwrap();
        assert_eq!(text, "male, white, long, black, long, black");
        handle.join().unwrap();
    }

    #[test]
    fn record_then_replay_round_trips_byte_identically() {
        let dir = tempfile::tempdir().unwrap();
        let (endpoint, handle) = spawn_server(vec![(200, r#"{"text": "recorded reply"}"#.into())]);
        let recorder = ChatClient::new(
            endpoint,
            ChatMode::Record(dir.path().to_path_buf()),
            fast_policy(),
        );
        let live = recorder.call("system prompt", "user text").unwrap();
        handle.join().unwrap();

        let replayer = ChatClient::replay(dir.path());
        let replayed = replayer.call("system prompt", "user text").unwrap();
        assert_eq!(live, replayed);
    }

    #[test]
    fn fixture_keys_are_canonical_over_key_order() {
        // The canonical encoding sorts keys, so any field ordering of the
        // same logical request hashes identically.
        let canonical = canonical_request("S", "U");
        assert_eq!(canonical, r#"{"system":"S","user":"U"}"#);

        let reordered: Value =
            serde_json::from_str(r#"{ "user": "U", "system": "S" }"#).unwrap();
        let recanonicalized = serde_json::to_string(&BTreeMap::from([
            ("system", reordered["system"].as_str().unwrap()),
            ("user", reordered["user"].as_str().unwrap()),
        ]))
        .unwrap();
        assert_eq!(canonical, recanonicalized);
        assert_eq!(fixture_key("S", "U"), fixture_key("S", "U"));
    }

    #[test]
    fn missing_fixture_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let client = ChatClient::replay(dir.path());
        assert!(matches!(
            client.call("s", "u"),
            Err(AgentError::MissingFixture { .. })
        ));
    }

    #[test]
    fn malformed_response_names_the_missing_field() {
        let err = extract_text(r#"{"wrong": 1}"#).unwrap_err();
        match err {
            AgentError::MalformedResponse { missing } => assert_eq!(missing, "text"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn non_200_status_is_reported() {
        let (endpoint, handle) = spawn_server(vec![
            (500, "{}".into()),
            (500, "{}".into()),
            (500, "{}".into()),
        ]);
        let client = ChatClient::new(endpoint, ChatMode::Live, fast_policy());
        match client.call("s", "u") {
            Err(AgentError::Exhausted { attempts, last }) => {
                assert_eq!(attempts, 3);
                assert!(last.contains("500"), "last error: {last}");
            }
            other => panic!("unexpected outcome {other:?}"),
        }
        handle.join().unwrap();
    }

    #[test]
    fn retries_recover_from_transient_failures() {
        let (endpoint, handle) = spawn_server(vec![
            (503, "{}".into()),
            (200, r#"{"text": "second try"}"#.into()),
        ]);
        let client = ChatClient::new(endpoint, ChatMode::Live, fast_policy());
        assert_eq!(client.call("s", "u").unwrap(), "second try");
        handle.join().unwrap();
    }
}
