use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bearer token. Never serialized, and redacted in `Debug`.
#[derive(Clone, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        ApiKey(key.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(<redacted>)")
    }
}

/// Request and response shapes understood by an endpoint.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adapter {
    /// `{model, prompt, max_tokens}` → `{text}`.
    #[default]
    Simple,
    /// Same request; response text at `choices[0].text`.
    Completions,
}

impl Adapter {
    pub fn request_body(self, model: &str, prompt: &str, max_tokens: u32) -> String {
        serde_json::json!({ "model": model, "prompt": prompt, "max_tokens": max_tokens }).to_string()
    }

    pub fn response_text(self, body: &str) -> Option<String> {
        let v: serde_json::Value = serde_json::from_str(body).ok()?;
        let text = match self {
            Adapter::Simple => v.get("text")?,
            Adapter::Completions => v.get("choices")?.get(0)?.get("text")?,
        };
        text.as_str().map(str::to_owned)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    pub adapter: Adapter,
    pub max_tokens: u32,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    pub backoff_max_ms: u64,
    pub timeout_ms: u64,
    pub concurrency: usize,
    #[serde(skip)]
    pub api_key: Option<ApiKey>,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: String::new(),
            model: "teacher".to_owned(),
            adapter: Adapter::Simple,
            max_tokens: 2048,
            max_retries: 5,
            backoff_base_ms: 500,
            backoff_max_ms: 30_000,
            timeout_ms: 120_000,
            concurrency: 4,
            api_key: None,
        }
    }
}

pub const ENDPOINT_ENV: &str = "TEACHER_ENDPOINT";
pub const API_KEY_ENV: &str = "TEACHER_API_KEY";

impl EndpointConfig {
    /// Fills `url` and `api_key` from `lookup`, which is normally
    /// `std::env::var`. An explicit url already in the config wins.
    pub fn with_env(mut self, lookup: impl Fn(&str) -> Option<String>) -> Self {
        if self.url.is_empty() {
            if let Some(u) = lookup(ENDPOINT_ENV) {
                self.url = u;
            }
        }
        if let Some(k) = lookup(API_KEY_ENV).filter(|k| !k.is_empty()) {
            self.api_key = Some(ApiKey::new(k));
        }
        self
    }

    pub fn from_process_env(self) -> Self {
        self.with_env(|k| std::env::var(k).ok())
    }

    /// Exponential delay before retry `attempt` (1-based).
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self
            .backoff_base_ms
            .saturating_mul(1u64 << (attempt.saturating_sub(1)).min(20));
        Duration::from_millis(ms.min(self.backoff_max_ms))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpReply {
    pub status: u16,
    pub retry_after: Option<Duration>,
    pub body: String,
}

/// One POST of a JSON body. Implementations must not put the key into
/// error messages.
pub trait Transport: Send + Sync {
    fn post(&self, config: &EndpointConfig, body: &str) -> std::result::Result<HttpReply, String>;
}

pub type Sleeper = dyn Fn(Duration) + Send + Sync;

fn retryable(status: u16) -> bool {
    status == 408 || status == 429 || (500..600).contains(&status)
}

/// Sends `prompt` with up to `max_retries` attempts, honoring
/// `Retry-After` on 429/503 and exponential backoff otherwise.
pub fn send_with_retry(
    transport: &dyn Transport,
    config: &EndpointConfig,
    prompt: &str,
    sleep: &dyn Fn(Duration),
) -> Result<String> {
    if config.url.is_empty() {
        return Err(Error::TeacherTransport {
            attempts: 0,
            message: format!("no endpoint configured (set {ENDPOINT_ENV})"),
        });
    }
    let body = config.adapter.request_body(&config.model, prompt, config.max_tokens);
    let attempts = config.max_retries.max(1);
    let mut last = String::new();
    for attempt in 1..=attempts {
        match transport.post(config, &body) {
            Ok(reply) if (200..300).contains(&reply.status) => {
                return config.adapter.response_text(&reply.body).ok_or_else(|| Error::TeacherTransport {
                    attempts: attempt,
                    message: "response body has no text field".to_owned(),
                });
            }
            Ok(reply) if retryable(reply.status) => {
                last = format!("HTTP {}", reply.status);
                if attempt < attempts {
                    let wait = reply.retry_after.unwrap_or_else(|| config.backoff(attempt));
                    log::warn!("teacher returned {}, retrying in {:?}", reply.status, wait);
                    sleep(wait);
                }
            }
            Ok(reply) => {
                return Err(Error::TeacherTransport {
                    attempts: attempt,
                    message: format!("HTTP {}", reply.status),
                })
            }
            Err(e) => {
                last = e;
                if attempt < attempts {
                    let wait = config.backoff(attempt);
                    log::warn!("teacher request failed ({last}), retrying in {wait:?}");
                    sleep(wait);
                }
            }
        }
    }
    Err(Error::TeacherTransport {
        attempts,
        message: last,
    })
}

/// Blocking HTTP transport.
#[cfg(feature = "live")]
#[derive(Debug, Default)]
pub struct HttpTransport;

#[cfg(feature = "live")]
impl Transport for HttpTransport {
    fn post(&self, config: &EndpointConfig, body: &str) -> std::result::Result<HttpReply, String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .build()
            .into();
        let mut req = agent.post(&config.url).header("content-type", "application/json");
        if let Some(key) = &config.api_key {
            req = req.header("authorization", format!("Bearer {}", key.expose()));
        }
        let mut resp = req.send(body).map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|s| s.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let body = resp.body_mut().read_to_string().map_err(|e| e.to_string())?;
        Ok(HttpReply {
            status,
            retry_after,
            body,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    struct Scripted {
        replies: Mutex<Vec<HttpReply>>,
        bodies: Mutex<Vec<String>>,
    }

    impl Transport for Scripted {
        fn post(&self, _: &EndpointConfig, body: &str) -> std::result::Result<HttpReply, String> {
            self.bodies.lock().unwrap().push(body.to_owned());
            Ok(self.replies.lock().unwrap().remove(0))
        }
    }

    fn reply(status: u16, retry_after: Option<u64>, body: &str) -> HttpReply {
        HttpReply {
            status,
            retry_after: retry_after.map(Duration::from_secs),
            body: body.to_owned(),
        }
    }

    fn config() -> EndpointConfig {
        EndpointConfig {
            url: "http://teacher.invalid/v1".into(),
            ..EndpointConfig::default()
        }
    }

    #[test]
    fn rate_limit_then_success() {
        let t = Scripted {
            replies: Mutex::new(vec![
                reply(429, Some(2), ""),
                reply(429, None, ""),
                reply(200, None, r#"{"text":"done"}"#),
            ]),
            bodies: Mutex::new(Vec::new()),
        };
        let waits = Mutex::new(Vec::new());
        let out = send_with_retry(&t, &config(), "hi", &|d| waits.lock().unwrap().push(d)).unwrap();
        assert_eq!(out, "done");
        assert_eq!(
            *waits.lock().unwrap(),
            vec![Duration::from_secs(2), Duration::from_millis(1000)]
        );
        let sent: serde_json::Value = serde_json::from_str(&t.bodies.lock().unwrap()[0]).unwrap();
        assert_eq!(sent["prompt"], "hi");
        assert_eq!(sent["model"], "teacher");
    }

    #[test]
    fn gives_up_after_max_retries() {
        let t = Scripted {
            replies: Mutex::new(vec![reply(503, None, ""); 5]),
            bodies: Mutex::new(Vec::new()),
        };
        let err = send_with_retry(&t, &config(), "hi", &|_| {}).unwrap_err();
        assert!(matches!(err, Error::TeacherTransport { attempts: 5, .. }));
    }

    #[test]
    fn client_errors_are_not_retried() {
        let t = Scripted {
            replies: Mutex::new(vec![reply(401, None, "")]),
            bodies: Mutex::new(Vec::new()),
        };
        let err = send_with_retry(&t, &config(), "hi", &|_| panic!("no sleep")).unwrap_err();
        assert!(matches!(err, Error::TeacherTransport { attempts: 1, .. }));
    }

    #[test]
    fn backoff_is_capped() {
        let c = config();
        assert_eq!(c.backoff(1), Duration::from_millis(500));
        assert_eq!(c.backoff(3), Duration::from_millis(2000));
        assert_eq!(c.backoff(40), Duration::from_millis(30_000));
    }

    #[test]
    fn key_is_redacted_and_not_serialized() {
        let c = EndpointConfig::default().with_env(|k| match k {
            API_KEY_ENV => Some("sk-secret-123".into()),
            ENDPOINT_ENV => Some("http://x".into()),
            _ => None,
        });
        assert_eq!(c.url, "http://x");
        assert_eq!(c.api_key.as_ref().unwrap().expose(), "sk-secret-123");
        assert!(!format!("{c:?}").contains("sk-secret"));
        assert!(!serde_json::to_string(&c).unwrap().contains("sk-secret"));
    }

    #[test]
    fn adapters() {
        assert_eq!(Adapter::Simple.response_text(r#"{"text":"a"}"#).as_deref(), Some("a"));
        assert_eq!(
            Adapter::Completions.response_text(r#"{"choices":[{"text":"b"}]}"#).as_deref(),
            Some("b")
        );
        assert_eq!(Adapter::Simple.response_text("not json"), None);
    }
}
