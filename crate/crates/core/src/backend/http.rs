//! HTTP backend client.
//!
//! Speaks a single-endpoint JSON protocol: `POST {base_url}/v1/task` with a
//! serialized [`BackendRequest`], answered either by a [`BackendResponse`]
//! object or by `{"error": {"code", "message"}}`. Transport failures are
//! retried with exponential backoff; protocol violations and structured
//! backend errors are surfaced immediately. A per-endpoint semaphore caps
//! concurrent in-flight requests.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::Deserialize;

use super::{Backend, BackendError, BackendRequest, BackendResponse};

/// Connection settings for one backend endpoint.
#[derive(Debug, Clone)]
pub struct EndpointConfig {
    /// Scheme + host + optional port, e.g. `http://127.0.0.1:8109`. The
    /// `/v1/task` path is appended automatically.
    pub base_url: String,
    /// Global per-request timeout (connect + transfer).
    pub timeout: Duration,
    /// Total attempts per request (first try included). Only transport
    /// failures are retried.
    pub max_attempts: u32,
    /// Backoff before the second attempt; doubles per further attempt.
    pub backoff: Duration,
    /// Optional bearer token sent as `authorization: Bearer <token>`.
    pub bearer_token: Option<String>,
    /// Maximum concurrent in-flight requests against this endpoint.
    pub max_in_flight: usize,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        EndpointConfig {
            base_url: base_url.into(),
            timeout: Duration::from_secs(30),
            max_attempts: 3,
            backoff: Duration::from_millis(200),
            bearer_token: None,
            max_in_flight: 8,
        }
    }
}

struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

impl Semaphore {
    fn new(permits: usize) -> Self {
        Semaphore {
            permits: Mutex::new(permits.max(1)),
            available: Condvar::new(),
        }
    }

    fn acquire(&self) -> SemaphorePermit<'_> {
        let mut permits = self.permits.lock().expect("semaphore lock poisoned");
        while *permits == 0 {
            permits = self
                .available
                .wait(permits)
                .expect("semaphore lock poisoned");
        }
        *permits -= 1;
        SemaphorePermit { semaphore: self }
    }
}

struct SemaphorePermit<'a> {
    semaphore: &'a Semaphore,
}

impl Drop for SemaphorePermit<'_> {
    fn drop(&mut self) {
        let mut permits = self
            .semaphore
            .permits
            .lock()
            .expect("semaphore lock poisoned");
        *permits += 1;
        self.semaphore.available.notify_one();
    }
}

#[derive(Deserialize)]
struct WireFailure {
    error: WireFailureBody,
}

#[derive(Deserialize)]
struct WireFailureBody {
    code: String,
    message: String,
}

/// A [`Backend`] that forwards requests to a remote generation service.
pub struct HttpBackend {
    agent: ureq::Agent,
    url: String,
    name: String,
    config: EndpointConfig,
    gate: Semaphore,
}

impl HttpBackend {
    pub fn new(config: EndpointConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        let url = format!("{}/v1/task", config.base_url.trim_end_matches('/'));
        HttpBackend {
            agent,
            name: format!("http:{}", config.base_url),
            url,
            gate: Semaphore::new(config.max_in_flight),
            config,
        }
    }

    fn send_once(&self, body: &str) -> Result<BackendResponse, AttemptError> {
        let mut request = self
            .agent
            .post(&self.url)
            .header("content-type", "application/json");
        if let Some(token) = &self.config.bearer_token {
            request = request.header("authorization", format!("Bearer {token}"));
        }
        let mut response = request.send(body).map_err(classify_send_error)?;
        let status = response.status().as_u16();
        let text = response
            .body_mut()
            .read_to_string()
            .map_err(|e| AttemptError {
                error: BackendError::Transport {
                    message: format!("failed reading response body: {e}"),
                },
                retryable: true,
            })?;
        parse_body(status, &text).map_err(|error| AttemptError {
            error,
            retryable: false,
        })
    }
}

struct AttemptError {
    error: BackendError,
    retryable: bool,
}

fn classify_send_error(e: ureq::Error) -> AttemptError {
    match e {
        ureq::Error::Protocol(p) => AttemptError {
            error: BackendError::Protocol {
                message: format!("malformed http exchange: {p}"),
            },
            retryable: false,
        },
        ureq::Error::Timeout(_)
        | ureq::Error::HostNotFound
        | ureq::Error::ConnectionFailed
        | ureq::Error::Io(_) => AttemptError {
            error: BackendError::Transport {
                message: e.to_string(),
            },
            retryable: true,
        },
        other => AttemptError {
            error: BackendError::Transport {
                message: other.to_string(),
            },
            retryable: false,
        },
    }
}

fn parse_body(status: u16, text: &str) -> Result<BackendResponse, BackendError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| {
        BackendError::Protocol {
            message: format!("response (status {status}) is not valid JSON: {e}"),
        }
    })?;
    if value.get("error").is_some() {
        let failure: WireFailure =
            serde_json::from_value(value).map_err(|e| BackendError::Protocol {
                message: format!("malformed error object (status {status}): {e}"),
            })?;
        return Err(BackendError::RemoteFailure {
            code: failure.error.code,
            message: failure.error.message,
        });
    }
    if !(200..300).contains(&status) {
        return Err(BackendError::Protocol {
            message: format!("unexpected status {status} without error object"),
        });
    }
    serde_json::from_value(value).map_err(|e| BackendError::Protocol {
        message: format!("response does not match the protocol: {e}"),
    })
}

impl Backend for HttpBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn execute(&self, request: &BackendRequest) -> Result<BackendResponse, BackendError> {
        let _permit = self.gate.acquire();
        let body = serde_json::to_string(request).expect("requests serialize infallibly");
        let max_attempts = self.config.max_attempts.max(1);
        let mut delay = self.config.backoff;
        let mut attempt = 1;
        loop {
            match self.send_once(&body) {
                Ok(response) => return Ok(response),
                Err(AttemptError { error, retryable }) => {
                    if !retryable || attempt >= max_attempts {
                        return Err(error);
                    }
                    std::thread::sleep(delay);
                    delay = delay.saturating_mul(2);
                    attempt += 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_joins_without_double_slash() {
        let backend = HttpBackend::new(EndpointConfig::new("http://127.0.0.1:9/"));
        assert_eq!(backend.url, "http://127.0.0.1:9/v1/task");
        assert_eq!(backend.name(), "http:http://127.0.0.1:9/");
    }

    #[test]
    fn parse_body_success_and_failures() {
        let ok = parse_body(200, r#"{"outputs":["x"]}"#).unwrap();
        assert_eq!(ok.outputs, vec!["x"]);

        let err = parse_body(200, r#"{"error":{"code":"overloaded","message":"busy"}}"#)
            .unwrap_err();
        assert!(
            matches!(err, BackendError::RemoteFailure { ref code, ref message }
                if code == "overloaded" && message == "busy")
        );

        let err = parse_body(500, r#"{"error":{"code":"boom","message":"bad"}}"#).unwrap_err();
        assert!(matches!(err, BackendError::RemoteFailure { .. }));

        let err = parse_body(200, "not json").unwrap_err();
        assert!(matches!(err, BackendError::Protocol { .. }));

        let err = parse_body(200, r#"{"error":"just a string"}"#).unwrap_err();
        assert!(matches!(err, BackendError::Protocol { .. }));

        let err = parse_body(503, r#"{"outputs":["x"]}"#).unwrap_err();
        assert!(matches!(err, BackendError::Protocol { .. }));

        let err = parse_body(200, r#"{"unexpected":1}"#).unwrap_err();
        assert!(matches!(err, BackendError::Protocol { .. }));
    }

    #[test]
    fn semaphore_caps_and_releases() {
        let sem = Semaphore::new(2);
        let a = sem.acquire();
        let b = sem.acquire();
        assert_eq!(*sem.permits.lock().unwrap(), 0);
        drop(a);
        assert_eq!(*sem.permits.lock().unwrap(), 1);
        drop(b);
        assert_eq!(*sem.permits.lock().unwrap(), 2);
    }

    #[test]
    fn zero_cap_is_clamped_to_one() {
        let sem = Semaphore::new(0);
        let permit = sem.acquire();
        drop(permit);
    }
}
