//! The language-model assistant seen by the generation loop.

use alloc::string::String;
use core::fmt;
use core::time::Duration;

use chrono::{DateTime, Utc};

use crate::digest::Digest256;

#[derive(Debug, Clone, PartialEq)]
pub struct AssistantRequest {
    pub prompt_text: String,
    pub model_id: String,
    /// Sampling temperature in `[0, 2]`.
    pub temperature: f64,
    pub max_output_tokens: u32,
    /// Index of this draw among repeated requests for the same prompt.
    /// Retry iteration `i` asks for sample `i - 1`. Not part of [`cache_key`];
    /// a cache stores samples per key.
    pub sample: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssistantResponse {
    pub text: String,
    pub backend_latency: Duration,
    pub from_cache: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssistantError {
    /// Transient failures persisted past the network retry budget.
    BackendUnavailable {
        attempts: u32,
        last_error: String,
    },
    /// HTTP 401/403. Never retried.
    AuthFailure {
        status: u16,
    },
    /// Non-retryable rejection other than auth, e.g. HTTP 400.
    Rejected {
        status: u16,
        message: String,
    },
    /// A scripted mock ran out of responses.
    ScriptExhausted,
    ResponseEmpty,
    InvalidRequest(String),
    Cache(String),
}

impl fmt::Display for AssistantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssistantError::BackendUnavailable { attempts, last_error } => {
                write!(f, "backend unavailable after {attempts} attempts: {last_error}")
            }
            AssistantError::AuthFailure { status } => {
                write!(f, "authentication failed (HTTP {status}); check CAP2QA_API_KEY")
            }
            AssistantError::Rejected { status, message } => {
                write!(f, "backend rejected request (HTTP {status}): {message}")
            }
            AssistantError::ScriptExhausted => f.write_str("mock script exhausted"),
            AssistantError::ResponseEmpty => f.write_str("assistant returned an empty response"),
            AssistantError::InvalidRequest(msg) => write!(f, "invalid assistant request: {msg}"),
            AssistantError::Cache(msg) => write!(f, "response cache failure: {msg}"),
        }
    }
}

impl core::error::Error for AssistantError {}

impl AssistantRequest {
    pub fn validate(&self) -> Result<(), AssistantError> {
        if self.prompt_text.is_empty() {
            return Err(AssistantError::InvalidRequest("prompt_text is empty".into()));
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(AssistantError::InvalidRequest(alloc::format!(
                "temperature {} outside [0, 2]",
                self.temperature
            )));
        }
        if self.max_output_tokens == 0 {
            return Err(AssistantError::InvalidRequest("max_output_tokens must be positive".into()));
        }
        Ok(())
    }
}

/// Content address of a request: a pure function of prompt text, model,
/// temperature and output budget.
pub fn cache_key(request: &AssistantRequest) -> Digest256 {
    let temperature = request.temperature.to_bits().to_le_bytes();
    let max_tokens = request.max_output_tokens.to_le_bytes();
    Digest256::of_fields([
        request.prompt_text.as_bytes(),
        request.model_id.as_bytes(),
        temperature.as_slice(),
        max_tokens.as_slice(),
    ])
}

/// A chat-completion style assistant. Implementations must be callable
/// from several threads at once.
pub trait Assistant {
    fn complete(&self, request: &AssistantRequest) -> Result<AssistantResponse, AssistantError>;
}

impl<A: Assistant + ?Sized> Assistant for &A {
    fn complete(&self, request: &AssistantRequest) -> Result<AssistantResponse, AssistantError> {
        (**self).complete(request)
    }
}

/// Wall-clock source for provenance timestamps.
pub trait Clock {
    fn now(&self) -> DateTime<Utc>;
}

/// A clock frozen at one instant.
#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub DateTime<Utc>);

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn req() -> AssistantRequest {
        AssistantRequest {
            prompt_text: "Caption:\nA dog runs.\n".into(),
            model_id: "gpt-3.5-turbo".into(),
            temperature: 0.0,
            max_output_tokens: 512,
            sample: 0,
        }
    }

    #[test]
    fn equal_requests_equal_keys() {
        assert_eq!(cache_key(&req()), cache_key(&req()));
        let mut other_sample = req();
        other_sample.sample = 3;
        assert_eq!(cache_key(&req()), cache_key(&other_sample));
    }

    #[test]
    fn temperature_changes_key() {
        let mut r = req();
        r.temperature = 0.7;
        assert_ne!(cache_key(&req()), cache_key(&r));
    }

    #[test]
    fn whitespace_changes_key() {
        let mut r = req();
        r.prompt_text.push(' ');
        assert_ne!(cache_key(&req()), cache_key(&r));
    }

    #[test]
    fn model_and_budget_change_key() {
        let mut r = req();
        r.model_id = "gpt-4".into();
        assert_ne!(cache_key(&req()), cache_key(&r));
        let mut r = req();
        r.max_output_tokens = 256;
        assert_ne!(cache_key(&req()), cache_key(&r));
    }

    #[test]
    fn validation() {
        assert!(req().validate().is_ok());
        let mut r = req();
        r.prompt_text.clear();
        assert!(r.validate().is_err());
        let mut r = req();
        r.temperature = 2.5;
        assert!(r.validate().is_err());
    }
}
