//! Assistant backends and the shared client: cache lookup, rate limiting
//! and network retries in front of an HTTP endpoint or a scripted mock.

mod cache;
mod http;
mod mock;
mod pacing;

use std::sync::{Arc, Mutex};
use std::time::Duration;

use cap2qa_core::{cache_key, Assistant, AssistantError, AssistantRequest, AssistantResponse};
use rand::rngs::StdRng;
use rand::SeedableRng;

pub use cache::ResponseCache;
pub use http::{HttpBackend, API_KEY_ENV};
pub use mock::{prompt_hash, MockBackend, MockScript, ScriptEntry};
pub use pacing::{ManualTimer, RateLimiter, RetryPolicy, SystemTimer, Timer};

/// Failure of a single backend call, before retry handling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallError {
    Transient { message: String, retry_after: Option<Duration> },
    Auth { status: u16 },
    Rejected { status: u16, message: String },
    Exhausted,
}

/// One round trip, no retries.
pub trait Backend: Send + Sync {
    fn call(&self, request: &AssistantRequest) -> Result<String, CallError>;
}

#[derive(Debug, Clone)]
pub enum BackendSpec {
    Http { base_url: String, api_key: Option<String>, timeout: Duration },
    Mock(MockScript),
}

impl BackendSpec {
    pub fn build(self) -> Result<Box<dyn Backend>, AssistantError> {
        match self {
            BackendSpec::Http { base_url, api_key, timeout } => {
                if base_url.trim().is_empty() {
                    return Err(AssistantError::InvalidRequest("http backend needs a base URL".into()));
                }
                let backend = HttpBackend::new(&base_url, api_key, timeout).map_err(AssistantError::InvalidRequest)?;
                Ok(Box::new(backend))
            }
            BackendSpec::Mock(script) => Ok(Box::new(MockBackend::new(script))),
        }
    }
}

/// Implements [`Assistant`] over any [`Backend`]. Safe to share between
/// worker threads.
pub struct AssistantClient {
    backend: Box<dyn Backend>,
    cache: Option<ResponseCache>,
    limiter: Option<RateLimiter>,
    policy: RetryPolicy,
    timer: Arc<dyn Timer>,
    rng: Mutex<StdRng>,
}

impl AssistantClient {
    pub fn new(backend: Box<dyn Backend>) -> Self {
        AssistantClient {
            backend,
            cache: None,
            limiter: None,
            policy: RetryPolicy::default(),
            timer: Arc::new(SystemTimer::default()),
            rng: Mutex::new(StdRng::from_entropy()),
        }
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_rate_limit(mut self, requests_per_minute: u32) -> Self {
        self.limiter = Some(RateLimiter::new(requests_per_minute));
        self
    }

    pub fn with_retry_policy(mut self, policy: RetryPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_timer(mut self, timer: Arc<dyn Timer>) -> Self {
        self.timer = timer;
        self
    }

    pub fn with_seed(self, seed: u64) -> Self {
        *self.rng.lock().unwrap() = StdRng::seed_from_u64(seed);
        self
    }
}

impl Assistant for AssistantClient {
    fn complete(&self, request: &AssistantRequest) -> Result<AssistantResponse, AssistantError> {
        request.validate()?;
        let key = cache_key(request);
        if let Some(cache) = &self.cache {
            let hit = cache.get(&key, request.sample).map_err(|e| AssistantError::Cache(e.to_string()))?;
            if let Some(text) = hit {
                return Ok(AssistantResponse { text, backend_latency: Duration::ZERO, from_cache: true });
            }
        }

        let mut retry = 0u32;
        loop {
            if let Some(limiter) = &self.limiter {
                limiter.acquire(self.timer.as_ref());
            }
            let started = self.timer.now();
            match self.backend.call(request) {
                Ok(text) => {
                    let backend_latency = self.timer.now().saturating_sub(started);
                    if text.trim().is_empty() {
                        return Err(AssistantError::ResponseEmpty);
                    }
                    if let Some(cache) = &self.cache {
                        cache.put(&key, request.sample, &text).map_err(|e| AssistantError::Cache(e.to_string()))?;
                    }
                    return Ok(AssistantResponse { text, backend_latency, from_cache: false });
                }
                Err(CallError::Transient { message, retry_after }) => {
                    if retry >= self.policy.retries {
                        return Err(AssistantError::BackendUnavailable { attempts: retry + 1, last_error: message });
                    }
                    let delay = {
                        let mut rng = self.rng.lock().unwrap();
                        self.policy.delay(retry, retry_after, &mut *rng)
                    };
                    log::warn!("transient backend failure ({message}); retrying in {delay:?}");
                    self.timer.sleep(delay);
                    retry += 1;
                }
                Err(CallError::Auth { status }) => return Err(AssistantError::AuthFailure { status }),
                Err(CallError::Rejected { status, message }) => {
                    return Err(AssistantError::Rejected { status, message })
                }
                Err(CallError::Exhausted) => return Err(AssistantError::ScriptExhausted),
            }
        }
    }
}
