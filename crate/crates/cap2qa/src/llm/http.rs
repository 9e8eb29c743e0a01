use std::time::Duration;

use cap2qa_core::AssistantRequest;
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde::{Deserialize, Serialize};

use super::{Backend, CallError};

pub const API_KEY_ENV: &str = "CAP2QA_API_KEY";

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: [ChatMessage<'a>; 1],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'static str,
    content: &'a str,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

/// Chat-completions endpoint at `{base_url}/chat/completions`.
#[derive(Debug)]
pub struct HttpBackend {
    client: Client,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpBackend {
    pub fn new(base_url: &str, api_key: Option<String>, timeout: Duration) -> Result<Self, String> {
        let client = Client::builder().timeout(timeout).build().map_err(|e| e.to_string())?;
        Ok(HttpBackend { client, endpoint: format!("{}/chat/completions", base_url.trim_end_matches('/')), api_key })
    }
}

fn retry_after(resp: &reqwest::blocking::Response) -> Option<Duration> {
    let value = resp.headers().get(reqwest::header::RETRY_AFTER)?.to_str().ok()?;
    value.trim().parse::<u64>().ok().map(Duration::from_secs)
}

impl Backend for HttpBackend {
    fn call(&self, request: &AssistantRequest) -> Result<String, CallError> {
        let body = ChatRequest {
            model: &request.model_id,
            messages: [ChatMessage { role: "user", content: &request.prompt_text }],
            temperature: request.temperature,
            max_tokens: request.max_output_tokens,
        };
        let mut builder = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        let resp = builder.send().map_err(|e| CallError::Transient { message: e.to_string(), retry_after: None })?;
        let status = resp.status();
        if status == StatusCode::UNAUTHORIZED || status == StatusCode::FORBIDDEN {
            return Err(CallError::Auth { status: status.as_u16() });
        }
        if status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error() {
            return Err(CallError::Transient {
                message: format!("HTTP {}", status.as_u16()),
                retry_after: retry_after(&resp),
            });
        }
        if !status.is_success() {
            let message = resp.text().unwrap_or_default();
            return Err(CallError::Rejected { status: status.as_u16(), message: message.chars().take(500).collect() });
        }
        let text = resp.text().map_err(|e| CallError::Transient { message: e.to_string(), retry_after: None })?;
        let parsed: ChatResponse = serde_json::from_str(&text).map_err(|e| CallError::Rejected {
            status: status.as_u16(),
            message: format!("unexpected response body: {e}"),
        })?;
        Ok(parsed.choices.into_iter().next().and_then(|c| c.message.content).unwrap_or_default())
    }
}
