//! Live HTTP backend speaking the OpenAI-style chat-completions protocol.
//!
//! Configuration comes from environment variables so credentials never
//! appear on command lines or in manifests:
//!
//! - `SUSPENSE_FORGE_API_KEY` — bearer token (required)
//! - `SUSPENSE_FORGE_API_URL` — endpoint URL (optional)
//! - `SUSPENSE_FORGE_MODEL`  — model name (optional)
//!
//! Transport failures and 5xx responses are retried with exponential
//! backoff up to the attempt budget; 4xx-class responses (including
//! content refusals) surface immediately.

use std::env;
use std::thread;
use std::time::Duration;

use super::{ChatBackend, CompletionRequest, GatewayError};

pub const ENV_API_KEY: &str = "SUSPENSE_FORGE_API_KEY";
pub const ENV_API_URL: &str = "SUSPENSE_FORGE_API_URL";
pub const ENV_MODEL: &str = "SUSPENSE_FORGE_MODEL";

pub const DEFAULT_API_URL: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_MODEL: &str = "gpt-3.5-turbo-0613";

/// Endpoint, credential, and retry settings for a [`LiveBackend`].
#[derive(Debug, Clone)]
pub struct LiveConfig {
    pub url: String,
    pub model: String,
    pub api_key: String,
    pub max_attempts: u32,
    pub initial_backoff: Duration,
}

impl LiveConfig {
    pub fn new(url: impl Into<String>, model: impl Into<String>, api_key: impl Into<String>) -> Self {
        LiveConfig {
            url: url.into(),
            model: model.into(),
            api_key: api_key.into(),
            max_attempts: 3,
            initial_backoff: Duration::from_millis(200),
        }
    }

    pub fn from_env() -> Result<Self, GatewayError> {
        let api_key = env::var(ENV_API_KEY).map_err(|_| GatewayError::MissingCredentials(ENV_API_KEY))?;
        let url = env::var(ENV_API_URL).unwrap_or_else(|_| DEFAULT_API_URL.to_owned());
        let model = env::var(ENV_MODEL).unwrap_or_else(|_| DEFAULT_MODEL.to_owned());
        Ok(LiveConfig::new(url, model, api_key))
    }
}

pub struct LiveBackend {
    config: LiveConfig,
    client: reqwest::blocking::Client,
}

impl LiveBackend {
    pub fn new(config: LiveConfig) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .expect("http client builds");
        LiveBackend { config, client }
    }

    pub fn from_env() -> Result<Self, GatewayError> {
        Ok(LiveBackend::new(LiveConfig::from_env()?))
    }

    fn payload(&self, request: &CompletionRequest<'_>) -> serde_json::Value {
        let messages: Vec<serde_json::Value> = request
            .messages
            .iter()
            .map(|m| serde_json::json!({"role": m.role.as_str(), "content": m.text}))
            .collect();
        let mut body = serde_json::json!({
            "model": self.config.model,
            "messages": messages,
            "temperature": request.params.temperature,
            "max_tokens": request.params.max_tokens,
        });
        for (key, value) in &request.params.extra {
            body[key] = value.clone();
        }
        body
    }
}

/// Pulls `choices[0].message.content` out of a chat-completions response.
fn extract_content(body: &str) -> Option<String> {
    let value: serde_json::Value = serde_json::from_str(body).ok()?;
    value["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_owned)
}

fn truncate_body(body: &str) -> String {
    const LIMIT: usize = 500;
    if body.len() <= LIMIT {
        return body.to_owned();
    }
    let mut end = LIMIT;
    while !body.is_char_boundary(end) {
        end -= 1;
    }
    format!("{}… ({} bytes)", &body[..end], body.len())
}

impl ChatBackend for LiveBackend {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, GatewayError> {
        let payload = self.payload(request);
        let mut backoff = self.config.initial_backoff;
        let mut attempt = 0;
        loop {
            attempt += 1;
            let outcome = self
                .client
                .post(&self.config.url)
                .bearer_auth(&self.config.api_key)
                .json(&payload)
                .send();
            match outcome {
                Err(err) => {
                    if attempt >= self.config.max_attempts {
                        return Err(GatewayError::Transport {
                            detail: err.to_string(),
                            attempts: attempt,
                        });
                    }
                }
                Ok(response) => {
                    let status = response.status();
                    let body = response.text().unwrap_or_default();
                    if status.is_success() {
                        return extract_content(&body).ok_or_else(|| GatewayError::Provider {
                            status: status.as_u16(),
                            body: format!(
                                "response lacks choices[0].message.content: {}",
                                truncate_body(&body)
                            ),
                            attempts: attempt,
                        });
                    }
                    let retryable = status.is_server_error();
                    if !retryable || attempt >= self.config.max_attempts {
                        return Err(GatewayError::Provider {
                            status: status.as_u16(),
                            body: truncate_body(&body),
                            attempts: attempt,
                        });
                    }
                }
            }
            thread::sleep(backoff);
            backoff = backoff.saturating_mul(2);
        }
    }
}
