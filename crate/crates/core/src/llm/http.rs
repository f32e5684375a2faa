use std::time::Duration;

use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use super::gateway::{ChatBackend, ChatRequest};
use super::{ChatMessage, LlmConfig, LlmError};

/// OpenAI-compatible `POST <base_url>/v1/chat/completions` client with
/// exponential backoff on transport errors, 429 and 5xx.
pub struct HttpBackend {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
    max_retries: u32,
    retry_base: Duration,
    max_concurrency: usize,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

enum Failure {
    Retryable(LlmError),
    Fatal(LlmError),
}

impl HttpBackend {
    pub fn new(config: &LlmConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            agent,
            endpoint: format!("{}/v1/chat/completions", config.base_url.trim_end_matches('/')),
            api_key: config.api_key.clone(),
            max_retries: config.max_retries,
            retry_base: config.retry_base,
            max_concurrency: config.max_concurrency,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn attempt(&self, body: &WireRequest<'_>) -> Result<String, Failure> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send_json(body).map_err(classify_transport)?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(classify_transport)?;
        if status == 429 || (500..600).contains(&status) {
            return Err(Failure::Retryable(LlmError::ProviderError { status, body: excerpt(&text) }));
        }
        if !(200..300).contains(&status) {
            return Err(Failure::Fatal(LlmError::ProviderError { status, body: excerpt(&text) }));
        }
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::Fatal(LlmError::Protocol(format!("response is not JSON: {e}"))))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Failure::Fatal(LlmError::Protocol("missing choices[0].message.content".into())))
    }

    fn backoff(&self, retry: u32) -> Duration {
        let base = self.retry_base.saturating_mul(2u32.saturating_pow(retry));
        let jitter = rand::thread_rng().gen_range(0.0..0.25);
        base.mul_f64(1.0 + jitter)
    }
}

fn classify_transport(e: ureq::Error) -> Failure {
    match e {
        ureq::Error::Timeout(_) => Failure::Retryable(LlmError::Timeout),
        ureq::Error::Io(_)
        | ureq::Error::ConnectionFailed
        | ureq::Error::HostNotFound
        | ureq::Error::BodyStalled
        | ureq::Error::Protocol(_) => Failure::Retryable(LlmError::Transport(e.to_string())),
        other => Failure::Fatal(LlmError::Transport(other.to_string())),
    }
}

fn excerpt(body: &str) -> String {
    const MAX: usize = 300;
    match body.char_indices().nth(MAX) {
        Some((i, _)) => format!("{}…", &body[..i]),
        None => body.to_string(),
    }
}

impl ChatBackend for HttpBackend {
    fn send(&self, request: &ChatRequest<'_>) -> Result<String, LlmError> {
        let body = WireRequest {
            model: request.model,
            messages: request.messages,
            temperature: request.temperature,
            max_tokens: request.max_tokens,
        };
        let mut retry = 0;
        loop {
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retryable(e)) if retry >= self.max_retries => return Err(e),
                Err(Failure::Retryable(e)) => {
                    let delay = self.backoff(retry);
                    tracing::warn!(error = %e, retry = retry + 1, delay_ms = delay.as_millis() as u64, "retrying chat completion");
                    std::thread::sleep(delay);
                    retry += 1;
                }
            }
        }
    }

    fn concurrency(&self) -> usize {
        self.max_concurrency
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::Provider;

    #[test]
    fn endpoint_joins_base_url() {
        let mut c = LlmConfig::new(Provider::LocalChat);
        c.base_url = "http://127.0.0.1:9/".into();
        assert_eq!(HttpBackend::new(&c).endpoint(), "http://127.0.0.1:9/v1/chat/completions");
    }

    #[test]
    fn backoff_doubles_with_bounded_jitter() {
        let c = LlmConfig { retry_base: Duration::from_millis(100), ..LlmConfig::default() };
        let b = HttpBackend::new(&c);
        for retry in 0..4 {
            let d = b.backoff(retry).as_secs_f64();
            let base = 0.1 * 2f64.powi(retry as i32);
            assert!(d >= base && d < base * 1.25 + 1e-9, "{retry}: {d}");
        }
    }

    #[test]
    fn excerpt_truncates() {
        assert_eq!(excerpt("short"), "short");
        assert_eq!(excerpt(&"é".repeat(400)).chars().count(), 301);
    }
}
