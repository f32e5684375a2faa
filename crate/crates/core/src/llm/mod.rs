//! Chat-completion gateway over an OpenAI-compatible HTTP endpoint (remote or
//! local server) and a deterministic transcript replay, plus extraction of
//! JSON payloads from model text.

mod gateway;
mod http;
mod json;
mod transcript;

use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gateway::{ChatBackend, ChatRequest, Gateway, ReplayBackend, ScriptedBackend};
pub use http::HttpBackend;
pub use json::{extract_json, JsonExtractError};
pub use transcript::{fingerprint, read_transcript, Transcript, TranscriptEntry, TranscriptWriter};

/// Environment variable holding the bearer token for HTTP providers.
pub const API_KEY_ENV: &str = "CREWLINE_API_KEY";
pub const DEFAULT_MODEL: &str = "gpt-3.5";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provider {
    RemoteChat,
    LocalChat,
    Replay,
}

impl Provider {
    pub fn default_base_url(self) -> &'static str {
        match self {
            Provider::RemoteChat => "https://api.openai.com",
            Provider::LocalChat => "http://localhost:11434",
            Provider::Replay => "replay://",
        }
    }
}

#[derive(Debug, Clone)]
pub struct LlmConfig {
    pub provider: Provider,
    /// Opaque model identifier passed to the endpoint.
    pub model: String,
    pub base_url: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
    pub timeout: Duration,
    pub max_retries: u32,
    /// First backoff delay; doubles on each retry.
    pub retry_base: Duration,
    pub max_concurrency: usize,
    pub transcript: Option<PathBuf>,
    pub api_key: Option<String>,
}

impl LlmConfig {
    pub fn new(provider: Provider) -> Self {
        Self {
            provider,
            model: DEFAULT_MODEL.to_string(),
            base_url: provider.default_base_url().to_string(),
            temperature: 0.0,
            max_output_tokens: 2048,
            timeout: Duration::from_secs(120),
            max_retries: 3,
            retry_base: Duration::from_secs(1),
            max_concurrency: 4,
            transcript: None,
            api_key: None,
        }
    }

    pub fn replay(transcript: impl Into<PathBuf>) -> Self {
        Self {
            transcript: Some(transcript.into()),
            ..Self::new(Provider::Replay)
        }
    }

    pub fn validate(&self) -> Result<(), LlmError> {
        let bad = |m: String| Err(LlmError::Config(m));
        if !(0.0..=2.0).contains(&self.temperature) {
            return bad(format!("temperature {} outside [0, 2]", self.temperature));
        }
        if self.max_output_tokens == 0 {
            return bad("max_output_tokens must be positive".into());
        }
        if self.max_concurrency == 0 {
            return bad("max_concurrency must be positive".into());
        }
        if self.model.trim().is_empty() {
            return bad("model must not be empty".into());
        }
        if self.provider == Provider::Replay && self.transcript.is_none() {
            return bad("replay provider requires a transcript path".into());
        }
        Ok(())
    }
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self::new(Provider::RemoteChat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("provider returned HTTP {status}: {body}")]
    ProviderError { status: u16, body: String },
    #[error("request timed out")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed provider response: {0}")]
    Protocol(String),
    #[error("replay mismatch at entry {position}: transcript expects {expected}, request is {got}")]
    ReplayMismatch {
        position: usize,
        expected: String,
        got: String,
    },
    #[error("replay transcript exhausted after {position} entries")]
    ReplayExhausted { position: usize },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transcript {}: {reason}", path.display())]
    Transcript { path: PathBuf, reason: String },
    #[error("gateway configuration: {0}")]
    Config(String),
}

pub(crate) fn validate_messages(messages: &[ChatMessage]) -> Result<(), LlmError> {
    let last = messages
        .last()
        .ok_or_else(|| LlmError::InvalidRequest("no messages".into()))?;
    if last.role != Role::User {
        return Err(LlmError::InvalidRequest("last message must come from the user".into()));
    }
    if messages
        .iter()
        .any(|m| m.role != Role::Assistant && m.content.trim().is_empty())
    {
        return Err(LlmError::InvalidRequest("system/user messages must not be empty".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = LlmConfig::default();
        assert_eq!(c.model, "gpt-3.5");
        assert_eq!(c.temperature, 0.0);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn replay_needs_transcript() {
        let c = LlmConfig::new(Provider::Replay);
        assert!(matches!(c.validate(), Err(LlmError::Config(_))));
        assert!(LlmConfig::replay("t.jsonl").validate().is_ok());
    }

    #[test]
    fn temperature_range() {
        let c = LlmConfig { temperature: 2.5, ..LlmConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn message_rules() {
        assert!(validate_messages(&[]).is_err());
        assert!(validate_messages(&[ChatMessage::user("hi"), ChatMessage::assistant("yo")]).is_err());
        assert!(validate_messages(&[ChatMessage::system(" "), ChatMessage::user("hi")]).is_err());
        assert!(validate_messages(&[ChatMessage::system("s"), ChatMessage::user("hi")]).is_ok());
    }

    #[test]
    fn role_wire_names() {
        let json = serde_json::to_string(&ChatMessage::system("x")).unwrap();
        assert_eq!(json, r#"{"role":"system","content":"x"}"#);
    }
}
