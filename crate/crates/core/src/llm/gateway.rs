use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::http::HttpBackend;
use super::transcript::{fingerprint, read_transcript, TranscriptEntry, TranscriptWriter};
use super::{validate_messages, ChatMessage, LlmConfig, LlmError, Provider};

/// A fully specified completion request as seen by a backend.
#[derive(Debug, Clone)]
pub struct ChatRequest<'a> {
    pub model: &'a str,
    pub messages: &'a [ChatMessage],
    pub temperature: f64,
    pub max_tokens: u32,
    pub fingerprint: String,
}

pub trait ChatBackend: Send + Sync {
    fn send(&self, request: &ChatRequest<'_>) -> Result<String, LlmError>;

    /// Maximum in-flight requests. 1 serializes all calls.
    fn concurrency(&self) -> usize {
        1
    }

    /// Entries consumed so far, for transcript-driven backends.
    fn replay_position(&self) -> Option<usize> {
        None
    }
}

impl<F> ChatBackend for F
where
    F: Fn(&ChatRequest<'_>) -> Result<String, LlmError> + Send + Sync,
{
    fn send(&self, request: &ChatRequest<'_>) -> Result<String, LlmError> {
        self(request)
    }
}

/// Serves a recorded transcript strictly in order; any fingerprint
/// difference is an error.
#[derive(Debug)]
pub struct ReplayBackend {
    entries: Vec<TranscriptEntry>,
    cursor: Mutex<usize>,
}

impl ReplayBackend {
    pub fn new(entries: Vec<TranscriptEntry>) -> Self {
        Self::starting_at(entries, 0)
    }

    /// Resume replay after `position` already-consumed entries.
    pub fn starting_at(entries: Vec<TranscriptEntry>, position: usize) -> Self {
        Self { entries, cursor: Mutex::new(position) }
    }
}

impl ChatBackend for ReplayBackend {
    fn send(&self, request: &ChatRequest<'_>) -> Result<String, LlmError> {
        let mut cursor = self.cursor.lock().expect("replay cursor poisoned");
        let position = *cursor;
        let entry = self
            .entries
            .get(position)
            .ok_or(LlmError::ReplayExhausted { position })?;
        if entry.fingerprint != request.fingerprint {
            return Err(LlmError::ReplayMismatch {
                position,
                expected: entry.fingerprint.clone(),
                got: request.fingerprint.clone(),
            });
        }
        *cursor += 1;
        Ok(entry.response.clone())
    }

    fn replay_position(&self) -> Option<usize> {
        Some(*self.cursor.lock().expect("replay cursor poisoned"))
    }
}

/// Returns canned responses in order regardless of the request. Useful for
/// scripting a session that is then recorded into a transcript.
#[derive(Debug, Default)]
pub struct ScriptedBackend {
    responses: Mutex<VecDeque<String>>,
    served: AtomicUsize,
}

impl ScriptedBackend {
    pub fn new<I, S>(responses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            responses: Mutex::new(responses.into_iter().map(Into::into).collect()),
            served: AtomicUsize::new(0),
        }
    }
}

impl ChatBackend for ScriptedBackend {
    fn send(&self, _request: &ChatRequest<'_>) -> Result<String, LlmError> {
        let next = self.responses.lock().expect("script poisoned").pop_front();
        let position = self.served.fetch_add(usize::from(next.is_some()), Ordering::SeqCst);
        next.ok_or(LlmError::ReplayExhausted { position })
    }
}

/// The single entry point agents use to talk to a model.
pub struct Gateway {
    model: String,
    temperature: f64,
    max_tokens: u32,
    backend: Box<dyn ChatBackend>,
    recorder: Option<Mutex<TranscriptWriter>>,
    calls: AtomicUsize,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("model", &self.model)
            .field("recording", &self.recorder.is_some())
            .field("calls", &self.call_count())
            .finish()
    }
}

impl Gateway {
    /// Build the backend named by `config.provider`.
    pub fn from_config(config: &LlmConfig) -> Result<Self, LlmError> {
        config.validate()?;
        let backend: Box<dyn ChatBackend> = match config.provider {
            Provider::RemoteChat | Provider::LocalChat => Box::new(HttpBackend::new(config)),
            Provider::Replay => {
                let path = config.transcript.as_ref().expect("validated");
                Box::new(ReplayBackend::new(read_transcript(path)?))
            }
        };
        Ok(Self::with_boxed(config, backend))
    }

    pub fn with_backend(config: &LlmConfig, backend: impl ChatBackend + 'static) -> Self {
        Self::with_boxed(config, Box::new(backend))
    }

    pub fn with_boxed(config: &LlmConfig, backend: Box<dyn ChatBackend>) -> Self {
        Self {
            model: config.model.clone(),
            temperature: config.temperature,
            max_tokens: config.max_output_tokens,
            backend,
            recorder: None,
            calls: AtomicUsize::new(0),
        }
    }

    /// Append every successful exchange to `writer`. Recording forces
    /// sequential calls so the transcript order is the request order.
    pub fn recording(mut self, writer: TranscriptWriter) -> Self {
        self.recorder = Some(Mutex::new(writer));
        self
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    /// Number of requests issued (successful or not).
    pub fn call_count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn replay_position(&self) -> Option<usize> {
        self.backend.replay_position()
    }

    pub fn concurrency(&self) -> usize {
        if self.recorder.is_some() {
            1
        } else {
            self.backend.concurrency().max(1)
        }
    }

    pub fn complete(&self, messages: &[ChatMessage]) -> Result<String, LlmError> {
        validate_messages(messages)?;
        let request = ChatRequest {
            model: &self.model,
            messages,
            temperature: self.temperature,
            max_tokens: self.max_tokens,
            fingerprint: fingerprint(&self.model, messages),
        };
        self.calls.fetch_add(1, Ordering::SeqCst);
        tracing::debug!(fingerprint = %request.fingerprint, messages = messages.len(), "chat completion");
        let response = self.backend.send(&request)?;
        if let Some(rec) = &self.recorder {
            rec.lock().expect("recorder poisoned").push(&TranscriptEntry {
                fingerprint: request.fingerprint,
                response: response.clone(),
            })?;
        }
        Ok(response)
    }

    /// Apply `f` to every item, running up to [`Self::concurrency`] at once.
    /// Results come back in input order.
    pub fn map_ordered<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync,
    {
        let workers = self.concurrency().min(items.len());
        if workers <= 1 {
            return items.iter().map(f).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(item) = items.get(i) else { break };
                    *slots[i].lock().expect("slot poisoned") = Some(f(item));
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().expect("slot poisoned").expect("every slot filled"))
            .collect()
    }
}
