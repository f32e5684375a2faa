//! Lexical retrieval: tokenization, overlapping chunking and a BM25 inverted
//! index used to pull context passages into agent prompts.

mod index;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::fold_diacritics;

pub use index::{build_index, build_index_with, Bm25Params, ChunkRef, Hit, Index, Posting};

/// Chunking defaults: 256 tokens per chunk, 32 shared between neighbours.
pub const DEFAULT_CHUNK_TOKENS: usize = 256;
pub const DEFAULT_CHUNK_OVERLAP: usize = 32;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("overlap {overlap} must be smaller than max_tokens {max_tokens} (and max_tokens >= 1)")]
    BadParams { max_tokens: usize, overlap: usize },
    #[error("duplicate chunk {doc_id}#{ordinal}")]
    DuplicateChunk { doc_id: String, ordinal: u32 },
    #[error("chunk {doc_id}#{ordinal}: {reason}")]
    InvalidChunk {
        doc_id: String,
        ordinal: u32,
        reason: String,
    },
    #[error("index file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A retrievable passage. `token_count` always equals `tokenize(text).len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub doc_id: String,
    pub ordinal: u32,
    pub text: String,
    pub token_count: u32,
}

impl Chunk {
    /// Returns `None` when `text` has no tokens.
    pub fn new(doc_id: impl Into<String>, ordinal: u32, text: impl Into<String>) -> Option<Self> {
        let text = text.into();
        let token_count = tokenize(&text).len() as u32;
        (token_count > 0).then(|| Self {
            doc_id: doc_id.into(),
            ordinal,
            text,
            token_count,
        })
    }
}

/// Byte spans of tokens in `text`, alongside the normalized token strings.
fn token_spans(text: &str) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut end = 0;
    for (i, c) in text.char_indices() {
        let folded = fold_diacritics(&c.to_lowercase().collect::<String>());
        if folded.is_empty() {
            // A bare combining mark: folded away, does not split the token.
            if !current.is_empty() {
                end = i + c.len_utf8();
            }
            continue;
        }
        for f in folded.chars() {
            if f.is_alphanumeric() {
                if current.is_empty() {
                    start = i;
                }
                current.push(f);
                end = i + c.len_utf8();
            } else if !current.is_empty() {
                out.push((start, end, std::mem::take(&mut current)));
            }
        }
    }
    if !current.is_empty() {
        out.push((start, end, current));
    }
    out
}

/// Lowercase, diacritic-folded runs of letters and digits. Everything else
/// separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    token_spans(text).into_iter().map(|(_, _, t)| t).collect()
}

/// Split `text` into windows of at most `max_tokens` tokens, consecutive
/// windows sharing `overlap` tokens. Chunk text is the original substring
/// covering the window. Text without tokens yields no chunks.
pub fn chunk(
    doc_id: &str,
    text: &str,
    max_tokens: usize,
    overlap: usize,
) -> Result<Vec<Chunk>, RetrievalError> {
    if max_tokens == 0 || overlap >= max_tokens {
        return Err(RetrievalError::BadParams { max_tokens, overlap });
    }
    let spans = token_spans(text);
    let mut chunks = Vec::new();
    let mut start = 0;
    while start < spans.len() {
        let end = (start + max_tokens).min(spans.len());
        chunks.push(Chunk {
            doc_id: doc_id.to_string(),
            ordinal: chunks.len() as u32,
            text: text[spans[start].0..spans[end - 1].1].to_string(),
            token_count: (end - start) as u32,
        });
        if end == spans.len() {
            break;
        }
        start = end - overlap;
    }
    Ok(chunks)
}
