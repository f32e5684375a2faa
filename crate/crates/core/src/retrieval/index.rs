use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{tokenize, Chunk, RetrievalError};

const FORMAT_NAME: &str = "crewline-bm25-index";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

/// Identifies a chunk. Orders by `(doc_id, ordinal)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChunkRef {
    pub doc_id: String,
    pub ordinal: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub chunk: ChunkRef,
    pub score: f64,
}

/// `(position of the chunk in the sorted chunk table, term frequency)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting(pub u32, pub u32);

/// Immutable inverted index over chunks.
///
/// Chunks are stored sorted by [`ChunkRef`], so ordering postings by chunk
/// position is the same as ordering by chunk ref.
#[derive(Debug, Clone, PartialEq)]
pub struct Index {
    params: Bm25Params,
    chunks: Vec<Chunk>,
    postings: BTreeMap<String, Vec<Posting>>,
    total_tokens: u64,
}

pub fn build_index(chunks: Vec<Chunk>) -> Result<Index, RetrievalError> {
    build_index_with(chunks, Bm25Params::default())
}

pub fn build_index_with(mut chunks: Vec<Chunk>, params: Bm25Params) -> Result<Index, RetrievalError> {
    chunks.sort_by(|a, b| (&a.doc_id, a.ordinal).cmp(&(&b.doc_id, b.ordinal)));
    if let Some(w) = chunks
        .windows(2)
        .find(|w| w[0].doc_id == w[1].doc_id && w[0].ordinal == w[1].ordinal)
    {
        return Err(RetrievalError::DuplicateChunk {
            doc_id: w[1].doc_id.clone(),
            ordinal: w[1].ordinal,
        });
    }

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut total_tokens = 0u64;
    for (pos, c) in chunks.iter().enumerate() {
        let tokens = tokenize(&c.text);
        if tokens.is_empty() || tokens.len() != c.token_count as usize {
            return Err(RetrievalError::InvalidChunk {
                doc_id: c.doc_id.clone(),
                ordinal: c.ordinal,
                reason: format!("token_count {} but text has {} tokens", c.token_count, tokens.len()),
            });
        }
        total_tokens += tokens.len() as u64;
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        for t in tokens {
            *tf.entry(t).or_default() += 1;
        }
        for (term, n) in tf {
            postings.entry(term).or_default().push(Posting(pos as u32, n));
        }
    }
    Ok(Index {
        params,
        chunks,
        postings,
        total_tokens,
    })
}

impl Index {
    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }

    pub fn chunks(&self) -> &[Chunk] {
        &self.chunks
    }

    pub fn chunk(&self, r: &ChunkRef) -> Option<&Chunk> {
        self.position(r).map(|p| &self.chunks[p])
    }

    fn position(&self, r: &ChunkRef) -> Option<usize> {
        self.chunks
            .binary_search_by(|c| (c.doc_id.as_str(), c.ordinal).cmp(&(r.doc_id.as_str(), r.ordinal)))
            .ok()
    }

    pub fn doc_length(&self, r: &ChunkRef) -> Option<u32> {
        self.chunk(r).map(|c| c.token_count)
    }

    /// Mean chunk length in tokens; 0 for an empty index.
    pub fn avg_len(&self) -> f64 {
        if self.chunks.is_empty() {
            0.0
        } else {
            self.total_tokens as f64 / self.chunks.len() as f64
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// `(chunk ref, term frequency)` pairs for `term`, sorted by chunk ref.
    pub fn postings(&self, term: &str) -> Vec<(ChunkRef, u32)> {
        self.postings
            .get(term)
            .map(|ps| ps.iter().map(|p| (self.chunk_ref(p.0 as usize), p.1)).collect())
            .unwrap_or_default()
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    fn chunk_ref(&self, pos: usize) -> ChunkRef {
        let c = &self.chunks[pos];
        ChunkRef {
            doc_id: c.doc_id.clone(),
            ordinal: c.ordinal,
        }
    }

    /// Robertson IDF floored at zero.
    fn idf(&self, df: usize) -> f64 {
        let n = self.chunks.len() as f64;
        let df = df as f64;
        ((n - df + 0.5) / (df + 0.5)).ln().max(0.0)
    }

    /// Top `k` chunks by BM25 against the distinct query terms.
    ///
    /// Only chunks containing at least one query term are returned. Ties are
    /// broken by ascending chunk ref.
    pub fn retrieve(&self, query: &str, k: usize) -> Vec<Hit> {
        if k == 0 || self.chunks.is_empty() {
            return Vec::new();
        }
        let terms: BTreeSet<String> = tokenize(query).into_iter().collect();
        let avg_len = self.avg_len();
        let Bm25Params { k1, b } = self.params;
        let mut scores: Vec<Option<f64>> = vec![None; self.chunks.len()];
        for term in &terms {
            let Some(list) = self.postings.get(term) else {
                continue;
            };
            let idf = self.idf(list.len());
            for &Posting(pos, tf) in list {
                let tf = tf as f64;
                let len = self.chunks[pos as usize].token_count as f64;
                let part = idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg_len));
                *scores[pos as usize].get_or_insert(0.0) += part;
            }
        }
        let mut hits: Vec<(usize, f64)> = scores
            .into_iter()
            .enumerate()
            .filter_map(|(pos, s)| s.map(|s| (pos, s)))
            .collect();
        hits.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
        hits.truncate(k);
        hits.into_iter()
            .map(|(pos, score)| Hit {
                chunk: self.chunk_ref(pos),
                score,
            })
            .collect()
    }

    /// Canonical single-file form: sorted terms, sorted postings, versioned.
    /// Equal chunk sets produce byte-equal output.
    pub fn to_canonical_json(&self) -> String {
        let file = IndexFile {
            format: FORMAT_NAME.to_string(),
            version: FORMAT_VERSION,
            params: self.params,
            chunks: self.chunks.clone(),
            postings: self.postings.clone(),
        };
        let mut s = serde_json::to_string(&file).expect("index serializes");
        s.push('\n');
        s
    }

    /// Parse and verify a serialized index; the stored postings must match
    /// the ones rebuilt from the stored chunks.
    pub fn from_json(s: &str) -> Result<Self, RetrievalError> {
        let file: IndexFile = serde_json::from_str(s).map_err(|e| RetrievalError::Format(e.to_string()))?;
        if file.format != FORMAT_NAME || file.version != FORMAT_VERSION {
            return Err(RetrievalError::Format(format!(
                "unsupported format {} v{}",
                file.format, file.version
            )));
        }
        let rebuilt = build_index_with(file.chunks, file.params)?;
        if rebuilt.postings != file.postings {
            return Err(RetrievalError::Format("postings do not match chunks".into()));
        }
        Ok(rebuilt)
    }

    pub fn save(&self, path: &Path) -> Result<(), RetrievalError> {
        std::fs::write(path, self.to_canonical_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, RetrievalError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    format: String,
    version: u32,
    params: Bm25Params,
    chunks: Vec<Chunk>,
    postings: BTreeMap<String, Vec<Posting>>,
}
