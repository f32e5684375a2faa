use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ChatMessage, LlmError};

/// One recorded exchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub fingerprint: String,
    pub response: String,
}

pub type Transcript = Vec<TranscriptEntry>;

/// Hex SHA-256 over the model name and the serialized message list.
pub fn fingerprint(model: &str, messages: &[ChatMessage]) -> String {
    #[derive(Serialize)]
    struct Keyed<'a> {
        model: &'a str,
        messages: &'a [ChatMessage],
    }
    let canonical = serde_json::to_vec(&Keyed { model, messages }).expect("messages serialize");
    hex::encode(Sha256::digest(&canonical))
}

/// Read a JSON Lines transcript. Blank lines are skipped.
pub fn read_transcript(path: &Path) -> Result<Transcript, LlmError> {
    let err = |reason: String| LlmError::Transcript { path: path.to_path_buf(), reason };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| err(format!("line {}: {e}", i + 1))))
        .collect()
}

/// Appends entries to a transcript file, flushing after every line.
#[derive(Debug)]
pub struct TranscriptWriter {
    path: PathBuf,
    out: BufWriter<File>,
    written: usize,
}

impl TranscriptWriter {
    pub fn create(path: &Path) -> Result<Self, LlmError> {
        Self::open(path, false)
    }

    pub fn append(path: &Path) -> Result<Self, LlmError> {
        Self::open(path, true)
    }

    fn open(path: &Path, append: bool) -> Result<Self, LlmError> {
        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .append(append)
            .truncate(!append)
            .open(path)
            .map_err(|e| LlmError::Transcript { path: path.to_path_buf(), reason: e.to_string() })?;
        Ok(Self { path: path.to_path_buf(), out: BufWriter::new(file), written: 0 })
    }

    pub fn push(&mut self, entry: &TranscriptEntry) -> Result<(), LlmError> {
        let err = |e: std::io::Error| LlmError::Transcript { path: self.path.clone(), reason: e.to_string() };
        let line = serde_json::to_string(entry).expect("entry serializes");
        writeln!(self.out, "{line}").map_err(err)?;
        self.out.flush().map_err(err)?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_depends_on_model_and_messages() {
        let m = [ChatMessage::user("hi")];
        let a = fingerprint("gpt-3.5", &m);
        assert_eq!(a.len(), 64);
        assert_eq!(a, fingerprint("gpt-3.5", &m));
        assert_ne!(a, fingerprint("other", &m));
        assert_ne!(a, fingerprint("gpt-3.5", &[ChatMessage::user("hi!")]));
        assert_ne!(a, fingerprint("gpt-3.5", &[ChatMessage::system("hi")]));
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        let e = |n: &str| TranscriptEntry { fingerprint: n.into(), response: format!("r{n}\nline") };
        let mut w = TranscriptWriter::create(&p).unwrap();
        w.push(&e("a")).unwrap();
        drop(w);
        let mut w = TranscriptWriter::append(&p).unwrap();
        w.push(&e("b")).unwrap();
        assert_eq!(w.written(), 1);
        assert_eq!(read_transcript(&p).unwrap(), vec![e("a"), e("b")]);
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn bad_line_reported() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.jsonl");
        std::fs::write(&p, "{\"fingerprint\":\"a\",\"response\":\"x\"}\nnot json\n").unwrap();
        let err = read_transcript(&p).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }
}
