//! Corpora, embedding stores, scored pairs and evaluation datasets.

mod records;
mod store;
mod tokenize;

use std::path::Path;

pub use records::{
    format_scored_pairs, load_eval_dataset, parse_eval_dataset, read_scored_pairs, write_scored_pairs, EvalRecord,
    ScoredPair,
};
pub use store::{load_embedding_store, EmbeddingStore, Key, StoreKind, FORMAT_VERSION, MAGIC};
pub use tokenize::Tokenizer;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenizedSentence {
    pub text: String,
    pub tokens: Vec<String>,
}

impl TokenizedSentence {
    pub fn new(text: &str, tokenizer: Tokenizer) -> Self {
        Self {
            text: text.to_owned(),
            tokens: tokenizer.tokenize(text),
        }
    }

    /// Sentence whose text is its tokens joined by single spaces.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        Self {
            text: tokens.join(" "),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Reads one sentence per line. Blank lines (and lines that tokenize to
/// nothing) are dropped; order is preserved.
pub fn load_corpus(path: impl AsRef<Path>, tokenizer: Tokenizer) -> Result<Vec<TokenizedSentence>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let sentences = parse_corpus(&bytes, tokenizer).map_err(|line| Error::Decode {
        path: path.to_owned(),
        line,
    })?;
    log::info!("loaded {} sentences from {}", sentences.len(), path.display());
    Ok(sentences)
}

/// Parses corpus bytes; the error is the 1-based number of the first
/// non-UTF-8 line.
pub fn parse_corpus(bytes: &[u8], tokenizer: Tokenizer) -> std::result::Result<Vec<TokenizedSentence>, usize> {
    let mut out = Vec::new();
    if bytes.is_empty() {
        return Ok(out);
    }
    for (i, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = std::str::from_utf8(raw).map_err(|_| i + 1)?;
        if line.trim().is_empty() {
            continue;
        }
        let sent = TokenizedSentence::new(line, tokenizer);
        if !sent.is_empty() {
            out.push(sent);
        }
    }
    Ok(out)
}

pub fn write_corpus(path: impl AsRef<Path>, sentences: &[TokenizedSentence]) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::new();
    for s in sentences {
        text.push_str(&s.text.replace(['\n', '\r'], " "));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
