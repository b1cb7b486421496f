//! Embedding stores and their on-disk formats.
//!
//! Binary layout (all integers little-endian):
//!
//! ```text
//! "USEB" | version u16 | kind u8 | dim u32 | count u64
//! count × ( key_len u32 | key bytes (UTF-8) | dim × f32 )
//! ```
//!
//! Keys are encoded as strings: words verbatim, contextual tokens as
//! `"<sentence>:<token>"`, sentence and row keys as their decimal index.
//!
//! The text layout is a `<count> <dim> [kind]` header followed by one
//! `<key> <f1> ... <fd>` line per entry.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::corpusio::TokenizedSentence;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"USEB";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum StoreKind {
    StaticWord = 0,
    ContextualToken = 1,
    Sentence = 2,
    /// Rows of an orthogonal remapping matrix.
    OrthogonalMap = 3,
    /// A single unit bias direction.
    BiasVector = 4,
    /// Rows of a contrastive sentence projection.
    SentenceProjection = 5,
}

impl StoreKind {
    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            0 => StoreKind::StaticWord,
            1 => StoreKind::ContextualToken,
            2 => StoreKind::Sentence,
            3 => StoreKind::OrthogonalMap,
            4 => StoreKind::BiasVector,
            5 => StoreKind::SentenceProjection,
            other => return Err(Error::Format(format!("unknown store kind tag {other}"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            StoreKind::StaticWord => "static-word",
            StoreKind::ContextualToken => "contextual-token",
            StoreKind::Sentence => "sentence",
            StoreKind::OrthogonalMap => "orthogonal-map",
            StoreKind::BiasVector => "bias-vector",
            StoreKind::SentenceProjection => "sentence-projection",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        [
            StoreKind::StaticWord,
            StoreKind::ContextualToken,
            StoreKind::Sentence,
            StoreKind::OrthogonalMap,
            StoreKind::BiasVector,
            StoreKind::SentenceProjection,
        ]
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| Error::Format(format!("unknown store kind {name:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    Word(String),
    Token { sentence: usize, token: usize },
    Sentence(usize),
    Row(usize),
}

impl Key {
    fn encode(&self) -> String {
        match self {
            Key::Word(w) => w.clone(),
            Key::Token { sentence, token } => format!("{sentence}:{token}"),
            Key::Sentence(i) | Key::Row(i) => i.to_string(),
        }
    }

    fn decode(kind: StoreKind, s: &str) -> Result<Key> {
        let bad = || Error::Format(format!("malformed {} key {s:?}", kind.name()));
        Ok(match kind {
            StoreKind::StaticWord => Key::Word(s.to_owned()),
            StoreKind::ContextualToken => {
                let (a, b) = s.split_once(':').ok_or_else(bad)?;
                Key::Token {
                    sentence: a.parse().map_err(|_| bad())?,
                    token: b.parse().map_err(|_| bad())?,
                }
            }
            StoreKind::Sentence => Key::Sentence(s.parse().map_err(|_| bad())?),
            _ => Key::Row(s.parse().map_err(|_| bad())?),
        })
    }

    fn matches(&self, kind: StoreKind) -> bool {
        matches!(
            (self, kind),
            (Key::Word(_), StoreKind::StaticWord)
                | (Key::Token { .. }, StoreKind::ContextualToken)
                | (Key::Sentence(_), StoreKind::Sentence)
                | (
                    Key::Row(_),
                    StoreKind::OrthogonalMap | StoreKind::BiasVector | StoreKind::SentenceProjection
                )
        )
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Keyed vectors of one fixed dimension, in insertion order.
///
/// Values are held as `f64`. The binary format stores IEEE binary32, so a
/// binary round trip is bit-exact for any store whose values are already
/// representable in `f32` (in particular every store that was loaded from
/// disk).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    kind: StoreKind,
    dim: usize,
    keys: Vec<Key>,
    data: Vec<f64>,
    index: HashMap<Key, usize>,
}

impl EmbeddingStore {
    pub fn new(kind: StoreKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("store dimension must be positive"));
        }
        Ok(Self {
            kind,
            dim,
            keys: Vec::new(),
            data: Vec::new(),
            index: HashMap::new(),
        })
    }

    pub fn kind(&self) -> StoreKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn insert(&mut self, key: Key, vector: &[f64]) -> Result<()> {
        if !key.matches(self.kind) {
            return Err(Error::Format(format!(
                "key {key} does not fit a {} store",
                self.kind.name()
            )));
        }
        if vector.len() != self.dim {
            return Err(Error::Format(format!(
                "entry {key} has dimension {}, store dimension is {}",
                vector.len(),
                self.dim
            )));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::Format(format!("entry {key} has a non-finite component")));
        }
        if self.index.contains_key(&key) {
            return Err(Error::Format(format!("duplicate key {key}")));
        }
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.data.extend_from_slice(vector);
        Ok(())
    }

    pub fn get(&self, key: &Key) -> Option<&[f64]> {
        self.index.get(key).map(|&i| self.vector(i))
    }

    pub fn word(&self, word: &str) -> Option<&[f64]> {
        self.get(&Key::Word(word.to_owned()))
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &[f64])> {
        self.keys
            .iter()
            .zip(self.data.chunks_exact(self.dim))
    }

    /// Raw row-major data, `len() * dim()` values.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// New store with the same keys and every vector passed through `f`.
    pub fn map_vectors<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Sync,
    {
        use rayon::prelude::*;
        let mapped: Vec<Vec<f64>> = self.data.par_chunks_exact(self.dim).map(&f).collect();
        let mut out = EmbeddingStore::new(self.kind, self.dim)?;
        out.keys.reserve(self.len());
        for (key, v) in self.keys.iter().zip(&mapped) {
            out.insert(key.clone(), v)?;
        }
        Ok(out)
    }

    /// Token vectors of sentence `sentence_index`, in token order.
    ///
    /// Static-word stores are looked up by token string; contextual stores by
    /// `(sentence_index, token position)`.
    pub fn sentence_vectors(
        &self,
        sentence_index: usize,
        sentence: &TokenizedSentence,
    ) -> Result<Vec<&[f64]>> {
        sentence
            .tokens
            .iter()
            .enumerate()
            .map(|(t, tok)| {
                let key = match self.kind {
                    StoreKind::StaticWord => Key::Word(tok.clone()),
                    StoreKind::ContextualToken => Key::Token {
                        sentence: sentence_index,
                        token: t,
                    },
                    other => {
                        return Err(Error::arg(format!(
                            "a {} store has no token vectors",
                            other.name()
                        )))
                    }
                };
                self.get(&key).ok_or_else(|| Error::Lookup {
                    token: tok.clone(),
                    sentence: sentence_index,
                })
            })
            .collect()
    }

    /// Owned copy of [`Self::sentence_vectors`].
    pub fn sentence_matrix(
        &self,
        sentence_index: usize,
        sentence: &TokenizedSentence,
    ) -> Result<Vec<Vec<f64>>> {
        Ok(self
            .sentence_vectors(sentence_index, sentence)?
            .into_iter()
            .map(<[f64]>::to_vec)
            .collect())
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&[self.kind as u8])?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for (key, v) in self.iter() {
            let k = key.encode();
            w.write_all(&(k.len() as u32).to_le_bytes())?;
            w.write_all(k.as_bytes())?;
            for &x in v {
                w.write_all(&(x as f32).to_le_bytes())?;
            }
        }
        w.flush()
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let fmt = |e: std::io::Error| Error::Format(format!("truncated binary store: {e}"));
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(fmt)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(&magic),
                "USEB"
            )));
        }
        let version = u16::from_le_bytes(read_array(&mut r).map_err(fmt)?);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported store version {version}")));
        }
        let [tag] = read_array::<1, _>(&mut r).map_err(fmt)?;
        let kind = StoreKind::from_tag(tag)?;
        let dim = u32::from_le_bytes(read_array(&mut r).map_err(fmt)?) as usize;
        let count = u64::from_le_bytes(read_array(&mut r).map_err(fmt)?) as usize;
        let mut store = EmbeddingStore::new(kind, dim).map_err(|_| Error::Format("zero dimension".into()))?;
        let mut buf = vec![0u8; dim * 4];
        let mut v = vec![0.0f64; dim];
        for _ in 0..count {
            let klen = u32::from_le_bytes(read_array(&mut r).map_err(fmt)?) as usize;
            let mut kbytes = vec![0u8; klen];
            r.read_exact(&mut kbytes).map_err(fmt)?;
            let k = String::from_utf8(kbytes)
                .map_err(|_| Error::Format("store key is not UTF-8".into()))?;
            r.read_exact(&mut buf).map_err(fmt)?;
            for (o, b) in v.iter_mut().zip(buf.chunks_exact(4)) {
                *o = f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64;
            }
            store.insert(Key::decode(kind, &k)?, &v)?;
        }
        Ok(store)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        if self.kind == StoreKind::StaticWord {
            writeln!(w, "{} {}", self.len(), self.dim)?;
        } else {
            writeln!(w, "{} {} {}", self.len(), self.dim, self.kind.name())?;
        }
        for (key, v) in self.iter() {
            write!(w, "{key}")?;
            for x in v {
                write!(w, " {x}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, line)) => {
                    let line = line.map_err(|e| Error::Format(e.to_string()))?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
                None => return Err(Error::Format("empty text store".into())),
            }
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::Format(format!("bad header {header:?}")));
        }
        let count: usize = fields[0]
            .parse()
            .map_err(|_| Error::Format(format!("bad count in header {header:?}")))?;
        let dim: usize = fields[1]
            .parse()
            .map_err(|_| Error::Format(format!("bad dimension in header {header:?}")))?;
        let kind = match fields.get(2) {
            Some(name) => StoreKind::from_name(name)?,
            None => StoreKind::StaticWord,
        };
        let mut store = EmbeddingStore::new(kind, dim).map_err(|_| Error::Format("zero dimension".into()))?;
        for (lineno, line) in lines {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let key = it.next().unwrap_or_default();
            let values: Vec<f64> = it
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Format(format!("line {}: non-numeric component", lineno + 1)))?;
            if values.len() != dim {
                return Err(Error::Format(format!(
                    "line {}: {} components, header says {dim}",
                    lineno + 1,
                    values.len()
                )));
            }
            store.insert(Key::decode(kind, key)?, &values)?;
        }
        if store.len() != count {
            return Err(Error::Format(format!(
                "header declares {count} entries, found {}",
                store.len()
            )));
        }
        Ok(store)
    }

    /// Loads a store, choosing binary or text format by the leading magic bytes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.starts_with(MAGIC) {
            Self::read_binary(bytes.as_slice())
        } else {
            Self::read_text(BufReader::new(bytes.as_slice()))
        }
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(BufWriter::new(f))
            .map_err(|e| Error::io(path, e))
    }

    pub fn save_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_text(BufWriter::new(f)).map_err(|e| Error::io(path, e))
    }

    pub fn to_binary_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_binary(&mut out).expect("writing to a Vec cannot fail");
        out
    }
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> std::io::Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Loads a store from `path`.
pub fn load_embedding_store(path: impl AsRef<Path>) -> Result<EmbeddingStore> {
    EmbeddingStore::load(path)
}
