//! Fluency scoring: a word n-gram model trained on target-language text, or
//! per-sentence scores produced elsewhere.
//!
//! The model predicts over `V ∪ {UNK, EOS}`. Contexts are padded with BOS,
//! which is never predicted. [`lm_score`] is the mean natural-log
//! probability of a sentence's tokens plus its end-of-sentence event.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::corpusio::TokenizedSentence;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"ULMB";
const FORMAT_VERSION: u16 = 1;

pub const UNK: &str = "<unk>";
pub const EOS: &str = "</s>";
pub const BOS: &str = "<s>";

const UNK_ID: u32 = 0;
const EOS_ID: u32 = 1;
const BOS_ID: u32 = 2;
const FIRST_WORD_ID: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    WittenBell,
    /// Additive smoothing; contexts never seen in training back off to the
    /// next shorter context.
    AddK(f64),
}

impl std::str::FromStr for Smoothing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "witten-bell" {
            return Ok(Smoothing::WittenBell);
        }
        if let Some(k) = s.strip_prefix("add-k:").or_else(|| s.strip_prefix("add-k=")) {
            let k: f64 = k
                .parse()
                .map_err(|_| Error::arg(format!("bad add-k constant in {s:?}")))?;
            return Ok(Smoothing::AddK(k));
        }
        Err(Error::arg(format!(
            "unknown smoothing {s:?} (expected witten-bell or add-k:<k>)"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramConfig {
    pub order: usize,
    pub smoothing: Smoothing,
    /// Fixed vocabulary; training tokens outside it count as UNK. When
    /// absent the vocabulary is every training token.
    pub vocabulary: Option<Vec<String>>,
}

impl Default for NGramConfig {
    fn default() -> Self {
        Self {
            order: 3,
            smoothing: Smoothing::WittenBell,
            vocabulary: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextCounts {
    total: u64,
    next: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    smoothing: Smoothing,
    /// Words sorted; id of `words[i]` is `FIRST_WORD_ID + i`.
    words: Vec<String>,
    /// `tables[n]` maps contexts of length `n` to their continuation counts.
    tables: Vec<BTreeMap<Vec<u32>, ContextCounts>>,
}

impl NGramModel {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> Smoothing {
        self.smoothing
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.words
    }

    /// Size of the predicted event space, `|V| + 2`.
    pub fn event_count(&self) -> usize {
        self.words.len() + 2
    }

    fn id(&self, token: &str) -> u32 {
        match self.words.binary_search_by(|w| w.as_str().cmp(token)) {
            Ok(i) => FIRST_WORD_ID + i as u32,
            Err(_) => UNK_ID,
        }
    }

    fn event_ids(&self) -> impl Iterator<Item = u32> {
        [UNK_ID, EOS_ID]
            .into_iter()
            .chain(FIRST_WORD_ID..FIRST_WORD_ID + self.words.len() as u32)
    }

    fn context_ids(&self, context: &[&str]) -> Vec<u32> {
        let keep = self.order - 1;
        let mut ids: Vec<u32> = context
            .iter()
            .rev()
            .take(keep)
            .map(|t| if *t == BOS { BOS_ID } else { self.id(t) })
            .collect();
        ids.resize(keep, BOS_ID);
        ids.reverse();
        ids
    }

    fn prob_ids(&self, context: &[u32], event: u32) -> f64 {
        let events = self.event_count() as f64;
        match self.smoothing {
            Smoothing::WittenBell => {
                let mut p = 1.0 / events;
                for n in 0..=context.len() {
                    let ctx = &context[context.len() - n..];
                    if let Some(c) = self.tables[n].get(ctx) {
                        let types = c.next.len() as f64;
                        let seen = c.next.get(&event).copied().unwrap_or(0) as f64;
                        p = (seen + types * p) / (c.total as f64 + types);
                    }
                }
                p
            }
            Smoothing::AddK(k) => {
                for n in (0..=context.len()).rev() {
                    let ctx = &context[context.len() - n..];
                    if let Some(c) = self.tables[n].get(ctx) {
                        let seen = c.next.get(&event).copied().unwrap_or(0) as f64;
                        let denom = c.total as f64 + k * events;
                        return (seen + k) / denom;
                    }
                }
                1.0 / events
            }
        }
    }

    /// `P(token | context)` where `token` is a word, [`UNK`] or [`EOS`] and
    /// `context` lists preceding tokens (BOS padding is implicit). Words
    /// outside the vocabulary are read as UNK.
    pub fn prob(&self, context: &[&str], token: &str) -> f64 {
        let event = match token {
            EOS => EOS_ID,
            _ => self.id(token),
        };
        self.prob_ids(&self.context_ids(context), event)
    }

    /// The full conditional distribution over the event space, keyed by
    /// token string (including [`UNK`] and [`EOS`]).
    pub fn distribution(&self, context: &[&str]) -> BTreeMap<String, f64> {
        let ctx = self.context_ids(context);
        self.event_ids()
            .map(|e| (self.event_name(e).to_owned(), self.prob_ids(&ctx, e)))
            .collect()
    }

    /// Distribution over `V ∪ {UNK}` conditioned on the sentence continuing.
    pub fn token_distribution(&self, context: &[&str]) -> BTreeMap<String, f64> {
        let mut d = self.distribution(context);
        let eos = d.remove(EOS).unwrap_or(0.0);
        for p in d.values_mut() {
            *p /= 1.0 - eos;
        }
        d
    }

    fn event_name(&self, id: u32) -> &str {
        match id {
            UNK_ID => UNK,
            EOS_ID => EOS,
            BOS_ID => BOS,
            w => &self.words[(w - FIRST_WORD_ID) as usize],
        }
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&[self.order as u8])?;
        match self.smoothing {
            Smoothing::WittenBell => {
                w.write_all(&[0])?;
                w.write_all(&0f64.to_le_bytes())?;
            }
            Smoothing::AddK(k) => {
                w.write_all(&[1])?;
                w.write_all(&k.to_le_bytes())?;
            }
        }
        w.write_all(&(self.words.len() as u32).to_le_bytes())?;
        for word in &self.words {
            w.write_all(&(word.len() as u32).to_le_bytes())?;
            w.write_all(word.as_bytes())?;
        }
        for table in &self.tables {
            w.write_all(&(table.len() as u64).to_le_bytes())?;
            for (ctx, counts) in table {
                for id in ctx {
                    w.write_all(&id.to_le_bytes())?;
                }
                w.write_all(&counts.total.to_le_bytes())?;
                w.write_all(&(counts.next.len() as u32).to_le_bytes())?;
                for (id, c) in &counts.next {
                    w.write_all(&id.to_le_bytes())?;
                    w.write_all(&c.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let truncated = |_| Error::Format("truncated language model file".into());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a language model file (bad magic)".into()));
        }
        let mut b2 = [0u8; 2];
        let mut b1 = [0u8; 1];
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b2).map_err(truncated)?;
        let version = u16::from_le_bytes(b2);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported language model version {version}")));
        }
        r.read_exact(&mut b1).map_err(truncated)?;
        let order = b1[0] as usize;
        if order == 0 {
            return Err(Error::Format("language model order 0".into()));
        }
        r.read_exact(&mut b1).map_err(truncated)?;
        r.read_exact(&mut b8).map_err(truncated)?;
        let smoothing = match b1[0] {
            0 => Smoothing::WittenBell,
            1 => Smoothing::AddK(f64::from_le_bytes(b8)),
            t => return Err(Error::Format(format!("unknown smoothing tag {t}"))),
        };
        let mut read_u32 = |r: &mut R| -> Result<u32> {
            r.read_exact(&mut b4).map_err(truncated)?;
            Ok(u32::from_le_bytes(b4))
        };
        let n_words = read_u32(&mut r)? as usize;
        let mut words = Vec::with_capacity(n_words);
        for _ in 0..n_words {
            let len = read_u32(&mut r)? as usize;
            let mut buf = vec![0u8; len];
            r.read_exact(&mut buf).map_err(truncated)?;
            words.push(String::from_utf8(buf).map_err(|_| Error::Format("vocabulary entry is not UTF-8".into()))?);
        }
        if words.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("vocabulary is not sorted and unique".into()));
        }
        let mut tables = Vec::with_capacity(order);
        for n in 0..order {
            let mut b8 = [0u8; 8];
            r.read_exact(&mut b8).map_err(truncated)?;
            let count = u64::from_le_bytes(b8);
            let mut table = BTreeMap::new();
            for _ in 0..count {
                let ctx = (0..n).map(|_| read_u32(&mut r)).collect::<Result<Vec<_>>>()?;
                r.read_exact(&mut b8).map_err(truncated)?;
                let total = u64::from_le_bytes(b8);
                let entries = read_u32(&mut r)?;
                let mut next = BTreeMap::new();
                for _ in 0..entries {
                    let id = read_u32(&mut r)?;
                    r.read_exact(&mut b8).map_err(truncated)?;
                    next.insert(id, u64::from_le_bytes(b8));
                }
                table.insert(ctx, ContextCounts { total, next });
            }
            tables.push(table);
        }
        Ok(Self {
            order,
            smoothing,
            words,
            tables,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::read(&bytes[..])
    }
}

pub fn train_ngram(corpus: &[TokenizedSentence], config: &NGramConfig) -> Result<NGramModel> {
    if corpus.is_empty() {
        return Err(Error::arg("cannot train a language model on an empty corpus"));
    }
    if config.order == 0 || config.order > u8::MAX as usize {
        return Err(Error::arg(format!("n-gram order {} is out of range", config.order)));
    }
    if let Smoothing::AddK(k) = config.smoothing {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::arg(format!("add-k constant {k} must be non-negative")));
        }
    }
    let words: Vec<String> = match &config.vocabulary {
        Some(v) => v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect(),
        None => corpus
            .iter()
            .flat_map(|s| s.tokens.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if words.iter().any(|w| w == UNK || w == EOS || w == BOS) {
        return Err(Error::arg("vocabulary contains a reserved token"));
    }
    let mut model = NGramModel {
        order: config.order,
        smoothing: config.smoothing,
        words,
        tables: vec![BTreeMap::new(); config.order],
    };
    let keep = config.order - 1;
    for s in corpus {
        let mut history = vec![BOS_ID; keep];
        let events: Vec<u32> = s.tokens.iter().map(|t| model.id(t)).chain([EOS_ID]).collect();
        for e in events {
            for n in 0..=keep {
                let ctx = history[history.len() - n..].to_vec();
                let c = model.tables[n].entry(ctx).or_default();
                c.total += 1;
                *c.next.entry(e).or_insert(0) += 1;
            }
            if keep > 0 {
                history.remove(0);
                history.push(e);
            }
        }
    }
    log::debug!(
        "trained order-{} model: {} words, {} sentences",
        model.order,
        model.words.len(),
        corpus.len()
    );
    Ok(model)
}

/// Mean log probability of the sentence's tokens and its end event.
pub fn lm_score(model: &NGramModel, sentence: &TokenizedSentence) -> Result<f64> {
    if sentence.is_empty() {
        return Err(Error::arg("cannot score an empty sentence"));
    }
    let keep = model.order - 1;
    let mut history = vec![BOS_ID; keep];
    let mut total = 0.0;
    let events = sentence.tokens.iter().map(|t| model.id(t)).chain([EOS_ID]);
    for e in events {
        total += model.prob_ids(&history, e).ln();
        if keep > 0 {
            history.remove(0);
            history.push(e);
        }
    }
    Ok(total / (sentence.len() + 1) as f64)
}

/// Reads `index\tscore` rows. Indices must cover `0..n` without gaps; an
/// optional non-numeric header row is skipped.
pub fn load_external_scores(path: impl AsRef<Path>) -> Result<BTreeMap<usize, f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_external_scores(&text)
}

pub fn parse_external_scores(text: &str) -> Result<BTreeMap<usize, f64>> {
    let mut out = BTreeMap::new();
    for (row, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (idx, score) = (fields.next().unwrap_or(""), fields.next());
        let Ok(idx) = idx.trim().parse::<usize>() else {
            if row == 0 {
                continue;
            }
            return Err(Error::Parse {
                row: row + 1,
                message: format!("bad index {idx:?}"),
            });
        };
        let score: f64 = score
            .and_then(|s| s.trim().parse().ok())
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::Parse {
                row: row + 1,
                message: "missing or non-numeric score".into(),
            })?;
        if out.insert(idx, score).is_some() {
            return Err(Error::Format(format!("score index {idx} appears twice")));
        }
    }
    if let Some(missing) = (0..out.len()).find(|i| !out.contains_key(i)) {
        return Err(Error::Format(format!("external scores are missing index {missing}")));
    }
    Ok(out)
}

/// Source of the fluency term: higher means more fluent.
pub trait FluencyModel: Send + Sync {
    /// Score of hypothesis number `index`.
    fn fluency(&self, index: usize, sentence: &TokenizedSentence) -> Result<f64>;
}

impl FluencyModel for NGramModel {
    fn fluency(&self, _index: usize, sentence: &TokenizedSentence) -> Result<f64> {
        lm_score(self, sentence)
    }
}

/// Precomputed per-hypothesis scores, e.g. from a neural language model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalScores(pub BTreeMap<usize, f64>);

impl FluencyModel for ExternalScores {
    fn fluency(&self, index: usize, _sentence: &TokenizedSentence) -> Result<f64> {
        self.0
            .get(&index)
            .copied()
            .ok_or_else(|| Error::Format(format!("no external fluency score for hypothesis {index}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpusio::Tokenizer;
    use crate::synthetic::grammar_corpus;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sent(s: &str) -> TokenizedSentence {
        TokenizedSentence::new(s, Tokenizer::Whitespace)
    }

    fn cfg(order: usize, smoothing: Smoothing) -> NGramConfig {
        NGramConfig {
            order,
            smoothing,
            vocabulary: None,
        }
    }

    #[test]
    fn unsmoothed_unigram_counts() {
        let m = train_ngram(&[sent("a a b")], &cfg(1, Smoothing::AddK(0.0))).unwrap();
        let d = m.token_distribution(&[]);
        assert!((d["a"] - 2.0 / 3.0).abs() <= 1e-12);
        assert!((d["b"] - 1.0 / 3.0).abs() <= 1e-12);
        assert_eq!(d[UNK], 0.0);
        // with the end event: a a b </s>
        assert!((m.prob(&[], EOS) - 0.25).abs() <= 1e-12);
    }

    fn add_one_model() -> NGramModel {
        let c = NGramConfig {
            order: 1,
            smoothing: Smoothing::AddK(1.0),
            vocabulary: Some(vec!["a".into(), "b".into()]),
        };
        train_ngram(&[sent("a")], &c).unwrap()
    }

    #[test]
    fn add_one_hand_values() {
        let m = add_one_model();
        let d = m.token_distribution(&[]);
        assert!((d["a"] - 0.5).abs() <= 1e-12);
        assert!((d["b"] - 0.25).abs() <= 1e-12);
        assert!((d[UNK] - 0.25).abs() <= 1e-12);
        // over the full event space: a 2/6, b 1/6, UNK 1/6, EOS 2/6
        assert!((m.prob(&[], "a") - 2.0 / 6.0).abs() <= 1e-12);
        assert!((m.prob(&[], EOS) - 2.0 / 6.0).abs() <= 1e-12);
        let expect = ((2.0f64 / 6.0).ln() + (2.0f64 / 6.0).ln()) / 2.0;
        assert!((lm_score(&m, &sent("a")).unwrap() - expect).abs() <= 1e-12);
        assert_eq!(m.prob(&[], "zzz"), m.prob(&[], UNK));
    }

    #[test]
    fn witten_bell_hand_value() {
        // unigram counts a:2 b:1 </s>:1, total 4, types 3, events {a,b,UNK,EOS}
        let m = train_ngram(&[sent("a a b")], &cfg(1, Smoothing::WittenBell)).unwrap();
        assert!((m.prob(&[], "a") - (2.0 + 3.0 / 4.0) / 7.0).abs() <= 1e-12);
        assert!((m.prob(&[], UNK) - (3.0 / 4.0) / 7.0).abs() <= 1e-12);
    }

    #[test]
    fn distributions_are_normalized() {
        let corpus = grammar_corpus(500, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for smoothing in [Smoothing::WittenBell, Smoothing::AddK(0.5), Smoothing::AddK(1.0)] {
            for order in 1..=4 {
                let m = train_ngram(&corpus, &cfg(order, smoothing)).unwrap();
                let vocab = m.vocabulary().to_vec();
                for _ in 0..100 {
                    let len = rng.gen_range(0..4);
                    let ctx: Vec<String> = (0..len)
                        .map(|_| match rng.gen_range(0..10) {
                            0 => "never-seen".to_owned(),
                            1 => BOS.to_owned(),
                            _ => vocab.choose(&mut rng).unwrap().clone(),
                        })
                        .collect();
                    let ctx: Vec<&str> = ctx.iter().map(String::as_str).collect();
                    let full: f64 = m.distribution(&ctx).values().sum();
                    let tokens: f64 = m.token_distribution(&ctx).values().sum();
                    assert!((full - 1.0).abs() <= 1e-9, "{smoothing:?} {order} {ctx:?}: {full}");
                    assert!((tokens - 1.0).abs() <= 1e-9);
                    assert!(m.distribution(&ctx).values().all(|&p| p > 0.0));
                }
            }
        }
    }

    #[test]
    fn fluent_sentences_outscore_permutations() {
        let corpus = grammar_corpus(10_000, 21);
        let m = train_ngram(&corpus, &NGramConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let (mut fluent, mut shuffled) = (0.0, 0.0);
        for _ in 0..100 {
            let s = corpus.choose(&mut rng).unwrap();
            let mut toks = s.tokens.clone();
            toks.shuffle(&mut rng);
            fluent += lm_score(&m, s).unwrap();
            shuffled += lm_score(&m, &TokenizedSentence::from_tokens(toks)).unwrap();
        }
        assert!(fluent > shuffled, "{fluent} vs {shuffled}");
    }

    #[test]
    fn adding_a_sentence_never_lowers_its_score() {
        let vocab: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let random_sentence = |rng: &mut ChaCha8Rng| {
            let len = rng.gen_range(1..6);
            TokenizedSentence::from_tokens((0..len).map(|_| vocab.choose(rng).unwrap().clone()).collect())
        };
        for smoothing in [Smoothing::WittenBell, Smoothing::AddK(0.0), Smoothing::AddK(1.0)] {
            for order in 1..=3 {
                let c = NGramConfig {
                    order,
                    smoothing,
                    vocabulary: Some(vocab.clone()),
                };
                for _ in 0..50 {
                    let corpus: Vec<_> = (0..rng.gen_range(1..8)).map(|_| random_sentence(&mut rng)).collect();
                    let extra = corpus.choose(&mut rng).unwrap().clone();
                    let before = lm_score(&train_ngram(&corpus, &c).unwrap(), &extra).unwrap();
                    let mut grown = corpus.clone();
                    grown.push(extra.clone());
                    let after = lm_score(&train_ngram(&grown, &c).unwrap(), &extra).unwrap();
                    assert!(after >= before - 1e-12, "{smoothing:?} order {order}: {before} -> {after}");
                }
            }
        }
    }

    #[test]
    fn scoring_is_pure_and_training_deterministic() {
        let corpus = grammar_corpus(200, 41);
        let a = train_ngram(&corpus, &NGramConfig::default()).unwrap();
        let b = train_ngram(&corpus, &NGramConfig::default()).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        assert_eq!(lm_score(&a, &corpus[3]).unwrap(), lm_score(&a, &corpus[3].clone()).unwrap());
    }

    #[test]
    fn persistence_round_trip() {
        for smoothing in [Smoothing::WittenBell, Smoothing::AddK(0.25)] {
            let m = train_ngram(&grammar_corpus(100, 51), &cfg(3, smoothing)).unwrap();
            let back = NGramModel::read(&m.to_bytes()[..]).unwrap();
            assert_eq!(back, m);
        }
        assert!(NGramModel::read(&b"ULMB\x01"[..]).is_err());
        assert!(NGramModel::read(&b"XXXX\x01\x00"[..]).is_err());
    }

    #[test]
    fn errors() {
        assert!(train_ngram(&[], &NGramConfig::default()).is_err());
        let m = add_one_model();
        assert!(lm_score(&m, &TokenizedSentence::from_tokens(vec![])).is_err());
        assert!("add-k:-1".parse::<Smoothing>().is_ok_and(|s| train_ngram(&[sent("a")], &cfg(1, s)).is_err()));
        assert_eq!("add-k:0.5".parse::<Smoothing>().unwrap(), Smoothing::AddK(0.5));
        assert!("kneser-ney".parse::<Smoothing>().is_err());
    }

    #[test]
    fn external_scores() {
        let m = parse_external_scores("0\t-1.5\n1\t-2.0").unwrap();
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![(0, -1.5), (1, -2.0)]);
        let err = parse_external_scores("0\t-1\n2\t-3\n").unwrap_err();
        assert!(err.to_string().contains("missing index 1"), "{err}");
        assert!(parse_external_scores("").unwrap().is_empty());
        assert_eq!(parse_external_scores("index\tscore\n0\t1\n").unwrap().len(), 1);
        assert!(parse_external_scores("0\tx\n").is_err());
        let ext = ExternalScores(parse_external_scores("0\t-1.5\n").unwrap());
        assert_eq!(ext.fluency(0, &sent("q")).unwrap(), -1.5);
        assert!(ext.fluency(1, &sent("q")).is_err());
    }
}
