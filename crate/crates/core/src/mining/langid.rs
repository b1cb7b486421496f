use std::collections::HashMap;
use std::fmt;

use crate::corpusio::TokenizedSentence;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoolSide {
    Source,
    Target,
}

/// Decides whether a sentence belongs to the language expected on its side.
pub trait LanguagePredicate: Send + Sync + fmt::Debug {
    fn accept(&self, side: PoolSide, sentence: &TokenizedSentence) -> bool;
}

/// Character-trigram naive Bayes with two classes, trained on the two
/// monolingual pools themselves. A sentence is kept when its own pool's
/// class is at least as likely as the other.
#[derive(Debug, Clone)]
pub struct TrigramLanguageId {
    counts: [HashMap<String, u64>; 2],
    totals: [u64; 2],
    vocab: usize,
}

fn trigrams(text: &str) -> impl Iterator<Item = String> {
    let chars: Vec<char> = format!("  {} ", text.to_lowercase()).chars().collect();
    (0..chars.len().saturating_sub(2))
        .map(move |i| chars[i..i + 3].iter().collect())
        .collect::<Vec<_>>()
        .into_iter()
}

impl TrigramLanguageId {
    pub fn train(source: &[TokenizedSentence], target: &[TokenizedSentence]) -> Self {
        let mut counts = [HashMap::new(), HashMap::new()];
        let mut totals = [0u64; 2];
        for (class, pool) in [source, target].into_iter().enumerate() {
            for s in pool {
                for g in trigrams(&s.text) {
                    *counts[class].entry(g).or_insert(0) += 1;
                    totals[class] += 1;
                }
            }
        }
        let vocab = counts[0]
            .keys()
            .chain(counts[1].keys())
            .collect::<std::collections::HashSet<_>>()
            .len()
            .max(1);
        Self {
            counts,
            totals,
            vocab,
        }
    }

    /// Log-likelihood of `text` under each class (add-one smoothing).
    pub fn log_likelihoods(&self, text: &str) -> [f64; 2] {
        let mut ll = [0.0; 2];
        for g in trigrams(text) {
            for c in 0..2 {
                let n = self.counts[c].get(&g).copied().unwrap_or(0) as f64;
                ll[c] += ((n + 1.0) / (self.totals[c] as f64 + self.vocab as f64)).ln();
            }
        }
        ll
    }

    pub fn classify(&self, text: &str) -> PoolSide {
        let ll = self.log_likelihoods(text);
        if ll[0] >= ll[1] {
            PoolSide::Source
        } else {
            PoolSide::Target
        }
    }
}

impl LanguagePredicate for TrigramLanguageId {
    fn accept(&self, side: PoolSide, sentence: &TokenizedSentence) -> bool {
        self.classify(&sentence.text) == side
    }
}

/// Per-line language labels produced by an external identifier, attached
/// to sentence texts so the predicate does not depend on pool positions.
#[derive(Debug, Clone, Default)]
pub struct ExternalLabels {
    source: HashMap<String, String>,
    target: HashMap<String, String>,
    source_language: String,
    target_language: String,
}

impl ExternalLabels {
    pub fn new(source_language: &str, target_language: &str) -> Self {
        Self {
            source_language: source_language.to_owned(),
            target_language: target_language.to_owned(),
            ..Default::default()
        }
    }

    /// Attaches one label per sentence of `pool`; `labels` is the label
    /// file's content, one label per line.
    pub fn attach(&mut self, side: PoolSide, pool: &[TokenizedSentence], labels: &str) -> Result<()> {
        let labels: Vec<&str> = labels.lines().map(str::trim).collect();
        if labels.len() != pool.len() {
            return Err(Error::Format(format!(
                "{} language labels for {} sentences",
                labels.len(),
                pool.len()
            )));
        }
        let map = match side {
            PoolSide::Source => &mut self.source,
            PoolSide::Target => &mut self.target,
        };
        for (s, l) in pool.iter().zip(labels) {
            map.insert(s.text.clone(), l.to_owned());
        }
        Ok(())
    }
}

impl LanguagePredicate for ExternalLabels {
    fn accept(&self, side: PoolSide, sentence: &TokenizedSentence) -> bool {
        let (map, want) = match side {
            PoolSide::Source => (&self.source, &self.source_language),
            PoolSide::Target => (&self.target, &self.target_language),
        };
        map.get(&sentence.text).is_some_and(|l| l == want)
    }
}
