use std::fmt;
use std::sync::Arc;

use crate::corpusio::{ScoredPair, TokenizedSentence};
use crate::error::{Error, Result};
use crate::mining::{LanguagePredicate, PoolSide};

#[derive(Debug, Clone)]
pub struct FilterConfig {
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Pairs whose character-level overlap exceeds this are dropped.
    pub max_overlap: f64,
    pub language: Option<Arc<dyn LanguagePredicate>>,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_tokens: 3,
            max_tokens: 30,
            max_overlap: 0.5,
            language: None,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_tokens == 0 || self.min_tokens > self.max_tokens {
            return Err(Error::arg(format!(
                "need 0 < min_tokens ({}) <= max_tokens ({})",
                self.min_tokens, self.max_tokens
            )));
        }
        if !(0.0..=1.0).contains(&self.max_overlap) {
            return Err(Error::arg(format!("max_overlap {} is outside [0, 1]", self.max_overlap)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FilterReport {
    pub input: usize,
    pub too_short: usize,
    pub too_long: usize,
    pub overlap: usize,
    pub language: usize,
    pub kept: usize,
}

impl fmt::Display for FilterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input\t{}", self.input)?;
        writeln!(f, "dropped_too_short\t{}", self.too_short)?;
        writeln!(f, "dropped_too_long\t{}", self.too_long)?;
        writeln!(f, "dropped_overlap\t{}", self.overlap)?;
        writeln!(f, "dropped_language\t{}", self.language)?;
        writeln!(f, "kept\t{}", self.kept)
    }
}

/// `1 − levenshtein(a, b) / max(|a|, |b|)` over characters; two empty
/// strings overlap fully.
pub fn levenshtein_overlap(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / longest as f64
}

enum Verdict {
    Keep,
    Short,
    Long,
    Overlap,
    Language,
}

fn length_verdict(s: &TokenizedSentence, cfg: &FilterConfig) -> Verdict {
    if s.len() < cfg.min_tokens {
        Verdict::Short
    } else if s.len() > cfg.max_tokens {
        Verdict::Long
    } else {
        Verdict::Keep
    }
}

fn tally(report: &mut FilterReport, v: &Verdict) -> bool {
    match v {
        Verdict::Keep => {
            report.kept += 1;
            return true;
        }
        Verdict::Short => report.too_short += 1,
        Verdict::Long => report.too_long += 1,
        Verdict::Overlap => report.overlap += 1,
        Verdict::Language => report.language += 1,
    }
    false
}

/// Length and language filtering of one monolingual pool.
pub fn filter_corpus(
    corpus: &[TokenizedSentence],
    side: PoolSide,
    cfg: &FilterConfig,
) -> Result<(Vec<TokenizedSentence>, FilterReport)> {
    cfg.validate()?;
    let mut report = FilterReport {
        input: corpus.len(),
        ..Default::default()
    };
    let kept = corpus
        .iter()
        .filter(|s| {
            let mut v = length_verdict(s, cfg);
            if matches!(v, Verdict::Keep) && cfg.language.as_ref().is_some_and(|l| !l.accept(side, s)) {
                v = Verdict::Language;
            }
            tally(&mut report, &v)
        })
        .cloned()
        .collect();
    Ok((kept, report))
}

/// Length (both sides), overlap and language filtering of sentence pairs.
pub fn filter_pairs(pairs: &[ScoredPair], cfg: &FilterConfig) -> Result<(Vec<ScoredPair>, FilterReport)> {
    cfg.validate()?;
    let mut report = FilterReport {
        input: pairs.len(),
        ..Default::default()
    };
    let kept = pairs
        .iter()
        .filter(|p| {
            let mut v = length_verdict(&p.source, cfg);
            if matches!(v, Verdict::Keep) {
                v = length_verdict(&p.target, cfg);
            }
            if matches!(v, Verdict::Keep)
                && levenshtein_overlap(&p.source.text, &p.target.text) > cfg.max_overlap
            {
                v = Verdict::Overlap;
            }
            if matches!(v, Verdict::Keep)
                && cfg.language.as_ref().is_some_and(|l| {
                    !l.accept(PoolSide::Source, &p.source) || !l.accept(PoolSide::Target, &p.target)
                })
            {
                v = Verdict::Language;
            }
            tally(&mut report, &v)
        })
        .cloned()
        .collect();
    Ok((kept, report))
}
