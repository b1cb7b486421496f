//! The metric variants.
//!
//! Every component is oriented higher-is-better before weighting: transport
//! distances enter negated, the fluency term is a mean log probability and
//! the sentence term is a cosine.
//!
//! * word metric: `w_xlng·(−WMD(x, y)) + w_lm·LM(y) + w_pseudo·(−WMD(y, y'))`
//! * sentence metric: `cos(P·pool(x), P·pool(y))`
//! * ensemble: `w_wrd·wrd + w_snt·snt`, components z-normalized over the
//!   batch when `normalize_components` is set.

use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::corpusio::{EmbeddingStore, Key, StoreKind, TokenizedSentence};
use crate::error::{Error, Result};
use crate::langmodel::FluencyModel;
use crate::sentembed::{self, SentenceProjection};
use crate::transport;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreWeights {
    /// Preset name, or "custom".
    pub name: String,
    pub w_xlng: f64,
    pub w_lm: f64,
    pub w_pseudo: f64,
    pub w_wrd: f64,
    pub w_snt: f64,
    /// Number of remapping rounds applied to the cross-lingual stores.
    pub remap_iterations: usize,
    pub normalize_components: bool,
}

pub const PRESETS: [&str; 3] = ["tuned", "plus", "plusplus"];

impl ScoreWeights {
    pub fn preset(name: &str) -> Result<Self> {
        let (w_xlng, w_lm, w_pseudo, w_wrd, w_snt) = match name {
            "tuned" => (0.5, 0.1, 0.4, 0.6, 0.4),
            "plus" => (0.45, 0.1, 0.45, 0.5, 0.5),
            "plusplus" => (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.5, 0.5),
            other => {
                return Err(Error::arg(format!(
                    "unknown preset {other:?} (expected one of {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(Self {
            name: name.to_owned(),
            w_xlng,
            w_lm,
            w_pseudo,
            w_wrd,
            w_snt,
            remap_iterations: 0,
            normalize_components: true,
        })
    }

    /// Custom word-metric weights; the ensemble weights are `(1, 0)`.
    pub fn word_only(w_xlng: f64, w_lm: f64, w_pseudo: f64) -> Self {
        Self {
            name: "custom".into(),
            w_xlng,
            w_lm,
            w_pseudo,
            w_wrd: 1.0,
            w_snt: 0.0,
            remap_iterations: 0,
            normalize_components: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.w_xlng, self.w_lm, self.w_pseudo, self.w_wrd, self.w_snt];
        if all.iter().any(|w| !w.is_finite()) {
            return Err(Error::arg("weights must be finite"));
        }
        if (self.w_wrd + self.w_snt - 1.0).abs() > 1e-9 {
            return Err(Error::arg(format!(
                "w_wrd + w_snt must be 1 (got {} + {})",
                self.w_wrd, self.w_snt
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ScoreWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "preset={} w_xlng={} w_lm={} w_pseudo={} w_wrd={} w_snt={} remap_iterations={} normalize={}",
            self.name,
            self.w_xlng,
            self.w_lm,
            self.w_pseudo,
            self.w_wrd,
            self.w_snt,
            self.remap_iterations,
            self.normalize_components
        )
    }
}

/// Embedding stores used by the word metric.
#[derive(Debug, Clone, Copy)]
pub struct WordStores<'a> {
    /// Source side, after any remapping.
    pub source: &'a EmbeddingStore,
    /// Hypothesis side for the cross-lingual distance, after any remapping.
    pub hypothesis: &'a EmbeddingStore,
    /// Hypothesis side in its own monolingual space.
    pub hypothesis_raw: &'a EmbeddingStore,
    /// Pseudo references in the same monolingual space; defaults to
    /// `hypothesis_raw` (enough for static word stores).
    pub pseudo_reference: Option<&'a EmbeddingStore>,
}

impl<'a> WordStores<'a> {
    /// Static-word stores without remapping: one store per language.
    pub fn plain(source: &'a EmbeddingStore, target: &'a EmbeddingStore) -> Self {
        Self {
            source,
            hypothesis: target,
            hypothesis_raw: target,
            pseudo_reference: None,
        }
    }
}

/// One segment of a batch. `index` addresses contextual stores and
/// external fluency scores.
#[derive(Debug, Clone, Copy)]
pub struct Segment<'a> {
    pub index: usize,
    pub source: &'a TokenizedSentence,
    pub hypothesis: &'a TokenizedSentence,
    pub pseudo_reference: Option<&'a TokenizedSentence>,
}

/// Unweighted, oriented components of the word metric. Terms with zero
/// weight are not computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordComponents {
    pub cross_lingual: Option<f64>,
    pub fluency: Option<f64>,
    pub pseudo: Option<f64>,
}

pub fn word_components(
    seg: &Segment<'_>,
    stores: &WordStores<'_>,
    lm: Option<&dyn FluencyModel>,
    weights: &ScoreWeights,
) -> Result<WordComponents> {
    let cross_lingual = if weights.w_xlng != 0.0 {
        let x = stores.source.sentence_vectors(seg.index, seg.source)?;
        let y = stores.hypothesis.sentence_vectors(seg.index, seg.hypothesis)?;
        Some(-transport::wmd(&x, &y, None)?.0 + 0.0)
    } else {
        None
    };
    let fluency = if weights.w_lm != 0.0 {
        let lm = lm.ok_or_else(|| Error::arg("w_lm is non-zero but no fluency model was given"))?;
        Some(lm.fluency(seg.index, seg.hypothesis)?)
    } else {
        None
    };
    let pseudo = if weights.w_pseudo != 0.0 {
        let p = seg
            .pseudo_reference
            .ok_or_else(|| Error::arg("w_pseudo is non-zero but no pseudo reference was given"))?;
        let y = stores.hypothesis_raw.sentence_vectors(seg.index, seg.hypothesis)?;
        let r = stores
            .pseudo_reference
            .unwrap_or(stores.hypothesis_raw)
            .sentence_vectors(seg.index, p)?;
        Some(-transport::wmd(&y, &r, None)?.0 + 0.0)
    } else {
        None
    };
    Ok(WordComponents {
        cross_lingual,
        fluency,
        pseudo,
    })
}

impl WordComponents {
    pub fn combine(&self, weights: &ScoreWeights) -> f64 {
        let mut s = weights.w_xlng * self.cross_lingual.unwrap_or(0.0) + weights.w_lm * self.fluency.unwrap_or(0.0);
        if let Some(p) = self.pseudo {
            s += weights.w_pseudo * p;
        }
        s
    }
}

/// Word-level metric of one segment.
pub fn score_wrd(
    seg: &Segment<'_>,
    stores: &WordStores<'_>,
    lm: Option<&dyn FluencyModel>,
    weights: &ScoreWeights,
) -> Result<f64> {
    Ok(word_components(seg, stores, lm, weights)?.combine(weights))
}

pub fn score_wrd_batch(
    batch: &[Segment<'_>],
    stores: &WordStores<'_>,
    lm: Option<&dyn FluencyModel>,
    weights: &ScoreWeights,
) -> Result<Vec<f64>> {
    batch.par_iter().map(|s| score_wrd(s, stores, lm, weights)).collect()
}

/// Sentence-level metric of one segment.
pub fn score_snt(
    seg: &Segment<'_>,
    projection: &SentenceProjection,
    source_store: &EmbeddingStore,
    hypothesis_store: &EmbeddingStore,
) -> Result<f64> {
    let x = pooled(seg.index, seg.source, source_store)?;
    let y = pooled(seg.index, seg.hypothesis, hypothesis_store)?;
    if x.len() != projection.dim() || y.len() != projection.dim() {
        return Err(Error::arg(format!(
            "embedding dimension does not match the {}-dimensional projection",
            projection.dim()
        )));
    }
    sentembed::cosine_score(&projection.project(&x), &projection.project(&y))
}

fn pooled(index: usize, sentence: &TokenizedSentence, store: &EmbeddingStore) -> Result<Vec<f64>> {
    if store.kind() == StoreKind::Sentence {
        return store
            .get(&Key::Sentence(index))
            .map(<[f64]>::to_vec)
            .ok_or_else(|| Error::Lookup {
                token: sentence.text.clone(),
                sentence: index,
            });
    }
    if sentence.is_empty() {
        return Err(Error::arg(format!("sentence {index} is empty")));
    }
    sentembed::pool_sentence(&store.sentence_vectors(index, sentence)?)
}

pub fn score_snt_batch(
    batch: &[Segment<'_>],
    projection: &SentenceProjection,
    source_store: &EmbeddingStore,
    hypothesis_store: &EmbeddingStore,
) -> Result<Vec<f64>> {
    batch
        .par_iter()
        .map(|s| score_snt(s, projection, source_store, hypothesis_store))
        .collect()
}

/// Population z-scores; errors on fewer than two values or zero variance.
pub fn z_normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::arg("z-normalization needs a batch of at least 2"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        return Err(Error::Degenerate("component is constant over the batch".into()));
    }
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

/// Weighted combination of precomputed word and sentence scores.
pub fn score_ensemble(word: &[f64], sentence: &[f64], weights: &ScoreWeights) -> Result<Vec<f64>> {
    weights.validate()?;
    if word.len() != sentence.len() {
        return Err(Error::arg(format!(
            "{} word scores but {} sentence scores",
            word.len(),
            sentence.len()
        )));
    }
    // a zero-weight component is not computed by callers and may be constant
    let prepare = |values: &[f64], weight: f64| -> Result<Vec<f64>> {
        if weight == 0.0 {
            Ok(vec![0.0; values.len()])
        } else if weights.normalize_components {
            z_normalize(values)
        } else {
            Ok(values.to_vec())
        }
    };
    let (w, s) = (prepare(word, weights.w_wrd)?, prepare(sentence, weights.w_snt)?);
    Ok(w.iter()
        .zip(&s)
        .map(|(a, b)| weights.w_wrd * a + weights.w_snt * b)
        .collect())
}

/// `index\tscore` rows under a comment line naming the weights.
pub fn format_scores(scores: &[f64], weights: &ScoreWeights) -> String {
    let mut out = format!("# {weights}\nindex\tscore\n");
    for (i, s) in scores.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{s}");
    }
    out
}

/// Reads scores written by [`format_scores`] (or any `index\tscore` TSV);
/// indices must be `0..n` in order.
pub fn parse_scores(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (row, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() || line.starts_with("index\t") {
            continue;
        }
        let (i, s) = line.split_once('\t').ok_or_else(|| Error::Parse {
            row: row + 1,
            message: "expected index<TAB>score".into(),
        })?;
        let bad = |m: &str| Error::Parse {
            row: row + 1,
            message: m.to_owned(),
        };
        let i: usize = i.trim().parse().map_err(|_| bad("bad index"))?;
        let s: f64 = s.trim().parse().map_err(|_| bad("bad score"))?;
        if i != out.len() {
            return Err(Error::Format(format!("score indices out of order at row {}", row + 1)));
        }
        out.push(s);
    }
    Ok(out)
}
