//! Pseudo-parallel sentence mining from two monolingual pools.
//!
//! Two miners are provided. [`mine_wmd`] ranks all targets of a query by Word
//! Centroid Distance, then computes exact WMD only for the `k_prefetch`
//! nearest and keeps the best. [`mine_margin`] scores sentence embeddings
//! with the ratio margin (cosine over mean neighbourhood cosine). Mined
//! pairs are then cut down by [`select_top_rate`].
//!
//! Queries are independent and run on the ambient rayon pool; results are
//! merged and sorted so output never depends on the worker count.

mod filter;
mod langid;

use std::collections::HashSet;

use rayon::prelude::*;

pub use filter::{filter_corpus, filter_pairs, levenshtein_overlap, FilterConfig, FilterReport};
pub use langid::{ExternalLabels, LanguagePredicate, PoolSide, TrigramLanguageId};

use crate::corpusio::{EmbeddingStore, ScoredPair, TokenizedSentence};
use crate::error::{Error, Result};
use crate::transport;
use crate::vecops;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiningStrategy {
    WmdPrefetch,
    RatioMargin,
}

impl std::str::FromStr for MiningStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wmd-prefetch" => Ok(MiningStrategy::WmdPrefetch),
            "ratio-margin" => Ok(MiningStrategy::RatioMargin),
            other => Err(Error::arg(format!("unknown mining strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningConfig {
    pub strategy: MiningStrategy,
    /// WMD candidates per query after WCD prefetching.
    pub k_prefetch: usize,
    /// Neighbourhood size of the ratio margin.
    pub k_margin: usize,
    /// Fraction of mined pairs kept by [`select_top_rate`].
    pub extraction_rate: f64,
    /// Drop pairs whose source or target text was already seen.
    pub dedup: bool,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            strategy: MiningStrategy::WmdPrefetch,
            k_prefetch: 20,
            k_margin: 5,
            extraction_rate: 0.05,
            dedup: false,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_prefetch == 0 || self.k_margin == 0 {
            return Err(Error::arg("k_prefetch and k_margin must be at least 1"));
        }
        if !(self.extraction_rate > 0.0 && self.extraction_rate <= 1.0) {
            return Err(Error::arg(format!(
                "extraction rate {} is outside (0, 1]",
                self.extraction_rate
            )));
        }
        Ok(())
    }
}

/// Token vectors for every sentence of a pool.
pub fn pool_vectors<'a>(
    pool: &[TokenizedSentence],
    store: &'a EmbeddingStore,
) -> Result<Vec<Vec<&'a [f64]>>> {
    pool.iter()
        .enumerate()
        .map(|(i, s)| store.sentence_vectors(i, s))
        .collect()
}

/// Targets of one query ranked by exact WMD among the `k_prefetch` nearest
/// by WCD. Returns `(target index, WMD)` in ascending distance, ties by index.
fn prefetch_candidates(
    query: &[&[f64]],
    query_centroid: &[f64],
    targets: &[Vec<&[f64]>],
    target_centroids: &[Vec<f64>],
    k_prefetch: usize,
) -> Result<Vec<(usize, f64)>> {
    let mut by_wcd: Vec<(usize, f64)> = target_centroids
        .iter()
        .enumerate()
        .map(|(j, c)| (j, vecops::euclidean(query_centroid, c)))
        .collect();
    let k = k_prefetch.min(by_wcd.len());
    let cmp = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
    if k < by_wcd.len() {
        by_wcd.select_nth_unstable_by(k, cmp);
        by_wcd.truncate(k);
    }
    let mut out = by_wcd
        .into_iter()
        .map(|(j, _)| Ok((j, transport::wmd(query, &targets[j], None)?.0)))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(cmp);
    Ok(out)
}

fn centroids(vectors: &[Vec<&[f64]>]) -> Result<Vec<Vec<f64>>> {
    vectors.iter().map(|v| transport::centroid(v)).collect()
}

/// Per-query target rankings by WMD after WCD prefetching: for each source
/// sentence, up to `k_prefetch` target indices in ascending WMD.
pub fn rank_wmd(
    src_pool: &[TokenizedSentence],
    tgt_pool: &[TokenizedSentence],
    src_store: &EmbeddingStore,
    tgt_store: &EmbeddingStore,
    k_prefetch: usize,
) -> Result<Vec<Vec<(usize, f64)>>> {
    if src_pool.is_empty() || tgt_pool.is_empty() {
        return Err(Error::arg("cannot mine from an empty pool"));
    }
    if k_prefetch == 0 {
        return Err(Error::arg("k_prefetch must be at least 1"));
    }
    let src = pool_vectors(src_pool, src_store)?;
    let tgt = pool_vectors(tgt_pool, tgt_store)?;
    let src_c = centroids(&src)?;
    let tgt_c = centroids(&tgt)?;
    (0..src.len())
        .into_par_iter()
        .map(|i| prefetch_candidates(&src[i], &src_c[i], &tgt, &tgt_c, k_prefetch))
        .collect()
}

/// WCD-prefetched WMD mining. Each source sentence is paired with its
/// lowest-WMD candidate, scored `−WMD`; output is sorted by descending score
/// with ties broken by (source index, target index).
pub fn mine_wmd(
    src_pool: &[TokenizedSentence],
    tgt_pool: &[TokenizedSentence],
    src_store: &EmbeddingStore,
    tgt_store: &EmbeddingStore,
    config: &MiningConfig,
) -> Result<Vec<ScoredPair>> {
    config.validate()?;
    let ranked = rank_wmd(src_pool, tgt_pool, src_store, tgt_store, config.k_prefetch)?;
    Ok(best_from_rankings(&ranked, src_pool, tgt_pool))
}

/// Pairs each source with its top-ranked target, scored `−WMD`, sorted as
/// [`sort_pairs`] does.
pub fn best_from_rankings(
    ranked: &[Vec<(usize, f64)>],
    src_pool: &[TokenizedSentence],
    tgt_pool: &[TokenizedSentence],
) -> Vec<ScoredPair> {
    let mut out: Vec<ScoredPair> = ranked
        .iter()
        .enumerate()
        .map(|(i, cands)| {
            let (j, d) = cands[0];
            ScoredPair {
                source_index: i,
                target_index: j,
                source: src_pool[i].clone(),
                target: tgt_pool[j].clone(),
                score: -d + 0.0,
            }
        })
        .collect();
    sort_pairs(&mut out);
    out
}

/// Descending score, then ascending (source index, target index).
pub fn sort_pairs(pairs: &mut [ScoredPair]) {
    pairs.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.source_index.cmp(&b.source_index))
            .then(a.target_index.cmp(&b.target_index))
    });
}

/// Ratio margin of one candidate pair given the cosines to each side's
/// `k` nearest neighbours: `cos(x,y) / (Σ cos(x,z)/2k + Σ cos(y,z)/2k)`.
pub fn margin_value(cos_xy: f64, neighbours_x: &[f64], neighbours_y: &[f64]) -> Result<f64> {
    let k = neighbours_x.len();
    if k == 0 || neighbours_y.len() != k {
        return Err(Error::arg("both neighbourhoods must have the same non-zero size"));
    }
    let sx: f64 = neighbours_x.iter().sum();
    let sy: f64 = neighbours_y.iter().sum();
    let denom = (sx + sy) / (2 * k) as f64;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::Degenerate("neighbourhood cosines average to zero".into()));
    }
    Ok(cos_xy / denom)
}

fn unit_rows(embs: &[Vec<f64>], side: &str) -> Result<Vec<Vec<f64>>> {
    vecops::common_dim(embs, side)?;
    embs.iter()
        .enumerate()
        .map(|(i, e)| {
            vecops::normalized(e)
                .map_err(|_| Error::arg(format!("{side} embedding {i} has zero norm")))
        })
        .collect()
}

fn top_k_mean(values: &mut [f64], k: usize) -> f64 {
    let k = k.min(values.len());
    values.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    values[..k].iter().sum::<f64>() / k as f64
}

/// Full cosine matrix between two embedding sets, row-major.
pub fn cosine_matrix(src: &[Vec<f64>], tgt: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let s = unit_rows(src, "source")?;
    let t = unit_rows(tgt, "target")?;
    if s[0].len() != t[0].len() {
        return Err(Error::arg("source and target embeddings differ in dimension"));
    }
    Ok(s.par_iter()
        .map(|x| t.iter().map(|y| vecops::dot(x, y)).collect())
        .collect())
}

/// Forward ratio-margin mining over sentence embeddings. For each source
/// sentence the target with the highest margin is kept, scored by that
/// margin. Neighbourhoods are the `k_margin` most cosine-similar sentences
/// of the opposite pool.
pub fn mine_margin(
    src_pool: &[TokenizedSentence],
    tgt_pool: &[TokenizedSentence],
    src_embs: &[Vec<f64>],
    tgt_embs: &[Vec<f64>],
    config: &MiningConfig,
) -> Result<Vec<ScoredPair>> {
    config.validate()?;
    if src_pool.len() != src_embs.len() || tgt_pool.len() != tgt_embs.len() {
        return Err(Error::arg("pool sizes do not match embedding counts"));
    }
    if src_pool.is_empty() || tgt_pool.is_empty() {
        return Err(Error::arg("cannot mine from an empty pool"));
    }
    let k = config.k_margin;
    if k >= src_pool.len() || k >= tgt_pool.len() {
        return Err(Error::arg(format!(
            "k_margin {k} must be smaller than both pool sizes ({}, {})",
            src_pool.len(),
            tgt_pool.len()
        )));
    }
    let cos = cosine_matrix(src_embs, tgt_embs)?;
    let (n, m) = (cos.len(), cos[0].len());
    let r_src: Vec<f64> = cos.par_iter().map(|row| top_k_mean(&mut row.clone(), k)).collect();
    let r_tgt: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| top_k_mean(&mut (0..n).map(|i| cos[i][j]).collect::<Vec<_>>(), k))
        .collect();

    let best: Vec<(usize, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = (0, f64::NEG_INFINITY);
            for j in 0..m {
                let denom = (r_src[i] + r_tgt[j]) / 2.0;
                let score = cos[i][j] / denom;
                if score.is_finite() && score > best.1 {
                    best = (j, score);
                }
            }
            best
        })
        .collect();

    let mut out = Vec::with_capacity(n);
    for (i, (j, score)) in best.into_iter().enumerate() {
        if !score.is_finite() {
            return Err(Error::Degenerate(format!(
                "no finite margin for source sentence {i}"
            )));
        }
        out.push(ScoredPair {
            source_index: i,
            target_index: j,
            source: src_pool[i].clone(),
            target: tgt_pool[j].clone(),
            score,
        });
    }
    sort_pairs(&mut out);
    Ok(out)
}

fn selection_size(rate: f64, n: usize) -> usize {
    let x = rate * n as f64;
    let rounded = x.round();
    let k = if (x - rounded).abs() <= 1e-9 * x.max(1.0) {
        rounded
    } else {
        x.ceil()
    };
    (k as usize).min(n)
}

/// The `ceil(rate · n)` highest-scoring pairs, ordered by descending score;
/// equal scores keep their input order.
pub fn select_top_rate(pairs: &[ScoredPair], rate: f64) -> Result<Vec<ScoredPair>> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::arg(format!("extraction rate {rate} is outside (0, 1]")));
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| pairs[b].score.total_cmp(&pairs[a].score).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(selection_size(rate, pairs.len()))
        .map(|i| pairs[i].clone())
        .collect())
}

/// Keeps a pair only if neither its source nor its target text was seen in
/// an earlier pair.
pub fn dedup_pairs(pairs: &[ScoredPair]) -> Vec<ScoredPair> {
    let mut src_seen = HashSet::new();
    let mut tgt_seen = HashSet::new();
    pairs
        .iter()
        .filter(|p| {
            let fresh = !src_seen.contains(&p.source.text) && !tgt_seen.contains(&p.target.text);
            src_seen.insert(p.source.text.clone());
            tgt_seen.insert(p.target.text.clone());
            fresh
        })
        .cloned()
        .collect()
}
