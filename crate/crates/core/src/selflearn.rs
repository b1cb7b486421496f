//! Self-learning loops.
//!
//! Word track: mine sentence pairs by WMD, keep the best, align their words,
//! fit a remapping and apply it, then mine again with the remapped stores.
//! Maps compose: each round fits on top of the previous one.
//!
//! Sentence track: mine by ratio margin over projected sentence embeddings,
//! keep the best unique pairs, train the projection contrastively, repeat.
//!
//! Report `k` describes the state after `k` rounds (report 0 is the
//! untouched baseline) together with the pairs mined from that state.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::corpusio::{format_scored_pairs, EmbeddingStore, ScoredPair, StoreKind, TokenizedSentence};
use crate::error::{Error, Result};
use crate::eval::{gold_map, pearson, precision_at_n};
use crate::manifest::{write_atomic, RunManifest};
use crate::mining::{
    best_from_rankings, cosine_matrix, dedup_pairs, filter_pairs, mine_margin, rank_wmd, select_top_rate, FilterConfig,
    MiningConfig,
};
use crate::remap::{self, apply_remap, extract_word_pairs, ClpOptions, ProjectionMap, Side};
use crate::sentembed::{self, ContrastiveConfig, SentenceProjection};
use crate::transport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Track {
    Remap,
    Contrastive,
}

impl std::str::FromStr for Track {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "remap" => Ok(Track::Remap),
            "contrastive" => Ok(Track::Contrastive),
            other => Err(Error::arg(format!("unknown track {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemapKind {
    Clp,
    Umd,
}

impl std::str::FromStr for RemapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clp" => Ok(RemapKind::Clp),
            "umd" => Ok(RemapKind::Umd),
            other => Err(Error::arg(format!("unknown remap kind {other:?}"))),
        }
    }
}

/// Held-out material for per-iteration reporting.
#[derive(Debug, Clone, Default)]
pub struct DevEval {
    /// `gold[i]` is the target-pool index of source sentence `i`; enables P@1.
    pub gold: Option<Vec<usize>>,
    /// Judged segments scored with the current model; enables Pearson's r.
    /// Requires static-word stores.
    pub judged: Option<JudgedSet>,
}

#[derive(Debug, Clone, Default)]
pub struct JudgedSet {
    pub sources: Vec<TokenizedSentence>,
    pub hypotheses: Vec<TokenizedSentence>,
    pub human: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LoopConfig {
    pub iterations: usize,
    pub remap_kind: RemapKind,
    pub mining: MiningConfig,
    pub filter: FilterConfig,
    pub contrastive: ContrastiveConfig,
    pub clp: ClpOptions,
    /// Minimum transport mass for a word alignment.
    pub min_flow: f64,
    pub dev: DevEval,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self {
            iterations: 1,
            remap_kind: RemapKind::Clp,
            mining: MiningConfig::default(),
            filter: FilterConfig::default(),
            contrastive: ContrastiveConfig::default(),
            clp: ClpOptions::default(),
            min_flow: remap::DEFAULT_MIN_FLOW,
            dev: DevEval::default(),
        }
    }
}

impl LoopConfig {
    /// Flat description for manifests.
    pub fn describe(&self, track: Track) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_owned(), v);
        };
        put("track", format!("{track:?}"));
        put("iterations", self.iterations.to_string());
        put("mining.strategy", format!("{:?}", self.mining.strategy));
        put("mining.k_prefetch", self.mining.k_prefetch.to_string());
        put("mining.k_margin", self.mining.k_margin.to_string());
        put("mining.extraction_rate", self.mining.extraction_rate.to_string());
        put("mining.dedup", self.mining.dedup.to_string());
        match track {
            Track::Remap => {
                put("remap_kind", format!("{:?}", self.remap_kind));
                put("filter.min_tokens", self.filter.min_tokens.to_string());
                put("filter.max_tokens", self.filter.max_tokens.to_string());
                put("filter.max_overlap", self.filter.max_overlap.to_string());
                put("filter.language", self.filter.language.is_some().to_string());
                put("clp.center", self.clp.center.to_string());
                put("clp.normalize", self.clp.normalize.to_string());
                put("min_flow", self.min_flow.to_string());
            }
            Track::Contrastive => {
                let c = &self.contrastive;
                put("contrastive.temperature", c.temperature.to_string());
                put("contrastive.batch_size", c.batch_size.to_string());
                put("contrastive.learning_rate", c.learning_rate.to_string());
                put("contrastive.epochs_per_iteration", c.epochs_per_iteration.to_string());
                put("contrastive.denominator_mode", format!("{:?}", c.denominator_mode));
                put("contrastive.weight_decay", c.weight_decay.to_string());
            }
        }
        put("dev.p_at_1", self.dev.gold.is_some().to_string());
        put("dev.pearson", self.dev.judged.is_some().to_string());
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    pub mined_pairs: usize,
    pub mean_mined_score: f64,
    pub p_at_1: Option<f64>,
    pub pearson_r: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Reports as TSV with a header; absent values are empty fields.
pub fn format_reports(reports: &[IterationReport]) -> String {
    let mut out = String::from("iteration\tmined_pairs\tmean_mined_score\tp_at_1\tpearson_r\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.iteration,
            r.mined_pairs,
            r.mean_mined_score,
            opt(r.p_at_1),
            opt(r.pearson_r)
        );
    }
    out
}

fn mean_score(pairs: &[ScoredPair]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    pairs.iter().map(|p| p.score).sum::<f64>() / pairs.len() as f64
}

/// Where a loop writes its artifacts, and the manifest it accumulates.
pub struct RunDir {
    root: PathBuf,
    manifest: RunManifest,
}

impl RunDir {
    pub fn create(root: impl Into<PathBuf>, manifest: RunManifest) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
        Ok(Self { root, manifest })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.root.join(name);
        write_atomic(&p, bytes)?;
        self.manifest.add_output(&p, Some(&self.root))
    }

    fn write_store(&mut self, name: &str, store: &EmbeddingStore) -> Result<()> {
        self.write(name, &store.to_binary_bytes())
    }

    fn finish(mut self, reports: &[IterationReport]) -> Result<()> {
        self.write("reports.tsv", format_reports(reports).as_bytes())?;
        self.manifest.write(self.root.join("manifest.json"))
    }
}

#[derive(Debug, Clone)]
pub struct RemapOutcome {
    pub source_store: EmbeddingStore,
    pub target_store: EmbeddingStore,
    /// Maps in the order they were applied.
    pub maps: Vec<ProjectionMap>,
    pub reports: Vec<IterationReport>,
    /// Set when the loop stopped early; `reports` then covers the completed
    /// rounds.
    pub aborted: Option<String>,
}

fn judged_pearson_wmd(set: &JudgedSet, src: &EmbeddingStore, tgt: &EmbeddingStore) -> Result<f64> {
    check_static(src)?;
    check_static(tgt)?;
    let scores: Vec<f64> = set
        .sources
        .par_iter()
        .zip(&set.hypotheses)
        .enumerate()
        .map(|(i, (x, y))| {
            let xv = src.sentence_vectors(i, x)?;
            let yv = tgt.sentence_vectors(i, y)?;
            Ok(-transport::wmd(&xv, &yv, None)?.0)
        })
        .collect::<Result<_>>()?;
    Ok(pearson(&scores, &set.human)?.r)
}

fn check_static(store: &EmbeddingStore) -> Result<()> {
    if store.kind() != StoreKind::StaticWord {
        return Err(Error::arg("judged dev sets need static-word stores"));
    }
    Ok(())
}

pub fn run_remap_loop(
    src_pool: &[TokenizedSentence],
    tgt_pool: &[TokenizedSentence],
    src_store: &EmbeddingStore,
    tgt_store: &EmbeddingStore,
    config: &LoopConfig,
    mut run_dir: Option<RunDir>,
) -> Result<RemapOutcome> {
    config.mining.validate()?;
    config.filter.validate()?;
    let mut src = src_store.clone();
    let mut tgt = tgt_store.clone();
    let mut maps = Vec::new();
    let mut reports = Vec::new();
    let mut aborted = None;
    let gold = config.dev.gold.as_ref().map(|g| gold_map(g));

    for k in 0..=config.iterations {
        let ranked = rank_wmd(src_pool, tgt_pool, &src, &tgt, config.mining.k_prefetch)?;
        let p_at_1 = match &gold {
            Some(g) => {
                let lists: Vec<Vec<usize>> = ranked.iter().map(|c| c.iter().map(|&(j, _)| j).collect()).collect();
                Some(precision_at_n(&lists, g, 1)?)
            }
            None => None,
        };
        let pearson_r = match &config.dev.judged {
            Some(set) => Some(judged_pearson_wmd(set, &src, &tgt)?),
            None => None,
        };
        let mined = best_from_rankings(&ranked, src_pool, tgt_pool);
        let (kept, _) = filter_pairs(&mined, &config.filter)?;
        let selected = select_top_rate(&kept, config.mining.extraction_rate)?;
        let selected = if config.mining.dedup { dedup_pairs(&selected) } else { selected };
        reports.push(IterationReport {
            iteration: k,
            mined_pairs: selected.len(),
            mean_mined_score: mean_score(&selected),
            p_at_1,
            pearson_r,
        });
        log::info!("remap iteration {k}: {} pairs, P@1 {:?}", selected.len(), p_at_1);
        if k == config.iterations {
            break;
        }

        let words = extract_word_pairs(&selected, &src, &tgt, config.min_flow)?;
        if words.is_empty() {
            aborted = Some(format!("iteration {} produced no word pairs", k + 1));
            break;
        }
        let (map, side) = match config.remap_kind {
            RemapKind::Clp => (remap::fit_clp(&words, config.clp)?.map, Side::Source),
            RemapKind::Umd => (remap::fit_umd(&words)?, Side::Both),
        };
        src = apply_remap(&src, &map, side)?;
        tgt = apply_remap(&tgt, &map, if side == Side::Both { Side::Both } else { Side::Target })?;
        if let Some(dir) = run_dir.as_mut() {
            let it = k + 1;
            dir.write(&format!("iter{it}.pairs.tsv"), format_scored_pairs(&selected).as_bytes())?;
            dir.write(&format!("iter{it}.wordpairs.tsv"), words.to_tsv().as_bytes())?;
            dir.write_store(&format!("iter{it}.map.useb"), &map.to_store()?)?;
            dir.write_store(&format!("iter{it}.source.useb"), &src)?;
            dir.write_store(&format!("iter{it}.target.useb"), &tgt)?;
        }
        maps.push(map);
    }
    if let Some(dir) = run_dir {
        dir.finish(&reports)?;
    }
    Ok(RemapOutcome {
        source_store: src,
        target_store: tgt,
        maps,
        reports,
        aborted,
    })
}

#[derive(Debug, Clone)]
pub struct ContrastiveOutcome {
    pub projection: SentenceProjection,
    pub reports: Vec<IterationReport>,
    pub aborted: Option<String>,
}

/// For each source embedding, target indices by descending cosine (top `n`).
pub fn cosine_retrieval(src: &[Vec<f64>], tgt: &[Vec<f64>], n: usize) -> Result<Vec<Vec<usize>>> {
    let cos = cosine_matrix(src, tgt)?;
    Ok(cos
        .par_iter()
        .map(|row| {
            let mut idx: Vec<usize> = (0..row.len()).collect();
            idx.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
            idx.truncate(n);
            idx
        })
        .collect())
}

fn judged_pearson_cosine(set: &JudgedSet, p: &SentenceProjection, src: &EmbeddingStore, tgt: &EmbeddingStore) -> Result<f64> {
    check_static(src)?;
    check_static(tgt)?;
    let xs = p.project_all(&sentembed::sentence_embeddings(&set.sources, src)?)?;
    let ys = p.project_all(&sentembed::sentence_embeddings(&set.hypotheses, tgt)?)?;
    let scores = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| sentembed::cosine_score(x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(pearson(&scores, &set.human)?.r)
}

/// Round `k` trains with shuffle seed `contrastive.seed + k`.
pub fn run_contrastive_loop(
    src_pool: &[TokenizedSentence],
    tgt_pool: &[TokenizedSentence],
    src_store: &EmbeddingStore,
    tgt_store: &EmbeddingStore,
    config: &LoopConfig,
    mut run_dir: Option<RunDir>,
) -> Result<ContrastiveOutcome> {
    config.mining.validate()?;
    config.contrastive.validate()?;
    let src_embs = sentembed::sentence_embeddings(src_pool, src_store)?;
    let tgt_embs = sentembed::sentence_embeddings(tgt_pool, tgt_store)?;
    let dim = src_store.dim();
    if tgt_store.dim() != dim {
        return Err(Error::arg("source and target stores differ in dimension"));
    }
    let mut projection = SentenceProjection::identity(dim)?;
    let mut reports = Vec::new();
    let mut aborted = None;
    let gold = config.dev.gold.as_ref().map(|g| gold_map(g));

    for k in 0..=config.iterations {
        let xs = projection.project_all(&src_embs)?;
        let ys = projection.project_all(&tgt_embs)?;
        let p_at_1 = match &gold {
            Some(g) => Some(precision_at_n(&cosine_retrieval(&xs, &ys, 1)?, g, 1)?),
            None => None,
        };
        let pearson_r = match &config.dev.judged {
            Some(set) => Some(judged_pearson_cosine(set, &projection, src_store, tgt_store)?),
            None => None,
        };
        let mined = mine_margin(src_pool, tgt_pool, &xs, &ys, &config.mining)?;
        let selected = dedup_pairs(&select_top_rate(&mined, config.mining.extraction_rate)?);
        reports.push(IterationReport {
            iteration: k,
            mined_pairs: selected.len(),
            mean_mined_score: mean_score(&selected),
            p_at_1,
            pearson_r,
        });
        log::info!("contrastive iteration {k}: {} pairs, P@1 {:?}", selected.len(), p_at_1);
        if k == config.iterations {
            break;
        }
        if selected.len() < config.contrastive.batch_size {
            aborted = Some(format!(
                "iteration {} kept {} pairs, fewer than one batch of {}",
                k + 1,
                selected.len(),
                config.contrastive.batch_size
            ));
            break;
        }
        let cfg = ContrastiveConfig {
            seed: config.contrastive.seed.wrapping_add(k as u64),
            ..config.contrastive.clone()
        };
        projection = sentembed::train_projection(&selected, &src_embs, &tgt_embs, &projection, &cfg)?;
        if let Some(dir) = run_dir.as_mut() {
            let it = k + 1;
            dir.write(&format!("iter{it}.pairs.tsv"), format_scored_pairs(&selected).as_bytes())?;
            dir.write_store(&format!("iter{it}.projection.useb"), &projection.to_store()?)?;
            dir.write(&format!("iter{it}.loss.tsv"), projection.loss_log_tsv().as_bytes())?;
        }
    }
    if let Some(dir) = run_dir {
        dir.finish(&reports)?;
    }
    Ok(ContrastiveOutcome {
        projection,
        reports,
        aborted,
    })
}
