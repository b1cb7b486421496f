//! Sentence embeddings: mean pooling, a contrastively trained linear
//! projection shared by both languages, and cosine scoring.
//!
//! The projection `P` starts as the identity and is trained with an
//! in-batch InfoNCE-style objective at temperature `τ`:
//!
//! ```text
//! L_i = −s_ii + log Σ_{j ∈ D_i} exp(s_ij),   s_ij = cos(P x_i, P y_j) / τ
//! ```
//!
//! where `D_i` is every `j ≠ i` ([`DenominatorMode::ExcludePositive`]) or
//! every `j` ([`DenominatorMode::IncludePositive`]).

use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpusio::{EmbeddingStore, Key, ScoredPair, StoreKind, TokenizedSentence};
use crate::error::{Error, Result};
use crate::vecops;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenominatorMode {
    ExcludePositive,
    IncludePositive,
}

impl FromStr for DenominatorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exclude-positive" => Ok(DenominatorMode::ExcludePositive),
            "include-positive" => Ok(DenominatorMode::IncludePositive),
            other => Err(Error::arg(format!("unknown denominator mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastiveConfig {
    pub temperature: f64,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs_per_iteration: usize,
    pub denominator_mode: DenominatorMode,
    /// Decoupled weight decay of the AdamW update.
    pub weight_decay: f64,
    /// Seed of the batch shuffle.
    pub seed: u64,
}

impl Default for ContrastiveConfig {
    fn default() -> Self {
        Self {
            temperature: 0.05,
            batch_size: 256,
            learning_rate: 5e-5,
            epochs_per_iteration: 1,
            denominator_mode: DenominatorMode::ExcludePositive,
            weight_decay: 0.01,
            seed: 0,
        }
    }
}

impl ContrastiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::arg(format!("temperature {} must be positive", self.temperature)));
        }
        if self.batch_size < 2 {
            return Err(Error::arg("batch size must be at least 2"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::arg(format!("learning rate {} is invalid", self.learning_rate)));
        }
        if self.epochs_per_iteration == 0 {
            return Err(Error::arg("epochs_per_iteration must be at least 1"));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::arg(format!("weight decay {} is invalid", self.weight_decay)));
        }
        Ok(())
    }
}

/// A square linear map applied to pooled sentence vectors of both languages.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceProjection {
    pub matrix: DMatrix<f64>,
    /// Loss of every optimizer step taken so far.
    pub training_log: Vec<f64>,
}

impl SentenceProjection {
    pub fn identity(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::arg("projection dimension must be positive"));
        }
        Ok(Self {
            matrix: DMatrix::identity(dim, dim),
            training_log: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        apply_matrix(&self.matrix, v)
    }

    pub fn project_all(&self, vs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        if let Some((i, v)) = vs.iter().enumerate().find(|(_, v)| v.len() != self.dim()) {
            return Err(Error::arg(format!(
                "embedding {i} has dimension {}, projection expects {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(vs.par_iter().map(|v| self.project(v)).collect())
    }

    pub fn to_store(&self) -> Result<EmbeddingStore> {
        let mut s = EmbeddingStore::new(StoreKind::SentenceProjection, self.dim())?;
        for (r, row) in self.matrix.row_iter().enumerate() {
            s.insert(Key::Row(r), &row.iter().copied().collect::<Vec<_>>())?;
        }
        Ok(s)
    }

    /// Reads the matrix back; the training log is not part of the store.
    pub fn from_store(store: &EmbeddingStore) -> Result<Self> {
        if store.kind() != StoreKind::SentenceProjection {
            return Err(Error::Format(format!(
                "a {} store is not a sentence projection",
                store.kind().name()
            )));
        }
        let d = store.dim();
        if store.len() != d {
            return Err(Error::Format(format!("projection has {} rows, expected {d}", store.len())));
        }
        let mut matrix = DMatrix::zeros(d, d);
        for r in 0..d {
            let row = store
                .get(&Key::Row(r))
                .ok_or_else(|| Error::Format(format!("projection is missing row {r}")))?;
            for (c, v) in row.iter().enumerate() {
                matrix[(r, c)] = *v;
            }
        }
        Ok(Self {
            matrix,
            training_log: Vec::new(),
        })
    }

    /// `step\tloss` lines with a header, steps counted from 1.
    pub fn loss_log_tsv(&self) -> String {
        let mut out = String::from("step\tloss\n");
        for (i, l) in self.training_log.iter().enumerate() {
            let _ = writeln!(out, "{}\t{l}", i + 1);
        }
        out
    }
}

fn apply_matrix(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)] * v[c]).sum())
        .collect()
}

/// Arithmetic mean of token vectors.
pub fn pool_sentence<V: AsRef<[f64]>>(token_embs: &[V]) -> Result<Vec<f64>> {
    let dim = vecops::common_dim(token_embs, "pool_sentence")?;
    let n = token_embs.len() as f64;
    let mut sum = vecops::weighted_mean(token_embs, &vec![1.0; token_embs.len()], dim);
    for s in &mut sum {
        *s /= n;
    }
    Ok(sum)
}

/// One embedding per sentence of `pool`. Sentence stores are read directly
/// by sentence index; token stores are mean-pooled.
pub fn sentence_embeddings(pool: &[TokenizedSentence], store: &EmbeddingStore) -> Result<Vec<Vec<f64>>> {
    pool.par_iter()
        .enumerate()
        .map(|(i, s)| match store.kind() {
            StoreKind::Sentence => store
                .get(&Key::Sentence(i))
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::Lookup {
                    token: s.text.clone(),
                    sentence: i,
                }),
            _ => pool_sentence(&store.sentence_vectors(i, s)?),
        })
        .collect()
}

pub fn cosine_score(x_emb: &[f64], y_emb: &[f64]) -> Result<f64> {
    vecops::cosine(x_emb, y_emb)
}

/// Loss and gradients with respect to already projected embeddings.
///
/// Returns `(loss, per-item losses, d loss / d u_i, d loss / d v_j)`.
fn loss_on_projected(
    u: &[Vec<f64>],
    v: &[Vec<f64>],
    temperature: f64,
    mode: DenominatorMode,
) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = u.len();
    let un: Vec<f64> = u.iter().map(|x| vecops::norm(x)).collect();
    let vn: Vec<f64> = v.iter().map(|x| vecops::norm(x)).collect();
    if un.iter().chain(&vn).any(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::arg("zero-norm or non-finite projected embedding"));
    }
    // unclamped cosine keeps the loss differentiable everywhere
    let cos: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| vecops::dot(&u[i], &v[j]) / (un[i] * vn[j])).collect())
        .collect();

    // dL/dcos_ij, already divided by N
    let mut g = vec![vec![0.0; n]; n];
    let mut items = Vec::with_capacity(n);
    for i in 0..n {
        let s: Vec<f64> = cos[i].iter().map(|c| c / temperature).collect();
        let in_denominator = |j: usize| mode == DenominatorMode::IncludePositive || j != i;
        let max = (0..n).filter(|&j| in_denominator(j)).map(|j| s[j]).fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = (0..n).filter(|&j| in_denominator(j)).map(|j| (s[j] - max).exp()).sum();
        items.push(-s[i] + max + z.ln());
        for j in 0..n {
            let p = if in_denominator(j) { (s[j] - max).exp() / z } else { 0.0 };
            let delta = if i == j { 1.0 } else { 0.0 };
            g[i][j] = (p - delta) / (temperature * n as f64);
        }
    }
    let loss = items.iter().sum::<f64>() / n as f64;

    // d cos(a, b) / d a = b / (|a||b|) − cos · a / |a|²
    let grad_u: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![0.0; u[i].len()];
            for j in 0..n {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += g[i][j] * (v[j][k] / (un[i] * vn[j]) - cos[i][j] * u[i][k] / (un[i] * un[i]));
                }
            }
            out
        })
        .collect();
    let grad_v: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut out = vec![0.0; v[j].len()];
            for i in 0..n {
                for (k, o) in out.iter_mut().enumerate() {
                    *o += g[i][j] * (u[i][k] / (un[i] * vn[j]) - cos[i][j] * v[j][k] / (vn[j] * vn[j]));
                }
            }
            out
        })
        .collect();
    Ok((loss, items, grad_u, grad_v))
}

/// Batch loss and its gradient with respect to the projection matrix.
///
/// `batch_x` and `batch_y` are raw pooled vectors; row `i` of each is a
/// positive pair.
pub fn contrastive_loss(
    projection: &DMatrix<f64>,
    batch_x: &[Vec<f64>],
    batch_y: &[Vec<f64>],
    config: &ContrastiveConfig,
) -> Result<(f64, DMatrix<f64>)> {
    let (loss, _, grad) = contrastive_loss_items(projection, batch_x, batch_y, config)?;
    Ok((loss, grad))
}

/// Like [`contrastive_loss`], also returning each `L_i`.
pub fn contrastive_loss_items(
    projection: &DMatrix<f64>,
    batch_x: &[Vec<f64>],
    batch_y: &[Vec<f64>],
    config: &ContrastiveConfig,
) -> Result<(f64, Vec<f64>, DMatrix<f64>)> {
    if !(config.temperature > 0.0) {
        return Err(Error::arg("temperature must be positive"));
    }
    let n = batch_x.len();
    if n < 2 || batch_y.len() != n {
        return Err(Error::arg(format!(
            "a batch needs at least 2 aligned pairs (got {} and {})",
            n,
            batch_y.len()
        )));
    }
    let d = projection.ncols();
    if projection.nrows() != d {
        return Err(Error::arg("projection matrix must be square"));
    }
    if batch_x.iter().chain(batch_y).any(|v| v.len() != d) {
        return Err(Error::arg(format!("batch vectors must have dimension {d}")));
    }
    let u: Vec<Vec<f64>> = batch_x.iter().map(|x| apply_matrix(projection, x)).collect();
    let v: Vec<Vec<f64>> = batch_y.iter().map(|y| apply_matrix(projection, y)).collect();
    let (loss, items, gu, gv) = loss_on_projected(&u, &v, config.temperature, config.denominator_mode)?;
    let mut grad = DMatrix::zeros(d, d);
    for (g, x) in gu.iter().zip(batch_x).chain(gv.iter().zip(batch_y)) {
        for r in 0..d {
            for c in 0..d {
                grad[(r, c)] += g[r] * x[c];
            }
        }
    }
    Ok((loss, items, grad))
}

struct AdamW {
    m: DMatrix<f64>,
    v: DMatrix<f64>,
    step: i32,
}

impl AdamW {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(d: usize) -> Self {
        Self {
            m: DMatrix::zeros(d, d),
            v: DMatrix::zeros(d, d),
            step: 0,
        }
    }

    fn update(&mut self, p: &mut DMatrix<f64>, grad: &DMatrix<f64>, lr: f64, weight_decay: f64) {
        if lr == 0.0 {
            return;
        }
        self.step += 1;
        let c1 = 1.0 - Self::BETA1.powi(self.step);
        let c2 = 1.0 - Self::BETA2.powi(self.step);
        for ((w, g), (m, v)) in p
            .iter_mut()
            .zip(grad.iter())
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            let step = (*m / c1) / ((*v / c2).sqrt() + Self::EPS);
            *w -= lr * (step + weight_decay * *w);
        }
    }
}

/// Trains `start` further on the given pairs. `source_embs` and
/// `target_embs` are the pooled vectors of the pools the pair indices refer
/// to. Batches are consecutive chunks of a seeded shuffle; a trailing chunk
/// with fewer than two pairs is skipped.
pub fn train_projection(
    pairs: &[ScoredPair],
    source_embs: &[Vec<f64>],
    target_embs: &[Vec<f64>],
    start: &SentenceProjection,
    config: &ContrastiveConfig,
) -> Result<SentenceProjection> {
    config.validate()?;
    if pairs.len() < config.batch_size {
        return Err(Error::arg(format!(
            "{} training pairs are fewer than the batch size {}",
            pairs.len(),
            config.batch_size
        )));
    }
    for p in pairs {
        if p.source_index >= source_embs.len() || p.target_index >= target_embs.len() {
            return Err(Error::arg(format!(
                "pair ({}, {}) indexes outside the embedding pools",
                p.source_index, p.target_index
            )));
        }
    }
    let mut out = start.clone();
    let mut opt = AdamW::new(out.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    for _ in 0..config.epochs_per_iteration {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size).filter(|c| c.len() >= 2) {
            let bx: Vec<Vec<f64>> = chunk.iter().map(|&k| source_embs[pairs[k].source_index].clone()).collect();
            let by: Vec<Vec<f64>> = chunk.iter().map(|&k| target_embs[pairs[k].target_index].clone()).collect();
            let (loss, grad) = contrastive_loss(&out.matrix, &bx, &by, config)?;
            opt.update(&mut out.matrix, &grad, config.learning_rate, config.weight_decay);
            if out.matrix.iter().any(|x| !x.is_finite()) {
                return Err(Error::Degenerate("projection diverged to non-finite values".into()));
            }
            out.training_log.push(loss);
        }
    }
    log::debug!(
        "trained projection on {} pairs, {} steps",
        pairs.len(),
        out.training_log.len() - start.training_log.len()
    );
    Ok(out)
}
