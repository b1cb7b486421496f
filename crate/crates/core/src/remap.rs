//! Cross-lingual vector-space remapping from (pseudo-)parallel word pairs.
//!
//! Two linear maps are supported:
//!
//! * **CLP**: the orthogonal `W` minimizing `‖WX − Y‖_F`, obtained from the
//!   SVD `YXᵀ = UΣVᵀ` as `W = UVᵀ`. It maps source-side vectors only.
//! * **UMD**: removal of the dominant source–target mismatch direction
//!   `v_B`, the first left singular vector of the stacked pair differences.
//!   Each vector becomes `e − (e·v_B)v_B`, on both sides.
//!
//! Word pairs come from argmax alignments of WMD transport plans over mined
//! sentence pairs ([`extract_word_pairs`]).

use std::collections::HashSet;
use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::corpusio::{EmbeddingStore, Key, ScoredPair, StoreKind};
use crate::error::{Error, Result};
use crate::transport;
use crate::vecops;

/// Default minimum transport flow for an alignment link to count.
pub const DEFAULT_MIN_FLOW: f64 = 0.05;

/// Aligned word pairs with their embeddings (one row per pair).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordPairSet {
    pub pairs: Vec<(String, String)>,
    pub source: Vec<Vec<f64>>,
    pub target: Vec<Vec<f64>>,
}

impl WordPairSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.source.first().map(Vec::len)
    }

    pub fn push(&mut self, pair: (String, String), source: Vec<f64>, target: Vec<f64>) -> Result<()> {
        if source.len() != target.len() || self.dim().is_some_and(|d| d != source.len()) {
            return Err(Error::arg("word pair embeddings disagree in dimension"));
        }
        self.pairs.push(pair);
        self.source.push(source);
        self.target.push(target);
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (s, t) in &self.pairs {
            let _ = writeln!(out, "{s}\t{t}");
        }
        out
    }

    fn matrices(&self, center: bool, normalize: bool) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = self.dim().unwrap_or(0);
        let m = self.len();
        let prep = |rows: &[Vec<f64>]| {
            let mut mat = DMatrix::from_fn(d, m, |r, c| rows[c][r]);
            if normalize {
                for mut col in mat.column_iter_mut() {
                    let n = col.norm();
                    if n > 0.0 {
                        col /= n;
                    }
                }
            }
            if center {
                let mean = mat.column_mean();
                for mut col in mat.column_iter_mut() {
                    col -= &mean;
                }
            }
            mat
        };
        (prep(&self.source), prep(&self.target))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionMap {
    /// `e ↦ W e`, `W` orthogonal (d×d).
    Orthogonal { matrix: DMatrix<f64> },
    /// `e ↦ e − (e·v)v`, `v` unit length.
    BiasRemoval { direction: Vec<f64> },
}

impl ProjectionMap {
    pub fn dim(&self) -> usize {
        match self {
            ProjectionMap::Orthogonal { matrix } => matrix.nrows(),
            ProjectionMap::BiasRemoval { direction } => direction.len(),
        }
    }

    pub fn apply(&self, e: &[f64]) -> Vec<f64> {
        match self {
            ProjectionMap::Orthogonal { matrix } => {
                let d = matrix.nrows();
                (0..d)
                    .map(|r| (0..d).map(|c| matrix[(r, c)] * e[c]).sum())
                    .collect()
            }
            ProjectionMap::BiasRemoval { direction } => {
                let p = vecops::dot(e, direction);
                e.iter().zip(direction).map(|(x, v)| x - p * v).collect()
            }
        }
    }

    /// `‖WᵀW − I‖_max` for the orthogonal kind, `|‖v‖ − 1|` for bias removal.
    pub fn orthogonality_error(&self) -> f64 {
        match self {
            ProjectionMap::Orthogonal { matrix } => {
                let g = matrix.transpose() * matrix - DMatrix::identity(matrix.nrows(), matrix.ncols());
                g.amax()
            }
            ProjectionMap::BiasRemoval { direction } => (vecops::norm(direction) - 1.0).abs(),
        }
    }

    /// Persists the map as a store: matrix rows or the single bias vector.
    pub fn to_store(&self) -> Result<EmbeddingStore> {
        match self {
            ProjectionMap::Orthogonal { matrix } => {
                let mut s = EmbeddingStore::new(StoreKind::OrthogonalMap, matrix.ncols())?;
                for (r, row) in matrix.row_iter().enumerate() {
                    s.insert(Key::Row(r), &row.iter().copied().collect::<Vec<_>>())?;
                }
                Ok(s)
            }
            ProjectionMap::BiasRemoval { direction } => {
                let mut s = EmbeddingStore::new(StoreKind::BiasVector, direction.len())?;
                s.insert(Key::Row(0), direction)?;
                Ok(s)
            }
        }
    }

    pub fn from_store(store: &EmbeddingStore) -> Result<Self> {
        match store.kind() {
            StoreKind::OrthogonalMap => {
                let d = store.dim();
                if store.len() != d {
                    return Err(Error::Format(format!("orthogonal map has {} rows, expected {d}", store.len())));
                }
                let mut matrix = DMatrix::zeros(d, d);
                for r in 0..d {
                    let row = store
                        .get(&Key::Row(r))
                        .ok_or_else(|| Error::Format(format!("orthogonal map is missing row {r}")))?;
                    for (c, v) in row.iter().enumerate() {
                        matrix[(r, c)] = *v;
                    }
                }
                Ok(ProjectionMap::Orthogonal { matrix })
            }
            StoreKind::BiasVector => {
                let v = store
                    .get(&Key::Row(0))
                    .ok_or_else(|| Error::Format("bias store has no row 0".into()))?;
                Ok(ProjectionMap::BiasRemoval {
                    direction: vecops::normalized(v)?,
                })
            }
            other => Err(Error::Format(format!("a {} store is not a projection map", other.name()))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClpOptions {
    /// Subtract each side's mean before fitting. Off by default.
    pub center: bool,
    /// Length-normalize embeddings before fitting. Off by default.
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClpFit {
    pub map: ProjectionMap,
    /// `YXᵀ` is (numerically) rank deficient, so the optimum is not unique.
    pub degenerate: bool,
}

/// Orthogonal Procrustes fit of source onto target.
pub fn fit_clp(pairs: &WordPairSet, options: ClpOptions) -> Result<ClpFit> {
    let d = pairs
        .dim()
        .ok_or_else(|| Error::arg("cannot fit a remapping on an empty word-pair set"))?;
    if pairs.len() < d {
        log::warn!("fitting a {d}-dimensional CLP map on only {} word pairs", pairs.len());
    }
    let (x, y) = pairs.matrices(options.center, options.normalize);
    let cross = &y * x.transpose();
    let svd = cross.svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V");
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    let degenerate = max_sv == 0.0 || min_sv <= 1e-10 * max_sv;
    if degenerate {
        log::warn!("CLP cross-covariance is rank deficient; the orthogonal optimum is not unique");
    }
    Ok(ClpFit {
        map: ProjectionMap::Orthogonal { matrix: u * v_t },
        degenerate,
    })
}

/// Dominant mismatch direction of the pair differences.
pub fn fit_umd(pairs: &WordPairSet) -> Result<ProjectionMap> {
    let d = pairs
        .dim()
        .ok_or_else(|| Error::arg("cannot fit a remapping on an empty word-pair set"))?;
    let m = pairs.len();
    if m < 2 {
        return Err(Error::arg("UMD needs at least two word pairs"));
    }
    // Columns of Qᵀ are the differences x_i − y_i.
    let q_t = DMatrix::from_fn(d, m, |r, c| pairs.source[c][r] - pairs.target[c][r]);
    if q_t.amax() == 0.0 {
        return Err(Error::Degenerate("all word pairs have identical embeddings".into()));
    }
    let svd = q_t.svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let top = svd.singular_values.imax();
    let mut direction: Vec<f64> = u.column(top).iter().copied().collect();
    let n = vecops::norm(&direction);
    direction.iter_mut().for_each(|x| *x /= n);
    if let Some(first) = direction.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            direction.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(ProjectionMap::BiasRemoval { direction })
}

/// Which language a store belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
    Both,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" => Ok(Side::Source),
            "target" => Ok(Side::Target),
            "both" => Ok(Side::Both),
            other => Err(Error::arg(format!("unknown side {other:?}"))),
        }
    }
}

/// Applies a map to every vector of a store. Orthogonal maps only touch
/// source-side stores (a target store is returned unchanged); bias removal
/// applies to any side.
pub fn apply_remap(store: &EmbeddingStore, map: &ProjectionMap, side: Side) -> Result<EmbeddingStore> {
    if store.dim() != map.dim() {
        return Err(Error::arg(format!(
            "store dimension {} does not match map dimension {}",
            store.dim(),
            map.dim()
        )));
    }
    match (map, side) {
        (ProjectionMap::Orthogonal { .. }, Side::Target) => Ok(store.clone()),
        _ => store.map_vectors(|e| map.apply(e)),
    }
}

/// Word pairs aligned by WMD transport plans over the given sentence pairs,
/// deduplicated on the word strings (first occurrence wins).
pub fn extract_word_pairs(
    pairs: &[ScoredPair],
    src_store: &EmbeddingStore,
    tgt_store: &EmbeddingStore,
    min_flow: f64,
) -> Result<WordPairSet> {
    let mut out = WordPairSet::default();
    let mut seen = HashSet::new();
    for p in pairs {
        let xs = src_store.sentence_vectors(p.source_index, &p.source)?;
        let ys = tgt_store.sentence_vectors(p.target_index, &p.target)?;
        let (_, plan) = transport::wmd(&xs, &ys, None)?;
        for (i, j) in transport::align_indices(&plan, min_flow) {
            let pair = (p.source.tokens[i].clone(), p.target.tokens[j].clone());
            if seen.insert(pair.clone()) {
                out.push(pair, xs[i].to_vec(), ys[j].to_vec())?;
            }
        }
    }
    Ok(out)
}
