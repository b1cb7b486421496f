//! Word Mover's Distance, the Word Centroid Distance bound, and word
//! alignments read off optimal transport plans.
//!
//! Costs are Euclidean distances between embeddings. Marginals default to
//! uniform mass `1/|x|` over source tokens and `1/|y|` over target tokens.
//! The default solver is exact; the entropic solver is an opt-in
//! approximation whose plans only satisfy the marginals approximately.

mod sinkhorn;
mod ssp;

use std::fmt::Write as _;

use crate::corpusio::TokenizedSentence;
use crate::error::{Error, Result};
use crate::vecops;

/// Longest sentence (in tokens) accepted by the exact solver.
pub const MAX_SENTENCE_TOKENS: usize = 256;

const MARGINAL_SUM_TOL: f64 = 1e-9;

/// Pairwise Euclidean distances, row-major `rows × cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl CostMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }
}

pub fn cost_matrix<A: AsRef<[f64]>, B: AsRef<[f64]>>(x: &[A], y: &[B]) -> Result<CostMatrix> {
    let dx = vecops::common_dim(x, "source embeddings")?;
    let dy = vecops::common_dim(y, "target embeddings")?;
    if dx != dy {
        return Err(Error::arg(format!(
            "source dimension {dx} differs from target dimension {dy}"
        )));
    }
    let mut values = Vec::with_capacity(x.len() * y.len());
    for xi in x {
        for yj in y {
            values.push(vecops::euclidean(xi.as_ref(), yj.as_ref()));
        }
    }
    Ok(CostMatrix {
        rows: x.len(),
        cols: y.len(),
        values,
    })
}

/// Token mass on each side of a transport problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub source: Vec<f64>,
    pub target: Vec<f64>,
}

impl Marginals {
    pub fn uniform(n: usize, m: usize) -> Self {
        Self {
            source: vec![1.0 / n as f64; n],
            target: vec![1.0 / m as f64; m],
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            source: self.target.clone(),
            target: self.source.clone(),
        }
    }

    fn validate(&self, n: usize, m: usize) -> Result<()> {
        for (side, v, len) in [("source", &self.source, n), ("target", &self.target, m)] {
            if v.len() != len {
                return Err(Error::arg(format!(
                    "{side} marginal has {} entries for {len} tokens",
                    v.len()
                )));
            }
            if v.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::arg(format!("{side} marginal has a negative or non-finite entry")));
            }
            let sum: f64 = v.iter().sum();
            if sum == 0.0 {
                return Err(Error::arg(format!("{side} marginal has zero total mass")));
            }
            if (sum - 1.0).abs() > MARGINAL_SUM_TOL {
                return Err(Error::arg(format!("{side} marginal sums to {sum}, expected 1")));
            }
        }
        Ok(())
    }
}

/// A feasible coupling `F` between source and target token masses.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    flows: Vec<f64>,
    pub source_marginal: Vec<f64>,
    pub target_marginal: Vec<f64>,
}

impl TransportPlan {
    /// Builds a plan from explicit flows, checking shapes and non-negativity
    /// (marginals are recorded, not enforced).
    pub fn from_flows(flows: Vec<Vec<f64>>, marginals: Marginals) -> Result<Self> {
        let rows = flows.len();
        let cols = flows.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || flows.iter().any(|r| r.len() != cols) {
            return Err(Error::arg("flow matrix must be non-empty and rectangular"));
        }
        if marginals.source.len() != rows || marginals.target.len() != cols {
            return Err(Error::arg("marginal lengths do not match the flow matrix"));
        }
        if flows.iter().flatten().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::arg("flows must be finite and non-negative"));
        }
        Ok(Self {
            rows,
            cols,
            flows: flows.into_iter().flatten().collect(),
            source_marginal: marginals.source,
            target_marginal: marginals.target,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn flow(&self, i: usize, j: usize) -> f64 {
        self.flows[i * self.cols + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.flows.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for r in self.flows.chunks(self.cols) {
            for (o, f) in out.iter_mut().zip(r) {
                *o += f;
            }
        }
        out
    }

    /// Largest deviation of any row or column sum from its marginal.
    pub fn marginal_error(&self) -> f64 {
        let r = self
            .row_sums()
            .iter()
            .zip(&self.source_marginal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let c = self
            .col_sums()
            .iter()
            .zip(&self.target_marginal)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        r.max(c)
    }

    pub fn cost(&self, cost: &CostMatrix) -> f64 {
        self.flows.iter().zip(&cost.values).map(|(f, c)| f * c).sum()
    }

    /// Non-zero flows as `i \t j \t flow` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let f = self.flow(i, j);
                if f > 0.0 {
                    let _ = writeln!(out, "{i}\t{j}\t{f}");
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Solver {
    /// Exact optimum (successive shortest paths).
    #[default]
    Exact,
    /// Log-domain Sinkhorn iterations with the given entropic regularization.
    Entropic { regularization: f64, iterations: usize },
}

/// Exact Word Mover's Distance and its optimal plan.
pub fn wmd<A: AsRef<[f64]>, B: AsRef<[f64]>>(
    x: &[A],
    y: &[B],
    marginals: Option<&Marginals>,
) -> Result<(f64, TransportPlan)> {
    wmd_with_solver(x, y, marginals, Solver::Exact)
}

pub fn wmd_with_solver<A: AsRef<[f64]>, B: AsRef<[f64]>>(
    x: &[A],
    y: &[B],
    marginals: Option<&Marginals>,
    solver: Solver,
) -> Result<(f64, TransportPlan)> {
    let cost = cost_matrix(x, y)?;
    let plan = solve_transport(&cost, marginals, solver)?;
    Ok((plan.cost(&cost), plan))
}

/// Solves the transportation problem for a precomputed cost matrix.
pub fn solve_transport(
    cost: &CostMatrix,
    marginals: Option<&Marginals>,
    solver: Solver,
) -> Result<TransportPlan> {
    let (n, m) = (cost.rows, cost.cols);
    if n > MAX_SENTENCE_TOKENS || m > MAX_SENTENCE_TOKENS {
        return Err(Error::arg(format!(
            "sentence of {} tokens exceeds the {MAX_SENTENCE_TOKENS}-token limit",
            n.max(m)
        )));
    }
    let marginals = match marginals {
        Some(mg) => {
            mg.validate(n, m)?;
            mg.clone()
        }
        None => Marginals::uniform(n, m),
    };
    let flows = match solver {
        Solver::Exact => ssp::solve(&cost.values, n, m, &marginals.source, &marginals.target),
        Solver::Entropic {
            regularization,
            iterations,
        } => {
            if !(regularization > 0.0) {
                return Err(Error::arg("entropic regularization must be positive"));
            }
            sinkhorn::solve(
                &cost.values,
                n,
                m,
                &marginals.source,
                &marginals.target,
                regularization,
                iterations,
            )
        }
    };
    Ok(TransportPlan {
        rows: n,
        cols: m,
        flows,
        source_marginal: marginals.source,
        target_marginal: marginals.target,
    })
}

/// Word Centroid Distance: Euclidean distance between the mass-weighted
/// embedding centroids. A lower bound on [`wmd`].
pub fn wcd<A: AsRef<[f64]>, B: AsRef<[f64]>>(
    x: &[A],
    y: &[B],
    marginals: Option<&Marginals>,
) -> Result<f64> {
    let dx = vecops::common_dim(x, "source embeddings")?;
    let dy = vecops::common_dim(y, "target embeddings")?;
    if dx != dy {
        return Err(Error::arg(format!(
            "source dimension {dx} differs from target dimension {dy}"
        )));
    }
    let marginals = match marginals {
        Some(mg) => {
            mg.validate(x.len(), y.len())?;
            mg.clone()
        }
        None => Marginals::uniform(x.len(), y.len()),
    };
    let cx = vecops::weighted_mean(x, &marginals.source, dx);
    let cy = vecops::weighted_mean(y, &marginals.target, dx);
    Ok(vecops::euclidean(&cx, &cy))
}

/// Uniform-mass centroid, used to precompute WCD over large pools.
pub fn centroid<A: AsRef<[f64]>>(x: &[A]) -> Result<Vec<f64>> {
    let d = vecops::common_dim(x, "embeddings")?;
    Ok(vecops::weighted_mean(x, &vec![1.0 / x.len() as f64; x.len()], d))
}

/// For each source position `i`, the target position with the largest flow,
/// kept only if that flow is at least `min_flow`. Ties go to the lowest `j`.
pub fn align_indices(plan: &TransportPlan, min_flow: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..plan.rows {
        let mut best = 0;
        for j in 1..plan.cols {
            if plan.flow(i, j) > plan.flow(i, best) {
                best = j;
            }
        }
        if plan.flow(i, best) >= min_flow {
            out.push((i, best));
        }
    }
    out
}

/// Word pairs `(x_i, y_j*)` from [`align_indices`].
pub fn align_from_plan(
    plan: &TransportPlan,
    x: &TokenizedSentence,
    y: &TokenizedSentence,
    min_flow: f64,
) -> Result<Vec<(String, String)>> {
    if plan.rows != x.len() || plan.cols != y.len() {
        return Err(Error::arg(format!(
            "plan is {}×{} but sentences have {} and {} tokens",
            plan.rows,
            plan.cols,
            x.len(),
            y.len()
        )));
    }
    Ok(align_indices(plan, min_flow)
        .into_iter()
        .map(|(i, j)| (x.tokens[i].clone(), y.tokens[j].clone()))
        .collect())
}

#[cfg(test)]
mod tests;
