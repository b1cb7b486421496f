//! Small dense-vector helpers shared by the numeric modules.

use crate::error::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Weighted sum of vectors; `weights.len()` must equal `vectors.len()`.
pub fn weighted_mean<V: AsRef<[f64]>>(vectors: &[V], weights: &[f64], dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (v, &w) in vectors.iter().zip(weights) {
        for (o, x) in out.iter_mut().zip(v.as_ref()) {
            *o += w * x;
        }
    }
    out
}

/// Checks that every vector is non-empty-dimensional and shares one dimension.
pub fn common_dim<V: AsRef<[f64]>>(vectors: &[V], what: &str) -> Result<usize> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::arg(format!("{what}: empty vector list")))?;
    let dim = first.as_ref().len();
    if dim == 0 {
        return Err(Error::arg(format!("{what}: zero-dimensional vectors")));
    }
    if let Some((i, v)) = vectors
        .iter()
        .enumerate()
        .find(|(_, v)| v.as_ref().len() != dim)
    {
        return Err(Error::arg(format!(
            "{what}: vector {i} has dimension {}, expected {dim}",
            v.as_ref().len()
        )));
    }
    Ok(dim)
}

/// Cosine similarity; errors on a zero vector.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::arg(format!(
            "cosine: dimension mismatch {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::arg("cosine: zero-norm vector"));
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

pub fn normalized(a: &[f64]) -> Result<Vec<f64>> {
    let n = norm(a);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::arg("zero-norm or non-finite vector"));
    }
    Ok(a.iter().map(|x| x / n).collect())
}
