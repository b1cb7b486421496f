//! Agreement with human judgments and retrieval precision.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub r: f64,
    pub n: usize,
    /// 95% interval from the Fisher z transform.
    pub fisher_ci_low: f64,
    pub fisher_ci_high: f64,
}

fn pearson_r(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::arg(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::arg("scores must be finite"));
    }
    Ok(())
}

/// Product-moment correlation with a Fisher-z 95% interval.
pub fn pearson(metric_scores: &[f64], human_scores: &[f64]) -> Result<CorrelationResult> {
    check_pair(metric_scores, human_scores)?;
    let n = metric_scores.len();
    if n < 3 {
        return Err(Error::arg(format!("need at least 3 samples for a correlation, got {n}")));
    }
    let r = pearson_r(metric_scores, human_scores)
        .ok_or_else(|| Error::UndefinedCorrelation("one of the score vectors is constant".into()))?;
    let (lo, hi) = if n == 3 {
        (-1.0, 1.0)
    } else if r.abs() == 1.0 {
        (r, r)
    } else {
        let z = r.atanh();
        let half = 1.96 / ((n - 3) as f64).sqrt();
        ((z - half).tanh().min(r), (z + half).tanh().max(r))
    };
    Ok(CorrelationResult {
        r,
        n,
        fisher_ci_low: lo,
        fisher_ci_high: hi,
    })
}

/// Fraction of queries whose gold index is among their first `n`
/// retrieved candidates. Queries with fewer than `n` candidates use what
/// they have.
pub fn precision_at_n(retrieved: &[Vec<usize>], gold: &BTreeMap<usize, usize>, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::arg("N must be at least 1"));
    }
    if retrieved.is_empty() {
        return Err(Error::arg("no queries to evaluate"));
    }
    let mut hits = 0usize;
    for (q, ranked) in retrieved.iter().enumerate() {
        let g = gold
            .get(&q)
            .ok_or_else(|| Error::arg(format!("query {q} has no gold index")))?;
        if ranked.iter().take(n).any(|c| c == g) {
            hits += 1;
        }
    }
    Ok(hits as f64 / retrieved.len() as f64)
}

/// Gold map for an alignment given as `gold[query] = index`.
pub fn gold_map(alignment: &[usize]) -> BTreeMap<usize, usize> {
    alignment.iter().copied().enumerate().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareConfig {
    pub resamples: usize,
    pub seed: u64,
    /// Also run the two-sample t-test over per-segment products.
    pub t_test: bool,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            resamples: 10_000,
            seed: 0,
            t_test: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub r_a: f64,
    pub r_b: f64,
    /// Two-sided paired-bootstrap p-value for equal correlations.
    pub p_value: f64,
    /// Resamples where both correlations were defined.
    pub valid_resamples: usize,
    pub t_test_p_value: Option<f64>,
}

/// Paired bootstrap over segments: each resample draws segment indices with
/// replacement, and the p-value is twice the smaller tail mass of
/// `r_a − r_b` around zero, capped at 1. Resample `b` uses stream `b` of a
/// ChaCha generator seeded with `config.seed`, so results do not depend on
/// scheduling.
pub fn compare_metrics(scores_a: &[f64], scores_b: &[f64], human: &[f64], config: &CompareConfig) -> Result<Comparison> {
    check_pair(scores_a, human)?;
    check_pair(scores_b, human)?;
    if config.resamples == 0 {
        return Err(Error::arg("need at least one bootstrap resample"));
    }
    let r_a = pearson(scores_a, human)?.r;
    let r_b = pearson(scores_b, human)?.r;
    let n = human.len();
    let deltas: Vec<Option<f64>> = (0..config.resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(b as u64);
            let idx: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
            let h = pick(human);
            Some(pearson_r(&pick(scores_a), &h)? - pearson_r(&pick(scores_b), &h)?)
        })
        .collect();
    let valid: Vec<f64> = deltas.into_iter().flatten().collect();
    if valid.is_empty() {
        return Err(Error::UndefinedCorrelation("every bootstrap resample was constant".into()));
    }
    let m = valid.len() as f64;
    let le = valid.iter().filter(|&&d| d <= 0.0).count() as f64 / m;
    let ge = valid.iter().filter(|&&d| d >= 0.0).count() as f64 / m;
    let t_test_p_value = if config.t_test {
        Some(product_t_test(scores_a, scores_b, human)?)
    } else {
        None
    };
    Ok(Comparison {
        r_a,
        r_b,
        p_value: (2.0 * le.min(ge)).min(1.0),
        valid_resamples: valid.len(),
        t_test_p_value,
    })
}

fn zscores(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    if sd == 0.0 {
        return Err(Error::UndefinedCorrelation("constant score vector".into()));
    }
    Ok(v.iter().map(|x| (x - mean) / sd).collect())
}

/// Welch two-sample t-test between the per-segment products `z_a·z_h` and
/// `z_b·z_h`, whose means are the two correlations. Two-sided p-value.
pub fn product_t_test(scores_a: &[f64], scores_b: &[f64], human: &[f64]) -> Result<f64> {
    check_pair(scores_a, human)?;
    check_pair(scores_b, human)?;
    if human.len() < 3 {
        return Err(Error::arg("need at least 3 samples"));
    }
    let zh = zscores(human)?;
    let pa: Vec<f64> = zscores(scores_a)?.iter().zip(&zh).map(|(a, h)| a * h).collect();
    let pb: Vec<f64> = zscores(scores_b)?.iter().zip(&zh).map(|(b, h)| b * h).collect();
    let stats = |v: &[f64]| {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, var / n)
    };
    let ((ma, sa), (mb, sb)) = (stats(&pa), stats(&pb));
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let n = human.len() as f64;
    let df = se2 * se2 / (sa * sa / (n - 1.0) + sb * sb / (n - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Degenerate(e.to_string()))?;
    Ok((2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: String,
    pub language_pair: String,
    pub r: f64,
}

/// `metric\tlangpair\tr` with a header line.
pub fn format_report(rows: &[ReportRow]) -> String {
    let mut out = String::from("metric\tlangpair\tr\n");
    for row in rows {
        let _ = writeln!(out, "{}\t{}\t{:.6}", row.metric, row.language_pair, row.r);
    }
    out
}
