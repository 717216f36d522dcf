// SPDX-License-Identifier: Apache-2.0

//! Predicted-versus-simulated FDR comparison.

mod report;

use thiserror::Error;

use crate::fault::FdrTable;

pub use report::{compare_report, Report, ReportOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("no values to summarize")]
    Empty,
    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("histogram needs at least one bin")]
    NoBins,
    #[error("flip-flop `{0}` appears in only one table")]
    MismatchedFlipFlops(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiSummary {
    pub mean: f64,
    /// `1.96 * s / sqrt(n)` with the sample standard deviation `s`; zero
    /// when `n = 1`.
    pub half_width: f64,
    pub n: usize,
}

impl CiSummary {
    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }

    pub fn overlaps(&self, other: &CiSummary) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }
}

pub fn confidence_interval(values: &[f64]) -> Result<CiSummary, EvalError> {
    let n = values.len();
    if n == 0 {
        return Err(EvalError::Empty);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let half_width = if n == 1 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        1.96 * var.sqrt() / (n as f64).sqrt()
    };
    Ok(CiSummary { mean, half_width, n })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `counts.len() + 1` uniform edges from 0 to 1.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Uniform bins over `[0, 1]`, half-open except the last, which includes 1.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram, EvalError> {
    if bins == 0 {
        return Err(EvalError::NoBins);
    }
    let mut counts = vec![0usize; bins];
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(EvalError::OutOfRange(v));
        }
        let b = ((v * bins as f64).floor() as usize).min(bins - 1);
        counts[b] += 1;
    }
    let bin_edges = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    Ok(Histogram { bin_edges, counts })
}

/// `(rank, fdr)` ascending by FDR, ties broken by flip-flop name.
pub fn sorted_curve(t: &FdrTable) -> Vec<(usize, f64)> {
    sorted_entries(t)
        .into_iter()
        .enumerate()
        .map(|(rank, (_, fdr))| (rank, fdr))
        .collect()
}

pub(crate) fn sorted_entries(t: &FdrTable) -> Vec<(&str, f64)> {
    let mut v: Vec<(&str, f64)> = t.entries.iter().map(|e| (e.flipflop.as_str(), e.fdr)).collect();
    v.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
    v
}

pub fn mean_absolute_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// Ranks starting at 1, tied values sharing their average rank.
fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman correlation with average ranks for ties. Identical rankings
/// give 1; otherwise a constant input gives 0.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    if ra == rb {
        return 1.0;
    }
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// `[Q1 - 1.5 IQR, Q3 + 1.5 IQR]` of `values`.
pub fn iqr_fence(values: &[f64]) -> Result<(f64, f64), EvalError> {
    if values.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let (q1, q3) = (quantile(&s, 0.25), quantile(&s, 0.75));
    let iqr = q3 - q1;
    Ok((q1 - 1.5 * iqr, q3 + 1.5 * iqr))
}
