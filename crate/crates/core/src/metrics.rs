//! Quality indicators and statistics for comparing runs.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::objectives::{ObjectivePoint, Weights};

/// Area dominated by `points` and bounded by `reference`, both objectives
/// minimized. Points not strictly better than the reference in both
/// coordinates contribute nothing.
pub fn hypervolume_2d(points: &[ObjectivePoint], reference: ObjectivePoint) -> Result<f64> {
    if !(reference.f1.is_finite() && reference.f2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "hypervolume reference must be finite, got ({}, {})",
            reference.f1, reference.f2
        )));
    }
    let mut pts: Vec<ObjectivePoint> = points
        .iter()
        .copied()
        .filter(|p| p.f1 < reference.f1 && p.f2 < reference.f2)
        .collect();
    pts.sort_by(|a, b| a.f1.total_cmp(&b.f1).then(a.f2.total_cmp(&b.f2)));
    let mut area = 0.0;
    let mut ceiling = reference.f2;
    for p in pts {
        if p.f2 < ceiling {
            area += (reference.f1 - p.f1) * (ceiling - p.f2);
            ceiling = p.f2;
        }
    }
    Ok(area)
}

/// `factor × max` of each objective over all given sets.
pub fn reference_point<'a, I>(sets: I, factor: f64) -> Result<ObjectivePoint>
where
    I: IntoIterator<Item = &'a [ObjectivePoint]>,
{
    let mut m = ObjectivePoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in sets.into_iter().flatten() {
        m.f1 = m.f1.max(p.f1);
        m.f2 = m.f2.max(p.f2);
    }
    if !(m.f1.is_finite() && m.f2.is_finite()) {
        return Err(Error::InvalidArgument(
            "no finite points to derive a reference from".into(),
        ));
    }
    Ok(ObjectivePoint::new(factor * m.f1, factor * m.f2))
}

/// Index of the front member minimizing `w1·f1 + w2·f2`; ties go to the lowest `f1`.
pub fn pf_selected_index(front: &[ObjectivePoint], w: &Weights) -> Result<usize> {
    if front.is_empty() {
        return Err(Error::InvalidArgument("empty front".into()));
    }
    let score = |p: &ObjectivePoint| w.w1() * p.f1 + w.w2() * p.f2;
    let mut best = 0;
    for (i, p) in front.iter().enumerate().skip(1) {
        let (s, b) = (score(p), score(&front[best]));
        if s < b || (s == b && p.f1 < front[best].f1) {
            best = i;
        }
    }
    Ok(best)
}

pub fn pf_selected(front: &[ObjectivePoint], w: &Weights) -> Result<ObjectivePoint> {
    pf_selected_index(front, w).map(|i| front[i])
}

/// Sample Pearson correlation over the pairs where both values are finite.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "sequences differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(&a, &b)| (a, b))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::UndefinedCorrelation(
            "fewer than two finite pairs".into(),
        ));
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("constant sequence".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fractional (average) ranks, 1 = smallest.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Largest sample size evaluated with the exact null distribution.
pub const WILCOXON_EXACT_MAX: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub p_value: f64,
    pub exact: bool,
}

impl WilcoxonResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Two-sided Wilcoxon signed-rank test on `a - b`.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("paired samples must be finite".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|&v| v != 0.0).collect();
    if d.is_empty() {
        return Err(Error::DegenerateSamples);
    }
    let n = d.len();
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks = fractional_ranks(&abs);
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).fold(0.0, |s, (_, r)| s + r);
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let statistic = w_plus.min(w_minus);

    let (p_value, exact) = if n <= WILCOXON_EXACT_MAX {
        (exact_p(&ranks, statistic), true)
    } else {
        (normal_p(&abs, n, w_plus), false)
    };
    Ok(WilcoxonResult {
        statistic,
        w_plus,
        w_minus,
        n,
        p_value,
        exact,
    })
}

/// Two-sided p from the permutation distribution of `W+` over all `2^n`
/// sign assignments; ranks are doubled so tied half-ranks stay integral.
fn exact_p(ranks: &[f64], statistic: f64) -> f64 {
    let r2: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = r2.iter().sum();
    let mut counts = vec![0f64; max + 1];
    counts[0] = 1.0;
    for &r in &r2 {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let t = (2.0 * statistic).round() as usize;
    let tail: f64 = counts[..=t].iter().sum();
    let total = 2f64.powi(ranks.len() as i32);
    (2.0 * tail / total).min(1.0)
}

fn normal_p(abs: &[f64], n: usize, w_plus: f64) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    // tie correction: sum of (t^3 - t) over groups of equal |d|
    let mut sorted = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie += t * t * t - t;
        i = j + 1;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie / 48.0;
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let std = Normal::standard();
    (2.0 * (1.0 - std.cdf(z))).min(1.0)
}

/// Per-row ranks of a means matrix (rows = images, columns = algorithms)
/// with column averages and an overall ranking of those averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTable {
    pub per_row: Vec<Vec<f64>>,
    pub average: Vec<f64>,
    pub overall: Vec<f64>,
}

pub fn rank_table(means: &[Vec<f64>]) -> Result<RankTable> {
    let cols = means.first().map(Vec::len).unwrap_or(0);
    if means.is_empty() || cols == 0 {
        return Err(Error::InvalidArgument("empty means matrix".into()));
    }
    for (i, row) in means.iter().enumerate() {
        if row.len() != cols || row.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument(format!(
                "row {i} has missing entries"
            )));
        }
    }
    let per_row: Vec<Vec<f64>> = means.iter().map(|r| fractional_ranks(r)).collect();
    let average: Vec<f64> = (0..cols)
        .map(|c| per_row.iter().map(|r| r[c]).sum::<f64>() / per_row.len() as f64)
        .collect();
    let overall = fractional_ranks(&average);
    Ok(RankTable {
        per_row,
        average,
        overall,
    })
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
