//! Ranking and classification metrics.
//!
//! Binary metrics treat any grade ≥ 1 as relevant. NDCG uses the graded
//! gain `2^grade - 1` with a `log2(rank + 1)` discount.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Fraction of queries whose prediction is in its gold set. Zero when
/// there are no predictions.
pub fn accuracy<T: Ord>(
    predictions: &BTreeMap<String, T>,
    gold: &BTreeMap<String, BTreeSet<T>>,
) -> Result<f64> {
    if predictions.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    for (query, predicted) in predictions {
        let answers = gold
            .get(query)
            .ok_or_else(|| Error::UnknownQuery(query.clone()))?;
        if answers.contains(predicted) {
            hits += 1;
        }
    }
    Ok(hits as f64 / predictions.len() as f64)
}

/// Precision and recall of a retrieved set. Each is 0 when its
/// denominator is empty.
pub fn precision_recall<S: AsRef<str>>(retrieved: &[S], relevant: &BTreeSet<String>) -> (f64, f64) {
    let hits = retrieved
        .iter()
        .filter(|d| relevant.contains(d.as_ref()))
        .count() as f64;
    let p = if retrieved.is_empty() {
        0.0
    } else {
        hits / retrieved.len() as f64
    };
    let r = if relevant.is_empty() {
        0.0
    } else {
        hits / relevant.len() as f64
    };
    (p, r)
}

/// Average precision over the first `k` ranks, normalized by
/// `min(|relevant|, k)`.
pub fn average_precision_at_k<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let denom = relevant.len().min(k);
    if denom == 0 {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, doc) in ranked.iter().take(k).enumerate() {
        if relevant.contains(doc.as_ref()) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / denom as f64
}

/// Mean of per-query average precision at `k`.
pub fn map_at_k<S: AsRef<str>>(runs: &[(Vec<S>, BTreeSet<String>)], k: usize) -> f64 {
    mean(runs.iter().map(|(ranked, rel)| average_precision_at_k(ranked, rel, k)))
}

fn gain(grade: u32) -> f64 {
    2f64.powi(grade as i32) - 1.0
}

fn discount(rank: usize) -> f64 {
    ((rank + 1) as f64).log2()
}

pub fn dcg_at_k<S: AsRef<str>>(ranked: &[S], grades: &BTreeMap<String, u32>, k: usize) -> f64 {
    ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| gain(grades.get(d.as_ref()).copied().unwrap_or(0)) / discount(i + 1))
        .sum()
}

/// DCG of the best possible ordering of every judged document.
pub fn ideal_dcg_at_k(grades: &BTreeMap<String, u32>, k: usize) -> f64 {
    let mut sorted: Vec<u32> = grades.values().copied().collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, g)| gain(g) / discount(i + 1))
        .sum()
}

/// NDCG at `k`; 0 when the ideal DCG is 0 (see [`ideal_dcg_at_k`]).
pub fn ndcg_at_k<S: AsRef<str>>(ranked: &[S], grades: &BTreeMap<String, u32>, k: usize) -> f64 {
    let ideal = ideal_dcg_at_k(grades, k);
    if ideal == 0.0 {
        return 0.0;
    }
    dcg_at_k(ranked, grades, k) / ideal
}

pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}
