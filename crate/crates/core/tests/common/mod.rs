//! Independent reference implementations. They share no code with the
//! library beyond reading its data structures.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use kgxir::kg::{KnowledgeGraph, RelatednessMode};
use kgxir::retrieval::DocumentIndex;
use kgxir::text::{Embedder, EmbeddingVector};

/// In-link sets rebuilt by scanning the edge list.
pub fn in_links(kg: &KnowledgeGraph) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> =
        kg.entities().iter().map(|e| (e.id.clone(), BTreeSet::new())).collect();
    for e in kg.edges() {
        out.get_mut(&e.target).unwrap().insert(e.source.clone());
    }
    out
}

/// Link-overlap relatedness straight from the formula. `None` where the
/// raw distance is undefined.
pub fn relatedness(links: &BTreeMap<String, BTreeSet<String>>, a: &str, b: &str, mode: RelatednessMode) -> Option<f64> {
    let w = links.len() as f64;
    let (sa, sb) = (&links[a], &links[b]);
    let common = sa.intersection(sb).count() as f64;
    if common == 0.0 {
        return match mode {
            RelatednessMode::Raw => None,
            RelatednessMode::Complement => Some(0.0),
        };
    }
    let (na, nb) = (sa.len() as f64, sb.len() as f64);
    let num = na.max(nb).ln() - common.ln();
    let den = (w.ln() - na.min(nb).ln()).max(w.ln() - (w - 1.0).ln());
    let d = num / den;
    Some(match mode {
        RelatednessMode::Raw => d,
        RelatednessMode::Complement => (1.0 - d).clamp(0.0, 1.0),
    })
}

/// Double loop over deduplicated query and document entities.
pub fn qdr(kg: &KnowledgeGraph, query: &[String], doc: &[String], mode: RelatednessMode) -> f64 {
    let links = in_links(kg);
    let mut q = query.to_vec();
    q.sort();
    q.dedup();
    let mut d = doc.to_vec();
    d.sort();
    d.dedup();
    if q.is_empty() || d.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for qi in &q {
        let mut s = 0.0;
        for dj in &d {
            s += relatedness(&links, qi, dj, mode).unwrap();
        }
        total += s / d.len() as f64;
    }
    total
}

/// Cosine over dense copies of the vectors.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    let (a, b) = (a.to_dense(), b.to_dense());
    let mut dot = 0.0;
    let (mut na, mut nb) = (0.0, 0.0);
    for i in 0..a.len() {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

/// Exhaustive argmax over a document's sentences; first maximum wins.
pub fn mis(index: &DocumentIndex, doc_id: &str, query: &str) -> Option<(usize, f64)> {
    let doc = index.document(doc_id)?;
    let q = index.embed(query);
    let mut best: Option<(usize, f64)> = None;
    for i in 0..doc.sentences.len() {
        let s = index.model().embed(doc.sentence_text(i).unwrap());
        let score = cosine(&q, &s);
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    best
}

/// Full sort of every document by (score desc, id asc), truncated to `k`.
pub fn retrieve(index: &DocumentIndex, query: &str, k: usize) -> Vec<(String, f64)> {
    let q = index.embed(query);
    let mut all: Vec<(String, f64)> = index
        .documents()
        .iter()
        .map(|d| (d.id().to_string(), cosine(&q, &d.vector)))
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// AP@k by recounting precision at every relevant rank.
pub fn average_precision(ranking: &[&str], grades: &BTreeMap<String, u32>, k: usize) -> f64 {
    let relevant: Vec<&String> = grades.iter().filter(|(_, g)| **g >= 1).map(|(d, _)| d).collect();
    let denom = relevant.len().min(k);
    if denom == 0 {
        return 0.0;
    }
    let is_rel = |d: &str| grades.get(d).is_some_and(|g| *g >= 1);
    let mut sum = 0.0;
    for i in 0..ranking.len().min(k) {
        if is_rel(ranking[i]) {
            let hits = ranking[..=i].iter().filter(|d| is_rel(d)).count();
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / denom as f64
}

fn dcg(ranking: &[&str], grades: &BTreeMap<String, u32>, k: usize) -> f64 {
    ranking
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| {
            let g = grades.get(*d).copied().unwrap_or(0);
            (2f64.powi(g as i32) - 1.0) / ((i + 2) as f64).log2()
        })
        .sum()
}

pub fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// NDCG@k whose ideal is the best DCG over every ordering of the judged
/// documents.
pub fn ndcg(ranking: &[&str], grades: &BTreeMap<String, u32>, k: usize) -> f64 {
    let judged: Vec<&str> = grades.keys().map(String::as_str).collect();
    let ideal = permutations(&judged)
        .iter()
        .map(|p| dcg(p, grades, k))
        .fold(0.0, f64::max);
    if ideal == 0.0 {
        0.0
    } else {
        dcg(ranking, grades, k) / ideal
    }
}
