//! Re-ranking by query-document entity relatedness.
//!
//! For query entities `Q` and document entities `D` (both deduplicated),
//! the score is the sum over `q ∈ Q` of the mean relatedness between `q`
//! and every `d ∈ D`. Each query entity's mean is kept as a breakdown so
//! the final order can be audited.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::{KnowledgeGraph, RelatednessMode};
use crate::linker::{Gazetteer, MentionKind};
use crate::retrieval::{DocumentIndex, ScoredDoc};
use crate::text::Embedder;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityContribution {
    pub entity_id: String,
    /// Mean relatedness of this query entity to the document's entities.
    pub relatedness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdrScore {
    pub value: f64,
    /// One entry per distinct query entity, ascending by id.
    pub breakdown: Vec<EntityContribution>,
}

impl QdrScore {
    pub fn zero() -> Self {
        Self {
            value: 0.0,
            breakdown: Vec::new(),
        }
    }
}

/// Distinct entity ids linked in `text`, in order of first occurrence.
pub fn doc_entities(text: &str, gazetteer: &Gazetteer) -> Vec<String> {
    let mut seen = BTreeSet::new();
    gazetteer
        .link(text)
        .into_iter()
        .filter(|m| m.kind == MentionKind::Entity)
        .filter(|m| seen.insert(m.id.clone()))
        .map(|m| m.id)
        .collect()
}

fn distinct_sorted<'a, S: AsRef<str>>(ids: &'a [S], kg: &KnowledgeGraph) -> Result<Vec<&'a str>> {
    let set: BTreeSet<&str> = ids.iter().map(AsRef::as_ref).collect();
    for id in &set {
        if !kg.contains_entity(id) {
            return Err(Error::UnknownEntity(id.to_string()));
        }
    }
    Ok(set.into_iter().collect())
}

/// Query-document relatedness.
///
/// Both sides are deduplicated and summed in id order, so the result does
/// not depend on input order. An empty side scores 0.
pub fn qdr<Q, D>(
    query_entities: &[Q],
    doc_entities: &[D],
    kg: &KnowledgeGraph,
    mode: RelatednessMode,
) -> Result<QdrScore>
where
    Q: AsRef<str>,
    D: AsRef<str>,
{
    let query = distinct_sorted(query_entities, kg)?;
    let doc = distinct_sorted(doc_entities, kg)?;
    let m = doc.len() as f64;
    let mut breakdown = Vec::with_capacity(query.len());
    for q in query {
        let mean = if doc.is_empty() {
            0.0
        } else {
            let mut sum = 0.0;
            for d in &doc {
                sum += kg.relatedness(q, d, mode)?;
            }
            sum / m
        };
        breakdown.push(EntityContribution {
            entity_id: q.to_string(),
            relatedness: mean,
        });
    }
    let value = breakdown.iter().map(|c| c.relatedness).sum();
    Ok(QdrScore { value, breakdown })
}

/// Entities of every indexed document, linked once up front.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocEntityCache {
    entities: BTreeMap<String, Vec<String>>,
}

impl DocEntityCache {
    pub fn build<E: Embedder>(index: &DocumentIndex<E>, gazetteer: &Gazetteer) -> Self {
        let entities = index
            .documents()
            .iter()
            .map(|d| {
                (
                    d.id().to_string(),
                    doc_entities(&d.document.embedding_text(), gazetteer),
                )
            })
            .collect();
        Self { entities }
    }

    pub fn from_map(entities: BTreeMap<String, Vec<String>>) -> Self {
        Self { entities }
    }

    /// Entities of `doc_id`; empty for documents never linked.
    pub fn get(&self, doc_id: &str) -> &[String] {
        self.entities.get(doc_id).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entities.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RerankedDoc {
    pub doc_id: String,
    pub rank: usize,
    pub embedding_score: f64,
    pub embedding_rank: usize,
    pub qdr: QdrScore,
}

/// Stable descending sort of `candidates` by relatedness; ties keep the
/// embedding order. No candidate is added or dropped.
pub fn rerank<S: AsRef<str>>(
    candidates: &[ScoredDoc],
    query_entities: &[S],
    kg: &KnowledgeGraph,
    doc_entities: &DocEntityCache,
    mode: RelatednessMode,
) -> Result<Vec<RerankedDoc>> {
    let mut scored = candidates
        .iter()
        .map(|c| {
            Ok(RerankedDoc {
                doc_id: c.doc_id.clone(),
                rank: 0,
                embedding_score: c.score,
                embedding_rank: c.rank,
                qdr: qdr(query_entities, doc_entities.get(&c.doc_id), kg, mode)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|a, b| b.qdr.value.total_cmp(&a.qdr.value));
    for (i, d) in scored.iter_mut().enumerate() {
        d.rank = i + 1;
    }
    Ok(scored)
}
