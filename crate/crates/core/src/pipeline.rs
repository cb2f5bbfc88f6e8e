//! End-to-end query processing: link, expand, retrieve, re-rank, explain.

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::expansion::{expand, ExpandedQuery};
use crate::kg::{KnowledgeGraph, RelatednessMode};
use crate::linker::{Gazetteer, GoldAnnotation, LinkerMode, MentionKind, QueryLinker};
use crate::rerank::{rerank, DocEntityCache, QdrScore};
use crate::retrieval::{build_index, DocumentIndex, MisResult};

/// Everything needed to answer queries over one corpus and graph.
#[derive(Debug, Clone)]
pub struct Engine {
    pub index: DocumentIndex,
    pub kg: KnowledgeGraph,
    pub gazetteer: Gazetteer,
    pub doc_entities: DocEntityCache,
}

#[derive(Debug, Clone, Copy)]
pub struct QueryOptions<'a> {
    pub linker: LinkerMode,
    pub gold: Option<&'a GoldAnnotation>,
    pub expand: bool,
    /// Re-rank candidates by entity relatedness in this mode.
    pub relatedness: Option<RelatednessMode>,
    pub k: usize,
}

impl Default for QueryOptions<'_> {
    fn default() -> Self {
        Self {
            linker: LinkerMode::Gazetteer,
            gold: None,
            expand: true,
            relatedness: None,
            k: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainedDoc {
    pub rank: usize,
    pub doc_id: String,
    pub embedding_score: f64,
    pub embedding_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qdr: Option<QdrScore>,
    /// Absent for documents without sentences.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mis: Option<MisResult>,
}

/// A ranked answer with everything needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub query_id: String,
    pub query: String,
    pub linker: LinkerMode,
    pub expansion: ExpandedQuery,
    pub expanded_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relatedness: Option<RelatednessMode>,
    pub docs: Vec<ExplainedDoc>,
}

impl ExplanationRecord {
    /// Re-derives the document order from the record's own scores:
    /// relatedness descending then embedding rank when re-ranked, otherwise
    /// embedding score descending then document id.
    pub fn recomputed_order(&self) -> Vec<&str> {
        let mut docs: Vec<&ExplainedDoc> = self.docs.iter().collect();
        if self.relatedness.is_some() {
            docs.sort_by(|a, b| {
                let qa = a.qdr.as_ref().map_or(0.0, |q| q.value);
                let qb = b.qdr.as_ref().map_or(0.0, |q| q.value);
                qb.total_cmp(&qa).then(a.embedding_rank.cmp(&b.embedding_rank))
            });
        } else {
            docs.sort_by(|a, b| {
                b.embedding_score
                    .total_cmp(&a.embedding_score)
                    .then_with(|| a.doc_id.cmp(&b.doc_id))
            });
        }
        docs.into_iter().map(|d| d.doc_id.as_str()).collect()
    }
}

impl Engine {
    /// Fits the embedder, indexes `corpus`, and links every document
    /// against `kg`.
    pub fn build(corpus: &[Document], kg: KnowledgeGraph) -> Result<Self> {
        let index = build_index(corpus)?;
        Ok(Self::from_index(index, kg))
    }

    pub fn from_index(index: DocumentIndex, kg: KnowledgeGraph) -> Self {
        let gazetteer = Gazetteer::build(&kg);
        let doc_entities = DocEntityCache::build(&index, &gazetteer);
        Self {
            index,
            kg,
            gazetteer,
            doc_entities,
        }
    }

    /// Like [`Engine::from_index`] but reuses a previously computed entity
    /// cache.
    pub fn with_cache(index: DocumentIndex, kg: KnowledgeGraph, doc_entities: DocEntityCache) -> Self {
        let gazetteer = Gazetteer::build(&kg);
        Self {
            index,
            kg,
            gazetteer,
            doc_entities,
        }
    }

    pub fn linker<'a>(&'a self, mode: LinkerMode, gold: Option<&'a GoldAnnotation>) -> Result<QueryLinker<'a>> {
        Ok(match mode {
            LinkerMode::Off => QueryLinker::Off,
            LinkerMode::Gazetteer => QueryLinker::Gazetteer(&self.gazetteer),
            LinkerMode::Gold => QueryLinker::Gold(
                gold.ok_or_else(|| Error::MissingGoldLinks("<no gold annotation loaded>".into()))?,
                &self.kg,
            ),
        })
    }

    pub fn explain(&self, query_id: &str, query: &str, opts: &QueryOptions<'_>) -> Result<ExplanationRecord> {
        let linker = self.linker(opts.linker, opts.gold)?;
        let mentions = linker.link(query_id, query)?;
        let expansion = if opts.expand && opts.linker != LinkerMode::Off {
            expand(query, &mentions, &self.kg)?
        } else {
            ExpandedQuery::unexpanded(query)
        };
        let expanded_text = expansion.text();
        let qv = self.index.embed(&expanded_text);
        let candidates = self.index.retrieve_vector(&qv, opts.k);

        let ranked: Vec<(usize, String, f64, usize, Option<QdrScore>)> = match opts.relatedness {
            Some(mode) => {
                let query_entities: Vec<&str> = mentions
                    .iter()
                    .filter(|m| m.kind == MentionKind::Entity)
                    .map(|m| m.id.as_str())
                    .collect();
                rerank(&candidates, &query_entities, &self.kg, &self.doc_entities, mode)?
                    .into_iter()
                    .map(|d| (d.rank, d.doc_id, d.embedding_score, d.embedding_rank, Some(d.qdr)))
                    .collect()
            }
            None => candidates
                .into_iter()
                .map(|c| (c.rank, c.doc_id, c.score, c.rank, None))
                .collect(),
        };

        let docs = ranked
            .into_iter()
            .map(|(rank, doc_id, embedding_score, embedding_rank, qdr)| {
                let mis = match self.index.select_mis_vector(&doc_id, &qv) {
                    Ok(m) => Some(m),
                    Err(Error::NoSentences(_)) => None,
                    Err(e) => return Err(e),
                };
                Ok(ExplainedDoc {
                    rank,
                    doc_id,
                    embedding_score,
                    embedding_rank,
                    qdr,
                    mis,
                })
            })
            .collect::<Result<_>>()?;

        Ok(ExplanationRecord {
            query_id: query_id.to_string(),
            query: query.to_string(),
            linker: opts.linker,
            expansion,
            expanded_text,
            relatedness: opts.relatedness,
            docs,
        })
    }
}
