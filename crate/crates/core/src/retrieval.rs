//! Exact vector retrieval and most-important-sentence selection.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::text::{cosine, split_sentences, Embedder, EmbedderModel, EmbeddingVector, SentenceSpan};

/// One document as stored in the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedDocument {
    pub document: Document,
    pub vector: EmbeddingVector,
    pub sentences: Vec<SentenceSpan>,
}

impl IndexedDocument {
    pub fn id(&self) -> &str {
        &self.document.id
    }

    pub fn sentence_text(&self, index: usize) -> Option<&str> {
        self.sentences.get(index).map(|s| s.text(&self.document.text))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisResult {
    pub index: usize,
    pub text: String,
    pub score: f64,
}

/// Brute-force cosine index over a fixed corpus.
#[derive(Debug, Clone)]
pub struct DocumentIndex<E = EmbedderModel> {
    model: E,
    docs: Vec<IndexedDocument>,
    positions: HashMap<String, usize>,
    warnings: Vec<String>,
}

fn same_space(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    cosine(a, b).expect("vectors come from the same embedder")
}

impl<E: Embedder> DocumentIndex<E> {
    /// Embeds every document once and splits its text into sentences.
    /// Documents whose vector is all-zero are kept and reported in
    /// [`DocumentIndex::warnings`].
    pub fn build(corpus: &[Document], model: E) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let docs = corpus
            .iter()
            .map(|d| IndexedDocument {
                vector: model.embed(&d.embedding_text()),
                sentences: split_sentences(&d.text),
                document: d.clone(),
            })
            .collect();
        Self::from_parts(model, docs)
    }

    /// Reassembles an index from stored parts, checking id uniqueness.
    pub fn from_parts(model: E, docs: Vec<IndexedDocument>) -> Result<Self> {
        let mut positions = HashMap::with_capacity(docs.len());
        let mut warnings = Vec::new();
        for (i, d) in docs.iter().enumerate() {
            if positions.insert(d.id().to_string(), i).is_some() {
                return Err(Error::DuplicateDocument(d.id().to_string()));
            }
            if d.vector.dim() != model.dim() {
                return Err(Error::DimensionMismatch {
                    left: d.vector.dim(),
                    right: model.dim(),
                });
            }
            if d.vector.is_zero() {
                warnings.push(format!("document `{}` has no in-vocabulary terms", d.id()));
            }
        }
        Ok(Self {
            model,
            docs,
            positions,
            warnings,
        })
    }

    pub fn model(&self) -> &E {
        &self.model
    }

    pub fn documents(&self) -> &[IndexedDocument] {
        &self.docs
    }

    pub fn document(&self, id: &str) -> Option<&IndexedDocument> {
        self.positions.get(id).map(|&i| &self.docs[i])
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn embed(&self, text: &str) -> EmbeddingVector {
        self.model.embed(text)
    }

    /// Top `k` documents by cosine similarity to `query`, ties broken by
    /// ascending document id.
    pub fn retrieve(&self, query: &str, k: usize) -> Vec<ScoredDoc> {
        self.retrieve_vector(&self.model.embed(query), k)
    }

    pub fn retrieve_vector(&self, query: &EmbeddingVector, k: usize) -> Vec<ScoredDoc> {
        let mut scored: Vec<(f64, &str)> = self
            .docs
            .iter()
            .map(|d| (same_space(query, &d.vector), d.id()))
            .collect();
        let order = |a: &(f64, &str), b: &(f64, &str)| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k, order);
            scored.truncate(k);
        }
        scored.sort_by(order);
        scored
            .into_iter()
            .enumerate()
            .map(|(i, (score, id))| ScoredDoc {
                doc_id: id.to_string(),
                score,
                rank: i + 1,
            })
            .collect()
    }

    /// The sentence of `doc_id` most similar to `query`; the earliest
    /// sentence wins a tie.
    pub fn select_mis(&self, doc_id: &str, query: &str) -> Result<MisResult> {
        self.select_mis_vector(doc_id, &self.model.embed(query))
    }

    pub fn select_mis_vector(&self, doc_id: &str, query: &EmbeddingVector) -> Result<MisResult> {
        let doc = self
            .document(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))?;
        let mut best: Option<(usize, f64)> = None;
        for s in &doc.sentences {
            let score = same_space(query, &self.model.embed(s.text(&doc.document.text)));
            if best.is_none_or(|(_, b)| score.total_cmp(&b) == Ordering::Greater) {
                best = Some((s.index, score));
            }
        }
        let (index, score) = best.ok_or_else(|| Error::NoSentences(doc_id.to_string()))?;
        Ok(MisResult {
            index,
            text: doc.sentence_text(index).unwrap_or_default().to_string(),
            score,
        })
    }

    /// Similarity of `query` to every sentence of `doc_id`, in sentence order.
    pub fn sentence_scores(&self, doc_id: &str, query: &EmbeddingVector) -> Result<Vec<f64>> {
        let doc = self
            .document(doc_id)
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))?;
        Ok(doc
            .sentences
            .iter()
            .map(|s| same_space(query, &self.model.embed(s.text(&doc.document.text))))
            .collect())
    }
}

/// Fits the reference embedder on `corpus` and indexes it.
pub fn build_index(corpus: &[Document]) -> Result<DocumentIndex> {
    let model = crate::text::fit_embedder(corpus)?;
    DocumentIndex::build(corpus, model)
}
