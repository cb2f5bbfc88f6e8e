use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::tokenize;
use crate::corpus::Document;
use crate::error::{Error, Result};

/// Anything that maps text into the vector space used for similarity.
pub trait Embedder {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> EmbeddingVector;
}

/// Sparse real vector indexed by vocabulary position.
///
/// Only non-zero components are stored, in ascending index order. Vectors
/// produced by [`Embedder::embed`] have unit L2 norm or are all-zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl EmbeddingVector {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    /// Builds a vector from dense components, keeping them as given.
    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i as u32, *v))
            .collect();
        Self {
            dim: values.len(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(index as u32), |(i, _)| *i)
            .map_or(0.0, |pos| self.entries[pos].1)
    }

    /// Non-zero components in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(i, v)| (*i as usize, *v))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            out[i] = v;
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    fn normalized(mut self) -> Self {
        let norm = self.norm();
        if norm > 0.0 {
            for (_, v) in &mut self.entries {
                *v /= norm;
            }
        }
        self
    }
}

/// Cosine similarity. All-zero vectors score 0 against everything.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    if a.is_zero() || b.is_zero() {
        return Ok(0.0);
    }
    let (mut i, mut j, mut dot) = (0, 0, 0.0);
    while i < a.entries.len() && j < b.entries.len() {
        let (ia, va) = a.entries[i];
        let (ib, vb) = b.entries[j];
        match ia.cmp(&ib) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += va * vb;
                i += 1;
                j += 1;
            }
        }
    }
    Ok((dot / (a.norm() * b.norm())).clamp(-1.0, 1.0))
}

/// Fitted TF-IDF model: sorted vocabulary with per-term document frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelRecord", into = "ModelRecord")]
pub struct EmbedderModel {
    vocabulary: Vec<String>,
    document_frequency: Vec<u32>,
    corpus_size: u32,
    idf: Vec<f64>,
    lookup: HashMap<String, u32>,
}

#[derive(Serialize, Deserialize)]
struct ModelRecord {
    vocabulary: Vec<String>,
    document_frequency: Vec<u32>,
    corpus_size: u32,
}

impl From<EmbedderModel> for ModelRecord {
    fn from(m: EmbedderModel) -> Self {
        Self {
            vocabulary: m.vocabulary,
            document_frequency: m.document_frequency,
            corpus_size: m.corpus_size,
        }
    }
}

impl TryFrom<ModelRecord> for EmbedderModel {
    type Error = Error;

    fn try_from(r: ModelRecord) -> Result<Self> {
        if r.vocabulary.len() != r.document_frequency.len() {
            return Err(Error::Artifact(
                "vocabulary and document-frequency lengths differ".into(),
            ));
        }
        if r.vocabulary.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Artifact("vocabulary not sorted and unique".into()));
        }
        if r.document_frequency
            .iter()
            .any(|&df| df == 0 || df > r.corpus_size)
        {
            return Err(Error::Artifact("document frequency out of range".into()));
        }
        Ok(Self::from_parts(r.vocabulary, r.document_frequency, r.corpus_size))
    }
}

impl EmbedderModel {
    /// Fits vocabulary and document frequencies over a collection of texts.
    pub fn fit<I, S>(texts: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut df: BTreeMap<String, u32> = BTreeMap::new();
        let mut n = 0u32;
        for text in texts {
            n += 1;
            let distinct: BTreeSet<String> = tokenize(text.as_ref())
                .into_iter()
                .map(|t| t.into_string())
                .collect();
            for term in distinct {
                *df.entry(term).or_default() += 1;
            }
        }
        if n == 0 {
            return Err(Error::EmptyCorpus);
        }
        let (vocabulary, document_frequency) = df.into_iter().unzip();
        Ok(Self::from_parts(vocabulary, document_frequency, n))
    }

    fn from_parts(vocabulary: Vec<String>, document_frequency: Vec<u32>, corpus_size: u32) -> Self {
        let n = f64::from(corpus_size);
        let idf = document_frequency
            .iter()
            .map(|&df| ((1.0 + n) / (1.0 + f64::from(df))).ln() + 1.0)
            .collect();
        let lookup = vocabulary
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Self {
            vocabulary,
            document_frequency,
            corpus_size,
            idf,
            lookup,
        }
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size as usize
    }

    pub fn document_frequency(&self, term: &str) -> Option<u32> {
        self.position(term).map(|i| self.document_frequency[i])
    }

    /// Smoothed inverse document frequency, `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, term: &str) -> Option<f64> {
        self.position(term).map(|i| self.idf[i])
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.lookup.get(term).map(|&i| i as usize)
    }
}

impl Embedder for EmbedderModel {
    fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    fn embed(&self, text: &str) -> EmbeddingVector {
        let mut tf: BTreeMap<u32, u32> = BTreeMap::new();
        for tok in tokenize(text) {
            if let Some(&pos) = self.lookup.get(tok.as_str()) {
                *tf.entry(pos).or_default() += 1;
            }
        }
        let entries = tf
            .into_iter()
            .map(|(pos, count)| (pos, f64::from(count) * self.idf[pos as usize]))
            .collect();
        EmbeddingVector {
            dim: self.vocabulary.len(),
            entries,
        }
        .normalized()
    }
}

/// Fits the reference embedder on the embedding text (title + body) of
/// every document.
pub fn fit_embedder(corpus: &[Document]) -> Result<EmbedderModel> {
    EmbedderModel::fit(corpus.iter().map(Document::embedding_text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> Document {
        Document::new(id, text)
    }

    #[test]
    fn fit_counts_document_frequency() {
        let m = fit_embedder(&[doc("1", "a b"), doc("2", "b c")]).unwrap();
        assert_eq!(m.vocabulary(), ["a", "b", "c"]);
        assert_eq!(m.document_frequency("a"), Some(1));
        assert_eq!(m.document_frequency("b"), Some(2));
        assert_eq!(m.document_frequency("c"), Some(1));
        assert_eq!(m.corpus_size(), 2);

        let m = fit_embedder(&[doc("1", "x x x")]).unwrap();
        assert_eq!(m.vocabulary(), ["x"]);
        assert_eq!(m.document_frequency("x"), Some(1));

        let m = fit_embedder(&[doc("1", "a"), doc("2", "a")]).unwrap();
        assert_eq!(m.document_frequency("a"), Some(2));
        assert_eq!(m.corpus_size(), 2);
    }

    #[test]
    fn fit_rejects_empty_corpus() {
        assert!(matches!(fit_embedder(&[]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn idf_values() {
        let m = fit_embedder(&[doc("1", "a b"), doc("2", "b c")]).unwrap();
        assert_eq!(m.idf("b"), Some(1.0));
        let expected = (3.0f64 / 2.0).ln() + 1.0;
        assert!((m.idf("a").unwrap() - 1.405465).abs() < 1e-6);
        assert_eq!(m.idf("a"), Some(expected));
        assert_eq!(m.idf("zzz"), None);
    }

    #[test]
    fn embed_weights_and_normalizes() {
        let m = fit_embedder(&[doc("1", "a b"), doc("2", "b c")]).unwrap();
        let v = m.embed("a a b unknown");
        let (wa, wb) = (2.0 * m.idf("a").unwrap(), 1.0);
        let norm = (wa * wa + wb * wb).sqrt();
        assert!((v.get(0) - wa / norm).abs() < 1e-12);
        assert!((v.get(1) - wb / norm).abs() < 1e-12);
        assert_eq!(v.get(2), 0.0);
        assert!((v.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn out_of_vocabulary_text_is_zero() {
        let m = fit_embedder(&[doc("1", "a b")]).unwrap();
        let v = m.embed("nothing here !!");
        assert!(v.is_zero());
        assert_eq!(v.dim(), 2);
        assert_eq!(cosine(&v, &m.embed("a")).unwrap(), 0.0);
    }

    #[test]
    fn cosine_examples() {
        let v = EmbeddingVector::from_dense(&[0.6, 0.8]);
        assert!((cosine(&v, &v).unwrap() - 1.0).abs() < 1e-12);
        let x = EmbeddingVector::from_dense(&[1.0, 0.0]);
        let y = EmbeddingVector::from_dense(&[0.0, 1.0]);
        assert_eq!(cosine(&x, &y).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let d = EmbeddingVector::from_dense(&[h, h]);
        assert!((cosine(&d, &x).unwrap() - 0.707107).abs() < 1e-6);
    }

    #[test]
    fn cosine_dimension_mismatch() {
        let a = EmbeddingVector::from_dense(&[1.0]);
        let b = EmbeddingVector::from_dense(&[1.0, 0.0]);
        assert!(matches!(
            cosine(&a, &b),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn model_serde_rebuilds_lookup() {
        let m = fit_embedder(&[doc("1", "alpha beta"), doc("2", "beta gamma")]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: EmbedderModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.embed("gamma beta"), m.embed("gamma beta"));
    }

    #[test]
    fn model_serde_validates_invariants() {
        let bad = r#"{"vocabulary":["b","a"],"document_frequency":[1,1],"corpus_size":1}"#;
        assert!(serde_json::from_str::<EmbedderModel>(bad).is_err());
        let bad = r#"{"vocabulary":["a"],"document_frequency":[3],"corpus_size":2}"#;
        assert!(serde_json::from_str::<EmbedderModel>(bad).is_err());
    }
}
