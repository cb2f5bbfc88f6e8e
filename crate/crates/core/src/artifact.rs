//! On-disk index artifact.
//!
//! One JSON document holding the fitted embedder, every indexed document
//! (vector and sentence spans) and, when a graph was supplied at build
//! time, the entities linked in each document. Serialization only walks
//! ordered containers, so the same inputs always produce the same bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::KnowledgeGraph;
use crate::pipeline::Engine;
use crate::rerank::DocEntityCache;
use crate::retrieval::{DocumentIndex, IndexedDocument};
use crate::text::EmbedderModel;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexArtifact {
    pub format_version: u32,
    pub model: EmbedderModel,
    pub documents: Vec<IndexedDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc_entities: Option<DocEntityCache>,
}

#[derive(Deserialize)]
struct VersionProbe {
    format_version: u32,
}

impl IndexArtifact {
    pub fn from_index(index: &DocumentIndex, doc_entities: Option<DocEntityCache>) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            model: index.model().clone(),
            documents: index.documents().to_vec(),
            doc_entities,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    /// Parses an artifact, rejecting other format versions before looking
    /// at the payload.
    pub fn from_json(text: &str) -> Result<Self> {
        let probe: VersionProbe =
            serde_json::from_str(text).map_err(|e| Error::Artifact(e.to_string()))?;
        if probe.format_version != FORMAT_VERSION {
            return Err(Error::ArtifactVersion {
                found: probe.format_version,
                expected: FORMAT_VERSION,
            });
        }
        serde_json::from_str(text).map_err(|e| Error::Artifact(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn into_index(self) -> Result<(DocumentIndex, Option<DocEntityCache>)> {
        let index = DocumentIndex::from_parts(self.model, self.documents)?;
        Ok((index, self.doc_entities))
    }

    /// Rebuilds an engine over `kg`. A stored entity cache is reused only
    /// if every id in it exists in `kg`; otherwise documents are relinked.
    pub fn into_engine(self, kg: KnowledgeGraph) -> Result<Engine> {
        let (index, cache) = self.into_index()?;
        match cache {
            Some(cache)
                if cache
                    .iter()
                    .all(|(_, ids)| ids.iter().all(|id| kg.contains_entity(id))) =>
            {
                Ok(Engine::with_cache(index, kg, cache))
            }
            _ => Ok(Engine::from_index(index, kg)),
        }
    }
}
