use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the retrieval pipeline.
///
/// Variants fall in two families: data/format problems in the inputs
/// ([`Error::Parse`], [`Error::Io`], unknown or duplicate ids) and contract
/// violations by the caller (mismatched vector dimensions, a degenerate
/// graph handed to the relatedness measure).
#[derive(Debug, Error)]
pub enum Error {
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus is empty, cannot fit an embedder")]
    EmptyCorpus,

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("unknown document id `{0}`")]
    UnknownDocument(String),

    #[error("document `{0}` has no sentences")]
    NoSentences(String),

    #[error("duplicate entity id `{0}`")]
    DuplicateEntity(String),

    #[error("duplicate relation id `{0}`")]
    DuplicateRelation(String),

    #[error("unknown entity id `{0}`")]
    UnknownEntity(String),

    #[error("unknown relation id `{0}`")]
    UnknownRelation(String),

    #[error("vector dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("relatedness undefined for `{a}` and `{b}`: {reason}")]
    RelatednessDomain {
        a: String,
        b: String,
        reason: &'static str,
    },

    #[error("no gold annotation for query `{0}`")]
    MissingGoldLinks(String),

    #[error("no gold sentences for query `{0}`")]
    MissingSentenceGold(String),

    #[error("prediction for unknown query `{0}`")]
    UnknownQuery(String),

    #[error("unsupported index artifact version {found} (expected {expected})")]
    ArtifactVersion { found: u32, expected: u32 },

    #[error("malformed index artifact: {0}")]
    Artifact(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(origin: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            origin: origin.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
