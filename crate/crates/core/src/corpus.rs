//! Corpus documents and the line-delimited JSON corpus format.
//!
//! Each non-blank line is one object with a string `id`, an optional
//! string `title`, and a string `text`.

use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{open, read_lines};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            title: None,
            text: text.into(),
        }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    /// Text fed to the embedder: the title, if any, then a space, then the body.
    pub fn embedding_text(&self) -> String {
        match &self.title {
            Some(t) => format!("{t} {}", self.text),
            None => self.text.clone(),
        }
    }
}

pub fn read_corpus(reader: impl BufRead, origin: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for line in read_lines(reader, origin) {
        let (lineno, line) = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: Document = serde_json::from_str(&line)
            .map_err(|e| Error::parse(origin, lineno, format!("bad corpus record: {e}")))?;
        docs.push(doc);
    }
    Ok(docs)
}

pub fn load_corpus(path: &Path) -> Result<Vec<Document>> {
    read_corpus(open(path)?, &path.display().to_string())
}

/// Serializes documents as one JSON object per line.
pub fn write_corpus(docs: &[Document]) -> String {
    let mut out = String::new();
    for d in docs {
        out.push_str(&serde_json::to_string(d).expect("document serializes"));
        out.push('\n');
    }
    out
}
