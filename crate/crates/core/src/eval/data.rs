//! Evaluation inputs: queries, TREC qrels, and sentence-level gold.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{data_lines, open};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub text: String,
}

/// Reads `query_id<TAB>query text` lines, preserving file order.
pub fn read_queries(reader: impl BufRead, origin: &str) -> Result<Vec<Query>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for line in data_lines(reader, origin) {
        let (n, line) = line?;
        let line = line.trim_end_matches('\r');
        let Some((id, text)) = line.split_once('\t') else {
            return Err(Error::parse(origin, n, "expected query_id<TAB>query text"));
        };
        let (id, text) = (id.trim(), text.trim());
        if id.is_empty() || text.is_empty() {
            return Err(Error::parse(origin, n, "empty query id or text"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::parse(origin, n, format!("duplicate query id `{id}`")));
        }
        out.push(Query {
            id: id.into(),
            text: text.into(),
        });
    }
    Ok(out)
}

pub fn load_queries(path: &Path) -> Result<Vec<Query>> {
    read_queries(open(path)?, &path.display().to_string())
}

/// Graded relevance judgments: query id → document id → grade.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    /// Reads TREC lines `query_id iteration doc_id grade`.
    pub fn read(reader: impl BufRead, origin: &str) -> Result<Self> {
        let mut judgments: BTreeMap<String, BTreeMap<String, u32>> = BTreeMap::new();
        for line in data_lines(reader, origin) {
            let (n, line) = line?;
            let f: Vec<&str> = line.split_whitespace().collect();
            let [query, _iteration, doc, grade] = f[..] else {
                return Err(Error::parse(origin, n, "expected `query_id 0 doc_id grade`"));
            };
            let grade: i64 = grade
                .parse()
                .map_err(|_| Error::parse(origin, n, format!("grade `{grade}` is not an integer")))?;
            let grade = u32::try_from(grade)
                .map_err(|_| Error::parse(origin, n, format!("grade {grade} is negative or too large")))?;
            if judgments
                .entry(query.to_string())
                .or_default()
                .insert(doc.to_string(), grade)
                .is_some()
            {
                return Err(Error::parse(
                    origin,
                    n,
                    format!("second judgment for ({query}, {doc})"),
                ));
            }
        }
        Ok(Self { judgments })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(open(path)?, &path.display().to_string())
    }

    pub fn insert(&mut self, query: &str, doc: &str, grade: u32) {
        self.judgments
            .entry(query.to_string())
            .or_default()
            .insert(doc.to_string(), grade);
    }

    pub fn grades(&self, query: &str) -> Option<&BTreeMap<String, u32>> {
        self.judgments.get(query)
    }

    /// Documents graded ≥ 1 for `query`.
    pub fn relevant(&self, query: &str) -> BTreeSet<String> {
        self.grades(query)
            .map(|g| {
                g.iter()
                    .filter(|(_, &grade)| grade >= 1)
                    .map(|(d, _)| d.clone())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn queries(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    /// Renders in TREC format, sorted by query then document.
    pub fn to_trec(&self) -> String {
        let mut out = String::new();
        for (q, docs) in &self.judgments {
            for (d, g) in docs {
                out.push_str(&format!("{q} 0 {d} {g}\n"));
            }
        }
        out
    }
}

/// Correct (document, sentence index) answers per query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SentenceGold {
    answers: BTreeMap<String, BTreeSet<(String, usize)>>,
}

impl SentenceGold {
    /// Reads `query_id<TAB>doc_id<TAB>sentence_index` lines.
    pub fn read(reader: impl BufRead, origin: &str) -> Result<Self> {
        let mut gold = Self::default();
        for line in data_lines(reader, origin) {
            let (n, line) = line?;
            let f: Vec<&str> = line.trim_end_matches('\r').split('\t').map(str::trim).collect();
            let [query, doc, index] = f[..] else {
                return Err(Error::parse(origin, n, "expected query_id<TAB>doc_id<TAB>sentence_index"));
            };
            let index: usize = index
                .parse()
                .map_err(|_| Error::parse(origin, n, format!("bad sentence index `{index}`")))?;
            gold.insert(query, doc, index);
        }
        Ok(gold)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(open(path)?, &path.display().to_string())
    }

    pub fn insert(&mut self, query: &str, doc: &str, index: usize) {
        self.answers
            .entry(query.to_string())
            .or_default()
            .insert((doc.to_string(), index));
    }

    pub fn answers(&self, query: &str) -> Option<&BTreeSet<(String, usize)>> {
        self.answers.get(query)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<(String, usize)>)> {
        self.answers.iter().map(|(q, a)| (q.as_str(), a))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (q, answers) in &self.answers {
            for (d, i) in answers {
                out.push_str(&format!("{q}\t{d}\t{i}\n"));
            }
        }
        out
    }
}
