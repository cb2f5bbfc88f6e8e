//! Entity and relation linking.
//!
//! [`Gazetteer`] performs deterministic greedy longest-match linking over
//! normalized tokens. [`GoldAnnotation`] replays hand-made links per query,
//! standing in for an error-free linker.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{data_lines, open};
use crate::kg::{Diagnostic, DiagnosticKind, KnowledgeGraph};
use crate::text::{token_spans, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MentionKind {
    Entity,
    Relation,
}

impl fmt::Display for MentionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MentionKind::Entity => "entity",
            MentionKind::Relation => "relation",
        })
    }
}

impl std::str::FromStr for MentionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "entity" => Ok(MentionKind::Entity),
            "relation" => Ok(MentionKind::Relation),
            other => Err(format!("unknown mention kind `{other}`")),
        }
    }
}

/// A text span resolved to a graph id. Gold mentions carry an empty span
/// (`start == end == 0`) since they are not tied to query offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedMention {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub kind: MentionKind,
    pub id: String,
}

#[derive(Debug, Clone, Default)]
struct SurfaceEntry {
    entity: Option<String>,
    relation: Option<String>,
}

/// Surface-form dictionary built from every label and alias in a graph.
#[derive(Debug, Clone)]
pub struct Gazetteer {
    entries: HashMap<Vec<String>, SurfaceEntry>,
    max_len: usize,
    diagnostics: Vec<Diagnostic>,
}

impl Gazetteer {
    /// Registers every entity and relation label and alias. When two ids of
    /// the same kind share a surface form, the lexicographically smaller id
    /// keeps it and a collision diagnostic is recorded.
    pub fn build(kg: &KnowledgeGraph) -> Self {
        let mut gaz = Gazetteer {
            entries: HashMap::new(),
            max_len: 0,
            diagnostics: Vec::new(),
        };
        // both lists are sorted by id, so the first claimant is the smallest
        for e in kg.entities() {
            for surface in std::iter::once(&e.label).chain(&e.aliases) {
                gaz.insert(surface, MentionKind::Entity, &e.id);
            }
        }
        for r in kg.relations() {
            for surface in std::iter::once(&r.label).chain(&r.aliases) {
                gaz.insert(surface, MentionKind::Relation, &r.id);
            }
        }
        gaz
    }

    fn insert(&mut self, surface: &str, kind: MentionKind, id: &str) {
        let key: Vec<String> = tokenize(surface).into_iter().map(|t| t.into_string()).collect();
        if key.is_empty() {
            return;
        }
        self.max_len = self.max_len.max(key.len());
        let joined = key.join(" ");
        let entry = self.entries.entry(key).or_default();
        let slot = match kind {
            MentionKind::Entity => &mut entry.entity,
            MentionKind::Relation => &mut entry.relation,
        };
        match slot {
            None => *slot = Some(id.to_string()),
            Some(owner) if owner == id => {}
            Some(owner) => self.diagnostics.push(Diagnostic {
                kind: DiagnosticKind::SurfaceCollision,
                message: format!("{kind} surface `{joined}` claimed by `{owner}` and `{id}`; keeping `{owner}`"),
            }),
        }
    }

    /// Looks up a surface form after normalization.
    pub fn lookup(&self, surface: &str, kind: MentionKind) -> Option<&str> {
        let key: Vec<String> = tokenize(surface).into_iter().map(|t| t.into_string()).collect();
        let entry = self.entries.get(&key)?;
        match kind {
            MentionKind::Entity => entry.entity.as_deref(),
            MentionKind::Relation => entry.relation.as_deref(),
        }
    }

    /// Length in tokens of the longest registered surface form.
    pub fn max_surface_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    /// Greedy left-to-right longest match. Matched tokens are consumed, so
    /// mentions never overlap. A span registered as both an entity and a
    /// relation resolves to the entity.
    pub fn link(&self, text: &str) -> Vec<LinkedMention> {
        let spans: Vec<_> = token_spans(text).collect();
        let tokens: Vec<String> = spans.iter().map(|(t, _)| t.as_str().to_string()).collect();
        let mut mentions = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let longest = self.max_len.min(tokens.len() - i);
            let hit = (1..=longest).rev().find_map(|n| {
                let entry = self.entries.get(&tokens[i..i + n])?;
                let (kind, id) = match (&entry.entity, &entry.relation) {
                    (Some(e), _) => (MentionKind::Entity, e),
                    (None, Some(r)) => (MentionKind::Relation, r),
                    (None, None) => return None,
                };
                Some((n, kind, id))
            });
            match hit {
                Some((n, kind, id)) => {
                    let start = spans[i].1.start;
                    let end = spans[i + n - 1].1.end;
                    mentions.push(LinkedMention {
                        start,
                        end,
                        surface: text[start..end].to_string(),
                        kind,
                        id: id.clone(),
                    });
                    i += n;
                }
                None => i += 1,
            }
        }
        mentions
    }
}

/// Hand-checked links per query id.
#[derive(Debug, Clone, Default)]
pub struct GoldAnnotation {
    links: BTreeMap<String, Vec<(MentionKind, String)>>,
}

impl GoldAnnotation {
    /// Reads `query_id<TAB>kind<TAB>kg_id` lines, rejecting ids the graph
    /// does not know.
    pub fn read(reader: impl BufRead, origin: &str, kg: &KnowledgeGraph) -> Result<Self> {
        let mut links: BTreeMap<String, Vec<(MentionKind, String)>> = BTreeMap::new();
        for line in data_lines(reader, origin) {
            let (n, line) = line?;
            let f: Vec<&str> = line.trim_end_matches('\r').split('\t').map(str::trim).collect();
            let [query, kind, id] = f[..] else {
                return Err(Error::parse(origin, n, "expected query_id<TAB>kind<TAB>kg_id"));
            };
            if query.is_empty() {
                return Err(Error::parse(origin, n, "empty query id"));
            }
            let kind: MentionKind = kind.parse().map_err(|e: String| Error::parse(origin, n, e))?;
            let known = match kind {
                MentionKind::Entity => kg.contains_entity(id),
                MentionKind::Relation => kg.contains_relation(id),
            };
            if !known {
                return Err(Error::parse(origin, n, format!("unknown {kind} id `{id}`")));
            }
            links.entry(query.to_string()).or_default().push((kind, id.to_string()));
        }
        Ok(Self { links })
    }

    pub fn load(path: &Path, kg: &KnowledgeGraph) -> Result<Self> {
        Self::read(open(path)?, &path.display().to_string(), kg)
    }

    pub fn insert(&mut self, query_id: &str, kind: MentionKind, id: &str) {
        self.links
            .entry(query_id.to_string())
            .or_default()
            .push((kind, id.to_string()));
    }

    /// Registers a query with no links, distinguishing "annotated as having
    /// nothing to link" from "not annotated".
    pub fn insert_empty(&mut self, query_id: &str) {
        self.links.entry(query_id.to_string()).or_default();
    }

    pub fn contains(&self, query_id: &str) -> bool {
        self.links.contains_key(query_id)
    }

    /// Annotated links for a query, as mentions with empty spans whose
    /// surface is the graph label.
    pub fn link(&self, query_id: &str, kg: &KnowledgeGraph) -> Result<Vec<LinkedMention>> {
        let links = self
            .links
            .get(query_id)
            .ok_or_else(|| Error::MissingGoldLinks(query_id.to_string()))?;
        links
            .iter()
            .map(|(kind, id)| {
                let label = match kind {
                    MentionKind::Entity => kg.entity(id).map(|e| e.label.clone()),
                    MentionKind::Relation => kg.relation(id).map(|r| r.label.clone()),
                };
                let surface = label.ok_or_else(|| match kind {
                    MentionKind::Entity => Error::UnknownEntity(id.clone()),
                    MentionKind::Relation => Error::UnknownRelation(id.clone()),
                })?;
                Ok(LinkedMention {
                    start: 0,
                    end: 0,
                    surface,
                    kind: *kind,
                    id: id.clone(),
                })
            })
            .collect()
    }
}

/// Which linker resolves query mentions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkerMode {
    Gazetteer,
    Gold,
    Off,
}

impl fmt::Display for LinkerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkerMode::Gazetteer => "gazetteer",
            LinkerMode::Gold => "gold",
            LinkerMode::Off => "off",
        })
    }
}

/// A configured query linker.
#[derive(Debug, Clone, Copy)]
pub enum QueryLinker<'a> {
    Off,
    Gazetteer(&'a Gazetteer),
    Gold(&'a GoldAnnotation, &'a KnowledgeGraph),
}

impl QueryLinker<'_> {
    pub fn mode(&self) -> LinkerMode {
        match self {
            QueryLinker::Off => LinkerMode::Off,
            QueryLinker::Gazetteer(_) => LinkerMode::Gazetteer,
            QueryLinker::Gold(..) => LinkerMode::Gold,
        }
    }

    pub fn link(&self, query_id: &str, text: &str) -> Result<Vec<LinkedMention>> {
        match self {
            QueryLinker::Off => Ok(Vec::new()),
            QueryLinker::Gazetteer(g) => Ok(g.link(text)),
            QueryLinker::Gold(gold, kg) => gold.link(query_id, kg),
        }
    }
}
