//! Knowledge-graph query expansion.
//!
//! A query's linked mentions select one of three expansion strategies:
//! neighbor labels when an entity comes with a relation it actually has
//! edges for, the entity description when exactly one entity is present,
//! and the entity labels themselves when several entities appear without a
//! usable relation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kg::KnowledgeGraph;
use crate::linker::{LinkedMention, MentionKind};
use crate::text::tokenize;

/// Maximum number of description tokens appended for a single entity.
pub const DESCRIPTION_TOKEN_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionCase {
    /// Entity plus relation: append labels of the related neighbors.
    #[serde(rename = "A")]
    Neighbors,
    /// Exactly one entity: append its description.
    #[serde(rename = "B")]
    Description,
    /// Several entities, no relation: append their labels.
    #[serde(rename = "C")]
    EntityLabels,
    /// Nothing linked.
    #[serde(rename = "none")]
    Unexpanded,
}

impl fmt::Display for ExpansionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpansionCase::Neighbors => "A",
            ExpansionCase::Description => "B",
            ExpansionCase::EntityLabels => "C",
            ExpansionCase::Unexpanded => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedQuery {
    pub original: String,
    pub appended_terms: Vec<String>,
    pub case: ExpansionCase,
    pub entity_ids: Vec<String>,
    pub relation_ids: Vec<String>,
}

impl ExpandedQuery {
    pub fn unexpanded(query: &str) -> Self {
        Self {
            original: query.to_string(),
            appended_terms: Vec::new(),
            case: ExpansionCase::Unexpanded,
            entity_ids: Vec::new(),
            relation_ids: Vec::new(),
        }
    }

    /// The original query followed by a space and the appended terms, or
    /// the original alone when nothing was appended.
    pub fn text(&self) -> String {
        if self.appended_terms.is_empty() {
            self.original.clone()
        } else {
            format!("{} {}", self.original, self.appended_terms.join(" "))
        }
    }
}

/// Picks the expansion case from the number of distinct entities and
/// relations mentioned.
pub fn classify(entity_mentions: &[&str], relation_mentions: &[&str]) -> ExpansionCase {
    let entities: BTreeSet<&str> = entity_mentions.iter().copied().collect();
    let relations: BTreeSet<&str> = relation_mentions.iter().copied().collect();
    match (entities.len(), relations.len()) {
        (0, _) => ExpansionCase::Unexpanded,
        (_, r) if r > 0 => ExpansionCase::Neighbors,
        (1, _) => ExpansionCase::Description,
        _ => ExpansionCase::EntityLabels,
    }
}

/// Expands `query` using its linked mentions.
///
/// A relation counts toward the neighbor case only when at least one
/// mentioned entity has an outgoing edge of that type; otherwise the query
/// is treated as if the relation had not been mentioned.
pub fn expand(query: &str, mentions: &[LinkedMention], kg: &KnowledgeGraph) -> Result<ExpandedQuery> {
    let ids = |kind| -> BTreeSet<&str> {
        mentions
            .iter()
            .filter(|m| m.kind == kind)
            .map(|m| m.id.as_str())
            .collect()
    };
    let entities = ids(MentionKind::Entity);
    let relations = ids(MentionKind::Relation);

    let mut neighbors = BTreeSet::new();
    let mut usable = Vec::new();
    for &r in &relations {
        let mut used = false;
        for &e in &entities {
            let hits = kg.neighbors(e, Some(r))?;
            used |= !hits.is_empty();
            neighbors.extend(hits);
        }
        if used {
            usable.push(r);
        }
    }
    let entity_list: Vec<&str> = entities.iter().copied().collect();
    let case = classify(&entity_list, &usable);

    let label = |id: &str| -> Result<String> {
        kg.entity(id)
            .map(|e| e.label.clone())
            .ok_or_else(|| crate::Error::UnknownEntity(id.to_string()))
    };
    let appended_terms = match case {
        ExpansionCase::Neighbors => neighbors.into_iter().map(label).collect::<Result<_>>()?,
        ExpansionCase::Description => {
            let e = kg
                .entity(entity_list[0])
                .ok_or_else(|| crate::Error::UnknownEntity(entity_list[0].to_string()))?;
            tokenize(&e.description)
                .into_iter()
                .take(DESCRIPTION_TOKEN_CAP)
                .map(|t| t.into_string())
                .collect()
        }
        ExpansionCase::EntityLabels => entity_list.iter().map(|id| label(id)).collect::<Result<_>>()?,
        ExpansionCase::Unexpanded => Vec::new(),
    };

    Ok(ExpandedQuery {
        original: query.to_string(),
        appended_terms,
        case,
        entity_ids: entities.into_iter().map(String::from).collect(),
        relation_ids: relations.into_iter().map(String::from).collect(),
    })
}
