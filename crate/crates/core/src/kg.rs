//! Knowledge graph store: TSV loading, validation, neighbor lookup, and
//! link-overlap entity relatedness.
//!
//! Three tab-separated files describe a graph. Lines starting with `#` and
//! blank lines are skipped.
//!
//! ```text
//! entities:  id<TAB>label<TAB>alias1|alias2<TAB>description
//! relations: id<TAB>label<TAB>alias1|alias2
//! edges:     source_id<TAB>relation_id<TAB>target_id
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{data_lines, open};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    pub label: String,
    pub aliases: Vec<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationType {
    pub id: String,
    pub label: String,
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: String,
    pub relation: String,
    pub target: String,
}

impl Edge {
    pub fn new(source: &str, relation: &str, target: &str) -> Self {
        Self {
            source: source.into(),
            relation: relation.into(),
            target: target.into(),
        }
    }
}

/// How [`KnowledgeGraph::relatedness`] reports the link-overlap measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelatednessMode {
    /// The log-overlap distance itself; 0 for identical in-link sets,
    /// growing as overlap shrinks. Undefined without shared in-links.
    Raw,
    /// `clamp(1 - distance, 0, 1)`, larger is more related. Zero when the
    /// in-link sets do not intersect.
    #[default]
    Complement,
}

impl fmt::Display for RelatednessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelatednessMode::Raw => "raw",
            RelatednessMode::Complement => "complement",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    DanglingId,
    DuplicateId,
    EmptyLabel,
    IsolatedEntity,
    SurfaceCollision,
}

/// A non-fatal finding about graph or gazetteer content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "warning[{:?}]: {}", self.kind, self.message)
    }
}

/// A record together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sourced<T> {
    pub origin: String,
    pub line: usize,
    pub value: T,
}

/// Parsed but not yet cross-checked graph records.
#[derive(Debug, Clone, Default)]
pub struct KgParts {
    pub entities: Vec<Sourced<Entity>>,
    pub relations: Vec<Sourced<RelationType>>,
    pub edges: Vec<Sourced<Edge>>,
}

fn fields<'a>(line: &'a str, n: usize, origin: &str, lineno: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = line.trim_end_matches('\r').splitn(n, '\t').collect();
    if parts.len() < n {
        return Err(Error::parse(
            origin,
            lineno,
            format!("expected {n} tab-separated fields, found {}", parts.len()),
        ));
    }
    if parts[0].trim().is_empty() {
        return Err(Error::parse(origin, lineno, "empty id"));
    }
    Ok(parts)
}

fn split_aliases(field: &str) -> Vec<String> {
    field
        .split('|')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(String::from)
        .collect()
}

impl KgParts {
    pub fn read(
        entities: impl BufRead,
        entities_origin: &str,
        relations: impl BufRead,
        relations_origin: &str,
        edges: impl BufRead,
        edges_origin: &str,
    ) -> Result<Self> {
        let mut parts = KgParts::default();
        for line in data_lines(entities, entities_origin) {
            let (n, line) = line?;
            let f = fields(&line, 4, entities_origin, n)?;
            parts.entities.push(Sourced {
                origin: entities_origin.into(),
                line: n,
                value: Entity {
                    id: f[0].trim().into(),
                    label: f[1].trim().into(),
                    aliases: split_aliases(f[2]),
                    description: f[3].trim().into(),
                },
            });
        }
        for line in data_lines(relations, relations_origin) {
            let (n, line) = line?;
            let f = fields(&line, 3, relations_origin, n)?;
            parts.relations.push(Sourced {
                origin: relations_origin.into(),
                line: n,
                value: RelationType {
                    id: f[0].trim().into(),
                    label: f[1].trim().into(),
                    aliases: split_aliases(f[2]),
                },
            });
        }
        for line in data_lines(edges, edges_origin) {
            let (n, line) = line?;
            let f = fields(&line, 3, edges_origin, n)?;
            if f[2].contains('\t') {
                return Err(Error::parse(edges_origin, n, "expected 3 tab-separated fields"));
            }
            parts.edges.push(Sourced {
                origin: edges_origin.into(),
                line: n,
                value: Edge::new(f[0].trim(), f[1].trim(), f[2].trim()),
            });
        }
        Ok(parts)
    }

    pub fn load(entities: &Path, relations: &Path, edges: &Path) -> Result<Self> {
        Self::read(
            open(entities)?,
            &entities.display().to_string(),
            open(relations)?,
            &relations.display().to_string(),
            open(edges)?,
            &edges.display().to_string(),
        )
    }

    /// Reports dangling and duplicate ids, empty labels and isolated
    /// entities without failing.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut entity_ids = BTreeSet::new();
        for e in &self.entities {
            if !entity_ids.insert(e.value.id.as_str()) {
                out.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateId,
                    message: format!("{}:{}: duplicate entity id `{}`", e.origin, e.line, e.value.id),
                });
            }
        }
        let mut relation_ids = BTreeSet::new();
        for r in &self.relations {
            if !relation_ids.insert(r.value.id.as_str()) {
                out.push(Diagnostic {
                    kind: DiagnosticKind::DuplicateId,
                    message: format!("{}:{}: duplicate relation id `{}`", r.origin, r.line, r.value.id),
                });
            }
        }
        for e in &self.edges {
            let Edge { source, relation, target } = &e.value;
            for (id, known, what) in [
                (source, entity_ids.contains(source.as_str()), "entity"),
                (relation, relation_ids.contains(relation.as_str()), "relation"),
                (target, entity_ids.contains(target.as_str()), "entity"),
            ] {
                if !known {
                    out.push(Diagnostic {
                        kind: DiagnosticKind::DanglingId,
                        message: format!("{}:{}: edge references unknown {what} id `{id}`", e.origin, e.line),
                    });
                }
            }
        }
        content_diagnostics(
            self.entities.iter().map(|e| (&e.value.id, &e.value.label)),
            self.relations.iter().map(|r| (&r.value.id, &r.value.label)),
            self.edges.iter().map(|e| &e.value),
            &mut out,
        );
        out
    }

    /// Cross-checks ids and builds the indexed graph. Duplicate edges are
    /// collapsed.
    pub fn build(self) -> Result<KnowledgeGraph> {
        let mut entities: BTreeMap<String, Entity> = BTreeMap::new();
        for e in self.entities {
            if entities.contains_key(&e.value.id) {
                return Err(Error::parse(
                    &e.origin,
                    e.line,
                    format!("duplicate entity id `{}`", e.value.id),
                ));
            }
            entities.insert(e.value.id.clone(), e.value);
        }
        let mut relations: BTreeMap<String, RelationType> = BTreeMap::new();
        for r in self.relations {
            if relations.contains_key(&r.value.id) {
                return Err(Error::parse(
                    &r.origin,
                    r.line,
                    format!("duplicate relation id `{}`", r.value.id),
                ));
            }
            relations.insert(r.value.id.clone(), r.value);
        }
        let mut edges = BTreeSet::new();
        for e in self.edges {
            let Edge { source, relation, target } = &e.value;
            for id in [source, target] {
                if !entities.contains_key(id) {
                    return Err(Error::parse(&e.origin, e.line, format!("unknown entity id `{id}`")));
                }
            }
            if !relations.contains_key(relation) {
                return Err(Error::parse(
                    &e.origin,
                    e.line,
                    format!("unknown relation id `{relation}`"),
                ));
            }
            edges.insert(e.value);
        }
        Ok(KnowledgeGraph::index(
            entities.into_values().collect(),
            relations.into_values().collect(),
            edges.into_iter().collect(),
        ))
    }
}

fn content_diagnostics<'a>(
    entities: impl Iterator<Item = (&'a String, &'a String)>,
    relations: impl Iterator<Item = (&'a String, &'a String)>,
    edges: impl Iterator<Item = &'a Edge>,
    out: &mut Vec<Diagnostic>,
) {
    let mut touched = BTreeSet::new();
    for e in edges {
        touched.insert(e.source.as_str());
        touched.insert(e.target.as_str());
    }
    let mut isolated = Vec::new();
    for (id, label) in entities {
        if label.trim().is_empty() {
            out.push(Diagnostic {
                kind: DiagnosticKind::EmptyLabel,
                message: format!("entity `{id}` has an empty label"),
            });
        }
        if !touched.contains(id.as_str()) {
            isolated.push(id);
        }
    }
    for (id, label) in relations {
        if label.trim().is_empty() {
            out.push(Diagnostic {
                kind: DiagnosticKind::EmptyLabel,
                message: format!("relation `{id}` has an empty label"),
            });
        }
    }
    for id in isolated {
        out.push(Diagnostic {
            kind: DiagnosticKind::IsolatedEntity,
            message: format!("entity `{id}` has no incoming or outgoing edges"),
        });
    }
}

/// Immutable, indexed knowledge graph.
///
/// Entities and relation types are kept sorted by id; internally they are
/// addressed by dense indices so in-link sets are sorted `u32` slices.
#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    entities: Vec<Entity>,
    relations: Vec<RelationType>,
    edges: Vec<Edge>,
    entity_pos: HashMap<String, u32>,
    relation_pos: HashMap<String, u32>,
    in_links: Vec<Vec<u32>>,
    // (relation, target) pairs per source, sorted
    out_links: Vec<Vec<(u32, u32)>>,
}

impl KnowledgeGraph {
    /// Builds a graph from in-memory records, applying the same checks as
    /// file loading.
    pub fn from_records(
        entities: Vec<Entity>,
        relations: Vec<RelationType>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let wrap = |line, origin: &str| (origin.to_string(), line + 1);
        let parts = KgParts {
            entities: entities
                .into_iter()
                .enumerate()
                .map(|(i, value)| {
                    let (origin, line) = wrap(i, "entities");
                    Sourced { origin, line, value }
                })
                .collect(),
            relations: relations
                .into_iter()
                .enumerate()
                .map(|(i, value)| {
                    let (origin, line) = wrap(i, "relations");
                    Sourced { origin, line, value }
                })
                .collect(),
            edges: edges
                .into_iter()
                .enumerate()
                .map(|(i, value)| {
                    let (origin, line) = wrap(i, "edges");
                    Sourced { origin, line, value }
                })
                .collect(),
        };
        parts.build()
    }

    pub fn load(entities: &Path, relations: &Path, edges: &Path) -> Result<Self> {
        KgParts::load(entities, relations, edges)?.build()
    }

    fn index(entities: Vec<Entity>, relations: Vec<RelationType>, edges: Vec<Edge>) -> Self {
        let entity_pos: HashMap<String, u32> = entities
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i as u32))
            .collect();
        let relation_pos: HashMap<String, u32> = relations
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), i as u32))
            .collect();
        let mut in_links = vec![BTreeSet::new(); entities.len()];
        let mut out_links = vec![BTreeSet::new(); entities.len()];
        for e in &edges {
            let s = entity_pos[&e.source];
            let t = entity_pos[&e.target];
            let r = relation_pos[&e.relation];
            in_links[t as usize].insert(s);
            out_links[s as usize].insert((r, t));
        }
        Self {
            entities,
            relations,
            edges,
            entity_pos,
            relation_pos,
            in_links: in_links.into_iter().map(|s| s.into_iter().collect()).collect(),
            out_links: out_links.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    /// Total node count `W`.
    pub fn node_count(&self) -> usize {
        self.entities.len()
    }

    pub fn entity(&self, id: &str) -> Option<&Entity> {
        self.entity_pos.get(id).map(|&i| &self.entities[i as usize])
    }

    pub fn relation(&self, id: &str) -> Option<&RelationType> {
        self.relation_pos.get(id).map(|&i| &self.relations[i as usize])
    }

    pub fn contains_entity(&self, id: &str) -> bool {
        self.entity_pos.contains_key(id)
    }

    pub fn contains_relation(&self, id: &str) -> bool {
        self.relation_pos.contains_key(id)
    }

    /// Entities in ascending id order.
    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    /// Relation types in ascending id order.
    pub fn relations(&self) -> &[RelationType] {
        &self.relations
    }

    /// Distinct edges in ascending `(source, relation, target)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn entity_index(&self, id: &str) -> Result<u32> {
        self.entity_pos
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEntity(id.to_string()))
    }

    /// Ids of entities with an edge into `id`, ascending.
    pub fn in_links(&self, id: &str) -> Result<Vec<&str>> {
        let i = self.entity_index(id)?;
        Ok(self.in_links[i as usize]
            .iter()
            .map(|&s| self.entities[s as usize].id.as_str())
            .collect())
    }

    /// Targets of edges leaving `entity`, optionally restricted to one
    /// relation type. Deduplicated and sorted by id.
    pub fn neighbors(&self, entity: &str, relation: Option<&str>) -> Result<Vec<&str>> {
        let i = self.entity_index(entity)?;
        let rel = match relation {
            Some(r) => match self.relation_pos.get(r) {
                Some(&p) => Some(p),
                None => return Ok(Vec::new()),
            },
            None => None,
        };
        let targets: BTreeSet<u32> = self.out_links[i as usize]
            .iter()
            .filter(|(r, _)| rel.is_none_or(|want| *r == want))
            .map(|&(_, t)| t)
            .collect();
        // entity order is id order, so index order is id order
        Ok(targets
            .into_iter()
            .map(|t| self.entities[t as usize].id.as_str())
            .collect())
    }

    /// Link-overlap relatedness between two entities.
    ///
    /// With `A = in(a)`, `B = in(b)` and `W` nodes, the distance is
    ///
    /// ```text
    /// d = (ln max(|A|,|B|) - ln |A ∩ B|) / (ln W - ln min(|A|,|B|))
    /// ```
    ///
    /// The denominator is floored at `ln W - ln(W-1)` so that two entities
    /// linked from every node do not divide by zero.
    pub fn relatedness(&self, a: &str, b: &str, mode: RelatednessMode) -> Result<f64> {
        let ia = &self.in_links[self.entity_index(a)? as usize];
        let ib = &self.in_links[self.entity_index(b)? as usize];
        let domain = |reason| Error::RelatednessDomain {
            a: a.to_string(),
            b: b.to_string(),
            reason,
        };
        if self.node_count() < 2 {
            return Err(domain("graph has fewer than two nodes"));
        }
        let common = sorted_intersection_len(ia, ib);
        if ia.is_empty() || ib.is_empty() || common == 0 {
            return match mode {
                RelatednessMode::Raw => Err(domain("no shared in-links")),
                RelatednessMode::Complement => Ok(0.0),
            };
        }
        let w = self.node_count() as f64;
        let (lo, hi) = if ia.len() <= ib.len() {
            (ia.len(), ib.len())
        } else {
            (ib.len(), ia.len())
        };
        let numerator = (hi as f64).ln() - (common as f64).ln();
        let floor = w.ln() - (w - 1.0).ln();
        let denominator = (w.ln() - (lo as f64).ln()).max(floor);
        let distance = numerator / denominator;
        Ok(match mode {
            RelatednessMode::Raw => distance,
            RelatednessMode::Complement => (1.0 - distance).clamp(0.0, 1.0),
        })
    }

    /// Flags empty labels and isolated entities.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        content_diagnostics(
            self.entities.iter().map(|e| (&e.id, &e.label)),
            self.relations.iter().map(|r| (&r.id, &r.label)),
            self.edges.iter(),
            &mut out,
        );
        out
    }
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entity(id: &str, label: &str) -> Entity {
        Entity {
            id: id.into(),
            label: label.into(),
            aliases: vec![],
            description: String::new(),
        }
    }

    fn rel(id: &str) -> RelationType {
        RelationType {
            id: id.into(),
            label: id.into(),
            aliases: vec![],
        }
    }

    fn read(entities: &str, relations: &str, edges: &str) -> Result<KnowledgeGraph> {
        KgParts::read(
            entities.as_bytes(),
            "entities.tsv",
            relations.as_bytes(),
            "relations.tsv",
            edges.as_bytes(),
            "edges.tsv",
        )?
        .build()
    }

    const ENTITIES: &str = "# id\tlabel\taliases\tdescription\nA\tAlpha\ta1|a2\tfirst\nB\tBeta\t\t\n\nC\tGamma\t\tthird one\n";

    #[test]
    fn load_builds_in_links() {
        let kg = read(ENTITIES, "r\trel\t\n", "A\tr\tC\nB\tr\tC\nA\tr\tC\n").unwrap();
        assert_eq!(kg.node_count(), 3);
        assert_eq!(kg.in_links("C").unwrap(), ["A", "B"]);
        assert!(kg.in_links("A").unwrap().is_empty());
        assert_eq!(kg.edges().len(), 2, "duplicate edge collapsed");
        let a = kg.entity("A").unwrap();
        assert_eq!(a.aliases, ["a1", "a2"]);
        assert_eq!(a.description, "first");
        assert_eq!(kg.entity("B").unwrap().description, "");
    }

    #[test]
    fn load_with_no_edges() {
        let kg = read(ENTITIES, "", "").unwrap();
        for e in kg.entities() {
            assert!(kg.in_links(&e.id).unwrap().is_empty());
        }
    }

    #[test]
    fn load_rejects_unknown_id_with_line() {
        let err = read(ENTITIES, "r\trel\t\n", "A\tr\tC\n\nA\tr\tQ9\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Q9") && msg.contains("edges.tsv:3"), "{msg}");

        let err = read(ENTITIES, "r\trel\t\n", "A\tzz\tC\n").unwrap_err();
        assert!(err.to_string().contains("zz"));
    }

    #[test]
    fn load_rejects_duplicate_entity() {
        let err = read("A\tx\t\t\nA\ty\t\t\n", "", "").unwrap_err();
        assert!(err.to_string().contains("duplicate entity id `A`"), "{err}");
    }

    #[test]
    fn load_rejects_missing_tabs() {
        let err = read("A\tx\n", "", "").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read(ENTITIES, "r\trel\t\n", "A\tr\tC\textra\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    fn toy(w: usize, in_a: &[usize], in_b: &[usize]) -> KnowledgeGraph {
        let mut entities: Vec<Entity> = (0..w).map(|i| entity(&format!("n{i}"), "x")).collect();
        entities.push(entity("a", "a"));
        entities.push(entity("b", "b"));
        // `w` counts every node, so drop two filler nodes to make room for a and b
        entities.drain(0..2);
        let mut edges = Vec::new();
        for &s in in_a {
            edges.push(Edge::new(&format!("n{s}"), "r", "a"));
        }
        for &s in in_b {
            edges.push(Edge::new(&format!("n{s}"), "r", "b"));
        }
        KnowledgeGraph::from_records(entities, vec![rel("r")], edges).unwrap()
    }

    #[test]
    fn relatedness_worked_example() {
        let kg = toy(10, &[2, 3, 4], &[3, 4, 5]);
        assert_eq!(kg.node_count(), 10);
        let raw = kg.relatedness("a", "b", RelatednessMode::Raw).unwrap();
        let expected = (3f64.ln() - 2f64.ln()) / (10f64.ln() - 3f64.ln());
        assert!((raw - expected).abs() < 1e-12);
        assert!((raw - 0.33677).abs() < 1e-5);
        let comp = kg.relatedness("a", "b", RelatednessMode::Complement).unwrap();
        assert!((comp - (1.0 - expected)).abs() < 1e-12);
    }

    #[test]
    fn relatedness_identity_and_symmetry() {
        let kg = toy(10, &[2, 3, 4], &[3, 4, 5]);
        assert_eq!(kg.relatedness("a", "a", RelatednessMode::Raw).unwrap(), 0.0);
        assert_eq!(kg.relatedness("a", "a", RelatednessMode::Complement).unwrap(), 1.0);
        for mode in [RelatednessMode::Raw, RelatednessMode::Complement] {
            assert_eq!(
                kg.relatedness("a", "b", mode).unwrap(),
                kg.relatedness("b", "a", mode).unwrap()
            );
        }
    }

    #[test]
    fn relatedness_disjoint_in_links() {
        let kg = toy(10, &[2, 3], &[4, 5]);
        assert_eq!(kg.relatedness("a", "b", RelatednessMode::Complement).unwrap(), 0.0);
        assert!(matches!(
            kg.relatedness("a", "b", RelatednessMode::Raw),
            Err(Error::RelatednessDomain { .. })
        ));
        // entity with no in-links at all
        assert_eq!(kg.relatedness("n2", "n2", RelatednessMode::Complement).unwrap(), 0.0);
    }

    #[test]
    fn relatedness_unknown_entity() {
        let kg = toy(4, &[2], &[2]);
        assert!(matches!(
            kg.relatedness("a", "nope", RelatednessMode::Complement),
            Err(Error::UnknownEntity(id)) if id == "nope"
        ));
    }

    #[test]
    fn relatedness_full_in_links_uses_denominator_floor() {
        // every node links to both a and b, including themselves
        let ids = ["a", "b", "c"];
        let entities = ids.iter().map(|i| entity(i, i)).collect();
        let mut edges = Vec::new();
        for s in ids {
            edges.push(Edge::new(s, "r", "a"));
            edges.push(Edge::new(s, "r", "b"));
        }
        let kg = KnowledgeGraph::from_records(entities, vec![rel("r")], edges).unwrap();
        let raw = kg.relatedness("a", "b", RelatednessMode::Raw).unwrap();
        assert_eq!(raw, 0.0);
        assert!(raw.is_finite());
    }

    #[test]
    fn neighbors_sorted_and_filtered() {
        let entities = vec![
            entity("Q12204", "heart disease"),
            entity("Q12174", "obesity"),
            entity("Q12152", "atherosclerosis"),
            entity("Q1", "other"),
        ];
        let relations = vec![rel("P1542"), rel("P31")];
        let edges = vec![
            Edge::new("Q12204", "P1542", "Q12174"),
            Edge::new("Q12204", "P1542", "Q12152"),
            Edge::new("Q12204", "P31", "Q1"),
        ];
        let kg = KnowledgeGraph::from_records(entities, relations, edges).unwrap();
        assert_eq!(kg.neighbors("Q12204", Some("P1542")).unwrap(), ["Q12152", "Q12174"]);
        assert_eq!(kg.neighbors("Q12204", None).unwrap(), ["Q1", "Q12152", "Q12174"]);
        assert!(kg.neighbors("Q12174", None).unwrap().is_empty());
        assert!(kg.neighbors("Q12204", Some("P999")).unwrap().is_empty());
        assert!(kg.neighbors("Q1", Some("P1542")).unwrap().is_empty());
        assert!(kg.neighbors("missing", None).is_err());
    }

    #[test]
    fn validate_reports_content_problems() {
        let kg = read("A\tAlpha\t\t\nB\tBeta\t\t\n", "r\trel\t\n", "A\tr\tB\n").unwrap();
        assert!(kg.validate().is_empty());

        let kg = read("A\t\t\t\nB\tBeta\t\t\n", "r\trel\t\n", "A\tr\tB\n").unwrap();
        let d = kg.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::EmptyLabel);

        let kg = read("A\tAlpha\t\t\nB\tBeta\t\t\nC\tGamma\t\t\n", "r\trel\t\n", "A\tr\tB\n").unwrap();
        let d = kg.validate();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::IsolatedEntity);
        assert!(d[0].message.contains("`C`"));
    }

    #[test]
    fn parts_diagnostics_report_dangling_ids() {
        let parts = KgParts::read(
            "A\tAlpha\t\t\nA\tAgain\t\t\n".as_bytes(),
            "e",
            "r\trel\t\n".as_bytes(),
            "r",
            "A\tr\tQ9\n".as_bytes(),
            "x",
        )
        .unwrap();
        let kinds: Vec<_> = parts.diagnostics().into_iter().map(|d| d.kind).collect();
        assert!(kinds.contains(&DiagnosticKind::DanglingId));
        assert!(kinds.contains(&DiagnosticKind::DuplicateId));
    }
}
