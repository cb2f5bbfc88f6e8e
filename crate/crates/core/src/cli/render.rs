use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::pipeline::{Engine, ExplanationRecord};

#[derive(Debug, Serialize)]
pub(super) struct IndexSummary {
    pub artifact: String,
    pub documents: usize,
    pub vocabulary: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub documents_with_entities: Option<usize>,
    pub warnings: usize,
}

impl fmt::Display for IndexSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "indexed {} documents ({} terms) into {}",
            self.documents, self.vocabulary, self.artifact
        )?;
        if let Some(n) = self.documents_with_entities {
            write!(f, "; {n} documents mention graph entities")?;
        }
        writeln!(f)
    }
}

fn label<'a>(engine: &'a Engine, id: &'a str) -> &'a str {
    engine.kg.entity(id).map_or(id, |e| e.label.as_str())
}

/// Human-readable explanation block.
pub(super) fn explanation(r: &ExplanationRecord, engine: &Engine) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "query {}: {}", r.query_id, r.query);
    let e = &r.expansion;
    let entities: Vec<String> = e
        .entity_ids
        .iter()
        .map(|id| format!("{id} ({})", label(engine, id)))
        .collect();
    let _ = writeln!(
        s,
        "linker: {}  entities: [{}]  relations: [{}]",
        r.linker,
        entities.join(", "),
        e.relation_ids.join(", ")
    );
    let _ = writeln!(s, "expansion: case {}  appended: [{}]", e.case, e.appended_terms.join(", "));
    let _ = writeln!(s, "expanded query: {}", r.expanded_text);
    match r.relatedness {
        Some(m) => {
            let _ = writeln!(s, "order: relatedness ({m}), ties by embedding rank");
        }
        None => {
            let _ = writeln!(s, "order: embedding score, ties by document id");
        }
    }
    for d in &r.docs {
        let _ = write!(
            s,
            "{:>3}. {}  embedding {:.6} (rank {})",
            d.rank, d.doc_id, d.embedding_score, d.embedding_rank
        );
        if let Some(q) = &d.qdr {
            let parts: Vec<String> = q
                .breakdown
                .iter()
                .map(|c| format!("{} {:.6}", c.entity_id, c.relatedness))
                .collect();
            let _ = write!(s, "  relatedness {:.6} [{}]", q.value, parts.join(", "));
        }
        s.push('\n');
        match &d.mis {
            Some(m) => {
                let _ = writeln!(s, "     MIS #{} ({:.6}): {}", m.index, m.score, m.text);
            }
            None => s.push_str("     MIS: document has no sentences\n"),
        }
    }
    if r.docs.is_empty() {
        s.push_str("no documents\n");
    }
    s
}
