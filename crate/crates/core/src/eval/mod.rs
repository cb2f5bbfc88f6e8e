//! Evaluation harness: sentence-retrieval accuracy with and without query
//! expansion, and ranking quality before and after relatedness re-ranking.

mod data;
pub mod metrics;

pub use data::{load_queries, read_queries, Qrels, Query, SentenceGold};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::ExpansionCase;
use crate::kg::RelatednessMode;
use crate::linker::{GoldAnnotation, LinkerMode};
use crate::pipeline::{Engine, QueryOptions};
use metrics::{accuracy, average_precision_at_k, ideal_dcg_at_k, mean, ndcg_at_k, precision_recall};

pub const PASSAGE_ACCURACY: &str = "passage_accuracy";
pub const SENTENCE_ACCURACY: &str = "sentence_accuracy";
pub const PRECISION: &str = "p";
pub const RECALL: &str = "recall";

pub fn map_key(k: usize) -> String {
    format!("map@{k}")
}

pub fn ndcg_key(k: usize) -> String {
    format!("ndcg@{k}")
}

/// Aggregate metrics for one system configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRow {
    pub system: String,
    pub linker: LinkerMode,
    pub expansion: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relatedness: Option<RelatednessMode>,
    pub k: usize,
    pub queries: usize,
    pub metrics: BTreeMap<String, f64>,
}

impl SystemRow {
    pub fn metric(&self, name: &str) -> f64 {
        self.metrics.get(name).copied().unwrap_or(f64::NAN)
    }
}

/// Per-query outcome for one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRow {
    pub system: String,
    pub query_id: String,
    pub metrics: BTreeMap<String, f64>,
    pub ranking: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<ExpansionCase>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub appended_terms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_sentence: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub experiment: String,
    pub columns: Vec<String>,
    pub rows: Vec<SystemRow>,
    pub queries: Vec<QueryRow>,
    /// Queries that could not be scored (e.g. no judgments).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum ReportLine {
    Report {
        experiment: String,
        columns: Vec<String>,
        skipped: Vec<String>,
    },
    System(SystemRow),
    Query(QueryRow),
}

impl EvalReport {
    pub fn row(&self, system: &str) -> Option<&SystemRow> {
        self.rows.iter().find(|r| r.system == system)
    }

    /// Appends the rows and queries of another report of the same kind.
    pub fn extend(&mut self, other: EvalReport) {
        self.rows.extend(other.rows);
        self.queries.extend(other.queries);
        for s in other.skipped {
            if !self.skipped.contains(&s) {
                self.skipped.push(s);
            }
        }
    }

    /// Fixed-width table with metrics in percent.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment: {} (metrics in %)", self.experiment);
        let mut header = format!("{:<12} {:<10} {:<6} {:<11} {:>4} {:>7}", "system", "linker", "expand", "relatedness", "k", "queries");
        for c in &self.columns {
            let _ = write!(header, " {c:>17}");
        }
        let _ = writeln!(out, "{header}");
        let _ = writeln!(out, "{}", "-".repeat(header.len()));
        for r in &self.rows {
            let rel = r.relatedness.map_or("-".to_string(), |m| m.to_string());
            let _ = write!(
                out,
                "{:<12} {:<10} {:<6} {:<11} {:>4} {:>7}",
                r.system,
                r.linker.to_string(),
                if r.expansion { "on" } else { "off" },
                rel,
                r.k,
                r.queries
            );
            for c in &self.columns {
                let _ = write!(out, " {:>17.2}", 100.0 * r.metric(c));
            }
            out.push('\n');
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out, "skipped queries: {}", self.skipped.join(", "));
        }
        out
    }

    /// One JSON object per line: a header, then every system row, then
    /// every per-query row.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: ReportLine| {
            out.push_str(&serde_json::to_string(&line).expect("report serializes"));
            out.push('\n');
        };
        push(ReportLine::Report {
            experiment: self.experiment.clone(),
            columns: self.columns.clone(),
            skipped: self.skipped.clone(),
        });
        for r in &self.rows {
            push(ReportLine::System(r.clone()));
        }
        for q in &self.queries {
            push(ReportLine::Query(q.clone()));
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut report: Option<EvalReport> = None;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parsed: ReportLine = serde_json::from_str(line)
                .map_err(|e| Error::parse("report", i + 1, e.to_string()))?;
            match (parsed, report.as_mut()) {
                (ReportLine::Report { experiment, columns, skipped }, None) => {
                    report = Some(EvalReport {
                        experiment,
                        columns,
                        rows: Vec::new(),
                        queries: Vec::new(),
                        skipped,
                    })
                }
                (ReportLine::System(row), Some(r)) => r.rows.push(row),
                (ReportLine::Query(q), Some(r)) => r.queries.push(q),
                _ => return Err(Error::parse("report", i + 1, "unexpected record")),
            }
        }
        report.ok_or_else(|| Error::parse("report", 0, "empty report"))
    }
}

fn system_name(mode: LinkerMode) -> &'static str {
    match mode {
        LinkerMode::Off => "baseline",
        LinkerMode::Gazetteer => "gazetteer",
        LinkerMode::Gold => "gold",
    }
}

/// Sentence-retrieval protocol: for each query take the top-1 passage
/// (using the expanded query unless the linker is off) and its most
/// important sentence, then score both against the sentence gold.
pub fn run_mis_experiment(
    engine: &Engine,
    queries: &[Query],
    sentence_gold: &SentenceGold,
    linker: LinkerMode,
    gold_links: Option<&GoldAnnotation>,
) -> Result<EvalReport> {
    let opts = QueryOptions {
        linker,
        gold: gold_links,
        expand: linker != LinkerMode::Off,
        relatedness: None,
        k: 1,
    };
    let system = system_name(linker);
    let mut passage_pred = BTreeMap::new();
    let mut passage_gold = BTreeMap::new();
    let mut sentence_pred = BTreeMap::new();
    let mut sentence_gold_map = BTreeMap::new();
    let mut rows = Vec::with_capacity(queries.len());

    for q in queries {
        let answers = sentence_gold
            .answers(&q.id)
            .ok_or_else(|| Error::MissingSentenceGold(q.id.clone()))?;
        for (doc, idx) in answers {
            let d = engine
                .index
                .document(doc)
                .ok_or_else(|| Error::UnknownDocument(doc.clone()))?;
            if *idx >= d.sentences.len() {
                return Err(Error::Parse {
                    origin: "sentence gold".into(),
                    line: 0,
                    message: format!("query `{}`: document `{doc}` has no sentence {idx}", q.id),
                });
            }
        }
        let record = engine.explain(&q.id, &q.text, &opts)?;
        let top = record.docs.first();
        let top_doc = top.map(|d| d.doc_id.clone()).unwrap_or_default();
        let top_sentence = top.and_then(|d| d.mis.as_ref()).map(|m| m.index);

        let gold_docs: BTreeSet<String> = answers.iter().map(|(d, _)| d.clone()).collect();
        let gold_pairs: BTreeSet<(String, Option<usize>)> =
            answers.iter().map(|(d, i)| (d.clone(), Some(*i))).collect();
        let passage_hit = gold_docs.contains(&top_doc);
        let sentence_hit = gold_pairs.contains(&(top_doc.clone(), top_sentence));

        passage_pred.insert(q.id.clone(), top_doc.clone());
        passage_gold.insert(q.id.clone(), gold_docs);
        sentence_pred.insert(q.id.clone(), (top_doc.clone(), top_sentence));
        sentence_gold_map.insert(q.id.clone(), gold_pairs);

        rows.push(QueryRow {
            system: system.to_string(),
            query_id: q.id.clone(),
            metrics: BTreeMap::from([
                (PASSAGE_ACCURACY.to_string(), f64::from(u8::from(passage_hit))),
                (SENTENCE_ACCURACY.to_string(), f64::from(u8::from(sentence_hit))),
            ]),
            ranking: vec![top_doc],
            case: Some(record.expansion.case),
            appended_terms: record.expansion.appended_terms,
            predicted_sentence: top_sentence,
            flags: Vec::new(),
        });
    }

    let metrics = BTreeMap::from([
        (PASSAGE_ACCURACY.to_string(), accuracy(&passage_pred, &passage_gold)?),
        (SENTENCE_ACCURACY.to_string(), accuracy(&sentence_pred, &sentence_gold_map)?),
    ]);
    Ok(EvalReport {
        experiment: "mis".into(),
        columns: vec![PASSAGE_ACCURACY.into(), SENTENCE_ACCURACY.into()],
        rows: vec![SystemRow {
            system: system.into(),
            linker,
            expansion: opts.expand,
            relatedness: None,
            k: 1,
            queries: queries.len(),
            metrics,
        }],
        queries: rows,
        skipped: Vec::new(),
    })
}

/// Re-ranking protocol: retrieve the top `k` candidates for each judged
/// query with the unexpanded query, then score the embedding order
/// (`baseline`) and the relatedness order (`qdr`) side by side.
pub fn run_rerank_experiment(
    engine: &Engine,
    queries: &[Query],
    qrels: &Qrels,
    k: usize,
    linker: LinkerMode,
    gold_links: Option<&GoldAnnotation>,
    mode: RelatednessMode,
) -> Result<EvalReport> {
    let opts = QueryOptions {
        linker,
        gold: gold_links,
        expand: false,
        relatedness: Some(mode),
        k,
    };
    let mut skipped = Vec::new();
    let mut baseline_rows = Vec::new();
    let mut qdr_rows = Vec::new();

    for q in queries {
        let Some(grades) = qrels.grades(&q.id) else {
            skipped.push(q.id.clone());
            continue;
        };
        let relevant = qrels.relevant(&q.id);
        let record = engine.explain(&q.id, &q.text, &opts)?;
        let reranked: Vec<String> = record.docs.iter().map(|d| d.doc_id.clone()).collect();
        let mut by_embedding: Vec<_> = record.docs.iter().collect();
        by_embedding.sort_by_key(|d| d.embedding_rank);
        let baseline: Vec<String> = by_embedding.iter().map(|d| d.doc_id.clone()).collect();

        let mut flags = Vec::new();
        if ideal_dcg_at_k(grades, k) == 0.0 {
            flags.push("zero_ideal_dcg".to_string());
        }
        for (system, ranking, out) in [
            ("baseline", baseline, &mut baseline_rows),
            ("qdr", reranked, &mut qdr_rows),
        ] {
            let (p, r) = precision_recall(&ranking, &relevant);
            let metrics = BTreeMap::from([
                (PRECISION.to_string(), p),
                (RECALL.to_string(), r),
                (map_key(k), average_precision_at_k(&ranking, &relevant, k)),
                (ndcg_key(k), ndcg_at_k(&ranking, grades, k)),
            ]);
            out.push(QueryRow {
                system: system.into(),
                query_id: q.id.clone(),
                metrics,
                ranking,
                case: None,
                appended_terms: Vec::new(),
                predicted_sentence: None,
                flags: flags.clone(),
            });
        }
    }

    let columns = vec![PRECISION.to_string(), RECALL.to_string(), map_key(k), ndcg_key(k)];
    let aggregate = |system: &str, rel: Option<RelatednessMode>, rows: &[QueryRow]| SystemRow {
        system: system.into(),
        linker,
        expansion: false,
        relatedness: rel,
        k,
        queries: rows.len(),
        metrics: columns
            .iter()
            .map(|c| (c.clone(), mean(rows.iter().map(|r| r.metrics[c]))))
            .collect(),
    };
    let rows = vec![
        aggregate("baseline", None, &baseline_rows),
        aggregate("qdr", Some(mode), &qdr_rows),
    ];
    let mut queries_out = baseline_rows;
    queries_out.extend(qdr_rows);
    Ok(EvalReport {
        experiment: "rerank".into(),
        columns,
        rows,
        queries: queries_out,
        skipped,
    })
}
