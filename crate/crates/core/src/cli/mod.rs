//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage and configuration problems
//! (bad flags, missing or unreadable files), 2 for malformed or
//! inconsistent data.

mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::artifact::IndexArtifact;
use crate::corpus::load_corpus;
use crate::error::Error;
use crate::eval::{load_queries, run_mis_experiment, run_rerank_experiment, EvalReport, Qrels, SentenceGold};
use crate::kg::{KgParts, KnowledgeGraph, RelatednessMode};
use crate::linker::{Gazetteer, GoldAnnotation, LinkerMode};
use crate::pipeline::{Engine, QueryOptions};
use crate::rerank::DocEntityCache;
use crate::retrieval::build_index;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kgxir", version, about = "Explainable retrieval with knowledge-graph expansion and re-ranking")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the embedder, index a corpus and write the index artifact.
    Index(IndexArgs),
    /// Answer one query and explain every returned document.
    Query(QueryArgs),
    /// Sentence-retrieval accuracy per linker mode.
    EvalMis(EvalMisArgs),
    /// Ranking quality of embedding order versus relatedness order.
    EvalRerank(EvalRerankArgs),
    /// Check graph files and report diagnostics.
    KgValidate(KgValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LinkerArg {
    Gazetteer,
    Gold,
    Off,
}

impl From<LinkerArg> for LinkerMode {
    fn from(a: LinkerArg) -> Self {
        match a {
            LinkerArg::Gazetteer => LinkerMode::Gazetteer,
            LinkerArg::Gold => LinkerMode::Gold,
            LinkerArg::Off => LinkerMode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RelatednessArg {
    Raw,
    Complement,
    Off,
}

impl RelatednessArg {
    fn mode(self) -> Option<RelatednessMode> {
        match self {
            RelatednessArg::Raw => Some(RelatednessMode::Raw),
            RelatednessArg::Complement => Some(RelatednessMode::Complement),
            RelatednessArg::Off => None,
        }
    }
}

#[derive(Debug, Args)]
struct KgPaths {
    /// Entities TSV: id, label, aliases (|-separated), description.
    #[arg(long, value_name = "PATH")]
    kg_entities: Option<PathBuf>,
    /// Relations TSV: id, label, aliases.
    #[arg(long, value_name = "PATH")]
    kg_relations: Option<PathBuf>,
    /// Edges TSV: source, relation, target.
    #[arg(long, value_name = "PATH")]
    kg_edges: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Source {
    /// Corpus JSONL; indexed in memory.
    #[arg(long, value_name = "PATH", conflicts_with = "index")]
    corpus: Option<PathBuf>,
    /// Index artifact written by `kgxir index`.
    #[arg(long, value_name = "PATH")]
    index: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    #[command(flatten)]
    kg: KgPaths,
    /// Where to write the artifact.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// Query text.
    query: String,
    #[arg(long, default_value = "q0")]
    query_id: String,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    kg: KgPaths,
    #[arg(long, value_enum, default_value = "gazetteer")]
    linker: LinkerArg,
    /// Gold links TSV: query_id, kind (entity|relation), graph id.
    #[arg(long, value_name = "PATH")]
    gold_links: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "on")]
    expand: Toggle,
    #[arg(long, value_enum, default_value = "off")]
    relatedness: RelatednessArg,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    /// Also append the record as one JSON line to this file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the record as one JSON line instead of the text block.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvalMisArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    kg: KgPaths,
    /// Queries TSV: query_id, text.
    #[arg(long, value_name = "PATH")]
    queries: PathBuf,
    /// Sentence gold TSV: query_id, doc_id, sentence index.
    #[arg(long, value_name = "PATH")]
    sentence_gold: PathBuf,
    /// Evaluate a single linker mode. By default: off, gazetteer, and gold
    /// when gold links are given.
    #[arg(long, value_enum)]
    linker: Option<LinkerArg>,
    #[arg(long, value_name = "PATH")]
    gold_links: Option<PathBuf>,
    /// Report as JSON lines to this file.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print JSON lines instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct EvalRerankArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    kg: KgPaths,
    #[arg(long, value_name = "PATH")]
    queries: PathBuf,
    /// TREC qrels: query_id 0 doc_id grade.
    #[arg(long, value_name = "PATH")]
    qrels: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long, value_enum, default_value = "gazetteer")]
    linker: LinkerArg,
    #[arg(long, value_name = "PATH")]
    gold_links: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "complement")]
    relatedness: RelatednessArg,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct KgValidateArgs {
    #[command(flatten)]
    kg: KgPaths,
    /// Print diagnostics as JSON lines.
    #[arg(long)]
    json: bool,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other),
        }
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Data(e) => e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Index(a) => cmd_index(a, out, err),
        Command::Query(a) => cmd_query(a, out),
        Command::EvalMis(a) => cmd_eval_mis(a, out),
        Command::EvalRerank(a) => cmd_eval_rerank(a, out),
        Command::KgValidate(a) => cmd_kg_validate(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit_code()
        }
    }
}

fn write_file(path: &Path, contents: &str) -> CmdResult {
    fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

impl KgPaths {
    fn given(&self) -> Option<(&Path, &Path, &Path)> {
        match (&self.kg_entities, &self.kg_relations, &self.kg_edges) {
            (Some(e), Some(r), Some(g)) => Some((e, r, g)),
            _ => None,
        }
    }

    fn any(&self) -> bool {
        self.kg_entities.is_some() || self.kg_relations.is_some() || self.kg_edges.is_some()
    }

    /// Loads the graph; `why` names the feature that needs it, or `None`
    /// when an empty graph is acceptable.
    fn load(&self, why: Option<&str>) -> std::result::Result<KnowledgeGraph, Failure> {
        match self.given() {
            Some((e, r, g)) => Ok(KnowledgeGraph::load(e, r, g)?),
            None if self.any() => Err(usage(
                "--kg-entities, --kg-relations and --kg-edges must be given together",
            )),
            None => match why {
                Some(why) => Err(usage(format!(
                    "{why} needs a graph: pass --kg-entities, --kg-relations and --kg-edges"
                ))),
                None => Ok(KnowledgeGraph::from_records(Vec::new(), Vec::new(), Vec::new())?),
            },
        }
    }
}

impl Source {
    fn engine(&self, kg: KnowledgeGraph) -> std::result::Result<Engine, Failure> {
        match (&self.index, &self.corpus) {
            (Some(path), _) => Ok(IndexArtifact::load(path)?.into_engine(kg)?),
            (None, Some(path)) => Ok(Engine::build(&load_corpus(path)?, kg)?),
            (None, None) => Err(usage("pass --index or --corpus")),
        }
    }
}

fn load_gold(path: Option<&Path>, kg: &KnowledgeGraph, required: bool) -> std::result::Result<Option<GoldAnnotation>, Failure> {
    match path {
        Some(p) => Ok(Some(GoldAnnotation::load(p, kg)?)),
        None if required => Err(usage("--linker gold requires --gold-links")),
        None => Ok(None),
    }
}

fn cmd_index(a: IndexArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let corpus = load_corpus(&a.corpus)?;
    let kg = match a.kg.any() {
        true => Some(a.kg.load(Some("entity caching"))?),
        false => None,
    };
    let index = build_index(&corpus)?;
    for w in index.warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    let cache = kg.map(|kg| DocEntityCache::build(&index, &Gazetteer::build(&kg)));
    let linked = cache.as_ref().map(|c| c.iter().filter(|(_, ids)| !ids.is_empty()).count());
    let artifact = IndexArtifact::from_index(&index, cache);
    write_file(&a.out, &artifact.to_json())?;
    let summary = render::IndexSummary {
        artifact: a.out.display().to_string(),
        documents: index.len(),
        vocabulary: index.model().vocabulary().len(),
        documents_with_entities: linked,
        warnings: index.warnings().len(),
    };
    let text = if a.json {
        format!("{}\n", serde_json::to_string(&summary).expect("summary serializes"))
    } else {
        summary.to_string()
    };
    out.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
}

fn cmd_query(a: QueryArgs, out: &mut dyn Write) -> CmdResult {
    if a.query.trim().is_empty() {
        return Err(usage("query text is empty"));
    }
    let linker = LinkerMode::from(a.linker);
    let relatedness = a.relatedness.mode();
    let why = if linker != LinkerMode::Off {
        Some("entity linking")
    } else if relatedness.is_some() {
        Some("relatedness re-ranking")
    } else {
        None
    };
    let kg = a.kg.load(why)?;
    let gold = load_gold(a.gold_links.as_deref(), &kg, linker == LinkerMode::Gold)?;
    let engine = a.source.engine(kg)?;
    let opts = QueryOptions {
        linker,
        gold: gold.as_ref(),
        expand: a.expand == Toggle::On,
        relatedness,
        k: a.k as usize,
    };
    let record = engine.explain(&a.query_id, &a.query, &opts)?;
    let line = format!("{}\n", serde_json::to_string(&record).expect("record serializes"));
    if let Some(path) = &a.out {
        write_file(path, &line)?;
    }
    let text = if a.json { line } else { render::explanation(&record, &engine) };
    out.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
}

fn emit_report(report: &EvalReport, path: Option<&Path>, json: bool, out: &mut dyn Write) -> CmdResult {
    let jsonl = report.to_jsonl();
    if let Some(p) = path {
        write_file(p, &jsonl)?;
    }
    let text = if json { jsonl } else { report.render_table() };
    out.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))
}

fn cmd_eval_mis(a: EvalMisArgs, out: &mut dyn Write) -> CmdResult {
    let modes: Vec<LinkerMode> = match a.linker {
        Some(l) => vec![l.into()],
        None if a.gold_links.is_some() => vec![LinkerMode::Off, LinkerMode::Gazetteer, LinkerMode::Gold],
        None => vec![LinkerMode::Off, LinkerMode::Gazetteer],
    };
    let needs_kg = modes.iter().any(|m| *m != LinkerMode::Off);
    let kg = a.kg.load(needs_kg.then_some("entity linking"))?;
    let gold = load_gold(a.gold_links.as_deref(), &kg, modes.contains(&LinkerMode::Gold))?;
    let queries = load_queries(&a.queries)?;
    let sentence_gold = SentenceGold::load(&a.sentence_gold)?;
    let engine = a.source.engine(kg)?;
    let mut report: Option<EvalReport> = None;
    for mode in modes {
        let r = run_mis_experiment(&engine, &queries, &sentence_gold, mode, gold.as_ref())?;
        match report.as_mut() {
            Some(acc) => acc.extend(r),
            None => report = Some(r),
        }
    }
    emit_report(&report.expect("at least one mode"), a.out.as_deref(), a.json, out)
}

fn cmd_eval_rerank(a: EvalRerankArgs, out: &mut dyn Write) -> CmdResult {
    let Some(mode) = a.relatedness.mode() else {
        return Err(usage("eval-rerank compares against relatedness order; --relatedness off is not allowed"));
    };
    if a.linker == LinkerArg::Off {
        return Err(usage("eval-rerank needs query entities; --linker off is not allowed"));
    }
    let linker = LinkerMode::from(a.linker);
    let kg = a.kg.load(Some("relatedness re-ranking"))?;
    let gold = load_gold(a.gold_links.as_deref(), &kg, linker == LinkerMode::Gold)?;
    let queries = load_queries(&a.queries)?;
    let qrels = Qrels::load(&a.qrels)?;
    let engine = a.source.engine(kg)?;
    let report = run_rerank_experiment(&engine, &queries, &qrels, a.k as usize, linker, gold.as_ref(), mode)?;
    emit_report(&report, a.out.as_deref(), a.json, out)
}

fn cmd_kg_validate(a: KgValidateArgs, out: &mut dyn Write) -> CmdResult {
    let Some((e, r, g)) = a.kg.given() else {
        return Err(usage("kg-validate needs --kg-entities, --kg-relations and --kg-edges"));
    };
    let parts = KgParts::load(e, r, g)?;
    let mut diagnostics = parts.diagnostics();
    let built = parts.build();
    if let Ok(kg) = &built {
        diagnostics.extend(Gazetteer::build(kg).diagnostics().iter().cloned());
    }
    let mut text = String::new();
    for d in &diagnostics {
        if a.json {
            text.push_str(&serde_json::to_string(d).expect("diagnostic serializes"));
            text.push('\n');
        } else {
            text.push_str(&format!("{d}\n"));
        }
    }
    if let Ok(kg) = &built {
        if !a.json {
            text.push_str(&format!(
                "ok: {} entities, {} relations, {} edges, {} warnings\n",
                kg.node_count(),
                kg.relations().len(),
                kg.edges().len(),
                diagnostics.len()
            ));
        }
    }
    out.write_all(text.as_bytes()).map_err(|e| usage(e.to_string()))?;
    built.map(|_| ()).map_err(Failure::from)
}
