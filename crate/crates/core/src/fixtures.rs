//! Authored and synthetic datasets used by the test suites, the examples
//! and the shipped `fixtures/` directory.
//!
//! * [`demo`]: a small medical / kitchen-measure corpus with a hand-built
//!   graph; exercises every expansion case end to end.
//! * [`disambiguation`]: ambiguous terms whose two senses share a label, so
//!   the gazetteer's collision rule picks the wrong sense for some queries
//!   and gold links fix it.
//! * [`rerank`]: topics where lexical overlap favors off-topic documents
//!   and graph relatedness favors the judged-relevant ones.
//! * [`scale`]: seeded random corpus and graph of configurable size.
//! * [`toy_kg`]: ten nodes with hand-countable in-link sets.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{write_corpus, Document};
use crate::error::Result;
use crate::eval::{Qrels, Query, SentenceGold};
use crate::kg::{Edge, Entity, KnowledgeGraph, RelationType};
use crate::linker::{GoldAnnotation, MentionKind};
use crate::pipeline::Engine;

/// A complete dataset: corpus, graph, queries and every kind of judgment.
#[derive(Debug, Clone, Default)]
pub struct Fixture {
    pub corpus: Vec<Document>,
    pub entities: Vec<Entity>,
    pub relations: Vec<RelationType>,
    pub edges: Vec<Edge>,
    pub queries: Vec<Query>,
    pub gold_links: Vec<(String, MentionKind, String)>,
    pub sentence_gold: SentenceGold,
    pub qrels: Qrels,
}

impl Fixture {
    pub fn kg(&self) -> Result<KnowledgeGraph> {
        KnowledgeGraph::from_records(self.entities.clone(), self.relations.clone(), self.edges.clone())
    }

    /// Gold links as an annotation; queries listed without links are
    /// registered as annotated-empty.
    pub fn gold_annotation(&self) -> GoldAnnotation {
        let mut gold = GoldAnnotation::default();
        for q in &self.queries {
            gold.insert_empty(&q.id);
        }
        for (q, kind, id) in &self.gold_links {
            gold.insert(q, *kind, id);
        }
        gold
    }

    pub fn engine(&self) -> Result<Engine> {
        Engine::build(&self.corpus, self.kg()?)
    }

    /// Writes the dataset in the command-line file formats.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("corpus.jsonl"), write_corpus(&self.corpus))?;

        let mut entities = String::from("# id\tlabel\taliases\tdescription\n");
        for e in &self.entities {
            let _ = writeln!(entities, "{}\t{}\t{}\t{}", e.id, e.label, e.aliases.join("|"), e.description);
        }
        fs::write(dir.join("entities.tsv"), entities)?;

        let mut relations = String::from("# id\tlabel\taliases\n");
        for r in &self.relations {
            let _ = writeln!(relations, "{}\t{}\t{}", r.id, r.label, r.aliases.join("|"));
        }
        fs::write(dir.join("relations.tsv"), relations)?;

        let mut edges = String::from("# source\trelation\ttarget\n");
        for e in &self.edges {
            let _ = writeln!(edges, "{}\t{}\t{}", e.source, e.relation, e.target);
        }
        fs::write(dir.join("edges.tsv"), edges)?;

        let mut queries = String::new();
        for q in &self.queries {
            let _ = writeln!(queries, "{}\t{}", q.id, q.text);
        }
        fs::write(dir.join("queries.tsv"), queries)?;

        if !self.gold_links.is_empty() {
            let mut gold = String::new();
            for (q, kind, id) in &self.gold_links {
                let _ = writeln!(gold, "{q}\t{kind}\t{id}");
            }
            fs::write(dir.join("gold_links.tsv"), gold)?;
        }
        let sentence_gold = self.sentence_gold.to_tsv();
        if !sentence_gold.is_empty() {
            fs::write(dir.join("sentence_gold.tsv"), sentence_gold)?;
        }
        let qrels = self.qrels.to_trec();
        if !qrels.is_empty() {
            fs::write(dir.join("qrels.txt"), qrels)?;
        }
        Ok(())
    }
}

/// Deterministic pronounceable non-word: three consonant-vowel syllables.
/// Distinct `n` below 70^3 give distinct words.
pub fn pseudo_word(n: usize) -> String {
    const C: &[u8] = b"bdfgklmnprstvz";
    const V: &[u8] = b"aeiou";
    let mut n = n;
    let mut w = String::with_capacity(6);
    for _ in 0..3 {
        let s = n % (C.len() * V.len());
        n /= C.len() * V.len();
        w.push(C[s / V.len()] as char);
        w.push(V[s % V.len()] as char);
    }
    w
}

fn entity(id: &str, label: &str, aliases: &[&str], description: &str) -> Entity {
    Entity {
        id: id.into(),
        label: label.into(),
        aliases: aliases.iter().map(|a| a.to_string()).collect(),
        description: description.into(),
    }
}

fn relation(id: &str, label: &str, aliases: &[&str]) -> RelationType {
    RelationType {
        id: id.into(),
        label: label.into(),
        aliases: aliases.iter().map(|a| a.to_string()).collect(),
    }
}

fn query(id: impl Into<String>, text: impl Into<String>) -> Query {
    Query {
        id: id.into(),
        text: text.into(),
    }
}

pub fn demo() -> Fixture {
    let entities = vec![
        entity("Q1072", "heart", &[], "organ that pumps blood through the circulatory system"),
        entity("Q10379", "cardiology", &[], "branch of medicine dealing with disorders of the heart"),
        entity("Q12152", "atherosclerosis", &[], "buildup of plaque inside the arteries"),
        entity("Q12174", "obesity", &[], "medical condition of excess body fat"),
        entity("Q12206", "diabetes", &["diabetes mellitus"], "disorder of blood sugar regulation"),
        entity("Q1413142", "teaspoon", &[], "unit of volume equal to about 5 millilitres"),
        entity("Q1572297", "tablespoon", &[], "unit of volume equal to about 15 millilitres"),
        entity("Q1302471", "unit of volume", &[], "unit for measuring capacity"),
        entity("Q190805", "heart disease", &["cardiopathy", "heart condition"], "class of diseases that involve the heart or blood vessels"),
        entity("Q389735", "cardiovascular disease", &[], "disease of the heart or blood vessels"),
        entity("Q41861", "hypertension", &["high blood pressure"], "long term elevated arterial pressure"),
        entity("Q662860", "smoking", &["tobacco smoking"], "inhaling the smoke of burning tobacco"),
        entity("Q81041", "cholesterol", &[], "sterol carried in the blood"),
    ];
    let relations = vec![
        relation("P1479", "contributing factor", &["cause", "risk factor"]),
        relation("P279", "subclass of", &["type of"]),
        relation("P2579", "studied by", &[]),
        relation("P1552", "has quality", &[]),
    ];
    let e = Edge::new;
    let edges = vec![
        e("Q190805", "P1479", "Q12174"),
        e("Q190805", "P1479", "Q12152"),
        e("Q41861", "P1479", "Q662860"),
        e("Q190805", "P279", "Q389735"),
        e("Q12152", "P279", "Q389735"),
        e("Q41861", "P279", "Q389735"),
        e("Q190805", "P2579", "Q10379"),
        e("Q12152", "P2579", "Q10379"),
        e("Q10379", "P1552", "Q1072"),
        e("Q10379", "P1552", "Q190805"),
        e("Q10379", "P1552", "Q12152"),
        e("Q10379", "P1552", "Q41861"),
        e("Q389735", "P1552", "Q12152"),
        e("Q389735", "P1552", "Q190805"),
        e("Q12174", "P1552", "Q12206"),
        e("Q12174", "P1552", "Q81041"),
        e("Q12152", "P1552", "Q81041"),
        e("Q1413142", "P279", "Q1302471"),
        e("Q1572297", "P279", "Q1302471"),
        e("Q1302471", "P1552", "Q1413142"),
        e("Q1302471", "P1552", "Q1572297"),
    ];
    let corpus = vec![
        Document::new(
            "d01",
            "Heart disease kills more people than any other illness. Obesity and atherosclerosis are major contributing factors to heart disease. Regular exercise lowers the risk.",
        )
        .with_title("Heart disease"),
        Document::new(
            "d02",
            "Atherosclerosis is the buildup of plaque inside the arteries. Plaque narrows the arteries and restricts blood flow. It often leads to heart disease.",
        )
        .with_title("Atherosclerosis"),
        Document::new(
            "d03",
            "Obesity is an excess of body fat. It raises blood pressure and cholesterol. Diet and exercise can reduce obesity.",
        )
        .with_title("Obesity"),
        Document::new(
            "d04",
            "The tablespoon has been used since the Middle Ages. A tablespoon is a large spoon used for serving food. The capacity of a tablespoon is about 15 millilitres.",
        )
        .with_title("Tablespoon"),
        Document::new(
            "d05",
            "A teaspoon is a small spoon for stirring drinks. The capacity of a teaspoon is about 5 millilitres. Three teaspoons make one tablespoon.",
        )
        .with_title("Teaspoon"),
        Document::new(
            "d06",
            "The heart is a muscular organ that pumps blood. It has four chambers. The heart beats about 100000 times a day.",
        )
        .with_title("Heart"),
        Document::new(
            "d07",
            "Hypertension is persistently high blood pressure. Smoking is a contributing factor to hypertension. Untreated hypertension damages the heart.",
        )
        .with_title("Hypertension"),
        Document::new(
            "d08",
            "Smoking damages the lining of the arteries. Smokers have a higher risk of heart disease. Quitting smoking lowers that risk within a year.",
        )
        .with_title("Smoking"),
    ];
    let queries = vec![
        query("q1", "cause of heart disease"),
        query("q2", "capacity of a tablespoon"),
        query("q3", "what pumps blood"),
        query("q4", "obesity and atherosclerosis"),
        query("q5", "how much does a teaspoon hold"),
    ];
    let gold_links = vec![
        ("q1".into(), MentionKind::Entity, "Q190805".into()),
        ("q1".into(), MentionKind::Relation, "P1479".into()),
        ("q2".into(), MentionKind::Entity, "Q1572297".into()),
        ("q3".into(), MentionKind::Entity, "Q1072".into()),
        ("q4".into(), MentionKind::Entity, "Q12174".into()),
        ("q4".into(), MentionKind::Entity, "Q12152".into()),
        ("q5".into(), MentionKind::Entity, "Q1413142".into()),
    ];
    let mut sentence_gold = SentenceGold::default();
    sentence_gold.insert("q1", "d01", 1);
    sentence_gold.insert("q2", "d04", 2);
    sentence_gold.insert("q3", "d06", 0);
    sentence_gold.insert("q4", "d01", 1);
    sentence_gold.insert("q5", "d05", 1);
    let mut qrels = Qrels::default();
    for (q, d, g) in [
        ("q1", "d01", 2),
        ("q1", "d02", 1),
        ("q1", "d03", 1),
        ("q1", "d08", 1),
        ("q1", "d05", 0),
        ("q2", "d04", 2),
        ("q2", "d05", 1),
        ("q3", "d06", 2),
        ("q4", "d01", 2),
        ("q4", "d02", 1),
        ("q4", "d03", 1),
        ("q5", "d05", 2),
        ("q5", "d04", 1),
    ] {
        qrels.insert(q, d, g);
    }
    Fixture {
        corpus,
        entities,
        relations,
        edges,
        queries,
        gold_links,
        sentence_gold,
        qrels,
    }
}

const AMBIGUOUS_TERMS: [&str; 24] = [
    "mercury", "jaguar", "python", "java", "amazon", "apple", "bass", "crane", "bat", "seal", "mole", "pitch",
    "spring", "bank", "rock", "turkey", "mars", "saturn", "orange", "date", "palm", "lead", "tank", "bolt",
];

/// Queries whose intended sense is the second one and whose wording gives
/// no lexical hint of it: only gold links retrieve the right sentence.
const DISAMBIGUATION_HIDDEN: usize = 2;
/// Queries naming one word of the second sense: plain retrieval gets them
/// right, expansion with the wrong sense drowns that word out.
const DISAMBIGUATION_HINTED: usize = 3;

/// One document per ambiguous term. Sentence 0 describes the first sense
/// (smaller id, so the gazetteer prefers it) and sentence 1 the second;
/// each entity description repeats its sentence's distinctive words.
pub fn disambiguation() -> Fixture {
    let mut fx = Fixture {
        relations: vec![relation("P31", "instance of", &[])],
        ..Fixture::default()
    };
    for (i, term) in AMBIGUOUS_TERMS.iter().enumerate() {
        let words = |offset: usize, n: usize| -> Vec<String> { (0..n).map(|j| pseudo_word(1000 + i * 16 + offset + j)).collect() };
        let first = words(0, 3);
        let second = words(3, 4);
        let categories = words(8, 2);
        let (s1, s2) = (format!("A{:02}1", i + 1), format!("A{:02}2", i + 1));
        let (c1, c2) = (format!("C{:02}1", i + 1), format!("C{:02}2", i + 1));
        fx.entities.push(entity(&s1, term, &[], &first.join(" ")));
        fx.entities.push(entity(&s2, term, &[], &second.join(" ")));
        fx.entities.push(entity(&c1, &categories[0], &[], ""));
        fx.entities.push(entity(&c2, &categories[1], &[], ""));
        fx.edges.push(Edge::new(&s1, "P31", &c1));
        fx.edges.push(Edge::new(&s2, "P31", &c2));

        let doc = format!("m{:02}", i + 1);
        fx.corpus.push(Document::new(
            &doc,
            format!("The {term} is {}. The {term} is also {}.", first.join(" "), second.join(" ")),
        ));

        let qid = format!("m{:02}", i + 1);
        let (text, sense, sentence) = if i < DISAMBIGUATION_HIDDEN {
            (format!("what is {term}"), &s2, 1)
        } else if i < DISAMBIGUATION_HIDDEN + DISAMBIGUATION_HINTED {
            (format!("{term} {}", second[0]), &s2, 1)
        } else {
            (format!("tell me about {term}"), &s1, 0)
        };
        fx.queries.push(query(&qid, text));
        fx.gold_links.push((qid.clone(), MentionKind::Entity, sense.clone()));
        fx.sentence_gold.insert(&qid, &doc, sentence);
        fx.qrels.insert(&qid, &doc, 1);
    }
    fx
}

pub const RERANK_TOPICS: usize = 24;

/// Five documents per topic. The two relevant ones mention the query
/// entity's graph neighbors but few query words; the off-topic ones repeat
/// the query words next to unrelated entities.
pub fn rerank() -> Fixture {
    let mut fx = Fixture {
        relations: vec![relation("P921", "main subject", &[])],
        ..Fixture::default()
    };
    for t in 0..RERANK_TOPICS {
        let w = |j: usize| pseudo_word(20000 + t * 32 + j);
        let id = |s: &str| format!("T{:02}{s}", t + 1);
        let (w1, w2) = (w(0), w(1));
        let labels: Vec<String> = (2..8).map(w).collect();
        let names = ["E", "R1", "R2", "R3", "U1", "U2"];
        for (name, label) in names.iter().zip(&labels) {
            fx.entities.push(entity(&id(name), label, &[], ""));
        }
        let hubs = ["H1", "H2", "H3", "H4", "G1", "G2", "G3"];
        for (j, h) in hubs.iter().enumerate() {
            fx.entities.push(entity(&id(h), &w(10 + j), &[], ""));
        }
        for (hub, targets) in [
            ("H1", &["E", "R1", "R3"][..]),
            ("H2", &["E", "R1", "R2", "R3"]),
            ("H3", &["E", "R1", "R2"]),
            ("H4", &["E", "R2"]),
            ("G1", &["U1"]),
            ("G2", &["U1", "U2"]),
            ("G3", &["U2"]),
        ] {
            for target in targets {
                fx.edges.push(Edge::new(&id(hub), "P921", &id(target)));
            }
        }
        let [e, r1, r2, r3, u1, u2] = [0, 1, 2, 3, 4, 5].map(|i| labels[i].as_str());
        let filler = |j: usize| pseudo_word(20000 + t * 32 + 20 + j);
        let docs = [
            format!(
                "{e} is closely tied to {r1} and {r2}. Work on {r1} often cites {w1}. It is described as {}.",
                filler(0)
            ),
            format!("{r1} and {r3} share a common origin. Some reports connect them with {w2}. Both remain {}.", filler(1)),
            format!("{e} {w1} and {w2} appear together in {u1} listings. The {w1} {w2} index covers {e} entries."),
            format!("{w1} and {w2} are recorded in {u1} and {u2} catalogs. The catalogs are {}.", filler(2)),
            format!("{u2} notes mention {w1} once. The notes are {}.", filler(3)),
        ];
        for (k, text) in docs.into_iter().enumerate() {
            fx.corpus.push(Document::new(format!("r{:02}{}", t + 1, (b'a' + k as u8) as char), text));
        }
        let qid = format!("r{:02}", t + 1);
        fx.queries.push(query(&qid, format!("{e} {w1} {w2}")));
        fx.gold_links.push((qid.clone(), MentionKind::Entity, id("E")));
        for (suffix, grade) in [('a', 2), ('b', 1), ('c', 0), ('d', 0)] {
            fx.qrels.insert(&qid, &format!("{qid}{suffix}"), grade);
        }
    }
    fx
}

/// Seeded random dataset: `docs` documents of about 200 tokens in 12
/// sentences, each mentioning a few graph entities, and `queries` queries
/// built from words of one source document, judged relevant for it.
pub fn scale(docs: usize, queries: usize, seed: u64) -> Fixture {
    const VOCAB: usize = 4000;
    const ENTITIES: usize = 400;
    const HUBS: usize = 80;
    const SENTENCES: usize = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = (0..VOCAB).map(pseudo_word).collect();
    let mut fx = Fixture {
        relations: vec![relation("P1", "links to", &[])],
        ..Fixture::default()
    };
    let entity_label = |i: usize| pseudo_word(VOCAB + i);
    for i in 0..ENTITIES {
        fx.entities.push(entity(&format!("E{i:04}"), &entity_label(i), &[], &format!("{} {}", vocab[i], vocab[i + 1])));
    }
    for h in 0..HUBS {
        fx.entities.push(entity(&format!("H{h:03}"), &pseudo_word(VOCAB + ENTITIES + h), &[], ""));
    }
    for i in 0..ENTITIES {
        let n = rng.gen_range(2..=6);
        for h in rand::seq::index::sample(&mut rng, HUBS, n) {
            fx.edges.push(Edge::new(&format!("H{h:03}"), "P1", &format!("E{i:04}")));
        }
    }

    let mut sources = Vec::with_capacity(docs);
    for d in 0..docs {
        let mut sentences = Vec::with_capacity(SENTENCES);
        let mut mentioned = Vec::new();
        for s in 0..SENTENCES {
            let len = rng.gen_range(14..=18);
            let mut words: Vec<String> = (0..len).map(|_| vocab[rng.gen_range(0..VOCAB)].clone()).collect();
            if s % 3 == 0 {
                let e = rng.gen_range(0..ENTITIES);
                mentioned.push(e);
                words.insert(rng.gen_range(0..words.len()), entity_label(e));
            }
            sentences.push(words);
        }
        let text = sentences.iter().map(|w| format!("{}.", w.join(" "))).collect::<Vec<_>>().join(" ");
        fx.corpus.push(Document::new(format!("s{d:04}"), text));
        sources.push((sentences, mentioned));
    }
    for q in 0..queries {
        let d = rng.gen_range(0..docs);
        let (sentences, mentioned) = &sources[d];
        let s = rng.gen_range(0..SENTENCES);
        let mut words: Vec<String> = sentences[s].choose_multiple(&mut rng, 3).cloned().collect();
        let e = *mentioned.choose(&mut rng).expect("every document mentions an entity");
        words.push(entity_label(e));
        let qid = format!("s{q:03}");
        fx.queries.push(query(&qid, words.join(" ")));
        fx.sentence_gold.insert(&qid, &format!("s{d:04}"), s);
        fx.qrels.insert(&qid, &format!("s{d:04}"), 1);
    }
    fx
}

/// Ten nodes `n0`..`n9` with a single relation. `n0` and `n1` have three
/// in-links each, two of them shared (`n3`, `n4`).
///
/// ```text
/// in(n0) = {n2, n3, n4}      in(n5) = {n0}
/// in(n1) = {n3, n4, n5}      in(n6) = {n2, n7}
/// in(n2) = {n8}              in(n7) = {n5, n6, n9}
/// in(n3) = {}                in(n8) = {n6, n9}
/// in(n4) = {n9}              in(n9) = {n8}
/// ```
pub fn toy_kg() -> KnowledgeGraph {
    let entities = (0..10).map(|i| entity(&format!("n{i}"), &format!("node {i}"), &[], "")).collect();
    let pairs = [
        (2, 0),
        (3, 0),
        (4, 0),
        (3, 1),
        (4, 1),
        (5, 1),
        (8, 2),
        (9, 4),
        (0, 5),
        (2, 6),
        (7, 6),
        (5, 7),
        (6, 7),
        (9, 7),
        (6, 8),
        (9, 8),
        (8, 9),
    ];
    let edges = pairs
        .iter()
        .map(|(s, t)| Edge::new(&format!("n{s}"), "r", &format!("n{t}")))
        .collect();
    KnowledgeGraph::from_records(entities, vec![relation("r", "links to", &[])], edges).expect("toy graph is valid")
}
