mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

use kgxir::corpus::{read_corpus, write_corpus, Document};
use kgxir::eval::metrics::{average_precision_at_k, ndcg_at_k, precision_recall};
use kgxir::eval::Qrels;
use kgxir::expansion::{classify, expand, ExpansionCase, DESCRIPTION_TOKEN_CAP};
use kgxir::fixtures;
use kgxir::kg::{Edge, Entity, KnowledgeGraph, RelatednessMode, RelationType};
use kgxir::linker::{LinkedMention, LinkerMode, MentionKind};
use kgxir::pipeline::{ExplanationRecord, QueryOptions};
use kgxir::rerank::{qdr, rerank, DocEntityCache};
use kgxir::retrieval::{build_index, ScoredDoc};
use kgxir::text::{cosine, split_sentences, tokenize, Embedder, EmbeddingVector};

fn words() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "heart", "disease", "obesity", "spoon", "blood", "the", "of", "a", "risk", "Émile", "ÇA", "x1", "42",
    ])
    .prop_map(String::from)
}

fn sentence_text() -> impl Strategy<Value = String> {
    vec((words(), prop::sample::select(vec![" ", "  ", ". ", "! ", "? ", ", ", "-", "\n"])), 0..20)
        .prop_map(|parts| parts.into_iter().map(|(w, sep)| format!("{w}{sep}")).collect())
}

fn graph(n: usize, edges: &[(usize, usize)]) -> KnowledgeGraph {
    let entities = (0..n)
        .map(|i| Entity {
            id: format!("e{i}"),
            label: format!("label {i}"),
            aliases: vec![],
            description: String::new(),
        })
        .collect();
    let edges = edges
        .iter()
        .map(|(s, t)| Edge::new(&format!("e{s}"), "r", &format!("e{t}")))
        .collect();
    let rel = RelationType {
        id: "r".into(),
        label: "r".into(),
        aliases: vec![],
    };
    KnowledgeGraph::from_records(entities, vec![rel], edges).unwrap()
}

fn small_graph() -> impl Strategy<Value = (usize, BTreeSet<(usize, usize)>)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), btree_set((0..n, 0..n), 0..=n * n)))
}

proptest! {
    #[test]
    fn tokenize_is_idempotent(text in ".{0,60}") {
        let once: Vec<String> = tokenize(&text).into_iter().map(|t| t.into_string()).collect();
        let twice: Vec<String> = tokenize(&once.join(" ")).into_iter().map(|t| t.into_string()).collect();
        prop_assert_eq!(&once, &twice);
        for t in &once {
            prop_assert!(!t.is_empty());
            prop_assert!(t.chars().all(char::is_alphanumeric));
        }
    }

    #[test]
    fn sentence_spans_cover_text(text in sentence_text()) {
        let spans = split_sentences(&text);
        let mut cursor = 0;
        for (i, s) in spans.iter().enumerate() {
            prop_assert_eq!(s.index, i);
            prop_assert!(s.start < s.end);
            prop_assert!(text[cursor..s.start].chars().all(char::is_whitespace));
            cursor = s.end;
        }
        prop_assert!(text[cursor..].chars().all(char::is_whitespace));
    }

    #[test]
    fn embeddings_are_unit_or_zero(docs in vec(sentence_text(), 1..6), probe in sentence_text()) {
        let corpus: Vec<Document> = docs.iter().enumerate().map(|(i, t)| Document::new(format!("d{i}"), t.clone())).collect();
        let index = build_index(&corpus).unwrap();
        let v = index.embed(&probe);
        let n = v.norm();
        prop_assert!(v.is_zero() || (n - 1.0).abs() < 1e-12);
        for d in index.documents() {
            let c = cosine(&v, &d.vector).unwrap();
            prop_assert_eq!(c, cosine(&d.vector, &v).unwrap());
            prop_assert!((-1.0..=1.0).contains(&c));
            if !d.vector.is_zero() {
                prop_assert!((cosine(&d.vector, &d.vector).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dense_cosine_is_symmetric(a in vec(-5.0f64..5.0, 6), b in vec(-5.0f64..5.0, 6)) {
        let (va, vb) = (EmbeddingVector::from_dense(&a), EmbeddingVector::from_dense(&b));
        let ab = cosine(&va, &vb).unwrap();
        prop_assert_eq!(ab, cosine(&vb, &va).unwrap());
        prop_assert!((-1.0..=1.0).contains(&ab));
        prop_assert!((ab - common::cosine(&va, &vb)).abs() < 1e-12);
    }

    #[test]
    fn retrieval_prefixes_and_order(docs in vec(sentence_text(), 1..8), query in sentence_text(), k in 1usize..10) {
        let corpus: Vec<Document> = docs.iter().enumerate().map(|(i, t)| Document::new(format!("d{i}"), t.clone())).collect();
        let index = build_index(&corpus).unwrap();
        let top = index.retrieve(&query, k);
        let more = index.retrieve(&query, k + 1);
        prop_assert_eq!(top.len(), k.min(corpus.len()));
        prop_assert_eq!(&more[..top.len()], &top[..]);
        for w in top.windows(2) {
            prop_assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].doc_id < w[1].doc_id));
        }
        for (i, d) in top.iter().enumerate() {
            prop_assert_eq!(d.rank, i + 1);
        }
    }

    #[test]
    fn relatedness_symmetric_bounded_reflexive((n, edges) in small_graph()) {
        let edges: Vec<_> = edges.into_iter().collect();
        let kg = graph(n, &edges);
        for a in 0..n {
            let a_id = format!("e{a}");
            let has_in = !kg.in_links(&a_id).unwrap().is_empty();
            if has_in {
                prop_assert_eq!(kg.relatedness(&a_id, &a_id, RelatednessMode::Complement).unwrap(), 1.0);
            }
            for b in 0..n {
                let b_id = format!("e{b}");
                for mode in [RelatednessMode::Raw, RelatednessMode::Complement] {
                    let ab = kg.relatedness(&a_id, &b_id, mode).ok();
                    let ba = kg.relatedness(&b_id, &a_id, mode).ok();
                    prop_assert_eq!(ab, ba);
                }
                let c = kg.relatedness(&a_id, &b_id, RelatednessMode::Complement).unwrap();
                prop_assert!((0.0..=1.0).contains(&c));
            }
        }
    }

    #[test]
    fn shared_in_link_never_lowers_relatedness((n, edges) in small_graph()) {
        let base: Vec<_> = edges.iter().copied().collect();
        let kg = graph(n, &base);
        for a in 0..n {
            for b in 0..n {
                let (a_id, b_id) = (format!("e{a}"), format!("e{b}"));
                let before = kg.relatedness(&a_id, &b_id, RelatednessMode::Complement).unwrap();
                for s in 0..n {
                    if edges.contains(&(s, a)) || !edges.contains(&(s, b)) {
                        continue;
                    }
                    let mut more = base.clone();
                    more.push((s, a));
                    let after = graph(n, &more).relatedness(&a_id, &b_id, RelatednessMode::Complement).unwrap();
                    prop_assert!(after >= before - 1e-12, "e{}->e{}: {} < {}", s, a, after, before);
                }
            }
        }
    }

    #[test]
    fn qdr_ignores_order_and_duplicates(
        q in vec(0usize..10, 0..5),
        d in vec(0usize..10, 0..6),
        seed in any::<u64>(),
    ) {
        let kg = fixtures::toy_kg();
        let ids = |v: &[usize]| -> Vec<String> { v.iter().map(|i| format!("n{i}")).collect() };
        let (qv, dv) = (ids(&q), ids(&d));
        let base = qdr(&qv, &dv, &kg, RelatednessMode::Complement).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let (mut qs, mut ds) = (qv.clone(), dv.clone());
        rand::seq::SliceRandom::shuffle(&mut qs[..], &mut rng);
        rand::seq::SliceRandom::shuffle(&mut ds[..], &mut rng);
        qs.extend(qv.iter().take(1).cloned());
        ds.extend(dv.iter().take(2).cloned());
        prop_assert_eq!(qdr(&qs, &ds, &kg, RelatednessMode::Complement).unwrap(), base.clone());
        prop_assert!(base.value >= 0.0);
        let distinct_q: BTreeSet<_> = qv.iter().collect();
        prop_assert!(base.value <= distinct_q.len() as f64 + 1e-12);
    }

    #[test]
    fn rerank_is_a_stable_permutation(
        doc_entities in vec(vec(0usize..10, 0..4), 1..15),
        query in vec(0usize..10, 0..3),
    ) {
        let kg = fixtures::toy_kg();
        let candidates: Vec<ScoredDoc> = (0..doc_entities.len())
            .map(|i| ScoredDoc { doc_id: format!("d{i:02}"), score: 1.0 / (i + 1) as f64, rank: i + 1 })
            .collect();
        let cache = DocEntityCache::from_map(
            doc_entities
                .iter()
                .enumerate()
                .map(|(i, es)| (format!("d{i:02}"), es.iter().map(|e| format!("n{e}")).collect()))
                .collect(),
        );
        let query: Vec<String> = query.iter().map(|e| format!("n{e}")).collect();
        let out = rerank(&candidates, &query, &kg, &cache, RelatednessMode::Complement).unwrap();
        let before: BTreeSet<_> = candidates.iter().map(|c| c.doc_id.clone()).collect();
        let after: BTreeSet<_> = out.iter().map(|d| d.doc_id.clone()).collect();
        prop_assert_eq!(out.len(), candidates.len());
        prop_assert_eq!(before, after);
        for (i, d) in out.iter().enumerate() {
            prop_assert_eq!(d.rank, i + 1);
        }
        for w in out.windows(2) {
            prop_assert!(
                w[0].qdr.value > w[1].qdr.value
                    || (w[0].qdr.value == w[1].qdr.value && w[0].embedding_rank < w[1].embedding_rank)
            );
        }
        let retrieved: Vec<&str> = out.iter().map(|d| d.doc_id.as_str()).collect();
        let original: Vec<&str> = candidates.iter().map(|d| d.doc_id.as_str()).collect();
        let relevant: BTreeSet<String> = retrieved.iter().step_by(2).map(|s| s.to_string()).collect();
        prop_assert_eq!(precision_recall(&retrieved, &relevant), precision_recall(&original, &relevant));
    }

    #[test]
    fn expansion_respects_case_rules(pick in vec((0usize..13, any::<bool>()), 0..4), rel in prop::option::of(0usize..4)) {
        let fx = fixtures::demo();
        let kg = fx.kg().unwrap();
        let mut mentions: Vec<LinkedMention> = pick
            .iter()
            .filter(|(_, keep)| *keep)
            .map(|(i, _)| {
                let e = &kg.entities()[*i];
                LinkedMention { start: 0, end: 0, surface: e.label.clone(), kind: MentionKind::Entity, id: e.id.clone() }
            })
            .collect();
        if let Some(r) = rel {
            let r = &kg.relations()[r];
            mentions.push(LinkedMention { start: 0, end: 0, surface: r.label.clone(), kind: MentionKind::Relation, id: r.id.clone() });
        }
        let e = expand("some query", &mentions, &kg).unwrap();
        prop_assert_eq!(&e.original, "some query");
        prop_assert!(e.text().starts_with("some query"));
        prop_assert!(e.entity_ids.windows(2).all(|w| w[0] < w[1]));
        let entity_refs: Vec<&str> = e.entity_ids.iter().map(String::as_str).collect();
        match e.case {
            ExpansionCase::Neighbors => {
                prop_assert!(!e.entity_ids.is_empty() && !e.relation_ids.is_empty());
                let mut neighbors = BTreeSet::new();
                for ent in &e.entity_ids {
                    for r in &e.relation_ids {
                        for n in kg.neighbors(ent, Some(r)).unwrap() {
                            neighbors.insert(kg.entity(n).unwrap().label.clone());
                        }
                    }
                }
                for t in &e.appended_terms {
                    prop_assert!(neighbors.contains(t));
                }
            }
            ExpansionCase::Description => {
                prop_assert_eq!(e.entity_ids.len(), 1);
                prop_assert!(e.appended_terms.len() <= DESCRIPTION_TOKEN_CAP);
            }
            ExpansionCase::EntityLabels => {
                prop_assert!(e.entity_ids.len() >= 2);
                let labels: Vec<String> = e.entity_ids.iter().map(|id| kg.entity(id).unwrap().label.clone()).collect();
                prop_assert_eq!(&e.appended_terms, &labels);
            }
            ExpansionCase::Unexpanded => {
                prop_assert!(e.entity_ids.is_empty());
                prop_assert!(e.appended_terms.is_empty());
            }
        }
        if e.case != ExpansionCase::Neighbors {
            prop_assert_eq!(e.case, classify(&entity_refs, &[]));
        }
        prop_assert_eq!(expand("some query", &mentions, &kg).unwrap(), e);
    }

    #[test]
    fn metrics_bounded_and_cut_at_k(
        grades in vec(0u32..4, 1..8),
        order in any::<u64>(),
        k in 1usize..8,
    ) {
        let docs: Vec<String> = (0..grades.len()).map(|i| format!("d{i}")).collect();
        let g: BTreeMap<String, u32> = docs.iter().cloned().zip(grades.iter().copied()).collect();
        let relevant: BTreeSet<String> = g.iter().filter(|(_, v)| **v >= 1).map(|(d, _)| d.clone()).collect();
        let mut ranking = docs.clone();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(order);
        rand::seq::SliceRandom::shuffle(&mut ranking[..], &mut rng);
        let ap = average_precision_at_k(&ranking, &relevant, k);
        let nd = ndcg_at_k(&ranking, &g, k);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ap));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&nd));
        // reorder everything below rank k
        if ranking.len() > k {
            let mut tail = ranking.clone();
            tail[k..].reverse();
            prop_assert_eq!(average_precision_at_k(&tail, &relevant, k), ap);
            prop_assert_eq!(ndcg_at_k(&tail, &g, k), nd);
        }
        let mut sorted = docs.clone();
        sorted.sort_by_key(|d| std::cmp::Reverse(g[d]));
        if g.values().any(|v| *v > 0) {
            prop_assert!((ndcg_at_k(&sorted, &g, k) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qrels_and_corpus_round_trip(
        judgments in vec(("[a-z]{1,3}", "[a-z0-9]{1,4}", 0u32..5), 0..20),
        texts in vec(".{0,40}", 1..5),
    ) {
        let mut qrels = Qrels::default();
        for (q, d, g) in &judgments {
            qrels.insert(q, d, *g);
        }
        prop_assert_eq!(Qrels::read(qrels.to_trec().as_bytes(), "q").unwrap(), qrels);
        let docs: Vec<Document> = texts.iter().enumerate().map(|(i, t)| Document::new(format!("d{i}"), t.clone())).collect();
        prop_assert_eq!(read_corpus(write_corpus(&docs).as_bytes(), "c").unwrap(), docs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn explanation_records_round_trip_and_audit(
        qi in 0usize..5,
        linker in prop::sample::select(vec![LinkerMode::Off, LinkerMode::Gazetteer, LinkerMode::Gold]),
        expand_on in any::<bool>(),
        relatedness in prop::option::of(Just(RelatednessMode::Complement)),
        k in 1usize..10,
    ) {
        let fx = fixtures::demo();
        let engine = fx.engine().unwrap();
        let gold = fx.gold_annotation();
        let q = &fx.queries[qi];
        let opts = QueryOptions { linker, gold: Some(&gold), expand: expand_on, relatedness, k };
        let r = engine.explain(&q.id, &q.text, &opts).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: ExplanationRecord = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &r);
        let shown: Vec<&str> = r.docs.iter().map(|d| d.doc_id.as_str()).collect();
        prop_assert_eq!(r.recomputed_order(), shown);
        for d in &r.docs {
            let m = d.mis.as_ref().unwrap();
            let doc = engine.index.document(&d.doc_id).unwrap();
            prop_assert_eq!(m.text.as_str(), doc.sentence_text(m.index).unwrap());
            let sentence = engine.index.model().embed(&m.text);
            prop_assert_eq!(m.score, cosine(&engine.index.embed(&r.expanded_text), &sentence).unwrap());
        }
    }

    #[test]
    fn gazetteer_mentions_are_ordered_and_known(text in vec(prop::sample::select(vec![
        "heart", "disease", "cause", "of", "obesity", "high", "blood", "pressure", "tablespoon", "unit", "volume", "and",
    ]), 0..12)) {
        let engine = fixtures::demo().engine().unwrap();
        let text = text.join(" ");
        let mentions = engine.gazetteer.link(&text);
        for w in mentions.windows(2) {
            prop_assert!(w[0].end <= w[1].start);
        }
        for m in &mentions {
            prop_assert!(m.start < m.end);
            let known = match m.kind {
                MentionKind::Entity => engine.kg.contains_entity(&m.id),
                MentionKind::Relation => engine.kg.contains_relation(&m.id),
            };
            prop_assert!(known);
            prop_assert_eq!(&text[m.start..m.end], m.surface.as_str());
        }
    }
}
