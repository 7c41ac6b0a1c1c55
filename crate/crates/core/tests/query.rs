mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use sdskg::graph::vocab::{ghs, safed, skos};
use sdskg::graph::{evaluate_query, Graph, Literal, Term, Triple};
use sdskg::ingest::compound_iri;
use sdskg::store::{compound_hazards_query, COMPOUND_HAZARDS_QUERY};

type Row = (Term, Term, Term);

/// Nested-loop join over every triple for the three patterns, then the
/// language filter.
fn oracle(g: &Graph, compound: &str, language: &str) -> BTreeSet<Row> {
    let triples: Vec<Triple> = g.iter().collect();
    let mut out = BTreeSet::new();
    for a in &triples {
        if a.subject != Term::Iri(compound.into()) || a.predicate != Term::Iri(safed::CLASSIFICATION_PROP.into()) {
            continue;
        }
        for b in &triples {
            if b.subject != a.object || b.predicate != Term::Iri(skos::PREF_LABEL.into()) {
                continue;
            }
            for c in &triples {
                if c.subject != a.object || c.predicate != Term::Iri(safed::LABEL_DISPLAY.into()) {
                    continue;
                }
                let lang = b.object.as_literal().and_then(Literal::language).unwrap_or("");
                if lang == language {
                    out.insert((a.object.clone(), b.object.clone(), c.object.clone()));
                }
            }
        }
    }
    out
}

fn run(g: &Graph, compound: &str, language: &str) -> BTreeSet<Row> {
    let sol = evaluate_query(g, &compound_hazards_query(compound, language)).unwrap();
    assert_eq!(sol.variables, ["hazard", "prefLabel", "labelDisplay"]);
    let rows: Vec<Row> = sol.rows.into_iter().map(|r| (r[0].clone(), r[1].clone(), r[2].clone())).collect();
    let set: BTreeSet<Row> = rows.iter().cloned().collect();
    assert_eq!(set.len(), rows.len(), "duplicate rows");
    set
}

#[test]
fn query_text_is_fixed() {
    assert!(COMPOUND_HAZARDS_QUERY.starts_with("SELECT ?hazard ?prefLabel ?labelDisplay\nWHERE {"));
    assert!(COMPOUND_HAZARDS_QUERY.contains("  <E> safed:classification ?hazard ."));
    assert!(COMPOUND_HAZARDS_QUERY.contains("FILTER (lang(?prefLabel) = \"en\")"));
    let bound = compound_hazards_query("https://example.org/c", "en");
    assert_eq!(bound, COMPOUND_HAZARDS_QUERY.replace("<E>", "<https://example.org/c>"));
}

#[test]
fn store_query_matches_nested_loop_join() {
    let store = common::loaded_store();
    let mut compounds: BTreeSet<String> = BTreeSet::new();
    for r in store.records() {
        compounds.insert(compound_iri(&r.compound_name));
        compounds.extend(r.ingredients.iter().map(|i| compound_iri(&i.name)));
    }
    let mut non_empty = 0;
    for c in &compounds {
        for lang in ["en", "de"] {
            let got = run(store.graph(), c, lang);
            assert_eq!(got, oracle(store.graph(), c, lang), "{c} {lang}");
            assert_eq!(store.compound_hazards(c, lang).unwrap().rows.len(), got.len());
            if !got.is_empty() {
                non_empty += 1;
            }
        }
    }
    assert!(non_empty >= 6, "{non_empty}");
}

#[test]
fn english_filter_drops_other_languages() {
    let store = common::loaded_store();
    let c = compound_iri("Acetomenophin 400");
    let en = run(store.graph(), &c, "en");
    let de = run(store.graph(), &c, "de");
    assert!(!en.is_empty() && !de.is_empty());
    for (_, label, _) in &en {
        assert_eq!(label.as_literal().unwrap().language(), Some("en"));
    }
    // Same hazards in both languages, different labels.
    let hazards = |rows: &BTreeSet<Row>| rows.iter().map(|r| r.0.clone()).collect::<BTreeSet<_>>();
    assert_eq!(hazards(&en), hazards(&de));
    assert!(en.is_disjoint(&de));
    // The mixture rule contributes the eye irritation class.
    assert!(hazards(&en).contains(&Term::Iri(ghs::EYE_IRRIT_CAT_2A.into())));
}

#[test]
fn unknown_compound_has_no_rows() {
    let store = common::loaded_store();
    assert!(run(store.graph(), "https://example.org/nothing", "en").is_empty());
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    let iri = |kind: &'static str, n: u8| Term::Iri(format!("https://example.org/{kind}/{n}"));
    prop::collection::vec((0u8..4, 0u8..3, 0u8..6, 0u8..3), 0..40).prop_map(move |edges| {
        let mut g = Graph::new().with_standard_prefixes();
        for (c, kind, h, lang) in edges {
            let hazard = iri("h", h);
            let t = match kind {
                0 => Triple::new(iri("c", c), Term::Iri(safed::CLASSIFICATION_PROP.into()), hazard),
                1 => {
                    let label = match lang {
                        0 => Literal::lang(format!("label {h}/{c}"), "en").unwrap(),
                        1 => Literal::lang(format!("Bez {h}/{c}"), "de").unwrap(),
                        _ => Literal::string(format!("plain {h}")),
                    };
                    Triple::new(hazard, Term::Iri(skos::PREF_LABEL.into()), Term::Literal(label))
                }
                _ => Triple::new(hazard, Term::Iri(safed::LABEL_DISPLAY.into()), Term::string(format!("H{h}{c}"))),
            };
            g.insert(t.unwrap());
        }
        g
    })
}

proptest! {
    #[test]
    fn random_graphs_match_nested_loop_join(g in arb_graph(), c in 0u8..4, lang in prop::sample::select(vec!["en", "de"])) {
        let compound = format!("https://example.org/c/{c}");
        prop_assert_eq!(run(&g, &compound, lang), oracle(&g, &compound, lang));
    }
}
