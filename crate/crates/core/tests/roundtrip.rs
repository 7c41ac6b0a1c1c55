mod common;

use proptest::prelude::*;
use sdskg::bundled;
use sdskg::coversheet::{build_cover_sheet, render, BuildOptions, CoverSheet, GeneralHazardList, ProductSelection, RenderFormat};
use sdskg::graph::{parse, serialize, Graph, Literal, RdfFormat, Term, Triple};
use sdskg::ingest::{parse_sds_json, parse_sds_text, to_graph, to_sds_json};
use sdskg::store::SdsStore;

use common::{fixture, json_fixtures, loaded_store};

fn all_graphs() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for (name, text) in bundled::TAXONOMY_FILES.iter().chain(bundled::SHAPE_FILES) {
        out.push((name.to_string(), parse(text, RdfFormat::Turtle).unwrap()));
    }
    for name in ["shacl/doc-conforming.ttl", "shacl/safed-conforming.ttl"] {
        out.push((name.to_string(), parse(&fixture(name), RdfFormat::Turtle).unwrap()));
    }
    for (name, text) in json_fixtures() {
        out.push((name, to_graph(&parse_sds_json(&text).unwrap())));
    }
    out
}

#[test]
fn parse_serialize_is_isomorphic_in_both_formats() {
    for (name, g) in all_graphs() {
        for format in [RdfFormat::NTriples, RdfFormat::Turtle] {
            let text = serialize(&g, format);
            let back = parse(&text, format).unwrap_or_else(|e| panic!("{name} {format:?}: {e}"));
            assert!(g.is_isomorphic(&back), "{name} {format:?}");
            if !g.iter().any(|t| t.subject.is_blank() || t.object.is_blank()) {
                assert_eq!(serialize(&back, format), text, "{name} {format:?}");
            }
        }
    }
}

#[test]
fn turtle_and_ntriples_agree() {
    for (name, g) in all_graphs() {
        let nt = parse(&serialize(&g, RdfFormat::NTriples), RdfFormat::NTriples).unwrap();
        let ttl = parse(&serialize(&g, RdfFormat::Turtle), RdfFormat::Turtle).unwrap();
        assert!(nt.is_isomorphic(&ttl), "{name}");
    }
}

#[test]
fn sds_json_round_trips_semantically() {
    for (name, text) in json_fixtures() {
        let record = parse_sds_json(&text).unwrap();
        let again = parse_sds_json(&to_sds_json(&record).to_string()).unwrap();
        assert_eq!(record, again, "{name}");
    }
}

#[test]
fn text_mode_records_survive_the_payload_schema() {
    let tax = sdskg::skos::load_taxonomy(&bundled::taxonomy_graph());
    for (name, text) in common::text_fixtures() {
        let mut record = parse_sds_text(&text, &tax).unwrap();
        for s in &mut record.sections {
            s.heading_concept = None;
        }
        let again = parse_sds_json(&to_sds_json(&record).to_string()).unwrap();
        assert_eq!(record, again, "{name}");
    }
}

#[test]
fn snapshot_restore_gives_identical_catalog() {
    let store = loaded_store();
    let dir = tempfile::tempdir().unwrap();
    store.snapshot(dir.path()).unwrap();
    let restored = SdsStore::open(dir.path(), sdskg::store::StoreConfig::bundled()).unwrap();
    assert_eq!(restored.catalog(), store.catalog());
    assert_eq!(restored.len(), 24);
    assert!(restored.graph().is_isomorphic(store.graph()));
    assert_eq!(restored.records().collect::<Vec<_>>(), store.records().collect::<Vec<_>>());
}

#[test]
fn cover_sheet_json_reparses_to_equal_value() {
    let store = loaded_store();
    let ids: Vec<String> = store.catalog().into_iter().map(|c| c.sds_id).collect();
    for hgen in [GeneralHazardList::empty("none"), GeneralHazardList::ghs_rev10()] {
        let sel = ProductSelection::new("Blend <A> & B", ids.clone()).unwrap();
        let sheet = build_cover_sheet(&sel, &store, &hgen, &BuildOptions::default()).unwrap();
        let json = render(&sheet, RenderFormat::Json);
        let back: CoverSheet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sheet);
    }
}

fn arb_term_object() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[a-z]{1,6}".prop_map(|s| Term::Iri(format!("https://example.org/{s}"))),
        "[a-c]".prop_map(|s| Term::BlankNode(format!("b{s}"))),
        any::<String>().prop_map(|s| Term::Literal(Literal::string(s))),
        ("[ -~]{0,12}", prop::sample::select(vec!["en", "de", "en-GB"]))
            .prop_map(|(s, l)| Term::Literal(Literal::lang(s, l).unwrap())),
        (-1000i64..1000).prop_map(|n| Term::Literal(Literal::integer(n))),
    ]
}

proptest! {
    #[test]
    fn arbitrary_graphs_round_trip(
        triples in prop::collection::vec(
            (
                prop_oneof![
                    "[a-z]{1,4}".prop_map(|s| Term::Iri(format!("https://example.org/s/{s}"))),
                    "[a-c]".prop_map(|s| Term::BlankNode(format!("b{s}"))),
                ],
                "[a-z]{1,4}".prop_map(|s| Term::Iri(format!("https://example.org/p#{s}"))),
                arb_term_object(),
            ),
            0..30,
        )
    ) {
        let mut g = Graph::new().with_standard_prefixes();
        g.set_prefix("ex", "https://example.org/s/");
        for (s, p, o) in triples {
            g.insert(Triple::new(s, p, o).unwrap());
        }
        for format in [RdfFormat::NTriples, RdfFormat::Turtle] {
            let back = parse(&serialize(&g, format), format).unwrap();
            prop_assert!(g.is_isomorphic(&back), "{:?}\n{}", format, serialize(&g, format));
        }
    }
}
