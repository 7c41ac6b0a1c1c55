//! The checked-in fuzz corpus seeds stay valid inputs for their parsers.

use std::path::PathBuf;

use sdskg::coversheet::GeneralHazardList;
use sdskg::graph::{evaluate_query, parse, RdfFormat};
use sdskg::ingest::{parse_sds_json, parse_sds_text};
use sdskg::shacl::{load_rules, parse_shapes};
use sdskg::skos::{compile_authoring_json, load_taxonomy};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, String)> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn seeds_parse() {
    let tax = load_taxonomy(&sdskg::bundled::taxonomy_graph());
    let g = sdskg::bundled::taxonomy_graph();
    for (p, text) in seeds("ntriples") {
        parse(&text, RdfFormat::NTriples).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("turtle") {
        parse(&text, RdfFormat::Turtle).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("shapes") {
        parse_shapes(&parse(&text, RdfFormat::Turtle).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("sparql_query") {
        evaluate_query(&g, &text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("sds_json") {
        parse_sds_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("sds_text") {
        parse_sds_text(&text, &tax).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("rules") {
        load_rules(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("hgen_list") {
        GeneralHazardList::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, text) in seeds("taxonomy_json") {
        compile_authoring_json(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
