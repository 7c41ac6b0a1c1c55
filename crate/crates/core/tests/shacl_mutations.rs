mod common;

use sdskg::bundled;
use sdskg::graph::{parse, Graph, RdfFormat, Term, Triple};
use sdskg::shacl::{validate, Severity};

const PREFIXES: &str = "@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
@prefix doc: <https://w3id.org/dpg/doc#> .
@prefix safed: <https://w3id.org/dpg/safed#> .
@prefix ghs: <https://w3id.org/dpg/ghs-rev10#> .
@prefix d: <https://example.org/sds/ethanol/> .
@prefix s: <https://example.org/sds/acetomenophin/> .
";

fn triple(ttl: &str) -> Triple {
    let g = parse(&format!("{PREFIXES}{ttl} ."), RdfFormat::Turtle).unwrap();
    assert_eq!(g.len(), 1, "{ttl}");
    let t = g.iter().next().unwrap();
    t
}

enum Mutation {
    Add(&'static str),
    Remove(&'static str),
    /// Replace the first triple by the second.
    Replace(&'static str, &'static str),
}

fn with_taxonomy(data: &Graph) -> Graph {
    let mut g = bundled::taxonomy_graph();
    g.merge_apart(data);
    g
}

fn fixture(name: &str) -> Graph {
    parse(&common::fixture(&format!("shacl/{name}")), RdfFormat::Turtle).unwrap()
}

fn apply(base: &Graph, m: &Mutation) -> Graph {
    let mut g = base.clone();
    match m {
        Mutation::Add(t) => assert!(g.insert(triple(t)), "{t} already present"),
        Mutation::Remove(t) => assert!(g.remove(&triple(t)), "{t} absent"),
        Mutation::Replace(old, new) => {
            assert!(g.remove(&triple(old)), "{old} absent");
            assert!(g.insert(triple(new)));
        }
    }
    g
}

#[test]
fn conforming_fixtures_validate() {
    let shapes = bundled::shapes();
    for name in ["doc-conforming.ttl", "safed-conforming.ttl"] {
        let report = validate(&with_taxonomy(&fixture(name)), &shapes);
        assert!(report.conforms, "{name}: {:#?}", report.results);
    }
}

fn mutations() -> Vec<(&'static str, Mutation, &'static str)> {
    use Mutation::*;
    vec![
        ("doc-conforming.ttl", Remove("d:section-01 doc:order 1"), "MinCountConstraintComponent"),
        ("doc-conforming.ttl", Add("d:section-01 doc:order 3"), "MaxCountConstraintComponent"),
        ("doc-conforming.ttl", Add("d:section-01 d:extra \"x\""), "ClosedConstraintComponent"),
        ("doc-conforming.ttl", Add("d:sheet doc:title \"Duplicate\"@en"), "UniqueLangConstraintComponent"),
        ("doc-conforming.ttl", Add("d:sheet doc:title \"Titre\"@xx"), "LanguageInConstraintComponent"),
        ("doc-conforming.ttl", Add("d:section-01 doc:hasContent 42"), "OrConstraintComponent"),
        ("doc-conforming.ttl", Remove("d:sheet doc:conformsTo ghs:SdsFormat"), "HasValueConstraintComponent"),
        ("doc-conforming.ttl", Add("d:sheet doc:hasContainer d:section-03"), "ClassConstraintComponent"),
        ("safed-conforming.ttl", Add("s:sheet safed:pictogram ghs:H302"), "InConstraintComponent"),
        ("safed-conforming.ttl", Add("s:acetomenophin-400 safed:classification ghs:SdsSection01"), "ClassConstraintComponent"),
        ("safed-conforming.ttl", Add("s:acetomenophin-400 safed:casNumber 12345"), "DatatypeConstraintComponent"),
        ("safed-conforming.ttl", Remove("s:sheet safed:manufacturer \"Sigma-Aldrich\""), "MinCountConstraintComponent"),
        ("safed-conforming.ttl", Add("s:ingredient-01 safed:concentration 5.0"), "NodeConstraintComponent"),
        (
            "safed-conforming.ttl",
            Replace("s:sheet safed:describes s:acetomenophin-400", "s:sheet safed:describes \"Acetomenophin 400\""),
            "NodeKindConstraintComponent",
        ),
        (
            "safed-conforming.ttl",
            Replace(
                "s:sheet safed:revisionDate \"2023-06-01\"^^xsd:date",
                "s:sheet safed:revisionDate \"2023-13-01\"^^xsd:date",
            ),
            "DatatypeConstraintComponent",
        ),
    ]
}

#[test]
fn each_mutation_yields_exactly_one_violation() {
    let shapes = bundled::shapes();
    let cases = mutations();
    assert!(cases.len() >= 10);
    for (name, m, component) in cases {
        let mutated = apply(&fixture(name), &m);
        let report = validate(&with_taxonomy(&mutated), &shapes);
        let violations: Vec<_> = report.violations().collect();
        assert!(!report.conforms);
        assert_eq!(violations.len(), 1, "{name} {component}: {violations:#?}");
        assert_eq!(violations[0].component_name(), component, "{name}");
        assert_eq!(violations[0].severity, Severity::Violation);
    }
}

#[test]
fn results_name_focus_node_and_path() {
    let shapes = bundled::shapes();
    let mutated = apply(&fixture("safed-conforming.ttl"), &Mutation::Remove("s:sheet safed:manufacturer \"Sigma-Aldrich\""));
    let report = validate(&with_taxonomy(&mutated), &shapes);
    let v = report.violations().next().unwrap();
    assert_eq!(v.focus_node, Term::Iri("https://example.org/sds/acetomenophin/sheet".into()));
    assert_eq!(v.path.as_deref(), Some("https://w3id.org/dpg/safed#manufacturer"));
}
