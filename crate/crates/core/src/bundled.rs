//! Taxonomies, shapes, rules and hazard lists shipped with the crate.

use crate::graph::{parse, Graph, RdfFormat};
use crate::shacl::{load_rules, parse_shapes, InferenceRule, Shapes};

pub const GHS_TAXONOMY: &str = include_str!("../data/dpg-ghs.ttl");
pub const DOC_TAXONOMY: &str = include_str!("../data/dpg-doc.ttl");
pub const ISA88_TAXONOMY: &str = include_str!("../data/dpg-isa88.ttl");
pub const DOC_SHAPES: &str = include_str!("../data/dpg-doc-shapes.ttl");
pub const SAFED_SHAPES: &str = include_str!("../data/dpg-safed-shapes.ttl");
pub const SKOS_SHAPES: &str = include_str!("../data/skos-shapes.ttl");
pub const MIXTURE_RULES: &str = include_str!("../data/mixture-eye-irrit-2a.rules");
pub const HGEN_GHS_REV10: &str = include_str!("../data/hgen-ghs-rev10.txt");

pub const TAXONOMY_FILES: &[(&str, &str)] = &[
    ("dpg-ghs.ttl", GHS_TAXONOMY),
    ("dpg-doc.ttl", DOC_TAXONOMY),
    ("dpg-isa88.ttl", ISA88_TAXONOMY),
];

pub const SHAPE_FILES: &[(&str, &str)] = &[
    ("dpg-doc-shapes.ttl", DOC_SHAPES),
    ("dpg-safed-shapes.ttl", SAFED_SHAPES),
    ("skos-shapes.ttl", SKOS_SHAPES),
];

fn combine(files: &[(&str, &str)]) -> Graph {
    let mut graph = Graph::new().with_standard_prefixes();
    for (name, text) in files {
        let g = parse(text, RdfFormat::Turtle).unwrap_or_else(|e| panic!("bundled {name}: {e}"));
        graph.merge_apart(&g);
    }
    graph
}

/// DPG-GHS, DPG-DoC markers and the ISA-88 stub in one graph.
pub fn taxonomy_graph() -> Graph {
    combine(TAXONOMY_FILES)
}

pub fn shapes_graph() -> Graph {
    combine(SHAPE_FILES)
}

/// DPG-DoC, DPG-SafeD and concept-label shapes.
pub fn shapes() -> Shapes {
    parse_shapes(&shapes_graph()).expect("bundled shapes are well-formed")
}

pub fn rules() -> Vec<InferenceRule> {
    load_rules(MIXTURE_RULES).expect("bundled rules are well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skos::{check_integrity, load_taxonomy};

    #[test]
    fn bundled_taxonomy_is_clean() {
        let idx = load_taxonomy(&taxonomy_graph());
        let report = check_integrity(&idx);
        assert!(report.is_empty(), "{report:#?}");
        assert!(idx.dangling().is_empty(), "{:#?}", idx.dangling());
    }

    #[test]
    fn bundled_shapes_parse_without_warnings() {
        let s = shapes();
        assert!(s.warnings().is_empty(), "{:?}", s.warnings());
        assert!(s.get("https://w3id.org/dpg/safed#IngredientShape").is_some());
    }

    #[test]
    fn bundled_taxonomy_conforms_to_bundled_shapes() {
        let report = crate::shacl::validate(&taxonomy_graph(), &shapes());
        assert!(report.conforms, "{:#?}", report.results);
    }

    #[test]
    fn one_bundled_rule() {
        assert_eq!(rules().len(), 1);
    }
}
