#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use sdskg::graph::{evaluate_query, Graph};

fuzz_target!(|data: &str| {
    static GRAPH: OnceLock<Graph> = OnceLock::new();
    let g = GRAPH.get_or_init(sdskg::bundled::taxonomy_graph);
    let _ = evaluate_query(g, data);
});
