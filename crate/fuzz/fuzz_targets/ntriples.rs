#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg::graph::{parse, serialize, RdfFormat};

fuzz_target!(|data: &str| {
    if let Ok(g) = parse(data, RdfFormat::NTriples) {
        let back = parse(&serialize(&g, RdfFormat::NTriples), RdfFormat::NTriples).expect("reparse");
        assert!(g.is_isomorphic(&back));
    }
});
