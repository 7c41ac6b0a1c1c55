#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg::graph::{parse, serialize, RdfFormat};

fuzz_target!(|data: &str| {
    if let Ok(g) = parse(data, RdfFormat::Turtle) {
        let back = parse(&serialize(&g, RdfFormat::Turtle), RdfFormat::Turtle).expect("reparse");
        assert_eq!(g.len(), back.len());
    }
});
