#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg::graph::{parse, RdfFormat};
use sdskg::shacl::{parse_shapes, validate};

fuzz_target!(|data: &str| {
    if let Ok(g) = parse(data, RdfFormat::Turtle) {
        if let Ok(shapes) = parse_shapes(&g) {
            let _ = validate(&g, &shapes);
        }
    }
});
