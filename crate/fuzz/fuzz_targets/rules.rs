#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg::graph::Graph;
use sdskg::shacl::{apply_rules, load_rules};

fuzz_target!(|data: &str| {
    if let Ok(rules) = load_rules(data) {
        let _ = apply_rules(&Graph::new(), &rules, 4);
    }
});
