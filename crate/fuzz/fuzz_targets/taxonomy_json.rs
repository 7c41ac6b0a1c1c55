#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg::skos::{check_integrity, compile_authoring_json, load_taxonomy};

fuzz_target!(|data: &str| {
    if let Ok(g) = compile_authoring_json(data) {
        let _ = check_integrity(&load_taxonomy(&g));
    }
});
