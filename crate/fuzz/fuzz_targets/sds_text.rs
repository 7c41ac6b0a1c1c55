#![no_main]

use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use sdskg::ingest::parse_sds_text;
use sdskg::skos::{load_taxonomy, TaxonomyIndex};

fuzz_target!(|data: &str| {
    static TAX: OnceLock<TaxonomyIndex> = OnceLock::new();
    let tax = TAX.get_or_init(|| load_taxonomy(&sdskg::bundled::taxonomy_graph()));
    let _ = parse_sds_text(data, tax);
});
