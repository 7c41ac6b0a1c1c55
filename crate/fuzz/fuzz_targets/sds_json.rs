#![no_main]

use libfuzzer_sys::fuzz_target;
use sdskg::ingest::{parse_sds_json, to_graph, to_sds_json};

fuzz_target!(|data: &str| {
    if let Ok(record) = parse_sds_json(data) {
        let again = parse_sds_json(&to_sds_json(&record).to_string()).expect("reparse");
        assert_eq!(record, again);
        let _ = to_graph(&record);
    }
});
