#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use sdskg::store::SdsStore;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// (file name, contents) of every JSON SDS fixture, sorted by name.
pub fn json_fixtures() -> Vec<(String, String)> {
    read_dir("sds/json")
}

pub fn text_fixtures() -> Vec<(String, String)> {
    read_dir("sds/text")
}

pub fn read_dir(rel: &str) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(fixtures_dir().join(rel))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

pub fn fixture(rel: &str) -> String {
    fs::read_to_string(fixtures_dir().join(rel)).unwrap()
}

/// Bundled store with every JSON fixture committed.
pub fn loaded_store() -> SdsStore {
    let mut store = SdsStore::bundled();
    for (name, text) in json_fixtures() {
        let report = store.ingest_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            report.status,
            sdskg::store::IngestStatus::Created,
            "{name}: {:#?}",
            report.validation.results
        );
    }
    store
}
