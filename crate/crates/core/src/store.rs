//! Record store: the ingest pipeline (annotate, emit, infer, validate) and
//! on-disk snapshots.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bundled;
use crate::graph::vocab::SDS_INSTANCE_NS;
use crate::graph::{evaluate_query, parse, serialize, Graph, QueryError, RdfFormat, Solutions};
use crate::ingest::{annotate, compound_iri, parse_sds_json, parse_sds_text, to_graph, IngestError, SdsRecord, UniquenessKey};
use crate::shacl::{apply_rules, validate, InferenceRule, DEFAULT_MAX_ITERATIONS, Shapes, TraceEntry, ValidationReport};
use crate::skos::{load_taxonomy, TaxonomyIndex};

pub const SNAPSHOT_FORMAT: &str = "sdskg-snapshot/1";
pub const GRAPH_FILE: &str = "store.nt";
pub const CATALOG_FILE: &str = "catalog.json";

/// The query used to display a compound's hazard classifications; `<E>` is
/// replaced by the compound IRI.
pub const COMPOUND_HAZARDS_QUERY: &str = r#"SELECT ?hazard ?prefLabel ?labelDisplay
WHERE {
  <E> safed:classification ?hazard .
  ?hazard skos:prefLabel ?prefLabel .
  ?hazard safed:labelDisplay ?labelDisplay .
  FILTER (lang(?prefLabel) = "en")
}"#;

/// [`COMPOUND_HAZARDS_QUERY`] bound to a compound and a label language.
pub fn compound_hazards_query(compound: &str, language: &str) -> String {
    COMPOUND_HAZARDS_QUERY
        .replace("<E>", &format!("<{compound}>"))
        .replace("= \"en\"", &format!("= \"{}\"", language.replace('"', "")))
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt snapshot in {path}: {reason}")]
    CorruptSnapshot { path: PathBuf, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IngestStatus {
    Created,
    Unchanged,
    Quarantined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InferenceSummary {
    pub iterations: usize,
    pub capped: bool,
    pub inferred: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IngestReport {
    pub sds_id: String,
    pub status: IngestStatus,
    /// Hazard entries and sections left without a taxonomy concept.
    pub annotation_misses: usize,
    pub validation: ValidationReport,
    pub inference: InferenceSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct QuarantineEntry {
    pub record: SdsRecord,
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogEntry {
    pub sds_id: String,
    pub compound_name: String,
    pub compound_iri: String,
    pub manufacturer: String,
    pub language: String,
    pub revision_date: NaiveDate,
    pub hazard_count: usize,
}

impl CatalogEntry {
    pub fn of(record: &SdsRecord) -> Self {
        CatalogEntry {
            sds_id: record.id.clone(),
            compound_name: record.compound_name.clone(),
            compound_iri: compound_iri(&record.compound_name),
            manufacturer: record.manufacturer.clone(),
            language: record.language.clone(),
            revision_date: record.revision_date,
            hazard_count: record.hazard_entries.len(),
        }
    }
}

/// Taxonomy, shapes and rules a store runs with.
#[derive(Debug, Clone)]
pub struct StoreConfig {
    pub taxonomy: Graph,
    pub shapes: Shapes,
    pub rules: Vec<InferenceRule>,
    pub max_iterations: usize,
}

impl StoreConfig {
    pub fn bundled() -> Self {
        StoreConfig {
            taxonomy: bundled::taxonomy_graph(),
            shapes: bundled::shapes(),
            rules: bundled::rules(),
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SnapshotCatalog {
    format: String,
    graph_sha256: String,
    triple_count: usize,
    records: Vec<SdsRecord>,
    quarantine: Vec<QuarantineEntry>,
}

#[derive(Debug, Clone)]
pub struct SdsStore {
    config: StoreConfig,
    taxonomy: TaxonomyIndex,
    /// Record triples plus inferred triples, without the taxonomy.
    data: Graph,
    /// Taxonomy and data together; queries and validation run here.
    graph: Graph,
    records: BTreeMap<String, SdsRecord>,
    keys: BTreeMap<UniquenessKey, String>,
    quarantine: BTreeMap<String, QuarantineEntry>,
}

impl SdsStore {
    pub fn new(config: StoreConfig) -> Self {
        let taxonomy = load_taxonomy(&config.taxonomy);
        let graph = config.taxonomy.clone();
        SdsStore {
            config,
            taxonomy,
            data: Graph::new().with_standard_prefixes(),
            graph,
            records: BTreeMap::new(),
            keys: BTreeMap::new(),
            quarantine: BTreeMap::new(),
        }
    }

    pub fn bundled() -> Self {
        Self::new(StoreConfig::bundled())
    }

    pub fn taxonomy(&self) -> &TaxonomyIndex {
        &self.taxonomy
    }

    pub fn shapes(&self) -> &Shapes {
        &self.config.shapes
    }

    pub fn config(&self) -> &StoreConfig {
        &self.config
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn data_graph(&self) -> &Graph {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Committed records in id order.
    pub fn records(&self) -> impl Iterator<Item = &SdsRecord> {
        self.records.values()
    }

    pub fn record(&self, id: &str) -> Option<&SdsRecord> {
        self.records.get(id)
    }

    pub fn quarantine(&self) -> impl Iterator<Item = &QuarantineEntry> {
        self.quarantine.values()
    }

    /// Catalog entries sorted by compound, manufacturer, language, revision.
    pub fn catalog(&self) -> Vec<CatalogEntry> {
        let mut entries: Vec<CatalogEntry> = self.records.values().map(CatalogEntry::of).collect();
        entries.sort_by(|a, b| {
            (a.compound_name.to_lowercase(), a.manufacturer.to_lowercase(), &a.language, a.revision_date, &a.sds_id).cmp(&(
                b.compound_name.to_lowercase(),
                b.manufacturer.to_lowercase(),
                &b.language,
                b.revision_date,
                &b.sds_id,
            ))
        });
        entries
    }

    /// True when some stored record (or ingredient) names this compound IRI.
    pub fn has_compound(&self, compound: &str) -> bool {
        self.records.values().any(|r| {
            compound_iri(&r.compound_name) == compound || r.ingredients.iter().any(|i| compound_iri(&i.name) == compound)
        })
    }

    pub fn query(&self, text: &str) -> Result<Solutions, QueryError> {
        evaluate_query(&self.graph, text)
    }

    /// Hazard classifications of a compound with labels in `language`.
    pub fn compound_hazards(&self, compound: &str, language: &str) -> Result<Solutions, QueryError> {
        self.query(&compound_hazards_query(compound, language))
    }

    pub fn ingest_json(&mut self, text: &str) -> Result<IngestReport, IngestError> {
        Ok(self.ingest_record(parse_sds_json(text)?))
    }

    pub fn ingest_text(&mut self, text: &str) -> Result<IngestReport, IngestError> {
        let record = parse_sds_text(text, &self.taxonomy)?;
        Ok(self.ingest_record(record))
    }

    /// Annotates, emits, infers and validates a parsed record. Records with
    /// violations go to quarantine and leave the store graph untouched.
    pub fn ingest_record(&mut self, record: SdsRecord) -> IngestReport {
        let (record, annotation_misses) = annotate(record, &self.taxonomy);
        if let Some(id) = self.keys.get(&record.key()) {
            return IngestReport {
                sds_id: id.clone(),
                status: IngestStatus::Unchanged,
                annotation_misses,
                validation: ValidationReport {
                    conforms: true,
                    results: Vec::new(),
                },
                inference: InferenceSummary {
                    iterations: 0,
                    capped: false,
                    inferred: Vec::new(),
                },
            };
        }
        let record_graph = to_graph(&record);
        let mut candidate = self.graph.clone();
        candidate.merge(&record_graph);
        let outcome = apply_rules(&candidate, &self.config.rules, self.config.max_iterations);
        let validation = validate(&outcome.graph, &self.config.shapes);
        let inference = InferenceSummary {
            iterations: outcome.iterations,
            capped: outcome.capped,
            inferred: outcome.trace.clone(),
        };
        let sds_id = record.id.clone();
        if !validation.conforms {
            self.quarantine.insert(
                sds_id.clone(),
                QuarantineEntry {
                    record,
                    report: validation.clone(),
                },
            );
            return IngestReport {
                sds_id,
                status: IngestStatus::Quarantined,
                annotation_misses,
                validation,
                inference,
            };
        }
        self.data.merge(&record_graph);
        self.data.extend(outcome.inferred());
        self.graph = outcome.graph;
        self.quarantine.remove(&sds_id);
        self.keys.insert(record.key(), sds_id.clone());
        self.records.insert(sds_id.clone(), record);
        IngestReport {
            sds_id,
            status: IngestStatus::Created,
            annotation_misses,
            validation,
            inference,
        }
    }

    /// Writes `store.nt` and `catalog.json` into `dir`. Each file is written
    /// to a temporary name and renamed into place.
    pub fn snapshot(&self, dir: &Path) -> Result<(), StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let nt = serialize(&self.data, RdfFormat::NTriples);
        let catalog = SnapshotCatalog {
            format: SNAPSHOT_FORMAT.to_string(),
            graph_sha256: hex::encode(Sha256::digest(nt.as_bytes())),
            triple_count: self.data.len(),
            records: self.records.values().cloned().collect(),
            quarantine: self.quarantine.values().cloned().collect(),
        };
        let json = serde_json::to_string_pretty(&catalog).expect("catalog serializes");
        write_atomic(&dir.join(GRAPH_FILE), nt.as_bytes())?;
        write_atomic(&dir.join(CATALOG_FILE), json.as_bytes())
    }

    /// Loads a snapshot written by [`SdsStore::snapshot`]. A directory without
    /// `catalog.json` yields an empty store.
    pub fn open(dir: &Path, config: StoreConfig) -> Result<Self, StoreError> {
        let catalog_path = dir.join(CATALOG_FILE);
        if !catalog_path.exists() {
            return Ok(Self::new(config));
        }
        let corrupt = |reason: String| StoreError::CorruptSnapshot {
            path: dir.to_path_buf(),
            reason,
        };
        let catalog_text = fs::read_to_string(&catalog_path).map_err(io_err(&catalog_path))?;
        let catalog: SnapshotCatalog =
            serde_json::from_str(&catalog_text).map_err(|e| corrupt(format!("{CATALOG_FILE}: {e}")))?;
        if catalog.format != SNAPSHOT_FORMAT {
            return Err(corrupt(format!("unsupported format {:?}", catalog.format)));
        }
        let graph_path = dir.join(GRAPH_FILE);
        let nt = fs::read(&graph_path).map_err(|e| corrupt(format!("{GRAPH_FILE}: {e}")))?;
        if hex::encode(Sha256::digest(&nt)) != catalog.graph_sha256 {
            return Err(corrupt(format!("{GRAPH_FILE} does not match the recorded checksum")));
        }
        let nt = String::from_utf8(nt).map_err(|e| corrupt(format!("{GRAPH_FILE}: {e}")))?;
        let parsed = parse(&nt, RdfFormat::NTriples).map_err(|e| corrupt(format!("{GRAPH_FILE}: {e}")))?;
        if parsed.len() != catalog.triple_count {
            return Err(corrupt(format!(
                "{GRAPH_FILE} has {} triples, catalog records {}",
                parsed.len(),
                catalog.triple_count
            )));
        }

        let mut store = Self::new(config);
        store.data.merge(&parsed);
        store.graph.merge(&parsed);
        for record in catalog.records {
            if !record.id.starts_with(SDS_INSTANCE_NS) {
                return Err(corrupt(format!("record id {:?} is outside the SDS namespace", record.id)));
            }
            if store.keys.insert(record.key(), record.id.clone()).is_some() {
                return Err(corrupt(format!("duplicate record key for {}", record.id)));
            }
            store.records.insert(record.id.clone(), record);
        }
        for entry in catalog.quarantine {
            store.quarantine.insert(entry.record.id.clone(), entry);
        }
        Ok(store)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut file = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    file.write_all(bytes).map_err(io_err(&tmp))?;
    file.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ETHANOL: &str = r#"{
        "compound": {"name": "Ethanol", "cas": "64-17-5"},
        "manufacturer": "Acme",
        "language": "en",
        "revisionDate": "2021-03-12",
        "sections": [
            {"number": 1, "heading": "Identification", "text": "Ethanol"},
            {"number": 2, "heading": "Hazard(s) identification", "text": "Flammable"}
        ],
        "hazards": [{"hCode": "H225", "statement": "Highly flammable liquid and vapour", "section": 2}],
        "pictograms": ["GHS02"]
    }"#;

    #[test]
    fn ingest_is_idempotent() {
        let mut store = SdsStore::bundled();
        let first = store.ingest_json(ETHANOL).unwrap();
        assert_eq!(first.status, IngestStatus::Created, "{:#?}", first.validation);
        let second = store.ingest_json(ETHANOL).unwrap();
        assert_eq!(second.status, IngestStatus::Unchanged);
        assert_eq!(first.sds_id, second.sds_id);
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn snapshot_round_trip() {
        let mut store = SdsStore::bundled();
        store.ingest_json(ETHANOL).unwrap();
        let dir = tempfile::tempdir().unwrap();
        store.snapshot(dir.path()).unwrap();
        let restored = SdsStore::open(dir.path(), StoreConfig::bundled()).unwrap();
        assert_eq!(restored.catalog(), store.catalog());
        assert_eq!(restored.graph(), store.graph());
    }

    #[test]
    fn truncated_snapshot_is_refused() {
        let mut store = SdsStore::bundled();
        store.ingest_json(ETHANOL).unwrap();
        let dir = tempfile::tempdir().unwrap();
        store.snapshot(dir.path()).unwrap();
        let path = dir.path().join(GRAPH_FILE);
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(
            SdsStore::open(dir.path(), StoreConfig::bundled()),
            Err(StoreError::CorruptSnapshot { .. })
        ));
    }

    #[test]
    fn missing_snapshot_gives_empty_store() {
        let dir = tempfile::tempdir().unwrap();
        assert!(SdsStore::open(dir.path(), StoreConfig::bundled()).unwrap().is_empty());
    }
}
