//! Knowledge-graph engine for GHS safety data sheets.
//!
//! The crate is organised by layer:
//!
//! * [`graph`]: an embedded triple store with Turtle/N-Triples syntax and a
//!   SPARQL-subset query evaluator.
//! * [`skos`]: SKOS/SKOS-XL taxonomy loading, integrity checks and
//!   label-based concept lookup.
//! * [`shacl`]: shape parsing, validation and forward-chaining rules.
//! * [`ingest`]: SDS JSON/text parsing, taxonomy annotation and graph
//!   emission.
//! * [`coversheet`]: composite cover-sheet assembly and rendering, plus the
//!   hazard network export.
//! * [`store`]: the ingestion pipeline and an on-disk snapshot format shared
//!   by the CLI and the HTTP service.

pub mod bundled;
pub mod coversheet;
pub mod graph;
pub mod ingest;
pub mod shacl;
pub mod skos;
pub mod store;
