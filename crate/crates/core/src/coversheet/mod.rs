//! Composite cover sheets: collect the SDS of each compound, union them over
//! a product, harvest their hazard statements and intersect with the general
//! hazard list.

mod hgen;
mod network;
mod render;

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::graph::{Term, Solutions};
use crate::ingest::{compound_iri, is_h_code, normalize_name, SdsRecord};
use crate::skos::TaxonomyIndex;
use crate::store::SdsStore;

pub use hgen::{GeneralHazardList, HgenError, HGEN_HEADER};
pub use network::{export_network, Network, NetworkEdge, NetworkNode, NetworkNodeKind};
pub use render::{render, RenderFormat};

pub const NO_HAZARDS_MARKER: &str = "No applicable hazard statements";
const DISCLOSURE_LANGUAGE: &str = "en";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverSheetError {
    #[error("a product selection needs at least one SDS")]
    EmptySelection,
    #[error("SDS {0} is selected twice")]
    DuplicateSdsId(String),
    #[error("unknown SDS id(s): {}", .0.join(", "))]
    UnknownSdsIds(Vec<String>),
}

/// The SDS chosen for one product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProductSelection {
    pub product_name: String,
    pub sds_ids: Vec<String>,
}

impl ProductSelection {
    pub fn new(product_name: impl Into<String>, sds_ids: Vec<String>) -> Result<Self, CoverSheetError> {
        if sds_ids.is_empty() {
            return Err(CoverSheetError::EmptySelection);
        }
        let mut seen = BTreeSet::new();
        for id in &sds_ids {
            if !seen.insert(id) {
                return Err(CoverSheetError::DuplicateSdsId(id.clone()));
            }
        }
        Ok(ProductSelection {
            product_name: product_name.into(),
            sds_ids,
        })
    }
}

/// Where a statement was found.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Source {
    pub sds_id: String,
    pub section: u8,
}

/// Harvest identity of a statement: its classification concept, else its
/// H-code, else its normalized text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "by", content = "value", rename_all = "camelCase")]
pub enum HazardKey {
    Concept(String),
    Code(String),
    Text(String),
}

impl HazardKey {
    pub fn of(h_code: Option<&str>, concept: Option<&str>, statement: &str) -> Self {
        match (concept, h_code) {
            (Some(c), _) => HazardKey::Concept(c.to_string()),
            (None, Some(code)) => HazardKey::Code(code.to_string()),
            (None, None) => HazardKey::Text(normalize_name(statement)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HarvestedHazard {
    pub key: HazardKey,
    /// The stated H-code, or the H-code notation of the concept.
    pub h_code: Option<String>,
    pub classification_concept: Option<String>,
    pub statement_text: String,
    pub sources: BTreeSet<Source>,
}

/// Hazards of a set of SDS with provenance, one entry per [`HazardKey`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HazardSet {
    pub entries: BTreeMap<HazardKey, HarvestedHazard>,
}

impl HazardSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HarvestedHazard> {
        self.entries.values()
    }
}

/// One raw statement occurrence, as seen by either harvest path.
struct Occurrence {
    source: Source,
    english: bool,
    h_code: Option<String>,
    concept: Option<String>,
    text: String,
}

fn concept_h_code(taxonomy: &TaxonomyIndex, concept: &str) -> Option<String> {
    taxonomy
        .concept(concept)?
        .notation
        .clone()
        .filter(|n| is_h_code(n))
}

fn is_english(language: &str) -> bool {
    language == DISCLOSURE_LANGUAGE || language.starts_with("en-")
}

fn assemble(occurrences: Vec<Occurrence>, taxonomy: &TaxonomyIndex) -> HazardSet {
    // Per key: the ordering rank of each candidate text and code.
    let mut grouped: BTreeMap<HazardKey, Vec<Occurrence>> = BTreeMap::new();
    for o in occurrences {
        let key = HazardKey::of(o.h_code.as_deref(), o.concept.as_deref(), &o.text);
        grouped.entry(key).or_default().push(o);
    }
    let mut set = HazardSet::default();
    for (key, mut group) in grouped {
        group.sort_by(|a, b| (!a.english, &a.source, &a.text).cmp(&(!b.english, &b.source, &b.text)));
        let first = &group[0];
        let concept = first.concept.clone();
        let h_code = group
            .iter()
            .filter_map(|o| o.h_code.clone())
            .min()
            .or_else(|| concept.as_deref().and_then(|c| concept_h_code(taxonomy, c)));
        set.entries.insert(
            key.clone(),
            HarvestedHazard {
                key,
                h_code,
                classification_concept: concept,
                statement_text: first.text.clone(),
                sources: group.iter().map(|o| o.source.clone()).collect(),
            },
        );
    }
    set
}

/// All stored SDS for a compound, across manufacturers, languages and
/// revisions, in id order.
pub fn collect_sds<'a>(store: &'a SdsStore, compound_name: &str) -> Vec<&'a SdsRecord> {
    let wanted = normalize_name(compound_name);
    store
        .records()
        .filter(|r| normalize_name(&r.compound_name) == wanted)
        .collect()
}

/// The selected SDS, in id order with uniqueness keys collapsed.
pub fn union_sds<'a>(selection: &ProductSelection, store: &'a SdsStore) -> Result<Vec<&'a SdsRecord>, CoverSheetError> {
    let missing: Vec<String> = selection
        .sds_ids
        .iter()
        .filter(|id| store.record(id).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(CoverSheetError::UnknownSdsIds(missing));
    }
    let mut by_key = BTreeMap::new();
    for id in &selection.sds_ids {
        let record = store.record(id).expect("checked above");
        by_key.entry(record.key()).or_insert(record);
    }
    let mut records: Vec<&SdsRecord> = by_key.into_values().collect();
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}

/// Keeps the latest revision per (compound, manufacturer, language).
pub fn latest_only<'a>(records: &[&'a SdsRecord]) -> Vec<&'a SdsRecord> {
    let mut latest: BTreeMap<(String, String, String), &SdsRecord> = BTreeMap::new();
    for r in records {
        let k = r.key();
        let slot = latest.entry((k.compound, k.manufacturer, k.language)).or_insert(r);
        if r.revision_date > slot.revision_date {
            *slot = r;
        }
    }
    let mut out: Vec<&SdsRecord> = latest.into_values().collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

fn literal_text(term: &Term) -> Option<String> {
    term.as_literal().map(|l| l.lexical().to_string())
}

fn column(solutions: &Solutions, name: &str) -> usize {
    solutions
        .variables
        .iter()
        .position(|v| v == name)
        .unwrap_or_else(|| panic!("query projects ?{name}"))
}

fn entry_rows(store: &SdsStore, sds: &str, tail: &str, vars: &str) -> Solutions {
    let text = format!("SELECT ?entry {vars} WHERE {{ <{sds}> safed:hazardStatement ?entry . {tail} }}");
    store.query(&text).expect("harvest queries are well-formed")
}

/// Harvests hazard statements by querying the store graph, one set of
/// queries per SDS.
pub fn harvest_hazards(records: &[&SdsRecord], store: &SdsStore) -> HazardSet {
    let mut occurrences = Vec::new();
    for record in records {
        let english = is_english(&record.language);
        let base = entry_rows(
            store,
            &record.id,
            "?entry safed:section ?section . ?entry safed:statementText ?text .",
            "?section ?text",
        );
        let codes = entry_rows(store, &record.id, "?entry safed:hCode ?code .", "?code");
        let concepts = entry_rows(store, &record.id, "?entry safed:classificationConcept ?concept .", "?concept");
        let lookup = |s: &Solutions, var: &str| -> BTreeMap<Term, Term> {
            let (e, v) = (column(s, "entry"), column(s, var));
            s.rows.iter().map(|row| (row[e].clone(), row[v].clone())).collect()
        };
        let codes = lookup(&codes, "code");
        let concepts = lookup(&concepts, "concept");
        let (e, sec, txt) = (column(&base, "entry"), column(&base, "section"), column(&base, "text"));
        for row in &base.rows {
            let section = row[sec]
                .as_literal()
                .and_then(|l| l.lexical().parse().ok())
                .expect("section is an integer");
            occurrences.push(Occurrence {
                source: Source {
                    sds_id: record.id.clone(),
                    section,
                },
                english,
                h_code: codes.get(&row[e]).and_then(literal_text),
                concept: concepts.get(&row[e]).and_then(|t| t.as_iri().map(str::to_string)),
                text: literal_text(&row[txt]).unwrap_or_default(),
            });
        }
    }
    assemble(occurrences, store.taxonomy())
}

/// Harvests hazard statements directly from annotated records.
pub fn harvest_from_records(records: &[&SdsRecord], taxonomy: &TaxonomyIndex) -> HazardSet {
    let mut occurrences = Vec::new();
    for record in records {
        for entry in &record.hazard_entries {
            occurrences.push(Occurrence {
                source: Source {
                    sds_id: record.id.clone(),
                    section: entry.section_number,
                },
                english: is_english(&record.language),
                h_code: entry.h_code.clone(),
                concept: entry.classification_concept.clone(),
                text: entry.statement_text.clone(),
            });
        }
    }
    assemble(occurrences, taxonomy)
}

/// A harvested statement left off the disclosure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DroppedHazard {
    pub key: HazardKey,
    pub h_code: Option<String>,
    pub statement_text: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intersection {
    pub kept: HazardSet,
    pub dropped: Vec<DroppedHazard>,
}

/// Keeps the hazards whose H-code is on the general list. Hazards without
/// any H-code are dropped and reported.
pub fn intersect_general(hazards: &HazardSet, hgen: &GeneralHazardList) -> Intersection {
    let mut kept = HazardSet::default();
    let mut dropped = Vec::new();
    for h in hazards.iter() {
        let reason = match &h.h_code {
            Some(code) if hgen.contains(code) => {
                kept.entries.insert(h.key.clone(), h.clone());
                continue;
            }
            Some(code) => format!("{code} is not on general hazard list {}", hgen.label),
            None => "statement has no H-code".to_string(),
        };
        dropped.push(DroppedHazard {
            key: h.key.clone(),
            h_code: h.h_code.clone(),
            statement_text: h.statement_text.clone(),
            reason,
        });
    }
    Intersection { kept, dropped }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SourceSds {
    pub sds_id: String,
    pub compound_name: String,
    pub manufacturer: String,
    pub language: String,
    pub revision_date: NaiveDate,
}

impl SourceSds {
    fn of(r: &SdsRecord) -> Self {
        SourceSds {
            sds_id: r.id.clone(),
            compound_name: r.compound_name.clone(),
            manufacturer: r.manufacturer.clone(),
            language: r.language.clone(),
            revision_date: r.revision_date,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CompositionRow {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cas_number: Option<String>,
    /// Percent by weight for ingredients; absent for the selected compounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concentration_percent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component_of: Option<String>,
}

/// One disclosed statement `D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DisclosureEntry {
    pub h_code: String,
    pub statement_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification_concept: Option<String>,
    pub sources: Vec<Source>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverviewSource {
    pub sds_id: String,
    pub compound_name: String,
    pub manufacturer: String,
    pub language: String,
    pub revision_date: NaiveDate,
    pub sections: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OverviewRow {
    pub h_code: String,
    pub statement_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept_label: Option<String>,
    pub sds: Vec<OverviewSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverSheet {
    pub product_name: String,
    pub generated_at: DateTime<Utc>,
    pub hgen_list: String,
    pub latest_only: bool,
    pub source_sds: Vec<SourceSds>,
    pub composition: Vec<CompositionRow>,
    pub pictograms: Vec<String>,
    pub hazards_disclosure: Vec<DisclosureEntry>,
    pub hazard_overview: Vec<OverviewRow>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Only the latest revision per (compound, manufacturer, language).
    pub latest_only: bool,
    /// Fixed timestamp; the current time when absent.
    pub generated_at: Option<DateTime<Utc>>,
}

/// Merges kept hazards that share an H-code into disclosure entries sorted
/// by code, then statement text.
pub fn disclosure(kept: &HazardSet) -> Vec<DisclosureEntry> {
    let mut by_code: BTreeMap<String, Vec<&HarvestedHazard>> = BTreeMap::new();
    for h in kept.iter() {
        if let Some(code) = &h.h_code {
            by_code.entry(code.clone()).or_default().push(h);
        }
    }
    let mut out: Vec<DisclosureEntry> = by_code
        .into_iter()
        .map(|(code, group)| {
            // Keys order concepts before bare codes and text, so the first
            // member carries the concept when there is one.
            let first = group[0];
            DisclosureEntry {
                h_code: code,
                statement_text: first.statement_text.clone(),
                classification_concept: first.classification_concept.clone(),
                sources: group
                    .iter()
                    .flat_map(|h| h.sources.iter().cloned())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            }
        })
        .collect();
    out.sort_by(|a, b| (&a.h_code, &a.statement_text).cmp(&(&b.h_code, &b.statement_text)));
    out
}

fn composition(records: &[&SdsRecord]) -> Vec<CompositionRow> {
    let mut rows: BTreeMap<(String, bool, String), CompositionRow> = BTreeMap::new();
    for r in records {
        let parent = normalize_name(&r.compound_name);
        rows.entry((parent.clone(), false, parent.clone())).or_insert_with(|| CompositionRow {
            name: r.compound_name.clone(),
            cas_number: r.cas_number.clone(),
            concentration_percent: None,
            component_of: None,
        });
        for ing in &r.ingredients {
            rows.entry((parent.clone(), true, normalize_name(&ing.name)))
                .or_insert_with(|| CompositionRow {
                    name: ing.name.clone(),
                    cas_number: ing.cas_number.clone(),
                    concentration_percent: Some(ing.concentration_percent),
                    component_of: Some(r.compound_name.clone()),
                });
        }
    }
    rows.into_values().collect()
}

fn overview(entries: &[DisclosureEntry], records: &[&SdsRecord], taxonomy: &TaxonomyIndex) -> Vec<OverviewRow> {
    let by_id: BTreeMap<&str, &SdsRecord> = records.iter().map(|r| (r.id.as_str(), *r)).collect();
    entries
        .iter()
        .map(|d| {
            let mut sections: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
            for s in &d.sources {
                sections.entry(s.sds_id.as_str()).or_default().push(s.section);
            }
            let mut sds: Vec<OverviewSource> = sections
                .into_iter()
                .filter_map(|(id, secs)| {
                    let r = by_id.get(id)?;
                    Some(OverviewSource {
                        sds_id: r.id.clone(),
                        compound_name: r.compound_name.clone(),
                        manufacturer: r.manufacturer.clone(),
                        language: r.language.clone(),
                        revision_date: r.revision_date,
                        sections: secs,
                    })
                })
                .collect();
            sds.sort_by(|a, b| {
                (&a.compound_name, &a.manufacturer, &a.language, a.revision_date, &a.sds_id).cmp(&(
                    &b.compound_name,
                    &b.manufacturer,
                    &b.language,
                    b.revision_date,
                    &b.sds_id,
                ))
            });
            OverviewRow {
                h_code: d.h_code.clone(),
                statement_text: d.statement_text.clone(),
                concept_label: d
                    .classification_concept
                    .as_deref()
                    .and_then(|c| taxonomy.concept(c))
                    .and_then(|c| c.pref_label(DISCLOSURE_LANGUAGE))
                    .map(str::to_string),
                sds,
            }
        })
        .collect()
}

/// Records a selection contributes after the optional revision filter.
pub fn selected_records<'a>(
    selection: &ProductSelection,
    store: &'a SdsStore,
    latest: bool,
) -> Result<Vec<&'a SdsRecord>, CoverSheetError> {
    let records = union_sds(selection, store)?;
    Ok(if latest { latest_only(&records) } else { records })
}

pub fn build_cover_sheet(
    selection: &ProductSelection,
    store: &SdsStore,
    hgen: &GeneralHazardList,
    options: &BuildOptions,
) -> Result<CoverSheet, CoverSheetError> {
    let records = selected_records(selection, store, options.latest_only)?;
    let harvested = harvest_hazards(&records, store);
    let Intersection { kept, dropped } = intersect_general(&harvested, hgen);
    let hazards_disclosure = disclosure(&kept);
    let hazard_overview = overview(&hazards_disclosure, &records, store.taxonomy());

    let mut source_sds: Vec<SourceSds> = records.iter().map(|r| SourceSds::of(r)).collect();
    source_sds.sort();
    let pictograms: BTreeSet<String> = records.iter().flat_map(|r| r.pictograms.iter().cloned()).collect();
    let warnings = dropped
        .iter()
        .map(|d| format!("dropped {:?}: {}", d.statement_text, d.reason))
        .collect();

    Ok(CoverSheet {
        product_name: selection.product_name.clone(),
        generated_at: options.generated_at.unwrap_or_else(Utc::now),
        hgen_list: hgen.label.clone(),
        latest_only: options.latest_only,
        source_sds,
        composition: composition(&records),
        pictograms: pictograms.into_iter().collect(),
        hazards_disclosure,
        hazard_overview,
        warnings,
    })
}

/// IRIs of the compounds described by the selected records.
pub fn selected_compounds(records: &[&SdsRecord]) -> BTreeSet<String> {
    records.iter().map(|r| compound_iri(&r.compound_name)).collect()
}
