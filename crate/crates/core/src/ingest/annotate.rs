use std::collections::BTreeSet;

use super::{HazardEntry, SdsRecord};
use crate::graph::vocab::{ghs, safed};
use crate::skos::TaxonomyIndex;

const HEADING_NOTATION_PREFIX: &str = "SDS-";

/// True for concepts in the SDS-heading branch of the taxonomy.
pub fn is_heading_concept(taxonomy: &TaxonomyIndex, iri: &str) -> bool {
    taxonomy.is_under(iri, ghs::SDS_SECTION_HEADING)
}

pub(crate) fn heading_number(taxonomy: &TaxonomyIndex, iri: &str) -> Option<u8> {
    taxonomy
        .concept(iri)?
        .notation
        .as_deref()?
        .strip_prefix(HEADING_NOTATION_PREFIX)?
        .parse()
        .ok()
}

/// Heading concept whose notation is `SDS-<number>`.
pub fn heading_concept_for_number(taxonomy: &TaxonomyIndex, number: u8) -> Option<String> {
    taxonomy
        .by_notation(&format!("{HEADING_NOTATION_PREFIX}{number}"))
        .filter(|c| is_heading_concept(taxonomy, &c.iri))
        .map(|c| c.iri.clone())
}

/// Heading concepts whose labels match `text`, preferring `language`.
pub(crate) fn headings_by_label(taxonomy: &TaxonomyIndex, text: &str, language: &str) -> BTreeSet<String> {
    let pick = |lang: Option<&str>| -> BTreeSet<String> {
        taxonomy
            .lookup_by_label(text, lang)
            .into_iter()
            .filter(|c| is_heading_concept(taxonomy, c))
            .collect()
    };
    let preferred = pick(Some(language));
    if preferred.is_empty() {
        pick(None)
    } else {
        preferred
    }
}

fn is_classification(taxonomy: &TaxonomyIndex, iri: &str) -> bool {
    taxonomy
        .concept(iri)
        .is_some_and(|c| c.has_kind(safed::CLASSIFICATION))
}

fn unique(set: BTreeSet<String>) -> Option<String> {
    (set.len() == 1).then(|| set.into_iter().next().expect("one element"))
}

fn classify(entry: &HazardEntry, taxonomy: &TaxonomyIndex, language: &str) -> Option<String> {
    if let Some(code) = &entry.h_code {
        let base = &code[..code.len().min(4)];
        for candidate in [code.as_str(), base] {
            if let Some(c) = taxonomy.by_notation(candidate) {
                if is_classification(taxonomy, &c.iri) {
                    return Some(c.iri.clone());
                }
            }
        }
    }
    let by_label = |lang: Option<&str>| -> BTreeSet<String> {
        taxonomy
            .lookup_by_label(&entry.statement_text, lang)
            .into_iter()
            .filter(|c| is_classification(taxonomy, c))
            .collect()
    };
    unique(by_label(Some(language))).or_else(|| unique(by_label(None)))
}

/// Attaches taxonomy concepts to hazard entries (by H-code notation, then
/// by statement label) and to sections (by heading label, then by section
/// number). Returns the annotated record and the number of entries and
/// sections left without a concept.
pub fn annotate(mut record: SdsRecord, taxonomy: &TaxonomyIndex) -> (SdsRecord, usize) {
    let mut misses = 0;
    let language = record.language.clone();
    for entry in &mut record.hazard_entries {
        entry.classification_concept = classify(entry, taxonomy, &language);
        if entry.classification_concept.is_none() {
            misses += 1;
        }
    }
    for section in &mut record.sections {
        let by_label = unique(
            headings_by_label(taxonomy, &section.heading_text, &language)
                .into_iter()
                .filter(|c| heading_number(taxonomy, c) == Some(section.number))
                .collect(),
        );
        section.heading_concept = by_label.or_else(|| heading_concept_for_number(taxonomy, section.number));
        if section.heading_concept.is_none() {
            misses += 1;
        }
    }
    (record, misses)
}
