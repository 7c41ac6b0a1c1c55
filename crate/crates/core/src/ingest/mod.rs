//! SDS ingestion: JSON and plain-text parsing, taxonomy annotation and graph
//! emission.

mod annotate;
mod emit;
mod json;
mod text;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::graph::vocab::SDS_INSTANCE_NS;
use crate::graph::Graph;
use crate::shacl::{validate, Shapes, ValidationReport};

pub use annotate::{annotate, heading_concept_for_number, is_heading_concept};
pub use emit::{compound_iri, to_graph};
pub use json::{parse_sds_json, to_sds_json};
pub use text::{parse_date_lenient, parse_sds_text};

pub const MAX_SECTION: u8 = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IngestError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{field}: {reason}")]
    Schema { field: String, reason: String },
    #[error("{field}: invalid date {value:?} (expected YYYY-MM-DD)")]
    InvalidDate { field: String, value: String },
    #[error("{field}: concentration {value} is outside [0, 100]")]
    ConcentrationOutOfRange { field: String, value: f64 },
    #[error("no SDS section headings detected")]
    NoSectionsDetected,
    #[error("section {0} appears more than once")]
    DuplicateSectionNumber(u8),
}

impl IngestError {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        IngestError::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// The offending field, when the error concerns one.
    pub fn field(&self) -> Option<&str> {
        match self {
            IngestError::Schema { field, .. }
            | IngestError::InvalidDate { field, .. }
            | IngestError::ConcentrationOutOfRange { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SdsSection {
    pub number: u8,
    pub heading_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading_concept: Option<String>,
    pub body_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HazardEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_code: Option<String>,
    pub statement_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification_concept: Option<String>,
    pub section_number: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PrecautionaryEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_code: Option<String>,
    pub statement_text: String,
    pub section_number: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Ingredient {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cas_number: Option<String>,
    pub concentration_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SdsRecord {
    pub id: String,
    pub compound_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cas_number: Option<String>,
    pub manufacturer: String,
    pub language: String,
    pub revision_date: NaiveDate,
    pub sections: Vec<SdsSection>,
    #[serde(default)]
    pub hazard_entries: Vec<HazardEntry>,
    #[serde(default)]
    pub precautionary_entries: Vec<PrecautionaryEntry>,
    #[serde(default)]
    pub pictograms: Vec<String>,
    #[serde(default)]
    pub ingredients: Vec<Ingredient>,
}

/// (compound, manufacturer, language, revision date) with names in
/// normalized form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UniquenessKey {
    pub compound: String,
    pub manufacturer: String,
    pub language: String,
    pub revision_date: NaiveDate,
}

/// Case-folded, trimmed, whitespace-collapsed form used for name matching.
pub fn normalize_name(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

pub(crate) fn short_hash(parts: &[&str], bytes: usize) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    hex::encode(&h.finalize()[..bytes])
}

/// Deterministic SDS IRI for a uniqueness key.
pub fn mint_sds_iri(key: &UniquenessKey) -> String {
    let date = key.revision_date.to_string();
    let digest = short_hash(&[&key.compound, &key.manufacturer, &key.language, &date], 16);
    format!("{SDS_INSTANCE_NS}{digest}")
}

impl SdsRecord {
    pub fn key(&self) -> UniquenessKey {
        UniquenessKey {
            compound: normalize_name(&self.compound_name),
            manufacturer: normalize_name(&self.manufacturer),
            language: self.language.to_ascii_lowercase(),
            revision_date: self.revision_date,
        }
    }

    pub fn section(&self, number: u8) -> Option<&SdsSection> {
        self.sections.iter().find(|s| s.number == number)
    }

    /// Checks the record invariants; parsers call this before returning.
    pub fn check(&self) -> Result<(), IngestError> {
        if self.compound_name.trim().is_empty() {
            return Err(IngestError::schema("compound.name", "must be non-empty"));
        }
        if self.manufacturer.trim().is_empty() {
            return Err(IngestError::schema("manufacturer", "must be non-empty"));
        }
        if !crate::graph::term::is_language_tag(&self.language) {
            return Err(IngestError::schema("language", format!("{:?} is not a language tag", self.language)));
        }
        if self.sections.is_empty() {
            return Err(IngestError::schema("sections", "at least one section is required"));
        }
        let mut last = 0u8;
        for (i, s) in self.sections.iter().enumerate() {
            if !(1..=MAX_SECTION).contains(&s.number) {
                return Err(IngestError::schema(
                    format!("sections[{i}].number"),
                    format!("{} is outside 1..16", s.number),
                ));
            }
            if s.number == last {
                return Err(IngestError::DuplicateSectionNumber(s.number));
            }
            if s.number < last {
                return Err(IngestError::schema(
                    format!("sections[{i}].number"),
                    "section numbers must be strictly increasing",
                ));
            }
            last = s.number;
        }
        for (i, h) in self.hazard_entries.iter().enumerate() {
            if let Some(code) = &h.h_code {
                if !is_h_code(code) {
                    return Err(IngestError::schema(
                        format!("hazards[{i}].hCode"),
                        format!("{code:?} is not an H-code"),
                    ));
                }
            }
            if self.section(h.section_number).is_none() {
                return Err(IngestError::schema(
                    format!("hazards[{i}].section"),
                    format!("section {} is not present", h.section_number),
                ));
            }
        }
        for (i, p) in self.precautionary_entries.iter().enumerate() {
            if self.section(p.section_number).is_none() {
                return Err(IngestError::schema(
                    format!("precautionary[{i}].section"),
                    format!("section {} is not present", p.section_number),
                ));
            }
        }
        for (i, code) in self.pictograms.iter().enumerate() {
            if !is_pictogram_code(code) {
                return Err(IngestError::schema(format!("pictograms[{i}]"), format!("{code:?} is not GHS01..GHS09")));
            }
        }
        for (i, ing) in self.ingredients.iter().enumerate() {
            if !(0.0..=100.0).contains(&ing.concentration_percent) {
                return Err(IngestError::ConcentrationOutOfRange {
                    field: format!("ingredients[{i}].concentrationPercent"),
                    value: ing.concentration_percent,
                });
            }
        }
        Ok(())
    }
}

/// `H` followed by three digits and up to three letters (`H319`, `H360Fd`).
pub fn is_h_code(code: &str) -> bool {
    let Some(rest) = code.strip_prefix('H') else {
        return false;
    };
    let digits = rest.chars().take_while(char::is_ascii_digit).count();
    digits == 3 && rest.len() - 3 <= 3 && rest[3..].chars().all(|c| c.is_ascii_alphabetic())
}

pub fn is_pictogram_code(code: &str) -> bool {
    matches!(code.strip_prefix("GHS0"), Some(d) if d.len() == 1 && ('1'..='9').contains(&d.chars().next().unwrap_or('0')))
}

/// CAS registry number: `NNNNNNN-NN-N` with a valid check digit.
pub fn is_cas_number(cas: &str) -> bool {
    let parts: Vec<&str> = cas.split('-').collect();
    let [a, b, c] = parts[..] else { return false };
    let digits_ok = |s: &str, lo: usize, hi: usize| (lo..=hi).contains(&s.len()) && s.chars().all(|ch| ch.is_ascii_digit());
    if !(digits_ok(a, 2, 7) && digits_ok(b, 2, 2) && digits_ok(c, 1, 1)) {
        return false;
    }
    let body: Vec<u32> = a.chars().chain(b.chars()).filter_map(|ch| ch.to_digit(10)).collect();
    let sum: u32 = body.iter().rev().enumerate().map(|(i, d)| (i as u32 + 1) * d).sum();
    c.chars().next().and_then(|ch| ch.to_digit(10)) == Some(sum % 10)
}

/// Validates a record graph. The graph should already include the taxonomy
/// so that `sh:class` checks can see concept typing.
pub fn validate_record(graph: &Graph, shapes: &Shapes) -> ValidationReport {
    validate(graph, shapes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_code_pattern() {
        for ok in ["H319", "H360Fd", "H200", "H350i"] {
            assert!(is_h_code(ok), "{ok}");
        }
        for bad in ["H31", "h319", "H3190", "H319ABCD", "P210", ""] {
            assert!(!is_h_code(bad), "{bad}");
        }
    }

    #[test]
    fn cas_check_digit() {
        assert!(is_cas_number("103-90-2"));
        assert!(is_cas_number("64-17-5"));
        assert!(is_cas_number("7732-18-5"));
        assert!(!is_cas_number("103-90-3"));
        assert!(!is_cas_number("10390-2"));
    }

    #[test]
    fn pictogram_codes() {
        assert!(is_pictogram_code("GHS07"));
        assert!(!is_pictogram_code("GHS10"));
        assert!(!is_pictogram_code("GHS00"));
    }

    #[test]
    fn minted_iris_differ_by_key() {
        let date = NaiveDate::from_ymd_opt(2021, 3, 12).unwrap();
        let k = |m: &str| UniquenessKey {
            compound: "ethanol".into(),
            manufacturer: m.into(),
            language: "en".into(),
            revision_date: date,
        };
        assert_ne!(mint_sds_iri(&k("a")), mint_sds_iri(&k("b")));
        assert_eq!(mint_sds_iri(&k("a")), mint_sds_iri(&k("a")));
    }
}
