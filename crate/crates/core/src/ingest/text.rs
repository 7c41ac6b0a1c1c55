use std::sync::OnceLock;

use chrono::NaiveDate;
use regex::Regex;

use super::annotate::{heading_number, headings_by_label};
use super::json::parse_iso_date;
use super::{
    is_cas_number, mint_sds_iri, normalize_name, HazardEntry, IngestError, Ingredient, PrecautionaryEntry, SdsRecord,
    SdsSection,
};
use crate::graph::vocab::safed;
use crate::skos::TaxonomyIndex;

const DEFAULT_LANGUAGE: &str = "en";
const MAX_HEADING_LEN: usize = 120;

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("valid regex"))
}

fn metadata_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    re(
        &RE,
        r"(?i)^\s*(product name|product identifier|trade name|produktname|manufacturer|supplier|hersteller|revision date|date of revision|überarbeitet am|language|sprache|cas number|cas no\.?|cas-nr\.?)\s*:\s*(.+?)\s*$",
    )
}

fn heading_prefix_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    re(&RE, r"(?i)^\s*(?:abschnitt\s*\d{1,2}\s*[:.\-–]?|\d{1,2}\s+)\s*")
}

fn h_code_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    re(&RE, r"\bH\d{3}[A-Za-z]{0,3}\b")
}

fn p_code_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    re(&RE, r"\bP\d{3}(?:\+P\d{3})*\b")
}

fn pictogram_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    re(&RE, r"\bGHS0[1-9]\b")
}

fn cas_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    re(&RE, r"\b\d{2,7}-\d{2}-\d\b")
}

fn percent_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    re(
        &RE,
        r"(?:(\d{1,3}(?:[.,]\d+)?)\s*(?:-|–|to|bis)\s*)?(\d{1,3}(?:[.,]\d+)?)\s*%",
    )
}

/// Accepts ISO dates and a few unambiguous written forms. Slash forms such as
/// `03/04/2021` are rejected because day and month order is unknown.
pub fn parse_date_lenient(text: &str) -> Option<NaiveDate> {
    let t = text.trim();
    if let Some(d) = parse_iso_date(t) {
        return Some(d);
    }
    if t.contains('/') {
        return None;
    }
    ["%d %B %Y", "%B %d, %Y", "%d %b %Y", "%b %d, %Y", "%d-%b-%Y", "%d.%m.%Y"]
        .iter()
        .find_map(|f| NaiveDate::parse_from_str(t, f).ok())
}

struct Metadata {
    compound: Option<String>,
    manufacturer: Option<String>,
    revision: Option<String>,
    language: Option<String>,
    cas: Option<String>,
}

fn read_metadata(lines: &[&str]) -> Metadata {
    let mut m = Metadata {
        compound: None,
        manufacturer: None,
        revision: None,
        language: None,
        cas: None,
    };
    for line in lines {
        let Some(caps) = metadata_re().captures(line) else { continue };
        let key = caps[1].to_lowercase();
        let value = caps[2].to_string();
        let slot = match key.as_str() {
            "product name" | "product identifier" | "trade name" | "produktname" => &mut m.compound,
            "manufacturer" | "supplier" | "hersteller" => &mut m.manufacturer,
            "revision date" | "date of revision" | "überarbeitet am" => &mut m.revision,
            "language" | "sprache" => &mut m.language,
            _ => &mut m.cas,
        };
        if slot.is_none() {
            *slot = Some(value);
        }
    }
    m
}

/// Unique heading concept number for a line, if the line is a heading.
fn heading_of(line: &str, taxonomy: &TaxonomyIndex, language: &str) -> Option<u8> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.len() > MAX_HEADING_LEN {
        return None;
    }
    let resolve = |text: &str| -> Option<u8> {
        let hits = headings_by_label(taxonomy, text, language);
        let numbers: std::collections::BTreeSet<u8> =
            hits.iter().filter_map(|c| heading_number(taxonomy, c)).collect();
        (numbers.len() == 1).then(|| *numbers.iter().next().expect("one number"))
    };
    resolve(trimmed).or_else(|| {
        let stripped = heading_prefix_re().replace(trimmed, "");
        (stripped.len() != trimmed.len()).then(|| resolve(&stripped)).flatten()
    })
}

fn strip_separators(s: &str) -> &str {
    s.trim_matches(|c: char| c.is_whitespace() || matches!(c, ':' | '-' | '–' | ',' | ';' | '|' | '.' | '(' | ')'))
}

fn is_classification_line(line: &str, taxonomy: &TaxonomyIndex, language: &str) -> bool {
    let hits = |lang: Option<&str>| {
        taxonomy
            .lookup_by_label(line, lang)
            .into_iter()
            .filter(|c| taxonomy.concept(c).is_some_and(|k| k.has_kind(safed::CLASSIFICATION)))
            .count()
    };
    let n = hits(Some(language));
    n == 1 || (n == 0 && hits(None) == 1)
}

fn parse_number(s: &str) -> Option<f64> {
    s.replace(',', ".").parse().ok()
}

fn ingredient_from_line(line: &str) -> Option<Ingredient> {
    let pct = percent_re().captures(line)?;
    let whole = pct.get(0).expect("match");
    let concentration_percent = parse_number(&pct[2])?;
    let cas = cas_re().find(line).filter(|m| is_cas_number(m.as_str()));
    let mut end = whole.start();
    if let Some(m) = cas {
        end = end.min(m.start());
    }
    if let Some(i) = line.find('(') {
        end = end.min(i);
    }
    let lower = line.to_lowercase();
    if let Some(i) = lower.find("cas") {
        end = end.min(i);
    }
    let name = strip_separators(&line[..end]);
    if name.is_empty() {
        return None;
    }
    Some(Ingredient {
        name: name.to_string(),
        cas_number: cas.map(|m| m.as_str().to_string()),
        concentration_percent,
    })
}

/// Parses a plain-text SDS. Headings are lines that resolve to exactly one
/// SDS heading concept through the taxonomy labels (with `SECTION n:` or
/// `n.` enumerators stripped). Metadata comes from `Key: value` lines.
pub fn parse_sds_text(text: &str, taxonomy: &TaxonomyIndex) -> Result<SdsRecord, IngestError> {
    let lines: Vec<&str> = text.lines().collect();
    let meta = read_metadata(&lines);
    let language = meta
        .language
        .as_deref()
        .map(|l| l.trim().to_ascii_lowercase())
        .unwrap_or_else(|| DEFAULT_LANGUAGE.to_string());

    let mut sections: Vec<(SdsSection, Vec<&str>)> = Vec::new();
    for line in &lines {
        if let Some(number) = heading_of(line, taxonomy, &language) {
            if sections.iter().any(|(s, _)| s.number == number) {
                return Err(IngestError::DuplicateSectionNumber(number));
            }
            if sections.last().is_some_and(|(s, _)| s.number > number) {
                return Err(IngestError::schema(
                    format!("sections[{}].number", sections.len()),
                    "section numbers must be strictly increasing",
                ));
            }
            sections.push((
                SdsSection {
                    number,
                    heading_text: line.trim().to_string(),
                    heading_concept: None,
                    body_text: String::new(),
                },
                Vec::new(),
            ));
        } else if let Some((_, body)) = sections.last_mut() {
            body.push(line);
        }
    }
    if sections.is_empty() {
        return Err(IngestError::NoSectionsDetected);
    }

    let compound_name = meta
        .compound
        .ok_or_else(|| IngestError::schema("compound.name", "no 'Product name:' line found"))?;
    let manufacturer = meta
        .manufacturer
        .ok_or_else(|| IngestError::schema("manufacturer", "no 'Manufacturer:' line found"))?;
    let revision_text = meta
        .revision
        .ok_or_else(|| IngestError::schema("revisionDate", "no 'Revision date:' line found"))?;
    let revision_date = parse_date_lenient(&revision_text).ok_or_else(|| IngestError::InvalidDate {
        field: "revisionDate".into(),
        value: revision_text.clone(),
    })?;
    let cas_number = meta.cas.filter(|c| is_cas_number(c));

    let mut hazard_entries = Vec::new();
    let mut precautionary_entries = Vec::new();
    let mut pictograms: Vec<String> = Vec::new();
    let mut ingredients = Vec::new();
    let compound_key = normalize_name(&compound_name);

    for (section, body) in &mut sections {
        let number = section.number;
        let mut seen_codes: Vec<String> = Vec::new();
        for line in body.iter() {
            if metadata_re().is_match(line) {
                continue;
            }
            let codes: Vec<_> = h_code_re().find_iter(line).collect();
            for (i, m) in codes.iter().enumerate() {
                let code = m.as_str().to_string();
                if seen_codes.contains(&code) {
                    continue;
                }
                let end = codes.get(i + 1).map_or(line.len(), |n| n.start());
                let rest = &line[m.end()..end];
                let rest = match p_code_re().find(rest) {
                    Some(p) => &rest[..p.start()],
                    None => rest,
                };
                let statement = strip_separators(rest);
                let statement_text = if statement.is_empty() { code.clone() } else { statement.to_string() };
                seen_codes.push(code.clone());
                hazard_entries.push(HazardEntry {
                    h_code: Some(code),
                    statement_text,
                    classification_concept: None,
                    section_number: number,
                });
            }
            let pcodes: Vec<_> = p_code_re().find_iter(line).collect();
            for (i, m) in pcodes.iter().enumerate() {
                let end = pcodes.get(i + 1).map_or(line.len(), |n| n.start());
                let end = h_code_re().find_at(line, m.end()).map_or(end, |h| end.min(h.start()));
                let statement = strip_separators(&line[m.end()..end]);
                precautionary_entries.push(PrecautionaryEntry {
                    p_code: Some(m.as_str().to_string()),
                    statement_text: if statement.is_empty() { m.as_str().to_string() } else { statement.to_string() },
                    section_number: number,
                });
            }
            for m in pictogram_re().find_iter(line) {
                let code = m.as_str().to_string();
                if !pictograms.contains(&code) {
                    pictograms.push(code);
                }
            }
            if number == 2 && codes.is_empty() && pcodes.is_empty() {
                let candidate = strip_separators(line);
                if !candidate.is_empty() && is_classification_line(candidate, taxonomy, &language) {
                    hazard_entries.push(HazardEntry {
                        h_code: None,
                        statement_text: candidate.to_string(),
                        classification_concept: None,
                        section_number: number,
                    });
                }
            }
            if number == 3 {
                if let Some(ing) = ingredient_from_line(line) {
                    if normalize_name(&ing.name) != compound_key {
                        ingredients.push(ing);
                    }
                }
            }
        }
        section.body_text = body.join("\n").trim().to_string();
    }

    let mut record = SdsRecord {
        id: String::new(),
        compound_name: compound_name.trim().to_string(),
        cas_number,
        manufacturer: manufacturer.trim().to_string(),
        language,
        revision_date,
        sections: sections.into_iter().map(|(s, _)| s).collect(),
        hazard_entries,
        precautionary_entries,
        pictograms,
        ingredients,
    };
    record.check()?;
    record.id = mint_sds_iri(&record.key());
    Ok(record)
}
