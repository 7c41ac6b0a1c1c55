mod common;

use std::collections::BTreeSet;

use regex::Regex;
use sdskg::ingest::{annotate, heading_concept_for_number, parse_sds_text, IngestError};
use sdskg::skos::load_taxonomy;

fn taxonomy() -> sdskg::skos::TaxonomyIndex {
    load_taxonomy(&sdskg::bundled::taxonomy_graph())
}

/// Codes seeded in a fixture, found by a plain scan independent of the parser.
fn seeded_codes(text: &str) -> BTreeSet<String> {
    let re = Regex::new(r"H\d{3}").unwrap();
    text.lines()
        .flat_map(|l| re.find_iter(l).map(|m| m.as_str().to_string()).collect::<Vec<_>>())
        .collect()
}

#[test]
fn every_text_fixture_resolves_all_sixteen_headings() {
    let tax = taxonomy();
    let fixtures = common::text_fixtures();
    assert_eq!(fixtures.len(), 4);
    for (name, text) in fixtures {
        let record = parse_sds_text(&text, &tax).unwrap_or_else(|e| panic!("{name}: {e}"));
        let numbers: Vec<u8> = record.sections.iter().map(|s| s.number).collect();
        assert_eq!(numbers, (1..=16).collect::<Vec<u8>>(), "{name}");
        let (annotated, _) = annotate(record, &tax);
        for s in &annotated.sections {
            assert_eq!(
                s.heading_concept,
                heading_concept_for_number(&tax, s.number),
                "{name}: section {} heading {:?}",
                s.number,
                s.heading_text
            );
        }
    }
}

#[test]
fn every_seeded_h_code_is_recovered() {
    let tax = taxonomy();
    for (name, text) in common::text_fixtures() {
        let record = parse_sds_text(&text, &tax).unwrap();
        let got: BTreeSet<String> = record.hazard_entries.iter().filter_map(|h| h.h_code.clone()).collect();
        let want = seeded_codes(&text);
        assert!(!want.is_empty(), "{name}");
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn metadata_and_ingredients() {
    let tax = taxonomy();
    let r = parse_sds_text(&common::fixture("sds/text/vendor_vwr_acetomenophin-400.txt"), &tax).unwrap();
    assert_eq!(r.compound_name, "Acetomenophin 400");
    assert_eq!(r.manufacturer, "VWR International");
    assert_eq!(r.revision_date.to_string(), "2021-03-12");
    assert_eq!(r.language, "en");
    let names: Vec<(&str, f64)> = r.ingredients.iter().map(|i| (i.name.as_str(), i.concentration_percent)).collect();
    assert_eq!(names, vec![("Acetaminophen", 12.0), ("Cellulose, microcrystalline", 40.0)]);
    assert!(r.hazard_entries.iter().any(|h| h.h_code.is_none() && h.statement_text == "Eye Irrit. 2A"));

    let de = parse_sds_text(&common::fixture("sds/text/vendor_merck_ethanol_de.txt"), &tax).unwrap();
    assert_eq!(de.language, "de");
    assert_eq!(de.revision_date.to_string(), "2023-06-01");
    assert_eq!(de.cas_number.as_deref(), Some("64-17-5"));
    assert!(de.ingredients.is_empty(), "a substance is not listed as its own ingredient");
}

#[test]
fn text_mode_errors() {
    let tax = taxonomy();
    assert_eq!(parse_sds_text("nothing here\n", &tax), Err(IngestError::NoSectionsDetected));
    let dup = "Product name: X\nManufacturer: Y\nRevision date: 2021-01-01\nSECTION 1: Identification\nSECTION 1: Identification\n";
    assert_eq!(parse_sds_text(dup, &tax), Err(IngestError::DuplicateSectionNumber(1)));
    let slash = "Product name: X\nManufacturer: Y\nRevision date: 03/04/2021\nSECTION 1: Identification\n";
    assert!(matches!(parse_sds_text(slash, &tax), Err(IngestError::InvalidDate { .. })));
    let missing = "Manufacturer: Y\nRevision date: 2021-01-01\nSECTION 1: Identification\n";
    assert_eq!(parse_sds_text(missing, &tax).unwrap_err().field(), Some("compound.name"));
}

#[test]
fn heading_lookup_ignores_case_and_enumerators() {
    let tax = taxonomy();
    let a = tax.lookup_by_label("hAzArD(s) IDENTIFICATION", None);
    let b = tax.lookup_by_label("Hazard(s) identification", None);
    assert_eq!(a, b);
    assert_eq!(tax.lookup_by_label("SECTION 2: Hazard(s) identification", None), b);
}
