use chrono::NaiveDate;
use serde_json::{Map, Value};

use super::{
    is_cas_number, is_h_code, mint_sds_iri, HazardEntry, IngestError, Ingredient, PrecautionaryEntry, SdsRecord,
    SdsSection, MAX_SECTION,
};

type Obj = Map<String, Value>;

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Obj, IngestError> {
    v.as_object().ok_or_else(|| IngestError::schema(field, "must be an object"))
}

fn only_keys(obj: &Obj, field: &str, allowed: &[&str]) -> Result<(), IngestError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(IngestError::schema(
            if field.is_empty() { k.clone() } else { format!("{field}.{k}") },
            "unknown field",
        )),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Obj, parent: &str, key: &str) -> Result<&'a Value, IngestError> {
    obj.get(key)
        .filter(|v| !v.is_null())
        .ok_or_else(|| IngestError::schema(path(parent, key), "is required"))
}

fn path(parent: &str, key: &str) -> String {
    if parent.is_empty() {
        key.to_string()
    } else {
        format!("{parent}.{key}")
    }
}

fn string(v: &Value, field: &str) -> Result<String, IngestError> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| IngestError::schema(field, "must be a string"))
}

fn non_empty(v: &Value, field: &str) -> Result<String, IngestError> {
    let s = string(v, field)?;
    if s.trim().is_empty() {
        return Err(IngestError::schema(field, "must be non-empty"));
    }
    Ok(s.trim().to_string())
}

fn optional_string(obj: &Obj, parent: &str, key: &str) -> Result<Option<String>, IngestError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => {
            let s = string(v, &path(parent, key))?;
            let s = s.trim();
            Ok((!s.is_empty()).then(|| s.to_string()))
        }
    }
}

fn optional_cas(obj: &Obj, parent: &str, key: &str) -> Result<Option<String>, IngestError> {
    let cas = optional_string(obj, parent, key)?;
    if let Some(c) = &cas {
        if !is_cas_number(c) {
            return Err(IngestError::schema(path(parent, key), format!("{c:?} is not a valid CAS number")));
        }
    }
    Ok(cas)
}

fn section_number(v: &Value, field: &str) -> Result<u8, IngestError> {
    v.as_u64()
        .filter(|n| (1..=MAX_SECTION as u64).contains(n))
        .map(|n| n as u8)
        .ok_or_else(|| IngestError::schema(field, "must be an integer in 1..16"))
}

fn array<'a>(obj: &'a Obj, key: &str) -> Result<&'a [Value], IngestError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(&[]),
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(IngestError::schema(key, "must be an array")),
    }
}

/// Parses the JSON ingest format:
///
/// ```json
/// {
///   "compound": {"name": "Ethanol", "cas": "64-17-5"},
///   "manufacturer": "Sigma-Aldrich",
///   "language": "en",
///   "revisionDate": "2023-06-01",
///   "sections": [{"number": 2, "heading": "Hazard(s) identification", "text": "..."}],
///   "hazards": [{"hCode": "H225", "statement": "Highly flammable liquid and vapour", "section": 2}],
///   "precautionary": [{"pCode": "P210", "statement": "Keep away from heat.", "section": 2}],
///   "pictograms": ["GHS02"],
///   "ingredients": [{"name": "Ethanol", "cas": "64-17-5", "concentrationPercent": 99.5}]
/// }
/// ```
pub fn parse_sds_json(text: &str) -> Result<SdsRecord, IngestError> {
    let root: Value = serde_json::from_str(text).map_err(|e| IngestError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = object(&root, "$")?;
    only_keys(
        obj,
        "",
        &[
            "compound",
            "manufacturer",
            "language",
            "revisionDate",
            "sections",
            "hazards",
            "precautionary",
            "pictograms",
            "ingredients",
        ],
    )?;

    let compound = object(required(obj, "", "compound")?, "compound")?;
    only_keys(compound, "compound", &["name", "cas"])?;
    let compound_name = non_empty(required(compound, "compound", "name")?, "compound.name")?;
    let cas_number = optional_cas(compound, "compound", "cas")?;

    let manufacturer = non_empty(required(obj, "", "manufacturer")?, "manufacturer")?;
    let language = non_empty(required(obj, "", "language")?, "language")?;
    if !crate::graph::term::is_language_tag(&language) {
        return Err(IngestError::schema("language", format!("{language:?} is not a BCP-47 language tag")));
    }
    let language = language.to_ascii_lowercase();

    let date_text = string(required(obj, "", "revisionDate")?, "revisionDate")?;
    let revision_date = parse_iso_date(&date_text).ok_or_else(|| IngestError::InvalidDate {
        field: "revisionDate".into(),
        value: date_text.clone(),
    })?;

    let mut sections = Vec::new();
    for (i, v) in array(obj, "sections")?.iter().enumerate() {
        let field = format!("sections[{i}]");
        let s = object(v, &field)?;
        only_keys(s, &field, &["number", "heading", "text"])?;
        sections.push(SdsSection {
            number: section_number(required(s, &field, "number")?, &path(&field, "number"))?,
            heading_text: non_empty(required(s, &field, "heading")?, &path(&field, "heading"))?,
            heading_concept: None,
            body_text: optional_string(s, &field, "text")?.unwrap_or_default(),
        });
    }

    let mut hazard_entries = Vec::new();
    for (i, v) in array(obj, "hazards")?.iter().enumerate() {
        let field = format!("hazards[{i}]");
        let h = object(v, &field)?;
        only_keys(h, &field, &["hCode", "statement", "section"])?;
        let h_code = optional_string(h, &field, "hCode")?;
        if let Some(code) = &h_code {
            if !is_h_code(code) {
                return Err(IngestError::schema(path(&field, "hCode"), format!("{code:?} is not an H-code")));
            }
        }
        hazard_entries.push(HazardEntry {
            h_code,
            statement_text: non_empty(required(h, &field, "statement")?, &path(&field, "statement"))?,
            classification_concept: None,
            section_number: section_number(required(h, &field, "section")?, &path(&field, "section"))?,
        });
    }

    let mut precautionary_entries = Vec::new();
    for (i, v) in array(obj, "precautionary")?.iter().enumerate() {
        let field = format!("precautionary[{i}]");
        let p = object(v, &field)?;
        only_keys(p, &field, &["pCode", "statement", "section"])?;
        precautionary_entries.push(PrecautionaryEntry {
            p_code: optional_string(p, &field, "pCode")?,
            statement_text: non_empty(required(p, &field, "statement")?, &path(&field, "statement"))?,
            section_number: section_number(required(p, &field, "section")?, &path(&field, "section"))?,
        });
    }

    let mut pictograms: Vec<String> = Vec::new();
    for (i, v) in array(obj, "pictograms")?.iter().enumerate() {
        let code = string(v, &format!("pictograms[{i}]"))?;
        if !pictograms.contains(&code) {
            pictograms.push(code);
        }
    }

    let mut ingredients = Vec::new();
    for (i, v) in array(obj, "ingredients")?.iter().enumerate() {
        let field = format!("ingredients[{i}]");
        let ing = object(v, &field)?;
        only_keys(ing, &field, &["name", "cas", "concentrationPercent"])?;
        let conc_field = path(&field, "concentrationPercent");
        let concentration_percent = required(ing, &field, "concentrationPercent")?
            .as_f64()
            .ok_or_else(|| IngestError::schema(&conc_field, "must be a number"))?;
        ingredients.push(Ingredient {
            name: non_empty(required(ing, &field, "name")?, &path(&field, "name"))?,
            cas_number: optional_cas(ing, &field, "cas")?,
            concentration_percent,
        });
    }

    let mut record = SdsRecord {
        id: String::new(),
        compound_name,
        cas_number,
        manufacturer,
        language,
        revision_date,
        sections,
        hazard_entries,
        precautionary_entries,
        pictograms,
        ingredients,
    };
    record.check()?;
    record.id = mint_sds_iri(&record.key());
    Ok(record)
}

/// Strict `YYYY-MM-DD`.
pub(crate) fn parse_iso_date(text: &str) -> Option<NaiveDate> {
    let t = text.trim();
    let b = t.as_bytes();
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(t, "%Y-%m-%d").ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "compound": {"name": "Ethanol"},
        "manufacturer": "Acme",
        "language": "en",
        "revisionDate": "2021-03-12",
        "sections": [{"number": 1, "heading": "Identification", "text": "Ethanol"}]
    }"#;

    fn with(key: &str, value: &str) -> String {
        let mut v: Value = serde_json::from_str(MINIMAL).unwrap();
        v[key] = serde_json::from_str(value).unwrap();
        v.to_string()
    }

    #[test]
    fn minimal_record() {
        let r = parse_sds_json(MINIMAL).unwrap();
        assert_eq!(r.sections.len(), 1);
        assert!(r.hazard_entries.is_empty());
        assert!(r.id.starts_with(crate::graph::vocab::SDS_INSTANCE_NS));
    }

    #[test]
    fn concentration_out_of_range() {
        let text = with("ingredients", r#"[{"name": "X", "concentrationPercent": 104.0}]"#);
        assert!(matches!(
            parse_sds_json(&text),
            Err(IngestError::ConcentrationOutOfRange { value, .. }) if value == 104.0
        ));
    }

    #[test]
    fn ambiguous_date_rejected() {
        let text = with("revisionDate", r#""03/04/2021""#);
        assert!(matches!(parse_sds_json(&text), Err(IngestError::InvalidDate { .. })));
    }

    #[test]
    fn field_errors_name_the_field() {
        let text = with("hazards", r#"[{"hCode": "X1", "statement": "s", "section": 1}]"#);
        assert_eq!(parse_sds_json(&text).unwrap_err().field(), Some("hazards[0].hCode"));
        let text = with("sections", r#"[{"number": 17, "heading": "h"}]"#);
        assert_eq!(parse_sds_json(&text).unwrap_err().field(), Some("sections[0].number"));
        let text = with("bogus", "1");
        assert_eq!(parse_sds_json(&text).unwrap_err().field(), Some("bogus"));
    }

    #[test]
    fn duplicate_section() {
        let text = with(
            "sections",
            r#"[{"number": 2, "heading": "a"}, {"number": 2, "heading": "b"}]"#,
        );
        assert_eq!(parse_sds_json(&text), Err(IngestError::DuplicateSectionNumber(2)));
    }

    #[test]
    fn syntax_error_has_position() {
        assert!(matches!(parse_sds_json("{\n  \"a\": }"), Err(IngestError::Json { line: 2, .. })));
    }
}

/// Writes a record back in the ingest payload schema; annotations and the
/// minted id are not part of the payload.
pub fn to_sds_json(record: &SdsRecord) -> Value {
    let mut compound = Obj::new();
    compound.insert("name".into(), record.compound_name.clone().into());
    if let Some(cas) = &record.cas_number {
        compound.insert("cas".into(), cas.clone().into());
    }
    let sections: Vec<Value> = record
        .sections
        .iter()
        .map(|s| serde_json::json!({ "number": s.number, "heading": s.heading_text, "text": s.body_text }))
        .collect();
    let hazards: Vec<Value> = record
        .hazard_entries
        .iter()
        .map(|h| {
            let mut o = Obj::new();
            if let Some(code) = &h.h_code {
                o.insert("hCode".into(), code.clone().into());
            }
            o.insert("statement".into(), h.statement_text.clone().into());
            o.insert("section".into(), h.section_number.into());
            Value::Object(o)
        })
        .collect();
    let precautionary: Vec<Value> = record
        .precautionary_entries
        .iter()
        .map(|p| {
            let mut o = Obj::new();
            if let Some(code) = &p.p_code {
                o.insert("pCode".into(), code.clone().into());
            }
            o.insert("statement".into(), p.statement_text.clone().into());
            o.insert("section".into(), p.section_number.into());
            Value::Object(o)
        })
        .collect();
    let ingredients: Vec<Value> = record
        .ingredients
        .iter()
        .map(|i| {
            let mut o = Obj::new();
            o.insert("name".into(), i.name.clone().into());
            if let Some(cas) = &i.cas_number {
                o.insert("cas".into(), cas.clone().into());
            }
            o.insert("concentrationPercent".into(), i.concentration_percent.into());
            Value::Object(o)
        })
        .collect();
    serde_json::json!({
        "compound": compound,
        "manufacturer": record.manufacturer,
        "language": record.language,
        "revisionDate": record.revision_date.format("%Y-%m-%d").to_string(),
        "sections": sections,
        "hazards": hazards,
        "precautionary": precautionary,
        "pictograms": record.pictograms,
        "ingredients": ingredients,
    })
}
