use super::{normalize_name, short_hash, SdsRecord};
use crate::graph::vocab::{doc, ghs, rdf, safed, xsd, SDS_INSTANCE_NS};
use crate::graph::{Graph, Literal, Term, Triple};

/// Compound IRI: a readable slug plus a hash of the normalized name, so SDS
/// for the same compound share one node.
pub fn compound_iri(name: &str) -> String {
    let norm = normalize_name(name);
    let mut slug = String::new();
    for c in norm.chars() {
        if c.is_ascii_alphanumeric() {
            slug.push(c);
        } else if !slug.ends_with('-') && !slug.is_empty() {
            slug.push('-');
        }
        if slug.len() >= 40 {
            break;
        }
    }
    let slug = slug.trim_end_matches('-');
    let digest = short_hash(&[&norm], 8);
    if slug.is_empty() {
        format!("{SDS_INSTANCE_NS}compound/{digest}")
    } else {
        format!("{SDS_INSTANCE_NS}compound/{slug}-{digest}")
    }
}

struct Emitter {
    graph: Graph,
}

impl Emitter {
    fn add(&mut self, s: &str, p: &str, o: Term) {
        let t = Triple::new(Term::Iri(s.to_string()), Term::Iri(p.to_string()), o).expect("IRIs minted here are valid");
        self.graph.insert(t);
    }

    fn link(&mut self, s: &str, p: &str, o: &str) {
        self.add(s, p, Term::Iri(o.to_string()));
    }

    fn text(&mut self, s: &str, p: &str, text: &str) {
        self.add(s, p, Term::string(text));
    }
}

/// Emits the DPG-DoC document structure and the DPG-SafeD compound data for
/// an (annotated) record. Output depends only on the record.
pub fn to_graph(record: &SdsRecord) -> Graph {
    let mut e = Emitter {
        graph: Graph::new().with_standard_prefixes(),
    };
    let sds = record.id.as_str();
    let compound = compound_iri(&record.compound_name);

    e.link(sds, rdf::TYPE, doc::DOCUMENT);
    e.link(sds, rdf::TYPE, safed::SAFETY_DATA_SHEET);
    let title = format!("{} Safety Data Sheet", record.compound_name.trim());
    let title = Literal::lang(title.clone(), &record.language)
        .map(Term::Literal)
        .unwrap_or_else(|_| Term::string(title));
    e.add(sds, doc::TITLE, title);
    e.link(sds, doc::CONFORMS_TO, ghs::SDS_FORMAT);
    e.link(sds, safed::DESCRIBES, &compound);
    e.text(sds, safed::MANUFACTURER, record.manufacturer.trim());
    e.text(sds, safed::LANGUAGE, &record.language);
    e.add(
        sds,
        safed::REVISION_DATE,
        Term::Literal(Literal::typed(record.revision_date.to_string(), xsd::DATE).expect("static datatype")),
    );
    for code in &record.pictograms {
        e.link(sds, safed::PICTOGRAM, &ghs::pictogram(code));
    }

    for section in &record.sections {
        let container = format!("{sds}/section-{:02}", section.number);
        e.link(sds, doc::HAS_CONTAINER, &container);
        e.link(&container, rdf::TYPE, doc::CONTAINER);
        e.add(&container, doc::ORDER, Term::Literal(Literal::integer(i64::from(section.number))));
        e.text(&container, doc::HEADING_TEXT, &section.heading_text);
        if let Some(marker) = &section.heading_concept {
            e.link(&container, doc::HAS_MARKER, marker);
        }
        if !section.body_text.trim().is_empty() {
            e.text(&container, doc::HAS_CONTENT, &section.body_text);
        }
        for h in record.hazard_entries.iter().filter(|h| h.section_number == section.number) {
            if let Some(c) = &h.classification_concept {
                e.link(&container, doc::HAS_CONTENT, c);
            }
        }
        if section.number == 2 {
            for code in &record.pictograms {
                e.link(&container, doc::HAS_CONTENT, &ghs::pictogram(code));
            }
        }
    }

    e.link(&compound, rdf::TYPE, safed::COMPOUND);
    e.text(&compound, safed::COMPOUND_NAME, record.compound_name.trim());
    if let Some(cas) = &record.cas_number {
        e.text(&compound, safed::CAS_NUMBER, cas);
    }

    for (i, h) in record.hazard_entries.iter().enumerate() {
        let entry = format!("{sds}/hazard-{:02}", i + 1);
        e.link(sds, safed::HAZARD_STATEMENT, &entry);
        e.link(&entry, rdf::TYPE, safed::HAZARD_STATEMENT_ENTRY);
        e.text(&entry, safed::STATEMENT_TEXT, &h.statement_text);
        e.add(&entry, safed::SECTION, Term::Literal(Literal::integer(i64::from(h.section_number))));
        let display = match &h.h_code {
            Some(code) => {
                e.text(&entry, safed::H_CODE, code);
                format!("{code}: {}", h.statement_text)
            }
            None => h.statement_text.clone(),
        };
        e.text(&entry, safed::LABEL_DISPLAY, &display);
        if let Some(c) = &h.classification_concept {
            e.link(&entry, safed::CLASSIFICATION_CONCEPT, c);
            e.link(&compound, safed::CLASSIFICATION_PROP, c);
        }
    }

    for (i, p) in record.precautionary_entries.iter().enumerate() {
        let entry = format!("{sds}/precaution-{:02}", i + 1);
        e.link(sds, safed::PRECAUTIONARY_STATEMENT, &entry);
        e.link(&entry, rdf::TYPE, safed::PRECAUTIONARY_STATEMENT_ENTRY);
        e.text(&entry, safed::STATEMENT_TEXT, &p.statement_text);
        e.add(&entry, safed::SECTION, Term::Literal(Literal::integer(i64::from(p.section_number))));
        if let Some(code) = &p.p_code {
            e.text(&entry, safed::P_CODE, code);
        }
    }

    if !record.ingredients.is_empty() {
        e.link(&compound, rdf::TYPE, safed::MIXTURE);
    }
    for (i, ing) in record.ingredients.iter().enumerate() {
        let node = format!("{sds}/ingredient-{:02}", i + 1);
        let substance = compound_iri(&ing.name);
        e.link(&compound, safed::HAS_INGREDIENT, &node);
        e.link(&node, rdf::TYPE, safed::INGREDIENT);
        e.text(&node, safed::INGREDIENT_NAME, ing.name.trim());
        if let Some(cas) = &ing.cas_number {
            e.text(&node, safed::CAS_NUMBER, cas);
        }
        e.add(&node, safed::CONCENTRATION, Term::Literal(Literal::decimal(ing.concentration_percent)));
        e.link(&node, safed::SUBSTANCE, &substance);
        if substance != compound {
            e.link(&substance, rdf::TYPE, safed::COMPOUND);
            e.text(&substance, safed::COMPOUND_NAME, ing.name.trim());
        }
    }
    e.graph
}
