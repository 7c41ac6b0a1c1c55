//! A compact JSON format for authoring taxonomies, compiled to triples.
//!
//! ```json
//! {
//!   "prefixes": {"ex": "http://example.org/"},
//!   "schemes": [{"iri": "ex:S", "title": "Example"}],
//!   "classes": [{"iri": "ex:Marker", "subClassOf": "skos:Concept"}],
//!   "concepts": [{
//!     "iri": "ex:a", "kinds": ["ex:Marker"], "inScheme": ["ex:S"], "topConceptOf": ["ex:S"],
//!     "prefLabel": {"en": "A"}, "altLabel": {"en": ["Alpha"]},
//!     "xlLabels": [{"literalForm": "A.", "language": "en", "role": "alt"}],
//!     "broader": [], "notation": "A1", "literals": {"ex:note": "free text"}
//!   }]
//! }
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;

use super::LabelRole;
use crate::graph::vocab::{self, dcterms, rdf, rdfs, skos, skosxl};
use crate::graph::{Graph, Literal, Term, TermError, Triple};

#[derive(Debug, thiserror::Error)]
pub enum AuthoringError {
    #[error("invalid taxonomy JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("undefined prefix {prefix:?} in {value:?}")]
    UndefinedPrefix { prefix: String, value: String },
    #[error("invalid term: {0}")]
    Term(#[from] TermError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    prefixes: BTreeMap<String, String>,
    #[serde(default)]
    schemes: Vec<SchemeDoc>,
    #[serde(default)]
    classes: Vec<ClassDoc>,
    #[serde(default)]
    concepts: Vec<ConceptDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeDoc {
    iri: String,
    #[serde(default)]
    title: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ClassDoc {
    iri: String,
    sub_class_of: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ConceptDoc {
    iri: String,
    #[serde(default)]
    kinds: Vec<String>,
    #[serde(default)]
    in_scheme: Vec<String>,
    #[serde(default)]
    top_concept_of: Vec<String>,
    #[serde(default)]
    pref_label: BTreeMap<String, String>,
    #[serde(default)]
    alt_label: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    hidden_label: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    xl_labels: Vec<XlDoc>,
    #[serde(default)]
    broader: Vec<String>,
    #[serde(default)]
    notation: Option<String>,
    #[serde(default)]
    literals: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct XlDoc {
    #[serde(default)]
    iri: Option<String>,
    literal_form: String,
    #[serde(default)]
    language: Option<String>,
    role: LabelRole,
}

struct Ctx {
    prefixes: BTreeMap<String, String>,
    graph: Graph,
    blank: usize,
}

impl Ctx {
    fn expand(&self, value: &str) -> Result<Term, AuthoringError> {
        if value.contains("://") || value.starts_with("urn:") {
            return Ok(Term::iri(value)?);
        }
        if let Some((prefix, local)) = value.split_once(':') {
            let ns = self
                .prefixes
                .get(prefix)
                .ok_or_else(|| AuthoringError::UndefinedPrefix {
                    prefix: prefix.to_string(),
                    value: value.to_string(),
                })?;
            return Ok(Term::iri(format!("{ns}{local}"))?);
        }
        Err(AuthoringError::UndefinedPrefix {
            prefix: String::new(),
            value: value.to_string(),
        })
    }

    fn add(&mut self, s: &Term, p: &str, o: Term) -> Result<(), AuthoringError> {
        self.graph.insert(Triple::new(s.clone(), Term::Iri(p.to_string()), o)?);
        Ok(())
    }
}

fn label(text: &str, lang: &str) -> Result<Term, AuthoringError> {
    if lang.is_empty() {
        Ok(Term::string(text))
    } else {
        Ok(Term::Literal(Literal::lang(text, lang)?))
    }
}

/// Compiles the JSON authoring format into a graph of SKOS/SKOS-XL triples.
pub fn compile_authoring_json(text: &str) -> Result<Graph, AuthoringError> {
    let doc: Document = serde_json::from_str(text)?;
    let mut prefixes: BTreeMap<String, String> = vocab::standard_prefixes()
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    prefixes.extend(doc.prefixes);
    let mut ctx = Ctx {
        prefixes: prefixes.clone(),
        graph: Graph::new(),
        blank: 0,
    };
    for (p, ns) in &prefixes {
        ctx.graph.set_prefix(p.clone(), ns.clone());
    }

    for scheme in &doc.schemes {
        let s = ctx.expand(&scheme.iri)?;
        ctx.add(&s, rdf::TYPE, Term::Iri(skos::CONCEPT_SCHEME.into()))?;
        if let Some(title) = &scheme.title {
            ctx.add(&s, dcterms::TITLE, Term::string(title))?;
        }
    }
    for class in &doc.classes {
        let c = ctx.expand(&class.iri)?;
        let sup = ctx.expand(&class.sub_class_of)?;
        ctx.add(&c, rdfs::SUB_CLASS_OF, sup)?;
    }
    for concept in &doc.concepts {
        let c = ctx.expand(&concept.iri)?;
        ctx.add(&c, rdf::TYPE, Term::Iri(skos::CONCEPT.into()))?;
        for kind in &concept.kinds {
            let k = ctx.expand(kind)?;
            ctx.add(&c, rdf::TYPE, k)?;
        }
        for s in &concept.in_scheme {
            let s = ctx.expand(s)?;
            ctx.add(&c, skos::IN_SCHEME, s)?;
        }
        for s in &concept.top_concept_of {
            let s = ctx.expand(s)?;
            ctx.add(&c, skos::TOP_CONCEPT_OF, s.clone())?;
            ctx.add(&c, skos::IN_SCHEME, s)?;
        }
        for (lang, text) in &concept.pref_label {
            ctx.add(&c, skos::PREF_LABEL, label(text, lang)?)?;
        }
        for (pred, map) in [(skos::ALT_LABEL, &concept.alt_label), (skos::HIDDEN_LABEL, &concept.hidden_label)] {
            for (lang, texts) in map {
                for text in texts {
                    ctx.add(&c, pred, label(text, lang)?)?;
                }
            }
        }
        for xl in &concept.xl_labels {
            let node = match &xl.iri {
                Some(i) => ctx.expand(i)?,
                None => {
                    ctx.blank += 1;
                    Term::BlankNode(format!("xl{}", ctx.blank))
                }
            };
            let pred = match xl.role {
                LabelRole::Pref => skosxl::PREF_LABEL,
                LabelRole::Alt => skosxl::ALT_LABEL,
                LabelRole::Hidden => skosxl::HIDDEN_LABEL,
            };
            ctx.add(&c, pred, node.clone())?;
            ctx.add(&node, rdf::TYPE, Term::Iri(skosxl::LABEL.into()))?;
            let form = label(&xl.literal_form, xl.language.as_deref().unwrap_or(""))?;
            ctx.add(&node, skosxl::LITERAL_FORM, form)?;
        }
        for b in &concept.broader {
            let b = ctx.expand(b)?;
            ctx.add(&c, skos::BROADER, b)?;
        }
        if let Some(n) = &concept.notation {
            ctx.add(&c, skos::NOTATION, Term::string(n))?;
        }
        for (pred, value) in &concept.literals {
            let p = ctx.expand(pred)?;
            let p = p.as_iri().expect("expanded IRI").to_string();
            ctx.add(&c, &p, Term::string(value))?;
        }
    }
    Ok(ctx.graph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skos::{check_integrity, load_taxonomy};

    #[test]
    fn compiles_and_loads() {
        let g = compile_authoring_json(
            r#"{"prefixes": {"ex": "http://e/"},
                "schemes": [{"iri": "ex:S", "title": "S"}],
                "concepts": [
                  {"iri": "ex:a", "topConceptOf": ["ex:S"], "prefLabel": {"en": "A"}},
                  {"iri": "ex:b", "inScheme": ["ex:S"], "prefLabel": {"en": "B"}, "broader": ["ex:a"],
                   "xlLabels": [{"literalForm": "Bee", "language": "en", "role": "alt"}]}
                ]}"#,
        )
        .unwrap();
        let idx = load_taxonomy(&g);
        assert_eq!(idx.concepts().len(), 2);
        assert!(check_integrity(&idx).is_empty());
        assert_eq!(idx.lookup_by_label("bee", Some("en")).len(), 1);
    }

    #[test]
    fn undefined_prefix() {
        let err = compile_authoring_json(r#"{"concepts": [{"iri": "zz:a"}]}"#).unwrap_err();
        assert!(matches!(err, AuthoringError::UndefinedPrefix { .. }));
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(compile_authoring_json(r#"{"concepts": [{"iri": "skos:a", "bogus": 1}]}"#).is_err());
    }
}
