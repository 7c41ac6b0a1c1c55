//! SKOS / SKOS-XL taxonomies: loading, integrity checks, label lookup and
//! hierarchy traversal.

mod authoring;
mod integrity;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::graph::vocab::{rdf, rdfs, skos, skosxl};
use crate::graph::{Graph, Term};

pub use authoring::{compile_authoring_json, AuthoringError};
pub use integrity::{check_integrity, IntegrityViolation};

/// Language key used for labels without a language tag.
pub const NO_LANGUAGE: &str = "";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub iri: String,
    /// language → labels; more than one label per language is an integrity
    /// violation but is kept so it can be reported.
    pub pref_labels: BTreeMap<String, BTreeSet<String>>,
    pub alt_labels: BTreeMap<String, BTreeSet<String>>,
    pub hidden_labels: BTreeMap<String, BTreeSet<String>>,
    pub broader: BTreeSet<String>,
    pub in_scheme: BTreeSet<String>,
    pub kinds: BTreeSet<String>,
    pub xl_labels: Vec<String>,
    pub notation: Option<String>,
}

impl Concept {
    pub fn pref_label(&self, language: &str) -> Option<&str> {
        self.pref_labels
            .get(&language.to_ascii_lowercase())
            .and_then(|s| s.iter().next())
            .map(String::as_str)
    }

    /// English label, falling back to any untagged or first available label.
    pub fn display_label(&self) -> &str {
        self.pref_label("en")
            .or_else(|| self.pref_label(NO_LANGUAGE))
            .or_else(|| self.pref_labels.values().flatten().next().map(String::as_str))
            .unwrap_or(&self.iri)
    }

    pub fn has_kind(&self, kind: &str) -> bool {
        self.kinds.contains(kind)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptScheme {
    pub iri: String,
    pub title: String,
    pub concepts: BTreeSet<String>,
    pub top_concepts: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelRole {
    Pref,
    Alt,
    Hidden,
}

/// A reified SKOS-XL label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XlLabel {
    pub iri: String,
    pub literal_form: String,
    pub language: String,
    pub role: LabelRole,
    pub concept: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DanglingReference {
    pub concept: String,
    pub property: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown concept {0}")]
pub struct UnknownConcept(pub String);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaxonomyIndex {
    concepts: BTreeMap<String, Concept>,
    schemes: BTreeMap<String, ConceptScheme>,
    xl_labels: BTreeMap<String, XlLabel>,
    by_notation: BTreeMap<String, BTreeSet<String>>,
    /// normalized label → concept → languages the label occurs in
    by_label: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
    dangling: Vec<DanglingReference>,
}

fn term_key(t: &Term) -> String {
    match t {
        Term::Iri(i) => i.clone(),
        Term::BlankNode(b) => format!("_:{b}"),
        Term::Literal(l) => l.lexical().to_string(),
    }
}

fn literal_parts(t: &Term) -> Option<(String, String)> {
    let lit = t.as_literal()?;
    Some((
        lit.lexical().to_string(),
        lit.language().unwrap_or(NO_LANGUAGE).to_string(),
    ))
}

/// Classes whose instances count as concepts: `skos:Concept` and everything
/// declared (transitively) as its subclass in `graph`.
fn concept_classes(graph: &Graph) -> BTreeSet<Term> {
    let sub_class_of = Term::Iri(rdfs::SUB_CLASS_OF.into());
    let mut classes = BTreeSet::from([Term::Iri(skos::CONCEPT.into())]);
    let mut queue: VecDeque<Term> = classes.iter().cloned().collect();
    while let Some(c) = queue.pop_front() {
        for sub in graph.subjects(&sub_class_of, &c) {
            if classes.insert(sub.clone()) {
                queue.push_back(sub.clone());
            }
        }
    }
    classes
}

/// Builds a taxonomy index from the SKOS assertions in `graph`.
///
/// References to concepts or schemes that are not declared are recorded in
/// [`TaxonomyIndex::dangling`] rather than failing the load.
pub fn load_taxonomy(graph: &Graph) -> TaxonomyIndex {
    let rdf_type = Term::Iri(rdf::TYPE.into());
    let iri = |s: &str| Term::Iri(s.to_string());

    let mut index = TaxonomyIndex::default();

    for scheme in graph.subjects(&rdf_type, &iri(skos::CONCEPT_SCHEME)) {
        let title = graph
            .objects(scheme, &iri(crate::graph::vocab::dcterms::TITLE))
            .chain(graph.objects(scheme, &iri(rdfs::LABEL)))
            .chain(graph.objects(scheme, &iri(skos::PREF_LABEL)))
            .filter_map(|t| t.as_literal().map(|l| l.lexical().to_string()))
            .min()
            .unwrap_or_default();
        index.schemes.insert(
            term_key(scheme),
            ConceptScheme {
                iri: term_key(scheme),
                title,
                concepts: BTreeSet::new(),
                top_concepts: BTreeSet::new(),
            },
        );
    }

    let classes = concept_classes(graph);
    let mut concept_terms: BTreeMap<String, (Term, BTreeSet<String>)> = BTreeMap::new();
    for class in &classes {
        for subject in graph.subjects(&rdf_type, class) {
            let entry = concept_terms
                .entry(term_key(subject))
                .or_insert_with(|| (subject.clone(), BTreeSet::new()));
            entry.1.insert(term_key(class));
        }
    }

    let label_map = |subject: &Term, predicate: &str| {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for t in graph.objects(subject, &iri(predicate)) {
            if let Some((text, lang)) = literal_parts(t) {
                out.entry(lang).or_default().insert(text);
            }
        }
        out
    };

    for (key, (subject, mut kinds)) in concept_terms {
        kinds.insert(skos::CONCEPT.to_string());
        let mut broader: BTreeSet<String> =
            graph.objects(&subject, &iri(skos::BROADER)).map(term_key).collect();
        broader.extend(graph.subjects(&iri(skos::NARROWER), &subject).map(term_key));
        let mut in_scheme: BTreeSet<String> = graph
            .objects(&subject, &iri(skos::IN_SCHEME))
            .chain(graph.objects(&subject, &iri(skos::TOP_CONCEPT_OF)))
            .map(term_key)
            .collect();
        in_scheme.extend(graph.subjects(&iri(skos::HAS_TOP_CONCEPT), &subject).map(term_key));

        let mut xl_labels = Vec::new();
        for (pred, role) in [
            (skosxl::PREF_LABEL, LabelRole::Pref),
            (skosxl::ALT_LABEL, LabelRole::Alt),
            (skosxl::HIDDEN_LABEL, LabelRole::Hidden),
        ] {
            for label_node in graph.objects(&subject, &iri(pred)) {
                let forms: Vec<_> = graph
                    .objects(label_node, &iri(skosxl::LITERAL_FORM))
                    .filter_map(literal_parts)
                    .collect();
                if forms.is_empty() {
                    index.dangling.push(DanglingReference {
                        concept: key.clone(),
                        property: pred.to_string(),
                        target: term_key(label_node),
                    });
                }
                for (literal_form, language) in forms {
                    let label_iri = term_key(label_node);
                    xl_labels.push(label_iri.clone());
                    index.xl_labels.insert(
                        label_iri.clone(),
                        XlLabel {
                            iri: label_iri,
                            literal_form,
                            language,
                            role,
                            concept: key.clone(),
                        },
                    );
                }
            }
        }
        xl_labels.sort();
        xl_labels.dedup();

        let notation = graph
            .objects(&subject, &iri(skos::NOTATION))
            .filter_map(|t| t.as_literal().map(|l| l.lexical().to_string()))
            .min();

        index.concepts.insert(
            key.clone(),
            Concept {
                iri: key,
                pref_labels: label_map(&subject, skos::PREF_LABEL),
                alt_labels: label_map(&subject, skos::ALT_LABEL),
                hidden_labels: label_map(&subject, skos::HIDDEN_LABEL),
                broader,
                in_scheme,
                kinds,
                xl_labels,
                notation,
            },
        );
    }

    // Top concepts and scheme membership.
    for (scheme_iri, scheme) in index.schemes.iter_mut() {
        let scheme_term = if let Some(b) = scheme_iri.strip_prefix("_:") {
            Term::BlankNode(b.to_string())
        } else {
            Term::Iri(scheme_iri.clone())
        };
        let mut tops: BTreeSet<String> =
            graph.objects(&scheme_term, &iri(skos::HAS_TOP_CONCEPT)).map(term_key).collect();
        tops.extend(graph.subjects(&iri(skos::TOP_CONCEPT_OF), &scheme_term).map(term_key));
        scheme.top_concepts = tops;
    }

    let mut dangling = Vec::new();
    for concept in index.concepts.values() {
        for b in &concept.broader {
            if !index.concepts.contains_key(b) {
                dangling.push(DanglingReference {
                    concept: concept.iri.clone(),
                    property: skos::BROADER.to_string(),
                    target: b.clone(),
                });
            }
        }
        for s in &concept.in_scheme {
            match index.schemes.get_mut(s) {
                Some(scheme) => {
                    scheme.concepts.insert(concept.iri.clone());
                }
                None => dangling.push(DanglingReference {
                    concept: concept.iri.clone(),
                    property: skos::IN_SCHEME.to_string(),
                    target: s.clone(),
                }),
            }
        }
    }
    for scheme in index.schemes.values() {
        for top in &scheme.top_concepts {
            if !index.concepts.contains_key(top) {
                dangling.push(DanglingReference {
                    concept: top.clone(),
                    property: skos::HAS_TOP_CONCEPT.to_string(),
                    target: scheme.iri.clone(),
                });
            }
        }
    }
    index.dangling.extend(dangling);
    index.dangling.sort();
    index.dangling.dedup();

    // Lookup tables.
    for concept in index.concepts.values() {
        if let Some(n) = &concept.notation {
            index.by_notation.entry(n.clone()).or_default().insert(concept.iri.clone());
        }
        for labels in [&concept.pref_labels, &concept.alt_labels, &concept.hidden_labels] {
            for (lang, texts) in labels {
                for text in texts {
                    add_label(&mut index.by_label, text, lang, &concept.iri);
                }
            }
        }
    }
    for xl in index.xl_labels.values() {
        add_label(&mut index.by_label, &xl.literal_form, &xl.language, &xl.concept);
    }
    index
}

fn add_label(
    by_label: &mut BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
    text: &str,
    lang: &str,
    concept: &str,
) {
    let key = normalize_label(text);
    if key.is_empty() {
        return;
    }
    by_label
        .entry(key)
        .or_default()
        .entry(concept.to_string())
        .or_default()
        .insert(lang.to_string());
}

fn enumerator() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(?:section\s*\d{1,2}\s*[:.\-–]?|\d{1,2}\s*[.:](?:\s|$))\s*").expect("valid regex")
    })
}

/// Case-folds, trims, collapses internal whitespace and strips a leading
/// `SECTION <n>:` or `<n>.` enumerator.
pub fn normalize_label(text: &str) -> String {
    let collapsed = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    enumerator().replace(&collapsed, "").trim().to_string()
}

fn language_matches(label_lang: &str, wanted: &str) -> bool {
    let wanted = wanted.to_ascii_lowercase();
    label_lang == wanted
        || label_lang
            .strip_prefix(wanted.as_str())
            .is_some_and(|rest| rest.starts_with('-'))
}

impl TaxonomyIndex {
    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &BTreeMap<String, Concept> {
        &self.concepts
    }

    pub fn concept(&self, iri: &str) -> Option<&Concept> {
        self.concepts.get(iri)
    }

    pub fn schemes(&self) -> &BTreeMap<String, ConceptScheme> {
        &self.schemes
    }

    pub fn xl_labels(&self) -> &BTreeMap<String, XlLabel> {
        &self.xl_labels
    }

    pub fn dangling(&self) -> &[DanglingReference] {
        &self.dangling
    }

    pub fn by_notation(&self, notation: &str) -> Option<&Concept> {
        self.by_notation
            .get(notation)
            .and_then(|set| set.iter().next())
            .and_then(|iri| self.concepts.get(iri))
    }

    pub fn notations(&self) -> impl Iterator<Item = (&str, &BTreeSet<String>)> {
        self.by_notation.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn label_keys(&self) -> impl Iterator<Item = &str> {
        self.by_label.keys().map(String::as_str)
    }

    /// Concepts whose pref/alt/hidden/XL label normalizes to the same form as
    /// `text`, optionally restricted to a language (`en` also matches `en-GB`).
    pub fn lookup_by_label(&self, text: &str, language: Option<&str>) -> BTreeSet<String> {
        let key = normalize_label(text);
        if key.is_empty() {
            return BTreeSet::new();
        }
        self.by_label
            .get(&key)
            .into_iter()
            .flatten()
            .filter(|(_, langs)| match language {
                None => true,
                Some(wanted) => langs.iter().any(|l| language_matches(l, wanted)),
            })
            .map(|(iri, _)| iri.clone())
            .collect()
    }

    /// Transitive `skos:broader` ancestors of `concept`, excluding itself.
    pub fn broader_closure(&self, concept: &str) -> Result<BTreeSet<String>, UnknownConcept> {
        let start = self
            .concepts
            .get(concept)
            .ok_or_else(|| UnknownConcept(concept.to_string()))?;
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<&str> = start.broader.iter().map(String::as_str).collect();
        while let Some(next) = queue.pop_front() {
            if next == concept || !seen.insert(next.to_string()) {
                continue;
            }
            if let Some(c) = self.concepts.get(next) {
                queue.extend(c.broader.iter().map(String::as_str));
            }
        }
        Ok(seen)
    }

    /// True when `ancestor` is in the broader closure of `concept`.
    pub fn is_under(&self, concept: &str, ancestor: &str) -> bool {
        self.broader_closure(concept)
            .map(|c| c.contains(ancestor))
            .unwrap_or(false)
    }

    pub fn concepts_of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Concept> + 'a {
        self.concepts.values().filter(move |c| c.has_kind(kind))
    }
}
