//! RDF terms and triples.

use std::fmt;

use super::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("IRI must be non-empty and contain no whitespace: {0:?}")]
    InvalidIri(String),
    #[error("invalid blank node label: {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag: {0:?}")]
    InvalidLanguageTag(String),
    #[error("triple subject must be an IRI or blank node, found {0}")]
    LiteralSubject(String),
    #[error("triple predicate must be an IRI, found {0}")]
    NonIriPredicate(String),
}

/// A literal value: lexical form, datatype IRI and an optional language tag.
///
/// Language tags are stored lower-cased; a literal carries a tag exactly when
/// its datatype is `rdf:langString`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: String,
    language: Option<String>,
}

impl Literal {
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: xsd::STRING.to_string(),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, tag: &str) -> Result<Self, TermError> {
        if !is_language_tag(tag) {
            return Err(TermError::InvalidLanguageTag(tag.to_string()));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: rdf::LANG_STRING.to_string(),
            language: Some(tag.to_ascii_lowercase()),
        })
    }

    pub fn typed(lexical: impl Into<String>, datatype: &str) -> Result<Self, TermError> {
        validate_iri(datatype)?;
        Ok(Literal {
            lexical: lexical.into(),
            datatype: datatype.to_string(),
            language: None,
        })
    }

    pub fn decimal(value: f64) -> Self {
        let mut lexical = format!("{value}");
        if !lexical.contains('.') && !lexical.contains('e') && !lexical.contains("inf") && !lexical.contains("NaN") {
            lexical.push_str(".0");
        }
        Literal {
            lexical,
            datatype: xsd::DECIMAL.to_string(),
            language: None,
        }
    }

    pub fn integer(value: i64) -> Self {
        Literal {
            lexical: value.to_string(),
            datatype: xsd::INTEGER.to_string(),
            language: None,
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &str {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Numeric value for literals with a numeric XSD datatype.
    pub fn as_number(&self) -> Option<f64> {
        if !xsd::is_numeric(&self.datatype) {
            return None;
        }
        let lex = self.lexical.trim();
        let ok = !lex.is_empty()
            && lex
                .chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'));
        if !ok {
            return None;
        }
        lex.parse::<f64>().ok().filter(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Result<Self, TermError> {
        let iri = iri.into();
        validate_iri(&iri)?;
        Ok(Term::Iri(iri))
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if !is_blank_label(&label) {
            return Err(TermError::InvalidBlankNode(label));
        }
        Ok(Term::BlankNode(label))
    }

    pub fn literal(lit: Literal) -> Self {
        Term::Literal(lit)
    }

    pub fn string(lexical: impl Into<String>) -> Self {
        Term::Literal(Literal::string(lexical))
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }
}

impl fmt::Display for Term {
    /// N-Triples rendering.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{}>", escape_iri(iri)),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal(lit) => {
                write!(f, "\"{}\"", escape_string(&lit.lexical))?;
                if let Some(lang) = &lit.language {
                    write!(f, "@{lang}")
                } else if lit.datatype != xsd::STRING {
                    write!(f, "^^<{}>", escape_iri(&lit.datatype))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// JSON shape follows the SPARQL 1.1 query results format:
/// `{"type": "uri"|"bnode"|"literal", "value": ..., "xml:lang"?, "datatype"?}`.
#[derive(serde::Serialize, serde::Deserialize)]
struct TermRepr {
    #[serde(rename = "type")]
    kind: String,
    value: String,
    #[serde(rename = "xml:lang", default, skip_serializing_if = "Option::is_none")]
    lang: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    datatype: Option<String>,
}

impl serde::Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Term::Iri(i) => TermRepr {
                kind: "uri".into(),
                value: i.clone(),
                lang: None,
                datatype: None,
            },
            Term::BlankNode(b) => TermRepr {
                kind: "bnode".into(),
                value: b.clone(),
                lang: None,
                datatype: None,
            },
            Term::Literal(l) => TermRepr {
                kind: "literal".into(),
                value: l.lexical.clone(),
                lang: l.language.clone(),
                datatype: (l.language.is_none() && l.datatype != xsd::STRING).then(|| l.datatype.clone()),
            },
        };
        repr.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = TermRepr::deserialize(deserializer)?;
        match repr.kind.as_str() {
            "uri" => Term::iri(repr.value).map_err(D::Error::custom),
            "bnode" => Term::blank(repr.value).map_err(D::Error::custom),
            "literal" => match (repr.lang, repr.datatype) {
                (Some(lang), _) => Literal::lang(repr.value, &lang).map(Term::Literal).map_err(D::Error::custom),
                (None, Some(dt)) => Literal::typed(repr.value, &dt).map(Term::Literal).map_err(D::Error::custom),
                (None, None) => Ok(Term::string(repr.value)),
            },
            other => Err(D::Error::custom(format!("unknown term type {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, TermError> {
        if subject.is_literal() {
            return Err(TermError::LiteralSubject(subject.to_string()));
        }
        if predicate.as_iri().is_none() {
            return Err(TermError::NonIriPredicate(predicate.to_string()));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

pub(crate) fn validate_iri(iri: &str) -> Result<(), TermError> {
    if iri.is_empty() || iri.chars().any(|c| c.is_whitespace() || c == '<' || c == '>') {
        Err(TermError::InvalidIri(iri.to_string()))
    } else {
        Ok(())
    }
}

pub(crate) fn is_blank_label(label: &str) -> bool {
    let mut chars = label.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(primary) = parts.next() else {
        return false;
    };
    (1..=8).contains(&primary.len())
        && primary.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| (1..=8).contains(&p.len()) && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                out.push_str(&format!("\\u{:04X}", c as u32));
            }
            c => out.push(c),
        }
    }
    out
}

fn escape_iri(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' | '{' | '}' | '|' | '^' | '`' | '\\' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c if (c as u32) <= 0x20 => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_subject_rejected() {
        let err = Triple::new(
            Term::string("x"),
            Term::iri("http://e/p").unwrap(),
            Term::string("y"),
        )
        .unwrap_err();
        assert!(matches!(err, TermError::LiteralSubject(_)));
    }

    #[test]
    fn non_iri_predicate_rejected() {
        let err = Triple::new(
            Term::iri("http://e/s").unwrap(),
            Term::blank("b0").unwrap(),
            Term::string("y"),
        )
        .unwrap_err();
        assert!(matches!(err, TermError::NonIriPredicate(_)));
    }

    #[test]
    fn iri_and_blank_validation() {
        assert!(Term::iri("").is_err());
        assert!(Term::iri("http://a b").is_err());
        assert!(Term::blank("1abc").is_err());
        assert!(Term::blank("a-b").is_err());
        assert!(Term::blank("a_1").is_ok());
    }

    #[test]
    fn language_only_on_lang_string() {
        let l = Literal::lang("Eye", "EN").unwrap();
        assert_eq!(l.language(), Some("en"));
        assert_eq!(l.datatype(), rdf::LANG_STRING);
        assert_eq!(Literal::string("x").language(), None);
        assert!(Literal::lang("x", "e n").is_err());
    }

    #[test]
    fn numeric_coercion() {
        assert_eq!(Literal::decimal(12.0).lexical(), "12.0");
        assert_eq!(Literal::decimal(9.999).as_number(), Some(9.999));
        assert_eq!(Literal::typed("abc", xsd::DECIMAL).unwrap().as_number(), None);
        assert_eq!(Literal::string("10").as_number(), None);
        assert_eq!(Literal::integer(7).as_number(), Some(7.0));
    }

    #[test]
    fn ntriples_display_escapes() {
        let t = Term::string("a \"b\"\nc");
        assert_eq!(t.to_string(), r#""a \"b\"\nc""#);
    }
}
