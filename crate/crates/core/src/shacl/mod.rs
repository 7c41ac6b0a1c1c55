//! A SHACL core subset (validation) and a small forward-chaining rule engine.

mod rules;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::vocab::{rdf, rdfs, sh, xsd};
use crate::graph::{Graph, Literal, Term};

pub use rules::{apply_rules, load_rules, Guard, DEFAULT_MAX_ITERATIONS, FORMAT_HEADER, InferenceOutcome, InferenceRule, RuleError, TraceEntry};

/// Nested `sh:node` checks deeper than this produce a warning instead of
/// recursing further.
pub const MAX_NODE_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("malformed shape {shape}: {message}")]
    Malformed { shape: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Iri,
    Literal,
    BlankNode,
    BlankNodeOrIri,
    BlankNodeOrLiteral,
    IriOrLiteral,
}

impl NodeKind {
    fn from_iri(iri: &str) -> Option<Self> {
        Some(match iri {
            sh::IRI => NodeKind::Iri,
            sh::LITERAL => NodeKind::Literal,
            sh::BLANK_NODE => NodeKind::BlankNode,
            sh::BLANK_NODE_OR_IRI => NodeKind::BlankNodeOrIri,
            sh::BLANK_NODE_OR_LITERAL => NodeKind::BlankNodeOrLiteral,
            sh::IRI_OR_LITERAL => NodeKind::IriOrLiteral,
            _ => return None,
        })
    }

    fn accepts(self, term: &Term) -> bool {
        matches!(
            (self, term),
            (NodeKind::Iri, Term::Iri(_))
                | (NodeKind::Literal, Term::Literal(_))
                | (NodeKind::BlankNode, Term::BlankNode(_))
                | (NodeKind::BlankNodeOrIri, Term::BlankNode(_) | Term::Iri(_))
                | (NodeKind::BlankNodeOrLiteral, Term::BlankNode(_) | Term::Literal(_))
                | (NodeKind::IriOrLiteral, Term::Iri(_) | Term::Literal(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Constraint {
    MinCount(usize),
    MaxCount(usize),
    Class(String),
    Datatype(String),
    NodeKind(NodeKind),
    In(Vec<Term>),
    HasValue(Term),
    Node(String),
    /// Each value must satisfy every constraint of at least one group.
    Or(Vec<Vec<Constraint>>),
    LanguageIn(Vec<String>),
    UniqueLang,
}

impl Constraint {
    /// Local name of the SHACL constraint component.
    pub fn component_name(&self) -> &'static str {
        match self {
            Constraint::MinCount(_) => "MinCountConstraintComponent",
            Constraint::MaxCount(_) => "MaxCountConstraintComponent",
            Constraint::Class(_) => "ClassConstraintComponent",
            Constraint::Datatype(_) => "DatatypeConstraintComponent",
            Constraint::NodeKind(_) => "NodeKindConstraintComponent",
            Constraint::In(_) => "InConstraintComponent",
            Constraint::HasValue(_) => "HasValueConstraintComponent",
            Constraint::Node(_) => "NodeConstraintComponent",
            Constraint::Or(_) => "OrConstraintComponent",
            Constraint::LanguageIn(_) => "LanguageInConstraintComponent",
            Constraint::UniqueLang => "UniqueLangConstraintComponent",
        }
    }

    pub fn component(&self) -> String {
        format!("{}{}", sh::NS, self.component_name())
    }

    fn is_value_level(&self) -> bool {
        !matches!(
            self,
            Constraint::MinCount(_) | Constraint::MaxCount(_) | Constraint::HasValue(_) | Constraint::UniqueLang
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyShape {
    pub path: String,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeShape {
    pub iri: String,
    pub target_class: BTreeSet<String>,
    pub property_shapes: Vec<PropertyShape>,
    pub closed: bool,
    pub ignored_properties: BTreeSet<String>,
}

/// Parsed shapes, keyed by shape identifier, plus warnings about ignored
/// parts of the shapes graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Shapes {
    shapes: BTreeMap<String, NodeShape>,
    warnings: Vec<String>,
}

impl Shapes {
    pub fn get(&self, iri: &str) -> Option<&NodeShape> {
        self.shapes.get(iri)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeShape> {
        self.shapes.values()
    }

    /// Shapes with at least one target class.
    pub fn targeted(&self) -> impl Iterator<Item = &NodeShape> {
        self.shapes.values().filter(|s| !s.target_class.is_empty())
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Violation,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationResult {
    pub focus_node: Term,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub path: Option<String>,
    pub constraint_component: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<Term>,
    pub message: String,
    pub severity: Severity,
    pub source_shape: String,
}

impl ValidationResult {
    /// Local name of the constraint component, e.g. `ClassConstraintComponent`.
    pub fn component_name(&self) -> &str {
        self.constraint_component
            .strip_prefix(sh::NS)
            .unwrap_or(&self.constraint_component)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub conforms: bool,
    pub results: Vec<ValidationResult>,
}

impl ValidationReport {
    pub fn violations(&self) -> impl Iterator<Item = &ValidationResult> {
        self.results.iter().filter(|r| r.severity == Severity::Violation)
    }
}

fn key(t: &Term) -> String {
    match t {
        Term::BlankNode(b) => format!("_:{b}"),
        Term::Iri(i) => i.clone(),
        Term::Literal(l) => l.lexical().to_string(),
    }
}

fn iri(s: &str) -> Term {
    Term::Iri(s.to_string())
}

const ANNOTATIONS: &[&str] = &[sh::NAME, sh::DESCRIPTION, sh::MESSAGE, sh::ORDER, sh::GROUP];

struct ShapeParser<'g> {
    graph: &'g Graph,
    warnings: Vec<String>,
}

impl ShapeParser<'_> {
    fn malformed(&self, shape: &Term, message: impl Into<String>) -> ShapeError {
        ShapeError::Malformed {
            shape: key(shape),
            message: message.into(),
        }
    }

    fn single(&self, subject: &Term, predicate: &str) -> Result<Option<&Term>, ShapeError> {
        let mut it = self.graph.objects(subject, &iri(predicate));
        let first = it.next();
        if it.next().is_some() {
            return Err(self.malformed(subject, format!("more than one value for <{predicate}>")));
        }
        Ok(first)
    }

    fn natural(&self, shape: &Term, predicate: &str) -> Result<Option<usize>, ShapeError> {
        let Some(t) = self.single(shape, predicate)? else {
            return Ok(None);
        };
        t.as_literal()
            .filter(|l| xsd::is_numeric(l.datatype()))
            .and_then(|l| l.lexical().trim().parse::<usize>().ok())
            .map(Some)
            .ok_or_else(|| self.malformed(shape, format!("<{predicate}> must be a natural number, found {t}")))
    }

    fn iri_value(&self, shape: &Term, predicate: &str) -> Result<Option<String>, ShapeError> {
        match self.single(shape, predicate)? {
            None => Ok(None),
            Some(Term::Iri(i)) => Ok(Some(i.clone())),
            Some(other) => Err(self.malformed(shape, format!("<{predicate}> must be an IRI, found {other}"))),
        }
    }

    fn list(&self, shape: &Term, predicate: &str) -> Result<Option<Vec<Term>>, ShapeError> {
        match self.single(shape, predicate)? {
            None => Ok(None),
            Some(head) => self
                .graph
                .read_list(head)
                .map(Some)
                .ok_or_else(|| self.malformed(shape, format!("<{predicate}> must be a well-formed RDF list"))),
        }
    }

    fn boolean(&self, shape: &Term, predicate: &str) -> Result<bool, ShapeError> {
        match self.single(shape, predicate)? {
            None => Ok(false),
            Some(Term::Literal(l)) if l.lexical() == "true" => Ok(true),
            Some(Term::Literal(l)) if l.lexical() == "false" => Ok(false),
            Some(other) => Err(self.malformed(shape, format!("<{predicate}> must be a boolean, found {other}"))),
        }
    }

    /// Constraints declared directly on `node`; `context` names the
    /// predicates that are structural for this kind of node.
    fn constraints(&mut self, node: &Term, context: &[&str]) -> Result<Vec<Constraint>, ShapeError> {
        let mut out = Vec::new();
        let min = self.natural(node, sh::MIN_COUNT)?;
        let max = self.natural(node, sh::MAX_COUNT)?;
        if let (Some(lo), Some(hi)) = (min, max) {
            if lo > hi {
                return Err(self.malformed(node, format!("minCount {lo} exceeds maxCount {hi}")));
            }
        }
        out.extend(min.map(Constraint::MinCount));
        out.extend(max.map(Constraint::MaxCount));
        for c in self.graph.objects(node, &iri(sh::CLASS)) {
            match c {
                Term::Iri(i) => out.push(Constraint::Class(i.clone())),
                other => return Err(self.malformed(node, format!("sh:class must be an IRI, found {other}"))),
            }
        }
        if let Some(dt) = self.iri_value(node, sh::DATATYPE)? {
            out.push(Constraint::Datatype(dt));
        }
        if let Some(kind) = self.iri_value(node, sh::NODE_KIND)? {
            let nk = NodeKind::from_iri(&kind).ok_or_else(|| self.malformed(node, format!("unknown node kind <{kind}>")))?;
            out.push(Constraint::NodeKind(nk));
        }
        if let Some(items) = self.list(node, sh::IN)? {
            out.push(Constraint::In(items));
        }
        for v in self.graph.objects(node, &iri(sh::HAS_VALUE)) {
            out.push(Constraint::HasValue(v.clone()));
        }
        for n in self.graph.objects(node, &iri(sh::NODE)) {
            out.push(Constraint::Node(key(n)));
        }
        if let Some(members) = self.list(node, sh::OR)? {
            if members.is_empty() {
                return Err(self.malformed(node, "sh:or requires at least one alternative"));
            }
            let mut groups = Vec::new();
            for m in &members {
                let group = self.constraints(m, &[])?;
                if group.is_empty() {
                    return Err(self.malformed(node, "sh:or alternative declares no supported constraint"));
                }
                if let Some(bad) = group.iter().find(|c| !c.is_value_level()) {
                    return Err(self.malformed(
                        node,
                        format!("sh:or alternatives may not use {}", bad.component_name()),
                    ));
                }
                groups.push(group);
            }
            out.push(Constraint::Or(groups));
        }
        if let Some(tags) = self.list(node, sh::LANGUAGE_IN)? {
            let tags = tags
                .iter()
                .map(|t| {
                    t.as_literal()
                        .map(|l| l.lexical().to_ascii_lowercase())
                        .ok_or_else(|| self.malformed(node, "sh:languageIn members must be literals"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            out.push(Constraint::LanguageIn(tags));
        }
        if self.boolean(node, sh::UNIQUE_LANG)? {
            out.push(Constraint::UniqueLang);
        }

        let known: BTreeSet<&str> = [
            sh::MIN_COUNT,
            sh::MAX_COUNT,
            sh::CLASS,
            sh::DATATYPE,
            sh::NODE_KIND,
            sh::IN,
            sh::HAS_VALUE,
            sh::NODE,
            sh::OR,
            sh::LANGUAGE_IN,
            sh::UNIQUE_LANG,
        ]
        .into_iter()
        .chain(ANNOTATIONS.iter().copied())
        .chain(context.iter().copied())
        .collect();
        for p in self.graph.predicates_of(node) {
            let Some(p) = p.as_iri() else { continue };
            if p.starts_with(sh::NS) && !known.contains(p) {
                self.warnings.push(format!("{}: unsupported SHACL term <{p}> ignored", key(node)));
            }
        }
        Ok(out)
    }

    fn node_shape(&mut self, node: &Term) -> Result<NodeShape, ShapeError> {
        let target_class = self
            .graph
            .objects(node, &iri(sh::TARGET_CLASS))
            .map(|t| match t {
                Term::Iri(i) => Ok(i.clone()),
                other => Err(self.malformed(node, format!("sh:targetClass must be an IRI, found {other}"))),
            })
            .collect::<Result<BTreeSet<_>, _>>()?;

        let mut property_shapes = Vec::new();
        let props: Vec<Term> = self.graph.objects(node, &iri(sh::PROPERTY)).cloned().collect();
        for prop in &props {
            let path = match self.single(prop, sh::PATH)? {
                Some(Term::Iri(p)) => p.clone(),
                Some(_) => {
                    self.warnings.push(format!(
                        "{}: property shape {} uses a complex path; ignored",
                        key(node),
                        key(prop)
                    ));
                    continue;
                }
                None => return Err(self.malformed(prop, "property shape without sh:path")),
            };
            let constraints = self.constraints(prop, &[sh::PATH, sh::SEVERITY, sh::DEACTIVATED])?;
            if self.graph.objects(prop, &iri(sh::SEVERITY)).next().is_some() {
                self.warnings
                    .push(format!("{}: sh:severity is not supported; results are Violations", key(prop)));
            }
            property_shapes.push(PropertyShape { path, constraints });
        }
        property_shapes.sort_by(|a, b| a.path.cmp(&b.path));

        let closed = self.boolean(node, sh::CLOSED)?;
        let ignored_properties = match self.list(node, sh::IGNORED_PROPERTIES)? {
            None => BTreeSet::new(),
            Some(items) => items
                .iter()
                .map(|t| {
                    t.as_iri()
                        .map(str::to_string)
                        .ok_or_else(|| self.malformed(node, "sh:ignoredProperties members must be IRIs"))
                })
                .collect::<Result<_, _>>()?,
        };

        let node_level = self.constraints(
            node,
            &[sh::TARGET_CLASS, sh::PROPERTY, sh::CLOSED, sh::IGNORED_PROPERTIES, sh::SEVERITY, sh::DEACTIVATED],
        )?;
        if !node_level.is_empty() {
            self.warnings
                .push(format!("{}: node-level constraints are not supported; ignored", key(node)));
        }

        Ok(NodeShape {
            iri: key(node),
            target_class,
            property_shapes,
            closed,
            ignored_properties,
        })
    }
}

/// Reads every node shape in `graph`: explicitly typed `sh:NodeShape`s, shapes
/// with a target class and shapes referenced through `sh:node`.
pub fn parse_shapes(graph: &Graph) -> Result<Shapes, ShapeError> {
    let mut nodes: BTreeSet<Term> = graph
        .subjects(&iri(rdf::TYPE), &iri(sh::NODE_SHAPE))
        .cloned()
        .collect();
    nodes.extend(graph.pairs(&iri(sh::TARGET_CLASS)).map(|(s, _)| s.clone()));
    let mut queue: VecDeque<Term> = graph.pairs(&iri(sh::NODE)).map(|(_, o)| o.clone()).collect();
    while let Some(n) = queue.pop_front() {
        nodes.insert(n);
    }
    // Or-alternatives can reference shapes too.
    let or_refs: Vec<Term> = graph
        .pairs(&iri(sh::OR))
        .filter_map(|(_, head)| graph.read_list(head))
        .flatten()
        .flat_map(|m| graph.objects(&m, &iri(sh::NODE)).cloned().collect::<Vec<_>>())
        .collect();
    nodes.extend(or_refs);

    let mut parser = ShapeParser {
        graph,
        warnings: Vec::new(),
    };
    let mut shapes = BTreeMap::new();
    for node in &nodes {
        if node.is_literal() {
            return Err(ShapeError::Malformed {
                shape: key(node),
                message: "a literal cannot be a shape".into(),
            });
        }
        let shape = parser.node_shape(node)?;
        shapes.insert(shape.iri.clone(), shape);
    }
    for shape in shapes.values() {
        for ps in &shape.property_shapes {
            for c in &ps.constraints {
                let mut refs = Vec::new();
                collect_node_refs(c, &mut refs);
                for r in refs {
                    if !shapes.contains_key(r) {
                        return Err(ShapeError::Malformed {
                            shape: shape.iri.clone(),
                            message: format!("sh:node references unknown shape {r}"),
                        });
                    }
                }
            }
        }
    }
    let mut warnings = parser.warnings;
    warnings.sort();
    warnings.dedup();
    Ok(Shapes { shapes, warnings })
}

fn collect_node_refs<'a>(c: &'a Constraint, out: &mut Vec<&'a str>) {
    match c {
        Constraint::Node(n) => out.push(n),
        Constraint::Or(groups) => groups.iter().flatten().for_each(|g| collect_node_refs(g, out)),
        _ => {}
    }
}

/// Combines shape sets; on identifier clashes the later set wins.
pub fn merge_shapes(sets: impl IntoIterator<Item = Shapes>) -> Shapes {
    let mut out = Shapes::default();
    for s in sets {
        out.shapes.extend(s.shapes);
        out.warnings.extend(s.warnings);
    }
    out.warnings.sort();
    out.warnings.dedup();
    out
}

/// Classes `class` and all its transitive subclasses in `data`.
fn class_and_subclasses(data: &Graph, class: &str) -> BTreeSet<Term> {
    let sub = iri(rdfs::SUB_CLASS_OF);
    let mut out = BTreeSet::from([iri(class)]);
    let mut queue = VecDeque::from([iri(class)]);
    while let Some(c) = queue.pop_front() {
        for s in data.subjects(&sub, &c) {
            if out.insert(s.clone()) {
                queue.push_back(s.clone());
            }
        }
    }
    out
}

fn is_instance_of(data: &Graph, node: &Term, class: &str, cache: &mut BTreeMap<String, BTreeSet<Term>>) -> bool {
    let classes = cache
        .entry(class.to_string())
        .or_insert_with(|| class_and_subclasses(data, class));
    data.objects(node, &iri(rdf::TYPE)).any(|t| classes.contains(t))
}

fn lexical_ok(lit: &Literal) -> bool {
    let lex = lit.lexical();
    match lit.datatype() {
        xsd::INTEGER => {
            let digits = lex.strip_prefix(['+', '-']).unwrap_or(lex);
            !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
        }
        xsd::DECIMAL => {
            let body = lex.strip_prefix(['+', '-']).unwrap_or(lex);
            let mut parts = body.splitn(2, '.');
            let int = parts.next().unwrap_or("");
            let frac = parts.next().unwrap_or("");
            (!int.is_empty() || !frac.is_empty())
                && int.chars().all(|c| c.is_ascii_digit())
                && frac.chars().all(|c| c.is_ascii_digit())
        }
        xsd::DOUBLE => lex.parse::<f64>().is_ok(),
        xsd::BOOLEAN => matches!(lex, "true" | "false" | "1" | "0"),
        xsd::DATE => chrono::NaiveDate::parse_from_str(lex, "%Y-%m-%d").is_ok(),
        _ => true,
    }
}

fn language_matches(lang: &str, range: &str) -> bool {
    range == "*"
        || lang == range
        || lang.strip_prefix(range).is_some_and(|rest| rest.starts_with('-'))
}

struct Validator<'a> {
    data: &'a Graph,
    shapes: &'a Shapes,
    class_cache: BTreeMap<String, BTreeSet<Term>>,
}

impl Validator<'_> {
    /// Failure message for a value-level constraint, `None` when it holds.
    fn check_value(
        &mut self,
        value: &Term,
        constraint: &Constraint,
        depth: usize,
        warnings: &mut Vec<ValidationResult>,
    ) -> Option<String> {
        match constraint {
            Constraint::Class(c) => (!is_instance_of(self.data, value, c, &mut self.class_cache))
                .then(|| format!("value {value} is not an instance of <{c}>")),
            Constraint::Datatype(dt) => {
                let ok = value
                    .as_literal()
                    .is_some_and(|l| l.datatype() == dt && lexical_ok(l));
                (!ok).then(|| format!("value {value} does not have datatype <{dt}>"))
            }
            Constraint::NodeKind(kind) => {
                (!kind.accepts(value)).then(|| format!("value {value} does not have node kind {kind:?}"))
            }
            Constraint::In(items) => {
                (!items.contains(value)).then(|| format!("value {value} is not in the allowed list"))
            }
            Constraint::LanguageIn(tags) => {
                let ok = value
                    .as_literal()
                    .and_then(Literal::language)
                    .is_some_and(|lang| tags.iter().any(|t| language_matches(lang, t)));
                (!ok).then(|| format!("value {value} has a language outside [{}]", tags.join(", ")))
            }
            Constraint::Node(shape) => {
                if depth >= MAX_NODE_DEPTH {
                    warnings.push(ValidationResult {
                        focus_node: value.clone(),
                        path: None,
                        constraint_component: constraint.component(),
                        value: None,
                        message: format!("sh:node depth cap {MAX_NODE_DEPTH} reached; nested check skipped"),
                        severity: Severity::Warning,
                        source_shape: shape.clone(),
                    });
                    return None;
                }
                let Some(target) = self.shapes.get(shape) else {
                    return Some(format!("unknown shape {shape}"));
                };
                let mut nested = Vec::new();
                self.validate_focus(value, target, depth + 1, &mut nested);
                let failed = nested.iter().any(|r| r.severity == Severity::Violation);
                warnings.extend(nested.into_iter().filter(|r| r.severity == Severity::Warning));
                failed.then(|| format!("value {value} does not conform to shape {shape}"))
            }
            Constraint::Or(groups) => {
                let mut scratch = Vec::new();
                let any = groups.iter().any(|g| {
                    g.iter()
                        .all(|c| self.check_value(value, c, depth, &mut scratch).is_none())
                });
                warnings.extend(scratch);
                (!any).then(|| format!("value {value} satisfies none of the {} alternatives", groups.len()))
            }
            Constraint::MinCount(_) | Constraint::MaxCount(_) | Constraint::HasValue(_) | Constraint::UniqueLang => None,
        }
    }

    fn validate_focus(&mut self, focus: &Term, shape: &NodeShape, depth: usize, out: &mut Vec<ValidationResult>) {
        let result = |path: Option<&str>, c: &Constraint, value: Option<Term>, message: String| ValidationResult {
            focus_node: focus.clone(),
            path: path.map(str::to_string),
            constraint_component: c.component(),
            value,
            message,
            severity: Severity::Violation,
            source_shape: shape.iri.clone(),
        };
        for ps in &shape.property_shapes {
            let values: Vec<Term> = self.data.objects(focus, &iri(&ps.path)).cloned().collect();
            for c in &ps.constraints {
                match c {
                    Constraint::MinCount(n) if values.len() < *n => out.push(result(
                        Some(&ps.path),
                        c,
                        None,
                        format!("expected at least {n} value(s), found {}", values.len()),
                    )),
                    Constraint::MaxCount(n) if values.len() > *n => out.push(result(
                        Some(&ps.path),
                        c,
                        None,
                        format!("expected at most {n} value(s), found {}", values.len()),
                    )),
                    Constraint::HasValue(v) if !values.contains(v) => {
                        out.push(result(Some(&ps.path), c, None, format!("missing required value {v}")))
                    }
                    Constraint::UniqueLang => {
                        let mut per_lang: BTreeMap<&str, usize> = BTreeMap::new();
                        for v in &values {
                            if let Some(lang) = v.as_literal().and_then(Literal::language) {
                                *per_lang.entry(lang).or_default() += 1;
                            }
                        }
                        for (lang, n) in per_lang.into_iter().filter(|(_, n)| *n > 1) {
                            out.push(result(
                                Some(&ps.path),
                                c,
                                None,
                                format!("{n} values share language tag {lang:?}"),
                            ));
                        }
                    }
                    c if c.is_value_level() => {
                        for v in &values {
                            let mut warnings = Vec::new();
                            if let Some(message) = self.check_value(v, c, depth, &mut warnings) {
                                out.push(result(Some(&ps.path), c, Some(v.clone()), message));
                            }
                            out.extend(warnings);
                        }
                    }
                    _ => {}
                }
            }
        }
        if shape.closed {
            let allowed: BTreeSet<&str> = shape
                .property_shapes
                .iter()
                .map(|p| p.path.as_str())
                .chain(shape.ignored_properties.iter().map(String::as_str))
                .collect();
            let predicates: Vec<Term> = self.data.predicates_of(focus).cloned().collect();
            for p in predicates {
                let Some(p_iri) = p.as_iri() else { continue };
                if allowed.contains(p_iri) {
                    continue;
                }
                for v in self.data.objects(focus, &p) {
                    out.push(ValidationResult {
                        focus_node: focus.clone(),
                        path: Some(p_iri.to_string()),
                        constraint_component: format!("{}ClosedConstraintComponent", sh::NS),
                        value: Some(v.clone()),
                        message: format!("predicate <{p_iri}> is not allowed by closed shape"),
                        severity: Severity::Violation,
                        source_shape: shape.iri.clone(),
                    });
                }
            }
        }
    }
}

/// Instances of the shape's target classes, subclasses included.
pub fn focus_nodes(data: &Graph, shape: &NodeShape) -> BTreeSet<Term> {
    let rdf_type = iri(rdf::TYPE);
    let mut out = BTreeSet::new();
    for class in &shape.target_class {
        for c in class_and_subclasses(data, class) {
            out.extend(data.subjects(&rdf_type, &c).cloned());
        }
    }
    out
}

/// Validates `data` against every targeted shape. Pure and deterministic:
/// results are sorted and de-duplicated.
pub fn validate(data: &Graph, shapes: &Shapes) -> ValidationReport {
    let mut validator = Validator {
        data,
        shapes,
        class_cache: BTreeMap::new(),
    };
    let mut results = Vec::new();
    for shape in shapes.targeted() {
        for focus in focus_nodes(data, shape) {
            validator.validate_focus(&focus, shape, 0, &mut results);
        }
    }
    results.sort();
    results.dedup();
    ValidationReport {
        conforms: !results.iter().any(|r| r.severity == Severity::Violation),
        results,
    }
}
