//! Line-oriented inference rules and a semi-naive forward chainer.
//!
//! ```text
//! rules-format 1
//! @prefix ex: <http://example.org/> .
//! rule mixture-2a
//!   when ?m ex:hasIngredient ?i .
//!   when ?i ex:concentration ?c .
//!   guard ?c ge 10.0
//!   then ?m ex:flagged true .
//! end
//! ```
//!
//! `when` lines are conjunctive triple patterns, `guard` is an optional
//! numeric comparison (`ge`, `gt`, `le`, `lt`, `eq`) and `then` is the single
//! conclusion template.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{parse_triple_patterns, vocab, Binding, Comparator, Graph, Literal, PatternTerm, Term, Triple, TriplePattern};

pub const FORMAT_HEADER: &str = "rules-format 1";
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("rule {rule}: conclusion variable ?{variable} is not bound by any premise")]
    UnboundConclusionVariable { rule: String, variable: String },
    #[error("rule {rule}: guard variable ?{variable} is not bound by any premise")]
    UnboundGuardVariable { rule: String, variable: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Guard {
    pub variable: String,
    #[serde(serialize_with = "comparator_name")]
    pub comparator: Comparator,
    pub threshold: f64,
}

fn comparator_name<S: serde::Serializer>(c: &Comparator, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(comparator_keyword(*c))
}

pub fn comparator_keyword(c: Comparator) -> &'static str {
    match c {
        Comparator::Ge => "ge",
        Comparator::Gt => "gt",
        Comparator::Le => "le",
        Comparator::Lt => "lt",
        Comparator::Eq => "eq",
    }
}

impl Guard {
    pub fn admits(&self, binding: &Binding) -> bool {
        binding
            .get(&self.variable)
            .and_then(Term::as_literal)
            .and_then(Literal::as_number)
            .is_some_and(|v| self.comparator.holds(v, self.threshold))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceRule {
    pub name: String,
    pub premises: Vec<TriplePattern>,
    pub guard: Option<Guard>,
    pub conclusion: TriplePattern,
}

impl InferenceRule {
    /// Checks the rule invariants: conclusion and guard variables are bound
    /// by the premises and the threshold is finite.
    pub fn new(
        name: impl Into<String>,
        premises: Vec<TriplePattern>,
        guard: Option<Guard>,
        conclusion: TriplePattern,
    ) -> Result<Self, RuleError> {
        let name = name.into();
        let bound: BTreeSet<&str> = premises.iter().flat_map(|p| p.variables()).collect();
        if let Some(v) = conclusion.variables().find(|v| !bound.contains(v)) {
            return Err(RuleError::UnboundConclusionVariable {
                rule: name,
                variable: v.to_string(),
            });
        }
        if let Some(g) = &guard {
            if !bound.contains(g.variable.as_str()) {
                return Err(RuleError::UnboundGuardVariable {
                    rule: name,
                    variable: g.variable.clone(),
                });
            }
        }
        Ok(InferenceRule {
            name,
            premises,
            guard,
            conclusion,
        })
    }
}

#[derive(Default)]
struct Draft {
    name: String,
    line: usize,
    premises: Vec<TriplePattern>,
    guard: Option<Guard>,
    conclusion: Option<TriplePattern>,
}

fn parse_err(line: usize, message: impl Into<String>) -> RuleError {
    RuleError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_guard(rest: &str, line: usize) -> Result<Guard, RuleError> {
    let parts: Vec<&str> = rest.split_whitespace().collect();
    let [var, op, threshold] = parts[..] else {
        return Err(parse_err(line, "guard must be `guard ?var <ge|gt|le|lt|eq> <number>`"));
    };
    let variable = var
        .strip_prefix('?')
        .filter(|v| !v.is_empty() && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
        .ok_or_else(|| parse_err(line, format!("expected a variable, found {var:?}")))?;
    let comparator = match op {
        "ge" => Comparator::Ge,
        "gt" => Comparator::Gt,
        "le" => Comparator::Le,
        "lt" => Comparator::Lt,
        "eq" => Comparator::Eq,
        other => return Err(parse_err(line, format!("unknown comparator {other:?}"))),
    };
    let threshold: f64 = threshold
        .parse()
        .ok()
        .filter(|t: &f64| t.is_finite())
        .ok_or_else(|| parse_err(line, format!("threshold {threshold:?} is not a finite number")))?;
    Ok(Guard {
        variable: variable.to_string(),
        comparator,
        threshold,
    })
}

fn parse_prefix(rest: &str, line: usize) -> Result<(String, String), RuleError> {
    let rest = rest.trim().trim_end_matches('.').trim();
    let (name, iri) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| parse_err(line, "expected `@prefix name: <iri> .`"))?;
    let name = name
        .strip_suffix(':')
        .ok_or_else(|| parse_err(line, "prefix name must end with ':'"))?;
    let iri = iri
        .trim()
        .strip_prefix('<')
        .and_then(|i| i.strip_suffix('>'))
        .filter(|i| !i.is_empty())
        .ok_or_else(|| parse_err(line, "prefix IRI must be written as <...>"))?;
    Ok((name.to_string(), iri.to_string()))
}

/// Parses a rules file. Standard prefixes (rdf, skos, safed, ghs, ...) are
/// predeclared; `@prefix` lines add to or override them.
pub fn load_rules(text: &str) -> Result<Vec<InferenceRule>, RuleError> {
    let mut prefixes: BTreeMap<String, String> = vocab::standard_prefixes()
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    let mut rules = Vec::new();
    let mut names = BTreeSet::new();
    let mut header_seen = false;
    let mut current: Option<Draft> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            if line != FORMAT_HEADER {
                return Err(parse_err(line_no, format!("expected header `{FORMAT_HEADER}`")));
            }
            header_seen = true;
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match (keyword, current.as_mut()) {
            ("@prefix", None) => {
                let (name, iri) = parse_prefix(rest, line_no)?;
                prefixes.insert(name, iri);
            }
            ("rule", None) => {
                let valid = !rest.is_empty()
                    && rest
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
                if !valid {
                    return Err(parse_err(line_no, format!("invalid rule name {rest:?}")));
                }
                if !names.insert(rest.to_string()) {
                    return Err(parse_err(line_no, format!("duplicate rule name {rest:?}")));
                }
                current = Some(Draft {
                    name: rest.to_string(),
                    line: line_no,
                    ..Draft::default()
                });
            }
            ("when", Some(d)) | ("then", Some(d)) => {
                let patterns = parse_triple_patterns(rest, &prefixes)
                    .map_err(|e| parse_err(line_no, e.to_string()))?;
                if patterns.is_empty() {
                    return Err(parse_err(line_no, format!("`{keyword}` needs a triple pattern")));
                }
                if keyword == "when" {
                    d.premises.extend(patterns);
                } else {
                    if d.conclusion.is_some() || patterns.len() > 1 {
                        return Err(parse_err(line_no, "a rule has exactly one conclusion"));
                    }
                    d.conclusion = patterns.into_iter().next();
                }
            }
            ("guard", Some(d)) => {
                if d.guard.is_some() {
                    return Err(parse_err(line_no, "a rule has at most one guard"));
                }
                d.guard = Some(parse_guard(rest, line_no)?);
            }
            ("end", Some(_)) if rest.is_empty() => {
                let d = current.take().expect("matched Some");
                if d.premises.is_empty() {
                    return Err(parse_err(d.line, format!("rule {} has no `when` premise", d.name)));
                }
                let conclusion = d
                    .conclusion
                    .ok_or_else(|| parse_err(d.line, format!("rule {} has no `then` conclusion", d.name)))?;
                rules.push(InferenceRule::new(d.name, d.premises, d.guard, conclusion)?);
            }
            (kw, None) => return Err(parse_err(line_no, format!("unexpected `{kw}` outside a rule"))),
            (kw, Some(_)) => return Err(parse_err(line_no, format!("unexpected `{kw}` inside a rule"))),
        }
    }
    if let Some(d) = current {
        return Err(parse_err(d.line, format!("rule {} is missing `end`", d.name)));
    }
    Ok(rules)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TraceEntry {
    pub rule: String,
    pub iteration: usize,
    pub binding: Binding,
    pub triple: Triple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceOutcome {
    pub graph: Graph,
    pub trace: Vec<TraceEntry>,
    pub iterations: usize,
    /// True when the last permitted iteration still produced new triples.
    pub capped: bool,
}

impl InferenceOutcome {
    pub fn inferred(&self) -> BTreeSet<Triple> {
        self.trace.iter().map(|t| t.triple.clone()).collect()
    }
}

fn extend_all(graph: &Graph, patterns: &[&TriplePattern], start: Binding) -> Vec<Binding> {
    let mut partial = vec![start];
    for p in patterns {
        let mut next = Vec::new();
        for b in &partial {
            for m in graph.match_pattern(&p.substitute(b)) {
                let mut merged = b.clone();
                merged.extend(m);
                next.push(merged);
            }
        }
        partial = next;
        if partial.is_empty() {
            break;
        }
    }
    partial
}

fn instantiate(pattern: &TriplePattern, binding: &Binding) -> Option<Triple> {
    let resolve = |slot: &PatternTerm| match slot {
        PatternTerm::Term(t) => Some(t.clone()),
        PatternTerm::Var(v) => binding.get(v).cloned(),
    };
    Triple::new(resolve(&pattern.subject)?, resolve(&pattern.predicate)?, resolve(&pattern.object)?).ok()
}

/// Premise bindings for `rule` over `graph`; with `delta`, only bindings
/// that use at least one triple from it.
fn bindings(rule: &InferenceRule, graph: &Graph, delta: Option<&Graph>) -> BTreeSet<Binding> {
    let mut out = BTreeSet::new();
    match delta {
        None => {
            let all: Vec<&TriplePattern> = rule.premises.iter().collect();
            out.extend(extend_all(graph, &all, Binding::new()));
        }
        Some(delta) => {
            for (i, seed) in rule.premises.iter().enumerate() {
                let rest: Vec<&TriplePattern> = rule
                    .premises
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, p)| p)
                    .collect();
                for b in delta.match_pattern(seed) {
                    out.extend(extend_all(graph, &rest, b));
                }
            }
        }
    }
    out.retain(|b| rule.guard.as_ref().is_none_or(|g| g.admits(b)));
    out
}

/// Forward chaining to fixpoint. Each iteration evaluates every rule against
/// the graph as it stood at the start of the iteration, so the result does
/// not depend on rule order. `max_iterations` below 1 is treated as 1.
pub fn apply_rules(data: &Graph, rules: &[InferenceRule], max_iterations: usize) -> InferenceOutcome {
    let max_iterations = max_iterations.max(1);
    let mut graph = data.clone();
    let mut trace = Vec::new();
    let mut delta: Option<Graph> = None;
    let mut iterations = 0;
    let mut capped = false;

    while iterations < max_iterations {
        iterations += 1;
        let mut produced = Graph::new();
        for rule in rules {
            for b in bindings(rule, &graph, delta.as_ref()) {
                let Some(t) = instantiate(&rule.conclusion, &b) else { continue };
                if graph.contains(&t) {
                    continue;
                }
                produced.insert(t.clone());
                trace.push(TraceEntry {
                    rule: rule.name.clone(),
                    iteration: iterations,
                    binding: b,
                    triple: t,
                });
            }
        }
        if produced.is_empty() {
            break;
        }
        graph.extend(produced.iter());
        if iterations == max_iterations {
            capped = true;
        }
        delta = Some(produced);
    }
    trace.sort();
    InferenceOutcome {
        graph,
        trace,
        iterations,
        capped,
    }
}
