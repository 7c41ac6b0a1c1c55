//! A closed SPARQL subset: `PREFIX` declarations, `SELECT [DISTINCT] vars|*`,
//! a basic graph pattern, and `FILTER`s of the forms
//!
//! * `lang(?v) = "tag"`
//! * `?v = "literal"` (optionally `@lang` / `^^datatype`), `?v != ...`
//! * `?v <op> number` with `<op>` one of `< <= > >= =`
//!
//! Filters may be joined with `&&`. Triple patterns support `;` and `,`
//! abbreviations and the `a` keyword.

use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{Lexer, Position, Tok};
use super::store::{Binding, Graph, PatternTerm, TriplePattern};
use super::syntax::ParseError;
use super::term::{Literal, Term};
use super::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("query parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix {prefix:?} at {line}:{column}")]
    UnknownPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
    #[error("projected variable ?{0} does not appear in the pattern block")]
    UnboundProjectedVariable(String),
    #[error("filter variable ?{0} does not appear in the pattern block")]
    UnboundFilterVariable(String),
}

impl QueryError {
    fn parse(pos: Position, message: impl Into<String>) -> Self {
        QueryError::Parse {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }
}

impl From<ParseError> for QueryError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Syntax { line, column, message } => QueryError::Parse { line, column, message },
            ParseError::UndefinedPrefix { prefix, line, column } => {
                QueryError::UnknownPrefix { prefix, line, column }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl Comparator {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparator::Lt => lhs < rhs,
            Comparator::Le => lhs <= rhs,
            Comparator::Gt => lhs > rhs,
            Comparator::Ge => lhs >= rhs,
            Comparator::Eq => lhs == rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Filter {
    LangEquals { var: String, tag: String },
    TermEquals { var: String, value: Term, negated: bool },
    Numeric { var: String, op: Comparator, value: f64 },
}

impl Filter {
    fn var(&self) -> &str {
        match self {
            Filter::LangEquals { var, .. } | Filter::TermEquals { var, .. } | Filter::Numeric { var, .. } => var,
        }
    }

    /// Evaluation errors (unbound, non-numeric) drop the row.
    pub fn accepts(&self, binding: &Binding) -> bool {
        let Some(value) = binding.get(self.var()) else {
            return false;
        };
        match self {
            Filter::LangEquals { tag, .. } => value
                .as_literal()
                .map(|l| l.language().unwrap_or(""))
                .is_some_and(|lang| lang.eq_ignore_ascii_case(tag)),
            Filter::TermEquals { value: want, negated, .. } => (value == want) != *negated,
            Filter::Numeric { op, value: rhs, .. } => value
                .as_literal()
                .and_then(Literal::as_number)
                .is_some_and(|lhs| op.holds(lhs, *rhs)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub projection: Vec<String>,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
    pub prefixes: BTreeMap<String, String>,
}

/// Projected rows in deterministic order.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Solutions {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl Solutions {
    pub fn bindings(&self) -> Vec<Binding> {
        self.rows
            .iter()
            .map(|row| self.variables.iter().cloned().zip(row.iter().cloned()).collect())
            .collect()
    }
}

impl Query {
    /// Parses a query; prefixes not declared in the text are looked up in
    /// `default_prefixes`.
    pub fn parse(text: &str, default_prefixes: &BTreeMap<String, String>) -> Result<Query, QueryError> {
        let tokens = Lexer::new(text, true)
            .tokenize()
            .map_err(|e| QueryError::parse(e.pos, e.message))?;
        let end = {
            let line = text.matches('\n').count() + 1;
            let column = text.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
            Position { line, column }
        };
        let mut p = QueryParser {
            tokens,
            idx: 0,
            end,
            prefixes: BTreeMap::new(),
            defaults: default_prefixes,
        };
        p.query()
    }

    pub fn evaluate(&self, graph: &Graph) -> Solutions {
        let mut partial: Vec<Binding> = vec![Binding::new()];
        for pattern in &self.patterns {
            let mut next = Vec::new();
            for b in &partial {
                let bound = pattern.substitute(b);
                for m in graph.match_pattern(&bound) {
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
        let mut rows: Vec<Vec<Term>> = partial
            .into_iter()
            .filter(|b| self.filters.iter().all(|f| f.accepts(b)))
            .map(|b| {
                self.projection
                    .iter()
                    .map(|v| b.get(v).cloned().expect("projection checked at parse time"))
                    .collect()
            })
            .collect();
        rows.sort();
        if self.distinct {
            rows.dedup();
        }
        Solutions {
            variables: self.projection.clone(),
            rows,
        }
    }
}

/// Parses and evaluates `query_text` against `graph`, resolving undeclared
/// prefixes through the graph's prefix map.
pub fn evaluate_query(graph: &Graph, query_text: &str) -> Result<Solutions, QueryError> {
    Ok(Query::parse(query_text, graph.prefixes())?.evaluate(graph))
}

/// Parses a sequence of `.`-terminated triple patterns (Turtle-style `;`
/// and `,` abbreviations allowed) using only the given prefixes.
pub fn parse_triple_patterns(
    text: &str,
    prefixes: &BTreeMap<String, String>,
) -> Result<Vec<TriplePattern>, QueryError> {
    let tokens = Lexer::new(text, true)
        .tokenize()
        .map_err(|e| QueryError::parse(e.pos, e.message))?;
    let end = Position {
        line: text.matches('\n').count() + 1,
        column: text.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1,
    };
    let mut p = QueryParser {
        tokens,
        idx: 0,
        end,
        prefixes: BTreeMap::new(),
        defaults: prefixes,
    };
    let mut out = Vec::new();
    while p.peek().is_some() {
        p.triples_block(&mut out)?;
        p.expect(Tok::Dot)?;
    }
    Ok(out)
}

struct QueryParser<'d> {
    tokens: Vec<(Tok, Position)>,
    idx: usize,
    end: Position,
    prefixes: BTreeMap<String, String>,
    defaults: &'d BTreeMap<String, String>,
}

impl QueryParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> Position {
        self.tokens.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Result<(Tok, Position), QueryError> {
        let t = self
            .tokens
            .get(self.idx)
            .cloned()
            .ok_or_else(|| QueryError::parse(self.end, "unexpected end of query"))?;
        self.idx += 1;
        Ok(t)
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn expect(&mut self, want: Tok) -> Result<(), QueryError> {
        let (tok, pos) = self.next()?;
        if tok == want {
            Ok(())
        } else {
            Err(QueryError::parse(pos, format!("expected {want}, found {tok}")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.keyword(kw) {
            self.idx += 1;
            Ok(())
        } else {
            let pos = self.pos();
            let found = self.peek().map(|t| t.to_string()).unwrap_or_else(|| "end of query".into());
            Err(QueryError::parse(pos, format!("expected {kw}, found {found}")))
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        while self.keyword("PREFIX") {
            self.idx += 1;
            let (tok, pos) = self.next()?;
            let prefix = match tok {
                Tok::PName { prefix, local } if local.is_empty() => prefix,
                other => return Err(QueryError::parse(pos, format!("expected prefix name, found {other}"))),
            };
            let (tok, pos) = self.next()?;
            let Tok::Iri(ns) = tok else {
                return Err(QueryError::parse(pos, format!("expected namespace IRI, found {tok}")));
            };
            self.prefixes.insert(prefix, ns);
        }
        self.expect_keyword("SELECT")?;
        let mut distinct = false;
        if self.keyword("DISTINCT") {
            self.idx += 1;
            distinct = true;
        }
        let mut projection = Vec::new();
        let mut star = false;
        let mut proj_pos = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Var(v)) => {
                    proj_pos.push(self.pos());
                    projection.push(v.clone());
                    self.idx += 1;
                }
                Some(Tok::Star) if projection.is_empty() && !star => {
                    star = true;
                    self.idx += 1;
                }
                _ => break,
            }
        }
        if projection.is_empty() && !star {
            return Err(QueryError::parse(self.pos(), "expected projected variables or '*'"));
        }
        if self.keyword("WHERE") {
            self.idx += 1;
        }
        self.expect(Tok::LBrace)?;
        let mut patterns = Vec::new();
        let mut filters = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.idx += 1;
                    break;
                }
                Some(Tok::Dot) => {
                    self.idx += 1;
                }
                Some(Tok::Word(w)) if w.eq_ignore_ascii_case("FILTER") => {
                    self.idx += 1;
                    self.filter(&mut filters)?;
                }
                Some(_) => self.triples_block(&mut patterns)?,
                None => return Err(QueryError::parse(self.end, "unterminated group pattern")),
            }
        }
        if let Some((tok, pos)) = self.tokens.get(self.idx) {
            return Err(QueryError::parse(*pos, format!("unexpected trailing token {tok}")));
        }
        let pattern_vars: BTreeSet<&str> = patterns.iter().flat_map(|p| p.variables()).collect();
        if star {
            projection = pattern_vars.iter().map(|v| v.to_string()).collect();
        }
        for v in &projection {
            if !pattern_vars.contains(v.as_str()) {
                return Err(QueryError::UnboundProjectedVariable(v.clone()));
            }
        }
        for f in &filters {
            if !pattern_vars.contains(f.var()) {
                return Err(QueryError::UnboundFilterVariable(f.var().to_string()));
            }
        }
        Ok(Query {
            projection,
            distinct,
            patterns,
            filters,
            prefixes: self.prefixes.clone(),
        })
    }

    fn triples_block(&mut self, out: &mut Vec<TriplePattern>) -> Result<(), QueryError> {
        let subject = self.slot(false)?;
        loop {
            let predicate = if self.keyword("a") {
                self.idx += 1;
                PatternTerm::Term(Term::Iri(rdf::TYPE.into()))
            } else {
                self.slot(false)?
            };
            loop {
                let object = self.slot(true)?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if self.peek() == Some(&Tok::Comma) {
                    self.idx += 1;
                } else {
                    break;
                }
            }
            if self.peek() == Some(&Tok::Semicolon) {
                self.idx += 1;
                if matches!(self.peek(), Some(Tok::Dot) | Some(Tok::RBrace)) {
                    return Ok(());
                }
                continue;
            }
            return Ok(());
        }
    }

    fn resolve(&self, prefix: &str, local: &str, pos: Position) -> Result<Term, QueryError> {
        let ns = self
            .prefixes
            .get(prefix)
            .or_else(|| self.defaults.get(prefix))
            .ok_or_else(|| QueryError::UnknownPrefix {
                prefix: prefix.to_string(),
                line: pos.line,
                column: pos.column,
            })?;
        Term::iri(format!("{ns}{local}")).map_err(|e| QueryError::parse(pos, e.to_string()))
    }

    fn slot(&mut self, allow_literal: bool) -> Result<PatternTerm, QueryError> {
        let (tok, pos) = self.next()?;
        Ok(match tok {
            Tok::Var(v) => PatternTerm::Var(v),
            Tok::Iri(i) => PatternTerm::Term(Term::iri(i).map_err(|e| QueryError::parse(pos, e.to_string()))?),
            Tok::PName { prefix, local } => PatternTerm::Term(self.resolve(&prefix, &local, pos)?),
            Tok::Str(s) if allow_literal => PatternTerm::Term(self.literal_suffix(s)?),
            Tok::Integer(n) if allow_literal => PatternTerm::Term(Term::Literal(
                Literal::typed(n, xsd::INTEGER).expect("static datatype"),
            )),
            Tok::Decimal(n) if allow_literal => PatternTerm::Term(Term::Literal(
                Literal::typed(n, xsd::DECIMAL).expect("static datatype"),
            )),
            other => return Err(QueryError::parse(pos, format!("unexpected token {other} in triple pattern"))),
        })
    }

    fn literal_suffix(&mut self, lexical: String) -> Result<Term, QueryError> {
        match self.peek() {
            Some(Tok::LangTag(tag)) => {
                let tag = tag.clone();
                let pos = self.pos();
                self.idx += 1;
                Literal::lang(lexical, &tag)
                    .map(Term::Literal)
                    .map_err(|e| QueryError::parse(pos, e.to_string()))
            }
            Some(Tok::Caret2) => {
                self.idx += 1;
                let (tok, pos) = self.next()?;
                let dt = match tok {
                    Tok::Iri(i) => i,
                    Tok::PName { prefix, local } => self
                        .resolve(&prefix, &local, pos)?
                        .as_iri()
                        .expect("resolve yields IRIs")
                        .to_string(),
                    other => return Err(QueryError::parse(pos, format!("expected datatype IRI, found {other}"))),
                };
                Literal::typed(lexical, &dt)
                    .map(Term::Literal)
                    .map_err(|e| QueryError::parse(pos, e.to_string()))
            }
            _ => Ok(Term::string(lexical)),
        }
    }

    fn filter(&mut self, out: &mut Vec<Filter>) -> Result<(), QueryError> {
        self.expect(Tok::LParen)?;
        loop {
            out.push(self.comparison()?);
            if self.peek() == Some(&Tok::Op("&&")) {
                self.idx += 1;
            } else {
                break;
            }
        }
        self.expect(Tok::RParen)
    }

    fn comparison(&mut self) -> Result<Filter, QueryError> {
        let (tok, pos) = self.next()?;
        match tok {
            Tok::Word(w) if w.eq_ignore_ascii_case("lang") => {
                self.expect(Tok::LParen)?;
                let (tok, vpos) = self.next()?;
                let Tok::Var(var) = tok else {
                    return Err(QueryError::parse(vpos, "lang() takes a variable"));
                };
                self.expect(Tok::RParen)?;
                self.expect(Tok::Op("="))?;
                let (tok, spos) = self.next()?;
                let Tok::Str(tag) = tok else {
                    return Err(QueryError::parse(spos, "lang() must be compared to a string"));
                };
                Ok(Filter::LangEquals { var, tag })
            }
            Tok::Var(var) => {
                let (op_tok, op_pos) = self.next()?;
                let Tok::Op(op) = op_tok else {
                    return Err(QueryError::parse(op_pos, format!("expected comparison operator, found {op_tok}")));
                };
                let (rhs, rpos) = self.next()?;
                match rhs {
                    Tok::Integer(n) | Tok::Decimal(n) | Tok::Double(n) => {
                        let value: f64 = n
                            .parse()
                            .map_err(|_| QueryError::parse(rpos, format!("invalid number {n}")))?;
                        let op = match op {
                            "<" => Comparator::Lt,
                            "<=" => Comparator::Le,
                            ">" => Comparator::Gt,
                            ">=" => Comparator::Ge,
                            "=" => Comparator::Eq,
                            other => {
                                return Err(QueryError::parse(op_pos, format!("unsupported numeric operator {other}")));
                            }
                        };
                        Ok(Filter::Numeric { var, op, value })
                    }
                    Tok::Str(s) => {
                        let negated = match op {
                            "=" => false,
                            "!=" => true,
                            other => {
                                return Err(QueryError::parse(op_pos, format!("unsupported string operator {other}")));
                            }
                        };
                        let value = self.literal_suffix(s)?;
                        Ok(Filter::TermEquals { var, value, negated })
                    }
                    Tok::Iri(_) | Tok::PName { .. } if op == "=" || op == "!=" => {
                        let value = match rhs {
                            Tok::Iri(i) => Term::iri(i).map_err(|e| QueryError::parse(rpos, e.to_string()))?,
                            Tok::PName { prefix, local } => self.resolve(&prefix, &local, rpos)?,
                            _ => unreachable!(),
                        };
                        Ok(Filter::TermEquals {
                            var,
                            value,
                            negated: op == "!=",
                        })
                    }
                    other => Err(QueryError::parse(rpos, format!("unsupported filter operand {other}"))),
                }
            }
            other => Err(QueryError::parse(pos, format!("unsupported filter expression starting with {other}"))),
        }
    }
}
