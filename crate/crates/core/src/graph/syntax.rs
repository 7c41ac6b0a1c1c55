//! N-Triples and Turtle (subset) parsing and serialization.
//!
//! The Turtle reader covers prefix declarations (`@prefix` and `PREFIX`),
//! prefixed names, the `a` keyword, predicate lists, object lists,
//! plain/typed/language-tagged literals, numeric and boolean shorthands,
//! labelled blank nodes, `[ ... ]` property lists and `( ... )` collections.
//! `@base` and relative IRI resolution are not supported.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use super::lexer::{LexError, Lexer, Position, Tok};
use super::store::Graph;
use super::term::{is_language_tag, Literal, Term, TermError, Triple};
use super::vocab::{rdf, xsd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdfFormat {
    NTriples,
    Turtle,
}

impl RdfFormat {
    /// Guesses the format from a file extension; anything but `.nt` is Turtle.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("nt") => RdfFormat::NTriples,
            _ => RdfFormat::Turtle,
        }
    }
}

impl FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nt" | "ntriples" | "n-triples" => Ok(RdfFormat::NTriples),
            "ttl" | "turtle" => Ok(RdfFormat::Turtle),
            other => Err(format!("unknown RDF format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undefined prefix {prefix:?} at {line}:{column}")]
    UndefinedPrefix {
        prefix: String,
        line: usize,
        column: usize,
    },
}

impl ParseError {
    pub(crate) fn syntax(pos: Position, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. } | ParseError::UndefinedPrefix { line, column, .. } => {
                (*line, *column)
            }
        }
    }
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError::syntax(e.pos, e.message)
    }
}

pub fn parse(text: &str, format: RdfFormat) -> Result<Graph, ParseError> {
    let tokens = Lexer::new(text, false).tokenize()?;
    let mut parser = Parser {
        tokens,
        idx: 0,
        prefixes: BTreeMap::new(),
        blanks: HashMap::new(),
        next_blank: 0,
        graph: Graph::new(),
        ntriples: format == RdfFormat::NTriples,
        end: end_position(text),
    };
    parser.document()?;
    let mut graph = parser.graph;
    for (p, ns) in parser.prefixes {
        graph.set_prefix(p, ns);
    }
    Ok(graph)
}

pub fn serialize(graph: &Graph, format: RdfFormat) -> String {
    match format {
        RdfFormat::NTriples => to_ntriples(graph),
        RdfFormat::Turtle => to_turtle(graph),
    }
}

fn end_position(text: &str) -> Position {
    let line = text.matches('\n').count() + 1;
    let column = text.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    Position { line, column }
}

struct Parser {
    tokens: Vec<(Tok, Position)>,
    idx: usize,
    prefixes: BTreeMap<String, String>,
    blanks: HashMap<String, Term>,
    next_blank: usize,
    graph: Graph,
    ntriples: bool,
    end: Position,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> Position {
        self.tokens.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn next(&mut self) -> Result<(Tok, Position), ParseError> {
        match self.tokens.get(self.idx) {
            Some(t) => {
                self.idx += 1;
                Ok(t.clone())
            }
            None => Err(ParseError::syntax(self.end, "unexpected end of input")),
        }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        let (tok, pos) = self.next()?;
        if &tok == want {
            Ok(())
        } else {
            Err(ParseError::syntax(pos, format!("expected {what}, found {tok}")))
        }
    }

    fn fresh_blank(&mut self) -> Term {
        let t = Term::BlankNode(format!("b{}", self.next_blank));
        self.next_blank += 1;
        t
    }

    fn labelled_blank(&mut self, label: &str) -> Term {
        if let Some(t) = self.blanks.get(label) {
            return t.clone();
        }
        let t = self.fresh_blank();
        self.blanks.insert(label.to_string(), t.clone());
        t
    }

    fn emit(&mut self, s: Term, p: Term, o: Term, pos: Position) -> Result<(), ParseError> {
        let t = Triple::new(s, p, o).map_err(|e| ParseError::syntax(pos, e.to_string()))?;
        self.graph.insert(t);
        Ok(())
    }

    fn document(&mut self) -> Result<(), ParseError> {
        while let Some(tok) = self.peek() {
            match tok {
                Tok::AtKeyword(k) if !self.ntriples => {
                    let k = k.clone();
                    let pos = self.pos();
                    self.idx += 1;
                    if k != "prefix" {
                        return Err(ParseError::syntax(pos, "@base is not supported"));
                    }
                    self.prefix_decl()?;
                    self.expect(&Tok::Dot, "'.' after @prefix")?;
                }
                Tok::Word(w) if !self.ntriples && w.eq_ignore_ascii_case("prefix") => {
                    self.idx += 1;
                    self.prefix_decl()?;
                }
                Tok::Word(w) if !self.ntriples && w.eq_ignore_ascii_case("base") => {
                    return Err(ParseError::syntax(self.pos(), "BASE is not supported"));
                }
                _ => {
                    self.triples()?;
                    self.expect(&Tok::Dot, "'.' at end of statement")?;
                }
            }
        }
        Ok(())
    }

    fn prefix_decl(&mut self) -> Result<(), ParseError> {
        let (tok, pos) = self.next()?;
        let prefix = match tok {
            Tok::PName { prefix, local } if local.is_empty() => prefix,
            other => return Err(ParseError::syntax(pos, format!("expected prefix name, found {other}"))),
        };
        let (tok, pos) = self.next()?;
        let Tok::Iri(ns) = tok else {
            return Err(ParseError::syntax(pos, format!("expected namespace IRI, found {tok}")));
        };
        super::term::validate_iri(&ns).map_err(|e| ParseError::syntax(pos, e.to_string()))?;
        self.prefixes.insert(prefix, ns);
        Ok(())
    }

    fn triples(&mut self) -> Result<(), ParseError> {
        let pos = self.pos();
        if !self.ntriples && self.peek() == Some(&Tok::LBracket) {
            let subject = self.blank_property_list()?;
            if self.peek() != Some(&Tok::Dot) {
                self.predicate_object_list(&subject)?;
            }
            return Ok(());
        }
        let subject = self.node(pos, true)?;
        if subject.is_literal() {
            return Err(ParseError::syntax(pos, "a literal cannot be a subject"));
        }
        if self.ntriples {
            let p_pos = self.pos();
            let predicate = self.verb()?;
            let o_pos = self.pos();
            let object = self.node(o_pos, false)?;
            return self.emit(subject, predicate, object, p_pos);
        }
        self.predicate_object_list(&subject)
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), ParseError> {
        loop {
            let p_pos = self.pos();
            let predicate = self.verb()?;
            loop {
                let o_pos = self.pos();
                let object = self.object()?;
                self.emit(subject.clone(), predicate.clone(), object, o_pos.max(p_pos))?;
                if self.peek() == Some(&Tok::Comma) {
                    self.idx += 1;
                } else {
                    break;
                }
            }
            if self.peek() != Some(&Tok::Semicolon) {
                return Ok(());
            }
            while self.peek() == Some(&Tok::Semicolon) {
                self.idx += 1;
            }
            if matches!(self.peek(), Some(Tok::Dot) | Some(Tok::RBracket) | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        if !self.ntriples && self.peek() == Some(&Tok::Word("a".into())) {
            self.idx += 1;
            return Ok(Term::Iri(rdf::TYPE.to_string()));
        }
        let t = self.node(pos, true)?;
        if t.as_iri().is_none() {
            return Err(ParseError::syntax(pos, "predicate must be an IRI"));
        }
        Ok(t)
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::LBracket) => self.blank_property_list(),
            Some(Tok::LParen) => self.collection(),
            _ => self.node(pos, false),
        }
    }

    fn blank_property_list(&mut self) -> Result<Term, ParseError> {
        self.expect(&Tok::LBracket, "'['")?;
        let node = self.fresh_blank();
        if self.peek() != Some(&Tok::RBracket) {
            self.predicate_object_list(&node)?;
        }
        self.expect(&Tok::RBracket, "']'")?;
        Ok(node)
    }

    fn collection(&mut self) -> Result<Term, ParseError> {
        let start = self.pos();
        self.expect(&Tok::LParen, "'('")?;
        let mut items = Vec::new();
        while self.peek() != Some(&Tok::RParen) {
            if self.peek().is_none() {
                return Err(ParseError::syntax(start, "unterminated collection"));
            }
            items.push(self.object()?);
        }
        self.idx += 1;
        let mut head = Term::Iri(rdf::NIL.to_string());
        for item in items.into_iter().rev() {
            let cell = self.fresh_blank();
            self.emit(cell.clone(), Term::Iri(rdf::FIRST.into()), item, start)?;
            self.emit(cell.clone(), Term::Iri(rdf::REST.into()), head, start)?;
            head = cell;
        }
        Ok(head)
    }

    /// IRI, prefixed name, blank label, or literal.
    fn node(&mut self, pos: Position, resource_only: bool) -> Result<Term, ParseError> {
        let (tok, tpos) = self.next()?;
        let term = match tok {
            Tok::Iri(iri) => Term::iri(iri).map_err(|e| ParseError::syntax(tpos, e.to_string()))?,
            Tok::PName { prefix, local } if !self.ntriples => {
                let Some(ns) = self.prefixes.get(&prefix) else {
                    return Err(ParseError::UndefinedPrefix {
                        prefix,
                        line: tpos.line,
                        column: tpos.column,
                    });
                };
                Term::iri(format!("{ns}{}", unescape_local(&local)))
                    .map_err(|e| ParseError::syntax(tpos, e.to_string()))?
            }
            Tok::Blank(label) => self.labelled_blank(&label),
            Tok::Str(s) if !resource_only => self.literal_suffix(s)?,
            Tok::Integer(n) if !resource_only && !self.ntriples => {
                Term::Literal(Literal::typed(n, xsd::INTEGER).expect("static datatype"))
            }
            Tok::Decimal(n) if !resource_only && !self.ntriples => {
                Term::Literal(Literal::typed(n, xsd::DECIMAL).expect("static datatype"))
            }
            Tok::Double(n) if !resource_only && !self.ntriples => {
                Term::Literal(Literal::typed(n, xsd::DOUBLE).expect("static datatype"))
            }
            Tok::Word(w) if !resource_only && !self.ntriples && (w == "true" || w == "false") => {
                Term::Literal(Literal::typed(w, xsd::BOOLEAN).expect("static datatype"))
            }
            other => {
                let _ = pos;
                return Err(ParseError::syntax(tpos, format!("unexpected token {other}")));
            }
        };
        Ok(term)
    }

    fn literal_suffix(&mut self, lexical: String) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::LangTag(tag)) => {
                let tag = tag.clone();
                let pos = self.pos();
                self.idx += 1;
                if !is_language_tag(&tag) {
                    return Err(ParseError::syntax(pos, format!("invalid language tag {tag:?}")));
                }
                Ok(Term::Literal(Literal::lang(lexical, &tag).map_err(|e: TermError| ParseError::syntax(pos, e.to_string()))?))
            }
            Some(Tok::Caret2) => {
                self.idx += 1;
                let pos = self.pos();
                let dt = self.node(pos, true)?;
                let Some(dt) = dt.as_iri() else {
                    return Err(ParseError::syntax(pos, "datatype must be an IRI"));
                };
                if dt == rdf::LANG_STRING {
                    return Err(ParseError::syntax(pos, "rdf:langString requires a language tag"));
                }
                Ok(Term::Literal(
                    Literal::typed(lexical, dt).map_err(|e| ParseError::syntax(pos, e.to_string()))?,
                ))
            }
            _ => Ok(Term::Literal(Literal::string(lexical))),
        }
    }
}

fn unescape_local(local: &str) -> String {
    let mut out = String::with_capacity(local.len());
    let mut chars = local.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(n) = chars.next() {
                out.push(n);
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn to_ntriples(graph: &Graph) -> String {
    let mut out = String::new();
    for t in graph.iter() {
        let _ = writeln!(out, "{t}");
    }
    out
}

fn to_turtle(graph: &Graph) -> String {
    let prefixes = graph.prefixes();
    let mut out = String::new();
    for (p, ns) in prefixes {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    if graph.is_empty() {
        return out;
    }
    if !prefixes.is_empty() {
        out.push('\n');
    }
    let mut by_subject: BTreeMap<Term, BTreeMap<Term, BTreeSet<Term>>> = BTreeMap::new();
    for t in graph.iter() {
        by_subject
            .entry(t.subject)
            .or_default()
            .entry(t.predicate)
            .or_default()
            .insert(t.object);
    }
    for (s, preds) in by_subject {
        let _ = write!(out, "{}", turtle_term(&s, prefixes));
        let mut first_pred = true;
        for (p, objs) in preds {
            out.push_str(if first_pred { " " } else { " ;\n    " });
            first_pred = false;
            let verb = if p.as_iri() == Some(rdf::TYPE) {
                "a".to_string()
            } else {
                turtle_term(&p, prefixes)
            };
            out.push_str(&verb);
            let rendered: Vec<String> = objs.iter().map(|o| turtle_term(o, prefixes)).collect();
            let _ = write!(out, " {}", rendered.join(", "));
        }
        out.push_str(" .\n");
    }
    out
}

fn turtle_term(term: &Term, prefixes: &BTreeMap<String, String>) -> String {
    match term {
        Term::Iri(iri) => compact(iri, prefixes).unwrap_or_else(|| term.to_string()),
        Term::BlankNode(_) => term.to_string(),
        Term::Literal(lit) => {
            let mut s = format!("\"{}\"", super::term::escape_string(lit.lexical()));
            if let Some(lang) = lit.language() {
                let _ = write!(s, "@{lang}");
            } else if lit.datatype() != xsd::STRING {
                let dt = compact(lit.datatype(), prefixes)
                    .unwrap_or_else(|| format!("<{}>", lit.datatype()));
                let _ = write!(s, "^^{dt}");
            }
            s
        }
    }
}

fn compact(iri: &str, prefixes: &BTreeMap<String, String>) -> Option<String> {
    prefixes
        .iter()
        .filter_map(|(p, ns)| iri.strip_prefix(ns.as_str()).map(|local| (p, local)))
        .filter(|(_, local)| is_safe_local(local))
        .max_by_key(|(p, local)| (usize::MAX - local.len(), std::cmp::Reverse(p.len())))
        .map(|(p, local)| format!("{p}:{local}"))
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            !local.ends_with('.')
                && !local.ends_with('-')
                && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_is_empty_graph() {
        assert!(parse("", RdfFormat::Turtle).unwrap().is_empty());
        assert!(parse("", RdfFormat::NTriples).unwrap().is_empty());
    }

    #[test]
    fn single_ntriples_line() {
        let g = parse("<http://e/s> <http://e/p> \"o\"@en .\n", RdfFormat::NTriples).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn ntriples_rejects_prefixed_names() {
        let err = parse("@prefix e: <http://e/> .", RdfFormat::NTriples).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, column: 1, .. }));
    }

    #[test]
    fn turtle_lists_and_keyword_a() {
        let src = "@prefix e: <http://e/> .\n e:s a e:C ; e:p e:o1 , e:o2 ; e:n 12.5 ; e:b true .";
        let g = parse(src, RdfFormat::Turtle).unwrap();
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn undefined_prefix_has_position() {
        let err = parse("\n  x:s x:p x:o .", RdfFormat::Turtle).unwrap_err();
        assert_eq!(
            err,
            ParseError::UndefinedPrefix {
                prefix: "x".into(),
                line: 2,
                column: 3
            }
        );
    }

    #[test]
    fn missing_dot_is_syntax_error() {
        let err = parse("<http://e/s> <http://e/p> <http://e/o>", RdfFormat::Turtle).unwrap_err();
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn blank_labels_are_fresh_per_parse() {
        let g = parse("_:zzz <http://e/p> _:zzz .", RdfFormat::NTriples).unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject, Term::BlankNode("b0".into()));
        assert_eq!(t.subject, t.object);
    }

    #[test]
    fn collection_expands_to_rdf_list() {
        let g = parse("<http://e/s> <http://e/p> ( 1 2 ) .", RdfFormat::Turtle).unwrap();
        assert_eq!(g.len(), 5);
    }

    #[test]
    fn turtle_serialization_is_stable_and_reparses() {
        let src = "@prefix e: <http://e/> .\n e:s a e:C ; e:p \"x\"@de , \"y\"^^e:T ; e:q [ e:r 1 ] .";
        let g = parse(src, RdfFormat::Turtle).unwrap();
        let a = serialize(&g, RdfFormat::Turtle);
        let b = serialize(&g, RdfFormat::Turtle);
        assert_eq!(a, b);
        let back = parse(&a, RdfFormat::Turtle).unwrap();
        assert_eq!(back.len(), g.len());
    }

    #[test]
    fn empty_turtle_serializes_prefix_header_only() {
        let g = Graph::new().with_standard_prefixes();
        let s = serialize(&g, RdfFormat::Turtle);
        assert!(s.lines().all(|l| l.starts_with("@prefix")));
        assert_eq!(serialize(&Graph::new(), RdfFormat::NTriples), "");
    }
}
