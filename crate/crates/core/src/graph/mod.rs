//! Embedded triple store: terms, indexed graphs, N-Triples/Turtle syntax and
//! a small SPARQL-subset evaluator.

mod iso;
mod lexer;
pub mod query;
mod store;
pub mod syntax;
pub mod term;
pub mod vocab;

pub use query::{evaluate_query, parse_triple_patterns, Comparator, Filter, Query, QueryError, Solutions};
pub use store::{Binding, Graph, PatternTerm, TriplePattern};
pub use syntax::{parse, serialize, ParseError, RdfFormat};
pub use term::{Literal, Term, TermError, Triple};
