use std::collections::{BTreeMap, BTreeSet};

use super::term::{Term, Triple};

type Index = BTreeMap<Term, BTreeMap<Term, BTreeSet<Term>>>;

/// A set of triples with a prefix map.
///
/// Triples are kept in three nested indexes (SPO, POS, OSP) so any pattern
/// with at least one bound slot is answered without a full scan. Iteration
/// order is the derived `Ord` on terms, which makes everything built on top
/// of it deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    spo: Index,
    pos: Index,
    osp: Index,
    len: usize,
    prefixes: BTreeMap<String, String>,
}

/// One slot of a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Term(Term),
    Var(String),
}

impl PatternTerm {
    pub fn var(name: impl Into<String>) -> Self {
        PatternTerm::Var(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(PatternTerm::as_var)
    }

    /// Replaces variables bound in `binding` by their values.
    pub fn substitute(&self, binding: &Binding) -> TriplePattern {
        let sub = |slot: &PatternTerm| match slot {
            PatternTerm::Var(v) => binding
                .get(v)
                .map(|t| PatternTerm::Term(t.clone()))
                .unwrap_or_else(|| slot.clone()),
            t => t.clone(),
        };
        TriplePattern {
            subject: sub(&self.subject),
            predicate: sub(&self.predicate),
            object: sub(&self.object),
        }
    }
}

/// Variable name to term.
pub type Binding = BTreeMap<String, Term>;

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts a triple; returns `false` when it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let Triple {
            subject: s,
            predicate: p,
            object: o,
        } = triple;
        let fresh = self
            .spo
            .entry(s.clone())
            .or_default()
            .entry(p.clone())
            .or_default()
            .insert(o.clone());
        if !fresh {
            return false;
        }
        self.pos
            .entry(p.clone())
            .or_default()
            .entry(o.clone())
            .or_default()
            .insert(s.clone());
        self.osp.entry(o).or_default().entry(s).or_default().insert(p);
        self.len += 1;
        true
    }

    /// Returns a new graph containing `triple` in addition to `self`.
    pub fn with(&self, triple: Triple) -> Graph {
        let mut g = self.clone();
        g.insert(triple);
        g
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        fn take(index: &mut Index, a: &Term, b: &Term, c: &Term) -> bool {
            let Some(level1) = index.get_mut(a) else {
                return false;
            };
            let Some(level2) = level1.get_mut(b) else {
                return false;
            };
            let removed = level2.remove(c);
            if level2.is_empty() {
                level1.remove(b);
            }
            if level1.is_empty() {
                index.remove(a);
            }
            removed
        }
        let (s, p, o) = (&triple.subject, &triple.predicate, &triple.object);
        if !take(&mut self.spo, s, p, o) {
            return false;
        }
        take(&mut self.pos, p, o, s);
        take(&mut self.osp, o, s, p);
        self.len -= 1;
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo
            .get(&triple.subject)
            .and_then(|m| m.get(&triple.predicate))
            .is_some_and(|set| set.contains(&triple.object))
    }

    /// All triples in SPO order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, pm)| {
            pm.iter().flat_map(move |(p, os)| {
                os.iter().map(move |o| Triple {
                    subject: s.clone(),
                    predicate: p.clone(),
                    object: o.clone(),
                })
            })
        })
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) -> usize {
        triples.into_iter().filter(|t| self.insert(t.clone())).count()
    }

    /// Merges `other`, including its prefixes (existing prefixes win).
    pub fn merge(&mut self, other: &Graph) -> usize {
        for (p, ns) in &other.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
        self.extend(other.iter())
    }

    /// Merges a separately parsed document: blank nodes of `other` that clash
    /// with labels already used here are renamed to fresh ones.
    pub fn merge_apart(&mut self, other: &Graph) -> usize {
        let used: BTreeSet<String> = self
            .iter()
            .flat_map(|t| [t.subject, t.object])
            .filter_map(|t| match t {
                Term::BlankNode(b) => Some(b),
                _ => None,
            })
            .collect();
        if used.is_empty() {
            return self.merge(other);
        }
        let theirs: BTreeSet<String> = other
            .iter()
            .flat_map(|t| [t.subject, t.object])
            .filter_map(|t| match t {
                Term::BlankNode(b) => Some(b),
                _ => None,
            })
            .collect();
        let mut renames: BTreeMap<String, String> = BTreeMap::new();
        let mut next = 0usize;
        let mut rename = |t: Term, renames: &mut BTreeMap<String, String>| match t {
            Term::BlankNode(b) if used.contains(&b) => {
                let fresh = renames
                    .entry(b)
                    .or_insert_with(|| loop {
                        let cand = format!("m{next}");
                        next += 1;
                        if !used.contains(&cand) && !theirs.contains(&cand) {
                            break cand;
                        }
                    })
                    .clone();
                Term::BlankNode(fresh)
            }
            other => other,
        };
        for (p, ns) in &other.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
        let mut added = 0;
        for t in other.iter() {
            let subject = rename(t.subject, &mut renames);
            let object = rename(t.object, &mut renames);
            if self.insert(Triple {
                subject,
                predicate: t.predicate,
                object,
            }) {
                added += 1;
            }
        }
        added
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    pub fn set_prefix(&mut self, prefix: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(prefix.into(), namespace.into());
    }

    pub fn with_standard_prefixes(mut self) -> Self {
        for (p, ns) in super::vocab::standard_prefixes() {
            self.prefixes.entry(p.to_string()).or_insert_with(|| ns.to_string());
        }
        self
    }

    /// Objects of `(subject, predicate, ?)`.
    pub fn objects<'a>(&'a self, subject: &Term, predicate: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        self.spo
            .get(subject)
            .and_then(|m| m.get(predicate))
            .into_iter()
            .flatten()
    }

    /// Subjects of `(?, predicate, object)`.
    pub fn subjects<'a>(&'a self, predicate: &Term, object: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        self.pos
            .get(predicate)
            .and_then(|m| m.get(object))
            .into_iter()
            .flatten()
    }

    /// `(subject, object)` pairs for a predicate.
    pub fn pairs<'a>(&'a self, predicate: &Term) -> impl Iterator<Item = (&'a Term, &'a Term)> + 'a {
        self.pos
            .get(predicate)
            .into_iter()
            .flat_map(|m| m.iter().flat_map(|(o, ss)| ss.iter().map(move |s| (s, o))))
    }

    pub fn predicates_of<'a>(&'a self, subject: &Term) -> impl Iterator<Item = &'a Term> + 'a {
        self.spo.get(subject).into_iter().flat_map(|m| m.keys())
    }

    pub fn subjects_all(&self) -> impl Iterator<Item = &Term> {
        self.spo.keys()
    }

    /// Members of the RDF collection starting at `head`; `None` when the list
    /// is malformed (missing or repeated `rdf:first`/`rdf:rest`, or a cycle).
    pub fn read_list(&self, head: &Term) -> Option<Vec<Term>> {
        use super::vocab::rdf;
        let first = Term::Iri(rdf::FIRST.into());
        let rest = Term::Iri(rdf::REST.into());
        let nil = Term::Iri(rdf::NIL.into());
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut cur = head.clone();
        while cur != nil {
            if !seen.insert(cur.clone()) {
                return None;
            }
            let mut firsts = self.objects(&cur, &first);
            let item = firsts.next()?.clone();
            if firsts.next().is_some() {
                return None;
            }
            let mut rests = self.objects(&cur, &rest);
            let next = rests.next()?.clone();
            if rests.next().is_some() {
                return None;
            }
            out.push(item);
            cur = next;
        }
        Some(out)
    }

    /// Solves a single triple pattern. Bindings come back sorted.
    pub fn match_pattern(&self, pattern: &TriplePattern) -> Vec<Binding> {
        let mut out = Vec::new();
        self.for_each_match(pattern, |s, p, o| {
            if let Some(b) = bind(pattern, s, p, o) {
                out.push(b);
            }
        });
        out.sort();
        out.dedup();
        out
    }

    /// Matching triples for a pattern, in index order.
    pub fn matching_triples(&self, pattern: &TriplePattern) -> Vec<Triple> {
        let mut out = Vec::new();
        self.for_each_match(pattern, |s, p, o| {
            if bind(pattern, s, p, o).is_some() {
                out.push(Triple {
                    subject: s.clone(),
                    predicate: p.clone(),
                    object: o.clone(),
                });
            }
        });
        out
    }

    fn for_each_match<F: FnMut(&Term, &Term, &Term)>(&self, pattern: &TriplePattern, mut f: F) {
        let bound = |slot: &PatternTerm| match slot {
            PatternTerm::Term(t) => Some(t.clone()),
            PatternTerm::Var(_) => None,
        };
        match (bound(&pattern.subject), bound(&pattern.predicate), bound(&pattern.object)) {
            (Some(s), Some(p), Some(o)) => {
                let t = Triple {
                    subject: s,
                    predicate: p,
                    object: o,
                };
                if self.contains(&t) {
                    f(&t.subject, &t.predicate, &t.object);
                }
            }
            (Some(s), p, o) => {
                let Some(pm) = self.spo.get(&s) else { return };
                for (pp, os) in pm {
                    if p.as_ref().is_some_and(|p| p != pp) {
                        continue;
                    }
                    for oo in os {
                        if o.as_ref().is_none_or(|o| o == oo) {
                            f(&s, pp, oo);
                        }
                    }
                }
            }
            (None, Some(p), o) => {
                let Some(om) = self.pos.get(&p) else { return };
                match o {
                    Some(o) => {
                        for ss in om.get(&o).into_iter().flatten() {
                            f(ss, &p, &o);
                        }
                    }
                    None => {
                        for (oo, ss) in om {
                            for s in ss {
                                f(s, &p, oo);
                            }
                        }
                    }
                }
            }
            (None, None, Some(o)) => {
                let Some(sm) = self.osp.get(&o) else { return };
                for (ss, ps) in sm {
                    for pp in ps {
                        f(ss, pp, &o);
                    }
                }
            }
            (None, None, None) => {
                for (s, pm) in &self.spo {
                    for (p, os) in pm {
                        for o in os {
                            f(s, p, o);
                        }
                    }
                }
            }
        }
    }
}

fn bind(pattern: &TriplePattern, s: &Term, p: &Term, o: &Term) -> Option<Binding> {
    let mut b = Binding::new();
    for (slot, value) in [(&pattern.subject, s), (&pattern.predicate, p), (&pattern.object, o)] {
        match slot {
            PatternTerm::Term(t) => {
                if t != value {
                    return None;
                }
            }
            PatternTerm::Var(v) => match b.get(v) {
                Some(existing) if existing != value => return None,
                Some(_) => {}
                None => {
                    b.insert(v.clone(), value.clone());
                }
            },
        }
    }
    Some(b)
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_apart_keeps_blank_nodes_distinct() {
        let b = |l: &str| Term::BlankNode(l.into());
        let p = Term::Iri("http://e/p".into());
        let mut g: Graph = [Triple::new(b("b0"), p.clone(), Term::string("x")).unwrap()].into_iter().collect();
        let h: Graph = [
            Triple::new(b("b0"), p.clone(), Term::string("y")).unwrap(),
            Triple::new(b("m0"), p.clone(), Term::string("z")).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(g.merge_apart(&h), 2);
        let subjects: BTreeSet<_> = g.subjects_all().cloned().collect();
        assert_eq!(subjects.len(), 3);
    }

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://example.org/{s}")).unwrap()
    }

    fn t(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(iri(s), iri(p), iri(o)).unwrap()
    }

    #[test]
    fn insert_is_idempotent() {
        let mut g = Graph::new();
        assert!(g.insert(t("a", "p", "b")));
        assert!(!g.insert(t("a", "p", "b")));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn empty_graph_matches_nothing() {
        let g = Graph::new();
        let pat = TriplePattern::new(PatternTerm::var("s"), PatternTerm::var("p"), PatternTerm::var("o"));
        assert!(g.match_pattern(&pat).is_empty());
    }

    #[test]
    fn ground_pattern_hit_is_one_empty_binding() {
        let g: Graph = [t("a", "p", "b")].into_iter().collect();
        let pat = TriplePattern::new(iri("a"), iri("p"), iri("b"));
        assert_eq!(g.match_pattern(&pat), vec![Binding::new()]);
        let miss = TriplePattern::new(iri("a"), iri("p"), iri("c"));
        assert!(g.match_pattern(&miss).is_empty());
    }

    #[test]
    fn repeated_variable_must_agree() {
        let g: Graph = [t("a", "p", "a"), t("a", "p", "b")].into_iter().collect();
        let pat = TriplePattern::new(PatternTerm::var("x"), iri("p"), PatternTerm::var("x"));
        let rows = g.match_pattern(&pat);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0]["x"], iri("a"));
    }

    #[test]
    fn remove_keeps_indexes_consistent() {
        let mut g: Graph = [t("a", "p", "b"), t("a", "q", "b")].into_iter().collect();
        assert!(g.remove(&t("a", "p", "b")));
        assert!(!g.remove(&t("a", "p", "b")));
        assert_eq!(g.len(), 1);
        let by_obj = TriplePattern::new(PatternTerm::var("s"), PatternTerm::var("p"), iri("b"));
        assert_eq!(g.match_pattern(&by_obj).len(), 1);
        assert_eq!(g.subjects(&iri("p"), &iri("b")).count(), 0);
    }
}
