use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use super::{Graph, Term, Triple};

const REFINE_ROUNDS: usize = 4;

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

/// Colour of each blank node after a few rounds of neighbourhood refinement.
fn colours(triples: &[Triple]) -> BTreeMap<String, u64> {
    let mut colour: BTreeMap<String, u64> = BTreeMap::new();
    for t in triples {
        for term in [&t.subject, &t.object] {
            if let Term::BlankNode(b) = term {
                colour.insert(b.clone(), 0);
            }
        }
    }
    let label = |term: &Term, colour: &BTreeMap<String, u64>| -> u64 {
        match term {
            Term::BlankNode(b) => colour[b],
            other => hash_of(other),
        }
    };
    for _ in 0..REFINE_ROUNDS {
        let mut signature: BTreeMap<String, Vec<(u8, u64, u64)>> = colour.keys().map(|k| (k.clone(), Vec::new())).collect();
        for t in triples {
            let p = hash_of(&t.predicate);
            if let Term::BlankNode(b) = &t.subject {
                let o = label(&t.object, &colour);
                signature.get_mut(b).expect("known blank").push((0, p, o));
            }
            if let Term::BlankNode(b) = &t.object {
                let s = label(&t.subject, &colour);
                signature.get_mut(b).expect("known blank").push((1, p, s));
            }
        }
        colour = signature
            .into_iter()
            .map(|(k, mut sig)| {
                sig.sort_unstable();
                let c = hash_of(&(colour[&k], sig));
                (k, c)
            })
            .collect();
    }
    colour
}

fn map_term(term: &Term, mapping: &BTreeMap<String, String>) -> Term {
    match term {
        Term::BlankNode(b) => Term::BlankNode(mapping[b].clone()),
        other => other.clone(),
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    order: &[String],
    idx: usize,
    candidates: &BTreeMap<u64, Vec<String>>,
    colour_a: &BTreeMap<String, u64>,
    mapping: &mut BTreeMap<String, String>,
    used: &mut BTreeSet<String>,
    a: &[Triple],
    b: &Graph,
) -> bool {
    if idx == order.len() {
        return a.iter().all(|t| {
            b.contains(&Triple {
                subject: map_term(&t.subject, mapping),
                predicate: t.predicate.clone(),
                object: map_term(&t.object, mapping),
            })
        });
    }
    let blank = &order[idx];
    for target in &candidates[&colour_a[blank]] {
        if used.contains(target) {
            continue;
        }
        mapping.insert(blank.clone(), target.clone());
        used.insert(target.clone());
        if search(order, idx + 1, candidates, colour_a, mapping, used, a, b) {
            return true;
        }
        used.remove(target);
        mapping.remove(blank);
    }
    false
}

impl Graph {
    /// Graph isomorphism up to blank-node relabelling.
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let has_blank = |t: &Triple| t.subject.is_blank() || t.object.is_blank();
        let (blank_a, ground_a): (Vec<Triple>, Vec<Triple>) = self.iter().partition(has_blank);
        let (blank_b, ground_b): (Vec<Triple>, Vec<Triple>) = other.iter().partition(has_blank);
        if ground_a != ground_b || blank_a.len() != blank_b.len() {
            return false;
        }
        let colour_a = colours(&blank_a);
        let colour_b = colours(&blank_b);
        let histogram = |c: &BTreeMap<String, u64>| {
            let mut h: BTreeMap<u64, usize> = BTreeMap::new();
            for v in c.values() {
                *h.entry(*v).or_default() += 1;
            }
            h
        };
        if histogram(&colour_a) != histogram(&colour_b) {
            return false;
        }
        let mut candidates: BTreeMap<u64, Vec<String>> = BTreeMap::new();
        for (k, c) in &colour_b {
            candidates.entry(*c).or_default().push(k.clone());
        }
        // Most constrained blank nodes first.
        let mut order: Vec<String> = colour_a.keys().cloned().collect();
        order.sort_by_key(|k| candidates[&colour_a[k]].len());
        search(
            &order,
            0,
            &candidates,
            &colour_a,
            &mut BTreeMap::new(),
            &mut BTreeSet::new(),
            &blank_a,
            other,
        )
    }
}
