use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::TaxonomyIndex;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum IntegrityViolation {
    /// A `skos:broader` cycle; the path starts at its smallest IRI and the
    /// last element links back to the first.
    BroaderCycle { path: Vec<String> },
    MissingPrefLabel { concept: String },
    DuplicatePrefLabel { concept: String, language: String, labels: Vec<String> },
    NotInScheme { concept: String },
    TopConceptHasBroader { concept: String, scheme: String },
}

impl IntegrityViolation {
    pub fn describe(&self) -> String {
        match self {
            IntegrityViolation::BroaderCycle { path } => {
                format!("broader cycle: {} -> {}", path.join(" -> "), path[0])
            }
            IntegrityViolation::MissingPrefLabel { concept } => format!("{concept} has no prefLabel"),
            IntegrityViolation::DuplicatePrefLabel { concept, language, labels } => format!(
                "{concept} has {} prefLabels for language {:?}: {}",
                labels.len(),
                language,
                labels.join(", ")
            ),
            IntegrityViolation::NotInScheme { concept } => format!("{concept} is not in any concept scheme"),
            IntegrityViolation::TopConceptHasBroader { concept, scheme } => {
                format!("{concept} is a top concept of {scheme} but has a broader concept in it")
            }
        }
    }
}

/// Structural checks over a loaded taxonomy. The result is sorted; an empty
/// report means the taxonomy is clean.
pub fn check_integrity(index: &TaxonomyIndex) -> Vec<IntegrityViolation> {
    let mut out = Vec::new();
    for concept in index.concepts().values() {
        if concept.pref_labels.is_empty() {
            out.push(IntegrityViolation::MissingPrefLabel {
                concept: concept.iri.clone(),
            });
        }
        // Untagged labels are exempt, as with sh:uniqueLang.
        for (language, labels) in &concept.pref_labels {
            if labels.len() > 1 && language != super::NO_LANGUAGE {
                out.push(IntegrityViolation::DuplicatePrefLabel {
                    concept: concept.iri.clone(),
                    language: language.clone(),
                    labels: labels.iter().cloned().collect(),
                });
            }
        }
        if concept.in_scheme.is_empty() {
            out.push(IntegrityViolation::NotInScheme {
                concept: concept.iri.clone(),
            });
        }
    }
    for scheme in index.schemes().values() {
        for top in &scheme.top_concepts {
            let Some(c) = index.concept(top) else { continue };
            if c.broader.iter().any(|b| scheme.concepts.contains(b)) {
                out.push(IntegrityViolation::TopConceptHasBroader {
                    concept: top.clone(),
                    scheme: scheme.iri.clone(),
                });
            }
        }
    }
    out.extend(find_cycles(index).into_iter().map(|path| IntegrityViolation::BroaderCycle { path }));
    out.sort();
    out
}

/// One cycle per strongly connected component of the broader graph that
/// contains a cycle (including self-loops).
fn find_cycles(index: &TaxonomyIndex) -> Vec<Vec<String>> {
    let nodes: Vec<&str> = index.concepts().keys().map(String::as_str).collect();
    let id: BTreeMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let edges: Vec<Vec<usize>> = nodes
        .iter()
        .map(|n| {
            index.concept(n).map_or_else(Vec::new, |c| {
                c.broader.iter().filter_map(|b| id.get(b.as_str()).copied()).collect()
            })
        })
        .collect();

    let mut cycles = Vec::new();
    for component in tarjan(&edges) {
        let members: BTreeSet<usize> = component.iter().copied().collect();
        let start = *members.iter().min_by_key(|i| nodes[**i]).expect("non-empty component");
        let cyclic = members.len() > 1 || edges[start].contains(&start);
        if !cyclic {
            continue;
        }
        let path = shortest_cycle(start, &edges, &members);
        cycles.push(path.into_iter().map(|i| nodes[i].to_string()).collect());
    }
    cycles.sort();
    cycles
}

fn shortest_cycle(start: usize, edges: &[Vec<usize>], members: &BTreeSet<usize>) -> Vec<usize> {
    if edges[start].contains(&start) {
        return vec![start];
    }
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        let mut next: Vec<usize> = edges[n].iter().copied().filter(|m| members.contains(m)).collect();
        next.sort_unstable();
        for m in next {
            if m == start {
                let mut path = vec![n];
                let mut cur = n;
                while cur != start {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return path;
            }
            if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(m) {
                e.insert(n);
                queue.push_back(m);
            }
        }
    }
    vec![start]
}

/// Iterative Tarjan strongly connected components.
fn tarjan(edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut out = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < edges[v].len() {
                let w = edges[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(component);
                }
            }
        }
    }
    out
}
