use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdskg::bundled;
use sdskg::graph::vocab::{rdf, skos};
use sdskg::graph::{Graph, Literal, Term, Triple};
use sdskg::shacl::{parse_shapes, validate};
use sdskg::skos::{check_integrity, load_taxonomy, IntegrityViolation};

const SCHEME: &str = "https://example.org/tax/scheme";
const LANGS: [&str; 3] = ["en", "de", "fr"];

fn concept(i: usize) -> String {
    format!("https://example.org/tax/c{i:03}")
}

/// A random taxonomy as plain data: labels per concept and broader edges.
struct Taxonomy {
    labels: Vec<Vec<(String, &'static str)>>,
    broader: BTreeSet<(usize, usize)>,
}

fn random_taxonomy(rng: &mut ChaCha8Rng) -> Taxonomy {
    let n = rng.gen_range(1..=200);
    let mut labels: Vec<Vec<(String, &'static str)>> = (0..n)
        .map(|i| {
            let mut langs = LANGS.to_vec();
            langs.shuffle(rng);
            langs.truncate(rng.gen_range(1..=3));
            langs.into_iter().map(|l| (format!("concept {i} {l}"), l)).collect()
        })
        .collect();
    // A forest: every concept but the first may point at an earlier one.
    let mut broader = BTreeSet::new();
    for i in 1..n {
        if rng.gen_bool(0.8) {
            broader.insert((i, rng.gen_range(0..i)));
        }
    }
    // Defects.
    for _ in 0..rng.gen_range(0..=2) {
        // Close a loop from an ancestor (or the concept itself) back down.
        let start = rng.gen_range(0..n);
        let mut chain = vec![start];
        let mut cur = start;
        while let Some(&(_, up)) = broader.range((cur, 0)..).next().filter(|e| e.0 == cur) {
            if chain.contains(&up) {
                break;
            }
            chain.push(up);
            cur = up;
        }
        let top = *chain.choose(rng).unwrap();
        broader.insert((top, start));
    }
    for _ in 0..rng.gen_range(0..=2) {
        // Random extra edge; may or may not close a cycle.
        broader.insert((rng.gen_range(0..n), rng.gen_range(0..n)));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let i = rng.gen_range(0..n);
        let l = *LANGS.choose(rng).unwrap();
        labels[i].push((format!("alias {i} {l}"), l));
    }
    for _ in 0..rng.gen_range(0..=3) {
        labels[rng.gen_range(0..n)].clear();
    }
    Taxonomy { labels, broader }
}

fn to_graph(t: &Taxonomy) -> Graph {
    let iri = |s: &str| Term::Iri(s.to_string());
    let mut g = Graph::new();
    g.insert(Triple::new(iri(SCHEME), iri(rdf::TYPE), iri(skos::CONCEPT_SCHEME)).unwrap());
    for (i, labels) in t.labels.iter().enumerate() {
        let c = iri(&concept(i));
        g.insert(Triple::new(c.clone(), iri(rdf::TYPE), iri(skos::CONCEPT)).unwrap());
        g.insert(Triple::new(c.clone(), iri(skos::IN_SCHEME), iri(SCHEME)).unwrap());
        for (text, lang) in labels {
            let lit = Term::Literal(Literal::lang(text.clone(), lang).unwrap());
            g.insert(Triple::new(c.clone(), iri(skos::PREF_LABEL), lit).unwrap());
        }
    }
    for (a, b) in &t.broader {
        g.insert(Triple::new(iri(&concept(*a)), iri(skos::BROADER), iri(&concept(*b))).unwrap());
    }
    g
}

fn reachable(t: &Taxonomy, n: usize, from: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<usize> = t.broader.iter().filter(|e| e.0 == from).map(|e| e.1).collect();
    while let Some(x) = stack.pop() {
        if seen.insert(x) {
            stack.extend(t.broader.iter().filter(|e| e.0 == x).map(|e| e.1));
        }
    }
    debug_assert!(seen.iter().all(|x| *x < n));
    seen
}

/// Groups of concepts that reach each other (each group holds a cycle).
fn oracle_cycle_groups(t: &Taxonomy) -> BTreeSet<BTreeSet<String>> {
    let n = t.labels.len();
    let reach: Vec<BTreeSet<usize>> = (0..n).map(|i| reachable(t, n, i)).collect();
    let mut groups = BTreeSet::new();
    for i in 0..n {
        if reach[i].contains(&i) {
            let group: BTreeSet<String> = (0..n)
                .filter(|j| reach[i].contains(j) && reach[*j].contains(&i))
                .map(concept)
                .collect();
            groups.insert(group);
        }
    }
    groups
}

fn oracle_missing(t: &Taxonomy) -> BTreeSet<String> {
    (0..t.labels.len()).filter(|i| t.labels[*i].is_empty()).map(concept).collect()
}

fn oracle_duplicate_lang(t: &Taxonomy) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for (i, labels) in t.labels.iter().enumerate() {
        let mut count: BTreeMap<&str, usize> = BTreeMap::new();
        for (_, l) in labels {
            *count.entry(l).or_default() += 1;
        }
        out.extend(count.into_iter().filter(|(_, n)| *n > 1).map(|(l, _)| (concept(i), l.to_string())));
    }
    out
}

#[test]
fn detectors_agree_with_oracles_on_random_taxonomies() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5c05);
    let shapes = parse_shapes(&sdskg::graph::parse(bundled::SKOS_SHAPES, sdskg::graph::RdfFormat::Turtle).unwrap()).unwrap();
    let (mut with_cycles, mut with_missing, mut with_dupes) = (0, 0, 0);
    for round in 0..100 {
        let t = random_taxonomy(&mut rng);
        let g = to_graph(&t);
        let report = check_integrity(&load_taxonomy(&g));

        let mut cycles = BTreeSet::new();
        let mut missing = BTreeSet::new();
        let mut dupes = BTreeSet::new();
        for v in &report {
            match v {
                IntegrityViolation::BroaderCycle { path } => {
                    // The path is a real cycle through distinct concepts.
                    for (k, a) in path.iter().enumerate() {
                        let b = &path[(k + 1) % path.len()];
                        let idx = |s: &str| s[s.len() - 3..].parse::<usize>().unwrap();
                        assert!(t.broader.contains(&(idx(a), idx(b))), "round {round}: {a} -> {b}");
                    }
                    let members: BTreeSet<String> = path.iter().cloned().collect();
                    assert_eq!(members.len(), path.len());
                    cycles.insert(members);
                }
                IntegrityViolation::MissingPrefLabel { concept } => {
                    missing.insert(concept.clone());
                }
                IntegrityViolation::DuplicatePrefLabel { concept, language, .. } => {
                    dupes.insert((concept.clone(), language.clone()));
                }
                other => panic!("round {round}: unexpected {other:?}"),
            }
        }
        let groups = oracle_cycle_groups(&t);
        assert_eq!(cycles.len(), groups.len(), "round {round}");
        for c in &cycles {
            assert!(groups.iter().any(|g| c.is_subset(g)), "round {round}: {c:?}");
        }
        assert_eq!(missing, oracle_missing(&t), "round {round}");
        assert_eq!(dupes, oracle_duplicate_lang(&t), "round {round}");

        // The concept-label shape reports the same label defects.
        let shacl = validate(&g, &shapes);
        let mut shacl_missing = BTreeSet::new();
        let mut shacl_dupes = BTreeSet::new();
        for r in &shacl.results {
            let focus = r.focus_node.as_iri().unwrap().to_string();
            match r.component_name() {
                "MinCountConstraintComponent" => {
                    shacl_missing.insert(focus);
                }
                "UniqueLangConstraintComponent" => {
                    shacl_dupes.insert(focus);
                }
                other => panic!("round {round}: {other}"),
            }
        }
        assert_eq!(shacl_missing, missing);
        assert_eq!(shacl_dupes, dupes.iter().map(|d| d.0.clone()).collect());
        assert_eq!(shacl.conforms, missing.is_empty() && dupes.is_empty());

        with_cycles += usize::from(!groups.is_empty());
        with_missing += usize::from(!missing.is_empty());
        with_dupes += usize::from(!dupes.is_empty());
    }
    // The generator exercises every defect kind often.
    assert!(with_cycles > 20 && with_missing > 50 && with_dupes > 50, "{with_cycles} {with_missing} {with_dupes}");
}

#[test]
fn bundled_taxonomy_is_clean() {
    let report = check_integrity(&load_taxonomy(&bundled::taxonomy_graph()));
    assert!(report.is_empty(), "{report:#?}");
}
