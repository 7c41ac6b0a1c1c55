use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdskg::bundled;
use sdskg::graph::vocab::{ghs, rdf, safed};
use sdskg::graph::{Graph, Literal, Term, Triple};
use sdskg::shacl::apply_rules;

fn iri(s: &str) -> Term {
    Term::Iri(s.to_string())
}

fn add(g: &mut Graph, s: &str, p: &str, o: Term) {
    g.insert(Triple::new(iri(s), iri(p), o).unwrap());
}

struct Mixture {
    iri: String,
    /// (concentration, substance classified Eye Irrit. 2A)
    ingredients: Vec<(f64, bool)>,
}

fn build(mixtures: &[Mixture]) -> Graph {
    let mut g = Graph::new();
    for m in mixtures {
        add(&mut g, &m.iri, rdf::TYPE, iri(safed::MIXTURE));
        for (i, (conc, eye)) in m.ingredients.iter().enumerate() {
            let ing = format!("{}/ingredient-{i}", m.iri);
            let sub = format!("{}/substance-{i}", m.iri);
            add(&mut g, &m.iri, safed::HAS_INGREDIENT, iri(&ing));
            add(&mut g, &ing, safed::CONCENTRATION, Term::Literal(Literal::decimal(*conc)));
            add(&mut g, &ing, safed::SUBSTANCE, iri(&sub));
            if *eye {
                add(&mut g, &sub, safed::CLASSIFICATION_PROP, iri(ghs::EYE_IRRIT_CAT_2A));
            }
        }
    }
    g
}

/// A mixture is classified when some classified ingredient is at 10 % or more.
fn oracle(mixtures: &[Mixture]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for m in mixtures {
        for (conc, eye) in &m.ingredients {
            if *eye && *conc >= 10.0 {
                out.insert(m.iri.clone());
            }
        }
    }
    out
}

fn classified(g: &Graph) -> BTreeSet<String> {
    g.subjects(&iri(safed::CLASSIFICATION_PROP), &iri(ghs::EYE_IRRIT_CAT_2A))
        .filter(|s| g.contains(&Triple::new((*s).clone(), iri(rdf::TYPE), iri(safed::MIXTURE)).unwrap()))
        .filter_map(|s| s.as_iri().map(str::to_string))
        .collect()
}

#[test]
fn fifty_random_mixtures_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5d5);
    let rules = bundled::rules();
    let mixtures: Vec<Mixture> = (0..50)
        .map(|i| Mixture {
            iri: format!("https://example.org/mixture/{i}"),
            ingredients: (0..rng.gen_range(0..=8))
                .map(|_| (rng.gen_range(0.0..=30.0), rng.gen_bool(0.5)))
                .collect(),
        })
        .collect();
    // Each mixture alone, then all in one graph.
    for m in &mixtures {
        let one = std::slice::from_ref(m);
        let out = apply_rules(&build(one), &rules, 16);
        assert_eq!(classified(&out.graph), oracle(one), "{}", m.iri);
    }
    let out = apply_rules(&build(&mixtures), &rules, 16);
    let want = oracle(&mixtures);
    assert!(!want.is_empty() && want.len() < 50);
    assert_eq!(classified(&out.graph), want);
    assert!(!out.capped);
}

#[test]
fn threshold_boundaries() {
    let rules = bundled::rules();
    for (conc, expected) in [(9.999, false), (10.0, true), (10.001, true)] {
        let m = Mixture {
            iri: "https://example.org/mixture/b".into(),
            ingredients: vec![(conc, true)],
        };
        let out = apply_rules(&build(std::slice::from_ref(&m)), &rules, 16);
        assert_eq!(classified(&out.graph).len() == 1, expected, "{conc}");
    }
}

#[test]
fn fixpoint_adds_nothing() {
    let rules = bundled::rules();
    let m = Mixture {
        iri: "https://example.org/mixture/f".into(),
        ingredients: vec![(12.0, true), (25.0, true), (3.0, false)],
    };
    let first = apply_rules(&build(std::slice::from_ref(&m)), &rules, 16);
    assert_eq!(first.inferred().len(), 1);
    let second = apply_rules(&first.graph, &rules, 16);
    assert!(second.trace.is_empty());
    assert_eq!(second.graph.len(), first.graph.len());
}

#[test]
fn trace_records_the_binding() {
    let rules = bundled::rules();
    let m = Mixture {
        iri: "https://example.org/mixture/t".into(),
        ingredients: vec![(12.0, true)],
    };
    let out = apply_rules(&build(std::slice::from_ref(&m)), &rules, 16);
    let entry = &out.trace[0];
    assert_eq!(entry.rule, "mixture-eye-irrit-2a");
    assert_eq!(entry.binding["mixture"], iri(&m.iri));
    assert_eq!(entry.triple.object, iri(ghs::EYE_IRRIT_CAT_2A));
}
