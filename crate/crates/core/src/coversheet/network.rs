use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{harvest_hazards, union_sds, CoverSheetError, HazardKey, ProductSelection};
use crate::graph::vocab::safed;
use crate::graph::Term;
use crate::ingest::{compound_iri, short_hash};
use crate::skos::TaxonomyIndex;
use crate::store::SdsStore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NetworkNodeKind {
    Sds,
    Compound,
    Hazard,
    Concept,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NetworkNode {
    pub id: String,
    pub kind: NetworkNodeKind,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub source: String,
    pub target: String,
    pub relation: String,
}

/// Node-link graph of selected SDS, their compounds, hazards and the
/// taxonomy ancestors of those hazards.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Network {
    pub nodes: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
}

#[derive(Default)]
struct Builder {
    nodes: BTreeMap<String, NetworkNode>,
    edges: BTreeSet<NetworkEdge>,
}

impl Builder {
    fn node(&mut self, id: &str, kind: NetworkNodeKind, label: &str) {
        let node = self.nodes.entry(id.to_string()).or_insert_with(|| NetworkNode {
            id: id.to_string(),
            kind,
            label: label.to_string(),
        });
        // A concept that is itself a harvested hazard is shown as one.
        if kind == NetworkNodeKind::Hazard {
            node.kind = kind;
        }
    }

    fn edge(&mut self, source: &str, target: &str, relation: &str) {
        self.edges.insert(NetworkEdge {
            source: source.to_string(),
            target: target.to_string(),
            relation: relation.to_string(),
        });
    }

    fn concept(&mut self, taxonomy: &TaxonomyIndex, iri: &str, kind: NetworkNodeKind) {
        let label = taxonomy
            .concept(iri)
            .map(|c| c.pref_label("en").unwrap_or(c.display_label()).to_string())
            .unwrap_or_else(|| iri.to_string());
        self.node(iri, kind, &label);
        let Ok(ancestors) = taxonomy.broader_closure(iri) else { return };
        for a in std::iter::once(iri.to_string()).chain(ancestors) {
            let Some(c) = taxonomy.concept(&a) else { continue };
            if a != iri {
                self.node(&a, NetworkNodeKind::Concept, c.pref_label("en").unwrap_or(c.display_label()));
            }
            for b in &c.broader {
                if let Some(bc) = taxonomy.concept(b) {
                    self.node(b, NetworkNodeKind::Concept, bc.pref_label("en").unwrap_or(bc.display_label()));
                    self.edge(&a, b, "broader");
                }
            }
        }
    }

    fn finish(self) -> Network {
        let nodes: Vec<NetworkNode> = self.nodes.into_values().collect();
        Network {
            edges: self.edges.into_iter().collect(),
            nodes,
        }
    }
}

fn hazard_node_id(key: &HazardKey) -> String {
    match key {
        HazardKey::Concept(c) => c.clone(),
        HazardKey::Code(code) => format!("urn:sdskg:hazard:{code}"),
        HazardKey::Text(t) => format!("urn:sdskg:hazard:text-{}", short_hash(&[t], 8)),
    }
}

pub fn export_network(selection: &ProductSelection, store: &SdsStore) -> Result<Network, CoverSheetError> {
    let records = union_sds(selection, store)?;
    let taxonomy = store.taxonomy();
    let graph = store.graph();
    let mut b = Builder::default();
    let classification = Term::Iri(safed::CLASSIFICATION_PROP.to_string());

    for r in &records {
        let label = format!("{} ({}, {}, {})", r.compound_name, r.manufacturer, r.language, r.revision_date);
        b.node(&r.id, NetworkNodeKind::Sds, &label);
        let compound = compound_iri(&r.compound_name);
        b.node(&compound, NetworkNodeKind::Compound, &r.compound_name);
        b.edge(&r.id, &compound, "describes");
        for ing in &r.ingredients {
            let sub = compound_iri(&ing.name);
            b.node(&sub, NetworkNodeKind::Compound, &ing.name);
            b.edge(&compound, &sub, "contains");
        }
        for t in graph.objects(&Term::Iri(compound.clone()), &classification) {
            if let Some(c) = t.as_iri() {
                b.concept(taxonomy, c, NetworkNodeKind::Hazard);
                b.edge(&compound, c, "classification");
            }
        }
    }

    for h in harvest_hazards(&records, store).iter() {
        let id = hazard_node_id(&h.key);
        match &h.classification_concept {
            Some(c) => b.concept(taxonomy, c, NetworkNodeKind::Hazard),
            None => {
                let label = match &h.h_code {
                    Some(code) => format!("{code}: {}", h.statement_text),
                    None => h.statement_text.clone(),
                };
                b.node(&id, NetworkNodeKind::Hazard, &label);
            }
        }
        for s in &h.sources {
            b.edge(&s.sds_id, &id, "contains");
        }
    }
    Ok(b.finish())
}
