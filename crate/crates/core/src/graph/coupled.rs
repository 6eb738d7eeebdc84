//! Many-to-many multilayer encoding.
//!
//! Each node `u` active in layer `l` becomes a replica `u@l` whose attribute
//! is `l`. Intra-layer edges become layer-2 edges between replicas; all
//! replicas of one node are pairwise joined by symmetric layer-1 coupling
//! edges.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{GraphBuilder, MultiplexGraph, DEFAULT_ATTR};
use crate::error::{Error, Result};

/// Layer name of inter-layer coupling edges.
pub const COUPLING_LAYER: &str = "1";
/// Layer name of intra-layer edges.
pub const INTRA_LAYER: &str = "2";

#[derive(Debug, Clone)]
pub struct CoupledMultigraph {
    pub graph: MultiplexGraph,
    /// Original attribute of every entity, including entities without
    /// replicas (isolated nodes).
    pub entity_attrs: BTreeMap<String, String>,
    /// Original layer set, including empty layers.
    pub layers: BTreeSet<String>,
}

#[derive(Serialize, Deserialize)]
struct CoupledRecord {
    directed: bool,
    edges: Vec<(String, String, String)>,
    replica_attrs: BTreeMap<String, String>,
    entity_attrs: BTreeMap<String, String>,
    layers: BTreeSet<String>,
}

impl CoupledMultigraph {
    pub fn to_json(&self) -> String {
        let g = &self.graph;
        let record = CoupledRecord {
            directed: g.is_directed(),
            edges: g
                .links()
                .map(|e| {
                    let (s, d, l) = (g.node_name(e.src), g.node_name(e.dst), g.layer_name(e.layer));
                    (s.to_string(), d.to_string(), l.to_string())
                })
                .collect(),
            replica_attrs: g
                .nodes()
                .iter()
                .map(|&u| (g.node_name(u).to_string(), g.attr_name(g.attr(u)).to_string()))
                .collect(),
            entity_attrs: self.entity_attrs.clone(),
            layers: self.layers.clone(),
        };
        serde_json::to_string_pretty(&record).expect("coupled graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: CoupledRecord = serde_json::from_str(text).map_err(|e| Error::format("coupled graph", e))?;
        let mut b = GraphBuilder::new(r.directed);
        b.add_layer(COUPLING_LAYER).add_layer(INTRA_LAYER);
        for (s, d, l) in &r.edges {
            if l != COUPLING_LAYER && l != INTRA_LAYER {
                return Err(Error::format("coupled graph", format!("unexpected layer `{l}`")));
            }
            b.add_edge(s, d, l);
        }
        for (node, attr) in &r.replica_attrs {
            b.add_node(node);
            b.set_attr(node, attr);
        }
        Ok(CoupledMultigraph {
            graph: b.build(),
            entity_attrs: r.entity_attrs,
            layers: r.layers,
        })
    }
}

fn replica(node: &str, layer: &str) -> String {
    format!("{node}@{layer}")
}

pub fn to_coupled(g: &MultiplexGraph) -> CoupledMultigraph {
    let mut b = GraphBuilder::new(g.is_directed());
    b.add_layer(COUPLING_LAYER).add_layer(INTRA_LAYER);
    let mut replicas: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in g.links() {
        let layer = g.layer_name(e.layer);
        let (s, d) = (g.node_name(e.src), g.node_name(e.dst));
        b.add_edge(&replica(s, layer), &replica(d, layer), INTRA_LAYER);
        replicas.entry(s).or_default().insert(layer);
        replicas.entry(d).or_default().insert(layer);
    }
    for (node, layers) in &replicas {
        let layers: Vec<&str> = layers.iter().copied().collect();
        for (i, a) in layers.iter().enumerate() {
            b.set_attr(&replica(node, a), a);
            for c in &layers[i + 1..] {
                b.add_edge(&replica(node, a), &replica(node, c), COUPLING_LAYER);
                if g.is_directed() {
                    b.add_edge(&replica(node, c), &replica(node, a), COUPLING_LAYER);
                }
            }
        }
    }
    CoupledMultigraph {
        graph: b.build(),
        entity_attrs: g
            .nodes()
            .iter()
            .map(|&u| (g.node_name(u).to_string(), g.attr_name(g.attr(u)).to_string()))
            .collect(),
        layers: g.vocab().layers().iter().cloned().collect(),
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Inverts [`to_coupled`]: merges coupling components into single nodes and
/// assigns each intra-layer edge the layer named by its endpoints' attribute.
pub fn from_coupled(cg: &CoupledMultigraph) -> Result<MultiplexGraph> {
    let g = &cg.graph;
    let coupling = g.vocab().layer_id(COUPLING_LAYER);
    let intra = g.vocab().layer_id(INTRA_LAYER);
    if let Some(extra) = g
        .vocab()
        .layers()
        .iter()
        .find(|l| *l != COUPLING_LAYER && *l != INTRA_LAYER)
    {
        return Err(Error::Structural(format!("unexpected layer `{extra}` in coupled graph")));
    }

    let n = g.vocab().node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for e in g.links() {
        if Some(e.layer) != coupling {
            continue;
        }
        if g.attr(e.src) == g.attr(e.dst) {
            return Err(Error::Structural(format!(
                "coupling edge {} - {} joins replicas of the same layer",
                g.node_name(e.src),
                g.node_name(e.dst)
            )));
        }
        let (a, b) = (find(&mut parent, e.src as usize), find(&mut parent, e.dst as usize));
        parent[a] = b;
    }

    let base = |u: u32| -> Result<String> {
        let name = g.node_name(u);
        let layer = g.attr_name(g.attr(u));
        name.strip_suffix(layer)
            .and_then(|s| s.strip_suffix('@'))
            .map(str::to_string)
            .ok_or_else(|| Error::Structural(format!("replica `{name}` does not end in `@{layer}`")))
    };
    let mut entity: BTreeMap<usize, String> = BTreeMap::new();
    for &u in g.nodes() {
        let root = find(&mut parent, u as usize);
        let name = base(u)?;
        match entity.get(&root) {
            Some(existing) if *existing != name => {
                return Err(Error::Structural(format!(
                    "coupling component mixes entities `{existing}` and `{name}`"
                )))
            }
            Some(_) => {}
            None => {
                entity.insert(root, name);
            }
        }
    }

    let mut b = GraphBuilder::new(g.is_directed());
    for l in &cg.layers {
        b.add_layer(l);
    }
    for name in entity.values().chain(cg.entity_attrs.keys()) {
        b.add_node(name);
    }
    for e in g.links() {
        if Some(e.layer) != intra {
            continue;
        }
        if g.attr(e.src) != g.attr(e.dst) {
            return Err(Error::Structural(format!(
                "intra-layer edge {} - {} joins replicas of different layers",
                g.node_name(e.src),
                g.node_name(e.dst)
            )));
        }
        let layer = g.attr_name(g.attr(e.src));
        let s = &entity[&find(&mut parent, e.src as usize)];
        let d = &entity[&find(&mut parent, e.dst as usize)];
        b.add_edge(s, d, layer);
    }
    for (node, attr) in &cg.entity_attrs {
        if attr != DEFAULT_ATTR {
            b.set_attr(node, attr);
        }
    }
    Ok(b.build())
}
