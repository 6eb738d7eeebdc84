use std::collections::BTreeMap;

use crate::graph::{Edge, LayerId, MultiplexGraph, NodeId};
use crate::predictor::ScoreTable;

/// `p[l2][l1]`: fraction of node pairs linked in `l2` that are also linked in
/// `l1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerCooccurrence {
    pub p: Vec<Vec<f64>>,
}

impl LayerCooccurrence {
    pub fn get(&self, given: LayerId, target: LayerId) -> f64 {
        self.p[given as usize][target as usize]
    }
}

/// Layers linking each pair; ordered pairs when directed, `u < v` otherwise.
fn pair_layers(g: &MultiplexGraph) -> BTreeMap<(NodeId, NodeId), Vec<LayerId>> {
    let mut pairs: BTreeMap<(NodeId, NodeId), Vec<LayerId>> = BTreeMap::new();
    for e in g.links() {
        pairs.entry((e.src, e.dst)).or_default().push(e.layer);
    }
    pairs
}

pub fn layer_cooccurrence(g: &MultiplexGraph) -> LayerCooccurrence {
    let n = g.layer_count();
    let mut both = vec![vec![0usize; n]; n];
    for layers in pair_layers(g).values() {
        for &a in layers {
            for &b in layers {
                both[a as usize][b as usize] += 1;
            }
        }
    }
    let p = (0..n)
        .map(|l2| {
            let base = both[l2][l2];
            (0..n)
                .map(|l1| if base == 0 { 0.0 } else { both[l2][l1] as f64 / base as f64 })
                .collect()
        })
        .collect();
    LayerCooccurrence { p }
}

/// `score(u, v, l1) = Σ_{l2} p[l2][l1]·δ(u, v, l2)` for every pair linked in
/// some layer, on the layers where the pair is not yet linked.
pub fn sharma_scores(g: &MultiplexGraph) -> ScoreTable {
    let co = layer_cooccurrence(g);
    let mut table = ScoreTable::new(g.is_directed(), "sharma");
    for ((u, v), layers) in pair_layers(g) {
        for l1 in g.layers() {
            if layers.contains(&l1) {
                continue;
            }
            let s: f64 = layers.iter().map(|&l2| co.get(l2, l1)).sum();
            table.insert(Edge::new(u, v, l1), s);
        }
    }
    table
}
