use std::sync::Arc;

use super::{GraphBuilder, MultiplexGraph, NodeId, Vocab, DEFAULT_ATTR};

/// Undirected single-layer graph without parallel edges or self-loops.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    vocab: Arc<Vocab>,
    nodes: Vec<NodeId>,
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl SimpleGraph {
    /// Builds from node-id pairs; `vocab` must cover every id.
    pub fn from_pairs(
        vocab: Arc<Vocab>,
        nodes: impl IntoIterator<Item = NodeId>,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Self {
        let n = vocab.node_count();
        let mut present = vec![false; n];
        let mut adj = vec![Vec::new(); n];
        for u in nodes {
            present[u as usize] = true;
        }
        for (u, v) in pairs {
            if u == v {
                continue;
            }
            present[u as usize] = true;
            present[v as usize] = true;
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut edge_count = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        SimpleGraph {
            vocab,
            nodes: (0..n as NodeId).filter(|&u| present[u as usize]).collect(),
            adj,
            edge_count: edge_count / 2,
        }
    }

    pub fn vocab(&self) -> &Arc<Vocab> {
        &self.vocab
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbours of `u`, ascending.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u as usize]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u as usize].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes.iter().flat_map(move |&u| {
            self.adj[u as usize]
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }
}

/// Collapses every layer into one undirected graph: `{u, v}` is an edge iff
/// some layer links `u` and `v` in either direction.
pub fn collapse(g: &MultiplexGraph) -> SimpleGraph {
    SimpleGraph::from_pairs(
        g.vocab().clone(),
        g.nodes().iter().copied(),
        g.directed_edges().iter().map(|e| (e.src, e.dst)),
    )
}

/// The collapsed graph as a one-layer undirected multiplex graph with layer
/// `layer`, over a fresh vocabulary.
pub fn collapse_to_layer(g: &MultiplexGraph, layer: &str) -> MultiplexGraph {
    let mut b = GraphBuilder::new(false);
    b.add_layer(layer);
    for &u in g.nodes() {
        b.add_node(g.node_name(u));
    }
    for e in g.links() {
        b.add_edge(g.node_name(e.src), g.node_name(e.dst), layer);
    }
    for &u in g.nodes() {
        if g.attr_name(g.attr(u)) != DEFAULT_ATTR {
            b.set_attr(g.node_name(u), g.attr_name(g.attr(u)));
        }
    }
    b.build()
}
