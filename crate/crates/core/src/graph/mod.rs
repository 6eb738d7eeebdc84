//! Directed multiplex graph model.
//!
//! Node, layer and attribute identifiers are interned to dense `u32`s. The
//! interning tables live in a shared [`Vocab`] so that graphs derived from one
//! another (training folds, temporal snapshots) agree on every id. Names are
//! interned in sorted order, which makes loading independent of input line
//! order and lets id comparisons stand in for name comparisons.

mod coupled;
mod io;
mod simple;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

pub use coupled::{from_coupled, to_coupled, CoupledMultigraph, COUPLING_LAYER, INTRA_LAYER};
pub use io::{load_graph, load_graph_pair, parse_edges, write_attributes, write_edges, EdgeFormat, LoadReport};
pub use simple::{collapse, collapse_to_layer, SimpleGraph};

use crate::error::{Error, Result};

pub type NodeId = u32;
pub type LayerId = u32;
pub type AttrId = u32;

/// Attribute given to nodes that carry none.
pub const DEFAULT_ATTR: &str = "·";

/// A directed typed edge `(src, dst, layer)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub layer: LayerId,
}

impl Edge {
    pub fn new(src: NodeId, dst: NodeId, layer: LayerId) -> Self {
        Edge { src, dst, layer }
    }

    /// Orientation with `src < dst`, used as the key of an undirected edge.
    pub fn canonical(self) -> Self {
        if self.src <= self.dst {
            self
        } else {
            Edge::new(self.dst, self.src, self.layer)
        }
    }

    pub fn reversed(self) -> Self {
        Edge::new(self.dst, self.src, self.layer)
    }
}

/// Interning tables shared between related graphs.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    nodes: Vec<String>,
    layers: Vec<String>,
    attrs: Vec<String>,
    node_index: HashMap<String, NodeId>,
    layer_index: HashMap<String, LayerId>,
    attr_index: HashMap<String, AttrId>,
}

fn index_of(names: &[String]) -> HashMap<String, u32> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i as u32))
        .collect()
}

impl Vocab {
    /// Builds a vocabulary; each name list is sorted and deduplicated.
    pub fn new<N, L, A>(nodes: N, layers: L, attrs: A) -> Self
    where
        N: IntoIterator<Item = String>,
        L: IntoIterator<Item = String>,
        A: IntoIterator<Item = String>,
    {
        let nodes: Vec<String> = nodes.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let layers: Vec<String> = layers.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let attrs: Vec<String> = attrs.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        Vocab {
            node_index: index_of(&nodes),
            layer_index: index_of(&layers),
            attr_index: index_of(&attrs),
            nodes,
            layers,
            attrs,
        }
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.nodes[id as usize]
    }

    pub fn layer_name(&self, id: LayerId) -> &str {
        &self.layers[id as usize]
    }

    pub fn attr_name(&self, id: AttrId) -> &str {
        &self.attrs[id as usize]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.node_index.get(name).copied()
    }

    pub fn layer_id(&self, name: &str) -> Option<LayerId> {
        self.layer_index.get(name).copied()
    }

    pub fn attr_id(&self, name: &str) -> Option<AttrId> {
        self.attr_index.get(name).copied()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn attr_count(&self) -> usize {
        self.attrs.len()
    }

    pub fn layers(&self) -> &[String] {
        &self.layers
    }
}

/// `G = (V, L, E, A)`: nodes with one categorical attribute each, a layer
/// set, and directed typed edges.
///
/// Undirected graphs store both orientations of every edge. The graph is
/// immutable once built.
#[derive(Debug, Clone)]
pub struct MultiplexGraph {
    vocab: Arc<Vocab>,
    directed: bool,
    node_attr: Vec<AttrId>,
    present: Vec<bool>,
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    out_off: Vec<u32>,
    out_nbr: Vec<NodeId>,
    in_off: Vec<u32>,
    in_nbr: Vec<NodeId>,
    layer_edges: Vec<usize>,
}

impl MultiplexGraph {
    /// Assembles a graph over an existing vocabulary.
    ///
    /// `node_attr` is indexed by node id and must cover the whole vocabulary.
    /// Edge endpoints are added to the node set. Duplicate edges are merged;
    /// self-loops are rejected.
    pub fn from_parts(
        vocab: Arc<Vocab>,
        directed: bool,
        node_attr: Vec<AttrId>,
        nodes: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let n = vocab.node_count();
        let n_layers = vocab.layer_count();
        if node_attr.len() != n {
            return Err(Error::Structural(format!(
                "attribute table has {} entries for {} nodes",
                node_attr.len(),
                n
            )));
        }
        if let Some(&a) = node_attr.iter().find(|&&a| a as usize >= vocab.attr_count()) {
            return Err(Error::Structural(format!("attribute id {a} out of range")));
        }
        let mut present = vec![false; n];
        for u in nodes {
            if u as usize >= n {
                return Err(Error::Structural(format!("node id {u} out of range")));
            }
            present[u as usize] = true;
        }
        let mut all = Vec::new();
        for e in edges {
            if e.src as usize >= n || e.dst as usize >= n || e.layer as usize >= n_layers {
                return Err(Error::Structural(format!("edge {e:?} references an unknown id")));
            }
            if e.src == e.dst {
                return Err(Error::Structural(format!(
                    "self-loop on node {}",
                    vocab.node_name(e.src)
                )));
            }
            present[e.src as usize] = true;
            present[e.dst as usize] = true;
            all.push(e);
            if !directed {
                all.push(e.reversed());
            }
        }
        all.sort_unstable();
        all.dedup();

        let nodes: Vec<NodeId> = (0..n as NodeId).filter(|&u| present[u as usize]).collect();
        let (out_off, out_nbr) = csr(n, n_layers, all.iter().map(|e| (e.src, e.layer, e.dst)));
        let (in_off, in_nbr) = csr(n, n_layers, all.iter().map(|e| (e.dst, e.layer, e.src)));
        let mut layer_edges = vec![0usize; n_layers];
        for e in &all {
            layer_edges[e.layer as usize] += 1;
        }
        Ok(MultiplexGraph {
            vocab,
            directed,
            node_attr,
            present,
            nodes,
            edges: all,
            out_off,
            out_nbr,
            in_off,
            in_nbr,
            layer_edges,
        })
    }

    /// A graph over the same vocabulary and attributes holding only `edges`.
    /// Its node set is the set of edge endpoints.
    pub fn with_edges(&self, edges: impl IntoIterator<Item = Edge>) -> Self {
        Self::from_parts(
            self.vocab.clone(),
            self.directed,
            self.node_attr.clone(),
            std::iter::empty(),
            edges,
        )
        .expect("edges drawn from a valid graph")
    }

    pub fn vocab(&self) -> &Arc<Vocab> {
        &self.vocab
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Nodes of this graph, ascending.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains_node(&self, u: NodeId) -> bool {
        self.present.get(u as usize).copied().unwrap_or(false)
    }

    pub fn attr(&self, u: NodeId) -> AttrId {
        self.node_attr[u as usize]
    }

    pub fn node_attrs(&self) -> &[AttrId] {
        &self.node_attr
    }

    pub fn layer_count(&self) -> usize {
        self.vocab.layer_count()
    }

    pub fn layers(&self) -> impl Iterator<Item = LayerId> {
        0..self.layer_count() as LayerId
    }

    /// Every stored directed triple, sorted. Undirected graphs list both
    /// orientations.
    pub fn directed_edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Logical edges: every triple when directed, one `src < dst`
    /// representative per undirected edge otherwise.
    pub fn links(&self) -> impl Iterator<Item = Edge> + '_ {
        let directed = self.directed;
        self.edges.iter().copied().filter(move |e| directed || e.src < e.dst)
    }

    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.edges.len()
        } else {
            self.edges.len() / 2
        }
    }

    /// Number of logical edges in `layer`.
    pub fn layer_edge_count(&self, layer: LayerId) -> usize {
        let c = self.layer_edges[layer as usize];
        if self.directed {
            c
        } else {
            c / 2
        }
    }

    /// Number of nodes incident to at least one edge of `layer`.
    pub fn layer_node_count(&self, layer: LayerId) -> usize {
        self.nodes
            .iter()
            .filter(|&&u| self.out_degree(u, layer) > 0 || self.in_degree(u, layer) > 0)
            .count()
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId, layer: LayerId) -> bool {
        self.out_neighbors(src, layer).binary_search(&dst).is_ok()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.has_edge(e.src, e.dst, e.layer)
    }

    /// Targets of `u`'s outgoing edges in `layer`, ascending.
    pub fn out_neighbors(&self, u: NodeId, layer: LayerId) -> &[NodeId] {
        let k = u as usize * self.layer_count() + layer as usize;
        &self.out_nbr[self.out_off[k] as usize..self.out_off[k + 1] as usize]
    }

    /// Sources of `u`'s incoming edges in `layer`, ascending.
    pub fn in_neighbors(&self, u: NodeId, layer: LayerId) -> &[NodeId] {
        let k = u as usize * self.layer_count() + layer as usize;
        &self.in_nbr[self.in_off[k] as usize..self.in_off[k + 1] as usize]
    }

    pub fn out_degree(&self, u: NodeId, layer: LayerId) -> usize {
        let k = u as usize * self.layer_count() + layer as usize;
        (self.out_off[k + 1] - self.out_off[k]) as usize
    }

    pub fn in_degree(&self, u: NodeId, layer: LayerId) -> usize {
        let k = u as usize * self.layer_count() + layer as usize;
        (self.in_off[k + 1] - self.in_off[k]) as usize
    }

    /// Canonical key for a candidate link: reoriented `src < dst` when the
    /// graph is undirected.
    pub fn link_key(&self, e: Edge) -> Edge {
        if self.directed {
            e
        } else {
            e.canonical()
        }
    }

    pub fn node_name(&self, u: NodeId) -> &str {
        self.vocab.node_name(u)
    }

    pub fn layer_name(&self, l: LayerId) -> &str {
        self.vocab.layer_name(l)
    }

    pub fn attr_name(&self, a: AttrId) -> &str {
        self.vocab.attr_name(a)
    }

    /// Smallest number of nodes incident to a non-empty layer, the natural
    /// upper bound for the minimum support.
    pub fn smallest_layer_size(&self) -> Option<usize> {
        self.layers()
            .filter(|&l| self.layer_edges[l as usize] > 0)
            .map(|l| self.layer_node_count(l))
            .min()
    }

    /// Name-level content, used for comparisons across vocabularies.
    pub fn snapshot(&self) -> GraphSnapshot {
        GraphSnapshot {
            directed: self.directed,
            nodes: self
                .nodes
                .iter()
                .map(|&u| (self.node_name(u).to_string(), self.attr_name(self.attr(u)).to_string()))
                .collect(),
            layers: self.vocab.layers.iter().cloned().collect(),
            edges: self
                .links()
                .map(|e| {
                    (
                        self.node_name(e.src).to_string(),
                        self.node_name(e.dst).to_string(),
                        self.layer_name(e.layer).to_string(),
                    )
                })
                .collect(),
        }
    }
}

impl PartialEq for MultiplexGraph {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.vocab, &other.vocab) {
            self.directed == other.directed
                && self.nodes == other.nodes
                && self.edges == other.edges
                && self.nodes.iter().all(|&u| self.attr(u) == other.attr(u))
        } else {
            self.snapshot() == other.snapshot()
        }
    }
}

/// Vocabulary-independent view of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    pub directed: bool,
    /// node name → attribute name
    pub nodes: BTreeMap<String, String>,
    pub layers: BTreeSet<String>,
    pub edges: BTreeSet<(String, String, String)>,
}

fn csr(
    n: usize,
    n_layers: usize,
    triples: impl Iterator<Item = (NodeId, LayerId, NodeId)> + Clone,
) -> (Vec<u32>, Vec<NodeId>) {
    let mut off = vec![0u32; n * n_layers + 1];
    for (u, l, _) in triples.clone() {
        off[u as usize * n_layers + l as usize + 1] += 1;
    }
    for k in 1..off.len() {
        off[k] += off[k - 1];
    }
    let mut fill = off.clone();
    let mut nbr = vec![0; *off.last().unwrap() as usize];
    for (u, l, v) in triples {
        let k = u as usize * n_layers + l as usize;
        nbr[fill[k] as usize] = v;
        fill[k] += 1;
    }
    for k in 0..n * n_layers {
        nbr[off[k] as usize..off[k + 1] as usize].sort_unstable();
    }
    (off, nbr)
}

/// Name-level graph builder.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    directed: bool,
    nodes: BTreeSet<String>,
    layers: BTreeSet<String>,
    attrs: BTreeMap<String, String>,
    edges: BTreeSet<(String, String, String)>,
    self_loops: usize,
}

impl GraphBuilder {
    pub fn new(directed: bool) -> Self {
        GraphBuilder {
            directed,
            nodes: BTreeSet::new(),
            layers: BTreeSet::new(),
            attrs: BTreeMap::new(),
            edges: BTreeSet::new(),
            self_loops: 0,
        }
    }

    pub fn add_node(&mut self, name: &str) -> &mut Self {
        self.nodes.insert(name.to_string());
        self
    }

    pub fn add_layer(&mut self, name: &str) -> &mut Self {
        self.layers.insert(name.to_string());
        self
    }

    /// Adds `src -> dst` in `layer`. Self-loops are counted and dropped, but
    /// their node and layer still enter the graph. Returns whether an edge was
    /// recorded.
    pub fn add_edge(&mut self, src: &str, dst: &str, layer: &str) -> bool {
        self.add_node(src).add_node(dst).add_layer(layer);
        if src == dst {
            self.self_loops += 1;
            return false;
        }
        self.edges
            .insert((src.to_string(), dst.to_string(), layer.to_string()));
        true
    }

    /// Sets the attribute of a known node. Returns `false` for unknown nodes.
    pub fn set_attr(&mut self, node: &str, attr: &str) -> bool {
        if !self.nodes.contains(node) {
            return false;
        }
        self.attrs.insert(node.to_string(), attr.to_string());
        true
    }

    pub fn has_node(&self, node: &str) -> bool {
        self.nodes.contains(node)
    }

    pub fn self_loops(&self) -> usize {
        self.self_loops
    }

    pub fn build(self) -> MultiplexGraph {
        Self::build_all(vec![self]).pop().unwrap()
    }

    /// Builds several graphs over one joint vocabulary. Attributes are merged
    /// across builders; a node's attribute is the one set by the last builder
    /// that names it.
    pub fn build_all(builders: Vec<GraphBuilder>) -> Vec<MultiplexGraph> {
        let mut attrs: BTreeMap<String, String> = BTreeMap::new();
        for b in &builders {
            attrs.extend(b.attrs.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        let all_nodes: BTreeSet<String> = builders.iter().flat_map(|b| b.nodes.iter().cloned()).collect();
        let attr_of = |n: &String| attrs.get(n).cloned().unwrap_or_else(|| DEFAULT_ATTR.to_string());
        let vocab = Arc::new(Vocab::new(
            all_nodes.iter().cloned(),
            builders.iter().flat_map(|b| b.layers.iter().cloned()),
            all_nodes.iter().map(attr_of),
        ));
        let node_attr: Vec<AttrId> = all_nodes
            .iter()
            .map(|n| vocab.attr_id(&attr_of(n)).unwrap())
            .collect();
        builders
            .into_iter()
            .map(|b| {
                let nodes = b.nodes.iter().map(|n| vocab.node_id(n).unwrap());
                let edges = b.edges.iter().map(|(s, d, l)| {
                    Edge::new(
                        vocab.node_id(s).unwrap(),
                        vocab.node_id(d).unwrap(),
                        vocab.layer_id(l).unwrap(),
                    )
                });
                MultiplexGraph::from_parts(vocab.clone(), b.directed, node_attr.clone(), nodes, edges)
                    .expect("builder output is structurally valid")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(directed: bool) -> MultiplexGraph {
        let mut b = GraphBuilder::new(directed);
        b.add_edge("1", "2", "a");
        b.add_edge("2", "3", "b");
        b.add_edge("1", "3", "a");
        b.build()
    }

    #[test]
    fn adjacency_matches_edges() {
        let g = tiny(true);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        let a = g.vocab().layer_id("a").unwrap();
        let n1 = g.vocab().node_id("1").unwrap();
        assert_eq!(g.out_degree(n1, a), 2);
        assert_eq!(g.in_degree(n1, a), 0);
        for e in g.directed_edges() {
            assert!(g.contains(*e));
            assert!(!g.has_edge(e.dst, e.src, e.layer));
        }
    }

    #[test]
    fn undirected_storage_is_symmetric() {
        let g = tiny(false);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.directed_edges().len(), 6);
        for e in g.directed_edges() {
            assert!(g.contains(e.reversed()));
        }
        assert!(g.links().all(|e| e.src < e.dst));
    }

    #[test]
    fn self_loops_are_dropped_but_node_kept() {
        let mut b = GraphBuilder::new(true);
        assert!(!b.add_edge("3", "3", "b"));
        assert_eq!(b.self_loops(), 1);
        let g = b.build();
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn unknown_attribute_target_is_rejected() {
        let mut b = GraphBuilder::new(true);
        b.add_edge("1", "2", "a");
        assert!(b.set_attr("1", "x"));
        assert!(!b.set_attr("9", "x"));
        let g = b.build();
        let one = g.vocab().node_id("1").unwrap();
        let two = g.vocab().node_id("2").unwrap();
        assert_eq!(g.attr_name(g.attr(one)), "x");
        assert_eq!(g.attr_name(g.attr(two)), DEFAULT_ATTR);
    }

    #[test]
    fn smallest_layer_ignores_empty_layers() {
        let mut b = GraphBuilder::new(true);
        b.add_edge("1", "2", "a");
        b.add_edge("2", "3", "a");
        b.add_edge("4", "5", "b");
        b.add_layer("empty");
        let g = b.build();
        assert_eq!(g.smallest_layer_size(), Some(2));
    }

    #[test]
    fn with_edges_keeps_vocabulary() {
        let g = tiny(true);
        let first = g.directed_edges()[0];
        let h = g.with_edges([first]);
        assert!(Arc::ptr_eq(g.vocab(), h.vocab()));
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.node_count(), 2);
    }
}
