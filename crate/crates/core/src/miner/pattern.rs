use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{AttrId, LayerId, Vocab};

use super::canon;

/// Index of a node position within a pattern.
pub type Slot = usize;

/// A pattern edge between two slots. Undirected patterns keep `src < dst`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternEdge {
    pub src: Slot,
    pub dst: Slot,
    pub layer: LayerId,
}

impl PatternEdge {
    pub fn new(src: Slot, dst: Slot, layer: LayerId) -> Self {
        PatternEdge { src, dst, layer }
    }

    pub(crate) fn oriented(self, directed: bool) -> Self {
        if directed || self.src <= self.dst {
            self
        } else {
            PatternEdge::new(self.dst, self.src, self.layer)
        }
    }
}

/// Canonical key of a pattern: equal codes iff the patterns are isomorphic.
/// Meaningful only between patterns interned against the same vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Code(pub(crate) Vec<u32>);

/// A small connected multiplex pattern in canonical slot order.
#[derive(Debug, Clone)]
pub struct Pattern {
    directed: bool,
    attrs: Vec<AttrId>,
    edges: Vec<PatternEdge>,
    code: Code,
    pub(crate) support: usize,
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.code == other.code
    }
}

impl Eq for Pattern {}

impl Pattern {
    /// Builds a pattern from arbitrary slot numbering. Validates the pattern
    /// invariants and relabels slots into canonical order.
    pub fn new(directed: bool, attrs: Vec<AttrId>, edges: Vec<PatternEdge>) -> Result<Self> {
        let n = attrs.len();
        if n < 2 {
            return Err(Error::Structural("a pattern needs at least two slots".into()));
        }
        if edges.is_empty() {
            return Err(Error::Structural("a pattern needs at least one edge".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for e in &edges {
            if e.src >= n || e.dst >= n {
                return Err(Error::Structural(format!("edge {e:?} references a missing slot")));
            }
            if e.src == e.dst {
                return Err(Error::Structural(format!("self-loop on slot {}", e.src)));
            }
            if !seen.insert(e.oriented(directed)) {
                return Err(Error::Structural(format!("duplicate edge {e:?}")));
            }
        }
        if !is_connected(n, &edges) {
            return Err(Error::Structural("pattern is not connected".into()));
        }
        Ok(Self::canonical(directed, &attrs, &edges).0)
    }

    /// Canonicalizes without validation. Returns the pattern and the slot map
    /// `old slot -> canonical slot`.
    pub(crate) fn canonical(directed: bool, attrs: &[AttrId], edges: &[PatternEdge]) -> (Self, Vec<Slot>) {
        let edges: Vec<PatternEdge> = edges.iter().map(|e| e.oriented(directed)).collect();
        let c = canon::canonicalize(directed, attrs, &edges);
        let mut key = Vec::with_capacity(2 + attrs.len() + 3 * edges.len());
        key.push(directed as u32);
        key.push(attrs.len() as u32);
        key.extend(c.attrs.iter().copied());
        for e in &c.edges {
            key.extend([e.src as u32, e.dst as u32, e.layer]);
        }
        (
            Pattern {
                directed,
                attrs: c.attrs,
                edges: c.edges,
                code: Code(key),
                support: 0,
            },
            c.perm,
        )
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.attrs.len()
    }

    pub fn attrs(&self) -> &[AttrId] {
        &self.attrs
    }

    pub fn attr(&self, slot: Slot) -> AttrId {
        self.attrs[slot]
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> &[PatternEdge] {
        &self.edges
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    /// Minimum-image support, as filled in by the miner.
    pub fn support(&self) -> usize {
        self.support
    }

    pub fn with_support(mut self, support: usize) -> Self {
        self.support = support;
        self
    }

    pub fn has_edge(&self, e: PatternEdge) -> bool {
        self.edges.binary_search(&e.oriented(self.directed)).is_ok()
    }

    /// The pattern without edge `index`. A slot left isolated by the removal
    /// is dropped. Returns `None` when the remainder is disconnected or
    /// empty; otherwise the remainder together with the map from its
    /// canonical slots to slots of `self`.
    pub fn without_edge(&self, index: usize) -> Option<(Pattern, Vec<Slot>)> {
        if self.edges.len() < 2 {
            return None;
        }
        let removed = self.edges[index];
        let rest: Vec<PatternEdge> = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, &e)| e)
            .collect();
        let n = self.node_count();
        let mut degree = vec![0usize; n];
        for e in &rest {
            degree[e.src] += 1;
            degree[e.dst] += 1;
        }
        let isolated: Vec<Slot> = (0..n).filter(|&s| degree[s] == 0).collect();
        let kept: Vec<Slot> = match isolated.as_slice() {
            [] => (0..n).collect(),
            [x] if *x == removed.src || *x == removed.dst => (0..n).filter(|s| s != x).collect(),
            _ => return None,
        };
        let mut index_of = vec![usize::MAX; n];
        for (i, &s) in kept.iter().enumerate() {
            index_of[s] = i;
        }
        let attrs: Vec<AttrId> = kept.iter().map(|&s| self.attrs[s]).collect();
        let edges: Vec<PatternEdge> = rest
            .iter()
            .map(|e| PatternEdge::new(index_of[e.src], index_of[e.dst], e.layer))
            .collect();
        if attrs.len() < 2 || !is_connected(attrs.len(), &edges) {
            return None;
        }
        let (p, perm) = Pattern::canonical(self.directed, &attrs, &edges);
        let mut to_self = vec![0; p.node_count()];
        for (i, &s) in kept.iter().enumerate() {
            to_self[perm[i]] = s;
        }
        Some((p, to_self))
    }

    /// Human-readable code rendered with vocabulary names, e.g.
    /// `d|·,·|0>1:work`.
    pub fn code_string(&self, vocab: &Vocab) -> String {
        let attrs: Vec<&str> = self.attrs.iter().map(|&a| vocab.attr_name(a)).collect();
        let arrow = if self.directed { '>' } else { '-' };
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|e| format!("{}{}{}:{}", e.src, arrow, e.dst, vocab.layer_name(e.layer)))
            .collect();
        format!(
            "{}|{}|{}",
            if self.directed { 'd' } else { 'u' },
            attrs.join(","),
            edges.join(",")
        )
    }

    pub fn display<'a>(&'a self, vocab: &'a Vocab) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Pattern, &'a Vocab);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} (support {})", self.0.code_string(self.1), self.0.support)
            }
        }
        D(self, vocab)
    }
}

/// Connectivity ignoring direction and layer.
pub(crate) fn is_connected(n: usize, edges: &[PatternEdge]) -> bool {
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for e in edges {
            let y = if e.src == x {
                e.dst
            } else if e.dst == x {
                e.src
            } else {
                continue;
            };
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe(s: Slot, d: Slot, l: LayerId) -> PatternEdge {
        PatternEdge::new(s, d, l)
    }

    #[test]
    fn rejects_invalid_shapes() {
        assert!(Pattern::new(true, vec![0], vec![]).is_err());
        assert!(Pattern::new(true, vec![0, 0], vec![]).is_err());
        assert!(Pattern::new(true, vec![0, 0], vec![pe(0, 0, 0)]).is_err());
        assert!(Pattern::new(true, vec![0, 0, 0], vec![pe(0, 1, 0)]).is_err());
        assert!(Pattern::new(true, vec![0, 0], vec![pe(0, 1, 0), pe(0, 1, 0)]).is_err());
        assert!(Pattern::new(false, vec![0, 0], vec![pe(0, 1, 0), pe(1, 0, 0)]).is_err());
        assert!(Pattern::new(true, vec![0, 0], vec![pe(0, 1, 0), pe(1, 0, 0)]).is_ok());
    }

    #[test]
    fn relabeled_copy_has_same_code() {
        let a = Pattern::new(true, vec![0, 1, 2], vec![pe(0, 1, 0), pe(1, 2, 1)]).unwrap();
        let b = Pattern::new(true, vec![2, 0, 1], vec![pe(1, 2, 0), pe(2, 0, 1)]).unwrap();
        assert_eq!(a.code(), b.code());
    }

    #[test]
    fn direction_matters() {
        let a = Pattern::new(true, vec![0, 1], vec![pe(0, 1, 0)]).unwrap();
        let b = Pattern::new(true, vec![0, 1], vec![pe(1, 0, 0)]).unwrap();
        assert_ne!(a.code(), b.code());
        let path_fwd = Pattern::new(true, vec![0, 0, 0], vec![pe(0, 1, 0), pe(1, 2, 0)]).unwrap();
        let out_star = Pattern::new(true, vec![0, 0, 0], vec![pe(1, 0, 0), pe(1, 2, 0)]).unwrap();
        assert_ne!(path_fwd.code(), out_star.code());
    }

    #[test]
    fn removing_a_leaf_edge_drops_the_leaf() {
        let p = Pattern::new(true, vec![0, 1, 2], vec![pe(0, 1, 0), pe(1, 2, 1)]).unwrap();
        let idx = p.edges().iter().position(|e| e.layer == 1).unwrap();
        let (q, map) = p.without_edge(idx).unwrap();
        assert_eq!(q.node_count(), 2);
        assert_eq!(q.edges().len(), 1);
        for e in q.edges() {
            assert!(p.has_edge(PatternEdge::new(map[e.src], map[e.dst], e.layer)));
        }
        for (s, &m) in map.iter().enumerate().take(q.node_count()) {
            assert_eq!(q.attr(s), p.attr(m));
        }
    }

    #[test]
    fn removing_a_bridge_is_rejected() {
        let p = Pattern::new(
            false,
            vec![0, 0, 0, 0],
            vec![pe(0, 1, 0), pe(1, 2, 0), pe(2, 3, 0)],
        )
        .unwrap();
        let results: Vec<bool> = (0..3).map(|i| p.without_edge(i).is_some()).collect();
        assert_eq!(results.iter().filter(|&&ok| ok).count(), 2);
    }
}
