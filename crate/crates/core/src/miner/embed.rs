//! Backtracking subgraph matching of patterns into a host graph.
//!
//! Slots are matched in an order where every slot after the first is
//! adjacent to an earlier one; its candidates are the matching neighbours of
//! that earlier slot's image, filtered by attribute, per-layer degree and the
//! remaining edges to already-mapped slots.

use crate::error::{Error, Result};
use crate::graph::{LayerId, MultiplexGraph, NodeId};

use super::canon;
use super::pattern::{Pattern, Slot};

/// Search budget counted in partial states (slot assignments that passed
/// every check).
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn unlimited() -> Self {
        Budget::new(u64::MAX)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.used += 1;
        self.used <= self.limit
    }
}

/// An injective, attribute-, direction- and layer-preserving map from
/// pattern slots to host nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Embedding {
    /// `nodes[slot]` is the host node the slot maps to.
    pub nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, Copy)]
enum Via {
    Out,
    In,
}

#[derive(Debug, Clone)]
struct Step {
    slot: Slot,
    anchor: Option<(Slot, LayerId, Via)>,
    /// Remaining edges to earlier slots: `(other, layer, this slot is source)`.
    checks: Vec<(Slot, LayerId, bool)>,
}

#[derive(Debug, Clone)]
struct Plan {
    steps: Vec<Step>,
}

impl Plan {
    fn rooted(p: &Pattern, root: Slot) -> Plan {
        let n = p.node_count();
        let mut placed = vec![false; n];
        let mut order = vec![root];
        placed[root] = true;
        let total_degree: Vec<usize> = (0..n)
            .map(|s| p.edges().iter().filter(|e| e.src == s || e.dst == s).count())
            .collect();
        while order.len() < n {
            let next = (0..n)
                .filter(|&s| !placed[s])
                .map(|s| {
                    let links = p
                        .edges()
                        .iter()
                        .filter(|e| (e.src == s && placed[e.dst]) || (e.dst == s && placed[e.src]))
                        .count();
                    (links, total_degree[s], std::cmp::Reverse(s))
                })
                .filter(|&(links, _, _)| links > 0)
                .max()
                .map(|(_, _, std::cmp::Reverse(s))| s)
                .expect("pattern is connected");
            placed[next] = true;
            order.push(next);
        }

        let mut position = vec![usize::MAX; n];
        for (i, &s) in order.iter().enumerate() {
            position[s] = i;
        }
        let steps = order
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let mut anchor = None;
                let mut checks = Vec::new();
                for e in p.edges() {
                    let (other, is_src) = if e.src == s {
                        (e.dst, true)
                    } else if e.dst == s {
                        (e.src, false)
                    } else {
                        continue;
                    };
                    if position[other] >= i {
                        continue;
                    }
                    if anchor.is_none() {
                        // candidates for `s` are out-neighbours of the earlier
                        // slot when the earlier slot is the edge source
                        let via = if is_src && p.is_directed() { Via::In } else { Via::Out };
                        anchor = Some((other, e.layer, via));
                    } else {
                        checks.push((other, e.layer, is_src));
                    }
                }
                Step { slot: s, anchor, checks }
            })
            .collect();
        Plan { steps }
    }
}

/// Matcher for one pattern against one host graph.
pub struct Matcher<'a> {
    pattern: &'a Pattern,
    graph: &'a MultiplexGraph,
    plans: Vec<Plan>,
    /// Per slot, `(layer, out-degree, in-degree)` requirements.
    degree: Vec<Vec<(LayerId, usize, usize)>>,
}

impl<'a> Matcher<'a> {
    pub fn new(pattern: &'a Pattern, graph: &'a MultiplexGraph) -> Self {
        let n = pattern.node_count();
        let mut degree: Vec<Vec<(LayerId, usize, usize)>> = vec![Vec::new(); n];
        let mut bump = |s: Slot, l: LayerId, out: bool| {
            let list = &mut degree[s];
            let entry = match list.iter().position(|&(x, _, _)| x == l) {
                Some(i) => &mut list[i],
                None => {
                    list.push((l, 0, 0));
                    list.last_mut().unwrap()
                }
            };
            if out {
                entry.1 += 1;
            } else {
                entry.2 += 1;
            }
        };
        for e in pattern.edges() {
            if pattern.is_directed() {
                bump(e.src, e.layer, true);
                bump(e.dst, e.layer, false);
            } else {
                bump(e.src, e.layer, true);
                bump(e.dst, e.layer, true);
            }
        }
        Matcher {
            pattern,
            graph,
            plans: (0..n).map(|s| Plan::rooted(pattern, s)).collect(),
            degree,
        }
    }

    #[inline]
    fn compatible(&self, slot: Slot, v: NodeId) -> bool {
        let g = self.graph;
        g.attr(v) == self.pattern.attr(slot)
            && self.degree[slot]
                .iter()
                .all(|&(l, o, i)| g.out_degree(v, l) >= o && g.in_degree(v, l) >= i)
    }

    /// Host nodes that pass the attribute and degree filters for `slot`.
    pub fn candidates(&self, slot: Slot) -> impl Iterator<Item = NodeId> + '_ {
        self.graph
            .nodes()
            .iter()
            .copied()
            .filter(move |&v| self.compatible(slot, v))
    }

    fn extend(
        &self,
        plan: &Plan,
        k: usize,
        map: &mut [NodeId],
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[NodeId]) -> bool,
    ) -> Result<bool> {
        if k == plan.steps.len() {
            return Ok(!visit(map));
        }
        let g = self.graph;
        let step = &plan.steps[k];
        let (anchor, layer, via) = step.anchor.expect("non-root step has an anchor");
        let a = map[anchor];
        let cands = match via {
            Via::Out => g.out_neighbors(a, layer),
            Via::In => g.in_neighbors(a, layer),
        };
        'cand: for &v in cands {
            if !self.compatible(step.slot, v) {
                continue;
            }
            for s in &plan.steps[..k] {
                if map[s.slot] == v {
                    continue 'cand;
                }
            }
            for &(other, l, is_src) in &step.checks {
                let w = map[other];
                let ok = if is_src { g.has_edge(v, w, l) } else { g.has_edge(w, v, l) };
                if !ok {
                    continue 'cand;
                }
            }
            if !budget.tick() {
                return Err(self.exhausted(budget));
            }
            map[step.slot] = v;
            if self.extend(plan, k + 1, map, budget, visit)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn exhausted(&self, budget: &Budget) -> Error {
        Error::Resource {
            pattern: self.pattern.code_string(self.graph.vocab()),
            budget: budget.limit,
        }
    }

    fn run(
        &self,
        root: Slot,
        roots: &mut dyn Iterator<Item = NodeId>,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[NodeId]) -> bool,
    ) -> Result<bool> {
        let plan = &self.plans[root];
        let mut map = vec![NodeId::MAX; self.pattern.node_count()];
        for v in roots {
            if !self.compatible(root, v) {
                continue;
            }
            if !budget.tick() {
                return Err(self.exhausted(budget));
            }
            map[root] = v;
            if self.extend(plan, 1, &mut map, budget, visit)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Calls `visit` with every embedding (indexed by slot) until it returns
    /// `false`.
    pub fn for_each(&self, budget: &mut Budget, mut visit: impl FnMut(&[NodeId]) -> bool) -> Result<()> {
        let root = (0..self.pattern.node_count())
            .min_by_key(|&s| self.candidates(s).count())
            .unwrap_or(0);
        let mut roots = self.candidates(root);
        self.run(root, &mut roots, budget, &mut visit)?;
        Ok(())
    }

    /// Some embedding mapping `slot` to `node`, if one exists.
    pub fn find_with(&self, slot: Slot, node: NodeId, budget: &mut Budget) -> Result<Option<Vec<NodeId>>> {
        let mut found = None;
        self.run(slot, &mut std::iter::once(node), budget, &mut |m| {
            found = Some(m.to_vec());
            false
        })?;
        Ok(found)
    }
}

/// Every embedding of `p` in `g`, sorted by mapped node tuple.
pub fn embeddings(p: &Pattern, g: &MultiplexGraph) -> Vec<Embedding> {
    let m = Matcher::new(p, g);
    let mut out = Vec::new();
    m.for_each(&mut Budget::unlimited(), |nodes| {
        out.push(Embedding { nodes: nodes.to_vec() });
        true
    })
    .expect("unlimited budget");
    out.sort();
    out
}

/// Result of a support computation against a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportCount {
    /// The exact minimum-image support.
    Exact(usize),
    /// Proven below the threshold; the value is an upper bound.
    Below(usize),
}

impl SupportCount {
    pub fn value(self) -> usize {
        match self {
            SupportCount::Exact(v) | SupportCount::Below(v) => v,
        }
    }
}

/// Minimum-image support: for every slot, the number of distinct host nodes
/// it maps to over all embeddings; the minimum over slots.
///
/// With a `threshold`, the computation stops as soon as some slot provably
/// cannot reach it. Patterns at or above the threshold always get their exact
/// support.
pub fn support(
    p: &Pattern,
    g: &MultiplexGraph,
    threshold: Option<usize>,
    budget: &mut Budget,
) -> Result<SupportCount> {
    let n = p.node_count();
    let m = Matcher::new(p, g);
    let autos = canon::automorphisms(p.is_directed(), p.attrs(), p.edges());
    let orbit = canon::slot_orbits(&autos, n);

    let mut reps: Vec<(Vec<NodeId>, Slot)> = (0..n)
        .filter(|&s| orbit[s] == s)
        .map(|s| (m.candidates(s).collect(), s))
        .collect();
    if let Some(t) = threshold {
        if let Some((c, _)) = reps.iter().find(|(c, _)| c.len() < t) {
            return Ok(SupportCount::Below(c.len()));
        }
    }
    reps.sort_by_key(|(c, s)| (c.len(), *s));

    let universe = g.vocab().node_count();
    let mut images: Vec<Vec<bool>> = vec![vec![false; universe]; n];
    let mut counts = vec![0usize; n];
    let mut best = usize::MAX;
    for (cands, x) in &reps {
        for (i, &v) in cands.iter().enumerate() {
            if let Some(t) = threshold {
                if counts[*x] + (cands.len() - i) < t {
                    return Ok(SupportCount::Below(counts[*x] + (cands.len() - i)));
                }
            }
            if images[*x][v as usize] {
                continue;
            }
            if let Some(emb) = m.find_with(*x, v, budget)? {
                for (slot, &w) in emb.iter().enumerate() {
                    if !images[slot][w as usize] {
                        images[slot][w as usize] = true;
                        counts[slot] += 1;
                    }
                }
            }
        }
        best = best.min(counts[*x]);
        if let Some(t) = threshold {
            if best < t {
                return Ok(SupportCount::Below(best));
            }
        }
    }
    Ok(SupportCount::Exact(if best == usize::MAX { 0 } else { best }))
}

/// Exact minimum-image support without a search budget.
pub fn min_image_support(p: &Pattern, g: &MultiplexGraph) -> usize {
    support(p, g, None, &mut Budget::unlimited())
        .expect("unlimited budget")
        .value()
}
