//! Brute-force reference implementations. Each one follows the textbook
//! definition with no pruning, so it is slow but easy to check by eye.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use mrk::graph::{AttrId, GraphBuilder, LayerId, MultiplexGraph, NodeId};
use mrk::miner::{Pattern, PatternEdge, PatternSet};
use mrk::rules::RuleSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Attribute list plus sorted edge list under the lexicographically smallest
/// slot relabeling.
pub type Canon = (Vec<AttrId>, Vec<(usize, usize, LayerId)>);

pub struct Host {
    pub directed: bool,
    pub nodes: Vec<NodeId>,
    pub attr: HashMap<NodeId, AttrId>,
    /// Both orientations when undirected.
    pub edges: HashSet<(NodeId, NodeId, LayerId)>,
    pub layers: Vec<LayerId>,
}

impl Host {
    pub fn of(g: &MultiplexGraph) -> Host {
        let mut edges = HashSet::new();
        for e in g.links() {
            edges.insert((e.src, e.dst, e.layer));
            if !g.is_directed() {
                edges.insert((e.dst, e.src, e.layer));
            }
        }
        Host {
            directed: g.is_directed(),
            nodes: g.nodes().to_vec(),
            attr: g.nodes().iter().map(|&u| (u, g.attr(u))).collect(),
            edges,
            layers: g.layers().collect(),
        }
    }

    pub fn has(&self, u: NodeId, v: NodeId, l: LayerId) -> bool {
        self.edges.contains(&(u, v, l))
    }

    pub fn with_link(&self, u: NodeId, v: NodeId, l: LayerId) -> Host {
        let mut edges = self.edges.clone();
        edges.insert((u, v, l));
        if !self.directed {
            edges.insert((v, u, l));
        }
        Host {
            directed: self.directed,
            nodes: self.nodes.clone(),
            attr: self.attr.clone(),
            edges,
            layers: self.layers.clone(),
        }
    }

    /// Logical links: each undirected link once, with `src < dst`.
    pub fn links(&self) -> Vec<(NodeId, NodeId, LayerId)> {
        let mut v: Vec<_> = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, w, _)| self.directed || u < w)
            .collect();
        v.sort();
        v
    }
}

fn orient(directed: bool, (s, d, l): (usize, usize, LayerId)) -> (usize, usize, LayerId) {
    if directed || s < d {
        (s, d, l)
    } else {
        (d, s, l)
    }
}

pub fn edges_of(p: &Pattern) -> Vec<(usize, usize, LayerId)> {
    p.edges().iter().map(|e| (e.src, e.dst, e.layer)).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest `(attrs, edges)` over all `n!` relabelings.
pub fn canon(directed: bool, attrs: &[AttrId], edges: &[(usize, usize, LayerId)]) -> Canon {
    let mut best: Option<Canon> = None;
    for perm in permutations(attrs.len()) {
        let mut a = vec![0; attrs.len()];
        for (old, &new) in perm.iter().enumerate() {
            a[new] = attrs[old];
        }
        let mut e: Vec<_> = edges
            .iter()
            .map(|&(s, d, l)| orient(directed, (perm[s], perm[d], l)))
            .collect();
        e.sort();
        let c = (a, e);
        if best.as_ref().is_none_or(|b| c < *b) {
            best = Some(c);
        }
    }
    best.unwrap()
}

pub fn canon_of(p: &Pattern) -> Canon {
    canon(p.is_directed(), p.attrs(), &edges_of(p))
}

/// Slot permutations mapping the pattern onto itself.
pub fn automorphisms(directed: bool, attrs: &[AttrId], edges: &[(usize, usize, LayerId)]) -> Vec<Vec<usize>> {
    let set: BTreeSet<_> = edges.iter().map(|&e| orient(directed, e)).collect();
    permutations(attrs.len())
        .into_iter()
        .filter(|perm| {
            (0..attrs.len()).all(|s| attrs[perm[s]] == attrs[s])
                && edges
                    .iter()
                    .all(|&(s, d, l)| set.contains(&orient(directed, (perm[s], perm[d], l))))
        })
        .collect()
}

/// Every injective attribute- and edge-preserving map, by trying all tuples.
/// `fixed` pins some slots to given nodes.
pub fn embeddings(
    directed: bool,
    attrs: &[AttrId],
    edges: &[(usize, usize, LayerId)],
    h: &Host,
    fixed: &[(usize, NodeId)],
) -> Vec<Vec<NodeId>> {
    let n = attrs.len();
    let mut out = Vec::new();
    let mut phi = vec![NodeId::MAX; n];
    fn go(
        slot: usize,
        attrs: &[AttrId],
        edges: &[(usize, usize, LayerId)],
        h: &Host,
        fixed: &[(usize, NodeId)],
        phi: &mut Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) {
        if slot == attrs.len() {
            if edges.iter().all(|&(s, d, l)| h.has(phi[s], phi[d], l)) {
                out.push(phi.clone());
            }
            return;
        }
        let choices: Vec<NodeId> = match fixed.iter().find(|(s, _)| *s == slot) {
            Some(&(_, v)) => vec![v],
            None => h.nodes.clone(),
        };
        for v in choices {
            if h.attr.get(&v) != Some(&attrs[slot]) || phi[..slot].contains(&v) {
                continue;
            }
            phi[slot] = v;
            go(slot + 1, attrs, edges, h, fixed, phi, out);
        }
        phi[slot] = NodeId::MAX;
    }
    let _ = directed;
    go(0, attrs, edges, h, fixed, &mut phi, &mut out);
    out
}

pub fn mis(directed: bool, attrs: &[AttrId], edges: &[(usize, usize, LayerId)], h: &Host) -> usize {
    let embs = embeddings(directed, attrs, edges, h, &[]);
    (0..attrs.len())
        .map(|s| embs.iter().map(|e| e[s]).collect::<HashSet<_>>().len())
        .min()
        .unwrap_or(0)
}

fn connected(n: usize, edges: &[(usize, usize, LayerId)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(s, d, _) in edges {
            for (a, b) in [(s, d), (d, s)] {
                if a == u && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.into_iter().all(|x| x)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Generate-and-filter mining: every connected edge subset spanning every
/// node subset of 2..=s host nodes, deduplicated by brute-force canonical
/// form, kept when its support reaches `sigma`.
pub fn exhaustive_mine(g: &MultiplexGraph, sigma: usize, s: usize) -> BTreeMap<Canon, usize> {
    let h = Host::of(g);
    let links = h.links();
    let mut forms: BTreeSet<Canon> = BTreeSet::new();
    for k in 2..=s.min(h.nodes.len()) {
        for subset in subsets(h.nodes.len(), k) {
            let nodes: Vec<NodeId> = subset.iter().map(|&i| h.nodes[i]).collect();
            let local = |v: NodeId| nodes.iter().position(|&x| x == v);
            let inside: Vec<(usize, usize, LayerId)> = links
                .iter()
                .filter_map(|&(u, v, l)| Some((local(u)?, local(v)?, l)))
                .collect();
            assert!(inside.len() <= 20, "host too dense for exhaustive enumeration");
            let attrs: Vec<AttrId> = nodes.iter().map(|v| h.attr[v]).collect();
            for mask in 1u32..(1 << inside.len()) {
                let chosen: Vec<_> = (0..inside.len()).filter(|i| mask >> i & 1 == 1).map(|i| inside[i]).collect();
                if connected(k, &chosen) {
                    forms.insert(canon(h.directed, &attrs, &chosen));
                }
            }
        }
    }
    forms
        .into_iter()
        .filter_map(|(attrs, edges)| {
            let sup = mis(h.directed, &attrs, &edges, &h);
            (sup >= sigma).then_some(((attrs, edges), sup))
        })
        .collect()
}

pub fn mined_forms(set: &PatternSet) -> BTreeMap<Canon, usize> {
    set.iter().map(|p| (canon_of(p), p.support())).collect()
}

/// Removes edge `i`, dropping an endpoint left without edges. `None` when the
/// rest is disconnected or smaller than one edge.
#[allow(clippy::type_complexity)]
pub fn remove_edge(attrs: &[AttrId], edges: &[(usize, usize, LayerId)], i: usize) -> Option<(Vec<AttrId>, Vec<(usize, usize, LayerId)>, bool)> {
    let rest: Vec<_> = edges.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &e)| e).collect();
    if rest.is_empty() {
        return None;
    }
    let used: BTreeSet<usize> = rest.iter().flat_map(|&(s, d, _)| [s, d]).collect();
    let dropped = used.len() < attrs.len();
    let keep: Vec<usize> = (0..attrs.len()).filter(|s| used.contains(s)).collect();
    let idx = |s: usize| keep.iter().position(|&k| k == s).unwrap();
    let a: Vec<AttrId> = keep.iter().map(|&s| attrs[s]).collect();
    let e: Vec<_> = rest.iter().map(|&(s, d, l)| (idx(s), idx(d), l)).collect();
    connected(a.len(), &e).then_some((a, e, dropped))
}

/// For every antecedent/consequent pair, the number of distinct rules: one
/// per orbit, under the consequent's automorphisms, of edges whose removal
/// leaves the antecedent.
pub fn expected_rules(set: &PatternSet) -> BTreeMap<(Canon, Canon), usize> {
    let directed = set.directed;
    let known: HashMap<Canon, usize> = mined_forms(set).into_iter().collect();
    let mut out = BTreeMap::new();
    for p in set.iter() {
        let (attrs, edges) = (p.attrs().to_vec(), edges_of(p));
        let autos = automorphisms(directed, &attrs, &edges);
        let mut orbit_seen: BTreeSet<BTreeSet<(usize, usize, LayerId)>> = BTreeSet::new();
        for (i, &e) in edges.iter().enumerate() {
            let Some((a, ae, _)) = remove_edge(&attrs, &edges, i) else { continue };
            let form = canon(directed, &a, &ae);
            if !known.contains_key(&form) {
                continue;
            }
            let orbit: BTreeSet<_> = autos
                .iter()
                .map(|perm| orient(directed, (perm[e.0], perm[e.1], e.2)))
                .collect();
            if orbit_seen.insert(orbit) {
                *out.entry((form, canon_of(p))).or_insert(0) += 1;
            }
        }
    }
    out
}

pub fn rule_forms(rules: &RuleSet) -> BTreeMap<(Canon, Canon), usize> {
    let mut out = BTreeMap::new();
    for r in rules.iter() {
        *out.entry((canon_of(&r.antecedent), canon_of(&r.consequent))).or_insert(0) += 1;
    }
    out
}

/// Rules that fire on candidate link `(u, v, l)`: inserting the link lets the
/// consequent embed with its delta edge on exactly that link.
pub fn firing_rules(rules: &RuleSet, h: &Host, u: NodeId, v: NodeId, l: LayerId) -> Vec<usize> {
    let plus = h.with_link(u, v, l);
    let mut out = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        if r.new_node || r.delta_edge.layer != l {
            continue;
        }
        let c = &r.consequent;
        let d = r.delta_edge;
        let mut ends = vec![(u, v)];
        if !h.directed {
            ends.push((v, u));
        }
        let fires = ends.iter().any(|&(a, b)| {
            !embeddings(h.directed, c.attrs(), &edges_of(c), &plus, &[(d.src, a), (d.dst, b)]).is_empty()
        });
        if fires {
            out.push(i);
        }
    }
    out
}

/// New-node rules whose antecedent embeds with the anchor slot on `w`.
pub fn firing_old_new(rules: &RuleSet, h: &Host, w: NodeId, l: LayerId, outgoing: Option<bool>) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        if !r.new_node || r.delta_edge.layer != l {
            continue;
        }
        let inv = r.consequent_to_antecedent();
        let d = r.delta_edge;
        let (anchor, is_out) = match (inv[d.src], inv[d.dst]) {
            (Some(a), None) => (a, true),
            (None, Some(b)) => (b, false),
            _ => unreachable!(),
        };
        if outgoing.is_some_and(|o| o != is_out) {
            continue;
        }
        let a = &r.antecedent;
        if !embeddings(h.directed, a.attrs(), &edges_of(a), h, &[(anchor, w)]).is_empty() {
            out.push(i);
        }
    }
    out
}

/// Pairwise Mann–Whitney statistic: ties count one half.
pub fn mann_whitney(scores: &[f64], labels: &[bool]) -> f64 {
    let pos: Vec<f64> = scores.iter().zip(labels).filter(|(_, &y)| y).map(|(&s, _)| s).collect();
    let neg: Vec<f64> = scores.iter().zip(labels).filter(|(_, &y)| !y).map(|(&s, _)| s).collect();
    let mut wins = 0.0;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                wins += 1.0;
            } else if p == n {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() as f64 * neg.len() as f64)
}

/// Sharma co-occurrence scores computed from explicit pair sets.
pub fn sharma(h: &Host) -> BTreeMap<(NodeId, NodeId, LayerId), f64> {
    let key = |u: NodeId, v: NodeId| if h.directed || u < v { (u, v) } else { (v, u) };
    let mut in_layer: BTreeMap<LayerId, BTreeSet<(NodeId, NodeId)>> = BTreeMap::new();
    for &l in &h.layers {
        in_layer.insert(l, BTreeSet::new());
    }
    for &(u, v, l) in &h.edges {
        in_layer.get_mut(&l).unwrap().insert(key(u, v));
    }
    let p = |given: LayerId, target: LayerId| {
        let a = &in_layer[&given];
        if a.is_empty() {
            0.0
        } else {
            a.intersection(&in_layer[&target]).count() as f64 / a.len() as f64
        }
    };
    let pairs: BTreeSet<(NodeId, NodeId)> = in_layer.values().flatten().copied().collect();
    let mut out = BTreeMap::new();
    for (u, v) in pairs {
        for &target in &h.layers {
            if in_layer[&target].contains(&(u, v)) {
                continue;
            }
            let s: f64 = h
                .layers
                .iter()
                .filter(|&&l| in_layer[&l].contains(&(u, v)))
                .map(|&l| p(l, target))
                .sum();
            out.insert((u, v, target), s);
        }
    }
    out
}

/// Classical scores on the union of all layers, ignoring direction, from
/// explicit neighbour sets. Keys are `u < v`; zero scores omitted.
pub fn classical(h: &Host, method: &str) -> BTreeMap<(NodeId, NodeId), f64> {
    let mut nb: BTreeMap<NodeId, BTreeSet<NodeId>> = h.nodes.iter().map(|&u| (u, BTreeSet::new())).collect();
    for &(u, v, _) in &h.edges {
        nb.get_mut(&u).unwrap().insert(v);
        nb.get_mut(&v).unwrap().insert(u);
    }
    let active: Vec<NodeId> = nb.iter().filter(|(_, n)| !n.is_empty()).map(|(&u, _)| u).collect();
    let mut out = BTreeMap::new();
    for &u in &active {
        for &v in &active {
            if u >= v || nb[&u].contains(&v) {
                continue;
            }
            let common: Vec<NodeId> = nb[&u].intersection(&nb[&v]).copied().collect();
            let s = match method {
                "cn" => common.len() as f64,
                "aa" => common
                    .iter()
                    .map(|z| nb[z].len())
                    .filter(|&d| d > 1)
                    .map(|d| 1.0 / (d as f64).ln())
                    .sum(),
                "ra" => common.iter().map(|z| 1.0 / nb[z].len() as f64).sum(),
                "pa" => (nb[&u].len() * nb[&v].len()) as f64,
                "ja" => common.len() as f64 / nb[&u].union(&nb[&v]).count() as f64,
                _ => unreachable!(),
            };
            if s > 0.0 {
                out.insert((u, v), s);
            }
        }
    }
    out
}

/// A random host with `n` nodes, `layers` layers, link probability `p` per
/// node pair and layer, and `attrs` attribute values.
pub fn random_host(seed: u64, n: usize, layers: usize, p: f64, attrs: usize, directed: bool) -> MultiplexGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new(directed);
    for u in 0..n {
        let name = format!("v{u}");
        b.add_node(&name);
        if attrs > 1 {
            b.set_attr(&name, &format!("t{}", rng.gen_range(0..attrs)));
        }
    }
    for l in 0..layers {
        b.add_layer(&format!("L{l}"));
        for u in 0..n {
            for v in 0..n {
                if u == v || (!directed && v < u) {
                    continue;
                }
                if rng.gen::<f64>() < p {
                    b.add_edge(&format!("v{u}"), &format!("v{v}"), &format!("L{l}"));
                }
            }
        }
    }
    b.build()
}

/// Every ordered (or `u < v`) node pair and layer without a link.
pub fn non_edges(h: &Host) -> Vec<(NodeId, NodeId, LayerId)> {
    let mut out = Vec::new();
    for &u in &h.nodes {
        for &v in &h.nodes {
            if u == v || (!h.directed && v < u) {
                continue;
            }
            for &l in &h.layers {
                if !h.has(u, v, l) {
                    out.push((u, v, l));
                }
            }
        }
    }
    out
}

pub fn pattern(directed: bool, attrs: &[AttrId], edges: &[(usize, usize, LayerId)]) -> Pattern {
    Pattern::new(
        directed,
        attrs.to_vec(),
        edges.iter().map(|&(s, d, l)| PatternEdge::new(s, d, l)).collect(),
    )
    .unwrap()
}
