//! Canonical labeling of small patterns.
//!
//! Slots are first partitioned by colour refinement (attribute, then the
//! multiset of `(layer, direction, neighbour colour)` triples, iterated to a
//! fixed point). The canonical form is the lexicographically smallest sorted
//! edge list over all slot orders that list colour classes in rank order.
//! Colour ranks are isomorphism-invariant, so the minimum is taken over an
//! invariant set of orders and two patterns share a form iff they are
//! isomorphic. The search is exponential only inside colour classes, which
//! stay tiny for patterns of a handful of nodes.

use crate::graph::{AttrId, LayerId};

use super::pattern::{PatternEdge, Slot};

pub(crate) struct Canonical {
    pub attrs: Vec<AttrId>,
    pub edges: Vec<PatternEdge>,
    /// `perm[old] = new`
    pub perm: Vec<Slot>,
}

/// A node's colour plus its sorted (layer, direction, neighbour colour) list.
type Signature = (u32, Vec<(LayerId, u8, u32)>);

fn refine(directed: bool, attrs: &[AttrId], edges: &[PatternEdge]) -> Vec<u32> {
    let n = attrs.len();
    let mut color: Vec<u32> = attrs.to_vec();
    let mut classes = usize::MAX;
    loop {
        let mut sig: Vec<Signature> =
            color.iter().map(|&c| (c, Vec::new())).collect();
        for e in edges {
            let (out_dir, in_dir) = if directed { (0, 1) } else { (2, 2) };
            sig[e.src].1.push((e.layer, out_dir, color[e.dst]));
            sig[e.dst].1.push((e.layer, in_dir, color[e.src]));
        }
        for s in &mut sig {
            s.1.sort_unstable();
        }
        let mut distinct: Vec<&Signature> = sig.iter().collect();
        distinct.sort();
        distinct.dedup();
        let next: Vec<u32> = (0..n)
            .map(|v| distinct.binary_search(&&sig[v]).unwrap() as u32)
            .collect();
        let count = distinct.len();
        color = next;
        if count == classes || count == n {
            return color;
        }
        classes = count;
    }
}

/// Enumerates every slot order consistent with the colour classes and calls
/// `leaf` with the map `old slot -> position`.
fn for_each_order(color: &[u32], mut leaf: impl FnMut(&[Slot])) {
    let n = color.len();
    let mut by_color: Vec<Slot> = (0..n).collect();
    by_color.sort_by_key(|&v| (color[v], v));
    let position_color: Vec<u32> = by_color.iter().map(|&v| color[v]).collect();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn go(
        pos: usize,
        color: &[u32],
        position_color: &[u32],
        perm: &mut [Slot],
        used: &mut [bool],
        leaf: &mut dyn FnMut(&[Slot]),
    ) {
        if pos == color.len() {
            leaf(perm);
            return;
        }
        for v in 0..color.len() {
            if !used[v] && color[v] == position_color[pos] {
                used[v] = true;
                perm[v] = pos;
                go(pos + 1, color, position_color, perm, used, leaf);
                used[v] = false;
            }
        }
    }
    go(0, color, &position_color, &mut perm, &mut used, &mut leaf);
}

fn relabel(directed: bool, edges: &[PatternEdge], perm: &[Slot], out: &mut Vec<PatternEdge>) {
    out.clear();
    out.extend(
        edges
            .iter()
            .map(|e| PatternEdge::new(perm[e.src], perm[e.dst], e.layer).oriented(directed)),
    );
    out.sort_unstable();
}

pub(crate) fn canonicalize(directed: bool, attrs: &[AttrId], edges: &[PatternEdge]) -> Canonical {
    let color = refine(directed, attrs, edges);
    let mut best: Option<(Vec<PatternEdge>, Vec<Slot>)> = None;
    let mut scratch = Vec::with_capacity(edges.len());
    for_each_order(&color, |perm| {
        relabel(directed, edges, perm, &mut scratch);
        match &mut best {
            Some((b, p)) if scratch < *b => {
                b.clone_from(&scratch);
                p.copy_from_slice(perm);
            }
            Some(_) => {}
            None => best = Some((scratch.clone(), perm.to_vec())),
        }
    });
    let (edges, perm) = best.expect("at least one order");
    let mut new_attrs = vec![0; attrs.len()];
    for (old, &new) in perm.iter().enumerate() {
        new_attrs[new] = attrs[old];
    }
    Canonical {
        attrs: new_attrs,
        edges,
        perm,
    }
}

/// All automorphisms of a pattern, as maps `slot -> slot`. The identity is
/// always included.
pub(crate) fn automorphisms(directed: bool, attrs: &[AttrId], edges: &[PatternEdge]) -> Vec<Vec<Slot>> {
    let color = refine(directed, attrs, edges);
    let mut sorted: Vec<PatternEdge> = edges.iter().map(|e| e.oriented(directed)).collect();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut scratch = Vec::with_capacity(edges.len());
    // `for_each_order` yields maps slot -> position; reinterpret positions as
    // slots by sorting slots by colour, which is the order positions follow.
    let mut by_color: Vec<Slot> = (0..attrs.len()).collect();
    by_color.sort_by_key(|&v| (color[v], v));
    for_each_order(&color, |perm| {
        let map: Vec<Slot> = perm.iter().map(|&pos| by_color[pos]).collect();
        relabel(directed, &sorted, &map, &mut scratch);
        if scratch == sorted {
            out.push(map);
        }
    });
    out
}

/// Partition of slots into automorphism orbits; `orbit[s]` is the smallest
/// slot in `s`'s orbit.
pub(crate) fn slot_orbits(autos: &[Vec<Slot>], n: usize) -> Vec<Slot> {
    // the automorphisms form a group, so a slot's orbit is its set of images
    (0..n)
        .map(|s| autos.iter().map(|a| a[s]).min().unwrap_or(s))
        .collect()
}
