//! Scoring unobserved typed links by applying rules to a training graph.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{AttrId, Edge, LayerId, MultiplexGraph, NodeId, Vocab};
use crate::miner::{Budget, Code, Matcher};
use crate::rules::{Rule, RuleSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Weighting {
    Count,
    Conf,
    Lift,
    ConfMean,
    LiftMean,
}

impl Weighting {
    pub const ALL: [Weighting; 5] = [
        Weighting::Count,
        Weighting::Conf,
        Weighting::Lift,
        Weighting::ConfMean,
        Weighting::LiftMean,
    ];

    fn uses_lift(self) -> bool {
        matches!(self, Weighting::Lift | Weighting::LiftMean)
    }

    fn is_mean(self) -> bool {
        matches!(self, Weighting::ConfMean | Weighting::LiftMean)
    }

    /// Per-rule term, or `None` when the rule cannot contribute.
    fn term(self, r: &Rule) -> Option<f64> {
        match self {
            Weighting::Count => Some(1.0),
            Weighting::Conf | Weighting::ConfMean => Some(r.confidence),
            Weighting::Lift | Weighting::LiftMean => r.lift.filter(|l| l.is_finite()),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::Count => "count",
            Weighting::Conf => "conf",
            Weighting::Lift => "lift",
            Weighting::ConfMean => "conf-mean",
            Weighting::LiftMean => "lift-mean",
        })
    }
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Weighting::ALL
            .into_iter()
            .find(|w| w.to_string() == s)
            .ok_or_else(|| Error::Usage(format!("unknown weighting `{s}` (count, conf, lift, conf-mean, lift-mean)")))
    }
}

/// Sparse scores for candidate links `(u, v, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub directed: bool,
    /// Which predictor produced the table, e.g. `conf` or `sharma`.
    pub tag: String,
    scores: BTreeMap<Edge, f64>,
    /// Contributing rule ids per key, when recorded.
    pub provenance: Option<BTreeMap<Edge, Vec<usize>>>,
}

impl ScoreTable {
    pub fn new(directed: bool, tag: impl Into<String>) -> Self {
        ScoreTable {
            directed,
            tag: tag.into(),
            scores: BTreeMap::new(),
            provenance: None,
        }
    }

    pub fn from_scores(directed: bool, tag: impl Into<String>, scores: impl IntoIterator<Item = (Edge, f64)>) -> Self {
        let mut t = ScoreTable::new(directed, tag);
        for (e, s) in scores {
            t.insert(e, s);
        }
        t
    }

    fn key(&self, e: Edge) -> Edge {
        if self.directed {
            e
        } else {
            e.canonical()
        }
    }

    /// Sets the score of `e`, canonicalized for undirected tables.
    pub fn insert(&mut self, e: Edge, score: f64) {
        let k = self.key(e);
        self.scores.insert(k, score);
    }

    /// Score of `e`; 0 when absent.
    pub fn score(&self, e: Edge) -> f64 {
        self.get(e).unwrap_or(0.0)
    }

    pub fn get(&self, e: Edge) -> Option<f64> {
        self.scores.get(&self.key(e)).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, f64)> + '_ {
        self.scores.iter().map(|(&e, &s)| (e, s))
    }

    /// Copies a single-layer table onto every layer in `layers`.
    pub fn broadcast(&self, layers: &[LayerId]) -> ScoreTable {
        let mut out = ScoreTable::new(self.directed, self.tag.clone());
        for (e, s) in self.iter() {
            for &l in layers {
                out.insert(Edge::new(e.src, e.dst, l), s);
            }
        }
        out
    }

    pub fn to_csv(&self, vocab: &Vocab) -> String {
        let mut out = String::from("src,dst,layer,score\n");
        for (e, s) in self.iter() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                vocab.node_name(e.src),
                vocab.node_name(e.dst),
                vocab.layer_name(e.layer),
                s
            ));
        }
        out
    }

    /// Reads a score CSV. Rows naming nodes or layers outside `vocab` are a
    /// format error.
    pub fn from_csv(text: &str, directed: bool, tag: &str, vocab: &Vocab) -> Result<ScoreTable> {
        let mut t = ScoreTable::new(directed, tag);
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            let bad = |m: String| Error::format("score", format!("line {}: {m}", i + 1));
            if f.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", f.len())));
            }
            let node = |s: &str| vocab.node_id(s).ok_or_else(|| bad(format!("unknown node `{s}`")));
            let layer = vocab.layer_id(f[2]).ok_or_else(|| bad(format!("unknown layer `{}`", f[2])))?;
            let score: f64 = f[3].parse().map_err(|_| bad(format!("bad score `{}`", f[3])))?;
            t.insert(Edge::new(node(f[0])?, node(f[1])?, layer), score);
        }
        Ok(t)
    }
}

/// Orientation of a predicted old-new link relative to the old node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Out,
    In,
    Undirected,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Out => "out",
            Direction::In => "in",
            Direction::Undirected => "undirected",
        })
    }
}

/// `node` gains a link of `layer` to a node unseen in training.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OldNewKey {
    pub node: NodeId,
    pub layer: LayerId,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OldNewScoreTable {
    pub tag: String,
    pub scores: BTreeMap<OldNewKey, f64>,
    /// Attributes the contributing rules give the new node, per key.
    pub new_node_attrs: BTreeMap<OldNewKey, BTreeSet<AttrId>>,
}

impl OldNewScoreTable {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn score(&self, k: OldNewKey) -> f64 {
        self.scores.get(&k).copied().unwrap_or(0.0)
    }

    pub fn to_csv(&self, vocab: &Vocab) -> String {
        let mut out = String::from("node,layer,direction,score\n");
        for (k, s) in &self.scores {
            out.push_str(&format!(
                "{},{},{},{}\n",
                vocab.node_name(k.node),
                vocab.layer_name(k.layer),
                k.direction,
                s
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PredictOptions {
    /// Count every antecedent embedding instead of once per rule and key.
    pub per_embedding: bool,
    /// Record contributing rule ids per key.
    pub provenance: bool,
}

/// Rule indices grouped by antecedent, so each antecedent is matched once.
fn group_by_antecedent(rules: &RuleSet, keep: impl Fn(&Rule) -> bool) -> Vec<Vec<(usize, &Rule)>> {
    let mut groups: BTreeMap<&Code, Vec<(usize, &Rule)>> = BTreeMap::new();
    for (i, r) in rules.iter().enumerate() {
        if keep(r) {
            groups.entry(r.antecedent.code()).or_default().push((i, r));
        }
    }
    groups.into_values().collect()
}

/// Calls `visit` with every embedding of the group's antecedent in `g`.
fn for_each_embedding(rules: &[(usize, &Rule)], g: &MultiplexGraph, mut visit: impl FnMut(&[NodeId])) {
    let antecedent = &rules[0].1.antecedent;
    Matcher::new(antecedent, g)
        .for_each(&mut Budget::unlimited(), |phi| {
            visit(phi);
            true
        })
        .expect("unlimited budget");
}

/// Aggregates `(key, rule id)` contributions into scores.
fn aggregate<K: Ord + Copy>(
    contributions: Vec<(K, usize)>,
    rules: &RuleSet,
    weighting: Weighting,
) -> BTreeMap<K, (f64, Vec<usize>)> {
    let mut acc: BTreeMap<K, (f64, usize, Vec<usize>)> = BTreeMap::new();
    for (k, id) in contributions {
        let Some(term) = weighting.term(&rules.rules[id]) else {
            continue;
        };
        let entry = acc.entry(k).or_insert((0.0, 0, Vec::new()));
        entry.0 += term;
        entry.1 += 1;
        entry.2.push(id);
    }
    acc.into_iter()
        .map(|(k, (sum, n, mut ids))| {
            ids.sort_unstable();
            ids.dedup();
            let v = if weighting.is_mean() { sum / n as f64 } else { sum };
            (k, (v, ids))
        })
        .collect()
}

/// Sorted contributions, deduplicated per `(key, rule)` unless counting every
/// embedding.
fn collect<K: Ord + Copy + Send + std::hash::Hash>(parts: Vec<Vec<(K, usize)>>, per_embedding: bool) -> Vec<(K, usize)> {
    let mut all: Vec<(K, usize)> = parts.into_iter().flatten().collect();
    all.sort_unstable();
    if !per_embedding {
        all.dedup();
    }
    all
}

/// Scores old-old candidate links: every embedding of a rule's antecedent in
/// `g` maps the delta edge onto a concrete link, which scores unless it is
/// already an edge of `g`.
pub fn score_links(g: &MultiplexGraph, rules: &RuleSet, weighting: Weighting) -> ScoreTable {
    score_links_with(g, rules, weighting, PredictOptions::default())
}

pub fn score_links_with(g: &MultiplexGraph, rules: &RuleSet, weighting: Weighting, opts: PredictOptions) -> ScoreTable {
    let groups = group_by_antecedent(rules, |r| !r.new_node && (!weighting.uses_lift() || weighting.term(r).is_some()));
    let parts: Vec<Vec<(Edge, usize)>> = groups
        .par_iter()
        .map(|group| {
            let maps: Vec<(usize, Vec<Option<usize>>, crate::miner::PatternEdge)> = group
                .iter()
                .map(|&(id, r)| (id, r.consequent_to_antecedent(), r.delta_edge))
                .collect();
            let mut seen: HashSet<(Edge, usize)> = HashSet::new();
            let mut out = Vec::new();
            for_each_embedding(group, g, |phi| {
                for (id, inv, d) in &maps {
                    let (a, b) = (inv[d.src].expect("old-old rule"), inv[d.dst].expect("old-old rule"));
                    let e = Edge::new(phi[a], phi[b], d.layer);
                    if g.contains(e) {
                        continue;
                    }
                    let k = g.link_key(e);
                    if opts.per_embedding || seen.insert((k, *id)) {
                        out.push((k, *id));
                    }
                }
            });
            out
        })
        .collect();
    let contributions = collect(parts, opts.per_embedding);
    let agg = aggregate(contributions, rules, weighting);
    let mut table = ScoreTable::new(g.is_directed(), weighting.to_string());
    let mut provenance = BTreeMap::new();
    for (k, (v, ids)) in agg {
        table.insert(k, v);
        if opts.provenance {
            provenance.insert(k, ids);
        }
    }
    if opts.provenance {
        table.provenance = Some(provenance);
    }
    table
}

/// Scores `(node, layer, direction)` for gaining a link to an unseen node,
/// from rules whose consequent adds a node.
pub fn score_old_new(g: &MultiplexGraph, rules: &RuleSet, weighting: Weighting) -> OldNewScoreTable {
    score_old_new_with(g, rules, weighting, PredictOptions::default())
}

pub fn score_old_new_with(
    g: &MultiplexGraph,
    rules: &RuleSet,
    weighting: Weighting,
    opts: PredictOptions,
) -> OldNewScoreTable {
    let groups = group_by_antecedent(rules, |r| r.new_node && (!weighting.uses_lift() || weighting.term(r).is_some()));
    let parts: Vec<Vec<(OldNewKey, usize)>> = groups
        .par_iter()
        .map(|group| {
            let anchors: Vec<(usize, usize, LayerId, Direction)> = group
                .iter()
                .map(|&(id, r)| {
                    let inv = r.consequent_to_antecedent();
                    let d = r.delta_edge;
                    let (anchor, dir) = match (inv[d.src], inv[d.dst]) {
                        (Some(a), None) => (a, Direction::Out),
                        (None, Some(b)) => (b, Direction::In),
                        _ => unreachable!("new-node rule joins the new slot to an old one"),
                    };
                    let dir = if g.is_directed() { dir } else { Direction::Undirected };
                    (id, anchor, d.layer, dir)
                })
                .collect();
            let mut seen: HashSet<(OldNewKey, usize)> = HashSet::new();
            let mut out = Vec::new();
            for_each_embedding(group, g, |phi| {
                for &(id, anchor, layer, direction) in &anchors {
                    let k = OldNewKey {
                        node: phi[anchor],
                        layer,
                        direction,
                    };
                    if opts.per_embedding || seen.insert((k, id)) {
                        out.push((k, id));
                    }
                }
            });
            out
        })
        .collect();
    let contributions = collect(parts, opts.per_embedding);
    let agg = aggregate(contributions, rules, weighting);
    let mut table = OldNewScoreTable {
        tag: weighting.to_string(),
        scores: BTreeMap::new(),
        new_node_attrs: BTreeMap::new(),
    };
    let new_attr: HashMap<usize, AttrId> = rules
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.new_slot().map(|s| (i, r.consequent.attr(s))))
        .collect();
    for (k, (v, ids)) in agg {
        table.scores.insert(k, v);
        table
            .new_node_attrs
            .insert(k, ids.iter().filter_map(|i| new_attr.get(i).copied()).collect());
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;
    use crate::miner::{Pattern, PatternEdge, PatternSet};
    use crate::rules::build_rules;

    fn two_layer_rule() -> (MultiplexGraph, RuleSet) {
        let mut b = GraphBuilder::new(true);
        b.add_edge("1", "2", "a");
        b.add_layer("b");
        let g = b.build();
        let single = Pattern::new(true, vec![0, 0], vec![PatternEdge::new(0, 1, 0)]).unwrap().with_support(4);
        let both = Pattern::new(true, vec![0, 0], vec![PatternEdge::new(0, 1, 0), PatternEdge::new(1, 0, 1)])
            .unwrap()
            .with_support(2);
        let set = PatternSet::new(true, vec![single, both]);
        let rules = build_rules(&set, &g);
        (g, rules)
    }

    #[test]
    fn no_rules_no_scores() {
        let (g, _) = two_layer_rule();
        let empty = RuleSet { directed: true, rules: vec![] };
        assert!(score_links(&g, &empty, Weighting::Conf).is_empty());
        assert!(score_old_new(&g, &empty, Weighting::Conf).is_empty());
    }

    #[test]
    fn reciprocal_rule_scores_reverse_edge() {
        let (g, mut rules) = two_layer_rule();
        // keep only the rule predicting the layer-b edge
        rules.rules.retain(|r| r.delta_edge.layer == 1);
        assert_eq!(rules.len(), 1);
        let v = g.vocab();
        let key = Edge::new(v.node_id("2").unwrap(), v.node_id("1").unwrap(), 1);
        let conf = score_links(&g, &rules, Weighting::Conf);
        assert_eq!(conf.len(), 1);
        assert_eq!(conf.get(key), Some(0.5));
        let count = score_links(&g, &rules, Weighting::Count);
        assert_eq!(count.get(key), Some(1.0));
    }

    #[test]
    fn weighting_parses() {
        for w in Weighting::ALL {
            assert_eq!(w.to_string().parse::<Weighting>().unwrap(), w);
        }
        assert!(matches!("votes".parse::<Weighting>(), Err(Error::Usage(_))));
    }

    #[test]
    fn old_new_anchor() {
        let mut b = GraphBuilder::new(true);
        b.add_edge("7", "8", "a");
        let g = b.build();
        let single = Pattern::new(true, vec![0, 0], vec![PatternEdge::new(0, 1, 0)]).unwrap().with_support(3);
        let path = Pattern::new(true, vec![0, 0, 0], vec![PatternEdge::new(0, 1, 0), PatternEdge::new(1, 2, 0)])
            .unwrap()
            .with_support(2);
        let rules = build_rules(&PatternSet::new(true, vec![single, path]), &g);
        let t = score_old_new(&g, &rules, Weighting::Count);
        let seven = g.vocab().node_id("7").unwrap();
        let eight = g.vocab().node_id("8").unwrap();
        // path extends forward from 8 or backward into 7
        assert_eq!(t.len(), 2);
        assert_eq!(t.score(OldNewKey { node: eight, layer: 0, direction: Direction::Out }), 1.0);
        assert_eq!(t.score(OldNewKey { node: seven, layer: 0, direction: Direction::In }), 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let (g, rules) = two_layer_rule();
        let t = score_links(&g, &rules, Weighting::Conf);
        let back = ScoreTable::from_csv(&t.to_csv(g.vocab()), true, "conf", g.vocab()).unwrap();
        assert_eq!(back, t);
    }
}
