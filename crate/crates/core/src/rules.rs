//! Graph association rules `p₁ → p₂` where `p₂` is `p₁` plus one edge.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LayerId, MultiplexGraph, Vocab};
use crate::miner::{automorphisms, Pattern, PatternEdge, PatternRecord, PatternSet, Slot};

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub antecedent: Pattern,
    pub consequent: Pattern,
    /// The edge of the consequent that the antecedent lacks, in consequent
    /// slots.
    pub delta_edge: PatternEdge,
    pub new_node: bool,
    pub confidence: f64,
    /// `None` when the delta layer has no edges in the reference graph.
    pub lift: Option<f64>,
    /// `antecedent_map[i]` is the consequent slot playing antecedent slot `i`.
    pub antecedent_map: Vec<Slot>,
}

impl Rule {
    /// The consequent slot absent from the antecedent, if any.
    pub fn new_slot(&self) -> Option<Slot> {
        if !self.new_node {
            return None;
        }
        (0..self.consequent.node_count()).find(|s| !self.antecedent_map.contains(s))
    }

    /// Inverse of `antecedent_map`; `None` for the new slot.
    pub fn consequent_to_antecedent(&self) -> Vec<Option<Slot>> {
        let mut inv = vec![None; self.consequent.node_count()];
        for (i, &s) in self.antecedent_map.iter().enumerate() {
            inv[s] = Some(i);
        }
        inv
    }

    pub fn delta_layer(&self) -> LayerId {
        self.delta_edge.layer
    }
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    pub directed: bool,
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    /// Keeps rules passing every given filter. Rules with undefined lift fail
    /// any lift filter.
    pub fn filtered(&self, filter: &RuleFilter) -> RuleSet {
        RuleSet {
            directed: self.directed,
            rules: self.rules.iter().filter(|r| filter.accepts(r)).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RuleFilter {
    pub min_confidence: Option<f64>,
    pub min_lift: Option<f64>,
    /// Rules whose antecedent or consequent uses this layer.
    pub layer: Option<LayerId>,
}

impl RuleFilter {
    pub fn accepts(&self, r: &Rule) -> bool {
        if self.min_confidence.is_some_and(|c| r.confidence < c) {
            return false;
        }
        if let Some(m) = self.min_lift {
            match r.lift {
                Some(l) if l >= m => {}
                _ => return false,
            }
        }
        if let Some(l) = self.layer {
            if !r.consequent.edges().iter().any(|e| e.layer == l) {
                return false;
            }
        }
        true
    }
}

/// Edge density of `layer` over ordered node pairs of `g` (unordered pairs
/// when undirected).
pub fn layer_density(g: &MultiplexGraph, layer: LayerId) -> f64 {
    let n = g.node_count() as f64;
    let mut pairs = n * (n - 1.0);
    if !g.is_directed() {
        pairs /= 2.0;
    }
    if pairs <= 0.0 {
        return 0.0;
    }
    g.layer_edge_count(layer) as f64 / pairs
}

/// Confidence over the delta layer's density in `g`.
pub fn rule_lift(r: &Rule, g: &MultiplexGraph) -> Option<f64> {
    lift_of(r.confidence, r.delta_edge.layer, g)
}

fn lift_of(confidence: f64, layer: LayerId, g: &MultiplexGraph) -> Option<f64> {
    if layer as usize >= g.layer_count() {
        return None;
    }
    let d = layer_density(g, layer);
    (d > 0.0).then(|| confidence / d)
}

/// Orbits of `p`'s edges under its automorphisms, as lists of edge indices;
/// the first index of each orbit is its smallest.
fn edge_orbits(p: &Pattern) -> Vec<Vec<usize>> {
    let autos = automorphisms(p.is_directed(), p.attrs(), p.edges());
    let m = p.edges().len();
    let mut rep = vec![usize::MAX; m];
    for i in 0..m {
        if rep[i] != usize::MAX {
            continue;
        }
        let e = p.edges()[i];
        for a in &autos {
            let image = PatternEdge::new(a[e.src], a[e.dst], e.layer);
            let image = if p.is_directed() || image.src < image.dst {
                image
            } else {
                PatternEdge::new(image.dst, image.src, image.layer)
            };
            let j = p.edges().binary_search(&image).expect("automorphism maps edges to edges");
            rep[j] = i;
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        if rep[i] == i {
            orbits.push((0..m).filter(|&j| rep[j] == i).collect());
        }
    }
    orbits
}

/// Every rule between patterns of `set`: one per consequent and orbit of
/// delta edges whose removal leaves a frequent connected antecedent.
pub fn build_rules(set: &PatternSet, g: &MultiplexGraph) -> RuleSet {
    let mut rules: Vec<Rule> = set
        .patterns
        .par_iter()
        .filter(|p| p.edges().len() >= 2)
        .flat_map_iter(|p2| {
            let mut out = Vec::new();
            for orbit in edge_orbits(p2) {
                let i = orbit[0];
                let Some((sub, map)) = p2.without_edge(i) else {
                    continue;
                };
                let Some(p1) = set.get(sub.code()) else {
                    continue;
                };
                let confidence = p2.support() as f64 / p1.support() as f64;
                let delta_edge = p2.edges()[i];
                out.push(Rule {
                    antecedent: p1.clone(),
                    consequent: p2.clone(),
                    delta_edge,
                    new_node: p1.node_count() < p2.node_count(),
                    confidence,
                    lift: lift_of(confidence, delta_edge.layer, g),
                    antecedent_map: map,
                });
            }
            out
        })
        .collect();
    rules.sort_by(|a, b| {
        (a.antecedent.code(), a.consequent.code(), a.delta_edge)
            .cmp(&(b.antecedent.code(), b.consequent.code(), b.delta_edge))
    });
    RuleSet {
        directed: set.directed,
        rules,
    }
}

/// On-disk form of a rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRecord {
    pub antecedent: PatternRecord,
    pub consequent: PatternRecord,
    /// `(source slot, target slot, layer)` in consequent slots.
    pub delta_edge: (usize, usize, String),
    pub new_node: bool,
    pub confidence: f64,
    pub lift: Option<f64>,
    pub antecedent_map: Vec<usize>,
}

impl RuleRecord {
    pub fn from_rule(r: &Rule, vocab: &Vocab) -> Self {
        RuleRecord {
            antecedent: PatternRecord::from_pattern(&r.antecedent, vocab),
            consequent: PatternRecord::from_pattern(&r.consequent, vocab),
            delta_edge: (
                r.delta_edge.src,
                r.delta_edge.dst,
                vocab.layer_name(r.delta_edge.layer).to_string(),
            ),
            new_node: r.new_node,
            confidence: r.confidence,
            lift: r.lift,
            antecedent_map: r.antecedent_map.clone(),
        }
    }

    pub fn to_rule(&self, directed: bool, vocab: &Vocab) -> Result<Rule> {
        let antecedent = self.antecedent.to_pattern(directed, vocab)?;
        let consequent = self.consequent.to_pattern(directed, vocab)?;
        let layer = vocab
            .layer_id(&self.delta_edge.2)
            .ok_or_else(|| Error::format("rule", format!("unknown layer `{}`", self.delta_edge.2)))?;
        let delta_edge = PatternEdge::new(self.delta_edge.0, self.delta_edge.1, layer);
        if !consequent.has_edge(delta_edge) {
            return Err(Error::format("rule", "delta edge is not an edge of the consequent"));
        }
        let idx = consequent
            .edges()
            .iter()
            .position(|&e| e == delta_edge)
            .ok_or_else(|| Error::format("rule", "delta edge must be stored in canonical orientation"))?;
        let (sub, map) = consequent
            .without_edge(idx)
            .ok_or_else(|| Error::format("rule", "consequent minus delta edge is disconnected"))?;
        if sub.code() != antecedent.code() {
            return Err(Error::format("rule", "antecedent is not the consequent minus the delta edge"));
        }
        if map.len() != self.antecedent_map.len() || self.antecedent_map.iter().any(|&s| s >= consequent.node_count()) {
            return Err(Error::format("rule", "antecedent map has the wrong shape"));
        }
        // the stored map may differ from ours by an antecedent automorphism;
        // check it is a structure-preserving embedding
        let am = &self.antecedent_map;
        let mut seen = vec![false; consequent.node_count()];
        for &s in am {
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::format("rule", "antecedent map is not injective"));
            }
        }
        for (i, &s) in am.iter().enumerate() {
            if antecedent.attr(i) != consequent.attr(s) {
                return Err(Error::format("rule", "antecedent map changes an attribute"));
            }
        }
        for e in antecedent.edges() {
            let image = PatternEdge::new(am[e.src], am[e.dst], e.layer);
            if image == delta_edge || !consequent.has_edge(image) {
                return Err(Error::format("rule", "antecedent map does not preserve edges"));
            }
        }
        let new_node = antecedent.node_count() < consequent.node_count();
        if new_node != self.new_node {
            return Err(Error::format("rule", "new_node flag disagrees with the patterns"));
        }
        Ok(Rule {
            antecedent,
            consequent,
            delta_edge,
            new_node,
            confidence: self.confidence,
            lift: self.lift,
            antecedent_map: self.antecedent_map.clone(),
        })
    }
}

pub fn rules_to_json(rules: &RuleSet, vocab: &Vocab) -> String {
    let records: Vec<RuleRecord> = rules.iter().map(|r| RuleRecord::from_rule(r, vocab)).collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}

pub fn rules_from_json(text: &str, directed: bool, vocab: &Vocab) -> Result<RuleSet> {
    let records: Vec<RuleRecord> = serde_json::from_str(text).map_err(|e| Error::format("rule", e))?;
    let rules = records
        .iter()
        .map(|r| r.to_rule(directed, vocab))
        .collect::<Result<Vec<_>>>()?;
    Ok(RuleSet { directed, rules })
}
