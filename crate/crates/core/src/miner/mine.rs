use std::collections::{BTreeMap, HashMap, HashSet};

use log::debug;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{AttrId, LayerId, MultiplexGraph};

use super::embed::{self, Budget, SupportCount};
use super::pattern::{Code, Pattern, PatternEdge};

/// Default per-pattern search budget, in partial states.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinerConfig {
    /// Minimum-image support threshold σ.
    pub min_support: usize,
    /// Largest pattern size s, in nodes.
    pub max_nodes: usize,
    /// Per-pattern embedding search budget.
    pub budget: u64,
}

impl MinerConfig {
    pub fn new(min_support: usize, max_nodes: usize) -> Result<Self> {
        let cfg = MinerConfig {
            min_support,
            max_nodes,
            budget: DEFAULT_BUDGET,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_support < 1 {
            return Err(Error::Config("minimum support must be at least 1".into()));
        }
        if self.max_nodes < 2 {
            return Err(Error::Config("maximum pattern size must be at least 2".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("search budget must be positive".into()));
        }
        Ok(())
    }
}

/// Frequent patterns, sorted by code.
#[derive(Debug, Clone)]
pub struct PatternSet {
    pub directed: bool,
    pub patterns: Vec<Pattern>,
}

impl PatternSet {
    pub fn new(directed: bool, mut patterns: Vec<Pattern>) -> Self {
        patterns.sort_by(|a, b| a.code().cmp(b.code()));
        patterns.dedup_by(|a, b| a.code() == b.code());
        PatternSet { directed, patterns }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Pattern> {
        self.patterns.iter()
    }

    pub fn get(&self, code: &Code) -> Option<&Pattern> {
        self.patterns
            .binary_search_by(|p| p.code().cmp(code))
            .ok()
            .map(|i| &self.patterns[i])
    }
}

/// Counters from one mining run.
#[derive(Debug, Clone, Default)]
pub struct MineStats {
    /// Per level (edge count): candidates whose support was counted.
    pub counted: Vec<usize>,
    /// Per level: frequent patterns found.
    pub frequent: Vec<usize>,
    /// Candidates rejected because some sub-pattern is infrequent.
    pub apriori_pruned: usize,
}

/// Frequent single-edge types: `(source attr, target attr, layer)`; for
/// undirected graphs both orientations are stored.
struct EdgeTypes {
    set: HashSet<(AttrId, AttrId, LayerId)>,
    from: HashMap<AttrId, Vec<(AttrId, LayerId, bool)>>,
}

impl EdgeTypes {
    fn new(frequent: &[Pattern], directed: bool) -> Self {
        let mut set = HashSet::new();
        for p in frequent {
            let e = p.edges()[0];
            let (a, b) = (p.attr(e.src), p.attr(e.dst));
            set.insert((a, b, e.layer));
            if !directed {
                set.insert((b, a, e.layer));
            }
        }
        let mut from: HashMap<AttrId, Vec<(AttrId, LayerId, bool)>> = HashMap::new();
        for &(a, b, l) in &set {
            from.entry(a).or_default().push((b, l, true));
            if directed {
                from.entry(b).or_default().push((a, l, false));
            }
        }
        for v in from.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        EdgeTypes { set, from }
    }

    fn allows(&self, a: AttrId, b: AttrId, l: LayerId) -> bool {
        self.set.contains(&(a, b, l))
    }
}

fn single_edge_patterns(g: &MultiplexGraph) -> Vec<Pattern> {
    let directed = g.is_directed();
    let mut types = std::collections::BTreeSet::new();
    for e in g.links() {
        let (a, b) = (g.attr(e.src), g.attr(e.dst));
        let key = if directed || a <= b { (a, b, e.layer) } else { (b, a, e.layer) };
        types.insert(key);
    }
    types
        .into_iter()
        .map(|(a, b, l)| Pattern::canonical(directed, &[a, b], &[PatternEdge::new(0, 1, l)]).0)
        .collect()
}

fn children(p: &Pattern, types: &EdgeTypes, n_layers: usize, max_nodes: usize) -> Vec<Pattern> {
    let directed = p.is_directed();
    let n = p.node_count();
    let mut out = Vec::new();
    let mut push = |attrs: &[AttrId], extra: PatternEdge| {
        let mut edges = p.edges().to_vec();
        edges.push(extra);
        out.push(Pattern::canonical(directed, attrs, &edges).0);
    };
    for i in 0..n {
        for j in 0..n {
            if i == j || (!directed && j < i) {
                continue;
            }
            for l in 0..n_layers as LayerId {
                let e = PatternEdge::new(i, j, l);
                if !p.has_edge(e) && types.allows(p.attr(i), p.attr(j), l) {
                    push(p.attrs(), e);
                }
            }
        }
    }
    if n < max_nodes {
        let mut attrs = p.attrs().to_vec();
        attrs.push(0);
        for i in 0..n {
            let Some(options) = types.from.get(&p.attr(i)) else {
                continue;
            };
            for &(other, l, outgoing) in options {
                attrs[n] = other;
                let e = if outgoing {
                    PatternEdge::new(i, n, l)
                } else {
                    PatternEdge::new(n, i, l)
                };
                push(&attrs, e);
            }
        }
    }
    out
}

/// Every connected one-edge-smaller sub-pattern of `p` is frequent, and `p`'s
/// support cannot exceed theirs. Returns the smallest parent support, or
/// `None` when some sub-pattern is missing.
fn parents_frequent(p: &Pattern, previous: &HashMap<Code, usize>) -> Option<usize> {
    let mut bound = usize::MAX;
    for i in 0..p.edges().len() {
        if let Some((sub, _)) = p.without_edge(i) {
            bound = bound.min(*previous.get(sub.code())?);
        }
    }
    Some(bound)
}

fn count_supports(
    candidates: Vec<Pattern>,
    g: &MultiplexGraph,
    cfg: &MinerConfig,
) -> Result<Vec<Pattern>> {
    let counted: Vec<Result<Option<Pattern>>> = candidates
        .into_par_iter()
        .map(|p| {
            let mut budget = Budget::new(cfg.budget);
            match embed::support(&p, g, Some(cfg.min_support), &mut budget)? {
                SupportCount::Exact(s) if s >= cfg.min_support => Ok(Some(p.with_support(s))),
                _ => Ok(None),
            }
        })
        .collect();
    let mut out = Vec::new();
    for r in counted {
        if let Some(p) = r? {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.code().cmp(b.code()));
    Ok(out)
}

/// All connected patterns of 2..=s nodes whose minimum-image support is at
/// least σ, each once.
pub fn mine(g: &MultiplexGraph, cfg: &MinerConfig) -> Result<PatternSet> {
    mine_with_stats(g, cfg).map(|(set, _)| set)
}

pub fn mine_with_stats(g: &MultiplexGraph, cfg: &MinerConfig) -> Result<(PatternSet, MineStats)> {
    cfg.validate()?;
    let directed = g.is_directed();
    let mut stats = MineStats::default();

    let first = single_edge_patterns(g);
    stats.counted.push(first.len());
    let mut level = count_supports(first, g, cfg)?;
    stats.frequent.push(level.len());
    let types = EdgeTypes::new(&level, directed);
    let mut all: Vec<Pattern> = level.clone();

    while !level.is_empty() {
        let previous: HashMap<Code, usize> =
            level.iter().map(|p| (p.code().clone(), p.support())).collect();
        let generated: Vec<Vec<Pattern>> = level
            .par_iter()
            .map(|p| children(p, &types, g.layer_count(), cfg.max_nodes))
            .collect();
        let mut unique: BTreeMap<Code, Pattern> = BTreeMap::new();
        for p in generated.into_iter().flatten() {
            unique.entry(p.code().clone()).or_insert(p);
        }
        let before = unique.len();
        let bounds: Vec<(Pattern, usize)> = unique
            .into_values()
            .filter_map(|p| parents_frequent(&p, &previous).map(|b| (p, b)))
            .collect();
        stats.apriori_pruned += before - bounds.len();
        stats.counted.push(bounds.len());

        let bound_of: HashMap<Code, usize> =
            bounds.iter().map(|(p, b)| (p.code().clone(), *b)).collect();
        level = count_supports(bounds.into_iter().map(|(p, _)| p).collect(), g, cfg)?;
        for p in &level {
            debug_assert!(
                p.support() <= bound_of[p.code()],
                "anti-monotonicity violated by {}",
                p.code_string(g.vocab())
            );
        }
        debug!(
            "level {}: {} counted, {} frequent",
            stats.counted.len(),
            stats.counted.last().unwrap(),
            level.len()
        );
        stats.frequent.push(level.len());
        all.extend(level.iter().cloned());
    }
    if stats.frequent.last() == Some(&0) {
        stats.frequent.pop();
        stats.counted.pop();
    }
    Ok((PatternSet::new(directed, all), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    #[test]
    fn single_edge_host() {
        let mut b = GraphBuilder::new(true);
        b.add_edge("1", "2", "a");
        let g = b.build();
        let set = mine(&g, &MinerConfig::new(1, 4).unwrap()).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.patterns[0].support(), 1);
        assert_eq!(set.patterns[0].code_string(g.vocab()), "d|·,·|0>1:a");
    }

    #[test]
    fn support_above_node_count_finds_nothing() {
        let mut b = GraphBuilder::new(false);
        for (s, d) in [("1", "2"), ("2", "3"), ("3", "1"), ("3", "4")] {
            b.add_edge(s, d, "a");
        }
        let g = b.build();
        let set = mine(&g, &MinerConfig::new(g.node_count() + 1, 4).unwrap()).unwrap();
        assert!(set.is_empty());
    }

    #[test]
    fn triangle_with_tail() {
        let mut b = GraphBuilder::new(false);
        for (s, d) in [("1", "2"), ("2", "3"), ("3", "1"), ("3", "4")] {
            b.add_edge(s, d, "a");
        }
        let g = b.build();
        let set = mine(&g, &MinerConfig::new(1, 3).unwrap()).unwrap();
        // edge, 2-path, triangle
        assert_eq!(set.len(), 3);
        let supports: Vec<usize> = set.iter().map(|p| p.support()).collect();
        assert!(supports.contains(&4));
    }

    #[test]
    fn rejects_bad_config() {
        assert!(MinerConfig::new(0, 4).is_err());
        assert!(MinerConfig::new(1, 1).is_err());
    }
}
