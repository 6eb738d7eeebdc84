use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{load_graph_pair, Edge, EdgeFormat, MultiplexGraph};

/// A training graph and the links that appear after it.
#[derive(Debug, Clone)]
pub struct EvalSplit {
    pub train: MultiplexGraph,
    /// Test links between two training nodes, as link keys.
    pub test_positives: BTreeSet<Edge>,
    /// Test links with exactly one training endpoint.
    pub old_new: Vec<Edge>,
    /// Test links with no training endpoint.
    pub new_new: Vec<Edge>,
    pub fold: usize,
    pub seed: u64,
}

impl EvalSplit {
    /// Split between two snapshots over a shared vocabulary.
    pub fn from_snapshots(train: MultiplexGraph, test: &MultiplexGraph) -> Self {
        EvalSplit::from_test_links(train, test.links().collect::<Vec<_>>(), 0, 0)
    }

    fn from_test_links(train: MultiplexGraph, test: impl IntoIterator<Item = Edge>, fold: usize, seed: u64) -> Self {
        let mut split = EvalSplit {
            train,
            test_positives: BTreeSet::new(),
            old_new: Vec::new(),
            new_new: Vec::new(),
            fold,
            seed,
        };
        for e in test {
            let e = split.train.link_key(e);
            if split.train.contains(e) {
                continue;
            }
            match (split.train.contains_node(e.src), split.train.contains_node(e.dst)) {
                (true, true) => {
                    split.test_positives.insert(e);
                }
                (false, false) => split.new_new.push(e),
                _ => split.old_new.push(e),
            }
        }
        split.old_new.sort_unstable();
        split.old_new.dedup();
        split.new_new.sort_unstable();
        split.new_new.dedup();
        split
    }
}

/// Partitions the links of `g` uniformly at random into `folds` parts; split
/// `i` tests on part `i` and trains on the rest. The training graph's nodes
/// are the endpoints of its edges.
pub fn split_random(g: &MultiplexGraph, folds: usize, seed: u64) -> Result<Vec<EvalSplit>> {
    if folds < 2 {
        return Err(Error::Config("at least two folds are needed".into()));
    }
    let mut links: Vec<Edge> = g.links().collect();
    if links.len() < folds {
        return Err(Error::Config(format!("{} edges cannot fill {folds} folds", links.len())));
    }
    links.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let m = links.len();
    Ok((0..folds)
        .map(|i| {
            let (lo, hi) = (i * m / folds, (i + 1) * m / folds);
            let train = g.with_edges(links[..lo].iter().chain(&links[hi..]).copied());
            EvalSplit::from_test_links(train, links[lo..hi].iter().copied(), i, seed)
        })
        .collect())
}

/// A split between two snapshots: links of the second file missing from the
/// first are the test links.
pub fn load_temporal(
    train_path: &Path,
    test_path: &Path,
    attr_path: Option<&Path>,
    directed: bool,
    format: EdgeFormat,
) -> Result<EvalSplit> {
    let (train, test, _) = load_graph_pair(train_path, test_path, attr_path, directed, format)?;
    Ok(EvalSplit::from_snapshots(train, &test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeMode {
    /// Every absent old-node link.
    Full,
    /// `k` distinct absent old-node links drawn uniformly.
    Sampled { k: usize, seed: u64 },
}

impl fmt::Display for NegativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegativeMode::Full => f.write_str("full"),
            NegativeMode::Sampled { k, .. } => write!(f, "sampled:{k}"),
        }
    }
}

impl FromStr for NegativeMode {
    type Err = Error;

    /// `full` or `sampled:K`; the sampling seed starts at 0.
    fn from_str(s: &str) -> Result<Self> {
        if s == "full" {
            return Ok(NegativeMode::Full);
        }
        s.strip_prefix("sampled:")
            .and_then(|k| k.parse().ok())
            .map(|k| NegativeMode::Sampled { k, seed: 0 })
            .ok_or_else(|| Error::Usage(format!("bad negative mode `{s}` (full or sampled:K)")))
    }
}

fn is_negative(split: &EvalSplit, e: Edge) -> bool {
    !split.train.contains(e) && !split.test_positives.contains(&e)
}

fn population(split: &EvalSplit) -> usize {
    let g = &split.train;
    let n = g.node_count();
    let mut pairs = n * n.saturating_sub(1);
    if !g.is_directed() {
        pairs /= 2;
    }
    pairs * g.layer_count() - g.edge_count() - split.test_positives.len()
}

fn all_negatives(split: &EvalSplit) -> Vec<Edge> {
    let g = &split.train;
    let mut out = Vec::new();
    for l in g.layers() {
        for &u in g.nodes() {
            for &v in g.nodes() {
                if u == v || (!g.is_directed() && v < u) {
                    continue;
                }
                let e = Edge::new(u, v, l);
                if is_negative(split, e) {
                    out.push(e);
                }
            }
        }
    }
    out
}

/// Negative candidates over training nodes, sorted.
pub fn candidates(split: &EvalSplit, mode: NegativeMode) -> Vec<Edge> {
    match mode {
        NegativeMode::Full => all_negatives(split),
        NegativeMode::Sampled { k, seed } => {
            let pop = population(split);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if k >= pop {
                if k > pop {
                    warn!("requested {k} negatives but only {pop} exist; using all");
                }
                return all_negatives(split);
            }
            if 2 * k > pop {
                let mut all = all_negatives(split);
                all.shuffle(&mut rng);
                all.truncate(k);
                all.sort_unstable();
                return all;
            }
            let g = &split.train;
            let nodes = g.nodes();
            let mut chosen: HashSet<Edge> = HashSet::with_capacity(k);
            while chosen.len() < k {
                let l = rng.gen_range(0..g.layer_count() as u32);
                let u = nodes[rng.gen_range(0..nodes.len())];
                let v = nodes[rng.gen_range(0..nodes.len())];
                if u == v {
                    continue;
                }
                let e = g.link_key(Edge::new(u, v, l));
                if is_negative(split, e) {
                    chosen.insert(e);
                }
            }
            let mut out: Vec<Edge> = chosen.into_iter().collect();
            out.sort_unstable();
            out
        }
    }
}
