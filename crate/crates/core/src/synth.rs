//! Synthetic multiplex benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, MultiplexGraph};

/// Planted-partition layers over nested node sets: layer `i` lives on nodes
/// `1..=layer_sizes[i]`, split into equal contiguous communities.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub layer_sizes: Vec<usize>,
    /// Communities per layer; a single entry applies to every layer.
    pub communities: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            layer_sizes: vec![200, 150, 100, 50],
            communities: vec![8, 6, 4, 2],
            p_in: 0.15,
            p_out: 0.005,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.is_empty() || self.layer_sizes.contains(&0) {
            return Err(Error::Config("layer sizes must be positive".into()));
        }
        if self.layer_sizes.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Config("layer sizes must be non-increasing".into()));
        }
        if self.communities.len() != 1 && self.communities.len() != self.layer_sizes.len() {
            return Err(Error::Config("give one community count or one per layer".into()));
        }
        for (i, &size) in self.layer_sizes.iter().enumerate() {
            let c = self.communities_of(i);
            if c == 0 || c > size {
                return Err(Error::Config(format!("layer {} cannot hold {c} communities", i + 1)));
            }
        }
        for p in [self.p_in, self.p_out] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("probability {p} outside [0, 1]")));
            }
        }
        if self.p_in <= self.p_out {
            return Err(Error::Config("intra-community probability must exceed inter".into()));
        }
        Ok(())
    }

    pub fn communities_of(&self, layer: usize) -> usize {
        if self.communities.len() == 1 {
            self.communities[0]
        } else {
            self.communities[layer]
        }
    }

    /// Name of layer `i` in generated graphs.
    pub fn layer_name(i: usize) -> String {
        format!("l{}", i + 1)
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<MultiplexGraph> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut b = GraphBuilder::new(false);
    for u in 1..=cfg.layer_sizes[0] {
        b.add_node(&u.to_string());
    }
    for (i, &size) in cfg.layer_sizes.iter().enumerate() {
        let layer = SynthConfig::layer_name(i);
        b.add_layer(&layer);
        let c = cfg.communities_of(i);
        let community = |k: usize| k * c / size;
        for u in 0..size {
            for v in u + 1..size {
                let p = if community(u) == community(v) { cfg.p_in } else { cfg.p_out };
                if rng.gen::<f64>() < p {
                    b.add_edge(&(u + 1).to_string(), &(v + 1).to_string(), &layer);
                }
            }
        }
    }
    Ok(b.build())
}

/// Two snapshots of a growing network. Layer `x` is a random graph over old
/// nodes; layer `y` links attribute-`A` nodes to leaf nodes. Between the
/// snapshots `A` nodes tend to gain `y` links to new nodes; other nodes
/// rarely do.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthConfig {
    pub old_nodes: usize,
    /// Fraction of old nodes carrying attribute `A`.
    pub a_fraction: f64,
    pub p_x: f64,
    /// `y` links from each `A` node to fresh leaves in the first snapshot.
    pub leaves_per_a: usize,
    /// Chance an `A` node gains a `y` link to a new node.
    pub p_gain_a: f64,
    /// Chance any other old node gains one.
    pub p_gain_other: f64,
    pub seed: u64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            old_nodes: 60,
            a_fraction: 0.3,
            p_x: 0.03,
            leaves_per_a: 3,
            p_gain_a: 0.7,
            p_gain_other: 0.1,
            seed: 1,
        }
    }
}

/// Returns `(train, test)` over one vocabulary; `test` contains `train`.
pub fn generate_growth(cfg: &GrowthConfig) -> Result<(MultiplexGraph, MultiplexGraph)> {
    for p in [cfg.a_fraction, cfg.p_x, cfg.p_gain_a, cfg.p_gain_other] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("probability {p} outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.old_nodes;
    let is_a: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < cfg.a_fraction).collect();
    let name = |u: usize| format!("o{u}");
    let mut edges: Vec<(String, String, &str)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < cfg.p_x {
                edges.push((name(u), name(v), "x"));
            }
        }
    }
    let mut leaf = 0;
    for u in (0..n).filter(|&u| is_a[u]) {
        for _ in 0..cfg.leaves_per_a {
            edges.push((name(u), format!("f{leaf}"), "y"));
            leaf += 1;
        }
    }
    let mut grown = edges.clone();
    let mut fresh = 0;
    for (u, &a) in is_a.iter().enumerate() {
        let p = if a { cfg.p_gain_a } else { cfg.p_gain_other };
        if rng.gen::<f64>() < p {
            grown.push((name(u), format!("n{fresh}"), "y"));
            fresh += 1;
        }
    }

    let build = |edges: &[(String, String, &str)]| {
        let mut b = GraphBuilder::new(false);
        b.add_layer("x").add_layer("y");
        for (s, d, l) in edges {
            b.add_edge(s, d, l);
        }
        for (u, &a) in is_a.iter().enumerate().take(n) {
            b.add_node(&name(u));
            b.set_attr(&name(u), if a { "A" } else { "B" });
        }
        b
    };
    let mut graphs = GraphBuilder::build_all(vec![build(&edges), build(&grown)]).into_iter();
    let train = graphs.next().expect("two graphs");
    let test = graphs.next().expect("two graphs");
    Ok((train, test))
}
