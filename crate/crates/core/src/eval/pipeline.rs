//! Per-fold scoring for every predictor, shared by the CLI and tests.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::baselines::{classical_scores, ensemble, sharma_scores, Classical, EnsembleMode};
use crate::error::{Error, Result};
use crate::graph::{collapse, Edge, LayerId, MultiplexGraph};
use crate::miner::{mine, MinerConfig, DEFAULT_BUDGET};
use crate::predictor::{score_links, score_old_new, OldNewScoreTable, ScoreTable, Weighting};
use crate::rules::{build_rules, RuleSet};

use super::EvalSplit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predictor {
    Magma,
    Sharma,
    Classical(Classical),
    Ensemble(EnsembleMode),
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predictor::Magma => f.write_str("magma"),
            Predictor::Sharma => f.write_str("sharma"),
            Predictor::Classical(c) => write!(f, "{c}"),
            Predictor::Ensemble(m) => write!(f, "ensemble-{m}"),
        }
    }
}

impl FromStr for Predictor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "magma" => Ok(Predictor::Magma),
            "sharma" => Ok(Predictor::Sharma),
            _ => {
                if let Some(m) = s.strip_prefix("ensemble-") {
                    return m.parse().map(Predictor::Ensemble);
                }
                s.parse().map(Predictor::Classical).map_err(|_| {
                    Error::Usage(format!(
                        "unknown predictor `{s}` (magma, sharma, cn, aa, ra, pa, ja, ensemble-base, ensemble-over)"
                    ))
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    /// σ; `None` picks the node count of the smallest layer of each training graph.
    pub support: Option<usize>,
    pub max_size: usize,
    pub budget: u64,
    pub weighting: Weighting,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            support: None,
            max_size: 4,
            budget: DEFAULT_BUDGET,
            weighting: Weighting::Conf,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn miner_config(&self, g: &MultiplexGraph) -> Result<MinerConfig> {
        let sigma = match self.support {
            Some(s) => s,
            None => g
                .smallest_layer_size()
                .ok_or_else(|| Error::Config("graph has no non-empty layer".into()))?,
        };
        Ok(MinerConfig::new(sigma, self.max_size)?.with_budget(self.budget))
    }

    pub fn rules(&self, g: &MultiplexGraph) -> Result<RuleSet> {
        let patterns = mine(g, &self.miner_config(g)?)?;
        Ok(build_rules(&patterns, g))
    }
}

/// A single-layer classical score table copied onto every layer of `g`.
pub fn classical_multiplex(g: &MultiplexGraph, method: Classical) -> ScoreTable {
    let layers: Vec<LayerId> = g.layers().collect();
    classical_scores(&collapse(g), method, 0).broadcast(&layers)
}

/// The non-ensemble predictors' tables on `g`, MAGMA first.
pub fn individual_tables(g: &MultiplexGraph, cfg: &PipelineConfig) -> Result<Vec<ScoreTable>> {
    let mut out = vec![score_links(g, &cfg.rules(g)?, cfg.weighting), sharma_scores(g)];
    out.extend(Classical::ALL.iter().map(|&m| classical_multiplex(g, m)));
    Ok(out)
}

/// Scores the split's training graph with `predictor`. Ensembles combine every
/// individual predictor over the positives plus `negatives`; the `over` mode
/// tunes its weights on the split's own test links.
pub fn score_split(
    predictor: Predictor,
    split: &EvalSplit,
    negatives: &[Edge],
    cfg: &PipelineConfig,
) -> Result<ScoreTable> {
    let g = &split.train;
    Ok(match predictor {
        Predictor::Magma => score_links(g, &cfg.rules(g)?, cfg.weighting),
        Predictor::Sharma => sharma_scores(g),
        Predictor::Classical(m) => classical_multiplex(g, m),
        Predictor::Ensemble(mode) => {
            let tables = individual_tables(g, cfg)?;
            let mut cands: Vec<Edge> = split.test_positives.iter().copied().collect();
            cands.extend_from_slice(negatives);
            let truth: HashSet<Edge> = split.test_positives.iter().copied().collect();
            ensemble(&tables, &cands, &truth, mode, cfg.seed)?.table
        }
    })
}

pub fn score_split_old_new(split: &EvalSplit, cfg: &PipelineConfig) -> Result<OldNewScoreTable> {
    let g = &split.train;
    Ok(score_old_new(g, &cfg.rules(g)?, cfg.weighting))
}
