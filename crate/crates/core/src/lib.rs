//! Multiplex graph association rules.
//!
//! The pipeline mines frequent multiplex subgraph patterns under
//! minimum-image support ([`miner`]), turns pairs of patterns that differ by
//! one edge into association rules ([`rules`]), and applies those rules to a
//! training graph to score unobserved typed links ([`predictor`]).
//! [`baselines`] and [`eval`] provide the reference predictors and the
//! ROC/AUC harness used to compare them; [`synth`] generates planted
//! benchmarks.

pub mod baselines;
pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod miner;
pub mod predictor;
pub mod rules;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{Edge, LayerId, MultiplexGraph, NodeId};
pub use miner::{MinerConfig, Pattern, PatternSet};
pub use predictor::{ScoreTable, Weighting};
pub use rules::{Rule, RuleSet};
