//! Train/test splits, negative candidates and ROC/AUC evaluation.

mod pipeline;
mod roc;
mod split;

pub use pipeline::{
    classical_multiplex, individual_tables, score_split, score_split_old_new, PipelineConfig, Predictor,
};
pub use roc::{auc, kendall_tau_b, roc, roc_csv, FoldSummary, RocPoint};
pub use split::{candidates, load_temporal, split_random, EvalSplit, NegativeMode};

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::predictor::{Direction, OldNewKey, OldNewScoreTable, ScoreTable};

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub predictor: String,
    pub fold: usize,
    pub old_new: bool,
    pub positives: usize,
    pub negatives: usize,
    pub auc: f64,
    #[serde(skip)]
    pub roc: Vec<RocPoint>,
}

/// Scores and labels of the split's old-old positives followed by
/// `negatives`; unscored candidates get 0.
pub fn labelled_scores(scores: &ScoreTable, split: &EvalSplit, negatives: &[Edge]) -> (Vec<f64>, Vec<bool>) {
    let mut s = Vec::with_capacity(split.test_positives.len() + negatives.len());
    let mut y = Vec::with_capacity(s.capacity());
    for &e in &split.test_positives {
        s.push(scores.score(e));
        y.push(true);
    }
    for &e in negatives {
        s.push(scores.score(e));
        y.push(false);
    }
    (s, y)
}

pub fn roc_auc(scores: &ScoreTable, split: &EvalSplit, negatives: &[Edge]) -> Result<EvalReport> {
    let (s, y) = labelled_scores(scores, split, negatives);
    let (points, a) = roc(&s, &y)?;
    Ok(EvalReport {
        predictor: scores.tag.clone(),
        fold: split.fold,
        old_new: false,
        positives: split.test_positives.len(),
        negatives: negatives.len(),
        auc: a,
        roc: points,
    })
}

/// Every `(old node, layer, direction)` key of the split, and the subset that
/// gained an old-new link in the test period.
pub fn old_new_keys(split: &EvalSplit) -> (Vec<OldNewKey>, BTreeSet<OldNewKey>) {
    let g = &split.train;
    let directions: &[Direction] = if g.is_directed() {
        &[Direction::Out, Direction::In]
    } else {
        &[Direction::Undirected]
    };
    let mut all = Vec::new();
    for &node in g.nodes() {
        for layer in g.layers() {
            for &direction in directions {
                all.push(OldNewKey { node, layer, direction });
            }
        }
    }
    let mut positive = BTreeSet::new();
    for e in &split.old_new {
        let (node, direction) = if g.contains_node(e.src) {
            (e.src, Direction::Out)
        } else {
            (e.dst, Direction::In)
        };
        let direction = if g.is_directed() { direction } else { Direction::Undirected };
        positive.insert(OldNewKey { node, layer: e.layer, direction });
    }
    (all, positive)
}

pub fn evaluate_old_new(scores: &OldNewScoreTable, split: &EvalSplit) -> Result<EvalReport> {
    let (all, positive) = old_new_keys(split);
    if positive.is_empty() {
        return Err(Error::Evaluation("split has no old-new test links".into()));
    }
    let s: Vec<f64> = all.iter().map(|&k| scores.score(k)).collect();
    let y: Vec<bool> = all.iter().map(|k| positive.contains(k)).collect();
    let (points, a) = roc(&s, &y)?;
    Ok(EvalReport {
        predictor: scores.tag.clone(),
        fold: split.fold,
        old_new: true,
        positives: positive.len(),
        negatives: all.len() - positive.len(),
        auc: a,
        roc: points,
    })
}
