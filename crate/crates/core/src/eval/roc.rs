use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores at or above this value are called positive.
    pub threshold: f64,
}

/// ROC curve over distinct score thresholds, descending, with tied scores
/// grouped into one step; and its trapezoidal area.
pub fn roc(scores: &[f64], labels: &[bool]) -> Result<(Vec<RocPoint>, f64)> {
    assert_eq!(scores.len(), labels.len());
    let p = labels.iter().filter(|&&y| y).count();
    let n = labels.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::Evaluation(format!(
            "AUC needs positives and negatives, got {p} and {n}"
        )));
    }
    if let Some(x) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::Evaluation(format!("score {x} is not a number")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut area = 0.0;
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == t {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        area += (fp - fp0) as f64 * (tp + tp0) as f64 / 2.0;
        points.push(RocPoint {
            fpr: fp as f64 / n as f64,
            tpr: tp as f64 / p as f64,
            threshold: t,
        });
    }
    Ok((points, area / (p as f64 * n as f64)))
}

pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    roc(scores, labels).map(|(_, a)| a)
}

pub fn roc_csv(points: &[RocPoint]) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.fpr, p.tpr, p.threshold));
    }
    out
}

/// Per-fold AUCs, their mean, and the AUC of all folds' candidates pooled.
#[derive(Debug, Clone, Serialize)]
pub struct FoldSummary {
    pub predictor: String,
    pub per_fold: Vec<f64>,
    pub mean: f64,
    pub pooled: f64,
}

impl FoldSummary {
    pub fn new(predictor: impl Into<String>, per_fold: Vec<f64>, pooled_scores: &[f64], pooled_labels: &[bool]) -> Result<Self> {
        let mean = per_fold.iter().sum::<f64>() / per_fold.len() as f64;
        Ok(FoldSummary {
            predictor: predictor.into(),
            per_fold,
            mean,
            pooled: auc(pooled_scores, pooled_labels)?,
        })
    }
}

/// Kendall's tau-b between paired observations.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (mut concordant, mut discordant, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i].total_cmp(&x[j]) as i64;
            let dy = y[i].total_cmp(&y[j]) as i64;
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => tie_x += 1,
                (_, 0) => tie_y += 1,
                _ if dx == dy => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let denom = (((concordant + discordant + tie_x) * (concordant + discordant + tie_y)) as f64).sqrt();
    if denom == 0.0 {
        return f64::NAN;
    }
    (concordant - discordant) as f64 / denom
}
