use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::eval::auc;
use crate::graph::Edge;
use crate::predictor::ScoreTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    /// Equal-weight sum of z-scores.
    Base,
    /// Weights tuned by simulated annealing against the truth set.
    Over,
}

impl fmt::Display for EnsembleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleMode::Base => "base",
            EnsembleMode::Over => "over",
        })
    }
}

impl FromStr for EnsembleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(EnsembleMode::Base),
            "over" => Ok(EnsembleMode::Over),
            _ => Err(Error::Usage(format!("unknown ensemble mode `{s}` (base, over)"))),
        }
    }
}

const T_START: f64 = 1.0;
const T_END: f64 = 1e-3;
const COOLING: f64 = 0.95;
const PROPOSALS_PER_T: usize = 20;
const STEP: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub table: ScoreTable,
    pub weights: Vec<f64>,
    /// AUC of the combined scores on the truth set.
    pub auc: f64,
}

/// Scores of `table` over `candidates`, z-normalized; absent candidates count
/// as 0 before normalization.
fn z_scores(table: &ScoreTable, candidates: &[Edge]) -> Vec<f64> {
    let raw: Vec<f64> = candidates.iter().map(|&c| table.score(c)).collect();
    let n = raw.len() as f64;
    let mean = raw.iter().sum::<f64>() / n;
    let var = raw.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if var <= 0.0 || !var.is_finite() {
        return vec![0.0; raw.len()];
    }
    let sd = var.sqrt();
    raw.iter().map(|x| (x - mean) / sd).collect()
}

fn combine(z: &[Vec<f64>], w: &[f64], out: &mut [f64]) {
    out.fill(0.0);
    for (zi, &wi) in z.iter().zip(w) {
        for (o, x) in out.iter_mut().zip(zi) {
            *o += wi * x;
        }
    }
}

/// Combines `tables` over `candidates`. `truth` holds the positive
/// candidates and drives the annealing in [`EnsembleMode::Over`].
pub fn ensemble(
    tables: &[ScoreTable],
    candidates: &[Edge],
    truth: &HashSet<Edge>,
    mode: EnsembleMode,
    seed: u64,
) -> Result<EnsembleResult> {
    if tables.len() < 2 {
        return Err(Error::Config("an ensemble needs at least two score tables".into()));
    }
    if candidates.is_empty() {
        return Err(Error::Evaluation("no candidates to combine".into()));
    }
    let directed = tables[0].directed;
    let z: Vec<Vec<f64>> = tables.iter().map(|t| z_scores(t, candidates)).collect();
    let labels: Vec<bool> = candidates.iter().map(|c| truth.contains(c)).collect();
    let mut combined = vec![0.0; candidates.len()];

    let mut weights = vec![1.0; tables.len()];
    combine(&z, &weights, &mut combined);
    let mut current = auc(&combined, &labels)?;

    if mode == EnsembleMode::Over {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let step = Normal::new(0.0, STEP).expect("valid step");
        let mut best = (current, weights.clone());
        let mut t = T_START;
        while t >= T_END {
            for _ in 0..PROPOSALS_PER_T {
                let i = rng.gen_range(0..weights.len());
                let mut proposal = weights.clone();
                proposal[i] += step.sample(&mut rng);
                combine(&z, &proposal, &mut combined);
                let a = auc(&combined, &labels)?;
                if a >= current || rng.gen::<f64>() < ((a - current) / t).exp() {
                    weights = proposal;
                    current = a;
                    if a > best.0 {
                        best = (a, weights.clone());
                    }
                }
            }
            t *= COOLING;
        }
        current = best.0;
        weights = best.1;
        combine(&z, &weights, &mut combined);
    }

    let tag = format!("ensemble-{mode}");
    let table = ScoreTable::from_scores(directed, tag, candidates.iter().copied().zip(combined.iter().copied()));
    Ok(EnsembleResult {
        table,
        weights,
        auc: current,
    })
}
