//! Reference link predictors: layer co-occurrence, the classical
//! neighbourhood scores and a z-score ensemble.

mod classical;
mod ensemble;
mod sharma;

pub use classical::{classical_scores, Classical};
pub use ensemble::{ensemble, EnsembleMode, EnsembleResult};
pub use sharma::{layer_cooccurrence, sharma_scores, LayerCooccurrence};
