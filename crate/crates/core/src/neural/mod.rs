//! Stacked-LSTM color predictor.
//!
//! Node `t`'s adjacency row, expanded to 128 zero/one inputs, is the input at time
//! step `t`; a dense ReLU head on the top layer emits one real-valued color per node.

pub mod config;
pub mod gradcheck;
pub mod lstm;
pub mod params;
pub mod train;

pub use config::{ModelConfig, TrainConfig, INPUT_DIM};
pub use gradcheck::{grad_check, GradCheckReport};
pub use lstm::forward;
pub use params::{init_params, ModelParams};
pub use train::{mape_loss, train, train_with, EpochStats, Sample, TrainOutcome};

use crate::error::Result;
use crate::graph::{Coloring, Graph};

/// Rounds half away from zero and clamps into `1..=n`.
pub fn outputs_to_coloring(outputs: &[f64]) -> Coloring {
    let n = outputs.len() as f64;
    let colors = outputs
        .iter()
        .map(|&y| {
            let y = if y.is_nan() { 1.0 } else { y.round() };
            y.clamp(1.0, n) as u32
        })
        .collect();
    Coloring::from_vec_unchecked(colors)
}

pub fn predict_colors(params: &ModelParams, g: &Graph) -> Result<Coloring> {
    Ok(outputs_to_coloring(&forward(params, g)?))
}
