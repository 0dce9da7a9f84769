use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DEFAULT_MAX_NODES;

/// Width of the expanded adjacency vector fed to the first layer (two 64-bit words).
pub const INPUT_DIM: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub num_layers: usize,
    pub hidden_size: usize,
    pub input_dim: usize,
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    /// Full-size model: three layers of 1024 units.
    fn default() -> Self {
        ModelConfig { num_layers: 3, hidden_size: 1024, input_dim: INPUT_DIM, max_nodes: DEFAULT_MAX_NODES, seed: 0 }
    }
}

impl ModelConfig {
    /// Desk-scale profile: same depth, 128 units, trainable on one CPU core.
    pub fn desk() -> Self {
        ModelConfig { hidden_size: 128, ..Default::default() }
    }

    pub fn tiny(hidden_size: usize, seed: u64) -> Self {
        ModelConfig { hidden_size, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_layers == 0 {
            return Err(Error::InvalidParameter("num_layers must be at least 1".into()));
        }
        if self.hidden_size == 0 {
            return Err(Error::InvalidParameter("hidden_size must be at least 1".into()));
        }
        if self.input_dim != INPUT_DIM {
            return Err(Error::InvalidParameter(format!("input_dim must be {INPUT_DIM}")));
        }
        if self.max_nodes == 0 || self.max_nodes > INPUT_DIM {
            return Err(Error::InvalidParameter(format!("max_nodes must be in 1..={INPUT_DIM}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Global gradient-norm clip; non-positive disables clipping.
    pub clip_norm: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            learning_rate: 1e-3,
            batch_size: 32,
            clip_norm: 5.0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Desk-scale schedule: 50 epochs with smaller batches and a larger step than the
    /// full-size default, tuned for the 128-unit model.
    pub fn desk() -> Self {
        TrainConfig { epochs: 50, learning_rate: 2e-3, batch_size: 16, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidParameter("epochs must be at least 1".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidParameter("learning rate must be finite and non-negative".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidParameter("batch_size must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidParameter("moment coefficients must lie in [0, 1)".into()));
        }
        Ok(())
    }
}
