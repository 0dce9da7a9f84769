//! MAPE loss, Adam, and the mini-batch training loop.

use ndarray::Array1;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{ModelConfig, TrainConfig};
use super::lstm::{backward, forward_batch, Batch};
use super::params::{init_params, ModelParams};
use crate::error::{Error, Result};
use crate::gen::rng_from_seed;
use crate::graph::{apply_permutation, bfs_permutation, permute_coloring, Coloring, Graph};
use crate::io::{unpack_sample, SampleRow};

/// Mean absolute percentage error over the first `n` positions, in percent.
pub fn mape_loss(pred: &[f64], target: &[u32], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("MAPE over zero nodes".into()));
    }
    if pred.len() < n || target.len() < n {
        return Err(Error::LengthMismatch { expected: n, got: pred.len().min(target.len()) });
    }
    if target[..n].contains(&0) {
        return Err(Error::InvalidParameter("MAPE target colors must be >= 1".into()));
    }
    let sum: f64 = pred[..n].iter().zip(&target[..n]).map(|(&p, &y)| (p - y as f64).abs() / y as f64).sum();
    Ok(100.0 * sum / n as f64)
}

/// A graph with its per-node target colors.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub graph: Graph,
    pub targets: Vec<u32>,
}

impl Sample {
    pub fn new(graph: Graph, coloring: &Coloring) -> Result<Self> {
        if coloring.len() != graph.n() {
            return Err(Error::LengthMismatch { expected: graph.n(), got: coloring.len() });
        }
        Ok(Sample { graph, targets: coloring.as_slice().to_vec() })
    }

    pub fn from_row(row: &SampleRow) -> Result<Self> {
        match unpack_sample(row)? {
            (graph, Some(coloring)) => Sample::new(graph, &coloring),
            (_, None) => Err(Error::InvalidSample("inference row has no target colors".into())),
        }
    }

    /// Reorders nodes breadth-first from node 0 and renumbers the label canonically.
    pub fn bfs_reordered(&self) -> Result<Self> {
        let perm = bfs_permutation(&self.graph, 0)?;
        let coloring = Coloring::new(self.targets.clone())?;
        let graph = apply_permutation(&self.graph, &perm)?;
        Sample::new(graph, &permute_coloring(&coloring, &perm)?.canonical())
    }
}

/// Mean batch loss, per-sample losses, and `∂L/∂y` for every row of the batch.
pub(crate) fn loss_terms(outputs: &Array1<f64>, batch: &Batch, samples: &[&Sample]) -> (f64, Vec<f64>, Array1<f64>) {
    let b_sz = batch.size as f64;
    let mut d_out = Array1::zeros(outputs.len());
    let mut per_sample = Vec::with_capacity(samples.len());
    for (b, s) in samples.iter().enumerate() {
        let n = s.graph.n();
        let mut sum = 0.0;
        for (t, &y) in s.targets.iter().enumerate() {
            let r = batch.row(t, b);
            let y = y as f64;
            let diff = outputs[r] - y;
            sum += diff.abs() / y;
            let sign = if diff > 0.0 {
                1.0
            } else if diff < 0.0 {
                -1.0
            } else {
                0.0
            };
            d_out[r] = 100.0 * sign / (y * n as f64 * b_sz);
        }
        per_sample.push(100.0 * sum / n as f64);
    }
    let mean = per_sample.iter().sum::<f64>() / b_sz;
    (mean, per_sample, d_out)
}

/// Batch-mean MAPE and its gradient.
pub fn loss_and_gradients(params: &ModelParams, samples: &[&Sample]) -> Result<(f64, Vec<f64>, ModelParams)> {
    let graphs: Vec<&Graph> = samples.iter().map(|s| &s.graph).collect();
    let batch = Batch::from_graphs(&graphs, params.config.max_nodes)?;
    let state = forward_batch(params, &batch);
    let (loss, per_sample, d_out) = loss_terms(&state.outputs, &batch, samples);
    let grads = backward(params, &batch, &state, &d_out);
    Ok((loss, per_sample, grads))
}

pub fn batch_loss(params: &ModelParams, samples: &[&Sample]) -> Result<f64> {
    let graphs: Vec<&Graph> = samples.iter().map(|s| &s.graph).collect();
    let batch = Batch::from_graphs(&graphs, params.config.max_nodes)?;
    let state = forward_batch(params, &batch);
    Ok(loss_terms(&state.outputs, &batch, samples).0)
}

pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: ModelParams,
    v: ModelParams,
}

impl Adam {
    pub fn new(params: &ModelParams, cfg: &TrainConfig) -> Self {
        Adam {
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.epsilon,
            step: 0,
            m: params.zeros_like(),
            v: params.zeros_like(),
        }
    }

    pub fn update(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step);
        let bc2 = 1.0 - self.beta2.powi(self.step);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        for (((p, g), m), v) in
            params.tensors_mut().into_iter().zip(grads.tensors()).zip(self.m.tensors_mut()).zip(self.v.tensors_mut())
        {
            for k in 0..p.len() {
                m[k] = b1 * m[k] + (1.0 - b1) * g[k];
                v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                p[k] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean per-sample MAPE over the epoch, measured before each batch's update.
    pub mean_mape: f64,
    pub last_batch_mape: f64,
}

pub struct TrainOutcome {
    pub params: ModelParams,
    pub history: Vec<EpochStats>,
}

/// Length-bucketed batches: shuffle, sort windows of several batches by node count,
/// cut into batches, then shuffle the batch order. Keeps padding low without fixing
/// batch composition across epochs.
fn plan_batches(samples: &[Sample], batch_size: usize, rng: &mut impl rand::Rng) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.shuffle(rng);
    let window = batch_size * 8;
    for chunk in order.chunks_mut(window) {
        chunk.sort_by_key(|&i| samples[i].graph.n());
    }
    let mut batches: Vec<Vec<usize>> = order.chunks(batch_size).map(|c| c.to_vec()).collect();
    batches.shuffle(rng);
    batches
}

pub fn train(cfg: &TrainConfig, model_cfg: &ModelConfig, samples: &[Sample]) -> Result<TrainOutcome> {
    train_with(cfg, init_params(*model_cfg)?, samples, |_| {})
}

/// Trains from `params`, calling `on_epoch` after every epoch.
pub fn train_with(
    cfg: &TrainConfig,
    mut params: ModelParams,
    samples: &[Sample],
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(s) = samples.iter().find(|s| s.graph.n() > params.config.max_nodes) {
        return Err(Error::TooLarge { n: s.graph.n(), max: params.config.max_nodes });
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut adam = Adam::new(&params, cfg);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut losses = vec![0.0; samples.len()];
    for epoch in 1..=cfg.epochs {
        let mut last = 0.0;
        for (bi, batch) in plan_batches(samples, cfg.batch_size, &mut rng).iter().enumerate() {
            let members: Vec<&Sample> = batch.iter().map(|&i| &samples[i]).collect();
            let (loss, per_sample, mut grads) = loss_and_gradients(&params, &members)?;
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: bi });
            }
            for (&i, l) in batch.iter().zip(per_sample) {
                losses[i] = l;
            }
            last = loss;
            if cfg.clip_norm > 0.0 {
                let norm = grads.squared_norm().sqrt();
                if norm > cfg.clip_norm {
                    grads.scale(cfg.clip_norm / norm);
                }
            }
            adam.update(&mut params, &grads);
        }
        // summed in sample order so the figure does not depend on batch order
        let stats =
            EpochStats { epoch, mean_mape: losses.iter().sum::<f64>() / samples.len() as f64, last_batch_mape: last };
        log::info!("epoch {epoch}: mean MAPE {:.3}, last batch {:.3}", stats.mean_mape, stats.last_batch_mape);
        on_epoch(&stats);
        history.push(stats);
    }
    if !params.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: cfg.epochs, batch: 0 });
    }
    Ok(TrainOutcome { params, history })
}
