//! Central finite-difference check of the analytic BPTT gradients.

use serde::{Deserialize, Serialize};

use super::lstm::{forward_batch, Batch};
use super::params::ModelParams;
use super::train::{loss_and_gradients, loss_terms, Sample};
use crate::error::Result;

pub const DEFAULT_EPSILON: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub params_checked: usize,
    /// Smallest distance of any output from its target or of any head pre-activation
    /// from zero. The loss has kinks there, so a check is only meaningful when the
    /// perturbations keep every output well inside a smooth region.
    pub kink_margin: f64,
}

/// `|a - b| / max(|a|, |b|, 1e-8)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Compares every analytic partial derivative of the single-sample MAPE against a
/// finite-difference estimate. Each network output is differenced with the five-point
/// stencil `(-y(θ+2ε) + 8y(θ+ε) - 8y(θ-ε) + y(θ-2ε)) / 12ε` and the results are
/// contracted with `∂L/∂y`, which is exact away from the kinks. Differencing the O(1)
/// outputs rather than the percentage-scale loss keeps roundoff out of tiny gradients.
pub fn grad_check(params: &ModelParams, sample: &Sample, epsilon: f64) -> Result<GradCheckReport> {
    let (_, _, grads) = loss_and_gradients(params, &[sample])?;
    let batch = Batch::from_graphs(&[&sample.graph], params.config.max_nodes)?;
    let (_, _, d_out) = loss_terms(&forward_batch(params, &batch).outputs, &batch, &[sample]);
    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst_index: 0,
        analytic: 0.0,
        numeric: 0.0,
        params_checked: params.num_params(),
        kink_margin: kink_margin(params, sample, &batch),
    };
    let mut index = 0;
    for grad_tensor in grads.tensors() {
        for &analytic in grad_tensor {
            let original = probe.get_flat(index);
            let mut at = |step: f64| {
                probe.set_flat(index, original + step * epsilon);
                forward_batch(&probe, &batch).outputs
            };
            let stencil = -at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0);
            probe.set_flat(index, original);
            let numeric = stencil.dot(&d_out) / (12.0 * epsilon);
            let err = relative_error(analytic, numeric);
            if err > report.max_relative_error {
                report = GradCheckReport { max_relative_error: err, worst_index: index, analytic, numeric, ..report };
            }
            index += 1;
        }
    }
    Ok(report)
}

fn kink_margin(params: &ModelParams, sample: &Sample, batch: &Batch) -> f64 {
    let state = forward_batch(params, batch);
    sample
        .targets
        .iter()
        .enumerate()
        .map(|(t, &y)| {
            let pre = state.head_pre[batch.row(t, 0)];
            pre.abs().min((pre - y as f64).abs())
        })
        .fold(f64::INFINITY, f64::min)
}
