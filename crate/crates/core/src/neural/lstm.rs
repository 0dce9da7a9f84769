//! Batched forward pass and backpropagation through time for the LSTM stack.
//!
//! A batch holds `B` graphs padded to `T` time steps; every activation matrix is
//! laid out with row `t * B + b` for step `t` of sample `b`. Padded steps run
//! through the network like real ones but carry no loss, and because the
//! recurrence only looks backwards they never influence real outputs.
//!
//! Per layer and step, with `z = W_in x_t + W_rec h_{t-1} + b` split into four
//! blocks:
//!
//! ```text
//! i = σ(z_i)   f = σ(z_f)   g = tanh(z_g)   o = σ(z_o)
//! c_t = f ⊙ c_{t-1} + i ⊙ g
//! h_t = o ⊙ tanh(c_t)
//! ```
//!
//! The head reads the top layer only: `y_t = max(0, w_head · h_t + b_head)`.

use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, ArrayView2, Axis};

use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::pack_adjacency_row;

pub struct Batch {
    pub size: usize,
    pub steps: usize,
    pub lens: Vec<usize>,
    /// `(steps * size, 128)` expanded adjacency bits.
    pub inputs: Array2<f64>,
}

impl Batch {
    pub fn from_graphs(graphs: &[&Graph], max_nodes: usize) -> Result<Batch> {
        let size = graphs.len();
        let lens: Vec<usize> = graphs.iter().map(|g| g.n()).collect();
        if let Some(&n) = lens.iter().find(|&&n| n > max_nodes) {
            return Err(Error::TooLarge { n, max: max_nodes });
        }
        let steps = lens.iter().copied().max().unwrap_or(0);
        let mut inputs = Array2::zeros((steps * size, super::INPUT_DIM));
        for (b, g) in graphs.iter().enumerate() {
            for t in 0..g.n() {
                let (w0, w1) = pack_adjacency_row(g, t)?;
                let mut row = inputs.row_mut(t * size + b);
                for j in 0..64 {
                    row[j] = (w0 >> j & 1) as f64;
                    row[64 + j] = (w1 >> j & 1) as f64;
                }
            }
        }
        Ok(Batch { size, steps, lens, inputs })
    }

    pub fn row(&self, t: usize, b: usize) -> usize {
        t * self.size + b
    }
}

pub struct LayerState {
    /// Activated gates `[i | f | g | o]`.
    pub gates: Array2<f64>,
    pub cell: Array2<f64>,
    pub cell_tanh: Array2<f64>,
    pub hidden: Array2<f64>,
}

/// Everything the backward pass needs: per-layer hidden and cell states for every step.
pub struct ForwardState {
    pub layers: Vec<LayerState>,
    pub head_pre: Array1<f64>,
    pub outputs: Array1<f64>,
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn rows(a: &Array2<f64>, from: usize, to: usize) -> ArrayView2<'_, f64> {
    a.slice(s![from..to, ..])
}

pub fn forward_batch(params: &ModelParams, batch: &Batch) -> ForwardState {
    let (b_sz, steps, h) = (batch.size, batch.steps, params.hidden());
    let total = steps * b_sz;
    let mut layers: Vec<LayerState> = Vec::with_capacity(params.layers.len());
    for (l, p) in params.layers.iter().enumerate() {
        let input = if l == 0 { &batch.inputs } else { &layers[l - 1].hidden };
        let mut gates = Array2::zeros((total, 4 * h));
        gates += &p.bias;
        general_mat_mul(1.0, input, &p.w_in.t(), 1.0, &mut gates);
        let mut cell = Array2::zeros((total, h));
        let mut cell_tanh = Array2::zeros((total, h));
        let mut hidden = Array2::zeros((total, h));
        for t in 0..steps {
            let (lo, hi) = (t * b_sz, (t + 1) * b_sz);
            if t > 0 {
                let h_prev = rows(&hidden, lo - b_sz, lo).to_owned();
                let mut z = gates.slice_mut(s![lo..hi, ..]);
                general_mat_mul(1.0, &h_prev, &p.w_rec.t(), 1.0, &mut z);
            }
            for r in lo..hi {
                let z = gates.row_mut(r).into_slice().expect("contiguous row");
                let c_prev = if t > 0 { Some(r - b_sz) } else { None };
                for j in 0..h {
                    let i = sigmoid(z[j]);
                    let f = sigmoid(z[h + j]);
                    let g = z[2 * h + j].tanh();
                    let o = sigmoid(z[3 * h + j]);
                    z[j] = i;
                    z[h + j] = f;
                    z[2 * h + j] = g;
                    z[3 * h + j] = o;
                    let cp = c_prev.map_or(0.0, |rp| cell[[rp, j]]);
                    let c = f * cp + i * g;
                    let tc = c.tanh();
                    cell[[r, j]] = c;
                    cell_tanh[[r, j]] = tc;
                    hidden[[r, j]] = o * tc;
                }
            }
        }
        layers.push(LayerState { gates, cell, cell_tanh, hidden });
    }
    let top = &layers.last().expect("at least one layer").hidden;
    let head_pre = top.dot(&params.head_w) + params.head_bias();
    let outputs = head_pre.mapv(|x| x.max(0.0));
    ForwardState { layers, head_pre, outputs }
}

/// Gradients of the loss with respect to every parameter, given `d_out = ∂L/∂y` per row.
pub fn backward(params: &ModelParams, batch: &Batch, state: &ForwardState, d_out: &Array1<f64>) -> ModelParams {
    let (b_sz, steps, h) = (batch.size, batch.steps, params.hidden());
    let total = steps * b_sz;
    let mut grads = params.zeros_like();

    let d_pre = ndarray::Zip::from(d_out).and(&state.head_pre).map_collect(|&d, &z| if z > 0.0 { d } else { 0.0 });
    let top = &state.layers.last().expect("at least one layer").hidden;
    grads.head_w = top.t().dot(&d_pre);
    grads.head_b[0] = d_pre.sum();

    let mut d_hidden = Array2::zeros((total, h));
    for (r, &d) in d_pre.iter().enumerate() {
        if d != 0.0 {
            d_hidden.row_mut(r).scaled_add(d, &params.head_w);
        }
    }

    for l in (0..params.layers.len()).rev() {
        let p = &params.layers[l];
        let st = &state.layers[l];
        let input = if l == 0 { &batch.inputs } else { &state.layers[l - 1].hidden };
        let mut d_z = Array2::<f64>::zeros((total, 4 * h));
        let mut d_h_rec = Array2::<f64>::zeros((b_sz, h));
        let mut d_c_next = Array2::<f64>::zeros((b_sz, h));
        for t in (0..steps).rev() {
            let lo = t * b_sz;
            for b in 0..b_sz {
                let r = lo + b;
                let gates = st.gates.row(r);
                let dz = d_z.row_mut(r).into_slice().expect("contiguous row");
                for j in 0..h {
                    let (i, f, g, o) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
                    let tc = st.cell_tanh[[r, j]];
                    let c_prev = if t > 0 { st.cell[[r - b_sz, j]] } else { 0.0 };
                    let dh = d_hidden[[r, j]] + d_h_rec[[b, j]];
                    let dc = dh * o * (1.0 - tc * tc) + d_c_next[[b, j]];
                    dz[j] = dc * g * i * (1.0 - i);
                    dz[h + j] = dc * c_prev * f * (1.0 - f);
                    dz[2 * h + j] = dc * i * (1.0 - g * g);
                    dz[3 * h + j] = dh * tc * o * (1.0 - o);
                    d_c_next[[b, j]] = dc * f;
                }
            }
            if t > 0 {
                general_mat_mul(1.0, &rows(&d_z, lo, lo + b_sz), &p.w_rec, 0.0, &mut d_h_rec);
            }
        }
        let g = &mut grads.layers[l];
        general_mat_mul(1.0, &d_z.t(), input, 0.0, &mut g.w_in);
        g.bias = d_z.sum_axis(Axis(0));
        if steps > 1 {
            let later = rows(&d_z, b_sz, total);
            let earlier = rows(&st.hidden, 0, total - b_sz);
            general_mat_mul(1.0, &later.t(), &earlier, 0.0, &mut g.w_rec);
        }
        if l > 0 {
            d_hidden = d_z.dot(&p.w_in);
        }
    }
    grads
}

/// Raw per-node outputs for a single graph.
pub fn forward(params: &ModelParams, g: &Graph) -> Result<Vec<f64>> {
    let batch = Batch::from_graphs(&[g], params.config.max_nodes)?;
    let state = forward_batch(params, &batch);
    Ok(state.outputs.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{init_params, ModelConfig};

    #[test]
    fn zero_params_give_zero_outputs() {
        let p = ModelParams::zeros(ModelConfig::tiny(4, 0)).unwrap();
        let g = Graph::cycle(5).unwrap();
        assert_eq!(forward(&p, &g).unwrap(), vec![0.0; 5]);
    }

    #[test]
    fn single_node_graph() {
        let p = init_params(ModelConfig::tiny(4, 0)).unwrap();
        let out = forward(&p, &Graph::new(1).unwrap()).unwrap();
        assert_eq!(out.len(), 1);
        assert!(out[0].is_finite());
    }

    #[test]
    fn batching_matches_single_runs() {
        let p = init_params(ModelConfig::tiny(5, 3)).unwrap();
        let a = Graph::cycle(6).unwrap();
        let b = Graph::path(3).unwrap();
        let batch = Batch::from_graphs(&[&a, &b], 100).unwrap();
        let st = forward_batch(&p, &batch);
        let solo_a = forward(&p, &a).unwrap();
        let solo_b = forward(&p, &b).unwrap();
        for (b, solo) in [solo_a, solo_b].iter().enumerate() {
            for (t, y) in solo.iter().enumerate() {
                assert!((st.outputs[batch.row(t, b)] - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_oversized_graph() {
        let mut cfg = ModelConfig::tiny(2, 0);
        cfg.max_nodes = 4;
        let p = init_params(cfg).unwrap();
        assert!(matches!(forward(&p, &Graph::new(5).unwrap()), Err(Error::TooLarge { .. })));
    }
}
