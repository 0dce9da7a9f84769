//! LSTM stack parameters, initialization and the binary parameter file.
//!
//! Gate rows inside every `4 * hidden` block are ordered input, forget, cell
//! candidate, output.
//!
//! File layout, all little-endian:
//!
//! | bytes | field |
//! |-------|-------|
//! | 8     | magic `HCLSTM\0\0` |
//! | 4     | format version (u32, currently 1) |
//! | 4 × 4 | num_layers, hidden_size, input_dim, max_nodes (u32) |
//! | 8     | seed (u64) |
//! | rest  | f64 tensors: for each layer `w_in` (row-major, 4H × in), `w_rec` (4H × H), `bias` (4H); then `head_w` (H), `head_b` (1) |

use std::path::Path;

use ndarray::{Array1, Array2};
use rand::Rng;

use super::config::ModelConfig;
use crate::error::{Error, Result};
use crate::gen::rng_from_seed;

pub const MAGIC: &[u8; 8] = b"HCLSTM\0\0";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 8 + 4 + 4 * 4 + 8;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub w_in: Array2<f64>,
    pub w_rec: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub config: ModelConfig,
    pub layers: Vec<LayerParams>,
    pub head_w: Array1<f64>,
    /// Length-1 array so every tensor can be handed out as a slice.
    pub head_b: Array1<f64>,
}

impl ModelParams {
    pub fn zeros(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let h = config.hidden_size;
        let layers = (0..config.num_layers)
            .map(|l| {
                let in_dim = if l == 0 { config.input_dim } else { h };
                LayerParams {
                    w_in: Array2::zeros((4 * h, in_dim)),
                    w_rec: Array2::zeros((4 * h, h)),
                    bias: Array1::zeros(4 * h),
                }
            })
            .collect();
        Ok(ModelParams { config, layers, head_w: Array1::zeros(h), head_b: Array1::zeros(1) })
    }

    pub fn zeros_like(&self) -> Self {
        ModelParams::zeros(self.config).expect("config already validated")
    }

    pub fn hidden(&self) -> usize {
        self.config.hidden_size
    }

    pub fn head_bias(&self) -> f64 {
        self.head_b[0]
    }

    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(3 * self.layers.len() + 2);
        for layer in &self.layers {
            out.push(layer.w_in.as_slice().expect("standard layout"));
            out.push(layer.w_rec.as_slice().expect("standard layout"));
            out.push(layer.bias.as_slice().expect("standard layout"));
        }
        out.push(self.head_w.as_slice().expect("standard layout"));
        out.push(self.head_b.as_slice().expect("standard layout"));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(3 * self.layers.len() + 2);
        for layer in &mut self.layers {
            out.push(layer.w_in.as_slice_mut().expect("standard layout"));
            out.push(layer.w_rec.as_slice_mut().expect("standard layout"));
            out.push(layer.bias.as_slice_mut().expect("standard layout"));
        }
        out.push(self.head_w.as_slice_mut().expect("standard layout"));
        out.push(self.head_b.as_slice_mut().expect("standard layout"));
        out
    }

    pub fn num_params(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    pub fn get_flat(&self, mut index: usize) -> f64 {
        for t in self.tensors() {
            if index < t.len() {
                return t[index];
            }
            index -= t.len();
        }
        panic!("parameter index out of range");
    }

    pub fn set_flat(&mut self, mut index: usize, value: f64) {
        for t in self.tensors_mut() {
            if index < t.len() {
                t[index] = value;
                return;
            }
            index -= t.len();
        }
        panic!("parameter index out of range");
    }

    pub fn squared_norm(&self) -> f64 {
        self.tensors().iter().flat_map(|t| t.iter()).map(|x| x * x).sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        ModelParams::from_bytes(&bytes).map_err(|msg| Error::ModelFormat { path: path.to_path_buf(), msg })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * self.num_params());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        for v in [c.num_layers, c.hidden_size, c.input_dim, c.max_nodes] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.extend_from_slice(&c.seed.to_le_bytes());
        for t in self.tensors() {
            for x in t {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        if bytes.len() < HEADER_LEN {
            return Err(format!("truncated header ({} bytes)", bytes.len()));
        }
        if &bytes[..8] != MAGIC {
            return Err("bad magic".into());
        }
        let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
        let version = u32_at(8);
        if version != FORMAT_VERSION {
            return Err(format!("unsupported format version {version}"));
        }
        let config = ModelConfig {
            num_layers: u32_at(12) as usize,
            hidden_size: u32_at(16) as usize,
            input_dim: u32_at(20) as usize,
            max_nodes: u32_at(24) as usize,
            seed: u64::from_le_bytes(bytes[28..36].try_into().unwrap()),
        };
        config.validate().map_err(|e| format!("bad config header: {e}"))?;
        let mut params = ModelParams::zeros(config).map_err(|e| e.to_string())?;
        let expected = HEADER_LEN + 8 * params.num_params();
        if bytes.len() != expected {
            return Err(format!("payload size {} does not match config (expected {expected})", bytes.len()));
        }
        let mut chunks = bytes[HEADER_LEN..].chunks_exact(8);
        for t in params.tensors_mut() {
            for (x, b) in t.iter_mut().zip(&mut chunks) {
                *x = f64::from_le_bytes(b.try_into().unwrap());
            }
        }
        if !params.is_finite() {
            return Err("non-finite parameter values".into());
        }
        Ok(params)
    }
}

/// Glorot-uniform weights, zero biases except the forget gate (1.0), head bias 1.0
/// so the ReLU output starts in its active region.
pub fn init_params(config: ModelConfig) -> Result<ModelParams> {
    let mut params = ModelParams::zeros(config)?;
    let mut rng = rng_from_seed(config.seed);
    let h = config.hidden_size;
    let mut fill = |a: &mut [f64], fan_in: usize, fan_out: usize| {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        a.iter_mut().for_each(|x| *x = rng.random_range(-limit..=limit));
    };
    for layer in &mut params.layers {
        let in_dim = layer.w_in.ncols();
        fill(layer.w_in.as_slice_mut().unwrap(), in_dim, 4 * h);
        fill(layer.w_rec.as_slice_mut().unwrap(), h, 4 * h);
        layer.bias.slice_mut(ndarray::s![h..2 * h]).fill(1.0);
    }
    fill(params.head_w.as_slice_mut().unwrap(), h, 1);
    params.head_b[0] = 1.0;
    Ok(params)
}
