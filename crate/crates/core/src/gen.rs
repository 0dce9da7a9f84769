//! Seeded random graph generators.
//!
//! Every generator draws from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`),
//! so a seed reproduces a graph byte-for-byte on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi G(n, p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GnpParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

/// Each unordered pair `(u, v)`, visited in lexicographic order, becomes an edge with
/// probability `p`.
pub fn gnp(params: GnpParams) -> Result<Graph> {
    let GnpParams { n, p, seed } = params;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    let mut g = Graph::new(n)?;
    let mut rng = rng_from_seed(seed);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Barabási–Albert preferential attachment: a clique on `m + 1` nodes, then each new
/// node links to `m` distinct existing nodes picked with probability proportional to degree.
/// The result has `m(m + 1)/2 + m(n - m - 1)` edges.
pub fn scale_free(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || m >= n {
        return Err(Error::InvalidParameter(format!("scale-free graph needs 1 <= m < n, got m={m}, n={n}")));
    }
    let mut g = Graph::new(n)?;
    let mut rng = rng_from_seed(seed);
    // one entry per edge endpoint; uniform picks are degree-proportional
    let mut endpoints = Vec::with_capacity(2 * m * n);
    for u in 0..=m {
        for v in u + 1..=m {
            g.add_edge(u, v)?;
            endpoints.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in m + 1..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            g.add_edge(v, t)?;
            endpoints.extend([v, t]);
        }
    }
    Ok(g)
}
