use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{chromatic_number, SolveStatus};
use crate::gen::{gnp, rng_from_seed, GnpParams};
use crate::graph::DEFAULT_MAX_NODES;
use crate::io::SampleRow;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub seed: u64,
    pub timeout: Duration,
    pub max_nodes: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            count: 10_000,
            n_min: 1,
            n_max: DEFAULT_MAX_NODES,
            p_min: 0.05,
            p_max: 0.95,
            seed: 0,
            timeout: Duration::from_secs(10),
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max || self.n_max > self.max_nodes {
            return Err(Error::InvalidParameter(format!(
                "node range {}..={} must lie within 1..={}",
                self.n_min, self.n_max, self.max_nodes
            )));
        }
        if !(0.0 <= self.p_min && self.p_min <= self.p_max && self.p_max <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "probability range {}..={} must lie within [0, 1]",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub graph_id: usize,
    pub n: usize,
    pub p: f64,
    pub seed: u64,
    pub chromatic_number: usize,
    pub status: SolveStatus,
    pub solve_ms: f64,
}

pub struct Corpus {
    pub rows: Vec<SampleRow>,
    pub manifest: Vec<ManifestEntry>,
}

impl Corpus {
    pub fn skipped(&self) -> usize {
        self.manifest.iter().filter(|m| m.status == SolveStatus::TimedOut).count()
    }
}

/// G(n, p) graphs with n and p drawn uniformly from the configured ranges, each labeled
/// with an exact optimal coloring. Graphs whose solve times out are left out of the rows
/// but stay in the manifest.
pub fn generate_corpus(cfg: &CorpusConfig) -> Result<Corpus> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let specs: Vec<GnpParams> = (0..cfg.count)
        .map(|_| GnpParams {
            n: rng.random_range(cfg.n_min..=cfg.n_max),
            p: if cfg.p_min == cfg.p_max { cfg.p_min } else { rng.random_range(cfg.p_min..=cfg.p_max) },
            seed: rng.random(),
        })
        .collect();
    let labeled: Vec<(Option<SampleRow>, ManifestEntry)> = specs
        .par_iter()
        .enumerate()
        .map(|(graph_id, spec)| {
            let g = gnp(*spec)?;
            let start = Instant::now();
            let r = chromatic_number(&g, cfg.timeout);
            let solve_ms = start.elapsed().as_secs_f64() * 1e3;
            let row = match r.status {
                SolveStatus::Exact => Some(SampleRow::training(&g, &r.coloring, cfg.max_nodes)?),
                SolveStatus::TimedOut => None,
            };
            let entry = ManifestEntry {
                graph_id,
                n: spec.n,
                p: spec.p,
                seed: spec.seed,
                chromatic_number: r.chromatic_number,
                status: r.status,
                solve_ms,
            };
            Ok((row, entry))
        })
        .collect::<Result<_>>()?;
    let (rows, manifest): (Vec<_>, Vec<_>) = labeled.into_iter().unzip();
    Ok(Corpus { rows: rows.into_iter().flatten().collect(), manifest })
}

pub fn write_manifest(path: &Path, manifest: &[ManifestEntry]) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(out, "graph_id,n,p,seed,chromatic_number,status,solve_ms").map_err(io)?;
    for m in manifest {
        let status = match m.status {
            SolveStatus::Exact => "exact",
            SolveStatus::TimedOut => "timed_out",
        };
        writeln!(out, "{},{},{},{},{},{},{:.3}", m.graph_id, m.n, m.p, m.seed, m.chromatic_number, status, m.solve_ms)
            .map_err(io)?;
    }
    out.flush().map_err(io)
}
