use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::dsatur;
use crate::hybrid::{ensemble_predict, ColorPredictor, NodeOrder};
use crate::io::{unpack_sample, SampleRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEval {
    pub index: usize,
    pub n: usize,
    pub edges: usize,
    pub optimal_colors: usize,
    pub colors_before: usize,
    pub invalid_edges: usize,
    pub invalid_pct: f64,
    pub colors_after: usize,
    pub dsatur_colors: usize,
    pub model_index: usize,
    pub proper: bool,
}

impl GraphEval {
    pub fn extra_colors(&self) -> isize {
        self.colors_after as isize - self.optimal_colors as isize
    }
}

/// Aggregate results, with graphs split into disjoint buckets by how many colors the
/// corrected coloring uses beyond the optimum: none, 1 to 3, 6 to 10, anything else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalBuckets {
    pub total_graphs: usize,
    pub pct_invalid_edges_mean: f64,
    pub pct_match_optimal: f64,
    pub pct_within_3_extra: f64,
    pub pct_6_to_10_extra: f64,
    pub pct_other: f64,
    pub pct_proper_after_correction: f64,
    pub mean_colors_before: f64,
    pub mean_colors_hybrid: f64,
    pub mean_colors_dsatur: f64,
    pub mean_colors_optimal: f64,
}

impl EvalBuckets {
    pub fn from_evals(evals: &[GraphEval]) -> Self {
        let total = evals.len();
        let pct =
            |pred: &dyn Fn(&GraphEval) -> bool| 100.0 * evals.iter().filter(|e| pred(e)).count() as f64 / total as f64;
        let mean = |f: &dyn Fn(&GraphEval) -> f64| evals.iter().map(f).sum::<f64>() / total as f64;
        EvalBuckets {
            total_graphs: total,
            pct_invalid_edges_mean: mean(&|e| e.invalid_pct),
            pct_match_optimal: pct(&|e| e.extra_colors() <= 0),
            pct_within_3_extra: pct(&|e| (1..=3).contains(&e.extra_colors())),
            pct_6_to_10_extra: pct(&|e| (6..=10).contains(&e.extra_colors())),
            pct_other: pct(&|e| matches!(e.extra_colors(), 4 | 5) || e.extra_colors() > 10),
            pct_proper_after_correction: pct(&|e| e.proper),
            mean_colors_before: mean(&|e| e.colors_before as f64),
            mean_colors_hybrid: mean(&|e| e.colors_after as f64),
            mean_colors_dsatur: mean(&|e| e.dsatur_colors as f64),
            mean_colors_optimal: mean(&|e| e.optimal_colors as f64),
        }
    }
}

/// Runs the hybrid pipeline (ensemble over `models`) and the DSATUR baseline on every
/// labeled row.
pub fn evaluate<P: ColorPredictor>(
    models: &[P],
    rows: &[SampleRow],
    order: NodeOrder,
) -> Result<(EvalBuckets, Vec<GraphEval>)> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(i) = rows.iter().position(|r| r.optimal_k == 0) {
        return Err(Error::InvalidSample(format!("row {} has no optimal color label", i + 1)));
    }
    let evals = rows
        .par_iter()
        .enumerate()
        .map(|(index, row)| {
            let (g, _) = unpack_sample(row)?;
            let (model_index, h) = ensemble_predict(models, &g, order)?;
            let proper = crate::graph::validate_coloring(&g, &h.corrected)?.is_proper();
            Ok(GraphEval {
                index,
                n: g.n(),
                edges: g.edge_count(),
                optimal_colors: row.optimal_k as usize,
                colors_before: h.colors_before(),
                invalid_edges: h.before.invalid_edges.len(),
                invalid_pct: 100.0 * h.before.invalid_fraction,
                colors_after: h.colors_after(),
                dsatur_colors: dsatur(&g).colors_used(),
                model_index,
                proper,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((EvalBuckets::from_evals(&evals), evals))
}
