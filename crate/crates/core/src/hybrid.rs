//! Model prediction followed by color correction, and the multi-model ensemble.

use serde::{Deserialize, Serialize};

use crate::correction::{color_correct, CorrectionStats};
use crate::error::{Error, Result};
use crate::graph::{
    apply_permutation, bfs_permutation, unpermute_coloring, validate_coloring, Coloring, ColoringReport, Graph,
};
use crate::neural::{predict_colors, ModelParams};

/// Anything that proposes a (possibly improper) coloring.
pub trait ColorPredictor: Sync {
    fn predict(&self, g: &Graph) -> Result<Coloring>;
}

impl ColorPredictor for ModelParams {
    fn predict(&self, g: &Graph) -> Result<Coloring> {
        predict_colors(self, g)
    }
}

impl<T: ColorPredictor + ?Sized> ColorPredictor for &T {
    fn predict(&self, g: &Graph) -> Result<Coloring> {
        (**self).predict(g)
    }
}

impl<T: ColorPredictor + ?Sized + Send> ColorPredictor for Box<T> {
    fn predict(&self, g: &Graph) -> Result<Coloring> {
        (**self).predict(g)
    }
}

/// Order in which nodes are fed to the predictor.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeOrder {
    #[default]
    Natural,
    /// Breadth-first from node 0; predictions are mapped back to the original ids.
    Bfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridColoring {
    pub predicted: Coloring,
    pub before: ColoringReport,
    pub corrected: Coloring,
    pub stats: CorrectionStats,
}

impl HybridColoring {
    pub fn colors_before(&self) -> usize {
        self.before.colors_used
    }

    pub fn colors_after(&self) -> usize {
        self.stats.final_colors_used
    }
}

pub fn predict_in_order<P: ColorPredictor + ?Sized>(model: &P, g: &Graph, order: NodeOrder) -> Result<Coloring> {
    match order {
        NodeOrder::Natural => model.predict(g),
        NodeOrder::Bfs => {
            let perm = bfs_permutation(g, 0)?;
            let predicted = model.predict(&apply_permutation(g, &perm)?)?;
            unpermute_coloring(&predicted, &perm)
        }
    }
}

pub fn hybrid_color<P: ColorPredictor + ?Sized>(model: &P, g: &Graph, order: NodeOrder) -> Result<HybridColoring> {
    let predicted = predict_in_order(model, g, order)?;
    let before = validate_coloring(g, &predicted)?;
    let (corrected, stats) = color_correct(g, &predicted)?;
    Ok(HybridColoring { predicted, before, corrected, stats })
}

/// Runs every model through the hybrid pipeline and keeps the corrected coloring with the
/// fewest colors; the earliest model wins ties. Returns the winning model's index.
pub fn ensemble_predict<P: ColorPredictor>(
    models: &[P],
    g: &Graph,
    order: NodeOrder,
) -> Result<(usize, HybridColoring)> {
    let mut best: Option<(usize, HybridColoring)> = None;
    for (i, model) in models.iter().enumerate() {
        let result = hybrid_color(model, g, order)?;
        if best.as_ref().is_none_or(|(_, b)| result.colors_after() < b.colors_after()) {
            best = Some((i, result));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("ensemble needs at least one model".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Vec<u32>);

    impl ColorPredictor for Fixed {
        fn predict(&self, _: &Graph) -> Result<Coloring> {
            Coloring::new(self.0.clone())
        }
    }

    #[test]
    fn ensemble_picks_fewest_colors_then_first() {
        let g = Graph::cycle(4).unwrap();
        let models = [Fixed(vec![1, 2, 3, 4]), Fixed(vec![1, 2, 1, 2]), Fixed(vec![2, 1, 2, 1])];
        let (i, r) = ensemble_predict(&models, &g, NodeOrder::Natural).unwrap();
        assert_eq!(i, 1);
        assert_eq!(r.colors_after(), 2);
        let same = [Fixed(vec![1, 1, 1, 1]), Fixed(vec![1, 1, 1, 1])];
        assert_eq!(ensemble_predict(&same, &g, NodeOrder::Natural).unwrap().0, 0);
        let none: [Fixed; 0] = [];
        assert!(ensemble_predict(&none, &g, NodeOrder::Natural).is_err());
    }

    #[test]
    fn single_model_matches_hybrid() {
        let g = Graph::complete(3).unwrap();
        let m = Fixed(vec![1, 1, 1]);
        let (_, r) = ensemble_predict(std::slice::from_ref(&m), &g, NodeOrder::Natural).unwrap();
        assert_eq!(r, hybrid_color(&m, &g, NodeOrder::Natural).unwrap());
        assert_eq!(r.corrected.as_slice(), &[2, 3, 1]);
    }

    #[test]
    fn bfs_order_maps_back() {
        struct Echo;
        impl ColorPredictor for Echo {
            // color = position in the sequence the model sees
            fn predict(&self, g: &Graph) -> Result<Coloring> {
                Coloring::new((1..=g.n() as u32).collect())
            }
        }
        let star = Graph::from_edges(4, [(2, 0), (2, 1), (2, 3)]).unwrap();
        let c = predict_in_order(&Echo, &Graph::path(3).unwrap(), NodeOrder::Bfs).unwrap();
        assert_eq!(c.as_slice(), &[1, 2, 3]);
        let star_bfs = bfs_permutation(&star, 0).unwrap();
        assert_eq!(star_bfs, vec![0, 2, 1, 3]);
        let c = predict_in_order(&Echo, &star, NodeOrder::Bfs).unwrap();
        assert_eq!(c.as_slice(), &[1, 3, 2, 4]);
    }
}
