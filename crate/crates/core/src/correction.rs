//! Color correction: repairs the monochromatic edges left by the sequence model.
//!
//! The palette is taken from the incoming coloring. For every edge that was invalid on
//! entry (lexicographic `u < v` order), if it is still invalid:
//!
//! 1. recolor `u` with the lowest palette color, other than its current one, that no
//!    neighbor of `u` holds;
//! 2. failing that, do the same for `v`;
//! 3. failing both, add a new color to the palette and give it to `u`.
//!
//! A new color is the smallest positive integer not already in the palette, which keeps
//! every color within `1..=n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{validate_coloring, Coloring, Graph};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionStats {
    pub initial_invalid_edges: usize,
    pub recolored_by_reuse: usize,
    pub fresh_colors_added: usize,
    pub final_colors_used: usize,
}

fn reusable_color(g: &Graph, colors: &[u32], node: usize, palette: &crate::graph::Palette) -> Option<u32> {
    let current = colors[node];
    palette.iter().filter(|&c| c != current).find(|&c| g.neighbors(node).all(|w| colors[w] != c))
}

pub fn color_correct(g: &Graph, c: &Coloring) -> Result<(Coloring, CorrectionStats)> {
    let report = validate_coloring(g, c)?;
    let mut palette = c.palette();
    let mut colors = c.as_slice().to_vec();
    let mut stats = CorrectionStats { initial_invalid_edges: report.invalid_edges.len(), ..Default::default() };

    for &(n1, n2) in &report.invalid_edges {
        if colors[n1] != colors[n2] {
            continue;
        }
        if let Some(c1) = reusable_color(g, &colors, n1, &palette) {
            colors[n1] = c1;
            stats.recolored_by_reuse += 1;
        } else if let Some(c2) = reusable_color(g, &colors, n2, &palette) {
            colors[n2] = c2;
            stats.recolored_by_reuse += 1;
        } else {
            let fresh = palette.first_absent();
            palette.insert(fresh);
            colors[n1] = fresh;
            stats.fresh_colors_added += 1;
        }
    }

    let corrected = Coloring::new(colors).map_err(|e| Error::Invariant(e.to_string()))?;
    if !validate_coloring(g, &corrected)?.is_proper() {
        return Err(Error::Invariant("color correction left an invalid edge".into()));
    }
    stats.final_colors_used = corrected.colors_used();
    Ok((corrected, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coloring(v: &[u32]) -> Coloring {
        Coloring::new(v.to_vec()).unwrap()
    }

    #[test]
    fn path_reuses_existing_color() {
        let (c, s) = color_correct(&Graph::path(3).unwrap(), &coloring(&[1, 1, 2])).unwrap();
        assert_eq!(c.as_slice(), &[2, 1, 2]);
        assert_eq!((s.initial_invalid_edges, s.recolored_by_reuse, s.fresh_colors_added), (1, 1, 0));
    }

    #[test]
    fn triangle_needs_two_fresh_colors() {
        let (c, s) = color_correct(&Graph::complete(3).unwrap(), &coloring(&[1, 1, 1])).unwrap();
        assert_eq!(c.as_slice(), &[2, 3, 1]);
        assert_eq!(s.fresh_colors_added, 2);
        assert_eq!(s.recolored_by_reuse, 0);
        assert_eq!(s.initial_invalid_edges, 3);
        assert_eq!(s.final_colors_used, 3);
    }

    #[test]
    fn second_endpoint_is_recolored_when_first_is_stuck() {
        // node 0 sees colors {1,2} so it cannot move; node 1 can take 2
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let (c, s) = color_correct(&g, &coloring(&[1, 1, 2, 1])).unwrap();
        assert_eq!(c.as_slice(), &[1, 2, 2, 2]);
        assert_eq!((s.recolored_by_reuse, s.fresh_colors_added), (2, 0));
    }

    #[test]
    fn proper_input_unchanged() {
        let g = Graph::cycle(6).unwrap();
        let input = coloring(&[1, 2, 1, 2, 1, 3]);
        let (c, s) = color_correct(&g, &input).unwrap();
        assert_eq!(c, input);
        assert_eq!(s.recolored_by_reuse + s.fresh_colors_added, 0);
    }

    #[test]
    fn fresh_color_stays_in_range_with_sparse_palette() {
        let (c, _) = color_correct(&Graph::complete(3).unwrap(), &coloring(&[3, 3, 1])).unwrap();
        assert!(c.as_slice().iter().all(|&x| (1..=3).contains(&x)));
        assert_eq!(c.colors_used(), 3);
    }

    #[test]
    fn length_mismatch() {
        assert!(color_correct(&Graph::path(3).unwrap(), &coloring(&[1, 1])).is_err());
    }
}
