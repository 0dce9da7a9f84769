//! Live intervals and interference-graph construction.
//!
//! Text format, one virtual register per line:
//!
//! ```text
//! vreg <id> <start> <end> [<start> <end> ...]
//! ```
//!
//! Segments are half-open `[start, end)` over integer program points, so a value
//! killed at point `p` does not interfere with one defined at `p`. Blank lines and
//! lines starting with `#` are skipped.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveInterval {
    pub vreg: u32,
    /// Sorted, pairwise disjoint, each `start < end`.
    pub segments: Vec<(u64, u64)>,
}

impl LiveInterval {
    pub fn new(vreg: u32, mut segments: Vec<(u64, u64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter(format!("vreg {vreg} has no segments")));
        }
        if let Some(&(s, e)) = segments.iter().find(|(s, e)| s >= e) {
            return Err(Error::InvalidParameter(format!("vreg {vreg}: empty segment [{s}, {e})")));
        }
        segments.sort_unstable();
        if let Some(w) = segments.windows(2).find(|w| w[0].1 > w[1].0) {
            return Err(Error::InvalidParameter(format!(
                "vreg {vreg}: segments [{}, {}) and [{}, {}) overlap",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(LiveInterval { vreg, segments })
    }

    pub fn overlaps(&self, other: &LiveInterval) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.segments.len() && j < other.segments.len() {
            let (a, b) = self.segments[i];
            let (c, d) = other.segments[j];
            if a < d && c < b {
                return true;
            }
            if b <= d {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }

    pub fn is_live_at(&self, point: u64) -> bool {
        self.segments.iter().any(|&(s, e)| s <= point && point < e)
    }
}

pub fn parse_intervals(text: &str) -> Result<Vec<LiveInterval>> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        if tok.next() != Some("vreg") {
            return Err(Error::parse(line_no, "expected `vreg <id> <start> <end> ...`"));
        }
        let nums = tok
            .map(|t| t.parse::<u64>().map_err(|_| Error::parse(line_no, format!("invalid integer {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let Some((&id, points)) = nums.split_first() else {
            return Err(Error::parse(line_no, "missing vreg id"));
        };
        if points.is_empty() || points.len() % 2 != 0 {
            return Err(Error::parse(line_no, "segments must come in <start> <end> pairs"));
        }
        let vreg = u32::try_from(id).map_err(|_| Error::parse(line_no, "vreg id too large"))?;
        if !ids.insert(vreg) {
            return Err(Error::parse(line_no, format!("duplicate vreg {vreg}")));
        }
        let segments = points.chunks(2).map(|p| (p[0], p[1])).collect();
        out.push(LiveInterval::new(vreg, segments).map_err(|e| Error::parse(line_no, e.to_string()))?);
    }
    Ok(out)
}

/// Node `i` of the result is `intervals[i]`; an edge joins two intervals whose segments intersect.
pub fn build_interference(intervals: &[LiveInterval], max_nodes: usize) -> Result<Graph> {
    if intervals.len() > max_nodes {
        return Err(Error::TooLarge { n: intervals.len(), max: max_nodes });
    }
    let mut g = Graph::new(intervals.len())?;
    for (i, a) in intervals.iter().enumerate() {
        for (j, b) in intervals.iter().enumerate().skip(i + 1) {
            if a.overlaps(b) {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(segs: &[(u64, u64)]) -> LiveInterval {
        LiveInterval::new(0, segs.to_vec()).unwrap()
    }

    #[test]
    fn parse_examples() {
        let v = parse_intervals("vreg 0 0 10").unwrap();
        assert_eq!(v[0].segments, vec![(0, 10)]);
        let v = parse_intervals("vreg 1 10 20 0 5").unwrap();
        assert_eq!(v[0].segments, vec![(0, 5), (10, 20)]);
        assert!(parse_intervals("vreg 2 5 5").is_err());
        assert!(parse_intervals("vreg 2 0 10 5 15").is_err());
        assert!(parse_intervals("vreg 2 0 10\nvreg 2 20 30").is_err());
        assert!(parse_intervals("vreg 2 0").is_err());
        assert!(parse_intervals("reg 2 0 1").is_err());
        assert_eq!(parse_intervals("# c\n\nvreg 3 0 1 1 2").unwrap()[0].segments.len(), 2);
    }

    #[test]
    fn interference_examples() {
        let g = build_interference(&[iv(&[(0, 10)]), iv(&[(5, 15)]), iv(&[(20, 30)])], 100).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        let g = build_interference(&[iv(&[(0, 5)]), iv(&[(5, 10)])], 100).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = build_interference(&[iv(&[(0, 20)]), iv(&[(2, 4)]), iv(&[(6, 8)])], 100).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn holes_do_not_interfere() {
        let a = iv(&[(0, 5), (20, 30)]);
        assert!(!a.overlaps(&iv(&[(5, 20)])));
        assert!(a.overlaps(&iv(&[(6, 21)])));
    }

    #[test]
    fn too_many_intervals() {
        let v: Vec<_> = (0..3).map(|_| iv(&[(0, 1)])).collect();
        assert!(matches!(build_interference(&v, 2), Err(Error::TooLarge { .. })));
    }
}
