//! Exact chromatic number by DSATUR-ordered backtracking with clique pruning.
//!
//! [`chromatic_number`] brackets χ(G) between a maximum-clique lower bound and a
//! DSATUR upper bound, then asks [`k_colorable`] for ever smaller `k` until a
//! `k` is proven infeasible or the bounds meet. The clique found for the lower
//! bound is pre-colored `1..=q` in every decision search, which also fixes the
//! color permutation symmetry; beyond the clique a new color is only ever
//! introduced as `used + 1`.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Coloring, Graph};
use crate::heuristics::dsatur;

/// Search nodes between deadline checks.
const CLOCK_INTERVAL: u64 = 1 << 10;

#[derive(Debug, Clone, Copy)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub fn never() -> Self {
        Deadline(None)
    }

    pub fn after(timeout: Duration) -> Self {
        Deadline(Instant::now().checked_add(timeout))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Exact,
    /// Search ran out of time; the chromatic number is an upper bound only.
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub chromatic_number: usize,
    pub coloring: Coloring,
    pub status: SolveStatus,
    pub lower_bound: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KColoring {
    Colorable(Coloring),
    NotColorable,
    TimedOut,
}

struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn full(n: usize) -> Self {
        let mut words = vec![!0u64; n.div_ceil(64)];
        if !n.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        BitSet { words }
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn first(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    fn intersect(&self, row: &[u64]) -> BitSet {
        BitSet { words: self.words.iter().zip(row).map(|(a, b)| a & b).collect() }
    }

    fn subtract(&mut self, row: &[u64]) {
        self.words.iter_mut().zip(row).for_each(|(a, b)| *a &= !b);
    }
}

struct CliqueSearch<'g> {
    g: &'g Graph,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    deadline: Deadline,
    timed_out: bool,
}

impl CliqueSearch<'_> {
    /// Greedy-coloring bound: vertices of `p` paired with a color count that bounds the
    /// largest clique among them and everything listed before.
    fn color_order(&self, p: &BitSet) -> Vec<(usize, usize)> {
        let mut order = Vec::new();
        let mut rest = BitSet { words: p.words.clone() };
        let mut k = 0;
        while !rest.is_empty() {
            k += 1;
            let mut class = BitSet { words: rest.words.clone() };
            while let Some(v) = class.first() {
                class.remove(v);
                rest.remove(v);
                class.subtract(self.g.row(v));
                order.push((v, k));
            }
        }
        order
    }

    fn expand(&mut self, mut p: BitSet) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(CLOCK_INTERVAL) && self.deadline.expired() {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let order = self.color_order(&p);
        for &(v, bound) in order.iter().rev() {
            if self.current.len() + bound <= self.best.len() {
                return;
            }
            self.current.push(v);
            let next = p.intersect(self.g.row(v));
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            p.remove(v);
            if self.timed_out {
                return;
            }
        }
    }
}

fn greedy_clique(g: &Graph) -> Vec<usize> {
    let degree = g.degrees();
    let pick = |cands: &BitSet| -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut c = BitSet { words: cands.words.clone() };
        while let Some(v) = c.first() {
            c.remove(v);
            if best.is_none_or(|b| degree[v] > degree[b]) {
                best = Some(v);
            }
        }
        best
    };
    let mut clique = Vec::new();
    let mut cands = BitSet::full(g.n());
    while let Some(v) = pick(&cands) {
        clique.push(v);
        cands = cands.intersect(g.row(v));
    }
    clique
}

/// A maximum clique, or the largest one found before the deadline.
pub fn max_clique(g: &Graph, deadline: Deadline) -> (Vec<usize>, bool) {
    let mut search =
        CliqueSearch { g, best: greedy_clique(g), current: Vec::new(), nodes: 0, deadline, timed_out: false };
    search.expand(BitSet::full(g.n()));
    let mut best = search.best;
    best.sort_unstable();
    (best, !search.timed_out)
}

/// Size of a clique found within the deadline; always a lower bound on χ(G).
pub fn max_clique_lower_bound(g: &Graph, deadline: Deadline) -> usize {
    max_clique(g, deadline).0.len()
}

enum Outcome {
    Found,
    Exhausted,
    TimedOut,
}

struct ColorSearch<'g> {
    n: usize,
    k: usize,
    adj: Vec<Vec<usize>>,
    degree: Vec<usize>,
    colors: Vec<u32>,
    /// `blocked[v * stride + c]` counts neighbors of `v` holding color `c`.
    blocked: Vec<u16>,
    stride: usize,
    saturation: Vec<usize>,
    nodes: u64,
    deadline: Deadline,
    _g: &'g Graph,
}

impl<'g> ColorSearch<'g> {
    fn new(g: &'g Graph, k: usize, deadline: Deadline) -> Self {
        let n = g.n();
        ColorSearch {
            n,
            k,
            adj: (0..n).map(|v| g.neighbors(v).collect()).collect(),
            degree: g.degrees(),
            colors: vec![0; n],
            blocked: vec![0; n * (k + 2)],
            stride: k + 2,
            saturation: vec![0; n],
            nodes: 0,
            deadline,
            _g: g,
        }
    }

    /// Colors `v` with `c`; returns false if some uncolored neighbor is left with no color.
    fn assign(&mut self, v: usize, c: u32) -> bool {
        self.colors[v] = c;
        let mut ok = true;
        for i in 0..self.adj[v].len() {
            let w = self.adj[v][i];
            let slot = &mut self.blocked[w * self.stride + c as usize];
            if *slot == 0 {
                self.saturation[w] += 1;
                if self.colors[w] == 0 && self.saturation[w] >= self.k {
                    ok = false;
                }
            }
            *slot += 1;
        }
        ok
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v] as usize;
        self.colors[v] = 0;
        for i in 0..self.adj[v].len() {
            let w = self.adj[v][i];
            let slot = &mut self.blocked[w * self.stride + c];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[w] -= 1;
            }
        }
    }

    fn select(&self) -> usize {
        let mut best = usize::MAX;
        for v in 0..self.n {
            if self.colors[v] != 0 {
                continue;
            }
            if best == usize::MAX || (self.saturation[v], self.degree[v]) > (self.saturation[best], self.degree[best]) {
                best = v;
            }
        }
        best
    }

    fn search(&mut self, colored: usize, used: usize) -> Outcome {
        if colored == self.n {
            return Outcome::Found;
        }
        if self.nodes.is_multiple_of(CLOCK_INTERVAL) && self.deadline.expired() {
            return Outcome::TimedOut;
        }
        self.nodes += 1;
        let v = self.select();
        let limit = if used < self.k { used + 1 } else { used };
        for c in 1..=limit {
            if self.blocked[v * self.stride + c] != 0 {
                continue;
            }
            let feasible = self.assign(v, c as u32);
            if feasible {
                match self.search(colored + 1, used.max(c)) {
                    Outcome::Exhausted => {}
                    done => return done,
                }
            }
            self.unassign(v);
        }
        Outcome::Exhausted
    }
}

fn k_colorable_with_clique(g: &Graph, k: usize, clique: &[usize], deadline: Deadline) -> KColoring {
    if k == 0 {
        return KColoring::NotColorable;
    }
    if clique.len() > k {
        return KColoring::NotColorable;
    }
    let mut search = ColorSearch::new(g, k, deadline);
    for (i, &v) in clique.iter().enumerate() {
        if !search.assign(v, i as u32 + 1) {
            return KColoring::NotColorable;
        }
    }
    match search.search(clique.len(), clique.len()) {
        Outcome::Found => KColoring::Colorable(Coloring::from_vec_unchecked(search.colors).canonical()),
        Outcome::Exhausted => KColoring::NotColorable,
        Outcome::TimedOut => KColoring::TimedOut,
    }
}

/// Decides whether `g` has a proper coloring with at most `k` colors.
pub fn k_colorable(g: &Graph, k: usize, deadline: Deadline) -> KColoring {
    k_colorable_with_clique(g, k, &greedy_clique(g), deadline)
}

/// Exact chromatic number with an optimal coloring, canonically numbered (color classes
/// ordered by their lowest node id). On timeout the best coloring found is returned with
/// [`SolveStatus::TimedOut`].
pub fn chromatic_number(g: &Graph, timeout: Duration) -> ExactResult {
    let deadline = Deadline::after(timeout);
    let (clique, _) = max_clique(g, deadline);
    let lower_bound = clique.len();
    let mut best = dsatur(g).canonical();
    let mut status = SolveStatus::Exact;
    let mut upper = best.colors_used();
    while upper > lower_bound {
        match k_colorable_with_clique(g, upper - 1, &clique, deadline) {
            KColoring::Colorable(c) => {
                upper = c.colors_used();
                best = c;
            }
            KColoring::NotColorable => break,
            KColoring::TimedOut => {
                status = SolveStatus::TimedOut;
                break;
            }
        }
    }
    ExactResult { chromatic_number: upper, coloring: best, status, lower_bound }
}

/// Smallest `k` such that some assignment in `{1..k}^n` is proper, by plain enumeration.
/// Test oracle only; limited to 10 nodes.
pub fn brute_force_chromatic(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > 10 {
        return Err(Error::TooLarge { n, max: 10 });
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    for k in 1..=n as u32 {
        let mut assignment = vec![1u32; n];
        loop {
            if edges.iter().all(|&(u, v)| assignment[u] != assignment[v]) {
                return Ok(k as usize);
            }
            // odometer increment
            let mut i = 0;
            while i < n && assignment[i] == k {
                assignment[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
            assignment[i] += 1;
        }
    }
    Err(Error::Invariant("no proper coloring with n colors".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_coloring;

    fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    fn k4_minus_edge() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    #[test]
    fn clique_examples() {
        let d = Deadline::never();
        assert_eq!(max_clique_lower_bound(&Graph::complete(5).unwrap(), d), 5);
        assert_eq!(max_clique_lower_bound(&Graph::cycle(5).unwrap(), d), 2);
        assert_eq!(max_clique_lower_bound(&Graph::new(7).unwrap(), d), 1);
        assert_eq!(max_clique_lower_bound(&k4_minus_edge(), d), 3);
    }

    #[test]
    fn clique_degrades_on_expired_deadline() {
        let g = Graph::complete(6).unwrap();
        let expired = Deadline::after(Duration::ZERO);
        assert!(max_clique_lower_bound(&g, expired) >= 1);
    }

    #[test]
    fn k_colorable_examples() {
        let d = Deadline::never();
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(k_colorable(&k3, 2, d), KColoring::NotColorable);
        let KColoring::Colorable(c) = k_colorable(&k3, 3, d) else { panic!() };
        assert!(validate_coloring(&k3, &c).unwrap().is_proper());
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(k_colorable(&c5, 2, d), KColoring::NotColorable);
        let KColoring::Colorable(c) = k_colorable(&c5, 3, d) else { panic!() };
        assert!(validate_coloring(&c5, &c).unwrap().is_proper());
        assert_eq!(k_colorable(&c5, 0, d), KColoring::NotColorable);
    }

    #[test]
    fn chromatic_small_families() {
        for n in 1..=7 {
            let r = chromatic_number(&Graph::complete(n).unwrap(), Duration::from_secs(5));
            assert_eq!((r.chromatic_number, r.status), (n, SolveStatus::Exact));
            let r = chromatic_number(&Graph::new(n).unwrap(), Duration::from_secs(5));
            assert_eq!(r.chromatic_number, 1);
        }
        let r = chromatic_number(&petersen(), Duration::from_secs(5));
        assert_eq!(r.chromatic_number, 3);
        assert_eq!(r.coloring.colors_used(), 3);
        assert!(validate_coloring(&petersen(), &r.coloring).unwrap().is_proper());
    }

    #[test]
    fn exact_coloring_is_canonical() {
        let r = chromatic_number(&Graph::cycle(7).unwrap(), Duration::from_secs(5));
        assert_eq!(r.coloring, r.coloring.canonical());
        assert_eq!(r.coloring.get(0), 1);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_chromatic(&Graph::cycle(5).unwrap()).unwrap(), 3);
        assert_eq!(brute_force_chromatic(&k4_minus_edge()).unwrap(), 3);
        // exhaustive enumeration over the 10-node Petersen graph
        assert_eq!(brute_force_chromatic(&petersen()).unwrap(), 3);
        assert!(brute_force_chromatic(&Graph::new(11).unwrap()).is_err());
    }
}
