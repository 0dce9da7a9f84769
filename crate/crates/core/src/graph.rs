//! Dense graph and coloring types shared by every stage of the pipeline.
//!
//! A [`Graph`] is a simple undirected graph stored as a symmetric adjacency
//! bit-matrix. Interference graphs handled here are small (100 nodes by
//! default), so the dense form is both the cheapest representation and the
//! one the sequence model consumes directly.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on graph size for sample rows and the model.
pub const DEFAULT_MAX_NODES: usize = 100;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph").field("n", &self.n).field("edges", &self.edges().collect::<Vec<_>>()).finish()
    }
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let words = n.div_ceil(64);
        Ok(Graph { n, words, bits: vec![0; n * words] })
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::new(n)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::new(n)?;
        for u in 0..n {
            for v in u + 1..n {
                g.set(u, v);
            }
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("cycle needs at least 3 nodes, got {n}")));
        }
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self> {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    /// Adds the undirected edge `u`-`v`. Adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.set(u, v);
        Ok(())
    }

    fn set(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::NodeOutOfRange { node: v, n: self.n })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    /// Adjacency row of `v` as 64-bit words, bit `j % 64` of word `j / 64` set iff `v`-`j` is an edge.
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        bfs_order_from(self, 0).len() == self.n
    }
}

/// Per-node color assignment, colors numbered from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coloring(Vec<u32>);

impl Coloring {
    /// Every entry must lie in `1..=len`: a graph on n nodes never needs more than n colors.
    pub fn new(colors: Vec<u32>) -> Result<Self> {
        let n = colors.len();
        for (node, &color) in colors.iter().enumerate() {
            if color == 0 || color as usize > n {
                return Err(Error::InvalidColor { node, color, n });
            }
        }
        Ok(Coloring(colors))
    }

    pub fn uniform(n: usize, color: u32) -> Result<Self> {
        Coloring::new(vec![color; n])
    }

    pub(crate) fn from_vec_unchecked(colors: Vec<u32>) -> Self {
        debug_assert!(Coloring::new(colors.clone()).is_ok());
        Coloring(colors)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn get(&self, v: usize) -> u32 {
        self.0[v]
    }

    pub fn palette(&self) -> Palette {
        Palette(self.0.iter().copied().collect())
    }

    pub fn colors_used(&self) -> usize {
        self.palette().len()
    }

    /// Renumbers color classes in order of their lowest node id, so node 0 gets color 1,
    /// the first node outside class 1 gets color 2, and so on. Preserves the partition.
    pub fn canonical(&self) -> Coloring {
        let mut map = std::collections::HashMap::new();
        let colors = self
            .0
            .iter()
            .map(|&c| {
                let next = map.len() as u32 + 1;
                *map.entry(c).or_insert(next)
            })
            .collect();
        Coloring(colors)
    }
}

/// Set of distinct colors currently in use.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Palette(BTreeSet<u32>);

impl Palette {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, color: u32) -> bool {
        self.0.contains(&color)
    }

    pub fn insert(&mut self, color: u32) -> bool {
        self.0.insert(color)
    }

    /// Ascending iteration.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    /// Smallest positive color not in the palette.
    pub fn first_absent(&self) -> u32 {
        let mut c = 1;
        for &used in &self.0 {
            if used != c {
                break;
            }
            c += 1;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringReport {
    pub colors_used: usize,
    /// Monochromatic edges `(u, v)` with `u < v`, lexicographic.
    pub invalid_edges: Vec<(usize, usize)>,
    /// `invalid_edges.len() / m`, or 0 for an edgeless graph.
    pub invalid_fraction: f64,
}

impl ColoringReport {
    pub fn is_proper(&self) -> bool {
        self.invalid_edges.is_empty()
    }
}

pub fn validate_coloring(g: &Graph, c: &Coloring) -> Result<ColoringReport> {
    if c.len() != g.n() {
        return Err(Error::LengthMismatch { expected: g.n(), got: c.len() });
    }
    let mut edges = 0usize;
    let mut invalid_edges = Vec::new();
    for (u, v) in g.edges() {
        edges += 1;
        if c.get(u) == c.get(v) {
            invalid_edges.push((u, v));
        }
    }
    let invalid_fraction = if edges == 0 { 0.0 } else { invalid_edges.len() as f64 / edges as f64 };
    Ok(ColoringReport { colors_used: c.colors_used(), invalid_edges, invalid_fraction })
}

pub fn is_proper(g: &Graph, c: &[u32]) -> bool {
    c.len() == g.n() && g.edges().all(|(u, v)| c[u] != c[v])
}

fn bfs_order_from(g: &Graph, start: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    let mut order = Vec::with_capacity(g.n());
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order
}

/// Breadth-first visit order from `start`; neighbors are enqueued in ascending id order and
/// nodes unreachable from `start` are appended in ascending id order.
pub fn bfs_permutation(g: &Graph, start: usize) -> Result<Vec<usize>> {
    g.check_node(start)?;
    let mut order = bfs_order_from(g, start);
    let mut seen = vec![false; g.n()];
    for &v in &order {
        seen[v] = true;
    }
    order.extend((0..g.n()).filter(|&v| !seen[v]));
    Ok(order)
}

pub fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPermutation(n));
        }
    }
    Ok(())
}

/// Relabels nodes so that node `i` of the result is node `perm[i]` of `g`.
pub fn apply_permutation(g: &Graph, perm: &[usize]) -> Result<Graph> {
    check_permutation(perm, g.n())?;
    let mut inverse = vec![0; g.n()];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p] = i;
    }
    Graph::from_edges(g.n(), g.edges().map(|(u, v)| (inverse[u], inverse[v])))
}

/// Coloring of the permuted graph: node `i` takes the color of original node `perm[i]`.
pub fn permute_coloring(c: &Coloring, perm: &[usize]) -> Result<Coloring> {
    check_permutation(perm, c.len())?;
    Ok(Coloring(perm.iter().map(|&p| c.get(p)).collect()))
}

/// Inverse of [`permute_coloring`]: maps a coloring of the permuted graph back to original ids.
pub fn unpermute_coloring(c: &Coloring, perm: &[usize]) -> Result<Coloring> {
    check_permutation(perm, c.len())?;
    let mut colors = vec![0; c.len()];
    for (i, &p) in perm.iter().enumerate() {
        colors[p] = c.get(i);
    }
    Ok(Coloring(colors))
}
