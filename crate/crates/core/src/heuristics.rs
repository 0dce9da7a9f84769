//! Classical greedy colorings: first-fit, DSATUR and RLF.
//!
//! DSATUR doubles as the register-allocator baseline in comparisons. All tie-breaks
//! are fixed (saturation, then degree, then lowest id) so results are reproducible.

use crate::error::Result;
use crate::graph::{check_permutation, Coloring, Graph};

/// Smallest color >= 1 not set in `used` (bit `c` means color `c` is taken).
fn first_free(used: &[u64]) -> u32 {
    for (wi, &w) in used.iter().enumerate() {
        let free = !w & if wi == 0 { !1 } else { !0 };
        if free != 0 {
            return (wi * 64) as u32 + free.trailing_zeros();
        }
    }
    (used.len() * 64) as u32
}

fn color_words(n: usize) -> usize {
    (n + 2).div_ceil(64)
}

/// First-fit coloring visiting nodes in `order`.
pub fn greedy_sequential(g: &Graph, order: &[usize]) -> Result<Coloring> {
    check_permutation(order, g.n())?;
    let mut colors = vec![0u32; g.n()];
    let mut used = vec![0u64; color_words(g.n())];
    for &v in order {
        used.iter_mut().for_each(|w| *w = 0);
        for w in g.neighbors(v) {
            let c = colors[w] as usize;
            if c > 0 {
                used[c / 64] |= 1 << (c % 64);
            }
        }
        colors[v] = first_free(&used);
    }
    Ok(Coloring::from_vec_unchecked(colors))
}

/// Brélaz's DSATUR.
pub fn dsatur(g: &Graph) -> Coloring {
    let n = g.n();
    let words = color_words(n);
    let degree = g.degrees();
    let mut colors = vec![0u32; n];
    let mut neighbor_colors = vec![0u64; n * words];
    let mut saturation = vec![0u32; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| colors[v] == 0)
            .max_by(|&a, &b| saturation[a].cmp(&saturation[b]).then(degree[a].cmp(&degree[b])).then(b.cmp(&a)))
            .expect("an uncolored vertex remains");
        let c = first_free(&neighbor_colors[v * words..(v + 1) * words]);
        colors[v] = c;
        let (wi, bit) = (c as usize / 64, 1u64 << (c % 64));
        for w in g.neighbors(v) {
            let slot = &mut neighbor_colors[w * words + wi];
            if *slot & bit == 0 {
                *slot |= bit;
                saturation[w] += 1;
            }
        }
    }
    Coloring::from_vec_unchecked(colors)
}

/// Leighton's Recursive Largest First: builds one maximal independent color class at a time.
pub fn rlf(g: &Graph) -> Coloring {
    let n = g.n();
    let mut colors = vec![0u32; n];
    let mut uncolored: Vec<bool> = vec![true; n];
    let mut remaining = n;
    let mut color = 0;
    while remaining > 0 {
        color += 1;
        let seed = (0..n)
            .filter(|&v| uncolored[v])
            .max_by(|&a, &b| {
                let da = g.neighbors(a).filter(|&w| uncolored[w]).count();
                let db = g.neighbors(b).filter(|&w| uncolored[w]).count();
                da.cmp(&db).then(b.cmp(&a))
            })
            .expect("an uncolored vertex remains");
        // candidates: may still join this class; forbidden: adjacent to the class
        let mut candidate = uncolored.clone();
        let mut forbidden = vec![false; n];
        let mut take = |v: usize, candidate: &mut Vec<bool>, forbidden: &mut Vec<bool>| {
            colors[v] = color;
            uncolored[v] = false;
            candidate[v] = false;
            for w in g.neighbors(v) {
                if candidate[w] {
                    candidate[w] = false;
                    forbidden[w] = true;
                }
            }
        };
        take(seed, &mut candidate, &mut forbidden);
        remaining -= 1;
        loop {
            let next = (0..n).filter(|&v| candidate[v]).max_by(|&a, &b| {
                let fa = g.neighbors(a).filter(|&w| forbidden[w]).count();
                let fb = g.neighbors(b).filter(|&w| forbidden[w]).count();
                fa.cmp(&fb).then(b.cmp(&a))
            });
            let Some(v) = next else { break };
            take(v, &mut candidate, &mut forbidden);
            remaining -= 1;
        }
    }
    Coloring::from_vec_unchecked(colors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_coloring;

    fn used(c: &Coloring) -> usize {
        c.colors_used()
    }

    #[test]
    fn greedy_examples() {
        let e = Graph::new(5).unwrap();
        assert!(greedy_sequential(&e, &[4, 3, 2, 1, 0]).unwrap().as_slice().iter().all(|&c| c == 1));
        let k4 = Graph::complete(4).unwrap();
        let c = greedy_sequential(&k4, &[2, 0, 3, 1]).unwrap();
        let mut s = c.as_slice().to_vec();
        s.sort();
        assert_eq!(s, vec![1, 2, 3, 4]);
        assert!(greedy_sequential(&k4, &[0, 1, 2]).is_err());
    }

    #[test]
    fn greedy_crown_worst_order() {
        // crown graph with interleaved order forces n/2 colors
        let mut g = Graph::new(8).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    g.add_edge(2 * i, 2 * j + 1).unwrap();
                }
            }
        }
        let c = greedy_sequential(&g, &(0..8).collect::<Vec<_>>()).unwrap();
        assert_eq!(used(&c), 4);
        assert!(validate_coloring(&g, &c).unwrap().is_proper());
        assert_eq!(used(&dsatur(&g)), 2);
    }

    #[test]
    fn dsatur_examples() {
        assert_eq!(used(&dsatur(&Graph::cycle(5).unwrap())), 3);
        assert_eq!(used(&dsatur(&Graph::cycle(8).unwrap())), 2);
        assert_eq!(used(&dsatur(&Graph::path(7).unwrap())), 2);
        assert_eq!(dsatur(&Graph::new(3).unwrap()).as_slice(), &[1, 1, 1]);
    }

    #[test]
    fn dsatur_tie_break_is_lowest_id() {
        // all equal: first pick is node 0
        let c = dsatur(&Graph::cycle(4).unwrap());
        assert_eq!(c.as_slice(), &[1, 2, 1, 2]);
    }

    #[test]
    fn rlf_examples() {
        assert_eq!(used(&rlf(&Graph::new(6).unwrap())), 1);
        assert_eq!(used(&rlf(&Graph::complete(6).unwrap())), 6);
        let c6 = Graph::cycle(6).unwrap();
        let c = rlf(&c6);
        assert_eq!(used(&c), 2);
        assert!(validate_coloring(&c6, &c).unwrap().is_proper());
    }
}
