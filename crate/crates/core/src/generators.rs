//! Seeded instance families and random list schemes.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{MultiGraph, Vertex};
use crate::lists::{ForbiddenLists, VertexProfile};
use crate::reductions::Decomposition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("n*d = {n}*{d} is odd")]
    ParityError { n: usize, d: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),
    #[error("no loopless pairing found after {0} attempts")]
    Exhausted(usize),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const RESTARTS: usize = 1000;

/// Configuration model: stubs are paired uniformly at random. A loop is
/// repaired by swapping a stub with a random other pair; after too many
/// failed repairs the pairing restarts. Parallel edges are kept.
pub fn gen_regular(n: usize, d: usize, seed: u64) -> Result<MultiGraph, GenError> {
    if n * d % 2 == 1 {
        return Err(GenError::ParityError { n, d });
    }
    if n == 1 && d > 0 {
        return Err(GenError::InvalidParameter(
            "a single vertex cannot carry edges".into(),
        ));
    }
    let mut rng = rng(seed);
    let mut stubs: Vec<Vertex> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let pairs = stubs.len() / 2;
    for _ in 0..RESTARTS {
        stubs.shuffle(&mut rng);
        let mut budget = 10 * stubs.len() + 10;
        let mut i = 0;
        while i < pairs && budget > 0 {
            if stubs[2 * i] != stubs[2 * i + 1] {
                i += 1;
                continue;
            }
            budget -= 1;
            let j = rng.gen_range(0..pairs);
            if j == i {
                continue;
            }
            let side = rng.gen_range(0..2);
            stubs.swap(2 * i + 1, 2 * j + side);
            // the swap may have created a loop at j
            if stubs[2 * j] == stubs[2 * j + 1] {
                i = i.min(j);
            }
        }
        if (0..pairs).all(|k| stubs[2 * k] != stubs[2 * k + 1]) {
            let edges: Vec<_> = (0..pairs)
                .map(|k| (stubs[2 * k], stubs[2 * k + 1]))
                .collect();
            return Ok(MultiGraph::build(n, &edges).expect("pairing is loopless"));
        }
    }
    Err(GenError::Exhausted(RESTARTS))
}

pub fn gen_clique(n: usize) -> MultiGraph {
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b));
        }
    }
    MultiGraph::build(n, &pairs).unwrap()
}

/// Each new vertex gets one or two edges to earlier vertices (possibly
/// parallel), so the graph is 2-degenerate by construction.
pub fn gen_2degenerate(n: usize, seed: u64) -> MultiGraph {
    let mut rng = rng(seed);
    let mut pairs = Vec::new();
    for v in 1..n {
        let k = rng.gen_range(1..=2);
        for _ in 0..k {
            pairs.push((rng.gen_range(0..v), v));
        }
    }
    MultiGraph::build(n, &pairs).unwrap()
}

/// K₆ with the matching {01, 23, 45} cut down to its first `size` edges
/// removed. `size = 3` gives K₂,₂,₂.
pub fn gen_k6_minus_matching(size: usize) -> Result<MultiGraph, GenError> {
    if size > 3 {
        return Err(GenError::InvalidParameter(format!(
            "K6 has no matching of size {size}"
        )));
    }
    let removed: Vec<(usize, usize)> = [(0, 1), (2, 3), (4, 5)][..size].to_vec();
    let pairs: Vec<_> = gen_clique(6)
        .edges()
        .iter()
        .copied()
        .filter(|p| !removed.contains(p))
        .collect();
    Ok(MultiGraph::build(6, &pairs).unwrap())
}

/// For K₂,₂,₂ from [`gen_k6_minus_matching`]: the edges at part {0,1} form
/// K₂,₄ and the rest form the 4-cycle 2-4-3-5.
pub fn k222_decomposition(g: &MultiGraph) -> Decomposition {
    let mut dec = Decomposition::default();
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if a < 2 || b < 2 {
            dec.bipartite.push(e);
        } else {
            dec.h.push(e);
        }
    }
    dec
}

/// Random bipartite graph on parts 0..a and a..a+b, each pair kept with
/// probability `p`.
pub fn gen_bipartite(a: usize, b: usize, p: f64, seed: u64) -> Result<MultiGraph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::InvalidParameter(format!("probability {p}")));
    }
    let mut rng = rng(seed);
    let mut pairs = Vec::new();
    for x in 0..a {
        for y in a..a + b {
            if rng.gen_bool(p) {
                pairs.push((x, y));
            }
        }
    }
    Ok(MultiGraph::build(a + b, &pairs).unwrap())
}

/// `m` uniformly random loopless edges on `n` vertices.
pub fn gen_multigraph(n: usize, m: usize, seed: u64) -> Result<MultiGraph, GenError> {
    if n < 2 && m > 0 {
        return Err(GenError::InvalidParameter(
            "need two vertices for an edge".into(),
        ));
    }
    let mut rng = rng(seed);
    let pairs: Vec<_> = (0..m)
        .map(|_| {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            (a, b)
        })
        .collect();
    Ok(MultiGraph::build(n, &pairs).unwrap())
}

/// Random subsets of 0..=d(v), each value kept with probability `p`.
pub fn arbitrary_lists(g: &MultiGraph, p: f64, rng: &mut impl Rng) -> ForbiddenLists {
    let sets = (0..g.vertex_count())
        .map(|v| (0..=g.degree(v)).filter(|_| rng.gen_bool(p)).collect())
        .collect();
    ForbiddenLists::new(g, sets).unwrap()
}

/// Random lists with |F(v)| < d(v)/2 (empty at isolated vertices).
pub fn strict_half_lists(g: &MultiGraph, rng: &mut impl Rng) -> ForbiddenLists {
    let sets = (0..g.vertex_count())
        .map(|v| {
            let d = g.degree(v);
            let max = d.saturating_sub(1) / 2;
            let k = rng.gen_range(0..=max);
            random_subset(d, k, rng)
        })
        .collect();
    ForbiddenLists::new(g, sets).unwrap()
}

/// Random lists whose holes all touch 0 or d(v), with |F(v)| ≤ d(v)/2.
pub fn end_hole_lists(g: &MultiGraph, rng: &mut impl Rng) -> ForbiddenLists {
    let sets = (0..g.vertex_count())
        .map(|v| {
            let d = g.degree(v);
            let total = rng.gen_range(0..=d / 2);
            let low = rng.gen_range(0..=total);
            let mut s: BTreeSet<usize> = (0..low).collect();
            s.extend((d + 1 - (total - low))..=d);
            s
        })
        .collect();
    ForbiddenLists::new(g, sets).unwrap()
}

/// Random lists meeting the lasso hypothesis: holes of size ≤ 2, interior
/// homes of size ≥ 3, and each end a hole of size one or a home of size ≥ 2.
pub fn lasso_lists(g: &MultiGraph, rng: &mut impl Rng) -> ForbiddenLists {
    let sets = (0..g.vertex_count())
        .map(|v| {
            let d = g.degree(v);
            // rejection sampling over random hole layouts; ∅ always qualifies
            (0..50)
                .map(|_| random_holes(d, rng))
                .find(|s| VertexProfile::new(d, s).lasso_compatible(false))
                .unwrap_or_default()
        })
        .collect();
    ForbiddenLists::new(g, sets).unwrap()
}

fn random_holes(d: usize, rng: &mut impl Rng) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    let mut x = if rng.gen_bool(0.3) {
        0
    } else {
        rng.gen_range(2..=4)
    };
    while x <= d {
        let len = rng.gen_range(1..=2);
        s.extend(x..(x + len).min(d + 1));
        x += len + rng.gen_range(3..=5);
    }
    s
}

fn random_subset(d: usize, k: usize, rng: &mut impl Rng) -> BTreeSet<usize> {
    let mut values: Vec<usize> = (0..=d).collect();
    values.shuffle(rng);
    values.into_iter().take(k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lists::{
        check_end_holes, check_lasso_lists, check_strict_half_solvable, interval_profile,
    };

    #[test]
    fn regular_two_vertices() {
        let g = gen_regular(2, 6, 1).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert!(g.edges().iter().all(|&(a, b)| a != b));
    }

    #[test]
    fn regular_stub_count_and_parity() {
        for seed in 0..20 {
            let g = gen_regular(6, 5, seed).unwrap();
            assert_eq!(g.edge_count(), 15);
            assert_eq!(g.regular_degree(), Some(5));
        }
        assert_eq!(
            gen_regular(5, 5, 0),
            Err(GenError::ParityError { n: 5, d: 5 })
        );
    }

    #[test]
    fn families() {
        assert_eq!(gen_clique(5).edge_count(), 10);
        let k222 = gen_k6_minus_matching(3).unwrap();
        assert_eq!(k222.regular_degree(), Some(4));
        let dec = k222_decomposition(&k222);
        assert_eq!(dec.bipartite.len(), 8);
        assert_eq!(dec.h.len(), 4);
        assert!(gen_k6_minus_matching(4).is_err());
        for seed in 0..10 {
            assert!(gen_2degenerate(15, seed).degeneracy().0 <= 2);
            assert!(gen_bipartite(4, 5, 0.5, seed)
                .unwrap()
                .bipartition()
                .is_some());
        }
    }

    #[test]
    fn list_schemes_meet_their_conditions() {
        let mut r = rng(9);
        for seed in 0..30 {
            let g = gen_multigraph(7, 14, seed).unwrap();
            let f = strict_half_lists(&g, &mut r);
            assert!(check_strict_half_solvable(&f, &g));
            let f = end_hole_lists(&g, &mut r);
            assert!(check_end_holes(&interval_profile(&f, &g).unwrap()));
            let f = lasso_lists(&g, &mut r);
            assert!(check_lasso_lists(&interval_profile(&f, &g).unwrap()));
        }
    }
}
