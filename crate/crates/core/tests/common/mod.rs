//! Helpers shared by the integration tests. The brute-force counter here is
//! deliberately naive: it recomputes every out-degree from scratch for each
//! of the 2^m orientations and shares no code with the library oracle.

#![allow(dead_code)]

use favoid::{ForbiddenLists, MultiGraph, Orientation};

/// Out-degree vectors of every orientation, bit e set = edge e forward.
pub fn naive_out_degrees(g: &MultiGraph, mask: u64) -> Vec<usize> {
    let mut out = vec![0; g.vertex_count()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if mask >> e & 1 == 1 {
            out[a] += 1;
        } else {
            out[b] += 1;
        }
    }
    out
}

/// Number of orientations whose out-degrees satisfy `ok(v, d⁺(v))` at
/// every vertex.
pub fn naive_count(g: &MultiGraph, ok: impl Fn(usize, usize) -> bool) -> u64 {
    assert!(g.edge_count() <= 20, "naive enumeration is for tiny graphs");
    (0..1u64 << g.edge_count())
        .filter(|&mask| {
            naive_out_degrees(g, mask)
                .iter()
                .enumerate()
                .all(|(v, &k)| ok(v, k))
        })
        .count() as u64
}

pub fn naive_avoiding_count(g: &MultiGraph, f: &ForbiddenLists) -> u64 {
    naive_count(g, |v, k| !f.get(v).contains(&k))
}

/// Out-degrees computed from the arc list, not from the cached counts.
pub fn recount(g: &MultiGraph, d: &Orientation) -> Vec<usize> {
    let mut out = vec![0; g.vertex_count()];
    for (t, _) in d.arcs(g) {
        out[t] += 1;
    }
    out
}

pub fn avoids(g: &MultiGraph, d: &Orientation, f: &ForbiddenLists) -> bool {
    recount(g, d)
        .iter()
        .enumerate()
        .all(|(v, k)| !f.get(v).contains(k))
}

/// e[S] and δ(S), counted edge by edge.
pub fn internal_and_boundary(g: &MultiGraph, set: &[usize]) -> (usize, usize) {
    let inside = |v: usize| set.contains(&v);
    let mut internal = 0;
    let mut boundary = 0;
    for &(a, b) in g.edges() {
        match (inside(a), inside(b)) {
            (true, true) => internal += 1,
            (false, false) => {}
            _ => boundary += 1,
        }
    }
    (internal, boundary)
}

pub mod strategies {
    use std::collections::BTreeSet;

    use favoid::{ForbiddenLists, MultiGraph, Orientation};
    use proptest::collection::vec;
    use proptest::prelude::*;

    /// Loopless multigraph with 2..=max_n vertices and up to max_m edges.
    pub fn graph(max_n: usize, max_m: usize) -> impl Strategy<Value = MultiGraph> {
        (2..=max_n).prop_flat_map(move |n| {
            vec((0..n, 1..n), 0..=max_m).prop_map(move |raw| {
                let pairs: Vec<_> = raw.into_iter().map(|(a, off)| (a, (a + off) % n)).collect();
                MultiGraph::build(n, &pairs).unwrap()
            })
        })
    }

    pub fn oriented(
        max_n: usize,
        max_m: usize,
    ) -> impl Strategy<Value = (MultiGraph, Orientation)> {
        graph(max_n, max_m).prop_flat_map(|g| {
            let m = g.edge_count();
            vec(any::<bool>(), m).prop_map(move |dirs| {
                let d = Orientation::from_directions(&g, dirs).unwrap();
                (g.clone(), d)
            })
        })
    }

    /// Lists with each value in 0..=d(v) forbidden independently.
    pub fn instance(
        max_n: usize,
        max_m: usize,
    ) -> impl Strategy<Value = (MultiGraph, ForbiddenLists)> {
        graph(max_n, max_m).prop_flat_map(|g| {
            let masks: Vec<_> = (0..g.vertex_count())
                .map(|v| vec(prop::bool::weighted(0.3), g.degree(v) + 1))
                .collect();
            masks.prop_map(move |ms| {
                let sets: Vec<BTreeSet<usize>> = ms
                    .iter()
                    .map(|m| {
                        m.iter()
                            .enumerate()
                            .filter(|(_, &b)| b)
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect();
                (g.clone(), ForbiddenLists::new(&g, sets).unwrap())
            })
        })
    }
}
