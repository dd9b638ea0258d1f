//! Exhaustive ground truth over all 2^m orientations.
//!
//! Orientations are walked in Gray-code order so each step flips one edge
//! and updates two out-degrees. Large instances are split across threads by
//! fixing the directions of the highest-indexed edges.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{MultiGraph, Orientation, Vertex};
use crate::lists::ForbiddenLists;

pub const DEFAULT_BUDGET: usize = 24;

/// Hard ceiling regardless of the requested budget; the counters are u64.
const MAX_EDGES: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{edges} edges exceed the enumeration budget of {budget}")]
    BudgetExceeded { edges: usize, budget: usize },
    #[error("{got} lists for {expected} vertices")]
    WrongLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub witness: Option<Orientation>,
    pub solution_count: u64,
    pub enumerated_count: u64,
}

/// Counts F-avoiding orientations of `g` by full enumeration.
pub fn oracle_decide(
    g: &MultiGraph,
    f: &ForbiddenLists,
    budget: usize,
) -> Result<OracleResult, OracleError> {
    if f.len() != g.vertex_count() {
        return Err(OracleError::WrongLength {
            expected: g.vertex_count(),
            got: f.len(),
        });
    }
    enumerate_allowed(g, budget, |v, k| !f.forbids(v, k))
}

/// Counts orientations whose out-degree at every vertex `v` satisfies
/// `allowed(v, d⁺(v))`.
pub fn enumerate_allowed(
    g: &MultiGraph,
    budget: usize,
    allowed: impl Fn(Vertex, usize) -> bool,
) -> Result<OracleResult, OracleError> {
    let m = g.edge_count();
    if m > budget || m > MAX_EDGES {
        return Err(OracleError::BudgetExceeded {
            edges: m,
            budget: budget.min(MAX_EDGES),
        });
    }
    let table = AllowedTable::new(g, allowed);
    let prefix_bits = if m >= 16 { 6 } else { 0 };
    let low_bits = m - prefix_bits;
    let chunks: Vec<ChunkResult> = (0..1u64 << prefix_bits)
        .into_par_iter()
        .map(|chunk| run_chunk(g, &table, chunk, low_bits))
        .collect();

    let solution_count = chunks.iter().map(|c| c.solutions).sum();
    let witness = chunks
        .into_iter()
        .find_map(|c| c.witness)
        .map(|bits| orientation_from_bits(g, bits));
    Ok(OracleResult {
        status: if solution_count > 0 {
            OracleStatus::Sat
        } else {
            OracleStatus::Unsat
        },
        witness,
        solution_count,
        enumerated_count: 1u64 << m,
    })
}

struct AllowedTable {
    offsets: Vec<usize>,
    allowed: Vec<bool>,
}

impl AllowedTable {
    fn new(g: &MultiGraph, allowed: impl Fn(Vertex, usize) -> bool) -> Self {
        let mut offsets = Vec::with_capacity(g.vertex_count());
        let mut table = Vec::new();
        for v in 0..g.vertex_count() {
            offsets.push(table.len());
            table.extend((0..=g.degree(v)).map(|k| allowed(v, k)));
        }
        AllowedTable {
            offsets,
            allowed: table,
        }
    }

    #[inline]
    fn ok(&self, v: Vertex, k: usize) -> bool {
        self.allowed[self.offsets[v] + k]
    }
}

struct ChunkResult {
    solutions: u64,
    witness: Option<u64>,
}

/// Bit e set means edge e points from its first to its second endpoint.
fn orientation_from_bits(g: &MultiGraph, bits: u64) -> Orientation {
    let dirs = (0..g.edge_count()).map(|e| bits >> e & 1 == 1).collect();
    Orientation::from_directions(g, dirs).expect("bit vector sized to the graph")
}

fn run_chunk(g: &MultiGraph, table: &AllowedTable, chunk: u64, low_bits: usize) -> ChunkResult {
    let edges = g.edges();
    let mut bits = chunk << low_bits;
    let mut out = vec![0usize; g.vertex_count()];
    for (e, &(u, v)) in edges.iter().enumerate() {
        out[if bits >> e & 1 == 1 { u } else { v }] += 1;
    }
    let mut bad = (0..g.vertex_count())
        .filter(|&v| !table.ok(v, out[v]))
        .count();

    let mut solutions = 0u64;
    let mut witness = None;
    let total = 1u64 << low_bits;
    let mut step = 0u64;
    loop {
        if bad == 0 {
            solutions += 1;
            witness.get_or_insert(bits);
        }
        step += 1;
        if step == total {
            break;
        }
        let e = step.trailing_zeros() as usize;
        let (u, v) = edges[e];
        let (from, to) = if bits >> e & 1 == 1 { (u, v) } else { (v, u) };
        bits ^= 1 << e;
        for (w, delta) in [(from, -1isize), (to, 1)] {
            let before = table.ok(w, out[w]);
            out[w] = (out[w] as isize + delta) as usize;
            let after = table.ok(w, out[w]);
            match (before, after) {
                (true, false) => bad += 1,
                (false, true) => bad -= 1,
                _ => {}
            }
        }
    }
    ChunkResult { solutions, witness }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub ok: bool,
    /// `(vertex, out-degree)` for every vertex whose out-degree is forbidden.
    pub violations: Vec<(Vertex, usize)>,
}

pub fn verify(g: &MultiGraph, d: &Orientation, f: &ForbiddenLists) -> Verification {
    assert_eq!(d.edge_count(), g.edge_count(), "orientation/graph mismatch");
    let violations: Vec<_> = (0..g.vertex_count())
        .map(|v| (v, d.out_degree(v)))
        .filter(|&(v, k)| f.forbids(v, k))
        .collect();
    Verification {
        ok: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;

    fn clique(n: usize) -> MultiGraph {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
        MultiGraph::build(n, &pairs).unwrap()
    }

    fn common(g: &MultiGraph, xs: &[usize]) -> ForbiddenLists {
        ForbiddenLists::common(g, &xs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn triangle_avoiding_one_is_unsat() {
        let g = clique(3);
        let r = oracle_decide(&g, &common(&g, &[1]), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, OracleStatus::Unsat);
        assert_eq!(r.solution_count, 0);
        assert_eq!(r.enumerated_count, 8);
        assert!(r.witness.is_none());
    }

    #[test]
    fn single_edge_empty_lists() {
        let g = clique(2);
        let r = oracle_decide(&g, &ForbiddenLists::empty(2), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, OracleStatus::Sat);
        assert_eq!(r.solution_count, 2);
    }

    #[test]
    fn k5_middle_is_unsat() {
        let g = clique(5);
        let r = oracle_decide(&g, &common(&g, &[2, 3]), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.status, OracleStatus::Unsat);
        assert_eq!(r.enumerated_count, 1024);
    }

    #[test]
    fn budget_is_enforced() {
        let g = clique(5);
        let err = oracle_decide(&g, &ForbiddenLists::empty(5), 9).unwrap_err();
        assert_eq!(
            err,
            OracleError::BudgetExceeded {
                edges: 10,
                budget: 9
            }
        );
    }

    #[test]
    fn chunked_enumeration_matches_formula() {
        // 17 edges forces the threaded path; empty lists admit everything
        let pairs: Vec<_> = (0..17).map(|i| (i % 4, (i % 4 + 1 + i % 3) % 5)).collect();
        let pairs: Vec<_> = pairs.into_iter().filter(|(a, b)| a != b).collect();
        let g = MultiGraph::build(5, &pairs).unwrap();
        let r = oracle_decide(&g, &ForbiddenLists::empty(5), DEFAULT_BUDGET).unwrap();
        assert_eq!(r.solution_count, 1 << g.edge_count());
    }

    #[test]
    fn verify_reports_violations() {
        let tri = clique(3);
        let cyc = Orientation::from_arcs(&tri, &[(0, 1), (2, 0), (1, 2)]).unwrap();
        let v = verify(&tri, &cyc, &common(&tri, &[1]));
        assert!(!v.ok);
        assert_eq!(v.violations.len(), 3);
        assert!(verify(&tri, &cyc, &ForbiddenLists::empty(3)).ok);

        let path = MultiGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let d = Orientation::from_arcs(&path, &[(0, 1), (1, 2)]).unwrap();
        let f = ForbiddenLists::new(
            &path,
            vec![BTreeSet::new(), [1].into_iter().collect(), BTreeSet::new()],
        )
        .unwrap();
        let v = verify(&path, &d, &f);
        assert_eq!(v.violations, vec![(1, 1)]);
    }
}
