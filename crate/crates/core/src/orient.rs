//! Constructive base orientations: near-balanced orientations from Euler
//! circuits, {0,1} orientations of max-degree-2 graphs, and the sink/high
//! out-degree orientation of odd regular graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph, Orientation, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrientError {
    #[error("vertex {vertex} has degree {degree}, more than 2")]
    DegreeTooHigh { vertex: Vertex, degree: usize },
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    WrongDegree {
        vertex: Vertex,
        degree: usize,
        expected: usize,
    },
    #[error("vertex {0} has odd degree")]
    NotEulerian(Vertex),
    #[error("k must be positive")]
    ZeroK,
}

/// A closed trail as `(edge, tail)` pairs in traversal order.
pub type Circuit = Vec<(EdgeId, Vertex)>;

/// Hierholzer's algorithm on every component with edges. Requires every
/// degree to be even.
pub fn euler_circuits(g: &MultiGraph) -> Result<Vec<Circuit>, OrientError> {
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) % 2 == 1) {
        return Err(OrientError::NotEulerian(v));
    }
    let mut used = vec![false; g.edge_count()];
    let mut next = vec![0usize; g.vertex_count()];
    let mut circuits = Vec::new();
    for start in 0..g.vertex_count() {
        if next[start] == g.degree(start) {
            continue;
        }
        let mut stack: Vec<(Vertex, Option<(EdgeId, Vertex)>)> = vec![(start, None)];
        let mut circuit = Vec::new();
        while let Some(&(x, _)) = stack.last() {
            let inc = g.incident(x);
            while next[x] < inc.len() && used[inc[next[x]]] {
                next[x] += 1;
            }
            if next[x] < inc.len() {
                let e = inc[next[x]];
                used[e] = true;
                stack.push((g.opposite(e, x), Some((e, x))));
            } else {
                let (_, via) = stack.pop().unwrap();
                if let Some(step) = via {
                    circuit.push(step);
                }
            }
        }
        circuit.reverse();
        if !circuit.is_empty() {
            circuits.push(circuit);
        }
    }
    Ok(circuits)
}

/// An orientation with |d⁺(v) − d⁻(v)| ≤ 1 everywhere and equality at
/// every even-degree vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedOrientation {
    pub orientation: Orientation,
    pub imbalance: Vec<i64>,
}

/// Joins a dummy vertex to every odd-degree vertex, follows Euler circuits
/// of the result and keeps the traversal directions on the real edges.
pub fn balanced_orientation(g: &MultiGraph) -> BalancedOrientation {
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut pairs = g.edges().to_vec();
    pairs.extend((0..n).filter(|&v| g.degree(v) % 2 == 1).map(|v| (v, n)));
    let augmented = MultiGraph::build(n + 1, &pairs).expect("dummy edges are loopless");
    let circuits = euler_circuits(&augmented).expect("augmented graph has even degrees");

    let mut forward = vec![true; m];
    for &(e, tail) in circuits.iter().flatten() {
        if e < m {
            forward[e] = g.endpoints(e).0 == tail;
        }
    }
    let orientation = Orientation::from_directions(g, forward).unwrap();
    let imbalance = (0..n)
        .map(|v| 2 * orientation.out_degree(v) as i64 - g.degree(v) as i64)
        .collect();
    BalancedOrientation {
        orientation,
        imbalance,
    }
}

/// Orients a graph of maximum degree 2 so every out-degree is 0 or 1.
pub fn orient_h_component(h: &MultiGraph) -> Result<Orientation, OrientError> {
    if let Some(v) = (0..h.vertex_count()).find(|&v| h.degree(v) > 2) {
        return Err(OrientError::DegreeTooHigh {
            vertex: v,
            degree: h.degree(v),
        });
    }
    Ok(balanced_orientation(h).orientation)
}

/// Greedy maximal independent set, scanning vertices in `order`.
pub fn greedy_independent_set(g: &MultiGraph, order: &[Vertex]) -> Vec<bool> {
    let mut chosen = vec![false; g.vertex_count()];
    let mut blocked = vec![false; g.vertex_count()];
    for &v in order {
        if blocked[v] {
            continue;
        }
        chosen[v] = true;
        blocked[v] = true;
        for &e in g.incident(v) {
            blocked[g.opposite(e, v)] = true;
        }
    }
    chosen
}

/// Vertex scan order for the independent set inside [`extreme_avoiding_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOrder {
    Ascending,
    Shuffled(u64),
}

/// For a (2k+1)-regular graph, an orientation whose out-degrees avoid
/// {1, …, k}.
pub fn extreme_avoiding(g: &MultiGraph, k: usize) -> Result<Orientation, OrientError> {
    extreme_avoiding_with(g, k, ScanOrder::Ascending)
}

/// Vertices of a maximal independent set become sinks. Every other vertex
/// has a neighbour among them, so it keeps at most 2k edges among the rest,
/// and a balanced orientation there leaves it at most k in-edges.
pub fn extreme_avoiding_with(
    g: &MultiGraph,
    k: usize,
    order: ScanOrder,
) -> Result<Orientation, OrientError> {
    if k == 0 {
        return Err(OrientError::ZeroK);
    }
    let d = 2 * k + 1;
    if let Some(v) = (0..g.vertex_count()).find(|&v| g.degree(v) != d) {
        return Err(OrientError::WrongDegree {
            vertex: v,
            degree: g.degree(v),
            expected: d,
        });
    }
    let mut scan: Vec<Vertex> = (0..g.vertex_count()).collect();
    if let ScanOrder::Shuffled(seed) = order {
        scan.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let sinks = greedy_independent_set(g, &scan);
    debug_assert!((0..g.vertex_count())
        .all(|v| sinks[v] || g.incident(v).iter().any(|&e| sinks[g.opposite(e, v)])));

    let inner: Vec<EdgeId> = (0..g.edge_count())
        .filter(|&e| {
            let (a, b) = g.endpoints(e);
            !sinks[a] && !sinks[b]
        })
        .collect();
    let (sub, map) = g.edge_subgraph(&inner);
    debug_assert!(sub.max_degree() <= 2 * k);
    let inner_orientation = balanced_orientation(&sub).orientation;

    let mut d_out = Orientation::all_forward(g);
    for e in 0..g.edge_count() {
        let (a, b) = g.endpoints(e);
        if sinks[a] {
            d_out.set_tail(g, e, b);
        } else if sinks[b] {
            d_out.set_tail(g, e, a);
        }
    }
    for (se, &e) in map.iter().enumerate() {
        d_out.set_tail(g, e, inner_orientation.tail(&sub, se));
    }
    Ok(d_out)
}
