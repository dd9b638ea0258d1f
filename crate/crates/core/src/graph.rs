//! Loopless multigraphs with stable edge indices, orientations over them,
//! and the directed-path primitives used by the local-search engine.

use std::collections::VecDeque;

use thiserror::Error;

pub type Vertex = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {edge} is a loop at vertex {vertex}")]
    LoopEdge { edge: EdgeId, vertex: Vertex },
    #[error("edge {edge} has endpoint {vertex} outside 0..{n}")]
    BadVertexId {
        edge: EdgeId,
        vertex: Vertex,
        n: usize,
    },
    #[error("vertex {0} out of range")]
    BadVertex(Vertex),
    #[error("not a directed path: {0}")]
    NotADirectedPath(String),
    #[error("arc {tail}->{head} does not match edge {edge}")]
    ArcMismatch {
        edge: EdgeId,
        tail: Vertex,
        head: Vertex,
    },
    #[error("orientation has {got} edges, graph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// An undirected loopless multigraph. Parallel edges are distinct slots and
/// keep the index they were given at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    incidence: Vec<Vec<EdgeId>>,
}

impl MultiGraph {
    pub fn build(n: usize, edge_pairs: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut incidence = vec![Vec::new(); n];
        for (e, &(u, v)) in edge_pairs.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::BadVertexId {
                        edge: e,
                        vertex: w,
                        n,
                    });
                }
            }
            if u == v {
                return Err(GraphError::LoopEdge { edge: e, vertex: u });
            }
            incidence[u].push(e);
            incidence[v].push(e);
        }
        Ok(MultiGraph {
            n,
            edges: edge_pairs.to_vec(),
            incidence,
        })
    }

    pub fn empty(n: usize) -> Self {
        MultiGraph {
            n,
            edges: Vec::new(),
            incidence: vec![Vec::new(); n],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    /// Edge ids incident to `v`, ascending.
    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.incidence[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.incidence.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.incidence.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The other endpoint of `e` seen from `v`.
    pub fn opposite(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// `Some(d)` when every vertex has degree `d`. The empty vertex set counts
    /// as 0-regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.incidence.first().map_or(0, Vec::len);
        self.incidence.iter().all(|i| i.len() == d).then_some(d)
    }

    /// Spanning subgraph keeping only `keep` (in the given order). Returns the
    /// subgraph and, for each of its edges, the parent edge id.
    pub fn edge_subgraph(&self, keep: &[EdgeId]) -> (MultiGraph, Vec<EdgeId>) {
        let pairs: Vec<_> = keep.iter().map(|&e| self.edges[e]).collect();
        let g = MultiGraph::build(self.n, &pairs).expect("subgraph of a valid graph");
        (g, keep.to_vec())
    }

    /// Graph with edge `e` removed; remaining edges keep their relative order.
    pub fn without_edge(&self, e: EdgeId) -> (MultiGraph, Vec<EdgeId>) {
        let keep: Vec<_> = (0..self.edge_count()).filter(|&f| f != e).collect();
        self.edge_subgraph(&keep)
    }

    /// Proper 2-coloring if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                let sx = side[x].unwrap();
                for &e in &self.incidence[x] {
                    let y = self.opposite(e, x);
                    match side[y] {
                        None => {
                            side[y] = Some(!sx);
                            queue.push_back(y);
                        }
                        Some(sy) if sy == sx => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }

    /// Smallest k such that every subgraph has a vertex of degree at most k,
    /// together with the peeling order that certifies it.
    pub fn degeneracy(&self) -> (usize, Vec<Vertex>) {
        let mut deg = self.degrees();
        let max = deg.iter().copied().max().unwrap_or(0);
        let mut buckets: Vec<Vec<Vertex>> = vec![Vec::new(); max + 1];
        for v in 0..self.n {
            buckets[deg[v]].push(v);
        }
        let mut removed = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut k = 0;
        let mut low = 0;
        while order.len() < self.n {
            low = low.min(max);
            while buckets[low].is_empty() {
                low += 1;
            }
            let v = buckets[low].pop().unwrap();
            // stale bucket entries are skipped
            if removed[v] || deg[v] != low {
                continue;
            }
            removed[v] = true;
            k = k.max(low);
            order.push(v);
            for &e in &self.incidence[v] {
                let w = self.opposite(e, v);
                if !removed[w] {
                    deg[w] -= 1;
                    buckets[deg[w]].push(w);
                    low = low.min(deg[w]);
                }
            }
        }
        (k, order)
    }
}

/// Per-edge direction over a [`MultiGraph`], with a cached out-degree vector.
///
/// `forward[e]` means edge `(u, v)` at index `e` points from `u` to `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    forward: Vec<bool>,
    out: Vec<usize>,
}

impl Orientation {
    pub fn from_directions(g: &MultiGraph, forward: Vec<bool>) -> Result<Self, GraphError> {
        if forward.len() != g.edge_count() {
            return Err(GraphError::SizeMismatch {
                expected: g.edge_count(),
                got: forward.len(),
            });
        }
        let mut out = vec![0; g.vertex_count()];
        for (e, &f) in forward.iter().enumerate() {
            let (u, v) = g.endpoints(e);
            out[if f { u } else { v }] += 1;
        }
        Ok(Orientation { forward, out })
    }

    /// Every edge pointing from its first to its second endpoint.
    pub fn all_forward(g: &MultiGraph) -> Self {
        Self::from_directions(g, vec![true; g.edge_count()]).unwrap()
    }

    /// Orientation from explicit `(tail, head)` pairs in edge-index order.
    pub fn from_arcs(g: &MultiGraph, arcs: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        if arcs.len() != g.edge_count() {
            return Err(GraphError::SizeMismatch {
                expected: g.edge_count(),
                got: arcs.len(),
            });
        }
        let mut forward = Vec::with_capacity(arcs.len());
        for (e, &(t, h)) in arcs.iter().enumerate() {
            let (u, v) = g.endpoints(e);
            if (t, h) == (u, v) {
                forward.push(true);
            } else if (t, h) == (v, u) {
                forward.push(false);
            } else {
                return Err(GraphError::ArcMismatch {
                    edge: e,
                    tail: t,
                    head: h,
                });
            }
        }
        Self::from_directions(g, forward)
    }

    pub fn directions(&self) -> &[bool] {
        &self.forward
    }

    pub fn edge_count(&self) -> usize {
        self.forward.len()
    }

    pub fn tail(&self, g: &MultiGraph, e: EdgeId) -> Vertex {
        let (u, v) = g.endpoints(e);
        if self.forward[e] {
            u
        } else {
            v
        }
    }

    pub fn head(&self, g: &MultiGraph, e: EdgeId) -> Vertex {
        let (u, v) = g.endpoints(e);
        if self.forward[e] {
            v
        } else {
            u
        }
    }

    pub fn arcs(&self, g: &MultiGraph) -> Vec<(Vertex, Vertex)> {
        (0..self.forward.len())
            .map(|e| (self.tail(g, e), self.head(g, e)))
            .collect()
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[v]
    }

    pub fn in_degree(&self, g: &MultiGraph, v: Vertex) -> usize {
        g.degree(v) - self.out[v]
    }

    pub fn out_degrees(&self) -> &[usize] {
        &self.out
    }

    /// Reverses one edge in place.
    pub fn flip_edge(&mut self, g: &MultiGraph, e: EdgeId) {
        let t = self.tail(g, e);
        let h = self.head(g, e);
        self.out[t] -= 1;
        self.out[h] += 1;
        self.forward[e] = !self.forward[e];
    }

    /// Points `e` from `tail` to its other endpoint.
    pub fn set_tail(&mut self, g: &MultiGraph, e: EdgeId, tail: Vertex) {
        if self.tail(g, e) != tail {
            self.flip_edge(g, e);
        }
    }

    pub fn points_from(&self, g: &MultiGraph, e: EdgeId, v: Vertex) -> bool {
        self.tail(g, e) == v
    }

    pub fn is_sink(&self, v: Vertex) -> bool {
        self.out[v] == 0
    }

    pub fn is_source(&self, g: &MultiGraph, v: Vertex) -> bool {
        self.out[v] == g.degree(v)
    }

    /// Checks Σ d⁺ = m and that the cache matches the directions.
    pub fn is_consistent(&self, g: &MultiGraph) -> bool {
        match Orientation::from_directions(g, self.forward.clone()) {
            Ok(fresh) => fresh.out == self.out && self.out.iter().sum::<usize>() == g.edge_count(),
            Err(_) => false,
        }
    }
}

/// A simple directed path: `vertices[j] -> vertices[j+1]` realised by `edges[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedPath {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeId>,
}

impl DirectedPath {
    pub fn start(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn end(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    pub fn check(&self, g: &MultiGraph, d: &Orientation) -> Result<(), GraphError> {
        let k = self.vertices.len();
        if k < 2 || self.edges.len() != k - 1 {
            return Err(GraphError::NotADirectedPath(format!(
                "{} vertices with {} edges",
                k,
                self.edges.len()
            )));
        }
        let mut seen = vec![false; g.vertex_count()];
        for &v in &self.vertices {
            if v >= g.vertex_count() {
                return Err(GraphError::BadVertex(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(GraphError::NotADirectedPath(format!("vertex {v} repeats")));
            }
        }
        for (j, &e) in self.edges.iter().enumerate() {
            if e >= g.edge_count() {
                return Err(GraphError::NotADirectedPath(format!("edge {e} absent")));
            }
            let (a, b) = (self.vertices[j], self.vertices[j + 1]);
            if d.tail(g, e) != a || d.head(g, e) != b {
                return Err(GraphError::NotADirectedPath(format!(
                    "edge {e} is not directed {a}->{b}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Forward,
    Backward,
}

fn search(g: &MultiGraph, d: &Orientation, v: Vertex, dir: Dir) -> Vec<Option<EdgeId>> {
    // parent edge per reached vertex; the root gets a sentinel
    let mut parent: Vec<Option<EdgeId>> = vec![None; g.vertex_count()];
    let mut reached = vec![false; g.vertex_count()];
    reached[v] = true;
    let mut queue = VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for &e in g.incident(x) {
            let follows = match dir {
                Dir::Forward => d.tail(g, e) == x,
                Dir::Backward => d.head(g, e) == x,
            };
            if !follows {
                continue;
            }
            let y = g.opposite(e, x);
            if !reached[y] {
                reached[y] = true;
                parent[y] = Some(e);
                queue.push_back(y);
            }
        }
    }
    parent[v] = Some(usize::MAX);
    parent
}

fn to_set(parent: &[Option<EdgeId>]) -> Vec<bool> {
    parent.iter().map(Option::is_some).collect()
}

/// S_v: every vertex reachable from `v` along directed edges, `v` included.
pub fn reachable_from(g: &MultiGraph, d: &Orientation, v: Vertex) -> Vec<bool> {
    to_set(&search(g, d, v, Dir::Forward))
}

/// T_v: every vertex that can reach `v`, `v` included.
pub fn reaching(g: &MultiGraph, d: &Orientation, v: Vertex) -> Vec<bool> {
    to_set(&search(g, d, v, Dir::Backward))
}

/// Shortest directed path from `from` to `to` (BFS), if one exists and
/// the endpoints differ.
pub fn shortest_path(
    g: &MultiGraph,
    d: &Orientation,
    from: Vertex,
    to: Vertex,
) -> Option<DirectedPath> {
    if from == to {
        return None;
    }
    let parent = search(g, d, from, Dir::Forward);
    parent[to]?;
    let mut vertices = vec![to];
    let mut edges = Vec::new();
    let mut x = to;
    while x != from {
        let e = parent[x].unwrap();
        edges.push(e);
        x = g.opposite(e, x);
        vertices.push(x);
    }
    vertices.reverse();
    edges.reverse();
    Some(DirectedPath { vertices, edges })
}

/// Reverses every edge of a directed path. Only the endpoints change
/// out-degree: the start loses one, the end gains one.
pub fn reverse_path(
    g: &MultiGraph,
    d: &Orientation,
    path: &DirectedPath,
) -> Result<Orientation, GraphError> {
    path.check(g, d)?;
    let mut next = d.clone();
    for &e in &path.edges {
        next.flip_edge(g, e);
    }
    Ok(next)
}

/// Reverses every edge: d⁺ becomes d(v) − d⁺ at every vertex.
pub fn reverse_all(g: &MultiGraph, d: &Orientation) -> Orientation {
    let forward = d.forward.iter().map(|f| !f).collect();
    let out = d
        .out
        .iter()
        .enumerate()
        .map(|(v, &o)| g.degree(v) - o)
        .collect();
    Orientation { forward, out }
}
