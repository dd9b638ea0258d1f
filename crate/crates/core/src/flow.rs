//! Orientations with out-degree bounds ℓ(v) ≤ d⁺(v) ≤ u(v).
//!
//! Feasibility is decided by max-flow on a bipartite edge/vertex network.
//! When no orientation exists, a vertex set S is extracted from a min cut
//! such that either ℓ(S) > e[S] + δ(S) or u(S) < e[S].

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{MultiGraph, Orientation, Vertex};
use crate::lists::{check_end_holes, interval_profile, ForbiddenLists, IntervalProfile, ListError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("bounds at vertex {vertex} are malformed: {lower} > {upper} or above degree {degree}")]
    MalformedBounds {
        vertex: Vertex,
        lower: usize,
        upper: usize,
        degree: usize,
    },
    #[error("{got} bounds for {expected} vertices")]
    WrongLength { expected: usize, got: usize },
    #[error("lists do not have every hole at an end with |F(v)| <= d(v)/2")]
    HypothesisViolated,
    #[error("infeasible bounds but no violating set could be extracted")]
    NoCertificate,
    #[error("bounds derived from end-hole lists were rejected by {0:?}")]
    InternalCertificate(ViolationCertificate),
    #[error(transparent)]
    Lists(#[from] ListError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeBounds {
    lower: Vec<usize>,
    upper: Vec<usize>,
}

impl DegreeBounds {
    pub fn new(g: &MultiGraph, lower: Vec<usize>, upper: Vec<usize>) -> Result<Self, FlowError> {
        let n = g.vertex_count();
        if lower.len() != n || upper.len() != n {
            return Err(FlowError::WrongLength {
                expected: n,
                got: lower.len().min(upper.len()),
            });
        }
        for v in 0..n {
            if lower[v] > upper[v] || upper[v] > g.degree(v) {
                return Err(FlowError::MalformedBounds {
                    vertex: v,
                    lower: lower[v],
                    upper: upper[v],
                    degree: g.degree(v),
                });
            }
        }
        Ok(DegreeBounds { lower, upper })
    }

    pub fn lower(&self, v: Vertex) -> usize {
        self.lower[v]
    }

    pub fn upper(&self, v: Vertex) -> usize {
        self.upper[v]
    }

    pub fn admits(&self, v: Vertex, out_degree: usize) -> bool {
        self.lower[v] <= out_degree && out_degree <= self.upper[v]
    }

    /// Bounds that encode the lists exactly, when each vertex has one home.
    pub fn from_single_homes(g: &MultiGraph, profile: &IntervalProfile) -> Option<Self> {
        let (lower, upper) = profile
            .vertices()
            .iter()
            .map(|p| p.single_home())
            .collect::<Option<(Vec<_>, Vec<_>)>>()?;
        DegreeBounds::new(g, lower, upper).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// ℓ(S) > e[S] + δ(S)
    Lower,
    /// u(S) < e[S]
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolationCertificate {
    pub set: Vec<Vertex>,
    pub kind: ViolationKind,
    /// ℓ(S) or u(S), depending on `kind`.
    pub bound_sum: usize,
    pub internal_edges: usize,
    pub boundary_edges: usize,
}

impl ViolationCertificate {
    fn build(g: &MultiGraph, bounds: &DegreeBounds, member: &[bool], kind: ViolationKind) -> Self {
        let (internal_edges, boundary_edges) = edge_counts(g, member);
        let set: Vec<Vertex> = (0..g.vertex_count()).filter(|&v| member[v]).collect();
        let bound_sum = set
            .iter()
            .map(|&v| match kind {
                ViolationKind::Lower => bounds.lower(v),
                ViolationKind::Upper => bounds.upper(v),
            })
            .sum();
        ViolationCertificate {
            set,
            kind,
            bound_sum,
            internal_edges,
            boundary_edges,
        }
    }

    /// The stored inequality is violated and the stored counts match `g`.
    pub fn recheck(&self, g: &MultiGraph, bounds: &DegreeBounds) -> bool {
        let mut member = vec![false; g.vertex_count()];
        for &v in &self.set {
            if v >= g.vertex_count() {
                return false;
            }
            member[v] = true;
        }
        let fresh = ViolationCertificate::build(g, bounds, &member, self.kind);
        fresh == *self && self.violated()
    }

    pub fn violated(&self) -> bool {
        match self.kind {
            ViolationKind::Lower => self.bound_sum > self.internal_edges + self.boundary_edges,
            ViolationKind::Upper => self.bound_sum < self.internal_edges,
        }
    }
}

/// (e[S], δ(S)) for the vertex set marked in `member`.
pub fn edge_counts(g: &MultiGraph, member: &[bool]) -> (usize, usize) {
    g.edges().iter().fold((0, 0), |(inside, cross), &(a, b)| {
        match (member[a], member[b]) {
            (true, true) => (inside + 1, cross),
            (true, false) | (false, true) => (inside, cross + 1),
            _ => (inside, cross),
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bounded {
    Oriented(Orientation),
    Infeasible(ViolationCertificate),
}

/// Finds an orientation within `bounds` or a violating vertex set.
pub fn bounded_orientation(g: &MultiGraph, bounds: &DegreeBounds) -> Result<Bounded, FlowError> {
    if let Some(d) = feasible_orientation(g, bounds) {
        debug_assert!((0..g.vertex_count()).all(|v| bounds.admits(v, d.out_degree(v))));
        return Ok(Bounded::Oriented(d));
    }
    let upper_caps: Vec<usize> = (0..g.vertex_count()).map(|v| bounds.upper(v)).collect();
    if let Some(member) = one_sided_cut(g, &upper_caps) {
        let cert = ViolationCertificate::build(g, bounds, &member, ViolationKind::Upper);
        if cert.violated() {
            return Ok(Bounded::Infeasible(cert));
        }
    }
    // a lower bound on out-degree is an upper bound on in-degree
    let in_caps: Vec<usize> = (0..g.vertex_count())
        .map(|v| g.degree(v) - bounds.lower(v))
        .collect();
    if let Some(member) = one_sided_cut(g, &in_caps) {
        let cert = ViolationCertificate::build(g, bounds, &member, ViolationKind::Lower);
        if cert.violated() {
            return Ok(Bounded::Infeasible(cert));
        }
    }
    subset_search(g, bounds)
        .map(Bounded::Infeasible)
        .ok_or(FlowError::NoCertificate)
}

const SUBSET_SEARCH_LIMIT: usize = 20;

fn subset_search(g: &MultiGraph, bounds: &DegreeBounds) -> Option<ViolationCertificate> {
    let n = g.vertex_count();
    if n > SUBSET_SEARCH_LIMIT {
        return None;
    }
    for mask in 1u32..(1 << n) {
        let member: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        for kind in [ViolationKind::Upper, ViolationKind::Lower] {
            let cert = ViolationCertificate::build(g, bounds, &member, kind);
            if cert.violated() {
                return Some(cert);
            }
        }
    }
    None
}

/// Node layout shared by both networks.
struct Layout {
    m: usize,
}

impl Layout {
    const SOURCE: usize = 0;
    const SINK: usize = 1;
    const SUPER_SOURCE: usize = 2;
    const SUPER_SINK: usize = 3;

    fn edge(&self, e: usize) -> usize {
        4 + e
    }

    fn vertex(&self, v: usize) -> usize {
        4 + self.m + v
    }
}

fn feasible_orientation(g: &MultiGraph, bounds: &DegreeBounds) -> Option<Orientation> {
    let m = g.edge_count();
    let n = g.vertex_count();
    let layout = Layout { m };
    let mut net = FlowNetwork::new(4 + m + n);
    let mut choice = Vec::with_capacity(m);
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        // every edge node carries exactly one unit: lower = upper = 1 on s->e
        net.add_arc(Layout::SUPER_SOURCE, layout.edge(e), 1);
        let to_a = net.add_arc(layout.edge(e), layout.vertex(a), 1);
        net.add_arc(layout.edge(e), layout.vertex(b), 1);
        choice.push(to_a);
    }
    net.add_arc(Layout::SOURCE, Layout::SUPER_SINK, m as i64);
    let mut lower_total = 0i64;
    for v in 0..n {
        let (lo, hi) = (bounds.lower(v) as i64, bounds.upper(v) as i64);
        net.add_arc(layout.vertex(v), Layout::SINK, hi - lo);
        net.add_arc(layout.vertex(v), Layout::SUPER_SINK, lo);
        lower_total += lo;
    }
    net.add_arc(Layout::SUPER_SOURCE, Layout::SINK, lower_total);
    net.add_arc(Layout::SINK, Layout::SOURCE, m as i64);
    let flow = net.max_flow(Layout::SUPER_SOURCE, Layout::SUPER_SINK);
    if flow != m as i64 + lower_total {
        return None;
    }
    let forward = choice.iter().map(|&arc| net.flow_on(arc) == 1).collect();
    Some(Orientation::from_directions(g, forward).unwrap())
}

/// Max-flow for "each edge picks an endpoint, vertex v picks at most
/// caps[v]". Returns the vertex side of a min cut when some edge is left
/// unassigned.
fn one_sided_cut(g: &MultiGraph, caps: &[usize]) -> Option<Vec<bool>> {
    let m = g.edge_count();
    let n = g.vertex_count();
    let layout = Layout { m };
    let big = m as i64 + 1;
    let mut net = FlowNetwork::new(4 + m + n);
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        net.add_arc(Layout::SOURCE, layout.edge(e), 1);
        net.add_arc(layout.edge(e), layout.vertex(a), big);
        net.add_arc(layout.edge(e), layout.vertex(b), big);
    }
    for (v, &c) in caps.iter().enumerate() {
        net.add_arc(layout.vertex(v), Layout::SINK, c as i64);
    }
    if net.max_flow(Layout::SOURCE, Layout::SINK) == m as i64 {
        return None;
    }
    let side = net.residual_reachable(Layout::SOURCE);
    Some((0..n).map(|v| side[layout.vertex(v)]).collect())
}

/// Dinic's algorithm on an adjacency-list residual graph.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    original: Vec<i64>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        FlowNetwork {
            head: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
            original: Vec::new(),
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> usize {
        let id = self.to.len();
        self.head[from].push(id);
        self.to.push(to);
        self.cap.push(cap);
        self.original.push(cap);
        self.head[to].push(id + 1);
        self.to.push(from);
        self.cap.push(0);
        self.original.push(0);
        id
    }

    fn flow_on(&self, arc: usize) -> i64 {
        self.original[arc] - self.cap[arc]
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.head.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &a in &self.head[x] {
                let y = self.to[a];
                if self.cap[a] > 0 && level[y].is_none() {
                    level[y] = Some(level[x].unwrap() + 1);
                    queue.push_back(y);
                }
            }
        }
        level
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut next = vec![0usize; self.head.len()];
            loop {
                let pushed = self.augment(s, t, i64::MAX, &level, &mut next);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
    }

    fn augment(
        &mut self,
        x: usize,
        t: usize,
        limit: i64,
        level: &[Option<usize>],
        next: &mut [usize],
    ) -> i64 {
        if x == t {
            return limit;
        }
        while next[x] < self.head[x].len() {
            let a = self.head[x][next[x]];
            let y = self.to[a];
            if self.cap[a] > 0 && level[y] == level[x].map(|l| l + 1) {
                let pushed = self.augment(y, t, limit.min(self.cap[a]), level, next);
                if pushed > 0 {
                    self.cap[a] -= pushed;
                    self.cap[a ^ 1] += pushed;
                    return pushed;
                }
            }
            next[x] += 1;
        }
        0
    }

    fn residual_reachable(&self, s: usize) -> Vec<bool> {
        self.levels(s).into_iter().map(|l| l.is_some()).collect()
    }
}

/// F-avoiding orientation for lists whose holes all touch 0 or d(v) and
/// have |F(v)| ≤ d(v)/2: each vertex is bounded to its single home.
pub fn solve_end_holes(g: &MultiGraph, f: &ForbiddenLists) -> Result<Orientation, FlowError> {
    let profile = interval_profile(f, g)?;
    if !check_end_holes(&profile) {
        return Err(FlowError::HypothesisViolated);
    }
    let bounds =
        DegreeBounds::from_single_homes(g, &profile).ok_or(FlowError::HypothesisViolated)?;
    match bounded_orientation(g, &bounds)? {
        Bounded::Oriented(d) => Ok(d),
        Bounded::Infeasible(cert) => Err(FlowError::InternalCertificate(cert)),
    }
}
