//! Lasso local search.
//!
//! A lasso is a directed path `v1 → … → vk` plus a closing edge `vk → vi`
//! (out-lasso), or the same with every edge reversed (in-lasso). Flipping it
//! reverses `v1 … vi` and the closing edge, which changes out-degrees only
//! at v1, vi and vk: by (−1, +2, −1) for an out-lasso and (+1, −2, +1) for
//! an in-lasso.
//!
//! The search repeatedly moves a vertex with a forbidden out-degree into an
//! adjacent home using path reversals and lasso flips. Every accepted move
//! strictly decreases the potential (|D_F|, −|D_X|), so at most (n+1)²
//! moves are made.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    reachable_from, reaching, reverse_path, shortest_path, EdgeId, GraphError, MultiGraph,
    Orientation, Vertex,
};
use crate::lists::{
    check_lasso_lists, interval_profile, potential, ForbiddenLists, IntervalProfile, ListError,
    Potential, VertexClassification,
};
use crate::orient::balanced_orientation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoError {
    #[error("vertex {0} reaches and is reached by another vertex")]
    PreconditionViolated(Vertex),
    #[error("stale lasso: {0}")]
    StaleLasso(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LassoKind {
    Out,
    In,
}

/// `vertices[anchor]` is the vertex hit by the closing edge; it is never the
/// first or the last vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub kind: LassoKind,
    pub vertices: Vec<Vertex>,
    pub anchor: usize,
    /// `path_edges[j]` joins `vertices[j]` and `vertices[j + 1]`.
    pub path_edges: Vec<EdgeId>,
    pub closing_edge: EdgeId,
}

impl Lasso {
    pub fn start(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn anchor_vertex(&self) -> Vertex {
        self.vertices[self.anchor]
    }

    pub fn end(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }

    pub fn check(&self, g: &MultiGraph, d: &Orientation) -> Result<(), LassoError> {
        let k = self.vertices.len();
        if k < 3 || self.path_edges.len() != k - 1 || self.anchor == 0 || self.anchor + 1 >= k {
            return Err(LassoError::StaleLasso(format!(
                "shape: {k} vertices, anchor {}",
                self.anchor
            )));
        }
        let mut seen = vec![false; g.vertex_count()];
        for &v in &self.vertices {
            if v >= g.vertex_count() || std::mem::replace(&mut seen[v], true) {
                return Err(LassoError::StaleLasso(format!(
                    "vertex {v} invalid or repeated"
                )));
            }
        }
        let arc_ok = |e: EdgeId, from: Vertex, to: Vertex| {
            e < g.edge_count() && d.tail(g, e) == from && d.head(g, e) == to
        };
        for (j, &e) in self.path_edges.iter().enumerate() {
            let (a, b) = (self.vertices[j], self.vertices[j + 1]);
            let ok = match self.kind {
                LassoKind::Out => arc_ok(e, a, b),
                LassoKind::In => arc_ok(e, b, a),
            };
            if !ok {
                return Err(LassoError::StaleLasso(format!("path edge {e} misdirected")));
            }
        }
        let (end, anchor) = (self.end(), self.anchor_vertex());
        let ok = match self.kind {
            LassoKind::Out => arc_ok(self.closing_edge, end, anchor),
            LassoKind::In => arc_ok(self.closing_edge, anchor, end),
        };
        if !ok {
            return Err(LassoError::StaleLasso(format!(
                "closing edge {} misdirected",
                self.closing_edge
            )));
        }
        Ok(())
    }
}

/// Grows a non-extendable directed path from `v` (forward for `Out`,
/// backward for `In`), always stepping to the lowest-id new vertex, and
/// closes it with the terminal vertex's lowest-id edge back into the path.
///
/// Requires S_v ∩ T_v = {v}. Returns `None` when the terminal vertex is a
/// sink (`Out`) or a source (`In`).
pub fn find_lasso(
    g: &MultiGraph,
    d: &Orientation,
    v: Vertex,
    kind: LassoKind,
) -> Result<Option<Lasso>, LassoError> {
    if v >= g.vertex_count() {
        return Err(GraphError::BadVertex(v).into());
    }
    let ahead = reachable_from(g, d, v);
    let behind = reaching(g, d, v);
    if (0..g.vertex_count()).any(|w| w != v && ahead[w] && behind[w]) {
        return Err(LassoError::PreconditionViolated(v));
    }
    // edges leaving x in the search direction
    let steps = |x: Vertex| {
        g.incident(x).iter().copied().filter(move |&e| match kind {
            LassoKind::Out => d.tail(g, e) == x,
            LassoKind::In => d.head(g, e) == x,
        })
    };

    let mut position = vec![usize::MAX; g.vertex_count()];
    let mut vertices = vec![v];
    let mut path_edges = Vec::new();
    position[v] = 0;
    loop {
        let x = *vertices.last().unwrap();
        let next = steps(x)
            .map(|e| (g.opposite(e, x), e))
            .filter(|&(y, _)| position[y] == usize::MAX)
            .min();
        match next {
            Some((y, e)) => {
                position[y] = vertices.len();
                vertices.push(y);
                path_edges.push(e);
            }
            None => break,
        }
    }
    let terminal = *vertices.last().unwrap();
    let closing = steps(terminal)
        .filter(|&e| {
            let p = position[g.opposite(e, terminal)];
            p >= 1 && p + 1 < vertices.len()
        })
        .min();
    Ok(closing.map(|closing_edge| Lasso {
        kind,
        anchor: position[g.opposite(closing_edge, terminal)],
        vertices,
        path_edges,
        closing_edge,
    }))
}

pub fn flip_lasso(
    g: &MultiGraph,
    d: &Orientation,
    lasso: &Lasso,
) -> Result<Orientation, LassoError> {
    lasso.check(g, d)?;
    let mut next = d.clone();
    for &e in &lasso.path_edges[..lasso.anchor] {
        next.flip_edge(g, e);
    }
    next.flip_edge(g, lasso.closing_edge);
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MoveKind {
    PathReversal,
    OutLassoFlip,
    InLassoFlip,
}

impl MoveKind {
    fn tag(self) -> &'static str {
        match self {
            MoveKind::PathReversal => "path",
            MoveKind::OutLassoFlip => "out-lasso",
            MoveKind::InLassoFlip => "in-lasso",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub kind: MoveKind,
    /// Path vertices in direction of travel, or the lasso's vertex sequence.
    pub vertices: Vec<Vertex>,
    pub anchor: Option<usize>,
    pub before: Potential,
    pub after: Potential,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(usize::to_string).collect();
        write!(f, "kind={} vertices={}", self.kind.tag(), vs.join(","))?;
        if let Some(a) = self.anchor {
            write!(f, " anchor={a}")?;
        }
        write!(f, " before={} after={}", self.before, self.after)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MoveTrace {
    pub moves: Vec<Move>,
}

impl MoveTrace {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// One move per line.
    pub fn to_log(&self) -> String {
        self.moves.iter().map(|m| format!("{m}\n")).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.moves.iter().all(|m| m.after.improves_on(&m.before))
            && self.moves.windows(2).all(|w| w[0].after == w[1].before)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Done,
    Moved(Orientation, Move),
    Stuck,
}

/// How the engine picks among eligible vertices and candidates.
#[derive(Debug, Clone)]
pub enum Policy {
    /// Lowest ids first.
    Deterministic,
    Random(Box<ChaCha8Rng>),
}

impl Policy {
    pub fn seeded(seed: u64) -> Self {
        Policy::Random(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    fn order(&mut self, items: &mut [Vertex]) {
        if let Policy::Random(rng) = self {
            items.shuffle(rng);
        }
    }
}

/// One improving move from `d`, lowest-id choices throughout.
pub fn improve_step(g: &MultiGraph, d: &Orientation, profile: &IntervalProfile) -> Step {
    improve_step_with(g, d, profile, &mut Policy::Deterministic)
}

pub fn improve_step_with(
    g: &MultiGraph,
    d: &Orientation,
    profile: &IntervalProfile,
    policy: &mut Policy,
) -> Step {
    let before = potential(d, profile);
    if before.forbidden == 0 {
        return Step::Done;
    }
    let mut bad: Vec<Vertex> = (0..g.vertex_count())
        .filter(|&v| profile.vertex(v).class(d.out_degree(v)).forbidden)
        .collect();
    policy.order(&mut bad);
    for v in bad {
        let out = d.out_degree(v);
        let vp = profile.vertex(v);
        let raise = out < vp.degree && vp.class(out + 1).above_hole;
        let lower = out >= 1 && vp.class(out - 1).below_hole;
        if raise {
            if let Some(step) = raise_vertex(g, d, profile, v, before, policy) {
                return step;
            }
        }
        if lower {
            if let Some(step) = lower_vertex(g, d, profile, v, before, policy) {
                return step;
            }
        }
    }
    Step::Stuck
}

fn members(flags: &[bool], skip: Vertex, policy: &mut Policy) -> Vec<Vertex> {
    let mut vs: Vec<Vertex> = (0..flags.len())
        .filter(|&w| w != skip && flags[w])
        .collect();
    policy.order(&mut vs);
    vs
}

fn try_path(
    g: &MultiGraph,
    d: &Orientation,
    profile: &IntervalProfile,
    from: Vertex,
    to: Vertex,
    before: Potential,
) -> Option<Step> {
    let path = shortest_path(g, d, from, to)?;
    let next = reverse_path(g, d, &path).ok()?;
    let after = potential(&next, profile);
    after.improves_on(&before).then_some({
        Step::Moved(
            next,
            Move {
                kind: MoveKind::PathReversal,
                vertices: path.vertices,
                anchor: None,
                before,
                after,
            },
        )
    })
}

fn try_lasso(
    g: &MultiGraph,
    d: &Orientation,
    profile: &IntervalProfile,
    v: Vertex,
    kind: LassoKind,
    before: Potential,
) -> Option<Step> {
    let lasso = find_lasso(g, d, v, kind).ok()??;
    let next = flip_lasso(g, d, &lasso).ok()?;
    let after = potential(&next, profile);
    after.improves_on(&before).then_some({
        Step::Moved(
            next,
            Move {
                kind: match kind {
                    LassoKind::Out => MoveKind::OutLassoFlip,
                    LassoKind::In => MoveKind::InLassoFlip,
                },
                vertices: lasso.vertices,
                anchor: Some(lasso.anchor),
                before,
                after,
            },
        )
    })
}

/// v has d⁺(v) + 1 just above a hole: push one unit of out-degree into v.
fn raise_vertex(
    g: &MultiGraph,
    d: &Orientation,
    profile: &IntervalProfile,
    v: Vertex,
    before: Potential,
    policy: &mut Policy,
) -> Option<Step> {
    let behind = reaching(g, d, v);
    let ahead = reachable_from(g, d, v);
    // a w -> v reversal from a vertex not sitting just above a hole
    let feeders: Vec<Vertex> = members(&behind, v, policy)
        .into_iter()
        .filter(|&w| !profile.vertex(w).class(d.out_degree(w)).above_hole)
        .collect();
    for w in feeders {
        if let Some(step) = try_path(g, d, profile, w, v, before) {
            return Some(step);
        }
    }
    let both: Vec<bool> = behind.iter().zip(&ahead).map(|(a, b)| *a && *b).collect();
    let cyclic = members(&both, v, policy);
    if !cyclic.is_empty() {
        return cyclic
            .into_iter()
            .find_map(|u| try_path(g, d, profile, v, u, before));
    }
    try_lasso(g, d, profile, v, LassoKind::In, before)
}

/// v has d⁺(v) − 1 just below a hole: take one unit of out-degree from v.
fn lower_vertex(
    g: &MultiGraph,
    d: &Orientation,
    profile: &IntervalProfile,
    v: Vertex,
    before: Potential,
    policy: &mut Policy,
) -> Option<Step> {
    let behind = reaching(g, d, v);
    let ahead = reachable_from(g, d, v);
    let drains: Vec<Vertex> = members(&ahead, v, policy)
        .into_iter()
        .filter(|&u| !profile.vertex(u).class(d.out_degree(u)).below_hole)
        .collect();
    for u in drains {
        if let Some(step) = try_path(g, d, profile, v, u, before) {
            return Some(step);
        }
    }
    let both: Vec<bool> = behind.iter().zip(&ahead).map(|(a, b)| *a && *b).collect();
    let cyclic = members(&both, v, policy);
    if !cyclic.is_empty() {
        // w sits just below a hole; sending one unit w -> v moves w away from it
        return cyclic
            .into_iter()
            .find_map(|w| try_path(g, d, profile, w, v, before));
    }
    try_lasso(g, d, profile, v, LassoKind::Out, before)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Initial {
    Given(Orientation),
    Balanced,
    Random(u64),
}

impl Initial {
    pub fn build(&self, g: &MultiGraph) -> Orientation {
        match self {
            Initial::Given(d) => d.clone(),
            Initial::Balanced => balanced_orientation(g).orientation,
            Initial::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let dirs = (0..g.edge_count()).map(|_| rng.gen()).collect();
                Orientation::from_directions(g, dirs).unwrap()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoOutcome {
    pub success: bool,
    pub orientation: Orientation,
    pub trace: MoveTrace,
    /// Whether the lists meet the hypothesis under which success is certain.
    pub lists_qualify: bool,
    /// Classification of the final orientation when the search stopped early.
    pub stuck: Option<VertexClassification>,
}

/// Runs [`improve_step`] to a fixpoint, capped at (n+1)² moves.
pub fn lasso_solve(
    g: &MultiGraph,
    f: &ForbiddenLists,
    initial: Initial,
) -> Result<LassoOutcome, ListError> {
    lasso_solve_with(g, f, initial, Policy::Deterministic)
}

pub fn lasso_solve_with(
    g: &MultiGraph,
    f: &ForbiddenLists,
    initial: Initial,
    mut policy: Policy,
) -> Result<LassoOutcome, ListError> {
    let profile = interval_profile(f, g)?;
    let lists_qualify = check_lasso_lists(&profile);
    let mut d = initial.build(g);
    if d.edge_count() != g.edge_count() {
        d = balanced_orientation(g).orientation;
    }
    let cap = (g.vertex_count() + 1).pow(2);
    let mut trace = MoveTrace::default();
    loop {
        if trace.len() > cap {
            break;
        }
        match improve_step_with(g, &d, &profile, &mut policy) {
            Step::Done => {
                return Ok(LassoOutcome {
                    success: true,
                    orientation: d,
                    trace,
                    lists_qualify,
                    stuck: None,
                })
            }
            Step::Moved(next, mv) => {
                d = next;
                trace.moves.push(mv);
            }
            Step::Stuck => break,
        }
    }
    let stuck = Some(crate::lists::classify(&d, &profile));
    Ok(LassoOutcome {
        success: false,
        orientation: d,
        trace,
        lists_qualify,
        stuck,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::oracle::verify;

    fn lasso_graph() -> (MultiGraph, Orientation) {
        // v=0 -> a=1 -> b=2 -> c=3 -> a
        let g = MultiGraph::build(4, &[(0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        let d = Orientation::all_forward(&g);
        (g, d)
    }

    #[test]
    fn finds_out_lasso() {
        let (g, d) = lasso_graph();
        let l = find_lasso(&g, &d, 0, LassoKind::Out).unwrap().unwrap();
        assert_eq!(l.vertices, vec![0, 1, 2, 3]);
        assert_eq!(l.anchor_vertex(), 1);
        assert_eq!(l.closing_edge, 3);
        let types: Vec<_> = [l.start(), l.anchor_vertex(), l.end()]
            .iter()
            .map(|&x| d.out_degree(x))
            .collect();
        assert_eq!(types, vec![1, 1, 1]);
    }

    #[test]
    fn sink_terminal_gives_none() {
        let g = MultiGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let d = Orientation::all_forward(&g);
        assert_eq!(find_lasso(&g, &d, 0, LassoKind::Out).unwrap(), None);
    }

    #[test]
    fn cycle_through_start_is_rejected() {
        let g = MultiGraph::build(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = Orientation::all_forward(&g);
        assert_eq!(
            find_lasso(&g, &d, 0, LassoKind::Out),
            Err(LassoError::PreconditionViolated(0))
        );
    }

    #[test]
    fn out_flip_deltas() {
        let (g, d) = lasso_graph();
        let l = find_lasso(&g, &d, 0, LassoKind::Out).unwrap().unwrap();
        let e = flip_lasso(&g, &d, &l).unwrap();
        assert_eq!(e.out_degrees(), &[0, 3, 1, 0]);
        assert_eq!(e.out_degrees().iter().sum::<usize>(), 4);
        // the old lasso no longer matches
        assert!(matches!(
            flip_lasso(&g, &e, &l),
            Err(LassoError::StaleLasso(_))
        ));
    }

    #[test]
    fn in_flip_deltas_and_double_flip() {
        let (g, d) = lasso_graph();
        let r = crate::graph::reverse_all(&g, &d);
        let l = find_lasso(&g, &r, 0, LassoKind::In).unwrap().unwrap();
        assert_eq!(l.vertices, vec![0, 1, 2, 3]);
        let before = r.out_degrees().to_vec();
        let e = flip_lasso(&g, &r, &l).unwrap();
        let delta: Vec<i64> = (0..4)
            .map(|v| e.out_degree(v) as i64 - before[v] as i64)
            .collect();
        assert_eq!(delta, vec![1, -2, 0, 1]);
        // flipping the same edge set again restores the out-degrees
        let mut back = e.clone();
        for &x in l.path_edges[..l.anchor].iter().chain([&l.closing_edge]) {
            back.flip_edge(&g, x);
        }
        assert_eq!(back.out_degrees(), &before[..]);
    }

    #[test]
    fn parallel_closing_edge() {
        // 0 -> 1 -> 2 and 2 -> 1 through a parallel edge
        let g = MultiGraph::build(3, &[(0, 1), (1, 2), (2, 1)]).unwrap();
        let d = Orientation::all_forward(&g);
        let l = find_lasso(&g, &d, 0, LassoKind::Out).unwrap().unwrap();
        assert_eq!(l.anchor, 1);
        let e = flip_lasso(&g, &d, &l).unwrap();
        assert_eq!(e.out_degrees(), &[0, 3, 0]);
    }

    #[test]
    fn done_when_nothing_forbidden() {
        let g = MultiGraph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let p = interval_profile(&ForbiddenLists::empty(3), &g).unwrap();
        assert_eq!(
            improve_step(&g, &Orientation::all_forward(&g), &p),
            Step::Done
        );
        let out = lasso_solve(&g, &ForbiddenLists::empty(3), Initial::Balanced).unwrap();
        assert!(out.success && out.trace.is_empty());
    }

    fn clique(n: usize) -> MultiGraph {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
        MultiGraph::build(n, &pairs).unwrap()
    }

    #[test]
    fn k6_middle_pair() {
        let g = clique(6);
        let f = ForbiddenLists::common(&g, &BTreeSet::from([2, 3])).unwrap();
        let p = interval_profile(&f, &g).unwrap();
        let start = balanced_orientation(&g).orientation;
        match improve_step(&g, &start, &p) {
            Step::Moved(_, mv) => assert!(mv.after.improves_on(&mv.before)),
            other => panic!("{other:?}"),
        }
        let out = lasso_solve(&g, &f, Initial::Balanced).unwrap();
        assert!(out.success && out.lists_qualify);
        assert!(verify(&g, &out.orientation, &f).ok);
        assert!(out.trace.strictly_decreasing());
        assert!(out.trace.len() <= 49);
    }

    #[test]
    fn k8_middle_pair() {
        let g = clique(8);
        let f = ForbiddenLists::common(&g, &BTreeSet::from([3, 4])).unwrap();
        let out = lasso_solve(&g, &f, Initial::Balanced).unwrap();
        assert!(out.success);
        assert!(verify(&g, &out.orientation, &f).ok);
    }

    #[test]
    fn trace_log_is_line_oriented() {
        let g = clique(6);
        let f = ForbiddenLists::common(&g, &BTreeSet::from([2, 3])).unwrap();
        let out = lasso_solve(&g, &f, Initial::Balanced).unwrap();
        let log = out.trace.to_log();
        assert_eq!(log.lines().count(), out.trace.len());
        for line in log.lines() {
            assert!(line.starts_with("kind="));
            assert!(line.contains(" before=") && line.contains(" after="));
        }
    }
}
