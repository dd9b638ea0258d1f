//! Edge-deletion reductions with lift instructions, and the two solvers
//! built from them: complete elimination for 2-degenerate graphs, and the
//! bipartite-plus-H decomposition.
//!
//! Each rule deletes one edge and adjusts at most two lists. Any orientation
//! of the reduced instance that avoids the adjusted lists lifts to one of
//! the parent that avoids the original lists, by orienting the deleted edge
//! as the step prescribes.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::flow::solve_end_holes;
use crate::graph::{EdgeId, MultiGraph, Orientation, Vertex};
use crate::lasso::{lasso_solve_with, Initial, Policy};
use crate::lists::{
    check_end_holes, check_strict_half_solvable, interval_profile, shift_list_down, ForbiddenLists,
    ListError,
};
use crate::oracle::{oracle_decide, verify, DEFAULT_BUDGET};
use crate::orient::orient_h_component;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("some vertex has |F(v)| >= d(v)/2")]
    BoundViolated,
    #[error("vertex {0} has degree outside 1..=2")]
    NotLowDegree(Vertex),
    #[error("vertex {0} has low degree but a nonempty list")]
    NonEmptyListAtLowDegree(Vertex),
    #[error("graph is {0}-degenerate, not 2-degenerate")]
    NotTwoDegenerate(usize),
    #[error("bad decomposition: {0}")]
    BadDecomposition(String),
    #[error("bipartite sub-solver `{0}` found no orientation")]
    SubSolverFailed(&'static str),
    #[error(transparent)]
    Lists(#[from] ListError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: MultiGraph,
    pub lists: ForbiddenLists,
}

impl Instance {
    pub fn new(graph: MultiGraph, lists: ForbiddenLists) -> Self {
        Instance { graph, lists }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    /// Edge between an `𝒜` vertex and a `𝓑` vertex.
    EdgeAb,
    /// Low-degree vertex next to u with d(u) ∈ F(u).
    LowDegreeTop,
    /// Low-degree vertex next to u with F(u) = ∅.
    LowDegreePlain,
    /// Low-degree vertex next to u; drop α = max F(u).
    LowDegreeShift,
    HShift,
}

/// How to orient the deleted edge once the reduced instance is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Lift {
    Fixed {
        edge: EdgeId,
        tail: Vertex,
    },
    /// Orient `hub -> leaf` if the hub's reduced out-degree equals `alpha`,
    /// else `leaf -> hub`.
    Threshold {
        edge: EdgeId,
        hub: Vertex,
        leaf: Vertex,
        alpha: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub rule: Rule,
    /// Parent id of the deleted edge.
    pub removed_edge: EdgeId,
    /// `edge_map[i]` is the parent id of reduced edge `i`.
    pub edge_map: Vec<EdgeId>,
    /// `(vertex, old list, new list)` for every list that changed.
    pub list_changes: Vec<(Vertex, BTreeSet<usize>, BTreeSet<usize>)>,
    pub lift: Lift,
}

impl ReductionStep {
    pub fn lift(
        &self,
        parent: &MultiGraph,
        reduced: &MultiGraph,
        sub: &Orientation,
    ) -> Orientation {
        let mut d = Orientation::all_forward(parent);
        for (i, &e) in self.edge_map.iter().enumerate() {
            d.set_tail(parent, e, sub.tail(reduced, i));
        }
        match self.lift {
            Lift::Fixed { edge, tail } => d.set_tail(parent, edge, tail),
            Lift::Threshold {
                edge,
                hub,
                leaf,
                alpha,
            } => {
                let tail = if sub.out_degree(hub) == alpha {
                    hub
                } else {
                    leaf
                };
                d.set_tail(parent, edge, tail);
            }
        }
        d
    }
}

fn replace_lists(
    lists: &ForbiddenLists,
    changes: &[(Vertex, BTreeSet<usize>, BTreeSet<usize>)],
) -> Vec<BTreeSet<usize>> {
    let mut sets = lists.sets().to_vec();
    for (v, _, new) in changes {
        sets[*v] = new.clone();
    }
    sets
}

fn apply(
    inst: &Instance,
    rule: Rule,
    edge: EdgeId,
    list_changes: Vec<(Vertex, BTreeSet<usize>, BTreeSet<usize>)>,
    lift: Lift,
) -> Result<(Instance, ReductionStep), ReduceError> {
    let (graph, edge_map) = inst.graph.without_edge(edge);
    let lists = ForbiddenLists::new(&graph, replace_lists(&inst.lists, &list_changes))?;
    let reduced = Instance { graph, lists };
    debug_assert!(check_strict_half_solvable(&reduced.lists, &reduced.graph));
    Ok((
        reduced,
        ReductionStep {
            rule,
            removed_edge: edge,
            edge_map,
            list_changes,
            lift,
        },
    ))
}

/// Deletes an edge `uv` with u ∈ 𝒜 = {even degree} ∪ {d(u) ∈ F(u)} and
/// v ∈ 𝓑 = {even degree} ∪ {0 ∈ F(v)}. The lift orients it `v -> u`.
pub fn edge_ab_reduce(inst: &Instance) -> Result<Option<(Instance, ReductionStep)>, ReduceError> {
    let (g, f) = (&inst.graph, &inst.lists);
    if !check_strict_half_solvable(f, g) {
        return Err(ReduceError::BoundViolated);
    }
    let top = |w: Vertex| f.forbids(w, g.degree(w));
    let even = |w: Vertex| g.degree(w) % 2 == 0;
    let in_a = |w: Vertex| even(w) || top(w);
    let in_b = |w: Vertex| even(w) || f.forbids(w, 0);

    for (e, &(x, y)) in g.edges().iter().enumerate() {
        let pick = if in_a(x) && in_b(y) {
            Some((x, y))
        } else if in_a(y) && in_b(x) {
            Some((y, x))
        } else {
            None
        };
        let Some((u, v)) = pick else { continue };
        let mut changes = Vec::new();
        if top(u) {
            let mut nu = f.get(u).clone();
            nu.remove(&g.degree(u));
            changes.push((u, f.get(u).clone(), nu));
        }
        changes.push((v, f.get(v).clone(), shift_list_down(f.get(v))));
        return apply(
            inst,
            Rule::EdgeAb,
            e,
            changes,
            Lift::Fixed { edge: e, tail: v },
        )
        .map(Some);
    }
    Ok(None)
}

/// Removes one edge at a vertex `v0` of degree 1 or 2 (whose list must be
/// empty).
pub fn low_degree_eliminate(
    inst: &Instance,
    v0: Vertex,
) -> Result<(Instance, ReductionStep), ReduceError> {
    let (g, f) = (&inst.graph, &inst.lists);
    if !(1..=2).contains(&g.degree(v0)) {
        return Err(ReduceError::NotLowDegree(v0));
    }
    if !f.get(v0).is_empty() {
        return Err(ReduceError::NonEmptyListAtLowDegree(v0));
    }
    let e = g.incident(v0)[0];
    let u = g.opposite(e, v0);
    let fu = f.get(u);
    let du = g.degree(u);
    if fu.contains(&du) {
        let mut nu = fu.clone();
        nu.remove(&du);
        apply(
            inst,
            Rule::LowDegreeTop,
            e,
            vec![(u, fu.clone(), nu)],
            Lift::Fixed { edge: e, tail: v0 },
        )
    } else if fu.is_empty() {
        apply(
            inst,
            Rule::LowDegreePlain,
            e,
            Vec::new(),
            Lift::Fixed { edge: e, tail: v0 },
        )
    } else {
        // d(u) ∉ F(u), so α + 1 is allowed
        let alpha = *fu.iter().next_back().unwrap();
        let mut nu = fu.clone();
        nu.remove(&alpha);
        apply(
            inst,
            Rule::LowDegreeShift,
            e,
            vec![(u, fu.clone(), nu)],
            Lift::Threshold {
                edge: e,
                hub: u,
                leaf: v0,
                alpha,
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub orientation: Orientation,
    pub steps: Vec<ReductionStep>,
}

/// Eliminates edges at minimum-degree vertices until none are left, then
/// replays the lifts in reverse.
pub fn two_degenerate_solve(inst: &Instance) -> Result<Elimination, ReduceError> {
    let (k, _) = inst.graph.degeneracy();
    if k > 2 {
        return Err(ReduceError::NotTwoDegenerate(k));
    }
    if !check_strict_half_solvable(&inst.lists, &inst.graph) {
        return Err(ReduceError::BoundViolated);
    }
    let mut chain = vec![inst.clone()];
    let mut steps = Vec::with_capacity(inst.graph.edge_count());
    loop {
        let cur = chain.last().unwrap();
        let g = &cur.graph;
        let Some(v0) = (0..g.vertex_count())
            .filter(|&v| g.degree(v) > 0)
            .min_by_key(|&v| (g.degree(v), v))
        else {
            break;
        };
        let (next, step) = low_degree_eliminate(cur, v0)?;
        chain.push(next);
        steps.push(step);
    }
    let mut d = Orientation::all_forward(&chain.last().unwrap().graph);
    for (i, step) in steps.iter().enumerate().rev() {
        d = step.lift(&chain[i].graph, &chain[i + 1].graph, &d);
    }
    Ok(Elimination {
        orientation: d,
        steps,
    })
}

/// Splits E(G) into a bipartite part and a part H of maximum degree 2.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Decomposition {
    pub bipartite: Vec<EdgeId>,
    pub h: Vec<EdgeId>,
}

/// Solver for the bipartite remainder. It is expected to succeed whenever
/// |F(v)| ≤ d(v)/2.
pub trait BipartiteSolver {
    fn name(&self) -> &'static str;
    fn solve(&self, g: &MultiGraph, f: &ForbiddenLists) -> Option<Orientation>;
}

/// Exhaustive enumeration.
#[derive(Debug, Clone, Copy)]
pub struct ExhaustiveSubSolver {
    pub budget: usize,
}

impl Default for ExhaustiveSubSolver {
    fn default() -> Self {
        ExhaustiveSubSolver {
            budget: DEFAULT_BUDGET,
        }
    }
}

impl BipartiteSolver for ExhaustiveSubSolver {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn solve(&self, g: &MultiGraph, f: &ForbiddenLists) -> Option<Orientation> {
        oracle_decide(g, f, self.budget).ok()?.witness
    }
}

/// Lasso search with seeded restarts; no guarantee.
#[derive(Debug, Clone, Copy)]
pub struct LassoSubSolver {
    pub restarts: u64,
}

impl BipartiteSolver for LassoSubSolver {
    fn name(&self) -> &'static str {
        "lasso"
    }

    fn solve(&self, g: &MultiGraph, f: &ForbiddenLists) -> Option<Orientation> {
        (0..=self.restarts).find_map(|seed| {
            let (initial, policy) = if seed == 0 {
                (Initial::Balanced, Policy::Deterministic)
            } else {
                (Initial::Random(seed), Policy::seeded(seed))
            };
            let out = lasso_solve_with(g, f, initial, policy).ok()?;
            out.success.then_some(out.orientation)
        })
    }
}

/// Bounded-orientation flow; only applies when every hole is an end-interval.
#[derive(Debug, Clone, Copy, Default)]
pub struct FlowSubSolver;

impl BipartiteSolver for FlowSubSolver {
    fn name(&self) -> &'static str {
        "flow"
    }

    fn solve(&self, g: &MultiGraph, f: &ForbiddenLists) -> Option<Orientation> {
        let profile = interval_profile(f, g).ok()?;
        if !check_end_holes(&profile) {
            return None;
        }
        solve_end_holes(g, f).ok()
    }
}

fn check_decomposition(g: &MultiGraph, dec: &Decomposition) -> Result<(), ReduceError> {
    let mut owner = vec![0u8; g.edge_count()];
    for &e in dec.bipartite.iter().chain(&dec.h) {
        if e >= g.edge_count() {
            return Err(ReduceError::BadDecomposition(format!(
                "edge {e} out of range"
            )));
        }
        owner[e] += 1;
    }
    if let Some(e) = owner.iter().position(|&c| c != 1) {
        return Err(ReduceError::BadDecomposition(format!(
            "edge {e} appears {} times",
            owner[e]
        )));
    }
    let (h, _) = g.edge_subgraph(&dec.h);
    for v in 0..g.vertex_count() {
        if h.degree(v) > 2 {
            return Err(ReduceError::BadDecomposition(format!(
                "vertex {v} has H-degree {}",
                h.degree(v)
            )));
        }
        if h.degree(v) == 2 && g.degree(v) % 2 == 1 {
            return Err(ReduceError::BadDecomposition(format!(
                "vertex {v} has H-degree 2 but odd degree"
            )));
        }
    }
    let (b, _) = g.edge_subgraph(&dec.bipartite);
    if b.bipartition().is_none() {
        return Err(ReduceError::BadDecomposition(
            "remainder is not bipartite".into(),
        ));
    }
    Ok(())
}

/// Orients H with out-degrees in {0,1}, shifts the lists of vertices that
/// got an H out-edge, and hands the bipartite rest to `sub`.
pub fn bipartite_plus_h_solve(
    inst: &Instance,
    dec: &Decomposition,
    sub: &dyn BipartiteSolver,
) -> Result<Orientation, ReduceError> {
    let (g, f) = (&inst.graph, &inst.lists);
    check_decomposition(g, dec)?;
    if !check_strict_half_solvable(f, g) {
        return Err(ReduceError::BoundViolated);
    }
    let (h, h_map) = g.edge_subgraph(&dec.h);
    let dh = orient_h_component(&h).expect("H-degree checked");
    let (b, b_map) = g.edge_subgraph(&dec.bipartite);

    let shifted: Vec<BTreeSet<usize>> = (0..g.vertex_count())
        .map(|w| match dh.out_degree(w) {
            0 => f.get(w).clone(),
            _ => shift_list_down(f.get(w)),
        })
        .collect();
    // values above the remainder degree can never be hit there
    let fb = ForbiddenLists::clipped(&b, shifted)?;
    let db = sub
        .solve(&b, &fb)
        .filter(|d| verify(&b, d, &fb).ok)
        .ok_or(ReduceError::SubSolverFailed(sub.name()))?;

    let mut d = Orientation::all_forward(g);
    for (i, &e) in h_map.iter().enumerate() {
        d.set_tail(g, e, dh.tail(&h, i));
    }
    for (i, &e) in b_map.iter().enumerate() {
        d.set_tail(g, e, db.tail(&b, i));
    }
    Ok(d)
}
