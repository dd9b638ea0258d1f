//! Strategy dispatch: exact and guaranteed methods first, then heuristics,
//! then exhaustive search.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::flow::{bounded_orientation, Bounded, DegreeBounds, ViolationCertificate};
use crate::graph::{reverse_all, MultiGraph, Orientation, Vertex};
use crate::lasso::{lasso_solve_with, Initial, Policy};
use crate::lists::{
    check_end_holes, check_lasso_lists, check_strict_half_solvable, check_weak_half,
    interval_profile, ForbiddenLists,
};
use crate::oracle::{oracle_decide, verify, OracleStatus, DEFAULT_BUDGET};
use crate::orient::{balanced_orientation, extreme_avoiding};
use crate::reductions::{
    bipartite_plus_h_solve, edge_ab_reduce, two_degenerate_solve, Decomposition,
    ExhaustiveSubSolver, Instance, ReductionStep,
};
use crate::walk::{defect_walk, WalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Sat,
    Unsat,
    #[serde(rename = "GIVEUP")]
    GiveUp,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::GiveUp => "GIVEUP",
        })
    }
}

/// What backs the reported outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Guarantee {
    /// A constructive argument carried out by this crate.
    Proven,
    /// Existence follows from a cited result; the orientation itself came
    /// from search.
    External,
    Heuristic,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// F(v) covers 0..=d(v).
    FullList { vertex: Vertex },
    /// Every list is one allowed interval and these bounds are infeasible.
    Flow(ViolationCertificate),
    /// All 2^m orientations were checked.
    Exhaustive { enumerated: u64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub reductions: usize,
    pub lasso_moves: usize,
    pub restarts: usize,
    pub walk_steps: usize,
    pub oracle_states: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub status: Status,
    pub orientation: Option<Orientation>,
    pub certificate: Option<Certificate>,
    pub methods: Vec<String>,
    pub guarantee: Option<Guarantee>,
    pub stats: Stats,
}

impl SolveReport {
    fn new() -> Self {
        SolveReport {
            status: Status::GiveUp,
            orientation: None,
            certificate: None,
            methods: Vec::new(),
            guarantee: None,
            stats: Stats::default(),
        }
    }

    fn sat(mut self, d: Orientation, method: &str, guarantee: Guarantee) -> Self {
        self.status = Status::Sat;
        self.orientation = Some(d);
        self.methods.push(method.to_string());
        self.guarantee = Some(guarantee);
        self
    }

    fn unsat(mut self, cert: Certificate, method: &str, guarantee: Guarantee) -> Self {
        self.status = Status::Unsat;
        self.certificate = Some(cert);
        self.methods.push(method.to_string());
        self.guarantee = Some(guarantee);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegularError {
    #[error("graph is not regular")]
    NotRegular,
    #[error("degree {0} is below 5")]
    DegreeTooSmall(usize),
    #[error("lists are not one common set of size at most 2")]
    UnsupportedLists,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub oracle_budget: usize,
    pub seed: u64,
    /// Seeded lasso restarts after the deterministic run.
    pub restarts: usize,
    pub walk: WalkConfig,
    /// Seeded walks; each starts from a fresh random orientation.
    pub walks: usize,
    pub decomposition: Option<Decomposition>,
    /// Skip the edge-deletion reductions.
    pub no_reductions: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            oracle_budget: DEFAULT_BUDGET,
            seed: 0,
            restarts: 50,
            walk: WalkConfig::default(),
            walks: 8,
            decomposition: None,
            no_reductions: false,
        }
    }
}

/// Regular graphs of degree d ≥ 5 with one common list of size ≤ 2.
pub fn regular_solve(
    g: &MultiGraph,
    f: &ForbiddenLists,
    options: &SolveOptions,
) -> Result<SolveReport, RegularError> {
    let d = g.regular_degree().ok_or(RegularError::NotRegular)?;
    if d < 5 {
        return Err(RegularError::DegreeTooSmall(d));
    }
    let set = f
        .common_set()
        .filter(|s| s.len() <= 2)
        .ok_or(RegularError::UnsupportedLists)?
        .clone();
    let report = SolveReport::new();
    let (lo, hi) = (d / 2, d.div_ceil(2));
    if !set.contains(&lo) && !set.contains(&hi) {
        let b = balanced_orientation(g).orientation;
        return Ok(report.sat(b, "balanced", Guarantee::Proven));
    }
    let consecutive = set.len() == 2 && {
        let v: Vec<usize> = set.iter().copied().collect();
        v[1] == v[0] + 1
    };
    if consecutive && d == 5 {
        let x = *set.iter().next().unwrap();
        if x == 1 {
            let o = extreme_avoiding(g, 2).expect("5-regular");
            return Ok(report.sat(o, "extreme", Guarantee::Proven));
        }
        if x == 3 {
            let o = reverse_all(g, &extreme_avoiding(g, 2).expect("5-regular"));
            return Ok(report.sat(o, "extreme+reverse", Guarantee::Proven));
        }
    }
    let profile = interval_profile(f, g).expect("lists validated");
    let qualifies = check_lasso_lists(&profile);
    let guarantee = if qualifies {
        Guarantee::Proven
    } else {
        Guarantee::External
    };
    let mut report = report;
    if let Some(o) = lasso_phase(g, f, options, &mut report, qualifies) {
        return Ok(report.sat(o, "lasso", guarantee));
    }
    if let Some(o) = walk_phase(g, f, options, &mut report) {
        return Ok(report.sat(o, "walk", guarantee));
    }
    Ok(oracle_phase(g, f, options, report))
}

/// Deterministic lasso run, then `options.restarts` seeded runs from random
/// starts. The seeded runs go in parallel; the lowest successful seed wins.
fn lasso_phase(
    g: &MultiGraph,
    f: &ForbiddenLists,
    options: &SolveOptions,
    report: &mut SolveReport,
    single_run: bool,
) -> Option<Orientation> {
    let first = lasso_solve_with(g, f, Initial::Balanced, Policy::Deterministic).ok()?;
    report.stats.lasso_moves += first.trace.len();
    if first.success {
        return Some(first.orientation);
    }
    if single_run {
        return None;
    }
    let base = options.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let found = (1..=options.restarts as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base.wrapping_add(i);
            let out = lasso_solve_with(g, f, Initial::Random(seed), Policy::seeded(seed)).ok()?;
            Some((i, out))
        })
        .find_map_first(|r| r.filter(|(_, out)| out.success));
    match found {
        Some((i, out)) => {
            report.stats.restarts += i as usize;
            report.stats.lasso_moves += out.trace.len();
            Some(out.orientation)
        }
        None => {
            report.stats.restarts += options.restarts;
            None
        }
    }
}

fn walk_phase(
    g: &MultiGraph,
    f: &ForbiddenLists,
    options: &SolveOptions,
    report: &mut SolveReport,
) -> Option<Orientation> {
    let base = options.seed.wrapping_mul(0xd134_2543_de82_ef95);
    let found = (0..options.walks as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base.wrapping_add(i);
            let start = if i == 0 {
                balanced_orientation(g).orientation
            } else {
                Initial::Random(seed).build(g)
            };
            (i, defect_walk(g, f, start, seed, options.walk))
        })
        .find_map_first(|(i, out)| out.orientation.is_some().then_some((i, out)));
    match found {
        Some((i, out)) => {
            report.stats.walk_steps += i as usize * options.walk.max_steps + out.steps;
            out.orientation
        }
        None => {
            report.stats.walk_steps += options.walks * options.walk.max_steps;
            None
        }
    }
}

fn oracle_phase(
    g: &MultiGraph,
    f: &ForbiddenLists,
    options: &SolveOptions,
    mut report: SolveReport,
) -> SolveReport {
    let Ok(r) = oracle_decide(g, f, options.oracle_budget) else {
        report.methods.push("giveup".into());
        return report;
    };
    report.stats.oracle_states += r.enumerated_count;
    match r.status {
        OracleStatus::Sat => report.sat(
            r.witness.expect("SAT has a witness"),
            "oracle",
            Guarantee::Exhaustive,
        ),
        OracleStatus::Unsat => report.unsat(
            Certificate::Exhaustive {
                enumerated: r.enumerated_count,
            },
            "oracle",
            Guarantee::Exhaustive,
        ),
    }
}

fn finish(g: &MultiGraph, f: &ForbiddenLists, mut report: SolveReport) -> SolveReport {
    if let Some(d) = &report.orientation {
        if !verify(g, d, f).ok {
            // a method returned a bad orientation; never report it
            report.status = Status::GiveUp;
            report.orientation = None;
            report.guarantee = None;
            report.methods.push("rejected".into());
        }
    }
    report
}

/// Full pipeline. Never fails; every outcome is a report status.
pub fn solve(g: &MultiGraph, f: &ForbiddenLists, options: &SolveOptions) -> SolveReport {
    let report = solve_inner(g, f, options);
    finish(g, f, report)
}

fn solve_inner(g: &MultiGraph, f: &ForbiddenLists, options: &SolveOptions) -> SolveReport {
    let mut report = SolveReport::new();
    if f.all_empty() {
        let b = balanced_orientation(g).orientation;
        return report.sat(b, "trivial", Guarantee::Proven);
    }
    if let Some(v) = (0..g.vertex_count()).find(|&v| f.get(v).len() > g.degree(v)) {
        return report.unsat(
            Certificate::FullList { vertex: v },
            "trivial",
            Guarantee::Proven,
        );
    }
    let profile = interval_profile(f, g).expect("lists validated against the graph");

    // one allowed interval per vertex: the flow decides exactly
    if let Some(bounds) = DegreeBounds::from_single_homes(g, &profile) {
        match bounded_orientation(g, &bounds) {
            Ok(Bounded::Oriented(d)) => return report.sat(d, "flow", Guarantee::Proven),
            Ok(Bounded::Infeasible(cert)) => {
                return report.unsat(Certificate::Flow(cert), "flow", Guarantee::Proven)
            }
            Err(_) => {}
        }
    }
    if let Ok(r) = regular_solve(g, f, options) {
        if r.status == Status::Sat {
            let mut r = r;
            r.methods.insert(0, "regular".into());
            return r;
        }
        report.stats = r.stats;
    }
    if let Some(dec) = &options.decomposition {
        let inst = Instance::new(g.clone(), f.clone());
        let sub = ExhaustiveSubSolver {
            budget: options.oracle_budget,
        };
        if let Ok(d) = bipartite_plus_h_solve(&inst, dec, &sub) {
            return report.sat(d, "bipartite+h", Guarantee::External);
        }
    }

    let (reduced, steps, chain) = if options.no_reductions {
        (Instance::new(g.clone(), f.clone()), Vec::new(), Vec::new())
    } else {
        reduce(g, f)
    };
    report.stats.reductions = steps.len();
    if let Some((d, method)) = route_reduced(&reduced, &mut report) {
        let lifted = lift_all(&chain, &reduced, &steps, d);
        let mut names: Vec<String> = Vec::new();
        if !steps.is_empty() {
            names.push(format!("edge-ab x{}", steps.len()));
        }
        names.append(&mut report.methods);
        report.methods = names;
        return report.sat(lifted, method, Guarantee::Proven);
    }

    let qualifies = check_lasso_lists(&profile);
    if let Some(o) = lasso_phase(g, f, options, &mut report, false) {
        let guarantee = if qualifies {
            Guarantee::Proven
        } else {
            Guarantee::Heuristic
        };
        return report.sat(o, "lasso", guarantee);
    }
    // a short walk, then the oracle if affordable, then the full walk
    let quick = SolveOptions {
        walks: options.walks.min(2),
        walk: WalkConfig {
            max_steps: options.walk.max_steps.min(100 * (g.edge_count() + 1)),
            ..options.walk
        },
        ..options.clone()
    };
    if let Some(o) = walk_phase(g, f, &quick, &mut report) {
        return report.sat(o, "walk", Guarantee::Heuristic);
    }
    if g.edge_count() <= options.oracle_budget {
        return oracle_phase(g, f, options, report);
    }
    if let Some(o) = walk_phase(g, f, options, &mut report) {
        return report.sat(o, "walk", Guarantee::Heuristic);
    }
    oracle_phase(g, f, options, report)
}

/// Applies the edge rule while the strict bound holds. Returns the final
/// instance, the steps, and the instance before each step.
fn reduce(g: &MultiGraph, f: &ForbiddenLists) -> (Instance, Vec<ReductionStep>, Vec<Instance>) {
    let mut cur = Instance::new(g.clone(), f.clone());
    let mut steps = Vec::new();
    let mut chain = Vec::new();
    if !check_strict_half_solvable(f, g) {
        return (cur, steps, chain);
    }
    while let Ok(Some((next, step))) = edge_ab_reduce(&cur) {
        chain.push(std::mem::replace(&mut cur, next));
        steps.push(step);
    }
    (cur, steps, chain)
}

fn lift_all(
    chain: &[Instance],
    reduced: &Instance,
    steps: &[ReductionStep],
    mut d: Orientation,
) -> Orientation {
    for (i, step) in steps.iter().enumerate().rev() {
        let child = chain.get(i + 1).unwrap_or(reduced);
        d = step.lift(&chain[i].graph, &child.graph, &d);
    }
    d
}

/// Guaranteed methods on the reduced instance.
fn route_reduced(inst: &Instance, report: &mut SolveReport) -> Option<(Orientation, &'static str)> {
    let (g, f) = (&inst.graph, &inst.lists);
    if f.all_empty() {
        return Some((balanced_orientation(g).orientation, "trivial"));
    }
    let profile = interval_profile(f, g).ok()?;
    if check_end_holes(&profile) && check_weak_half(f, g) {
        if let Some(bounds) = DegreeBounds::from_single_homes(g, &profile) {
            if let Ok(Bounded::Oriented(d)) = bounded_orientation(g, &bounds) {
                return Some((d, "flow"));
            }
        }
    }
    if check_strict_half_solvable(f, g) && g.degeneracy().0 <= 2 {
        if let Ok(sol) = two_degenerate_solve(inst) {
            return Some((sol.orientation, "two-degenerate"));
        }
    }
    if check_lasso_lists(&profile) {
        let out = lasso_solve_with(g, f, Initial::Balanced, Policy::Deterministic).ok()?;
        report.stats.lasso_moves += out.trace.len();
        if out.success {
            return Some((out.orientation, "lasso"));
        }
    }
    None
}

/// The forbidden sets of size at most 2 within 0..=d.
pub fn small_sets(d: usize) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new()];
    for a in 0..=d {
        out.push(BTreeSet::from([a]));
        for b in a + 1..=d {
            out.push(BTreeSet::from([a, b]));
        }
    }
    out
}
