//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use favoid::driver::{regular_solve, small_sets, solve, SolveOptions, Status};
use favoid::flow::{bounded_orientation, solve_end_holes, Bounded, DegreeBounds, ViolationKind};
use favoid::generators::{
    arbitrary_lists, end_hole_lists, gen_2degenerate, gen_k6_minus_matching, gen_multigraph,
    gen_regular, k222_decomposition, lasso_lists, rng, strict_half_lists,
};
use favoid::lasso::{lasso_solve, Initial};
use favoid::lists::{check_lasso_lists, check_strict_half_solvable, interval_profile};
use favoid::oracle::{oracle_decide, OracleStatus, DEFAULT_BUDGET};
use favoid::orient::{balanced_orientation, extreme_avoiding};
use favoid::reductions::{
    bipartite_plus_h_solve, low_degree_eliminate, two_degenerate_solve, ExhaustiveSubSolver,
    Instance,
};
use favoid::{ForbiddenLists, MultiGraph, Orientation};
use rand::Rng;
use rayon::prelude::*;

use common::{avoids, internal_and_boundary, naive_avoiding_count, naive_count, recount};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let t = started.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn tightness() -> Outcome {
    let start = Instant::now();
    for (n, set, states) in [(3, vec![1], 8u64), (5, vec![2, 3], 1024)] {
        let g = favoid::generators::gen_clique(n);
        let f = ForbiddenLists::common(&g, &set.iter().copied().collect()).unwrap();
        let r = oracle_decide(&g, &f, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        ensure(r.status == OracleStatus::Unsat, || {
            format!("K{n} reported SAT")
        })?;
        ensure(r.solution_count == 0, || {
            format!("K{n} count {}", r.solution_count)
        })?;
        ensure(r.enumerated_count == states, || {
            format!("K{n} enumerated {} of {states}", r.enumerated_count)
        })?;
        ensure(naive_avoiding_count(&g, &f) == 0, || {
            format!("K{n} naive count nonzero")
        })?;
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("K3 0/8, K5 0/1024 in {:.2?}", start.elapsed()))
}

fn regular_degree_five_six() -> Outcome {
    let start = Instant::now();
    let mut jobs = Vec::new();
    let mut r = rng(2);
    for d in [5usize, 6] {
        for _ in 0..200 {
            let n = loop {
                let n = r.gen_range(6..=30);
                if n * d % 2 == 0 {
                    break n;
                }
            };
            jobs.push((n, d, r.gen::<u64>()));
        }
    }
    let results: Vec<(String, Option<String>)> = jobs
        .par_iter()
        .flat_map_iter(|&(n, d, seed)| {
            let g = gen_regular(n, d, seed).unwrap();
            small_sets(d).into_iter().map(move |set| {
                let f = ForbiddenLists::common(&g, &set).unwrap();
                match regular_solve(&g, &f, &SolveOptions::default()) {
                    Ok(rep)
                        if rep.status == Status::Sat
                            && rep.orientation.as_ref().is_some_and(|o| avoids(&g, o, &f)) =>
                    {
                        (rep.methods.join("+"), None)
                    }
                    _ => (
                        String::new(),
                        Some(format!("n={n} d={d} seed={seed} F={set:?}")),
                    ),
                }
            })
        })
        .collect();
    let failures: Vec<&String> = results.iter().filter_map(|r| r.1.as_ref()).collect();
    let mut by_method = std::collections::BTreeMap::new();
    for (m, _) in &results {
        *by_method.entry(m.as_str()).or_insert(0usize) += 1;
    }
    let total: usize = jobs.iter().map(|&(_, d, _)| small_sets(d).len()).sum();
    ensure(failures.is_empty(), || {
        format!(
            "{} of {total} failed, first: {}",
            failures.len(),
            failures[0]
        )
    })?;
    within(Duration::from_secs(60), start)?;
    let methods: Vec<String> = by_method.iter().map(|(m, c)| format!("{m}={c}")).collect();
    Ok(format!(
        "{total}/{total} SAT and verified in {:.2?} ({})",
        start.elapsed(),
        methods.join(", ")
    ))
}

fn lasso_property() -> Outcome {
    let mut r = rng(3);
    let mut max_moves = 0;
    let mut nontrivial = 0;
    for i in 0..1000u64 {
        let n = r.gen_range(2..=10);
        let m = r.gen_range(n..=4 * n);
        let g = gen_multigraph(n, m, r.gen()).unwrap();
        let f = lasso_lists(&g, &mut r);
        let profile = interval_profile(&f, &g).unwrap();
        ensure(check_lasso_lists(&profile), || {
            format!("instance {i} lists do not qualify")
        })?;
        if !f.all_empty() {
            nontrivial += 1;
        }
        let initial = if i % 2 == 0 {
            Initial::Balanced
        } else {
            Initial::Random(i)
        };
        let out = lasso_solve(&g, &f, initial).unwrap();
        let cap = (n + 1) * (n + 1);
        ensure(out.success, || format!("instance {i} stuck: {g:?} {f:?}"))?;
        ensure(avoids(&g, &out.orientation, &f), || {
            format!("instance {i} does not verify")
        })?;
        ensure(out.trace.len() <= cap, || {
            format!("instance {i}: {} moves > {cap}", out.trace.len())
        })?;
        ensure(out.trace.strictly_decreasing(), || {
            format!("instance {i} potential rose")
        })?;
        max_moves = max_moves.max(out.trace.len());
    }
    Ok(format!(
        "1000/1000 ({nontrivial} with nonempty lists), max {max_moves} moves"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(4);
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..500 {
        let n = r.gen_range(2..=7);
        let m = r.gen_range(0..=12);
        let g = gen_multigraph(n, m, r.gen()).unwrap();
        let p = r.gen_range(0.05..0.6);
        let f = arbitrary_lists(&g, p, &mut r);
        let truth = oracle_decide(&g, &f, DEFAULT_BUDGET).unwrap();
        ensure(truth.solution_count == naive_avoiding_count(&g, &f), || {
            format!("instance {i}: oracle count disagrees with brute force")
        })?;
        let rep = solve(&g, &f, &SolveOptions::default());
        match (truth.status, rep.status) {
            (OracleStatus::Sat, Status::Sat) => {
                let d = rep.orientation.as_ref().unwrap();
                ensure(avoids(&g, d, &f), || format!("instance {i}: witness fails"))?;
                sat += 1;
            }
            (OracleStatus::Unsat, Status::Unsat) => unsat += 1,
            (t, s) => {
                return Err(format!(
                    "instance {i}: oracle {t:?}, solve {s} via {:?}",
                    rep.methods
                ))
            }
        }
    }
    Ok(format!("500/500 agree ({sat} SAT, {unsat} UNSAT)"))
}

/// Every F′-avoiding orientation of the reduced instance lifts to an
/// F-avoiding orientation of the original.
fn lifts_all_sub_solutions(inst: &Instance) -> Result<usize, String> {
    let g = &inst.graph;
    let Some(v0) = (0..g.vertex_count())
        .filter(|&v| g.degree(v) > 0)
        .min_by_key(|&v| g.degree(v))
    else {
        return Ok(0);
    };
    let (red, step) = low_degree_eliminate(inst, v0).map_err(|e| e.to_string())?;
    let rg = &red.graph;
    let mut lifted = 0;
    for mask in 0..1u64 << rg.edge_count() {
        let dirs = (0..rg.edge_count()).map(|e| mask >> e & 1 == 1).collect();
        let sub = Orientation::from_directions(rg, dirs).unwrap();
        if !avoids(rg, &sub, &red.lists) {
            continue;
        }
        let d = step.lift(g, rg, &sub);
        ensure(avoids(g, &d, &inst.lists), || {
            format!("lift failed for mask {mask:b}")
        })?;
        lifted += 1;
    }
    ensure(lifted > 0, || "reduced instance has no solution".into())?;
    Ok(lifted)
}

fn two_degenerate() -> Outcome {
    let mut r = rng(5);
    let mut small = 0;
    let mut lifted = 0;
    for i in 0..500 {
        let n = r.gen_range(2..=16);
        let g = gen_2degenerate(n, r.gen());
        let f = strict_half_lists(&g, &mut r);
        ensure(check_strict_half_solvable(&f, &g), || {
            format!("instance {i} bound")
        })?;
        let inst = Instance::new(g.clone(), f.clone());
        let sol = two_degenerate_solve(&inst).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(avoids(&g, &sol.orientation, &f), || {
            format!("instance {i} fails verify")
        })?;
        ensure(sol.steps.len() == g.edge_count(), || {
            format!("instance {i} step count")
        })?;
        if g.edge_count() <= 12 {
            small += 1;
            ensure(naive_avoiding_count(&g, &f) > 0, || {
                format!("instance {i} oracle UNSAT")
            })?;
            lifted += lifts_all_sub_solutions(&inst).map_err(|e| format!("instance {i}: {e}"))?;
        }
    }
    Ok(format!(
        "500/500 verified; {small} with m<=12 lifted {lifted} sub-solutions"
    ))
}

fn end_holes() -> Outcome {
    let mut r = rng(6);
    for i in 0..500 {
        let n = r.gen_range(2..=12);
        let m = r.gen_range(0..=3 * n);
        let g = gen_multigraph(n, m, r.gen()).unwrap();
        let f = end_hole_lists(&g, &mut r);
        let d = solve_end_holes(&g, &f).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(avoids(&g, &d, &f), || format!("instance {i} fails verify"))?;
    }
    Ok("500/500 oriented, no certificate, all verified".into())
}

fn flow_agreement() -> Outcome {
    let mut r = rng(7);
    let (mut feasible, mut infeasible) = (0, 0);
    for i in 0..1000 {
        let n = r.gen_range(1..=7);
        let m = if n < 2 { 0 } else { r.gen_range(0..=12) };
        let g = gen_multigraph(n, m, r.gen()).unwrap();
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for v in 0..n {
            let a = r.gen_range(0..=g.degree(v));
            let b = r.gen_range(0..=g.degree(v));
            lower.push(a.min(b));
            upper.push(a.max(b));
        }
        let bounds = DegreeBounds::new(&g, lower.clone(), upper.clone()).unwrap();
        let count = naive_count(&g, |v, k| lower[v] <= k && k <= upper[v]);
        match bounded_orientation(&g, &bounds).map_err(|e| format!("instance {i}: {e}"))? {
            Bounded::Oriented(d) => {
                ensure(count > 0, || {
                    format!("instance {i}: oriented but brute force says none")
                })?;
                let out = recount(&g, &d);
                ensure(
                    (0..n).all(|v| lower[v] <= out[v] && out[v] <= upper[v]),
                    || format!("instance {i}: bounds not met"),
                )?;
                feasible += 1;
            }
            Bounded::Infeasible(cert) => {
                ensure(count == 0, || {
                    format!("instance {i}: certificate but {count} solutions")
                })?;
                let (e_in, delta) = internal_and_boundary(&g, &cert.set);
                let violated = match cert.kind {
                    ViolationKind::Lower => {
                        cert.set.iter().map(|&v| lower[v]).sum::<usize>() > e_in + delta
                    }
                    ViolationKind::Upper => {
                        cert.set.iter().map(|&v| upper[v]).sum::<usize>() < e_in
                    }
                };
                ensure(violated, || {
                    format!("instance {i}: certificate does not recheck")
                })?;
                ensure(
                    cert.internal_edges == e_in && cert.boundary_edges == delta,
                    || format!("instance {i}: certificate counts differ"),
                )?;
                infeasible += 1;
            }
        }
    }
    Ok(format!(
        "1000/1000 agree ({feasible} feasible, {infeasible} certificates rechecked)"
    ))
}

fn extreme() -> Outcome {
    let mut r = rng(8);
    for k in 1..=3usize {
        for i in 0..100 {
            let n = 2 * r.gen_range(k + 1..=15);
            let g = gen_regular(n, 2 * k + 1, r.gen()).unwrap();
            let d = extreme_avoiding(&g, k).map_err(|e| e.to_string())?;
            let out = recount(&g, &d);
            ensure(out.iter().all(|&x| x == 0 || x > k), || {
                format!("k={k} graph {i}: out-degrees {out:?}")
            })?;
        }
    }
    Ok("300/300 avoid {1..k}".into())
}

fn k222() -> Outcome {
    let g = gen_k6_minus_matching(3).unwrap();
    let dec = k222_decomposition(&g);
    let sub = ExhaustiveSubSolver::default();
    let combos: Vec<usize> = (0..5usize.pow(6)).collect();
    let failures: Vec<usize> = combos
        .par_iter()
        .copied()
        .filter(|&code| {
            let sets = (0..6)
                .map(|v| BTreeSet::from([code / 5usize.pow(v as u32) % 5]))
                .collect();
            let f = ForbiddenLists::new(&g, sets).unwrap();
            let inst = Instance::new(g.clone(), f.clone());
            !matches!(bipartite_plus_h_solve(&inst, &dec, &sub), Ok(d) if avoids(&g, &d, &f))
        })
        .collect();
    ensure(failures.is_empty(), || {
        format!(
            "{} combinations failed, first code {}",
            failures.len(),
            failures[0]
        )
    })?;
    Ok("15625/15625 single-value lists solved and verified".into())
}

fn balanced() -> Outcome {
    let mut r = rng(10);
    for i in 0..1000 {
        let n = r.gen_range(2..=15);
        let m = r.gen_range(0..=40);
        let g = gen_multigraph(n, m, r.gen()).unwrap();
        check_balanced(&g).map_err(|e| format!("graph {i}: {e}"))?;
    }
    Ok("1000/1000 balanced".into())
}

fn check_balanced(g: &MultiGraph) -> Result<(), String> {
    let b = balanced_orientation(g);
    let out = recount(g, &b.orientation);
    for v in 0..g.vertex_count() {
        let diff = 2 * out[v] as i64 - g.degree(v) as i64;
        let bound = if g.degree(v).is_multiple_of(2) { 0 } else { 1 };
        ensure(diff.abs() <= bound, || {
            format!("vertex {v} imbalance {diff}")
        })?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("tightness family", tightness),
        ("5- and 6-regular, all |F|<=2", regular_degree_five_six),
        ("lasso engine on qualifying lists", lasso_property),
        ("solve agrees with oracle, m<=12", oracle_equivalence),
        ("2-degenerate elimination and lifts", two_degenerate),
        ("end-hole lists via flow", end_holes),
        ("bounded orientation vs brute force", flow_agreement),
        ("extreme orientation of odd regular graphs", extreme),
        ("K2,2,2 bipartite plus cycle", k222),
        ("balanced orientation", balanced),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{t:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{t:.2?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
