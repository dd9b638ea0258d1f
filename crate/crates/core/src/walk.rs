//! Randomized path-reversal search for lists outside every guaranteed case.
//!
//! Each step picks a vertex with a forbidden out-degree, chooses a direction
//! in which its out-degree leaves F, and reverses a directed path to the
//! endpoint whose ±1 change does the least damage. Ties and a small noise
//! rate are resolved by the seeded RNG, so runs are reproducible.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgeId, MultiGraph, Orientation, Vertex};
use crate::lists::ForbiddenLists;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub max_steps: usize,
    /// Probability of taking a uniformly random endpoint instead of the best.
    pub noise: f64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            max_steps: 20_000,
            noise: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkOutcome {
    pub orientation: Option<Orientation>,
    pub steps: usize,
}

/// Searches from `start` for an F-avoiding orientation.
pub fn defect_walk(
    g: &MultiGraph,
    f: &ForbiddenLists,
    start: Orientation,
    seed: u64,
    config: WalkConfig,
) -> WalkOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = start;
    let n = g.vertex_count();
    let bad_at = |d: &Orientation, v: Vertex, delta: isize| {
        let k = d.out_degree(v) as isize + delta;
        f.forbids(v, k as usize)
    };
    for step in 0..=config.max_steps {
        let bad: Vec<Vertex> = (0..n).filter(|&v| bad_at(&d, v, 0)).collect();
        let Some(&v) = bad.choose(&mut rng) else {
            return WalkOutcome {
                orientation: Some(d),
                steps: step,
            };
        };
        if step == config.max_steps {
            break;
        }
        let k = d.out_degree(v);
        let can_down = k > 0;
        let can_up = k < g.degree(v);
        let good_down = can_down && !bad_at(&d, v, -1);
        let good_up = can_up && !bad_at(&d, v, 1);
        let down = match (good_down, good_up) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => rng.gen(),
            (false, false) => can_down && (!can_up || rng.gen()),
        };
        let (reached, parent) = search(g, &d, v, down);
        let mut candidates: Vec<(i32, Vertex)> = reached
            .into_iter()
            .filter(|&w| w != v)
            .map(|w| {
                // down: w gains an out-edge; up: w loses one
                let delta = if down { 1 } else { -1 };
                let cost = i32::from(bad_at(&d, w, delta)) - i32::from(bad_at(&d, w, 0));
                (cost, w)
            })
            .collect();
        if candidates.is_empty() {
            continue;
        }
        candidates.shuffle(&mut rng);
        let target = if rng.gen_bool(config.noise) {
            candidates[0].1
        } else {
            candidates.iter().min_by_key(|c| c.0).unwrap().1
        };
        let mut w = target;
        while w != v {
            let e = parent[w].expect("reached vertices have a parent edge");
            w = g.opposite(e, w);
            d.flip_edge(g, e);
        }
    }
    WalkOutcome {
        orientation: None,
        steps: config.max_steps,
    }
}

/// BFS from `v` along out-edges (`forward`) or in-edges, with parent edges.
fn search(
    g: &MultiGraph,
    d: &Orientation,
    v: Vertex,
    forward: bool,
) -> (Vec<Vertex>, Vec<Option<EdgeId>>) {
    let mut parent = vec![None; g.vertex_count()];
    let mut seen = vec![false; g.vertex_count()];
    let mut order = vec![v];
    let mut queue = VecDeque::from([v]);
    seen[v] = true;
    while let Some(x) = queue.pop_front() {
        for &e in g.incident(x) {
            if d.points_from(g, e, x) != forward {
                continue;
            }
            let y = g.opposite(e, x);
            if !seen[y] {
                seen[y] = true;
                parent[y] = Some(e);
                order.push(y);
                queue.push_back(y);
            }
        }
    }
    (order, parent)
}
