//! Sweeps of instance families against list schemes, summarized per cell.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::driver::{small_sets, solve, SolveOptions, Status};
use crate::generators::{
    arbitrary_lists, end_hole_lists, gen_2degenerate, gen_bipartite, gen_clique,
    gen_k6_minus_matching, gen_multigraph, gen_regular, k222_decomposition, lasso_lists, rng,
    strict_half_lists, GenError,
};
use crate::graph::MultiGraph;
use crate::lists::{ForbiddenLists, ListError};
use crate::oracle::{verify, DEFAULT_BUDGET};
use crate::reductions::Decomposition;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("bad config: {0}")]
    Config(#[from] serde_json::Error),
    #[error(transparent)]
    Generator(#[from] GenError),
    #[error(transparent)]
    Lists(#[from] ListError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Regular {
        n_min: usize,
        n_max: usize,
        d: usize,
    },
    Clique {
        n: usize,
    },
    TwoDegenerate {
        n_min: usize,
        n_max: usize,
    },
    K6MinusMatching {
        size: usize,
    },
    Bipartite {
        a: usize,
        b: usize,
        p: f64,
    },
    Multigraph {
        n: usize,
        m: usize,
    },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Regular { n_min, n_max, d } => format!("regular(d={d},n={n_min}..{n_max})"),
            Family::Clique { n } => format!("K{n}"),
            Family::TwoDegenerate { n_min, n_max } => format!("2-degenerate(n={n_min}..{n_max})"),
            Family::K6MinusMatching { size } => format!("K6-M{size}"),
            Family::Bipartite { a, b, p } => format!("bipartite({a},{b},p={p})"),
            Family::Multigraph { n, m } => format!("multigraph(n={n},m={m})"),
        }
    }

    fn generate(
        &self,
        r: &mut ChaCha8Rng,
    ) -> Result<(MultiGraph, Option<Decomposition>), GenError> {
        let seed = r.gen();
        let g = match *self {
            Family::Regular { n_min, n_max, d } => {
                let candidates: Vec<usize> = (n_min..=n_max).filter(|n| n * d % 2 == 0).collect();
                if candidates.is_empty() {
                    return Err(GenError::ParityError { n: n_min, d });
                }
                gen_regular(candidates[r.gen_range(0..candidates.len())], d, seed)?
            }
            Family::Clique { n } => gen_clique(n),
            Family::TwoDegenerate { n_min, n_max } => {
                gen_2degenerate(r.gen_range(n_min..=n_max), seed)
            }
            Family::K6MinusMatching { size } => {
                let g = gen_k6_minus_matching(size)?;
                let dec = (size == 3).then(|| k222_decomposition(&g));
                return Ok((g, dec));
            }
            Family::Bipartite { a, b, p } => gen_bipartite(a, b, p, seed)?,
            Family::Multigraph { n, m } => gen_multigraph(n, m, seed)?,
        };
        Ok((g, None))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum Scheme {
    Empty,
    StrictHalf,
    EndHoles,
    LassoLists,
    Arbitrary {
        p: f64,
    },
    /// The same set at every vertex, clipped to each degree.
    Common {
        values: BTreeSet<usize>,
    },
    /// One cell per common set of size at most 2, for regular families.
    AllSmallCommon {
        d: usize,
    },
}

impl Scheme {
    fn expand(&self) -> Vec<(String, Scheme)> {
        match self {
            Scheme::AllSmallCommon { d } => small_sets(*d)
                .into_iter()
                .map(|values| (format!("common{values:?}"), Scheme::Common { values }))
                .collect(),
            Scheme::Common { values } => vec![(format!("common{values:?}"), self.clone())],
            Scheme::Empty => vec![("empty".into(), self.clone())],
            Scheme::StrictHalf => vec![("strict-half".into(), self.clone())],
            Scheme::EndHoles => vec![("end-holes".into(), self.clone())],
            Scheme::LassoLists => vec![("lasso-lists".into(), self.clone())],
            Scheme::Arbitrary { p } => vec![(format!("arbitrary(p={p})"), self.clone())],
        }
    }

    fn lists(&self, g: &MultiGraph, r: &mut ChaCha8Rng) -> Result<ForbiddenLists, ListError> {
        Ok(match self {
            Scheme::Empty | Scheme::AllSmallCommon { .. } => {
                ForbiddenLists::empty(g.vertex_count())
            }
            Scheme::StrictHalf => strict_half_lists(g, r),
            Scheme::EndHoles => end_hole_lists(g, r),
            Scheme::LassoLists => lasso_lists(g, r),
            Scheme::Arbitrary { p } => arbitrary_lists(g, *p, r),
            Scheme::Common { values } => {
                ForbiddenLists::clipped(g, vec![values.clone(); g.vertex_count()])?
            }
        })
    }
}

fn default_instances() -> usize {
    20
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_budget")]
    pub oracle_budget: usize,
    pub families: Vec<Family>,
    pub schemes: Vec<Scheme>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One row of the success table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellSummary {
    pub family: String,
    pub scheme: String,
    pub instances: usize,
    pub sat: usize,
    pub unsat: usize,
    pub giveup: usize,
    pub verified: usize,
    /// `method-chain:count` pairs joined by `;`.
    pub methods: String,
    /// `guarantee:count` pairs joined by `;`.
    pub guarantees: String,
    pub elapsed_ms: u64,
}

struct InstanceResult {
    status: Status,
    verified: bool,
    chain: String,
    guarantee: String,
}

fn tally(items: impl Iterator<Item = String>) -> String {
    let mut counts = BTreeMap::new();
    for s in items {
        *counts.entry(s).or_insert(0usize) += 1;
    }
    counts
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Instance seeds depend only on the config seed and the cell/instance
/// indices, so results are reproducible and independent of thread count.
fn instance_rng(seed: u64, cell: usize, index: usize) -> ChaCha8Rng {
    let mut base = rng(seed ^ (cell as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let skip: u64 = base.gen();
    rng(skip.wrapping_add(index as u64))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<CellSummary>, ExperimentError> {
    let mut cells = Vec::new();
    for family in &config.families {
        for scheme in &config.schemes {
            for (label, concrete) in scheme.expand() {
                cells.push((family, label, concrete));
            }
        }
    }
    cells
        .iter()
        .enumerate()
        .map(|(ci, (family, label, scheme))| {
            let started = Instant::now();
            let results: Vec<InstanceResult> = (0..config.instances)
                .into_par_iter()
                .map(|i| {
                    let mut r = instance_rng(config.seed, ci, i);
                    let (g, dec) = family.generate(&mut r)?;
                    let f = scheme.lists(&g, &mut r)?;
                    let options = SolveOptions {
                        oracle_budget: config.oracle_budget,
                        seed: r.gen(),
                        decomposition: dec,
                        ..SolveOptions::default()
                    };
                    let rep = solve(&g, &f, &options);
                    let verified = rep
                        .orientation
                        .as_ref()
                        .is_some_and(|d| verify(&g, d, &f).ok);
                    Ok(InstanceResult {
                        status: rep.status,
                        verified,
                        chain: rep.methods.join(">"),
                        guarantee: rep
                            .guarantee
                            .map_or("none".into(), |g| format!("{g:?}").to_uppercase()),
                    })
                })
                .collect::<Result<_, ExperimentError>>()?;
            let count = |s: Status| results.iter().filter(|r| r.status == s).count();
            Ok(CellSummary {
                family: family.label(),
                scheme: label.clone(),
                instances: results.len(),
                sat: count(Status::Sat),
                unsat: count(Status::Unsat),
                giveup: count(Status::GiveUp),
                verified: results.iter().filter(|r| r.verified).count(),
                methods: tally(results.iter().map(|r| r.chain.clone())),
                guarantees: tally(results.iter().map(|r| r.guarantee.clone())),
                elapsed_ms: started.elapsed().as_millis() as u64,
            })
        })
        .collect()
}
