//! Forbidden out-degree lists and their interval structure.
//!
//! For a vertex of degree d, `{0, …, d}` splits into maximal runs of
//! forbidden values (holes) and allowed values (homes). The allowed values
//! are further split by their neighbourhood: `A` sits just above a hole, `B`
//! just below one, `X` touches no hole.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{MultiGraph, Orientation, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("forbidden value {value} at vertex {vertex} exceeds its degree {degree}")]
    OutOfRangeForbidden {
        vertex: Vertex,
        value: usize,
        degree: usize,
    },
    #[error("{got} lists given for {expected} vertices")]
    WrongLength { expected: usize, got: usize },
}

/// Per-vertex forbidden out-degree sets.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ForbiddenLists {
    sets: Vec<BTreeSet<usize>>,
}

impl ForbiddenLists {
    pub fn empty(n: usize) -> Self {
        ForbiddenLists {
            sets: vec![BTreeSet::new(); n],
        }
    }

    pub fn new(g: &MultiGraph, sets: Vec<BTreeSet<usize>>) -> Result<Self, ListError> {
        if sets.len() != g.vertex_count() {
            return Err(ListError::WrongLength {
                expected: g.vertex_count(),
                got: sets.len(),
            });
        }
        for (v, s) in sets.iter().enumerate() {
            if let Some(&value) = s.iter().next_back() {
                if value > g.degree(v) {
                    return Err(ListError::OutOfRangeForbidden {
                        vertex: v,
                        value,
                        degree: g.degree(v),
                    });
                }
            }
        }
        Ok(ForbiddenLists { sets })
    }

    /// Same list at every vertex.
    pub fn common(g: &MultiGraph, set: &BTreeSet<usize>) -> Result<Self, ListError> {
        Self::new(g, vec![set.clone(); g.vertex_count()])
    }

    /// Drops values above each vertex's degree; those can never be attained.
    pub fn clipped(g: &MultiGraph, sets: Vec<BTreeSet<usize>>) -> Result<Self, ListError> {
        let sets = sets
            .into_iter()
            .enumerate()
            .map(|(v, s)| match v < g.vertex_count() {
                true => s.into_iter().filter(|&x| x <= g.degree(v)).collect(),
                false => s,
            })
            .collect();
        Self::new(g, sets)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, v: Vertex) -> &BTreeSet<usize> {
        &self.sets[v]
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    pub fn into_sets(self) -> Vec<BTreeSet<usize>> {
        self.sets
    }

    pub fn forbids(&self, v: Vertex, out_degree: usize) -> bool {
        self.sets[v].contains(&out_degree)
    }

    pub fn all_empty(&self) -> bool {
        self.sets.iter().all(BTreeSet::is_empty)
    }

    /// `Some(F)` when every vertex carries the same list.
    pub fn common_set(&self) -> Option<&BTreeSet<usize>> {
        let first = self.sets.first()?;
        self.sets.iter().all(|s| s == first).then_some(first)
    }
}

/// `{i − 1 : i ∈ F, i ≥ 1}`.
pub fn shift_list_down(set: &BTreeSet<usize>) -> BTreeSet<usize> {
    set.iter().filter(|&&i| i >= 1).map(|&i| i - 1).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    Hole,
    Home,
}

/// Inclusive run `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
    pub kind: IntervalKind,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: usize) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            IntervalKind::Hole => "hole",
            IntervalKind::Home => "home",
        };
        if self.lo == self.hi {
            write!(f, "{tag}{{{}}}", self.lo)
        } else {
            write!(f, "{tag}{{{}..{}}}", self.lo, self.hi)
        }
    }
}

/// How a single out-degree value relates to a vertex's list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValueClass {
    pub forbidden: bool,
    pub above_hole: bool,
    pub below_hole: bool,
}

impl ValueClass {
    pub fn far(&self) -> bool {
        !self.forbidden && !self.above_hole && !self.below_hole
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexProfile {
    pub degree: usize,
    pub forbidden_count: usize,
    pub intervals: Vec<Interval>,
    classes: Vec<ValueClass>,
}

impl VertexProfile {
    pub fn new(degree: usize, forbidden: &BTreeSet<usize>) -> Self {
        let mut classes = vec![ValueClass::default(); degree + 1];
        for &x in forbidden {
            classes[x].forbidden = true;
        }
        for i in 0..=degree {
            if classes[i].forbidden {
                continue;
            }
            classes[i].above_hole = i >= 1 && forbidden.contains(&(i - 1));
            classes[i].below_hole = forbidden.contains(&(i + 1));
        }
        let mut intervals: Vec<Interval> = Vec::new();
        for i in 0..=degree {
            let kind = if classes[i].forbidden {
                IntervalKind::Hole
            } else {
                IntervalKind::Home
            };
            match intervals.last_mut() {
                Some(last) if last.kind == kind => last.hi = i,
                _ => intervals.push(Interval { lo: i, hi: i, kind }),
            }
        }
        VertexProfile {
            degree,
            forbidden_count: forbidden.len(),
            intervals,
            classes,
        }
    }

    pub fn class(&self, value: usize) -> ValueClass {
        self.classes[value]
    }

    pub fn values_where(&self, pred: impl Fn(&ValueClass) -> bool) -> Vec<usize> {
        (0..=self.degree)
            .filter(|&i| pred(&self.classes[i]))
            .collect()
    }

    /// A(v): allowed values directly above a hole.
    pub fn above(&self) -> Vec<usize> {
        self.values_where(|c| c.above_hole)
    }

    /// B(v): allowed values directly below a hole.
    pub fn below(&self) -> Vec<usize> {
        self.values_where(|c| c.below_hole)
    }

    /// X(v): allowed values adjacent to no hole.
    pub fn far(&self) -> Vec<usize> {
        self.values_where(ValueClass::far)
    }

    pub fn holes(&self) -> impl Iterator<Item = &Interval> {
        self.intervals
            .iter()
            .filter(|i| i.kind == IntervalKind::Hole)
    }

    pub fn homes(&self) -> impl Iterator<Item = &Interval> {
        self.intervals
            .iter()
            .filter(|i| i.kind == IntervalKind::Home)
    }

    pub fn is_end_interval(&self, interval: &Interval) -> bool {
        interval.lo == 0 || interval.hi == self.degree
    }

    /// Every hole has size ≤ 2, every home between two holes has size ≥ 3,
    /// and each end-interval is a hole of size one or a home of size ≥ 2
    /// (`strict_ends` demands homes of size ≥ 2 at both ends instead).
    pub fn lasso_compatible(&self, strict_ends: bool) -> bool {
        if self.degree == 0 {
            return self.forbidden_count == 0;
        }
        let last = self.intervals.len() - 1;
        self.intervals.iter().enumerate().all(|(j, iv)| {
            let is_end = j == 0 || j == last;
            match iv.kind {
                IntervalKind::Hole => iv.len() <= 2 && (!is_end || (!strict_ends && iv.len() == 1)),
                IntervalKind::Home => {
                    if is_end {
                        iv.len() >= 2
                    } else {
                        iv.len() >= 3
                    }
                }
            }
        })
    }

    /// Every hole touches 0 or d, and |F| ≤ d/2.
    pub fn end_holes_only(&self) -> bool {
        2 * self.forbidden_count <= self.degree && self.holes().all(|h| self.is_end_interval(h))
    }

    /// Exactly one home interval, i.e. the allowed values are `lo..=hi`.
    pub fn single_home(&self) -> Option<(usize, usize)> {
        let mut homes = self.homes();
        let first = homes.next()?;
        homes.next().is_none().then_some((first.lo, first.hi))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalProfile {
    vertices: Vec<VertexProfile>,
}

impl IntervalProfile {
    pub fn vertex(&self, v: Vertex) -> &VertexProfile {
        &self.vertices[v]
    }

    pub fn vertices(&self) -> &[VertexProfile] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn interval_profile(f: &ForbiddenLists, g: &MultiGraph) -> Result<IntervalProfile, ListError> {
    if f.len() != g.vertex_count() {
        return Err(ListError::WrongLength {
            expected: g.vertex_count(),
            got: f.len(),
        });
    }
    let mut vertices = Vec::with_capacity(f.len());
    for v in 0..g.vertex_count() {
        let d = g.degree(v);
        if let Some(&value) = f.get(v).iter().next_back() {
            if value > d {
                return Err(ListError::OutOfRangeForbidden {
                    vertex: v,
                    value,
                    degree: d,
                });
            }
        }
        vertices.push(VertexProfile::new(d, f.get(v)));
    }
    Ok(IntervalProfile { vertices })
}

/// Vertex sets D_F, D_A, D_B, D_X for one orientation. A vertex whose
/// out-degree sits in a home of size one is in both D_A and D_B.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexClassification {
    pub forbidden: Vec<Vertex>,
    pub above: Vec<Vertex>,
    pub below: Vec<Vertex>,
    pub far: Vec<Vertex>,
}

impl VertexClassification {
    /// Lexicographic potential: fewer forbidden vertices first, then more
    /// far vertices. Smaller is better.
    pub fn potential(&self) -> Potential {
        Potential {
            forbidden: self.forbidden.len(),
            far: self.far.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Potential {
    pub forbidden: usize,
    pub far: usize,
}

impl Potential {
    /// Strictly better: |D_F| drops, or stays while |D_X| grows.
    pub fn improves_on(&self, other: &Potential) -> bool {
        (self.forbidden, std::cmp::Reverse(self.far))
            < (other.forbidden, std::cmp::Reverse(other.far))
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.forbidden, self.far)
    }
}

pub fn classify(d: &Orientation, profile: &IntervalProfile) -> VertexClassification {
    let mut c = VertexClassification::default();
    for (v, p) in profile.vertices.iter().enumerate() {
        let class = p.class(d.out_degree(v));
        if class.forbidden {
            c.forbidden.push(v);
        }
        if class.above_hole {
            c.above.push(v);
        }
        if class.below_hole {
            c.below.push(v);
        }
        if class.far() {
            c.far.push(v);
        }
    }
    c
}

pub fn potential(d: &Orientation, profile: &IntervalProfile) -> Potential {
    let mut p = Potential {
        forbidden: 0,
        far: 0,
    };
    for (v, vp) in profile.vertices.iter().enumerate() {
        let class = vp.class(d.out_degree(v));
        if class.forbidden {
            p.forbidden += 1;
        } else if class.far() {
            p.far += 1;
        }
    }
    p
}

/// |F(v)| < d(v)/2 at every vertex.
pub fn check_strict_half(f: &ForbiddenLists, g: &MultiGraph) -> bool {
    (0..g.vertex_count()).all(|v| 2 * f.get(v).len() < g.degree(v))
}

/// |F(v)| ≤ d(v)/2 at every vertex.
pub fn check_weak_half(f: &ForbiddenLists, g: &MultiGraph) -> bool {
    (0..g.vertex_count()).all(|v| 2 * f.get(v).len() <= g.degree(v))
}

/// The strict bound, except that isolated vertices with an empty list are
/// accepted (they impose nothing).
pub fn check_strict_half_solvable(f: &ForbiddenLists, g: &MultiGraph) -> bool {
    (0..g.vertex_count()).all(|v| {
        let d = g.degree(v);
        let k = f.get(v).len();
        2 * k < d || (d == 0 && k == 0)
    })
}

/// Holes of size ≤ 2, interior homes of size ≥ 3, admissible end-intervals.
pub fn check_lasso_lists(profile: &IntervalProfile) -> bool {
    profile.vertices.iter().all(|p| p.lasso_compatible(false))
}

/// As [`check_lasso_lists`] but both end-intervals must be homes of size ≥ 2.
pub fn check_lasso_lists_strict(profile: &IntervalProfile) -> bool {
    profile.vertices.iter().all(|p| p.lasso_compatible(true))
}

/// Every hole is an end-interval and |F(v)| ≤ d(v)/2.
pub fn check_end_holes(profile: &IntervalProfile) -> bool {
    profile.vertices.iter().all(VertexProfile::end_holes_only)
}
