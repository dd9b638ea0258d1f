mod common;

use std::collections::BTreeSet;

use favoid::lists::{
    classify, interval_profile, potential, shift_list_down, IntervalKind, VertexProfile,
};
use proptest::collection::btree_set;
use proptest::prelude::*;

use common::strategies::{instance, oriented};

fn profile_parts() -> impl Strategy<Value = (usize, BTreeSet<usize>)> {
    (0usize..12).prop_flat_map(|d| (Just(d), btree_set(0..=d, 0..=d + 1)))
}

proptest! {
    #[test]
    fn intervals_partition_and_alternate((d, f) in profile_parts()) {
        let p = VertexProfile::new(d, &f);
        prop_assert_eq!(p.intervals[0].lo, 0);
        prop_assert_eq!(p.intervals.last().unwrap().hi, d);
        for w in p.intervals.windows(2) {
            prop_assert_eq!(w[0].hi + 1, w[1].lo);
            prop_assert_ne!(w[0].kind, w[1].kind);
        }
        for iv in &p.intervals {
            for x in iv.lo..=iv.hi {
                prop_assert_eq!(f.contains(&x), iv.kind == IntervalKind::Hole);
            }
        }
    }

    #[test]
    fn value_classes_match_neighbours((d, f) in profile_parts()) {
        let p = VertexProfile::new(d, &f);
        for x in 0..=d {
            let c = p.class(x);
            prop_assert_eq!(c.forbidden, f.contains(&x));
            if !c.forbidden {
                prop_assert_eq!(c.above_hole, x > 0 && f.contains(&(x - 1)));
                prop_assert_eq!(c.below_hole, f.contains(&(x + 1)));
            }
        }
        let mut all: Vec<usize> = p.far();
        all.extend(p.above());
        all.extend(p.below());
        all.extend(f.iter().copied());
        all.sort();
        all.dedup();
        prop_assert_eq!(all, (0..=d).collect::<Vec<_>>());
    }

    #[test]
    fn shift_down_drops_zero(f in btree_set(0usize..10, 0..6)) {
        let s = shift_list_down(&f);
        prop_assert_eq!(s.len(), f.len() - usize::from(f.contains(&0)));
        for x in &s {
            prop_assert!(f.contains(&(x + 1)));
        }
    }

    #[test]
    fn classification_agrees_with_potential((g, d) in oriented(7, 14), seed in any::<u64>()) {
        let mut r = favoid::generators::rng(seed);
        let f = favoid::generators::arbitrary_lists(&g, 0.3, &mut r);
        let profile = interval_profile(&f, &g).unwrap();
        let c = classify(&d, &profile);
        prop_assert_eq!(c.potential(), potential(&d, &profile));
        for &v in &c.forbidden {
            prop_assert!(f.forbids(v, d.out_degree(v)));
        }
        prop_assert_eq!(
            c.forbidden.len(),
            (0..g.vertex_count()).filter(|&v| f.forbids(v, d.out_degree(v))).count()
        );
    }

    #[test]
    fn profile_rejects_nothing_valid((g, f) in instance(7, 14)) {
        let p = interval_profile(&f, &g).unwrap();
        prop_assert_eq!(p.len(), g.vertex_count());
    }
}
