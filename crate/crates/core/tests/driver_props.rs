mod common;

use std::collections::BTreeSet;

use favoid::driver::{solve, Certificate, SolveOptions, Status};
use favoid::generators::gen_regular;
use favoid::oracle::{oracle_decide, OracleStatus};
use favoid::ForbiddenLists;
use proptest::collection::btree_set;
use proptest::prelude::*;

use common::avoids;
use common::strategies::instance;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn agrees_with_the_oracle((g, f) in instance(7, 12), seed in any::<u64>()) {
        let options = SolveOptions { seed, ..SolveOptions::default() };
        let rep = solve(&g, &f, &options);
        let truth = oracle_decide(&g, &f, 24).unwrap().status;
        match rep.status {
            Status::Sat => {
                prop_assert_eq!(truth, OracleStatus::Sat);
                prop_assert!(avoids(&g, rep.orientation.as_ref().unwrap(), &f));
            }
            Status::Unsat => {
                prop_assert_eq!(truth, OracleStatus::Unsat);
                prop_assert!(rep.orientation.is_none());
                prop_assert!(rep.certificate.is_some());
                if let Some(Certificate::FullList { vertex }) = rep.certificate {
                    prop_assert!(f.get(vertex).len() > g.degree(vertex));
                }
            }
            Status::GiveUp => prop_assert!(false, "gave up below the oracle budget"),
        }
        prop_assert!(!rep.methods.is_empty());
    }

    #[test]
    fn regular_small_lists_never_give_up(
        half in 2usize..7,
        d in 5usize..7,
        gseed in any::<u64>(),
        values in btree_set(0usize..8, 0..=2),
    ) {
        let n = 2 * half;
        let g = gen_regular(n, d, gseed).unwrap();
        let set: BTreeSet<usize> = values.into_iter().filter(|&x| x <= d).collect();
        let f = ForbiddenLists::clipped(&g, vec![set; n]).unwrap();
        let options = SolveOptions { oracle_budget: 0, ..SolveOptions::default() };
        let rep = solve(&g, &f, &options);
        prop_assert_eq!(rep.status, Status::Sat, "methods {:?}", rep.methods);
        prop_assert!(avoids(&g, rep.orientation.as_ref().unwrap(), &f));
    }
}
