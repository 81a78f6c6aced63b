//! Candidate-set equality under the literal filter "the exhaustive basis
//! expression of the target uses every generator". Known not to hold: which
//! generators appear depends on the basis, and 28 of the 160 targets of length
//! at most 4 in rank 2 admit a subgroup that passes under one basis but not
//! under its spanning-tree basis. Run with `--ignored` to see the failure.

mod common;

use std::collections::BTreeSet;

use common::all_words;
use monomorph::decider::exhaustive_candidates;
use monomorph::subgroup_search::generate_candidates;

#[test]
#[ignore = "unattainable under the basis-dependent reading; see README"]
fn exhaustive_with_every_generator_equals_test_subgroups() {
    for v in all_words(2, 4).into_iter().filter(|v| !v.is_empty()) {
        let t: BTreeSet<_> = generate_candidates(&[v.clone()], 2).0.into_iter().map(|c| c.key.unwrap()).collect();
        let e: BTreeSet<_> = exhaustive_candidates(&[v.clone()], 2)
            .into_iter()
            .filter(|(_, uses_all)| *uses_all)
            .map(|(c, _)| c.key.unwrap())
            .collect();
        assert_eq!(t, e, "target {v}");
    }
}
