mod common;

use std::collections::BTreeSet;

use amscheme_core::interpolation::{mu_rank, PointSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point_set() -> impl Strategy<Value = PointSet> {
    (1usize..=3).prop_flat_map(|dim| {
        prop::collection::btree_set(prop::collection::vec(-4i64..=4, dim), 1..=8).prop_map(
            move |pts| PointSet::from_integers(dim, &pts.into_iter().collect::<Vec<_>>()).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn least_space_invariants(s in point_set(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(common::check_point_set(&s, &mut rng, 5), Ok(()));
    }

    #[test]
    fn univariate_sets_need_full_degree(xs in prop::collection::btree_set(-20i64..=20, 1..=8)) {
        let pts: Vec<Vec<i64>> = xs.iter().map(|&x| vec![x]).collect();
        let s = PointSet::from_integers(1, &pts).unwrap();
        prop_assert_eq!(mu_rank(&s), xs.len() as i64 - 1);
    }

    #[test]
    fn collinear_sets_behave_like_univariate(n in 1usize..=8, dir in prop::collection::vec(-3i64..=3, 3)) {
        prop_assume!(dir.iter().any(|&d| d != 0));
        let pts: Vec<Vec<i64>> = (0..n as i64).map(|t| dir.iter().map(|d| d * t).collect()).collect();
        let distinct: BTreeSet<_> = pts.iter().collect();
        prop_assume!(distinct.len() == n);
        let s = PointSet::from_integers(3, &pts).unwrap();
        prop_assert_eq!(mu_rank(&s), n as i64 - 1);
    }
}
