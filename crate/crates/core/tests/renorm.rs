mod common;

use std::sync::Arc;

use ccrenorm::renorm::{build_tower, RenormOptions};
use ccrenorm::{
    build_family, pair_distance, pair_from_map, renormalize, rotation_number, CircleMapLift,
    Height, Real, R128,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    // Heights along the tower follow the continued-fraction entries of ρ,
    // which the closest-return recursion computes independently.
    #[test]
    fn heights_are_continued_fraction_entries(
        entries in prop::collection::vec(1u64..3, 9),
        alpha in prop::sample::select(vec![2.5, 3.0, 3.5]),
    ) {
        let fam = Arc::new(build_family::<R128>(alpha, 0.1).unwrap());
        let theta = common::parameter_for::<R128, _>(&fam, &entries);
        let f = CircleMapLift::new(fam, theta);
        let rho = rotation_number(&f, 9).unwrap();
        prop_assert_eq!(&rho.cf.entries()[..7], &entries[..7]);
        let tower = build_tower(&f, 6, &RenormOptions::default());
        prop_assert!(tower.halted.is_none());
        for (k, h) in tower.heights().iter().enumerate() {
            prop_assert_eq!(*h, Height::Finite(rho.cf.entries()[k + 1]), "level {}", k);
        }
    }
}

#[test]
fn renormalization_agrees_with_deeper_pairs() {
    let fam = Arc::new(build_family::<R128>(3.0, 0.3).unwrap());
    let theta = common::parameter_for::<R128, _>(&fam, &[1; 12]);
    let f = CircleMapLift::new(fam, theta);
    for m in 0..8 {
        let next = renormalize(&pair_from_map(&f, m).unwrap()).unwrap();
        let direct = pair_from_map(&f, m + 1).unwrap();
        assert_eq!(next.eta_iterate(), direct.eta_iterate());
        assert!(pair_distance(&next, &direct, 64).unwrap().value.to_f64() < 1e-20);
        // Commuting-pair identity η∘ξ = ξ∘η at 0, in normalized coordinates.
        assert!(direct.commutation_residual().to_f64() < 1e-20);
    }
}
