use std::sync::Arc;

use ccrenorm::partitions::Generation;
use ccrenorm::rotation::{expand, RotationOptions};
use ccrenorm::{dynamical_partition, CircleMapLift, Real, RigidRotation, R128};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // For a rotation the level-n partition is the three-distance partition of
    // the first q_n + q_{n-1} orbit points: atoms of the two generations have
    // lengths |a_{n-1}| and |a_n|, and their left ends are the sorted orbit.
    #[test]
    fn rotation_partitions_are_three_distance(theta in 0.02f64..0.98) {
        let theta = R128::from_f64(theta);
        let f = CircleMapLift::new(Arc::new(RigidRotation), theta.clone());
        let exp = expand(&f, 8, &RotationOptions::default(), |_, _| false).unwrap();
        for n in 1..exp.levels.len().min(7) {
            let (prev, cur) = (&exp.levels[n - 1], &exp.levels[n]);
            let part = dynamical_partition(&f, n).unwrap();
            prop_assert_eq!((part.q_prev, part.q_curr), (prev.q, cur.q));
            prop_assert_eq!(part.len() as u64, prev.q + cur.q);
            for atom in &part.atoms {
                let want = match atom.generation {
                    Generation::Previous => prev.a.abs(),
                    Generation::Current => cur.a.abs(),
                };
                prop_assert!((atom.length.clone() - want).abs().to_f64() < 1e-28);
            }
            let mut orbit: Vec<R128> = (0..prev.q + cur.q)
                .map(|j| {
                    let x = theta.clone() * R128::from_i64(j as i64);
                    x.clone() - x.floor()
                })
                .collect();
            orbit.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut starts: Vec<R128> = part
                .atoms
                .iter()
                .map(|a| a.start.clone() - a.start.floor())
                .collect();
            starts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (s, o) in starts.iter().zip(&orbit) {
                prop_assert!((s.clone() - o).abs().to_f64() < 1e-28);
            }
            let total = part.total_length().to_f64();
            prop_assert!((total - 1.0).abs() < 1e-25);
        }
    }
}
