mod common;

use std::sync::Arc;

use ccrenorm::rotation::{
    cf_window_with, expand, rotation_number_with, superstable_in, RotationOptions, Tail,
    WindowOptions,
};
use ccrenorm::{
    build_family, superstable_parameter, CircleMapLift, ContinuedFraction, CriticalCircleFamily,
    Real, RigidRotation, R128,
};
use proptest::prelude::*;

use common::frac_dist;

fn arnold() -> Arc<CriticalCircleFamily<R128>> {
    Arc::new(build_family::<R128>(3.0, 0.0).unwrap())
}

fn budget(max_evals: u64) -> RotationOptions {
    RotationOptions {
        max_evals,
        ..RotationOptions::default()
    }
}

/// Closed-form rational value of a terminated expansion.
fn rational_value(cf: &ContinuedFraction) -> f64 {
    if cf.is_empty() {
        return 0.0;
    }
    let (p, q) = cf.convergent(cf.len()).unwrap();
    p as f64 / q as f64
}

#[test]
fn arnold_golden_returns_are_best_approximations() {
    let fam = arnold();
    let theta = common::parameter_for::<R128, _>(&fam, &[1; 12]);
    let f = CircleMapLift::new(fam, theta);
    let exp = expand(&f, 12, &RotationOptions::default(), |_, _| false).unwrap();
    let q: Vec<u64> = exp.levels.iter().map(|l| l.q).collect();
    assert_eq!(&q[..8], &[1, 1, 2, 3, 5, 8, 13, 21]);
    let orbit: Vec<f64> = f
        .orbit(&R128::zero(), 400)
        .iter()
        .map(Real::to_f64)
        .collect();
    for n in 1..exp.levels.len() - 1 {
        let level = &exp.levels[n];
        let gap = level.a.abs().to_f64();
        assert!((frac_dist(orbit[level.q as usize]) - gap).abs() < 1e-12);
        for j in 1..exp.levels[n + 1].q.min(400) {
            if j != level.q {
                assert!(frac_dist(orbit[j as usize]) > gap, "level {n}, j = {j}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closest_returns_by_brute_force(theta in 0.01f64..0.99, alpha in prop::sample::select(vec![2.5, 3.0, 3.5])) {
        let fam = Arc::new(build_family::<R128>(alpha, 0.0).unwrap());
        let f = CircleMapLift::new(fam, R128::from_f64(theta));
        let exp = expand(&f, 10, &budget(200_000), |_, _| false).unwrap();
        // Levels reached by a landing on 0 end the expansion.
        let full = match exp.tail {
            Tail::Terminated => exp.levels.len().saturating_sub(1),
            _ => exp.levels.len(),
        };
        let horizon = 2000usize;
        let orbit: Vec<f64> = f.orbit(&R128::zero(), horizon).iter().map(Real::to_f64).collect();
        for n in 1..full.saturating_sub(1) {
            let level = &exp.levels[n];
            let next_q = exp.levels[n + 1].q as usize;
            if next_q > horizon {
                break;
            }
            prop_assert!(level.a.sign() != exp.levels[n - 1].a.sign());
            // No earlier orbit point falls between 0 and the closest return.
            let a = level.a.to_f64();
            for (j, x) in orbit.iter().enumerate().take(next_q).skip(1) {
                if j as u64 != level.q {
                    let y = x - x.floor();
                    let inside = if a > 0.0 { y < a } else { y > 1.0 + a };
                    prop_assert!(!inside, "level {} j {}", n, j);
                }
            }
        }
    }

    #[test]
    fn rotation_number_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let fam = arnold();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let rho = |t: f64| rotation_number_with(&CircleMapLift::new(Arc::clone(&fam), R128::from_f64(t)), 16, &budget(300_000));
        let (Ok(r1), Ok(r2)) = (rho(lo), rho(hi)) else { return Ok(()) };
        let slack = |cf: &ContinuedFraction| {
            if cf.is_terminated() || cf.is_empty() {
                0.0
            } else {
                let (_, q) = cf.convergent(cf.len()).unwrap();
                1.0 / (q as f64 * q as f64)
            }
        };
        let v1 = r1.winding as f64 + r1.value.to_f64();
        let v2 = r2.winding as f64 + r2.value.to_f64();
        prop_assert!(v1 - slack(&r1.cf) <= v2 + slack(&r2.cf) + 1e-12, "{} -> {}, {} -> {}", lo, r1.cf, hi, r2.cf);
    }

}

// Window searches bisect many rotation numbers, so they get fewer cases.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn rotation_windows_nest_and_match_rationals(
        entries in prop::collection::vec(1u64..5, 1..4),
        extra in 1u64..5,
    ) {
        let shape = Arc::new(RigidRotation);
        let mut opts = WindowOptions::<R128>::new(1e-7);
        opts.rotation.max_evals = 200_000;
        let outer = cf_window_with(&shape, &ContinuedFraction::prefix(&entries).unwrap(), &opts).unwrap();
        let mut longer = entries.clone();
        longer.push(extra);
        let inner = cf_window_with(&shape, &ContinuedFraction::prefix(&longer).unwrap(), &opts).unwrap();
        let slack = R128::from_f64(1e-5);
        prop_assert!(inner.lo.clone() + &slack >= outer.lo && inner.hi.clone() <= outer.hi.clone() + &slack);
        // The rotation window lies between [P] and [P, 1].
        let a = rational_value(&ContinuedFraction::rational(&entries).unwrap());
        let mut with_one = entries.clone();
        with_one.push(1);
        let b = rational_value(&ContinuedFraction::rational(&with_one).unwrap());
        prop_assert!((outer.lo.to_f64() - a.min(b)).abs() < 1e-5);
        prop_assert!((outer.hi.to_f64() - a.max(b)).abs() < 1e-5);
    }

    #[test]
    fn critical_windows_nest(entries in prop::collection::vec(1u64..4, 1..4), extra in 1u64..4) {
        let fam = arnold();
        let mut opts = WindowOptions::<R128>::new(1e-10);
        opts.rotation.max_evals = 200_000;
        let outer = cf_window_with(&fam, &ContinuedFraction::prefix(&entries).unwrap(), &opts).unwrap();
        let mut longer = entries.clone();
        longer.push(extra);
        let inner = cf_window_with(&fam, &ContinuedFraction::prefix(&longer).unwrap(), &opts).unwrap();
        let slack = R128::from_f64(1e-9);
        prop_assert!(inner.lo.clone() + &slack >= outer.lo && inner.hi.clone() <= outer.hi.clone() + &slack);
        prop_assert!(inner.width() < outer.width());
    }

    #[test]
    fn superstable_parameters_lie_on_their_plateau(entries in prop::collection::vec(1u64..4, 1..5)) {
        let fam = arnold();
        let rational = ContinuedFraction::rational(&entries).unwrap();
        let (p, q) = rational.convergent(entries.len()).unwrap();
        let s = superstable_parameter::<R128, _>(&fam, p, q, 1e-32).unwrap();
        let r = rotation_number_with(&CircleMapLift::new(Arc::clone(&fam), s.theta.clone()), 16, &budget(2_000_000)).unwrap();
        let got = r.winding as f64 + r.value.to_f64();
        prop_assert!(r.cf.is_terminated() || r.cf.is_empty());
        prop_assert!((got - p as f64 / q as f64).abs() < 1e-15);
        let mut opts = WindowOptions::<R128>::new(1e-12);
        opts.rotation.max_evals = 200_000;
        let plateau = cf_window_with(&fam, &rational, &opts).unwrap();
        prop_assert!(plateau.contains(&s.theta));
        // The bracketed solver finds the same parameter inside the plateau.
        let again = superstable_in(&fam, p, q, 1e-32, (plateau.lo.clone(), plateau.hi.clone()), None).unwrap();
        prop_assert!((again.theta - s.theta).abs().to_f64() < 1e-20);
    }
}
