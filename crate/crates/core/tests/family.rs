use std::f64::consts::PI;

use ccrenorm::{build_family, LiftShape, Real, R128};
use proptest::prelude::*;

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    0.0,
    0.538_469_310_105_683_1,
    -0.538_469_310_105_683_1,
    0.906_179_845_938_664,
    -0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
    0.236_926_885_056_189_1,
];

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            GL_NODES
                .iter()
                .zip(GL_WEIGHTS)
                .map(|(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

fn density(alpha: f64, eps: f64, t: f64) -> f64 {
    (2.0 * (PI * t).sin()).abs().powf(alpha - 1.0) * (1.0 + eps * (2.0 * PI * t).cos())
}

/// ∫₀ˣ density for x in [0, 1/2], with t = u⁴ to smooth the power at 0.
fn primitive(alpha: f64, eps: f64, x: f64) -> f64 {
    gauss_legendre(
        |u| density(alpha, eps, u.powi(4)) * 4.0 * u.powi(3),
        0.0,
        x.powf(0.25),
        400,
    )
}

/// Independent quadrature of the normalized lift on [0, 1].
fn reference(alpha: f64, eps: f64, x: f64) -> f64 {
    let half = primitive(alpha, eps, 0.5);
    if x <= 0.5 {
        primitive(alpha, eps, x) / (2.0 * half)
    } else {
        1.0 - primitive(alpha, eps, 1.0 - x) / (2.0 * half)
    }
}

#[test]
fn quadratic_exponent_closed_form() {
    // α = 2: G' = (π/4)·2|sin πx|, so G(1/4) = (2 - √2)/4.
    let fam = build_family::<R128>(2.0, 0.0).unwrap();
    let c = fam.c_norm().to_f64();
    assert!((c - PI / 4.0).abs() < 1e-15);
    let g = fam.eval(&R128::ratio(1, 4)).to_f64();
    assert!((g - (2.0 - 2f64.sqrt()) / 4.0).abs() < 1e-15);
}

#[test]
fn normalization_matches_quadrature() {
    for (alpha, eps) in [(1.5, 0.0), (2.7, 0.3), (3.0, 0.0), (3.3, -0.4), (5.0, 0.2)] {
        let fam = build_family::<R128>(alpha, eps).unwrap();
        let c = 1.0 / (2.0 * primitive(alpha, eps, 0.5));
        let rel = (fam.c_norm().to_f64() - c).abs() / c;
        assert!(rel < 1e-11, "alpha {alpha} eps {eps}: rel {rel:e}");
    }
}

#[test]
fn f64_and_multiprecision_agree() {
    let a = build_family::<f64>(2.6, 0.25).unwrap();
    let b = build_family::<R128>(2.6, 0.25).unwrap();
    for i in 0..=64 {
        let x = -1.0 + 3.0 * i as f64 / 64.0;
        let d = (a.eval(&x) - b.eval(&R128::from_f64(x)).to_f64()).abs();
        assert!(d < 10.0 * a.quad_tol(), "x = {x}: {d:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lift_matches_quadrature(alpha in 1.2f64..4.5, eps in -0.6f64..0.6, x in 0.0f64..1.0) {
        let fam = build_family::<R128>(alpha, eps).unwrap();
        let got = fam.eval(&R128::from_f64(x)).to_f64();
        prop_assert!((got - reference(alpha, eps, x)).abs() < 1e-11);
    }

    #[test]
    fn slope_matches_closed_form(alpha in 1.2f64..4.5, eps in -0.6f64..0.6, x in 0.01f64..0.99) {
        let fam = build_family::<R128>(alpha, eps).unwrap();
        let c = fam.c_norm().to_f64();
        let got = fam.slope(&R128::from_f64(x)).to_f64();
        let want = c * density(alpha, eps, x);
        prop_assert!((got - want).abs() < 1e-12 * want.max(1.0));
    }
}
