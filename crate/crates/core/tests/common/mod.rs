#![allow(dead_code)]

use std::sync::Arc;

use ccrenorm::rotation::nested_windows as nested;
use ccrenorm::{ContinuedFraction, LiftShape, ParameterWindow, Real};

/// Nested windows for the prefixes of `entries`, each edge located to
/// `rel_tol` of the enclosing window.
pub fn nested_windows<T: Real, S: LiftShape<T>>(
    shape: &Arc<S>,
    entries: &[u64],
    rel_tol: f64,
    budget: u64,
) -> Vec<ParameterWindow<T>> {
    let prefixes: Vec<ContinuedFraction> = (1..=entries.len())
        .map(|n| ContinuedFraction::prefix(&entries[..n]).unwrap())
        .collect();
    let (windows, err) = nested(shape, &prefixes, rel_tol, budget);
    assert!(err.is_none(), "{err:?}");
    windows
}

/// A parameter whose rotation number starts with `entries`, up to the coarse
/// edge resolution near the last level.
pub fn parameter_for<T: Real, S: LiftShape<T>>(shape: &Arc<S>, entries: &[u64]) -> T {
    nested_windows(shape, entries, 1e-3, 200_000)
        .pop()
        .unwrap()
        .midpoint()
}

/// Distance to the nearest integer.
pub fn frac_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}
