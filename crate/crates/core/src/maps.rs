//! Degree-one circle-map lifts with one critical point of exponent α.
//!
//! The family is defined through its derivative
//!
//! ```text
//! G'(x) = c(α, ε) · |2 sin πx|^(α-1) · (1 + ε cos 2πx),   G(0) = 0,
//! ```
//!
//! with `c` fixed by `G(1) = 1`. For α = 3, ε = 0 this is exactly the Arnold
//! lift `x - sin(2πx)/2π`. Near the integers `G(x) = K sign(x)|x|^α (1 + O(x²))`.
//!
//! `G` has no closed form for general α, so the family precomputes an
//! antiderivative table on `[0, 1/2]`:
//!
//! * on `[0, x₀]` a series `x^α Σ aₖ x^{2k}` obtained by expanding
//!   `(sin πx / πx)^(α-1) (1 + ε cos 2πx)` in powers of `x²`;
//! * on `[x₀, 1/2]` a chain of Taylor pieces of `G` around geometric centres,
//!   each generated by power-series arithmetic on `sin` and `cos` and chained
//!   by exact integration of the previous piece.
//!
//! The symmetry `G(1 - x) = 1 - G(x)` covers `[1/2, 1]` and `G(x + 1) = G(x) + 1`
//! covers the line. Every piece is truncated where its geometric tail drops
//! below the family tolerance `2^-(bits-20)`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;

/// The θ-independent part `G` of a lift `F_θ(x) = θ + G(x)`.
pub trait LiftShape<T: Real>: Send + Sync {
    /// `G(x)`.
    fn eval(&self, x: &T) -> T;
    /// `G'(x)`.
    fn slope(&self, x: &T) -> T;
    /// Absolute accuracy of a single `eval` call.
    fn tolerance(&self) -> f64;
}

/// Family tolerance `2^-(bits-20)` for a given mantissa width.
pub fn quad_tolerance(bits: u32) -> f64 {
    (-(bits as f64 - 20.0)).exp2()
}

/// Rigid rotation `G(x) = x`, the test double used to check closed forms.
#[derive(Debug, Clone, Copy, Default)]
pub struct RigidRotation;

impl<T: Real> LiftShape<T> for RigidRotation {
    fn eval(&self, x: &T) -> T {
        x.clone()
    }
    fn slope(&self, _x: &T) -> T {
        T::one()
    }
    /// One rounding per step.
    fn tolerance(&self) -> f64 {
        4.0 * T::unit_roundoff()
    }
}

#[derive(Debug, Clone)]
enum Power<T> {
    Int(i32),
    Frac(T),
}

impl<T: Real> Power<T> {
    fn new(e: f64) -> Self {
        if e.fract() == 0.0 && e.abs() <= 64.0 {
            Power::Int(e as i32)
        } else {
            Power::Frac(T::from_f64(e))
        }
    }

    /// `x^e` for `x > 0`.
    fn apply(&self, x: &T) -> T {
        match self {
            Power::Int(0) => T::one(),
            Power::Int(n) => x.powi(*n),
            Power::Frac(e) => (x.ln() * e).exp(),
        }
    }
}

#[derive(Debug, Clone)]
struct TaylorPiece<T> {
    center: T,
    /// `G(center + u) = Σ value[k] u^k`.
    value: Vec<T>,
    /// `G'(center + u) = Σ slope[k] u^k`.
    slope: Vec<T>,
}

#[derive(Debug, Clone)]
struct AntiderivativeTable<T> {
    origin_cut: f64,
    /// `G(x) = x^α Σ origin_value[k] x^{2k}` on `[0, origin_cut]`.
    origin_value: Vec<T>,
    /// `G'(x) = x^(α-1) Σ origin_slope[k] x^{2k}` on `[0, origin_cut]`.
    origin_slope: Vec<T>,
    /// Left edges of the Taylor pieces, ascending.
    edges: Vec<f64>,
    pieces: Vec<TaylorPiece<T>>,
}

/// Analytic degree-one family with a single critical point of exponent α.
#[derive(Debug, Clone)]
pub struct CriticalCircleFamily<T: Real> {
    alpha: f64,
    epsilon: f64,
    c_norm: T,
    quad_tol: f64,
    alpha_pow: Power<T>,
    beta_pow: Power<T>,
    half: T,
    table: AntiderivativeTable<T>,
}

const ORIGIN_CUT: f64 = 1.0 / 16.0;
/// Ratio between neighbouring piece edges; keeps `h / centre = 1/12`.
const PIECE_GROWTH: f64 = 13.0 / 11.0;

/// `P = S^β` for a series with `S[0] != 0` (J. C. P. Miller's recurrence).
fn pow_series<T: Real>(s: &[T], beta: &T, n: usize) -> Vec<T> {
    let s0 = s[0].clone();
    let mut p = Vec::with_capacity(n);
    let lead = if beta.clone() == T::one() {
        s0.clone()
    } else {
        (s0.ln() * beta).exp()
    };
    p.push(lead);
    let beta1 = beta.clone() + T::one();
    for k in 1..n {
        let mut acc = T::zero();
        for j in 1..=k.min(s.len() - 1) {
            let weight = beta1.clone() * T::from_i64(j as i64) - T::from_i64(k as i64);
            acc += weight * &s[j] * &p[k - j];
        }
        acc /= T::from_i64(k as i64) * &s0;
        p.push(acc);
    }
    p
}

fn mul_series<T: Real>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    (0..n)
        .map(|k| {
            let mut acc = T::zero();
            for j in 0..=k {
                if j < a.len() && k - j < b.len() {
                    acc += a[j].clone() * &b[k - j];
                }
            }
            acc
        })
        .collect()
}

fn horner<T: Real>(coeffs: &[T], u: &T) -> T {
    let mut acc = coeffs.last().cloned().unwrap_or_else(T::zero);
    for c in coeffs.iter().rev().skip(1) {
        acc *= u;
        acc += c;
    }
    acc
}

/// Number of Taylor terms so that `ratio^n` falls below the working precision.
fn terms_for(bits: u32, ratio: f64) -> usize {
    ((bits as f64 + 24.0) / (-ratio.log2())).ceil() as usize + 3
}

fn dyadic(v: f64) -> f64 {
    (v * 1048576.0).round() / 1048576.0
}

impl<T: Real> CriticalCircleFamily<T> {
    /// Builds the family for exponent `alpha > 1` and shape `|epsilon| < 1`.
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 1.0 {
            return Err(Error::Domain("exponent must exceed 1".into()));
        }
        if epsilon.is_nan() || epsilon.abs() >= 1.0 {
            return Err(Error::Domain("shape parameter breaks monotonicity".into()));
        }
        let bits = T::BITS;
        let pi = T::pi();
        let two_pi = pi.clone() * T::from_i64(2);
        let alpha_t = T::from_f64(alpha);
        let beta = T::from_f64(alpha - 1.0);
        let eps = T::from_f64(epsilon);

        // Origin series in y = x².
        let n0 = terms_for(bits, ORIGIN_CUT * ORIGIN_CUT) + 4;
        let mut sinc = Vec::with_capacity(n0);
        let mut cosine = Vec::with_capacity(n0);
        sinc.push(T::one());
        cosine.push(T::one());
        let pi2 = pi.clone() * &pi;
        let two_pi2 = two_pi.clone() * &two_pi;
        for k in 1..n0 {
            let kk = k as i64;
            let s = -(sinc[k - 1].clone() * &pi2) / T::from_i64((2 * kk) * (2 * kk + 1));
            let c = -(cosine[k - 1].clone() * &two_pi2) / T::from_i64((2 * kk - 1) * (2 * kk));
            sinc.push(s);
            cosine.push(c);
        }
        let weight: Vec<T> = cosine
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let w = eps.clone() * c;
                if k == 0 {
                    w + T::one()
                } else {
                    w
                }
            })
            .collect();
        let h_series = mul_series(&pow_series(&sinc, &beta, n0), &weight, n0);
        let prefactor = (two_pi.ln() * &beta).exp();
        let origin_slope: Vec<T> = h_series.iter().map(|h| h.clone() * &prefactor).collect();
        let origin_value: Vec<T> = origin_slope
            .iter()
            .enumerate()
            .map(|(k, d)| d.clone() / (alpha_t.clone() + T::from_i64(2 * k as i64)))
            .collect();

        let alpha_pow = Power::new(alpha);
        let beta_pow = Power::new(alpha - 1.0);

        let origin_at = |x: &T| -> T {
            let y = x.clone() * x;
            alpha_pow.apply(x) * horner(&origin_value, &y)
        };

        // Geometric piece edges on [ORIGIN_CUT, 1/2].
        let mut edges = vec![ORIGIN_CUT];
        loop {
            let next = dyadic(edges.last().unwrap() * PIECE_GROWTH);
            if next >= 0.5 - 1e-3 {
                edges.push(0.5);
                break;
            }
            edges.push(next);
        }

        let mut pieces = Vec::with_capacity(edges.len() - 1);
        let mut running = origin_at(&T::from_f64(ORIGIN_CUT));
        for w in edges.windows(2) {
            let (l, r) = (w[0], w[1]);
            let center_f = 0.5 * (l + r);
            let half_width = 0.5 * (r - l);
            let n = terms_for(bits, half_width / center_f);
            let center = T::from_f64(center_f);

            let pc = pi.clone() * &center;
            let (sin_c, cos_c) = (pc.sin(), pc.cos());
            let tc = two_pi.clone() * &center;
            let (sin_2c, cos_2c) = (tc.sin(), tc.cos());

            let mut s = Vec::with_capacity(n);
            let mut wgt = Vec::with_capacity(n);
            let mut pi_pow = T::from_i64(2);
            let mut two_pi_pow = eps.clone();
            for k in 0..n {
                if k > 0 {
                    pi_pow = pi_pow * &pi / T::from_i64(k as i64);
                    two_pi_pow = two_pi_pow * &two_pi / T::from_i64(k as i64);
                }
                let sk = match k % 4 {
                    0 => sin_c.clone(),
                    1 => cos_c.clone(),
                    2 => -sin_c.clone(),
                    _ => -cos_c.clone(),
                };
                s.push(pi_pow.clone() * sk);
                let ck = match k % 4 {
                    0 => cos_2c.clone(),
                    1 => -sin_2c.clone(),
                    2 => -cos_2c.clone(),
                    _ => sin_2c.clone(),
                };
                let mut wk = two_pi_pow.clone() * ck;
                if k == 0 {
                    wk += T::one();
                }
                wgt.push(wk);
            }
            let slope = mul_series(&pow_series(&s, &beta, n), &wgt, n);
            let mut value = Vec::with_capacity(n + 1);
            value.push(T::zero());
            for (k, g) in slope.iter().enumerate() {
                value.push(g.clone() / T::from_i64(k as i64 + 1));
            }
            // Fix the constant term so the piece agrees with the chain at `l`.
            let left_offset = T::from_f64(l) - &center;
            value[0] = running.clone() - horner(&value, &left_offset);
            let right_offset = T::from_f64(r) - &center;
            running = horner(&value, &right_offset);
            pieces.push(TaylorPiece {
                center,
                value,
                slope,
            });
        }

        // `running` is now the unnormalised G(1/2); the normalised lift has
        // G(1/2) = 1/2 by symmetry, which fixes c.
        let c_norm = T::one() / (running * T::from_i64(2));
        let scale = |v: &mut Vec<T>| v.iter_mut().for_each(|x| *x *= &c_norm);
        let mut origin_value = origin_value;
        let mut origin_slope = origin_slope;
        scale(&mut origin_value);
        scale(&mut origin_slope);
        for p in &mut pieces {
            scale(&mut p.value);
            scale(&mut p.slope);
        }

        edges.pop();
        Ok(Self {
            alpha,
            epsilon,
            c_norm,
            quad_tol: quad_tolerance(bits),
            alpha_pow,
            beta_pow,
            half: T::ratio(1, 2),
            table: AntiderivativeTable {
                origin_cut: ORIGIN_CUT,
                origin_value,
                origin_slope,
                edges,
                pieces,
            },
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Normalisation constant `c(α, ε)`.
    pub fn c_norm(&self) -> &T {
        &self.c_norm
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// Leading coefficient `K` in `G(x) ~ K x^α` at the critical point.
    pub fn critical_coefficient(&self) -> T {
        self.table.origin_value[0].clone()
    }

    fn piece_for(&self, t: f64) -> &TaylorPiece<T> {
        let idx = self.table.edges.partition_point(|&e| e <= t);
        &self.table.pieces[idx.saturating_sub(1).min(self.table.pieces.len() - 1)]
    }

    /// `G` on `[0, 1/2]`.
    fn eval_half(&self, t: &T) -> T {
        if t.is_zero() {
            return T::zero();
        }
        let tf = t.to_f64();
        if tf < self.table.origin_cut {
            let y = t.clone() * t;
            self.alpha_pow.apply(t) * horner(&self.table.origin_value, &y)
        } else {
            let piece = self.piece_for(tf);
            horner(&piece.value, &(t.clone() - &piece.center))
        }
    }

    /// `G'` on `[0, 1/2]`.
    fn slope_half(&self, t: &T) -> T {
        if t.is_zero() {
            return T::zero();
        }
        let tf = t.to_f64();
        if tf < self.table.origin_cut {
            let y = t.clone() * t;
            self.beta_pow.apply(t) * horner(&self.table.origin_slope, &y)
        } else {
            let piece = self.piece_for(tf);
            horner(&piece.slope, &(t.clone() - &piece.center))
        }
    }

    /// `G'(x)` from the defining formula, independent of the table.
    pub fn derivative_closed_form(&self, x: &T) -> T {
        let pi = T::pi();
        let s = (pi.clone() * x).sin().abs() * T::from_i64(2);
        let w = T::one() + T::from_f64(self.epsilon) * (pi * T::from_i64(2) * x).cos();
        if s.is_zero() {
            return T::zero();
        }
        self.c_norm.clone() * self.beta_pow.apply(&s) * w
    }
}

impl<T: Real> LiftShape<T> for CriticalCircleFamily<T> {
    fn eval(&self, x: &T) -> T {
        let n = x.floor();
        let t = x.clone() - &n;
        if t <= self.half {
            n + self.eval_half(&t)
        } else {
            let s = T::one() - &t;
            n + T::one() - self.eval_half(&s)
        }
    }

    fn slope(&self, x: &T) -> T {
        let t = x.clone() - x.floor();
        if t <= self.half {
            self.slope_half(&t)
        } else {
            self.slope_half(&(T::one() - t))
        }
    }

    fn tolerance(&self) -> f64 {
        self.quad_tol
    }
}

fn split_integer<T: Real>(x: T) -> (T, i64) {
    let k = x.floor_i64();
    if k == 0 {
        (x, 0)
    } else {
        (x - T::from_i64(k), k)
    }
}

/// Builds a [`CriticalCircleFamily`] at the precision of `T`.
pub fn build_family<T: Real>(alpha: f64, epsilon: f64) -> Result<CriticalCircleFamily<T>> {
    CriticalCircleFamily::new(alpha, epsilon)
}

/// The lift `F_θ(x) = θ + G(x)` of one member of a family.
#[derive(Debug)]
pub struct CircleMapLift<T: Real, S> {
    shape: Arc<S>,
    theta: T,
}

impl<T: Real, S> Clone for CircleMapLift<T, S> {
    fn clone(&self) -> Self {
        Self {
            shape: Arc::clone(&self.shape),
            theta: self.theta.clone(),
        }
    }
}

impl<T: Real, S: LiftShape<T>> CircleMapLift<T, S> {
    pub fn new(shape: Arc<S>, theta: T) -> Self {
        Self { shape, theta }
    }

    pub fn theta(&self) -> &T {
        &self.theta
    }

    pub fn shape(&self) -> &Arc<S> {
        &self.shape
    }

    /// Same shape, different parameter.
    pub fn with_theta(&self, theta: T) -> Self {
        Self::new(Arc::clone(&self.shape), theta)
    }

    /// Per-evaluation accuracy of the lift.
    pub fn step_tolerance(&self) -> f64 {
        self.shape.tolerance()
    }

    /// `F_θ(x)`.
    pub fn eval_lift(&self, x: &T) -> T {
        self.shape.eval(x) + &self.theta
    }

    /// `F_θ^n(x)`. The absolute error is bounded by `n` times the step
    /// tolerance scaled by the derivative of the remaining iterates.
    pub fn eval_iterate(&self, x: &T, n: u64) -> T {
        self.eval_iterate_shifted(x, n, 0)
    }

    /// `F_θ^n(x) - shift`, iterating on `[0, 1)` and carrying the integer
    /// parts separately so long orbits keep full relative precision.
    pub fn eval_iterate_shifted(&self, x: &T, n: u64, shift: i64) -> T {
        let (mut y, mut carry) = split_integer(x.clone());
        carry -= shift;
        for _ in 0..n {
            let (frac, k) = split_integer(self.eval_lift(&y));
            y = frac;
            carry += k;
        }
        y + T::from_i64(carry)
    }

    /// `F_θ'(x)`, zero exactly at the integers.
    pub fn eval_derivative(&self, x: &T) -> T {
        self.shape.slope(x)
    }

    /// `F^n(x) - shift` together with `∂F^n(x)/∂θ`.
    pub fn iterate_with_parameter_derivative(&self, x: &T, n: u64, shift: i64) -> (T, T) {
        let (mut y, mut carry) = split_integer(x.clone());
        carry -= shift;
        let mut dy = T::zero();
        for _ in 0..n {
            let slope = self.shape.slope(&y);
            dy = dy * slope + T::one();
            let (frac, k) = split_integer(self.eval_lift(&y));
            y = frac;
            carry += k;
        }
        (y + T::from_i64(carry), dy)
    }

    /// `[x, F(x), …, F^{n-1}(x)]`.
    pub fn orbit(&self, x: &T, n: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(n);
        let mut y = x.clone();
        for _ in 0..n {
            let next = self.eval_lift(&y);
            out.push(y);
            y = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{R128, R256};

    fn arnold<T: Real>(x: &T) -> T {
        let two_pi = T::pi() * T::from_i64(2);
        x.clone() - (two_pi.clone() * x).sin() / two_pi
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(
            build_family::<f64>(1.0, 0.0).unwrap_err(),
            Error::Domain("exponent must exceed 1".into())
        );
        assert_eq!(
            build_family::<f64>(3.0, 1.0).unwrap_err(),
            Error::Domain("shape parameter breaks monotonicity".into())
        );
        assert!(build_family::<f64>(3.0, -0.999).is_ok());
    }

    #[test]
    fn arnold_normalisation() {
        let fam = build_family::<R128>(3.0, 0.0).unwrap();
        assert!((fam.c_norm().clone() - R128::ratio(1, 2)).abs().to_f64() < 1e-30);
        let half = R128::ratio(1, 2);
        assert!((fam.eval(&half) - &half).abs().to_f64() < 1e-30);
    }

    #[test]
    fn arnold_reduction_on_grid() {
        let fam = build_family::<R256>(3.0, 0.0).unwrap();
        let tol = 10.0 * fam.quad_tol();
        for i in 0..=400 {
            let x = R256::ratio(i, 400) * R256::from_i64(3) - R256::one();
            let err = (fam.eval(&x) - arnold(&x)).abs().to_f64();
            assert!(err < tol, "x = {:?}: err {err:e}", x);
        }
    }

    #[test]
    fn eval_lift_examples() {
        let fam = Arc::new(build_family::<f64>(3.0, 0.0).unwrap());
        let f = CircleMapLift::new(fam.clone(), 0.3);
        assert_eq!(f.eval_lift(&0.0), 0.3);
        let g = CircleMapLift::new(fam, 0.0);
        assert!((g.eval_lift(&1.0) - 1.0).abs() < 1e-15);
        let expected = 0.25 - 1.0 / (2.0 * std::f64::consts::PI);
        assert!((g.eval_lift(&0.25) - expected).abs() < 1e-14);
    }

    #[test]
    fn g_of_one_is_one_for_fractional_exponent() {
        let fam = build_family::<R128>(2.5, 0.0).unwrap();
        let one = fam.eval(&R128::one());
        assert!((one - R128::one()).abs().to_f64() < 1e-30);
        let just_below = R128::one() - R128::from_f64(1e-10);
        assert!(fam.eval(&just_below) < R128::one());
    }

    #[test]
    fn derivative_examples() {
        let fam = Arc::new(build_family::<R128>(3.0, 0.0).unwrap());
        let f = CircleMapLift::new(fam.clone(), R128::zero());
        assert!(f.eval_derivative(&R128::zero()).is_zero());
        let d = f.eval_derivative(&R128::ratio(1, 2));
        assert!((d - R128::from_i64(2)).abs().to_f64() < 1e-28);
    }

    #[test]
    fn table_slope_matches_closed_form() {
        for &(alpha, eps) in &[(3.0, 0.0), (2.5, 0.3), (1.7, -0.6), (5.2, 0.1)] {
            let fam = build_family::<R128>(alpha, eps).unwrap();
            for i in 1..200 {
                let x = R128::ratio(i, 200) * R128::from_i64(2) - R128::from_f64(0.5);
                let a = fam.slope(&x);
                let b = fam.derivative_closed_form(&x);
                let scale = b.abs().to_f64().max(1e-2);
                let rel = (a - b).abs().to_f64() / scale;
                assert!(rel < 1e-25, "alpha {alpha} eps {eps} x {:?} rel {rel:e}", x);
            }
        }
    }

    #[test]
    fn f64_and_mp_tables_agree() {
        let lo = build_family::<f64>(2.7, 0.3).unwrap();
        let hi = build_family::<R128>(2.7, 0.3).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0 * 1.3 - 0.1;
            let a = lo.eval(&x);
            let b = hi.eval(&R128::from_f64(x)).to_f64();
            assert!((a - b).abs() < 1e-14, "x {x}: {a} vs {b}");
        }
    }

    #[test]
    fn iterate_composes() {
        let fam = Arc::new(build_family::<R128>(2.9, 0.2).unwrap());
        let f = CircleMapLift::new(fam, R128::from_f64(0.61));
        let x = R128::from_f64(0.17);
        let direct = f.eval_iterate(&x, 13);
        let split = f.eval_iterate(&f.eval_iterate(&x, 5), 8);
        assert!((direct - split).abs().to_f64() < 1e-28);
        assert_eq!(f.eval_iterate(&x, 0), x);
    }

    #[test]
    fn rigid_rotation_iterates() {
        let f = CircleMapLift::new(Arc::new(RigidRotation), 0.3f64);
        assert!((f.eval_iterate(&0.0, 5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn parameter_derivative_matches_difference() {
        let fam = Arc::new(build_family::<R128>(3.0, 0.1).unwrap());
        let theta = R128::from_f64(0.4);
        let h = R128::from_f64(1e-15);
        let f = CircleMapLift::new(fam.clone(), theta.clone());
        let (_, d) = f.iterate_with_parameter_derivative(&R128::zero(), 7, 0);
        let fp = f
            .with_theta(theta.clone() + &h)
            .eval_iterate(&R128::zero(), 7);
        let fm = f.with_theta(theta - &h).eval_iterate(&R128::zero(), 7);
        let fd = (fp - fm) / (h * R128::from_i64(2));
        assert!((fd - d).abs().to_f64() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn degree_one_and_monotone(
                alpha in 1.2f64..4.5,
                eps in -0.6f64..0.6,
                x in -2.0f64..2.0,
                dx in 1e-6f64..0.5,
            ) {
                let fam = build_family::<R128>(alpha, eps).unwrap();
                let x = R128::from_f64(x);
                let shifted = fam.eval(&(x.clone() + R128::one())) - fam.eval(&x);
                prop_assert!((shifted - R128::one()).abs().to_f64() < 1e-25);
                let y = x.clone() + R128::from_f64(dx);
                prop_assert!(fam.eval(&x) < fam.eval(&y));
            }

            #[test]
            fn critical_exponent_is_recovered(alpha in 1.3f64..4.5, eps in -0.5f64..0.5) {
                let fam = build_family::<R128>(alpha, eps).unwrap();
                let g0 = fam.eval(&R128::zero());
                let h = |x: f64| (fam.eval(&R128::from_f64(x)) - &g0).abs().ln().to_f64();
                let (x1, x2) = (1e-7, 1e-6);
                let slope = (h(x2) - h(x1)) / (x2 / x1).ln();
                prop_assert!((slope - alpha).abs() < 1e-3, "slope {slope} vs {alpha}");
            }

            #[test]
            fn iterates_compose(
                alpha in 1.5f64..4.0,
                theta in 0.0f64..1.0,
                x in 0.0f64..1.0,
                m in 0u64..20,
                n in 0u64..20,
            ) {
                let f = CircleMapLift::new(
                    Arc::new(build_family::<R128>(alpha, 0.0).unwrap()),
                    R128::from_f64(theta),
                );
                let x = R128::from_f64(x);
                let direct = f.eval_iterate(&x, m + n);
                let split = f.eval_iterate(&f.eval_iterate(&x, n), m);
                prop_assert!((direct - split).abs().to_f64() < 1e-20);
            }
        }
    }
}
