//! Rotation numbers, continued fractions, closest returns and parameter
//! solvers.
//!
//! The expansion of `ρ(F)` is read off the closest returns of the orbit of
//! the critical point. With `(q₋₁, p₋₁) = (0, 1)`, `(q₀, p₀) = (1, 0)` and
//! `aₙ = F^{qₙ}(0) - pₙ`, the level-`n` map `ηₙ = F^{qₙ₋₁} - pₙ₋₁` is
//! iterated from `aₙ₋₂`; the number of steps taken before the orbit crosses
//! `0` is the entry `rₙ₋₁`, and the last point before the crossing is `aₙ`.
//! A periodic critical orbit hits `0` (rational, terminated), and a fixed
//! point of `ηₙ` on the near side of `0` means mode locking at
//! `pₙ₋₁/qₙ₋₁`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maps::{CircleMapLift, LiftShape};
use crate::real::Real;

/// Continued-fraction entries `[r₀, r₁, …]` of a number in `[0, 1]`.
///
/// `terminated` marks a rational whose expansion ends here (an implicit
/// trailing `∞`). An unterminated value is a prefix of a longer expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    entries: Vec<u64>,
    terminated: bool,
}

impl ContinuedFraction {
    pub fn new(entries: Vec<u64>, terminated: bool) -> Result<Self> {
        if entries.contains(&0) {
            return Err(Error::Domain(
                "continued fraction entries must be at least 1".into(),
            ));
        }
        Ok(Self {
            entries,
            terminated,
        })
    }

    /// Prefix of an expansion.
    pub fn prefix(entries: &[u64]) -> Result<Self> {
        Self::new(entries.to_vec(), false)
    }

    /// The rational `[entries]`.
    pub fn rational(entries: &[u64]) -> Result<Self> {
        Self::new(entries.to_vec(), true)
    }

    /// First `n` entries of the inverse golden mean `[1, 1, 1, …]`.
    pub fn golden(n: usize) -> Self {
        Self {
            entries: vec![1; n],
            terminated: false,
        }
    }

    /// First `n` entries of the periodic expansion `period, period, …`.
    pub fn periodic(period: &[u64], n: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Domain("empty continued-fraction period".into()));
        }
        Self::new(period.iter().copied().cycle().take(n).collect(), false)
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// First `n` entries as an unterminated prefix.
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.entries.len());
        Self {
            entries: self.entries[..n].to_vec(),
            terminated: self.terminated && n == self.entries.len(),
        }
    }

    /// Convergent `pₙ/qₙ = [r₀, …, rₙ₋₁]`.
    pub fn convergent(&self, n: usize) -> Result<(u64, u64)> {
        if n > self.entries.len() {
            return Err(Error::Range(format!(
                "convergent {n} needs {n} entries, have {}",
                self.entries.len()
            )));
        }
        let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, 0u64, 1u64);
        for &r in &self.entries[..n] {
            let p2 = r
                .checked_mul(p1)
                .and_then(|v| v.checked_add(p0))
                .ok_or_else(|| Error::Range("convergent overflows u64".into()))?;
            let q2 = r
                .checked_mul(q1)
                .and_then(|v| v.checked_add(q0))
                .ok_or_else(|| Error::Range("convergent overflows u64".into()))?;
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
        }
        Ok((p1, q1))
    }

    /// Value of the finite expansion (the last convergent) as `f64`.
    pub fn to_f64(&self) -> f64 {
        let mut v = 0.0;
        for &r in self.entries.iter().rev() {
            v = 1.0 / (r as f64 + v);
        }
        v
    }

    /// Rewrites a terminated expansion into canonical form: a trailing `1`
    /// is folded into its predecessor, and `[1]` becomes one full turn.
    /// Returns the integer carried out together with the canonical fraction.
    fn canonical(mut self) -> (i64, Self) {
        if !self.terminated {
            return (0, self);
        }
        if self.entries == [1] {
            self.entries.clear();
            return (1, self);
        }
        if self.entries.len() >= 2 && *self.entries.last().unwrap() == 1 {
            self.entries.pop();
            *self.entries.last_mut().unwrap() += 1;
        }
        (0, self)
    }

    /// Parses `"1,1,1"`, `"[2,2,inf]"` or `"[inf]"`.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut entries = Vec::new();
        let mut terminated = false;
        for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if terminated {
                return Err(Error::Domain(format!("entries after inf in {s:?}")));
            }
            if tok.eq_ignore_ascii_case("inf") {
                terminated = true;
                continue;
            }
            let r: u64 = tok
                .parse()
                .map_err(|_| Error::Domain(format!("bad continued-fraction entry {tok:?}")))?;
            entries.push(r);
        }
        Self::new(entries, terminated)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.entries.iter().map(u64::to_string).collect();
        if self.terminated {
            parts.push("inf".into());
        }
        write!(f, "[{}]", parts.join(","))
    }
}

/// `(pₙ, qₙ)` of `cf`.
pub fn convergents(cf: &ContinuedFraction, n: usize) -> Result<(u64, u64)> {
    cf.convergent(n)
}

/// Exact rational `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Frac {
    num: i128,
    den: i128,
}

impl Ord for Frac {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `w + [P]` and `w + [P, 1]`, the two ends of the values whose expansion
/// begins with `P` (raw expansions may end in `…, 1, ∞`).
fn prefix_bounds(winding: i64, entries: &[u64]) -> (Frac, Frac) {
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, 0i128, 1i128);
    for &r in entries {
        let r = r as i128;
        (p0, q0, p1, q1) = (p1, q1, r * p1 + p0, r * q1 + q0);
    }
    let w = winding as i128;
    (
        Frac {
            num: p1 + w * q1,
            den: q1,
        },
        Frac {
            num: p1 + p0 + w * (q1 + q0),
            den: q1 + q0,
        },
    )
}

/// Orders `ρ` against `target` given `ρ = w + [P]` exactly, or only the
/// prefix `P` of its expansion. `None` while the prefix does not decide.
fn classify(winding: i64, entries: &[u64], exact: bool, target: Frac) -> Option<Ordering> {
    let (b, a) = prefix_bounds(winding, entries);
    if exact {
        return Some(b.cmp(&target));
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if target < lo {
        Some(Ordering::Greater)
    } else if target > hi {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// One closest return: `a = F^q(0) - p`.
#[derive(Debug, Clone)]
pub struct ReturnLevel<T> {
    pub q: u64,
    pub p: i64,
    pub a: T,
}

/// How an expansion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Requested number of entries reached.
    Open,
    /// Rational rotation number; the expansion is complete.
    Terminated,
    /// The next entry exceeded the evaluation budget; numerically a plateau.
    Budget,
    /// The next return is below the resolution floor.
    Precision,
}

/// Raw output of the closest-return recursion.
#[derive(Debug, Clone)]
pub struct Expansion<T> {
    /// Integer part of `ρ`.
    pub winding: i64,
    pub cf: ContinuedFraction,
    pub tail: Tail,
    /// `levels[n]` is the closest return of level `n ≥ 0`, with translations
    /// `p` including the winding. Levels follow the raw recursion, before a
    /// terminated expansion is put in canonical form.
    pub levels: Vec<ReturnLevel<T>>,
    pub evaluations: u64,
}

impl<T: Real> Expansion<T> {
    /// Level `n ≥ -1`; level `-1` is `(q, p) = (0, 1 + 0·w)` with `a = -1`.
    pub fn level(&self, n: isize) -> Option<ReturnLevel<T>> {
        if n == -1 {
            return Some(ReturnLevel {
                q: 0,
                p: 1,
                a: -T::one(),
            });
        }
        self.levels.get(usize::try_from(n).ok()?).cloned()
    }
}

/// Budget and tolerance for the closest-return recursion.
#[derive(Debug, Clone, Copy)]
pub struct RotationOptions {
    /// Maximum number of map evaluations for one expansion.
    pub max_evals: u64,
    /// Distance below which an orbit point counts as hitting `0`, per map
    /// step of the level being iterated; `None` uses ten step tolerances.
    pub zero_tol: Option<f64>,
}

impl Default for RotationOptions {
    fn default() -> Self {
        Self {
            max_evals: 20_000_000,
            zero_tol: None,
        }
    }
}

enum LevelOutcome<T> {
    Cross { r: u64, last: T },
    Zero { r: u64, hit: T },
    Locked,
    Budget,
}

/// Iterates `η(w) = F^q(w) - p` from `w0` towards `0`.
fn run_level<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    q: u64,
    p: i64,
    w0: &T,
    zero_tol: f64,
    evals: &mut u64,
    max_evals: u64,
) -> Result<LevelOutcome<T>> {
    let side = w0.sign();
    let eta = |w: &T, evals: &mut u64| {
        *evals += q;
        map.eval_iterate_shifted(w, q, p)
    };
    // `η(u) - u` pointing away from 0 at some `u` between the orbit and 0
    // certifies a fixed point of `η` there.
    let points_away = |u: &T, evals: &mut u64| -> bool {
        let d = eta(u, evals) - u;
        d.sign() == side || d.abs().to_f64() <= zero_tol * 1e-3
    };

    let mut hist: [T; 3] = [w0.clone(), w0.clone(), w0.clone()];
    let mut w = w0.clone();
    let mut next_check = 4u64;
    for j in 1u64.. {
        if *evals + q > max_evals {
            return Ok(LevelOutcome::Budget);
        }
        let wn = eta(&w, evals);
        if wn.abs().to_f64() < zero_tol {
            return Ok(LevelOutcome::Zero { r: j, hit: wn });
        }
        if wn.sign() != side {
            if j == 1 {
                return Err(Error::Solver(
                    "closest returns out of order; parameter outside resolvable range".into(),
                ));
            }
            return Ok(LevelOutcome::Cross { r: j - 1, last: w });
        }
        let step = wn.clone() - &w;
        if step.is_zero() || step.sign() == side {
            return Ok(LevelOutcome::Locked);
        }
        // Give up early when the current pace cannot reach 0 within budget.
        if j >= 8 {
            let pace = (w.abs().to_f64() / step.abs().to_f64()) * q as f64;
            if pace > max_evals.saturating_sub(*evals) as f64 {
                return Ok(LevelOutcome::Budget);
            }
        }
        hist = [hist[1].clone(), hist[2].clone(), wn.clone()];
        w = wn;
        if j == next_check {
            next_check *= 2;
            let d1 = hist[1].clone() - &hist[0];
            let d2 = hist[2].clone() - &hist[1];
            let denom = d2.clone() - &d1;
            if !denom.is_zero() {
                let ratio = (d2.clone() / &d1).to_f64();
                if ratio > 0.0 && ratio < 1.0 {
                    let star = w.clone() - d2.clone() * &d2 / denom;
                    let beyond = star.clone() * T::from_i64(2) - &w;
                    for u in [star, beyond] {
                        let between = u.sign() == side && u.abs() < w.abs();
                        if between && points_away(&u, evals) {
                            return Ok(LevelOutcome::Locked);
                        }
                    }
                }
            }
        }
    }
    unreachable!()
}

/// Closest-return expansion of `ρ(F)` up to `max_entries` entries, stopping
/// early once `stop(k, entries)` returns true for the raw integer part `k`
/// and the raw entries so far.
pub fn expand<T, S, P>(
    map: &CircleMapLift<T, S>,
    max_entries: usize,
    opts: &RotationOptions,
    mut stop: P,
) -> Result<Expansion<T>>
where
    T: Real,
    S: LiftShape<T>,
    P: FnMut(i64, &[u64]) -> bool,
{
    let zero_tol = opts.zero_tol.unwrap_or(10.0 * map.step_tolerance());
    let floor_tol = 100.0 * zero_tol;
    let theta = map.theta().clone();
    let k = theta.floor_i64();
    let reduced = theta - T::from_i64(k);

    let mut entries = Vec::new();
    let mut levels = vec![ReturnLevel {
        q: 1,
        p: k,
        a: reduced.clone(),
    }];
    let mut prev = ReturnLevel {
        q: 0,
        p: 1,
        a: -T::one(),
    };
    let mut evals = 1u64;
    let mut tail = Tail::Open;

    if reduced.abs().to_f64() < zero_tol {
        tail = Tail::Terminated;
    }
    while tail == Tail::Open && entries.len() < max_entries && !stop(k, &entries) {
        let cur = levels.last().unwrap().clone();
        // Evaluation error of `F^q` grows with `q`.
        let q_scale = cur.q as f64;
        if cur.a.abs().to_f64() < floor_tol * q_scale {
            tail = Tail::Precision;
            break;
        }
        match run_level(
            map,
            cur.q,
            cur.p,
            &prev.a,
            zero_tol * q_scale,
            &mut evals,
            opts.max_evals,
        )? {
            LevelOutcome::Cross { r, last } => {
                entries.push(r);
                levels.push(ReturnLevel {
                    q: r * cur.q + prev.q,
                    p: r as i64 * cur.p + prev.p,
                    a: last,
                });
                prev = cur;
            }
            LevelOutcome::Zero { r, hit } => {
                entries.push(r);
                levels.push(ReturnLevel {
                    q: r * cur.q + prev.q,
                    p: r as i64 * cur.p + prev.p,
                    a: hit,
                });
                tail = Tail::Terminated;
            }
            LevelOutcome::Locked => tail = Tail::Terminated,
            LevelOutcome::Budget => tail = Tail::Budget,
        }
    }

    let (carry, cf) = ContinuedFraction {
        entries,
        terminated: tail == Tail::Terminated,
    }
    .canonical();
    Ok(Expansion {
        winding: k + carry,
        cf,
        tail,
        levels,
        evaluations: evals,
    })
}

/// Rotation number of a lift with its certified expansion.
#[derive(Debug, Clone)]
pub struct RotationNumber<T> {
    /// `pₙ/qₙ` of the certified prefix, in `[0, 1)`.
    pub value: T,
    /// Integer part of `ρ` for lifts with `θ` outside `[0, 1)`.
    pub winding: i64,
    pub cf: ContinuedFraction,
    pub certified_depth: usize,
}

/// `ρ(F)` to `depth` continued-fraction entries.
pub fn rotation_number<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    depth: usize,
) -> Result<RotationNumber<T>> {
    rotation_number_with(map, depth, &RotationOptions::default())
}

pub fn rotation_number_with<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    depth: usize,
    opts: &RotationOptions,
) -> Result<RotationNumber<T>> {
    if depth == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let exp = expand(map, depth, opts, |_, _| false)?;
    match exp.tail {
        Tail::Budget | Tail::Precision => {
            return Err(Error::Precision {
                certified_depth: exp.cf.len(),
                detail: match exp.tail {
                    Tail::Budget => "closest return exceeded the evaluation budget".into(),
                    _ => "closest return below resolution".into(),
                },
            })
        }
        _ => {}
    }
    let (p, q) = exp.cf.convergent(exp.cf.len())?;
    Ok(RotationNumber {
        value: T::from_i64(p as i64) / T::from_i64(q as i64),
        winding: exp.winding,
        certified_depth: exp.cf.len(),
        cf: exp.cf,
    })
}

/// Parameter at which the critical orbit is periodic of type `p/q`.
#[derive(Debug, Clone)]
pub struct SuperstableParameter<T> {
    pub p: u64,
    pub q: u64,
    pub theta: T,
    /// `|F_θ^q(0) - p|`.
    pub residual: T,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Solves `F_θ^q(0) = p` on `[0, 1]`.
pub fn superstable_parameter<T: Real, S: LiftShape<T>>(
    shape: &Arc<S>,
    p: u64,
    q: u64,
    tol: f64,
) -> Result<SuperstableParameter<T>> {
    superstable_in(shape, p, q, tol, (T::zero(), T::one()), None)
}

/// Solves `F_θ^q(0) = p` inside `bracket`, starting from `guess`.
///
/// `θ ↦ F_θ^q(0) - p` is strictly increasing with derivative at least 1, so
/// Newton steps are safeguarded by the sign bracket and fall back to
/// bisection whenever they leave it or stall.
pub fn superstable_in<T: Real, S: LiftShape<T>>(
    shape: &Arc<S>,
    p: u64,
    q: u64,
    tol: f64,
    bracket: (T, T),
    guess: Option<T>,
) -> Result<SuperstableParameter<T>> {
    if q == 0 || p > q || gcd(p, q) != 1 {
        return Err(Error::Domain(format!(
            "{p}/{q} is not a reduced fraction in [0, 1]"
        )));
    }
    let map = CircleMapLift::new(Arc::clone(shape), T::zero());
    let phi = |theta: &T| {
        map.with_theta(theta.clone())
            .iterate_with_parameter_derivative(&T::zero(), q, p as i64)
    };
    let (mut lo, mut hi) = bracket;
    let (flo, _) = phi(&lo);
    let (fhi, _) = phi(&hi);
    if flo.abs().to_f64() <= tol {
        return Ok(SuperstableParameter {
            p,
            q,
            theta: lo,
            residual: flo.abs(),
        });
    }
    if fhi.abs().to_f64() <= tol {
        return Ok(SuperstableParameter {
            p,
            q,
            theta: hi,
            residual: fhi.abs(),
        });
    }
    if flo.is_negative() == fhi.is_negative() {
        return Err(Error::Solver(format!(
            "superstable {p}/{q}: bracket does not change sign"
        )));
    }

    let half = T::ratio(1, 2);
    let mut x = match guess {
        Some(g) if g > lo && g < hi => g,
        _ => (lo.clone() + &hi) * &half,
    };
    let mut width = hi.clone() - &lo;
    let mut best = (x.clone(), T::from_f64(f64::INFINITY));
    for _ in 0..2000 {
        let (y, dy) = phi(&x);
        if y.abs() < best.1 {
            best = (x.clone(), y.abs());
        }
        if y.abs().to_f64() <= tol {
            return Ok(SuperstableParameter {
                p,
                q,
                theta: x,
                residual: y.abs(),
            });
        }
        if y.is_negative() {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let new_width = hi.clone() - &lo;
        let resolution = x.abs().to_f64().max(1.0) * T::unit_roundoff() * 8.0;
        if new_width.to_f64() <= resolution {
            break;
        }
        let newton = x.clone() - y / dy;
        let shrinking = new_width.to_f64() <= 0.5 * width.to_f64();
        x = if newton > lo && newton < hi && shrinking {
            newton
        } else {
            (lo.clone() + &hi) * &half
        };
        if !shrinking {
            width = new_width;
        } else {
            width *= &half;
        }
    }
    Err(Error::Precision {
        certified_depth: 0,
        detail: format!(
            "superstable {p}/{q}: residual {:e} above tolerance {tol:e} at theta {}",
            best.1.to_f64(),
            best.0.to_sci(20)
        ),
    })
}

/// Parameter interval whose rotation numbers begin with `combinatorics`.
#[derive(Debug, Clone)]
pub struct ParameterWindow<T> {
    pub lo: T,
    pub hi: T,
    pub combinatorics: ContinuedFraction,
}

impl<T: Real> ParameterWindow<T> {
    pub fn width(&self) -> T {
        self.hi.clone() - &self.lo
    }

    pub fn midpoint(&self) -> T {
        (self.lo.clone() + &self.hi) * T::ratio(1, 2)
    }

    pub fn contains(&self, theta: &T) -> bool {
        *theta >= self.lo && *theta <= self.hi
    }
}

/// Endpoint accuracy, search bracket and budget for [`cf_window_with`].
#[derive(Debug, Clone)]
pub struct WindowOptions<T> {
    pub tol: f64,
    /// Known enclosure of the window, e.g. the parent window.
    pub bracket: Option<(T, T)>,
    pub rotation: RotationOptions,
}

impl<T> WindowOptions<T> {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            bracket: None,
            rotation: RotationOptions::default(),
        }
    }
}

/// Compares `ρ(F_θ)` with the rational `target`. A next entry that cannot
/// be resolved (budget or resolution exhausted) counts as mode locking at
/// the current level.
fn compare_at<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    target: Frac,
    target_len: usize,
    opts: &RotationOptions,
) -> Result<Ordering> {
    let exp = expand(map, target_len + 3, opts, |k, e| {
        classify(k, e, false, target).is_some()
    })?;
    let exact = exp.tail != Tail::Open;
    classify(exp.winding, exp.cf.entries(), exact, target).ok_or_else(|| Error::Precision {
        certified_depth: exp.cf.len(),
        detail: "rotation number not resolved against window edge".into(),
    })
}

/// `sup {θ ∈ [lo, hi] : pred(θ)}` for a predicate true at `lo`, false at `hi`.
fn bisect_edge<T: Real, F>(mut lo: T, mut hi: T, tol: f64, pred: F) -> Result<T>
where
    F: Fn(&T) -> Result<bool>,
{
    let half = T::ratio(1, 2);
    while (hi.clone() - &lo).to_f64() > tol {
        let mid = (lo.clone() + &hi) * &half;
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * half)
}

/// `[lo, hi]`, the closure of `{θ : CF(ρ(F_θ)) starts with prefix}`.
///
/// A terminated prefix names a rational and yields its mode-locking plateau;
/// `[inf]` is the plateau of `0`.
pub fn cf_window<T: Real, S: LiftShape<T>>(
    shape: &Arc<S>,
    prefix: &ContinuedFraction,
    tol: f64,
) -> Result<ParameterWindow<T>> {
    cf_window_with(shape, prefix, &WindowOptions::new(tol))
}

pub fn cf_window_with<T: Real, S: LiftShape<T>>(
    shape: &Arc<S>,
    prefix: &ContinuedFraction,
    opts: &WindowOptions<T>,
) -> Result<ParameterWindow<T>> {
    if prefix.is_empty() && !prefix.is_terminated() {
        return Err(Error::Domain("window prefix must be nonempty".into()));
    }
    let map = CircleMapLift::new(Arc::clone(shape), T::zero());
    let len = prefix.len();

    // Edges are `sup {θ : ρ ≤ R}` or `sup {θ : ρ < R}` for rationals R.
    let edge = |target: Frac, inclusive: bool| -> Result<T> {
        let pred = |theta: &T| -> Result<bool> {
            let ord = compare_at(&map.with_theta(theta.clone()), target, len, &opts.rotation)?;
            Ok(ord == Ordering::Less || (inclusive && ord == Ordering::Equal))
        };
        let (mut lo, mut hi) = (-T::one(), T::from_i64(2));
        if let Some((blo, bhi)) = &opts.bracket {
            let pad = T::from_f64(opts.tol);
            let (a, b) = (blo.clone() - &pad, bhi.clone() + &pad);
            if pred(&a)? && !pred(&b)? {
                (lo, hi) = (a, b);
            }
        }
        bisect_edge(lo, hi, opts.tol, pred)
    };

    // Membership uses the canonical expansion (last entry at least 2): the
    // rational `[P]` belongs to the set only when `P` ends in an entry of at
    // least 2, and `[P, 1]` never does.
    let (b, a) = prefix_bounds(0, prefix.entries());
    let b_in = prefix.entries().last().is_some_and(|&r| r >= 2);
    let (lo, hi) = if prefix.is_terminated() {
        (edge(b, false)?, edge(b, true)?)
    } else if b > a {
        (edge(a, true)?, edge(b, b_in)?)
    } else {
        (edge(b, !b_in)?, edge(a, false)?)
    };
    if lo.partial_cmp(&hi) != Some(Ordering::Less) {
        return Err(Error::Solver(format!(
            "window for {prefix} is empty at this resolution"
        )));
    }
    Ok(ParameterWindow {
        lo,
        hi,
        combinatorics: prefix.clone(),
    })
}

/// A parameter whose rotation number matches `rho` to `depth` entries: the
/// midpoint of the corresponding window.
pub fn irrational_parameter<T: Real, S: LiftShape<T>>(
    shape: &Arc<S>,
    rho: &ContinuedFraction,
    depth: usize,
    tol: f64,
) -> Result<T> {
    if rho.len() < depth {
        return Err(Error::Range(format!(
            "need {depth} entries, continued fraction has {}",
            rho.len()
        )));
    }
    Ok(cf_window(shape, &rho.truncate(depth), tol)?.midpoint())
}

/// Windows of successively longer `prefixes`, each searched inside its
/// parent with edges located to `rel_tol` of the parent width (never below
/// the working precision). Returns the windows found before the first error.
pub fn nested_windows<T: Real, S: LiftShape<T>>(
    shape: &Arc<S>,
    prefixes: &[ContinuedFraction],
    rel_tol: f64,
    max_evals: u64,
) -> (Vec<ParameterWindow<T>>, Option<Error>) {
    let mut out: Vec<ParameterWindow<T>> = Vec::with_capacity(prefixes.len());
    for prefix in prefixes {
        let parent = out.last();
        let scale = parent.map_or(1.0, |w| w.width().to_f64());
        let mut opts = WindowOptions::new((rel_tol * scale).max(16.0 * T::unit_roundoff()));
        opts.bracket = parent.map(|w| (w.lo.clone(), w.hi.clone()));
        opts.rotation.max_evals = max_evals;
        match cf_window_with(shape, prefix, &opts) {
            Ok(w) => out.push(w),
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}
