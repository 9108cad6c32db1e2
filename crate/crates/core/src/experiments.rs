//! Experiment drivers: the universality constant δ, the contraction rate of
//! renormalization, closest-return self-similarity and the hyperbolicity
//! probe.
//!
//! Every driver returns whatever it certified before running out of
//! resolution; `halted` records the error that stopped it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::maps::{build_family, CircleMapLift, LiftShape, RigidRotation};
use crate::par::{self, Exec};
use crate::real::Real;
use crate::renorm::{build_tower, pair_distance_with, RenormOptions};
use crate::rotation::{
    expand, nested_windows, superstable_in, ContinuedFraction, RotationOptions,
    SuperstableParameter, Tail,
};
use crate::stats::{linear_fit, LinearFit};

/// Default depth of δ runs for a mantissa width.
pub fn default_depth(bits: u32) -> usize {
    match bits {
        0..=64 => 8,
        65..=160 => 14,
        _ => 20,
    }
}

/// Default residual tolerance for the superstable solve of denominator `q`.
pub fn superstable_tol<T: Real>(q: u64) -> f64 {
    1e6 * q.max(1) as f64 * T::unit_roundoff()
}

/// Aitken Δ² extrapolation of three terms; `None` when the differences do
/// not contract.
fn aitken(x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let (d1, d2) = (x1 - x0, x2 - x1);
    let denom = d2 - d1;
    if denom == 0.0 || d1 == 0.0 || (d2 / d1).abs() >= 1.0 {
        return None;
    }
    Some(x2 - d2 * d2 / denom)
}

fn aitken_real<T: Real>(x0: &T, x1: &T, x2: &T) -> Option<T> {
    let d1 = x1.clone() - x0;
    let d2 = x2.clone() - x1;
    let denom = d2.clone() - &d1;
    if denom.is_zero() || d1.is_zero() || (d2.clone() / &d1).abs().to_f64() >= 1.0 {
        return None;
    }
    Some(x2.clone() - d2.clone() * &d2 / denom)
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

/// `θ_n` solving `F_θ^{q}(0) = p` for the convergents `p/q` of
/// `repeat(period)` truncated to `n·len(period)` entries, `n = 1..=count`.
/// Returns the solved prefix and the error that stopped it.
pub fn superstable_sequence<T, S>(
    shape: &Arc<S>,
    period: &[u64],
    count: usize,
    tol: Option<f64>,
) -> (Vec<SuperstableParameter<T>>, Option<Error>)
where
    T: Real,
    S: LiftShape<T>,
{
    let mut targets = Vec::with_capacity(count);
    for n in 1..=count {
        match ContinuedFraction::periodic(period, n * period.len())
            .and_then(|cf| cf.convergent(cf.len()))
        {
            Ok(pq) => targets.push(pq),
            Err(e) => return (Vec::new(), Some(e)),
        }
    }
    solve_chain(shape, &targets, tol)
}

/// Superstable parameters for every convergent `p_n/q_n` of `cf`.
pub fn superstable_convergents<T, S>(
    shape: &Arc<S>,
    cf: &ContinuedFraction,
    tol: Option<f64>,
) -> (Vec<SuperstableParameter<T>>, Option<Error>)
where
    T: Real,
    S: LiftShape<T>,
{
    let targets: Vec<(u64, u64)> = (1..=cf.len())
        .filter_map(|n| cf.convergent(n).ok())
        .collect();
    solve_chain(shape, &targets, tol)
}

/// Solves the targets in order. Each solve is bracketed by the two previous
/// parameters (they straddle the next one for alternating convergents) and
/// seeded with a geometric extrapolation, falling back to `[0, 1]`.
fn solve_chain<T, S>(
    shape: &Arc<S>,
    targets: &[(u64, u64)],
    tol: Option<f64>,
) -> (Vec<SuperstableParameter<T>>, Option<Error>)
where
    T: Real,
    S: LiftShape<T>,
{
    let mut out: Vec<SuperstableParameter<T>> = Vec::with_capacity(targets.len());
    for &(p, q) in targets {
        let tol = tol.unwrap_or_else(|| superstable_tol::<T>(q));
        let k = out.len();
        let guess = if k >= 3 {
            let (a, b, c) = (&out[k - 3].theta, &out[k - 2].theta, &out[k - 1].theta);
            let g1 = b.clone() - a;
            let g2 = c.clone() - b;
            if g1.is_zero() {
                None
            } else {
                Some(c.clone() + g2.clone() * (g2 / g1))
            }
        } else {
            None
        };
        let mut solved = None;
        if k >= 2 {
            let (a, b) = (out[k - 2].theta.clone(), out[k - 1].theta.clone());
            let bracket = if a < b { (a, b) } else { (b, a) };
            if let Ok(s) = superstable_in(shape, p, q, tol, bracket, guess.clone()) {
                solved = Some(s);
            }
        }
        let s = match solved {
            Some(s) => s,
            None => match superstable_in(shape, p, q, tol, (T::zero(), T::one()), guess) {
                Ok(s) => s,
                Err(e) => return (out, Some(e)),
            },
        };
        out.push(s);
    }
    (out, None)
}

/// Parameter with rotation number `repeat(period)`, extrapolated from the
/// superstable sequence.
#[derive(Debug, Clone)]
pub struct ParameterEstimate<T> {
    pub theta: T,
    /// Distance between the extrapolated value and the last solved `θ_n`.
    pub uncertainty: f64,
    /// Number of superstable parameters used.
    pub levels: usize,
}

/// `θ_*` as the Aitken limit of the last three superstable parameters.
pub fn superstable_limit<T, S>(
    shape: &Arc<S>,
    period: &[u64],
    levels: usize,
) -> Result<ParameterEstimate<T>>
where
    T: Real,
    S: LiftShape<T>,
{
    if levels < 3 {
        return Err(Error::Domain(
            "superstable limit needs at least 3 levels".into(),
        ));
    }
    let (seq, halted) = superstable_sequence(shape, period, levels, None);
    if seq.len() < 3 {
        return Err(halted.unwrap_or_else(|| Error::Solver("no superstable parameters".into())));
    }
    let k = seq.len();
    let last = &seq[k - 1].theta;
    let theta =
        aitken_real(&seq[k - 3].theta, &seq[k - 2].theta, last).unwrap_or_else(|| last.clone());
    let uncertainty = (theta.clone() - last).abs().to_f64();
    Ok(ParameterEstimate {
        theta,
        uncertainty,
        levels: k,
    })
}

/// Limits for [`estimate_delta`].
#[derive(Debug, Clone, Copy)]
pub struct DeltaOptions {
    /// Superstable residual tolerance; `None` scales with `q` and precision.
    pub tol: Option<f64>,
    /// Whether to compute window widths as the second estimator.
    pub widths: bool,
    /// Window edges are located to this fraction of the enclosing window.
    pub window_rel_tol: f64,
    /// Map evaluations per rotation-number comparison inside windows.
    pub window_budget: u64,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        Self {
            tol: None,
            widths: true,
            window_rel_tol: 1e-7,
            window_budget: 2_000_000,
        }
    }
}

/// One row of a δ run.
#[derive(Debug, Clone)]
pub struct DeltaRow<T> {
    pub n: usize,
    pub p: u64,
    pub q: u64,
    pub theta: T,
    /// `θ_{n+1} - θ_n`.
    pub gap: Option<T>,
    /// `|g_{n-1} / g_n|`.
    pub delta_gap: Option<T>,
    pub width: Option<T>,
    /// `|I_{n-1}| / |I_n|`.
    pub delta_width: Option<T>,
}

/// Superstable and window scaling along `repeat(period)`.
#[derive(Debug, Clone)]
pub struct UniversalityReport<T> {
    pub period: Vec<u64>,
    pub rows: Vec<DeltaRow<T>>,
    /// Last gap-based estimate.
    pub delta_last: Option<f64>,
    /// Aitken extrapolation of the last three gap-based estimates.
    pub delta: Option<f64>,
    /// Largest pairwise spread of the last three gap-based estimates.
    pub uncertainty: Option<f64>,
    /// Last width-based estimate.
    pub delta_width: Option<f64>,
    /// Deepest `n` with a gap-based estimate.
    pub certified_depth: usize,
    pub halted: Option<Error>,
}

impl<T: Real> UniversalityReport<T> {
    /// Gap-based estimate at level `n`.
    pub fn delta_at(&self, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n)
            .and_then(|r| r.delta_gap.as_ref())
            .map(Real::to_f64)
    }

    /// Width-based estimate at level `n`.
    pub fn delta_width_at(&self, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n)
            .and_then(|r| r.delta_width.as_ref())
            .map(Real::to_f64)
    }
}

/// δ along the periodic combinatorics `repeat(period)` from superstable gaps
/// and from nested window widths, for `n = 1..=depth`.
pub fn estimate_delta<T, S>(
    shape: &Arc<S>,
    period: &[u64],
    depth: usize,
    opts: &DeltaOptions,
) -> Result<UniversalityReport<T>>
where
    T: Real,
    S: LiftShape<T>,
{
    if period.is_empty() || period.contains(&0) {
        return Err(Error::Domain(
            "period must be nonempty with positive entries".into(),
        ));
    }
    if depth < 2 {
        return Err(Error::Domain("depth must be at least 2".into()));
    }
    let (thetas, mut halted) = superstable_sequence(shape, period, depth + 1, opts.tol);

    let mut rows: Vec<DeltaRow<T>> = thetas
        .iter()
        .take(depth)
        .enumerate()
        .map(|(i, s)| DeltaRow {
            n: i + 1,
            p: s.p,
            q: s.q,
            theta: s.theta.clone(),
            gap: None,
            delta_gap: None,
            width: None,
            delta_width: None,
        })
        .collect();

    // Gaps stop once they sink to the solve tolerance.
    for i in 0..rows.len() {
        let Some(next) = thetas.get(i + 1) else { break };
        let gap = next.theta.clone() - &thetas[i].theta;
        let floor = 1e3 * opts.tol.unwrap_or_else(|| superstable_tol::<T>(next.q));
        if gap.abs().to_f64() <= floor {
            halted.get_or_insert(Error::Precision {
                certified_depth: i,
                detail: format!(
                    "gap {:e} at n = {} below the solve floor",
                    gap.to_f64(),
                    i + 1
                ),
            });
            break;
        }
        rows[i].gap = Some(gap);
    }
    for i in 1..rows.len() {
        if let (Some(g0), Some(g1)) = (&rows[i - 1].gap, &rows[i].gap) {
            rows[i].delta_gap = Some((g0.clone() / g1).abs());
        }
    }

    if opts.widths {
        let prefixes = (1..=rows.len())
            .map(|n| ContinuedFraction::periodic(period, n * period.len()))
            .collect::<Result<Vec<_>>>()?;
        let (windows, err) =
            nested_windows::<T, S>(shape, &prefixes, opts.window_rel_tol, opts.window_budget);
        for (i, w) in windows.iter().enumerate() {
            rows[i].width = Some(w.width());
            if i > 0 {
                rows[i].delta_width = Some(windows[i - 1].width() / &w.width());
            }
        }
        if let Some(e) = err {
            halted.get_or_insert(e);
        }
    }

    let gaps: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.delta_gap.as_ref().map(Real::to_f64))
        .collect();
    let certified_depth = rows
        .iter()
        .filter(|r| r.delta_gap.is_some())
        .map(|r| r.n)
        .max()
        .unwrap_or(0);
    let tail = &gaps[gaps.len().saturating_sub(3)..];
    let (delta, uncertainty) = if tail.len() == 3 {
        let d = aitken(tail[0], tail[1], tail[2]).unwrap_or(tail[2]);
        (Some(d), Some(spread(tail)))
    } else {
        (gaps.last().copied(), None)
    };
    let delta_width = rows
        .iter()
        .rev()
        .find_map(|r| r.delta_width.as_ref().map(Real::to_f64));
    Ok(UniversalityReport {
        period: period.to_vec(),
        delta_last: gaps.last().copied(),
        delta,
        uncertainty,
        delta_width,
        certified_depth,
        halted,
        rows,
    })
}

/// Options for [`estimate_convergence`].
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceOptions {
    pub renorm: RenormOptions,
    /// First level included in the fit.
    pub fit_from: usize,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            renorm: RenormOptions::default(),
            fit_from: 2,
        }
    }
}

/// Distances between the renormalization towers of two maps.
#[derive(Debug, Clone)]
pub struct ConvergenceReport<T> {
    /// `(n, d_n)`.
    pub distances: Vec<(usize, T)>,
    /// Per-level floor from accumulated evaluation error.
    pub noise_floor: Vec<f64>,
    pub fit: Option<LinearFit>,
    /// `exp(slope)` of the fit of `ln d_n` against `n`.
    pub lambda_s: Option<f64>,
    pub certified_depth: usize,
    pub halted: Option<Error>,
}

/// `d_n = dist(ℛⁿζ_f, ℛⁿζ_g)` for `n = 0..=depth` and the fitted rate.
pub fn estimate_convergence<T, S1, S2>(
    f: &CircleMapLift<T, S1>,
    g: &CircleMapLift<T, S2>,
    depth: usize,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport<T>>
where
    T: Real,
    S1: LiftShape<T>,
    S2: LiftShape<T>,
{
    let rot = RotationOptions::default();
    let (ef, eg) = par::join(
        opts.renorm.exec,
        || expand(f, depth + 2, &rot, |_, _| false),
        || expand(g, depth + 2, &rot, |_, _| false),
    );
    let (ef, eg) = (ef?, eg?);
    let n = ef.cf.len().min(eg.cf.len());
    if ef.winding != eg.winding || ef.cf.entries()[..n] != eg.cf.entries()[..n] {
        return Err(Error::Combinatorics(format!(
            "rotation numbers differ: {} vs {}",
            ef.cf, eg.cf
        )));
    }

    let (tf, tg) = par::join(
        opts.renorm.exec,
        || build_tower(f, depth, &opts.renorm),
        || build_tower(g, depth, &opts.renorm),
    );
    let mut halted = tf.halted.clone().or_else(|| tg.halted.clone());
    let levels = tf.pairs.len().min(tg.pairs.len());
    for (a, b) in tf.diagnostics.iter().zip(&tg.diagnostics).take(levels) {
        if a.height != b.height {
            return Err(Error::Combinatorics(format!(
                "heights differ at level {}",
                a.level
            )));
        }
    }

    let tol = f.step_tolerance().max(g.step_tolerance());
    let mut distances = Vec::with_capacity(levels);
    let mut noise_floor = Vec::with_capacity(levels);
    for k in 0..levels {
        let (a, b) = (&tf.pairs[k], &tg.pairs[k]);
        match pair_distance_with(a, b, &opts.renorm) {
            Ok(d) => {
                let q = (a.eta_iterate().q + a.xi_iterate().q) as f64;
                let s = a.scale().abs().to_f64().max(b.scale().abs().to_f64());
                noise_floor.push(1e3 * tol * q * s);
                distances.push((k, d.value));
            }
            Err(e) => {
                halted.get_or_insert(e);
                break;
            }
        }
    }

    let usable: Vec<(f64, f64)> = distances
        .iter()
        .zip(&noise_floor)
        .filter(|((k, d), floor)| *k >= opts.fit_from && d.to_f64() > **floor)
        .map(|((k, d), _)| (*k as f64, d.to_f64().ln()))
        .collect();
    let fit = (usable.len() >= 2).then(|| linear_fit(&usable));
    Ok(ConvergenceReport {
        lambda_s: fit.as_ref().map(|f| f.slope.exp()),
        certified_depth: distances.len().saturating_sub(1),
        distances,
        noise_floor,
        fit,
        halted,
    })
}

/// Signed ratios `s_n = (F^{q_{n+1}}(0) - p_{n+1}) / (F^{q_n}(0) - p_n)` for
/// `n = 0..depth`.
pub fn closest_return_scaling<T, S>(map: &CircleMapLift<T, S>, depth: usize) -> Result<Vec<T>>
where
    T: Real,
    S: LiftShape<T>,
{
    let exp = expand(map, depth + 1, &RotationOptions::default(), |_, _| false)?;
    // A level reached by an exact hit of 0 carries no ratio information.
    let usable = match exp.tail {
        Tail::Terminated => exp.levels.len().saturating_sub(1),
        _ => exp.levels.len(),
    };
    if usable < depth + 1 {
        return Err(Error::Precision {
            certified_depth: usable.saturating_sub(1),
            detail: format!("{usable} closest returns resolved, {} needed", depth + 1),
        });
    }
    Ok(exp.levels[..=depth]
        .windows(2)
        .map(|w| w[1].a.clone() / &w[0].a)
        .collect())
}

/// Settings for [`hyperbolicity_probe`].
#[derive(Debug, Clone, Copy)]
pub struct ProbeOptions {
    pub delta: DeltaOptions,
    pub convergence: ConvergenceOptions,
    /// Shape parameter of the second family member.
    pub epsilon2: f64,
    /// Superstable levels used to extrapolate `θ_*`.
    pub theta_levels: usize,
    /// Tower depth for the contraction rate.
    pub convergence_depth: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            delta: DeltaOptions::default(),
            convergence: ConvergenceOptions::default(),
            epsilon2: 0.3,
            theta_levels: 18,
            convergence_depth: 10,
        }
    }
}

/// One probe cell.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    /// `None` for the rigid-rotation reference row.
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub delta_uncertainty: Option<f64>,
    pub lambda_s: Option<f64>,
    pub r_squared: Option<f64>,
    pub certified_depth: usize,
    pub halted: Option<Error>,
}

impl ProbeReport {
    /// `δ > 1` and `λ_s < 1`.
    pub fn passes(&self) -> bool {
        matches!(self.delta, Some(d) if d > 1.0)
            && matches!(self.lambda_s, Some(l) if l > 0.0 && l < 1.0)
    }
}

/// `δ` of the `ε = 0` member and `λ_s` between the `ε = 0` and `ε = ε₂`
/// members of the family with exponent `alpha`.
pub fn hyperbolicity_probe<T: Real>(
    alpha: f64,
    period: &[u64],
    depth: usize,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    let f0 = Arc::new(build_family::<T>(alpha, 0.0)?);
    let f1 = Arc::new(build_family::<T>(alpha, opts.epsilon2)?);
    let exec = opts.convergence.renorm.exec;
    let (report, thetas) = par::join(
        exec,
        || estimate_delta::<T, _>(&f0, period, depth, &opts.delta),
        || {
            par::join(
                exec,
                || superstable_limit::<T, _>(&f0, period, opts.theta_levels),
                || superstable_limit::<T, _>(&f1, period, opts.theta_levels),
            )
        },
    );
    let report = report?;
    let (t0, t1) = (thetas.0?, thetas.1?);
    let conv = estimate_convergence(
        &CircleMapLift::new(f0, t0.theta),
        &CircleMapLift::new(f1, t1.theta),
        opts.convergence_depth,
        &opts.convergence,
    )?;
    Ok(ProbeReport {
        alpha: Some(alpha),
        delta: report.delta,
        delta_uncertainty: report.uncertainty,
        lambda_s: conv.lambda_s,
        r_squared: conv.fit.as_ref().map(|f| f.r_squared),
        certified_depth: report.certified_depth.min(conv.certified_depth),
        halted: report.halted.or(conv.halted),
    })
}

/// δ of the rigid rotation along `repeat(period)`; contraction does not
/// apply, so `lambda_s` is `None`.
pub fn rotation_reference<T: Real>(
    period: &[u64],
    depth: usize,
    opts: &DeltaOptions,
) -> Result<ProbeReport> {
    let report = estimate_delta::<T, _>(&Arc::new(RigidRotation), period, depth, opts)?;
    Ok(ProbeReport {
        alpha: None,
        delta: report.delta,
        delta_uncertainty: report.uncertainty,
        lambda_s: None,
        r_squared: None,
        certified_depth: report.certified_depth,
        halted: report.halted,
    })
}

/// Probe cells over an exponent grid, evaluated in parallel and returned in
/// grid order.
pub fn probe_grid<T: Real>(
    alphas: &[f64],
    period: &[u64],
    depth: usize,
    opts: &ProbeOptions,
    exec: Exec,
) -> Vec<Result<ProbeReport>> {
    par::map_slice(exec, alphas, |&a| {
        hyperbolicity_probe::<T>(a, period, depth, opts)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::R128;

    #[test]
    fn aitken_recovers_geometric_limit() {
        let x = |n: i32| 2.0 + 0.5f64.powi(n);
        assert!((aitken(x(1), x(2), x(3)).unwrap() - 2.0).abs() < 1e-14);
        assert!(aitken(1.0, 1.0, 1.0).is_none());
        assert!(aitken(0.0, 1.0, 3.0).is_none());
    }

    #[test]
    fn rotation_superstables_are_convergents() {
        let shape = Arc::new(RigidRotation);
        let (seq, halted) = superstable_sequence::<R128, _>(&shape, &[1], 12, None);
        assert!(halted.is_none());
        for s in &seq {
            let exact = R128::ratio(s.p as i64, s.q as i64);
            assert!(
                (s.theta.clone() - exact).abs().to_f64() < 1e-30,
                "{}/{}",
                s.p,
                s.q
            );
        }
        assert_eq!((seq[11].p, seq[11].q), (144, 233));
    }

    #[test]
    fn convergent_chain_handles_uneven_entries() {
        let fam = Arc::new(build_family::<R128>(3.0, 0.0).unwrap());
        let cf = ContinuedFraction::prefix(&[2, 1, 3, 1, 2]).unwrap();
        let (seq, halted) = superstable_convergents::<R128, _>(&fam, &cf, None);
        assert!(halted.is_none());
        let pq: Vec<(u64, u64)> = seq.iter().map(|s| (s.p, s.q)).collect();
        assert_eq!(pq, vec![(1, 2), (1, 3), (4, 11), (5, 14), (14, 39)]);
        for s in &seq {
            assert!(s.residual.to_f64() <= superstable_tol::<R128>(s.q));
        }
    }

    #[test]
    fn rotation_delta_is_golden_squared() {
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        let opts = DeltaOptions {
            widths: false,
            ..DeltaOptions::default()
        };
        let r = estimate_delta::<R128, _>(&Arc::new(RigidRotation), &[1], 14, &opts).unwrap();
        assert!(r.halted.is_none());
        assert_eq!(r.certified_depth, 14);
        // |g_{n-1}/g_n| = q_{n+2}/q_n exactly.
        assert!((r.delta_at(14).unwrap() - 987.0 / 377.0).abs() < 1e-12);
        assert!((r.delta.unwrap() - golden_sq).abs() < 1e-6);
    }

    #[test]
    fn rotation_closest_returns_approach_inverse_golden() {
        let theta = (R128::from_i64(5).sqrt() - R128::one()) / R128::from_i64(2);
        let map = CircleMapLift::new(Arc::new(RigidRotation), theta.clone());
        let s = closest_return_scaling(&map, 20).unwrap();
        assert_eq!(s.len(), 20);
        for r in &s {
            assert!((r.clone() + &theta).abs().to_f64() < 1e-20);
        }
    }

    #[test]
    fn identical_maps_have_zero_distance() {
        let fam = Arc::new(build_family::<R128>(3.0, 0.0).unwrap());
        let theta = superstable_limit::<R128, _>(&fam, &[1], 12).unwrap().theta;
        let f = CircleMapLift::new(fam, theta);
        let r = estimate_convergence(&f, &f, 6, &ConvergenceOptions::default()).unwrap();
        assert_eq!(r.distances.len(), 7);
        assert!(r.distances.iter().all(|(_, d)| d.is_zero()));
        assert!(r.fit.is_none());
    }

    #[test]
    fn mismatched_rotation_numbers_are_rejected() {
        let fam = Arc::new(build_family::<R128>(3.0, 0.0).unwrap());
        let f = CircleMapLift::new(Arc::clone(&fam), R128::from_f64(0.6066));
        let g = CircleMapLift::new(fam, R128::from_f64(0.4));
        assert!(matches!(
            estimate_convergence(&f, &g, 4, &ConvergenceOptions::default()),
            Err(Error::Combinatorics(_))
        ));
    }

    #[test]
    fn short_depth_is_a_domain_error() {
        let r =
            estimate_delta::<f64, _>(&Arc::new(RigidRotation), &[1], 1, &DeltaOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
        let r =
            estimate_delta::<f64, _>(&Arc::new(RigidRotation), &[0], 4, &DeltaOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
