//! Commuting pairs and the renormalization operator, backed by iterates.
//!
//! Every renormalization of the pair of a circle map is again a pair of
//! iterates `(F^{q'} - p', F^{q} - p)` up to a linear change of coordinates,
//! so a pair is stored as two `(q, p)` labels and a scale `s`. In normalized
//! coordinates `t = s·x`:
//!
//! ```text
//! η̃(t) = s·(F^{q_η}(t/s) - p_η),   ξ̃(t) = s·(F^{q_ξ}(t/s) - p_ξ).
//! ```
//!
//! `pair_from_map(f, m)` is `ζ_m = (F^{q_{m+1}} - p_{m+1}, F^{q_m} - p_m)`
//! with `s = 1/(F^{q_m}(0) - p_m)`, so `ξ̃(0) = 1` and `η̃` acts on `[0, 1]`.
//! Renormalizing with height `r` gives `(η^r∘ξ, η)` rescaled by `1/η̃(0)`,
//! which in labels is `q' = r·q_η + q_ξ`.

use crate::error::{Error, Result};
use crate::maps::{CircleMapLift, LiftShape};
use crate::par::{self, Exec};
use crate::real::Real;
use crate::rotation::{expand, RotationOptions, Tail};

/// Iterate label `F^q - p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Iterate {
    pub q: u64,
    pub p: i64,
}

/// Height `χ(ζ)`: a finite count or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Height {
    Finite(u64),
    Infinite,
}

/// Limits shared by pair constructions and distances.
#[derive(Debug, Clone, Copy)]
pub struct RenormOptions {
    /// Maximum height searched before declaring `∞`.
    pub r_max: u64,
    /// Map evaluations allowed per pair construction or distance call.
    pub budget: u64,
    /// Grid size for [`pair_distance`].
    pub grid: usize,
    pub exec: Exec,
}

impl Default for RenormOptions {
    fn default() -> Self {
        Self {
            r_max: 1_000_000,
            budget: 10_000_000,
            grid: 256,
            exec: Exec::Parallel,
        }
    }
}

/// An iterate-backed commuting pair `(η, ξ)`.
#[derive(Debug)]
pub struct CommutingPair<T: Real, S> {
    map: CircleMapLift<T, S>,
    level: usize,
    eta: Iterate,
    xi: Iterate,
    scale: T,
    eta0_raw: T,
    xi0_raw: T,
}

impl<T: Real, S> Clone for CommutingPair<T, S> {
    fn clone(&self) -> Self {
        Self {
            map: self.map.clone(),
            level: self.level,
            eta: self.eta,
            xi: self.xi,
            scale: self.scale.clone(),
            eta0_raw: self.eta0_raw.clone(),
            xi0_raw: self.xi0_raw.clone(),
        }
    }
}

impl<T: Real, S: LiftShape<T>> CommutingPair<T, S> {
    pub fn map(&self) -> &CircleMapLift<T, S> {
        &self.map
    }

    /// Renormalization level `m` of `ζ_m`.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn eta_iterate(&self) -> Iterate {
        self.eta
    }

    pub fn xi_iterate(&self) -> Iterate {
        self.xi
    }

    /// Accumulated signed rescale factor `s`.
    pub fn scale(&self) -> &T {
        &self.scale
    }

    fn eta_raw(&self, x: &T) -> T {
        self.map.eval_iterate_shifted(x, self.eta.q, self.eta.p)
    }

    fn xi_raw(&self, x: &T) -> T {
        self.map.eval_iterate_shifted(x, self.xi.q, self.xi.p)
    }

    /// `η̃(t)` in normalized coordinates.
    pub fn eta(&self, t: &T) -> T {
        self.eta_raw(&(t.clone() / &self.scale)) * &self.scale
    }

    /// `ξ̃(t)` in normalized coordinates.
    pub fn xi(&self, t: &T) -> T {
        self.xi_raw(&(t.clone() / &self.scale)) * &self.scale
    }

    /// `η̃(0)`, the far end of `ξ`'s domain.
    pub fn eta0(&self) -> T {
        self.eta0_raw.clone() * &self.scale
    }

    /// `ξ̃(0)`, the far end of `η`'s domain.
    pub fn xi0(&self) -> T {
        self.xi0_raw.clone() * &self.scale
    }

    /// `(I_η, I_ξ) = ([ξ̃(0), 0], [η̃(0), 0])` as `(far end, 0)` pairs.
    pub fn domains(&self) -> ((T, T), (T, T)) {
        ((self.xi0(), T::zero()), (self.eta0(), T::zero()))
    }

    /// Unnormalized lengths `|F^{q_ξ}(0) - p_ξ|` and `|F^{q_η}(0) - p_η|`.
    pub fn raw_lengths(&self) -> (T, T) {
        (self.xi0_raw.abs(), self.eta0_raw.abs())
    }

    /// True when `|I_η| = 1`, i.e. `ξ̃(0) = 1` up to rounding.
    pub fn is_normalized(&self) -> bool {
        (self.xi0() - T::one()).abs().to_f64() < 1e-9
    }

    /// Same pair under an extra linear rescale `t ↦ factor·t`.
    pub fn rescaled(&self, factor: &T) -> Self {
        let mut out = self.clone();
        out.scale *= factor;
        out
    }

    /// `max |η̃(ξ̃(t)) - ξ̃(η̃(t))|` over points near 0 where both sides are
    /// defined.
    pub fn commutation_residual(&self) -> T {
        let reach = T::min_of(self.eta0().abs(), self.xi0().abs()) * T::ratio(1, 4);
        let mut worst = T::zero();
        for k in -4..=4 {
            let t = reach.clone() * T::ratio(k, 4);
            let lhs = self.eta(&self.xi(&t));
            let rhs = self.xi(&self.eta(&t));
            worst = T::max_of(worst, (lhs - rhs).abs());
        }
        worst
    }
}

/// `ζ_m = (F^{q_{m+1}} - p_{m+1}, F^{q_m} - p_m)` rescaled so `ξ̃(0) = 1`.
pub fn pair_from_map<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    m: usize,
) -> Result<CommutingPair<T, S>> {
    pair_from_map_with(map, m, &RenormOptions::default())
}

pub fn pair_from_map_with<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    m: usize,
    opts: &RenormOptions,
) -> Result<CommutingPair<T, S>> {
    let rot = RotationOptions {
        max_evals: opts.budget.saturating_mul(4),
        zero_tol: None,
    };
    let exp = expand(map, m + 2, &rot, |_, _| false)?;
    if exp.cf.len() < m + 2 {
        return Err(match exp.tail {
            Tail::Terminated => Error::Combinatorics(format!(
                "rotation number {} is rational; level {m} needs {} entries",
                exp.cf,
                m + 2
            )),
            Tail::Budget => Error::Budget {
                needed: exp.evaluations,
                budget: rot.max_evals,
            },
            _ => Error::Precision {
                certified_depth: exp.cf.len(),
                detail: format!("level {m} closest returns below resolution"),
            },
        });
    }
    let (xi_level, eta_level) = (&exp.levels[m], &exp.levels[m + 1]);
    if eta_level.q > opts.budget {
        return Err(Error::Budget {
            needed: eta_level.q,
            budget: opts.budget,
        });
    }
    if xi_level.a.is_zero() {
        return Err(Error::Degenerate(format!(
            "F^{}(0) hits the critical point",
            xi_level.q
        )));
    }
    Ok(CommutingPair {
        map: map.clone(),
        level: m,
        eta: Iterate {
            q: eta_level.q,
            p: eta_level.p,
        },
        xi: Iterate {
            q: xi_level.q,
            p: xi_level.p,
        },
        scale: T::one() / &xi_level.a,
        eta0_raw: eta_level.a.clone(),
        xi0_raw: xi_level.a.clone(),
    })
}

/// `χ(ζ)`: the `r` with `0 ∈ [η^r(ξ(0)), η^{r+1}(ξ(0)))`.
pub fn height<T: Real, S: LiftShape<T>>(pair: &CommutingPair<T, S>, r_max: u64) -> Result<Height> {
    Ok(height_and_point(pair, r_max)?.0)
}

/// Height together with the raw point `η^r(ξ(0))`.
fn height_and_point<T: Real, S: LiftShape<T>>(
    pair: &CommutingPair<T, S>,
    r_max: u64,
) -> Result<(Height, T)> {
    if r_max == 0 {
        return Err(Error::Domain("r_max must be at least 1".into()));
    }
    let zero_tol = 10.0 * pair.map.step_tolerance();
    let side = pair.xi0_raw.sign();
    let mut x = pair.xi0_raw.clone();
    for r in 0..r_max {
        let next = pair.eta_raw(&x);
        if next.abs().to_f64() < zero_tol {
            return Err(Error::Degenerate(format!("eta^{}(xi(0)) = 0", r + 1)));
        }
        if next.sign() != side {
            return Ok((Height::Finite(r), x));
        }
        x = next;
    }
    Ok((Height::Infinite, x))
}

/// `ℛζ = (h∘η^r∘ξ∘h⁻¹, h∘η∘h⁻¹)` with `h(t) = t/η̃(0)`.
pub fn renormalize<T: Real, S: LiftShape<T>>(
    pair: &CommutingPair<T, S>,
) -> Result<CommutingPair<T, S>> {
    renormalize_with(pair, &RenormOptions::default())
}

pub fn renormalize_with<T: Real, S: LiftShape<T>>(
    pair: &CommutingPair<T, S>,
    opts: &RenormOptions,
) -> Result<CommutingPair<T, S>> {
    let (h, point) = height_and_point(pair, opts.r_max)?;
    let r = match h {
        Height::Finite(r) => r,
        Height::Infinite => {
            return Err(Error::NotRenormalizable(format!(
                "height exceeds {} at level {}",
                opts.r_max, pair.level
            )))
        }
    };
    let q = r
        .checked_mul(pair.eta.q)
        .and_then(|v| v.checked_add(pair.xi.q))
        .filter(|&q| q <= opts.budget)
        .ok_or(Error::Budget {
            needed: r.saturating_mul(pair.eta.q),
            budget: opts.budget,
        })?;
    let p = r as i64 * pair.eta.p + pair.xi.p;
    Ok(CommutingPair {
        map: pair.map.clone(),
        level: pair.level + 1,
        eta: Iterate { q, p },
        xi: pair.eta,
        scale: pair.scale.clone() / pair.eta0(),
        eta0_raw: point,
        xi0_raw: pair.eta0_raw.clone(),
    })
}

/// Sampled C⁰ distance between two normalized pairs.
#[derive(Debug, Clone)]
pub struct PairDistance<T> {
    pub value: T,
    pub grid_size: usize,
}

/// `sup |η̃_a - η̃_b| + sup |ξ̂_a - ξ̂_b|` on a uniform grid of `[0, 1]`, with
/// `ξ̂(t) = ξ̃(t·η̃(0))/η̃(0)`.
pub fn pair_distance<T, S1, S2>(
    a: &CommutingPair<T, S1>,
    b: &CommutingPair<T, S2>,
    grid: usize,
) -> Result<PairDistance<T>>
where
    T: Real,
    S1: LiftShape<T>,
    S2: LiftShape<T>,
{
    pair_distance_with(
        a,
        b,
        &RenormOptions {
            grid,
            ..RenormOptions::default()
        },
    )
}

pub fn pair_distance_with<T, S1, S2>(
    a: &CommutingPair<T, S1>,
    b: &CommutingPair<T, S2>,
    opts: &RenormOptions,
) -> Result<PairDistance<T>>
where
    T: Real,
    S1: LiftShape<T>,
    S2: LiftShape<T>,
{
    if !a.is_normalized() || !b.is_normalized() {
        return Err(Error::Contract(
            "pair distance needs normalized pairs".into(),
        ));
    }
    let grid = opts.grid;
    if grid < 2 {
        return Err(Error::Domain("grid needs at least 2 points".into()));
    }
    let per_point = a.eta.q + a.xi.q + b.eta.q + b.xi.q;
    let needed = per_point.saturating_mul(grid as u64);
    if needed > opts.budget {
        return Err(Error::Budget {
            needed,
            budget: opts.budget,
        });
    }
    let (ea, eb) = (a.eta0(), b.eta0());
    let rows = par::map_range(opts.exec, grid, |i| {
        let t = T::ratio(i as i64, grid as i64 - 1);
        let d_eta = (a.eta(&t) - b.eta(&t)).abs();
        let xa = a.xi(&(t.clone() * &ea)) / &ea;
        let xb = b.xi(&(t * &eb)) / &eb;
        (d_eta, (xa - xb).abs())
    });
    let mut sup_eta = T::zero();
    let mut sup_xi = T::zero();
    for (e, x) in rows {
        sup_eta = T::max_of(sup_eta, e);
        sup_xi = T::max_of(sup_xi, x);
    }
    Ok(PairDistance {
        value: sup_eta + sup_xi,
        grid_size: grid,
    })
}

/// Per-level record of a renormalization tower.
#[derive(Debug, Clone)]
pub struct LevelDiagnostics<T> {
    pub level: usize,
    pub height: Height,
    pub eta0: T,
    pub commutation_residual: T,
    pub q_eta: u64,
    pub q_xi: u64,
}

/// `[ζ₀, ℛζ₀, …]` with diagnostics. `halted` holds the error that stopped
/// the tower before the requested depth.
#[derive(Debug, Clone)]
pub struct Tower<T: Real, S> {
    pub pairs: Vec<CommutingPair<T, S>>,
    pub diagnostics: Vec<LevelDiagnostics<T>>,
    pub halted: Option<Error>,
}

impl<T: Real, S: LiftShape<T>> Tower<T, S> {
    /// Heights `χ(ℛᵏζ₀)` of the certified levels.
    pub fn heights(&self) -> Vec<Height> {
        self.diagnostics.iter().map(|d| d.height).collect()
    }
}

/// Builds as many tower levels as possible, up to `depth` renormalizations.
pub fn build_tower<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    depth: usize,
    opts: &RenormOptions,
) -> Tower<T, S> {
    let mut tower = Tower {
        pairs: Vec::new(),
        diagnostics: Vec::new(),
        halted: None,
    };
    let mut pair = match pair_from_map_with(map, 0, opts) {
        Ok(p) => p,
        Err(e) => {
            tower.halted = Some(e);
            return tower;
        }
    };
    for level in 0..=depth {
        let (h, _) = match height_and_point(&pair, opts.r_max) {
            Ok(v) => v,
            Err(e) => {
                tower.halted = Some(e);
                break;
            }
        };
        tower.diagnostics.push(LevelDiagnostics {
            level,
            height: h,
            eta0: pair.eta0(),
            commutation_residual: pair.commutation_residual(),
            q_eta: pair.eta.q,
            q_xi: pair.xi.q,
        });
        tower.pairs.push(pair.clone());
        if level == depth {
            break;
        }
        match renormalize_with(&pair, opts) {
            Ok(next) => pair = next,
            Err(e) => {
                tower.halted = Some(e);
                break;
            }
        }
    }
    tower
}

/// `[ζ₀, ℛζ₀, …, ℛ^depth ζ₀]`.
pub fn renorm_tower<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    depth: usize,
) -> Result<Tower<T, S>> {
    let tower = build_tower(map, depth, &RenormOptions::default());
    match tower.halted {
        None => Ok(tower),
        Some(e) if e.is_resolution_limit() || matches!(e, Error::NotRenormalizable(_)) => {
            Err(Error::Precision {
                certified_depth: tower.pairs.len().saturating_sub(1),
                detail: e.to_string(),
            })
        }
        Some(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::maps::{build_family, RigidRotation};
    use crate::real::R128;

    fn golden_rotation() -> CircleMapLift<R128, RigidRotation> {
        let theta = (R128::from_i64(5).sqrt() - R128::one()) / R128::from_i64(2);
        CircleMapLift::new(Arc::new(RigidRotation), theta)
    }

    #[test]
    fn level_zero_pair_uses_first_return() {
        let f = golden_rotation();
        let z = pair_from_map(&f, 0).unwrap();
        assert_eq!(z.xi_iterate(), Iterate { q: 1, p: 0 });
        assert_eq!(z.eta_iterate(), Iterate { q: 1, p: 1 });
        assert!((z.xi0() - R128::one()).abs().to_f64() < 1e-30);
        assert!(z.eta0().is_negative());
    }

    #[test]
    fn rotation_pairs_are_translations() {
        let f = golden_rotation();
        let z = pair_from_map(&f, 4).unwrap();
        let t = R128::from_f64(0.3);
        let shift = z.eta(&t) - &t;
        assert!((shift - z.eta0()).abs().to_f64() < 1e-25);
        // Golden rotation: η̃(0) = -1/φ at every level.
        let inv_phi = (R128::from_i64(5).sqrt() - R128::one()) / R128::from_i64(2);
        assert!((z.eta0() + inv_phi).abs().to_f64() < 1e-20);
        assert_eq!(height(&z, 100).unwrap(), Height::Finite(1));
    }

    #[test]
    fn renormalize_matches_next_level() {
        let f = golden_rotation();
        let z3 = pair_from_map(&f, 3).unwrap();
        let z4 = pair_from_map(&f, 4).unwrap();
        let r = renormalize(&z3).unwrap();
        assert_eq!(r.eta_iterate(), z4.eta_iterate());
        assert_eq!(r.xi_iterate(), z4.xi_iterate());
        let d = pair_distance(&r, &z4, 64).unwrap();
        assert!(d.value.to_f64() < 1e-25);
    }

    #[test]
    fn distance_needs_normalized_pairs() {
        let f = golden_rotation();
        let z = pair_from_map(&f, 2).unwrap();
        let off = z.rescaled(&R128::from_i64(3));
        assert!(matches!(
            pair_distance(&z, &off, 16),
            Err(Error::Contract(_))
        ));
        assert!(pair_distance(&z, &z, 16).unwrap().value.is_zero());
    }

    #[test]
    fn rational_map_has_no_deep_pairs() {
        let f = CircleMapLift::new(Arc::new(RigidRotation), R128::ratio(2, 5));
        assert!(matches!(pair_from_map(&f, 3), Err(Error::Combinatorics(_))));
    }

    #[test]
    fn superstable_pair_is_degenerate() {
        // 2/5 = [2, 2]: ζ₀ = (F² - 1, F) and η²(ξ(0)) = F⁵(0) - 2 = 0.
        let fam = Arc::new(build_family::<R128>(3.0, 0.0).unwrap());
        let s = crate::rotation::superstable_parameter::<R128, _>(&fam, 2, 5, 1e-28).unwrap();
        let f = CircleMapLift::new(fam, s.theta);
        let z = pair_from_map(&f, 0).unwrap();
        assert_eq!(z.eta_iterate(), Iterate { q: 2, p: 1 });
        assert!(matches!(height(&z, 10), Err(Error::Degenerate(_))));
        assert!(matches!(renormalize(&z), Err(Error::Degenerate(_))));
    }

    #[test]
    fn tower_depth_zero() {
        let f = golden_rotation();
        let t = renorm_tower(&f, 0).unwrap();
        assert_eq!(t.pairs.len(), 1);
        assert_eq!(t.heights(), vec![Height::Finite(1)]);
    }
}
