//! Dynamical partitions of the circle and the adjacent-atom ratio test.
//!
//! The level-`n` partition consists of the `qₙ` images `F^j(I_{n-1})` and the
//! `q_{n-1}` images `F^j(I_n)` of the closest-return intervals
//! `I_m = [0, F^{q_m}(0) - p_m]`. All endpoints lie on the critical orbit, so
//! two maps with the same combinatorics have partitions matched atom by atom
//! through their labels, which realizes the conjugacy on endpoints.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::maps::{CircleMapLift, LiftShape};
use crate::real::Real;
use crate::rotation::{expand, RotationOptions, Tail};
use crate::stats::{linear_fit, LinearFit};

/// Which closest-return interval an atom is an image of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generation {
    /// Image of `I_{n-1}`.
    Previous,
    /// Image of `I_n`.
    Current,
}

/// One atom `F^j(I)` of a partition.
#[derive(Debug, Clone)]
pub struct Atom<T> {
    pub generation: Generation,
    pub index: u64,
    /// Left endpoint reduced to `[0, 1)`.
    pub start: T,
    pub length: T,
}

/// Level-`n` partition with atoms sorted by left endpoint.
#[derive(Debug, Clone)]
pub struct DynamicalPartition<T> {
    pub level: usize,
    pub q_prev: u64,
    pub q_curr: u64,
    pub atoms: Vec<Atom<T>>,
}

impl<T: Real> DynamicalPartition<T> {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ |atom|`, equal to 1 for a partition of the circle.
    pub fn total_length(&self) -> T {
        self.atoms.iter().fold(T::zero(), |acc, a| acc + &a.length)
    }

    /// Labels `(generation, j)` in circular order starting after 0.
    pub fn labels(&self) -> Vec<(Generation, u64)> {
        self.atoms.iter().map(|a| (a.generation, a.index)).collect()
    }

    /// Largest gap or overlap between consecutive atoms around the circle.
    pub fn max_seam(&self) -> T {
        let n = self.atoms.len();
        let mut worst = T::zero();
        for i in 0..n {
            let a = &self.atoms[i];
            let b = &self.atoms[(i + 1) % n];
            let mut end = a.start.clone() + &a.length;
            if i + 1 == n {
                end -= T::one();
            }
            worst = T::max_of(worst, (end - &b.start).abs());
        }
        worst
    }
}

/// Critical orbit `F^j(0)` split into `[0, 1)` part and integer part.
fn split_orbit<T: Real, S: LiftShape<T>>(map: &CircleMapLift<T, S>, n: u64) -> Vec<(T, i64)> {
    let mut out = Vec::with_capacity(n as usize);
    let (mut y, mut k) = (T::zero(), 0i64);
    for _ in 0..n {
        out.push((y.clone(), k));
        let next = map.eval_lift(&y);
        let f = next.floor_i64();
        y = next - T::from_i64(f);
        k += f;
    }
    out
}

/// `P_n(f)` for `n ≥ 1`: `q_n + q_{n-1}` atoms covering the circle.
pub fn dynamical_partition<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    n: usize,
) -> Result<DynamicalPartition<T>> {
    dynamical_partition_with(map, n, 10_000_000)
}

pub fn dynamical_partition_with<T: Real, S: LiftShape<T>>(
    map: &CircleMapLift<T, S>,
    n: usize,
    budget: u64,
) -> Result<DynamicalPartition<T>> {
    if n == 0 {
        return Err(Error::Domain("partition level must be at least 1".into()));
    }
    let rot = RotationOptions {
        max_evals: budget.saturating_mul(4),
        zero_tol: None,
    };
    let exp = expand(map, n + 1, &rot, |_, _| false)?;
    if exp.cf.len() < n + 1 {
        return Err(match exp.tail {
            Tail::Terminated => Error::Combinatorics(format!(
                "rotation number {} is rational below level {}",
                exp.cf,
                n + 1
            )),
            Tail::Budget => Error::Budget {
                needed: exp.evaluations,
                budget: rot.max_evals,
            },
            _ => Error::Precision {
                certified_depth: exp.cf.len(),
                detail: "closest returns below resolution".into(),
            },
        });
    }
    let prev = &exp.levels[n - 1];
    let curr = &exp.levels[n];
    let total = prev.q + curr.q;
    if total > budget {
        return Err(Error::Budget {
            needed: total,
            budget,
        });
    }
    let orbit = split_orbit(map, total);
    let sep_floor = 10.0 * map.step_tolerance() * total as f64;

    let atom = |generation, j: u64, shift_q: u64, shift_p: i64| -> Result<Atom<T>> {
        let (y0, k0) = &orbit[j as usize];
        let (y1, k1) = &orbit[(j + shift_q) as usize];
        let disp = y1.clone() - y0 + T::from_i64(k1 - k0 - shift_p);
        if disp.abs().to_f64() < sep_floor {
            return Err(Error::Precision {
                certified_depth: n - 1,
                detail: format!("atom endpoints of level {n} closer than tolerance"),
            });
        }
        let start = if disp.is_negative() {
            let s = y0.clone() + &disp;
            if s.is_negative() {
                s + T::one()
            } else {
                s
            }
        } else {
            y0.clone()
        };
        Ok(Atom {
            generation,
            index: j,
            start,
            length: disp.abs(),
        })
    };

    let mut atoms = Vec::with_capacity(total as usize);
    for j in 0..curr.q {
        atoms.push(atom(Generation::Previous, j, prev.q, prev.p)?);
    }
    for j in 0..prev.q {
        atoms.push(atom(Generation::Current, j, curr.q, curr.p)?);
    }
    atoms.sort_by(|a, b| a.start.partial_cmp(&b.start).unwrap_or(Ordering::Equal));
    Ok(DynamicalPartition {
        level: n,
        q_prev: prev.q,
        q_curr: curr.q,
        atoms,
    })
}

/// Adjacent-atom ratio discrepancies between two maps with the same
/// combinatorics.
#[derive(Debug, Clone)]
pub struct RigidityReport {
    /// `(n, d_n)` for `n = 1..=n_max`.
    pub levels: Vec<(usize, f64)>,
    /// Noise floor per level; levels below it are left out of the fit.
    pub noise_floor: Vec<f64>,
    /// First level included in the fit.
    pub fit_from: usize,
    /// Fit of `ln d_n` against `n`; `None` when fewer than two levels are
    /// above the floor.
    pub fit: Option<LinearFit>,
    /// `exp(slope)`.
    pub lambda_fit: Option<f64>,
    /// Fitted geometric shrink rate of the largest atom.
    pub atom_rate: Option<f64>,
    /// `ln λ_fit / ln atom_rate`: `d_n` decays like `(max atom)^β`.
    pub beta: Option<f64>,
}

/// `d_n = max | |I|/|J| - |h(I)|/|h(J)| |` over adjacent atoms of `P_n(f)`,
/// with `h` the combinatorial conjugacy from `f` to `g`. The fit starts at
/// the largest `d_n`, where the decay sets in.
pub fn conjugacy_ratio_test<T, S1, S2>(
    f: &CircleMapLift<T, S1>,
    g: &CircleMapLift<T, S2>,
    n_max: usize,
) -> Result<RigidityReport>
where
    T: Real,
    S1: LiftShape<T>,
    S2: LiftShape<T>,
{
    conjugacy_ratio_test_with(f, g, n_max, None)
}

/// As [`conjugacy_ratio_test`], fitting from level `fit_from` when given.
pub fn conjugacy_ratio_test_with<T, S1, S2>(
    f: &CircleMapLift<T, S1>,
    g: &CircleMapLift<T, S2>,
    n_max: usize,
    fit_from: Option<usize>,
) -> Result<RigidityReport>
where
    T: Real,
    S1: LiftShape<T>,
    S2: LiftShape<T>,
{
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let rot = RotationOptions::default();
    let ef = expand(f, n_max + 1, &rot, |_, _| false)?;
    let eg = expand(g, n_max + 1, &rot, |_, _| false)?;
    if ef.cf.len() < n_max + 1 || ef.cf.entries() != eg.cf.entries() {
        return Err(Error::Combinatorics(format!(
            "continued fractions differ: {} vs {}",
            ef.cf, eg.cf
        )));
    }

    let mut levels = Vec::with_capacity(n_max);
    let mut noise_floor = Vec::with_capacity(n_max);
    let mut largest = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let pf = dynamical_partition(f, n)?;
        let pg = dynamical_partition(g, n)?;
        if pf.labels() != pg.labels() {
            return Err(Error::Combinatorics(format!(
                "atom order differs at level {n}"
            )));
        }
        let m = pf.atoms.len();
        let mut d = T::zero();
        for i in 0..m {
            let (a, b) = (&pf.atoms[i], &pf.atoms[(i + 1) % m]);
            let (ha, hb) = (&pg.atoms[i], &pg.atoms[(i + 1) % m]);
            let forward = a.length.clone() / &b.length - ha.length.clone() / &hb.length;
            let backward = b.length.clone() / &a.length - hb.length.clone() / &ha.length;
            d = T::max_of(d, T::max_of(forward.abs(), backward.abs()));
        }
        let max_atom = pf
            .atoms
            .iter()
            .map(|a| a.length.to_f64())
            .fold(0.0f64, f64::max);
        let min_atom = pf
            .atoms
            .iter()
            .map(|a| a.length.to_f64())
            .fold(f64::INFINITY, f64::min);
        levels.push((n, d.to_f64()));
        // Each length carries about `q` step tolerances; ratios amplify that by
        // the inverse of the smallest atom.
        let q = (pf.q_prev + pf.q_curr) as f64;
        noise_floor.push(1e3 * f.step_tolerance().max(g.step_tolerance()) * q / min_atom);
        largest.push((n as f64, max_atom.ln()));
    }

    let fit_from = fit_from.unwrap_or_else(|| {
        levels
            .iter()
            .fold((1, f64::NEG_INFINITY), |best, &(n, d)| {
                if d > best.1 {
                    (n, d)
                } else {
                    best
                }
            })
            .0
    });
    let usable: Vec<(f64, f64)> = levels
        .iter()
        .zip(&noise_floor)
        .filter(|((n, d), floor)| *n >= fit_from && *d > **floor && *d > 0.0)
        .map(|((n, d), _)| (*n as f64, d.ln()))
        .collect();
    let fit = if usable.len() >= 2 {
        Some(linear_fit(&usable))
    } else {
        None
    };
    let lambda_fit = fit.as_ref().map(|f| f.slope.exp());
    let atom_rate = if largest.len() >= 2 {
        Some(linear_fit(&largest).slope.exp())
    } else {
        None
    };
    let beta = match (lambda_fit, atom_rate) {
        (Some(l), Some(s)) if s < 1.0 && l > 0.0 => Some(l.ln() / s.ln()),
        _ => None,
    };
    Ok(RigidityReport {
        levels,
        noise_floor,
        fit_from,
        fit,
        lambda_fit,
        atom_rate,
        beta,
    })
}
