//! Subcommand bodies, generic over the working precision.

use std::sync::Arc;

use ccrenorm::experiments::{default_depth, superstable_tol};
use ccrenorm::renorm::build_tower;
use ccrenorm::rotation::{expand, nested_windows, superstable_parameter, RotationOptions, Tail};
use ccrenorm::{
    build_family, conjugacy_ratio_test, estimate_convergence, estimate_delta, par, probe_grid,
    rotation_reference, superstable_convergents, superstable_limit, CircleMapLift,
    ContinuedFraction, ConvergenceOptions, CriticalCircleFamily, DeltaOptions, Error, Exec, Height,
    ProbeOptions, Real,
};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{parse_target, RunConfig};
use crate::report::{float, json_f64, opt_float, opt_real, real, Outcome};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Rho,
    Superstable,
    Window,
    Tower,
    Delta,
    Converge,
    Rigidity,
    Probe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rho => "rho",
            Command::Superstable => "superstable",
            Command::Window => "window",
            Command::Tower => "tower",
            Command::Delta => "delta",
            Command::Converge => "converge",
            Command::Rigidity => "rigidity",
            Command::Probe => "probe",
        }
    }

    /// Whether `--cf` names a period (as opposed to an explicit prefix).
    fn uses_period(self) -> bool {
        matches!(
            self,
            Command::Tower
                | Command::Delta
                | Command::Converge
                | Command::Rigidity
                | Command::Probe
        )
    }
}

/// Edge tolerance of `window`, relative to the enclosing window.
const WINDOW_REL_TOL: f64 = 1e-7;
const WINDOW_BUDGET: u64 = 2_000_000;
/// Tower depth of the contraction part of `probe`.
const PROBE_CONVERGENCE_DEPTH: usize = 10;

fn default_theta_levels(bits: u32) -> usize {
    match bits {
        53 => 12,
        128 => 18,
        _ => 22,
    }
}

/// Fills per-command defaults and checks the fields the command needs.
pub fn resolve(cmd: Command, cfg: RunConfig) -> Result<RunConfig, CliError> {
    cfg.validate()?;
    let mut c = cfg;
    let bits = *c.bits.get_or_insert(128);
    c.out.get_or_insert_with(|| cmd.name().into());
    if cmd != Command::Probe {
        c.alpha.get_or_insert(3.0);
        c.epsilon.get_or_insert(0.0);
    }
    let need = |ok: bool, msg: &str| {
        if ok {
            Ok(())
        } else {
            Err(CliError::Config(format!("{}: {msg}", cmd.name())))
        }
    };
    let tol_unused = |c: &RunConfig| need(c.tol.is_none(), "--tol is not used by this command");
    match cmd {
        Command::Rho => {
            need(c.theta.is_some(), "--theta is required")?;
            tol_unused(&c)?;
            c.depth.get_or_insert(20);
        }
        Command::Superstable => need(
            c.target.is_some() != c.cf.is_some(),
            "exactly one of --target and --cf is required",
        )?,
        Command::Window => {
            need(c.cf.is_some(), "--cf is required")?;
            c.tol.get_or_insert(WINDOW_REL_TOL);
        }
        Command::Tower => {
            tol_unused(&c)?;
            c.depth.get_or_insert(8);
            if c.theta.is_none() {
                c.cf.get_or_insert_with(|| "1".into());
                c.theta_levels.get_or_insert(default_theta_levels(bits));
            }
        }
        Command::Delta => {
            c.cf.get_or_insert_with(|| "1".into());
            let d = *c.depth.get_or_insert(default_depth(bits));
            need(d >= 2, "--depth must be at least 2")?;
        }
        Command::Converge | Command::Rigidity => {
            tol_unused(&c)?;
            c.cf.get_or_insert_with(|| "1".into());
            c.epsilon2.get_or_insert(0.3);
            c.depth
                .get_or_insert(if cmd == Command::Converge { 10 } else { 14 });
            c.theta_levels.get_or_insert(default_theta_levels(bits));
        }
        Command::Probe => {
            c.cf.get_or_insert_with(|| "1".into());
            c.epsilon2.get_or_insert(0.3);
            c.alpha_grid.get_or_insert_with(|| vec![2.9, 3.0, 3.1]);
            let d = *c.depth.get_or_insert(8);
            need(d >= 2, "--depth must be at least 2")?;
            c.theta_levels.get_or_insert(default_theta_levels(bits));
        }
    }
    if let Some(l) = c.theta_levels {
        need(l >= 3, "--theta-levels must be at least 3")?;
    }
    if let Some(s) = &c.cf {
        let cf = parse_cf(s)?;
        if cmd.uses_period() {
            need(
                !cf.is_terminated() && !cf.is_empty(),
                "--cf must be a nonempty period",
            )?;
        } else if c.depth.is_some() {
            need(
                !cf.is_terminated() && !cf.is_empty(),
                "--depth repeats --cf and needs an open-ended prefix",
            )?;
        }
    }
    if let Some(t) = &c.target {
        parse_target(t)?;
    }
    Ok(c)
}

fn parse_cf(s: &str) -> Result<ContinuedFraction, CliError> {
    ContinuedFraction::parse(s).map_err(|e| CliError::Config(format!("--cf: {e}")))
}

/// Core errors from invalid input are configuration errors; everything
/// else is a solver outcome.
fn config_err(e: Error) -> CliError {
    CliError::Config(e.to_string())
}

fn family<T: Real>(alpha: f64, epsilon: f64) -> Result<Arc<CriticalCircleFamily<T>>, CliError> {
    build_family(alpha, epsilon)
        .map(Arc::new)
        .map_err(config_err)
}

fn parse_theta<T: Real>(s: &str) -> Result<T, CliError> {
    T::parse_decimal(s).ok_or_else(|| CliError::Config(format!("--theta: cannot parse {s:?}")))
}

/// `--cf` as an explicit prefix, repeated periodically to `--depth` entries
/// when a depth is given.
fn combinatorics(cfg: &RunConfig) -> Result<ContinuedFraction, CliError> {
    let cf = parse_cf(cfg.cf.as_deref().unwrap_or_default())?;
    match cfg.depth {
        Some(d) => ContinuedFraction::periodic(cf.entries(), d).map_err(config_err),
        None => Ok(cf),
    }
}

fn period(cfg: &RunConfig) -> Result<Vec<u64>, CliError> {
    Ok(parse_cf(cfg.cf.as_deref().unwrap_or("1"))?
        .entries()
        .to_vec())
}

fn common_tolerances<T: Real>(out: &mut Outcome, fam: Option<&CriticalCircleFamily<T>>) {
    out.tolerances
        .insert("unit_roundoff".into(), json_f64(Some(T::unit_roundoff())));
    if let Some(f) = fam {
        out.tolerances
            .insert("quad_tol".into(), json_f64(Some(f.quad_tol())));
    }
}

/// Runs `cmd` on a resolved configuration.
pub fn run<T: Real>(cmd: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Rho => rho::<T>(cfg),
        Command::Superstable => superstable::<T>(cfg),
        Command::Window => window::<T>(cfg),
        Command::Tower => tower::<T>(cfg),
        Command::Delta => delta::<T>(cfg),
        Command::Converge => converge::<T>(cfg),
        Command::Rigidity => rigidity::<T>(cfg),
        Command::Probe => probe::<T>(cfg),
    }
}

fn alpha_eps(cfg: &RunConfig) -> (f64, f64) {
    (cfg.alpha.unwrap_or(3.0), cfg.epsilon.unwrap_or(0.0))
}

fn rho<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (alpha, eps) = alpha_eps(cfg);
    let fam = family::<T>(alpha, eps)?;
    let theta = parse_theta::<T>(cfg.theta.as_deref().unwrap_or_default())?;
    let header = vec!["theta", "winding", "rho", "cf", "certified_depth"];
    let mut out = Outcome::new(header.clone());
    common_tolerances(&mut out, Some(&fam));
    let map = CircleMapLift::new(fam, theta.clone());
    out.tolerances.insert(
        "zero_tol".into(),
        json_f64(Some(10.0 * map.step_tolerance())),
    );
    let exp = match expand(
        &map,
        cfg.depth.unwrap_or(20),
        &RotationOptions::default(),
        |_, _| false,
    ) {
        Ok(e) => e,
        Err(e) => return Ok(Outcome::failed(header, e)),
    };
    let (p, q) = match exp.cf.convergent(exp.cf.len()) {
        Ok(pq) => pq,
        Err(e) => return Ok(Outcome::failed(header, e)),
    };
    let value = T::from_i64(p as i64) / T::from_i64(q as i64);
    out.rows.push(vec![
        real(&theta),
        exp.winding.to_string(),
        real(&value),
        exp.cf.to_string(),
        exp.cf.len().to_string(),
    ]);
    out.certified_depth = exp.cf.len();
    out.summary
        .insert("terminated".into(), json!(exp.cf.is_terminated()));
    out.summary
        .insert("evaluations".into(), json!(exp.evaluations));
    if matches!(exp.tail, Tail::Budget | Tail::Precision) {
        out.halted = Some(Error::Precision {
            certified_depth: exp.cf.len(),
            detail: "closest return unresolved before the requested depth".into(),
        });
    }
    Ok(out)
}

fn superstable<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (alpha, eps) = alpha_eps(cfg);
    let fam = family::<T>(alpha, eps)?;
    let header = vec!["n", "p", "q", "theta", "residual"];
    let mut out = Outcome::new(header);
    common_tolerances(&mut out, Some(&fam));
    let tol_label = match cfg.tol {
        Some(t) => json_f64(Some(t)),
        None => json!("1e6 * q * unit_roundoff"),
    };
    out.tolerances.insert("residual_tol".into(), tol_label);

    if let Some(t) = &cfg.target {
        let (p, q) = parse_target(t)?;
        let tol = cfg.tol.unwrap_or_else(|| superstable_tol::<T>(q));
        match superstable_parameter::<T, _>(&fam, p, q, tol) {
            Ok(s) => {
                out.rows.push(vec![
                    String::new(),
                    s.p.to_string(),
                    s.q.to_string(),
                    real(&s.theta),
                    real(&s.residual),
                ]);
                out.certified_depth = 1;
            }
            Err(e) => out.halted = Some(e),
        }
        return Ok(out);
    }

    let cf = combinatorics(cfg)?;
    let (seq, halted) = superstable_convergents::<T, _>(&fam, &cf, cfg.tol);
    for (i, s) in seq.iter().enumerate() {
        out.rows.push(vec![
            (i + 1).to_string(),
            s.p.to_string(),
            s.q.to_string(),
            real(&s.theta),
            real(&s.residual),
        ]);
    }
    out.certified_depth = seq.len();
    out.halted = halted;
    Ok(out)
}

fn window<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (alpha, eps) = alpha_eps(cfg);
    let fam = family::<T>(alpha, eps)?;
    let cf = combinatorics(cfg)?;
    let mut prefixes = (1..=cf.len())
        .map(|n| ContinuedFraction::prefix(&cf.entries()[..n]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(config_err)?;
    if cf.is_terminated() {
        prefixes.push(cf.clone());
    }
    let rel_tol = cfg.tol.unwrap_or(WINDOW_REL_TOL);
    let mut out = Outcome::new(vec!["n", "prefix", "lo", "hi", "width"]);
    common_tolerances(&mut out, Some(&fam));
    out.tolerances
        .insert("window_rel_tol".into(), json_f64(Some(rel_tol)));
    out.tolerances
        .insert("window_budget".into(), json!(WINDOW_BUDGET));
    let (windows, halted) = nested_windows::<T, _>(&fam, &prefixes, rel_tol, WINDOW_BUDGET);
    for (w, prefix) in windows.iter().zip(&prefixes) {
        out.rows.push(vec![
            prefix.len().to_string(),
            prefix.to_string(),
            real(&w.lo),
            real(&w.hi),
            real(&w.width()),
        ]);
    }
    out.certified_depth = windows.len();
    out.halted = halted;
    Ok(out)
}

fn height_str(h: Height) -> String {
    match h {
        Height::Finite(r) => r.to_string(),
        Height::Infinite => "inf".into(),
    }
}

/// `--theta` when given, otherwise `θ_*` extrapolated along the period.
fn resolve_theta<T: Real>(
    cfg: &RunConfig,
    fam: &Arc<CriticalCircleFamily<T>>,
    out: &mut Outcome,
    key: &str,
) -> Result<Option<T>, CliError> {
    if let Some(s) = &cfg.theta {
        return parse_theta::<T>(s).map(Some);
    }
    let levels = cfg.theta_levels.unwrap_or(18);
    match superstable_limit::<T, _>(fam, &period(cfg)?, levels) {
        Ok(est) => {
            out.summary.insert(key.into(), json!(real(&est.theta)));
            out.summary.insert(
                format!("{key}_uncertainty"),
                json_f64(Some(est.uncertainty)),
            );
            Ok(Some(est.theta))
        }
        Err(e) => {
            out.halted = Some(e);
            Ok(None)
        }
    }
}

fn tower<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (alpha, eps) = alpha_eps(cfg);
    let fam = family::<T>(alpha, eps)?;
    let mut out = Outcome::new(vec![
        "level",
        "height",
        "q_eta",
        "q_xi",
        "eta0",
        "commutation_residual",
    ]);
    common_tolerances(&mut out, Some(&fam));
    let Some(theta) = resolve_theta(cfg, &fam, &mut out, "theta")? else {
        return Ok(out);
    };
    let map = CircleMapLift::new(fam, theta);
    let tower = build_tower(&map, cfg.depth.unwrap_or(8), &Default::default());
    for d in &tower.diagnostics {
        out.rows.push(vec![
            d.level.to_string(),
            height_str(d.height),
            d.q_eta.to_string(),
            d.q_xi.to_string(),
            real(&d.eta0),
            real(&d.commutation_residual),
        ]);
    }
    out.certified_depth = tower.diagnostics.len().saturating_sub(1);
    out.halted = tower.halted;
    Ok(out)
}

fn delta<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (alpha, eps) = alpha_eps(cfg);
    let fam = family::<T>(alpha, eps)?;
    let header = vec![
        "n",
        "theta_n",
        "gap_n",
        "delta_gap_n",
        "width_n",
        "delta_width_n",
    ];
    let opts = DeltaOptions {
        tol: cfg.tol,
        ..Default::default()
    };
    let mut out = Outcome::new(header.clone());
    common_tolerances(&mut out, Some(&fam));
    out.tolerances.insert(
        "residual_tol".into(),
        cfg.tol
            .map_or(json!("1e6 * q * unit_roundoff"), |t| json_f64(Some(t))),
    );
    out.tolerances
        .insert("window_rel_tol".into(), json_f64(Some(opts.window_rel_tol)));
    let report = match estimate_delta::<T, _>(&fam, &period(cfg)?, cfg.depth.unwrap_or(8), &opts) {
        Ok(r) => r,
        Err(e @ Error::Domain(_)) => return Err(config_err(e)),
        Err(e) => return Ok(Outcome::failed(header, e)),
    };
    for r in &report.rows {
        out.rows.push(vec![
            r.n.to_string(),
            real(&r.theta),
            opt_real(r.gap.as_ref()),
            opt_real(r.delta_gap.as_ref()),
            opt_real(r.width.as_ref()),
            opt_real(r.delta_width.as_ref()),
        ]);
    }
    out.summary.insert("delta".into(), json_f64(report.delta));
    out.summary
        .insert("delta_last".into(), json_f64(report.delta_last));
    out.summary
        .insert("uncertainty".into(), json_f64(report.uncertainty));
    out.summary
        .insert("delta_width".into(), json_f64(report.delta_width));
    out.certified_depth = report.certified_depth;
    out.halted = report.halted;
    Ok(out)
}

/// The `ε` and `ε₂` members at their extrapolated `θ_*`.
type MapPair<T> = (
    CircleMapLift<T, CriticalCircleFamily<T>>,
    CircleMapLift<T, CriticalCircleFamily<T>>,
);

fn map_pair<T: Real>(cfg: &RunConfig, out: &mut Outcome) -> Result<Option<MapPair<T>>, CliError> {
    let (alpha, eps) = alpha_eps(cfg);
    let f = family::<T>(alpha, eps)?;
    let g = family::<T>(alpha, cfg.epsilon2.unwrap_or(0.3))?;
    common_tolerances(out, Some(&f));
    let period = period(cfg)?;
    let levels = cfg.theta_levels.unwrap_or(18);
    let (tf, tg) = par::join(
        Exec::Parallel,
        || superstable_limit::<T, _>(&f, &period, levels),
        || superstable_limit::<T, _>(&g, &period, levels),
    );
    match (tf, tg) {
        (Ok(tf), Ok(tg)) => {
            for (key, est) in [("theta", &tf), ("theta2", &tg)] {
                out.summary.insert(key.into(), json!(real(&est.theta)));
                out.summary.insert(
                    format!("{key}_uncertainty"),
                    json_f64(Some(est.uncertainty)),
                );
            }
            Ok(Some((
                CircleMapLift::new(f, tf.theta),
                CircleMapLift::new(g, tg.theta),
            )))
        }
        (Err(e), _) | (_, Err(e)) => {
            out.halted = Some(e);
            Ok(None)
        }
    }
}

fn converge<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let header = vec!["n", "distance", "noise_floor", "in_fit"];
    let mut out = Outcome::new(header.clone());
    let Some((f, g)) = map_pair::<T>(cfg, &mut out)? else {
        return Ok(out);
    };
    let opts = ConvergenceOptions::default();
    let report = match estimate_convergence(&f, &g, cfg.depth.unwrap_or(10), &opts) {
        Ok(r) => r,
        Err(e) => {
            out.halted = Some(e);
            return Ok(out);
        }
    };
    for ((n, d), floor) in report.distances.iter().zip(&report.noise_floor) {
        let used = *n >= opts.fit_from && d.to_f64() > *floor;
        out.rows.push(vec![
            n.to_string(),
            real(d),
            float::<T>(*floor),
            used.to_string(),
        ]);
    }
    out.summary.insert("fit_from".into(), json!(opts.fit_from));
    out.summary
        .insert("lambda_s".into(), json_f64(report.lambda_s));
    out.summary.insert(
        "r_squared".into(),
        json_f64(report.fit.as_ref().map(|f| f.r_squared)),
    );
    out.certified_depth = report.certified_depth;
    out.halted = report.halted;
    Ok(out)
}

fn rigidity<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::new(vec!["n", "d_n", "noise_floor", "in_fit"]);
    let Some((f, g)) = map_pair::<T>(cfg, &mut out)? else {
        return Ok(out);
    };
    let report = match conjugacy_ratio_test(&f, &g, cfg.depth.unwrap_or(14)) {
        Ok(r) => r,
        Err(e) => {
            out.halted = Some(e);
            return Ok(out);
        }
    };
    for (&(n, d), &floor) in report.levels.iter().zip(&report.noise_floor) {
        let used = n >= report.fit_from && d > floor && d > 0.0;
        out.rows.push(vec![
            n.to_string(),
            float::<T>(d),
            float::<T>(floor),
            used.to_string(),
        ]);
    }
    out.summary
        .insert("fit_from".into(), json!(report.fit_from));
    out.summary
        .insert("lambda_fit".into(), json_f64(report.lambda_fit));
    out.summary.insert(
        "r_squared".into(),
        json_f64(report.fit.as_ref().map(|f| f.r_squared)),
    );
    out.summary
        .insert("atom_rate".into(), json_f64(report.atom_rate));
    out.summary.insert("beta".into(), json_f64(report.beta));
    out.certified_depth = report.levels.len();
    Ok(out)
}

fn probe<T: Real>(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let header = vec![
        "alpha",
        "delta",
        "delta_uncertainty",
        "lambda_s",
        "r_squared",
        "certified_depth",
        "passes",
        "halted",
    ];
    let mut out = Outcome::new(header);
    common_tolerances::<T>(&mut out, None);
    let alphas = cfg.alpha_grid.clone().unwrap_or_default();
    for &a in &alphas {
        family::<T>(a, 0.0)?;
        family::<T>(a, cfg.epsilon2.unwrap_or(0.3))?;
    }
    let period = period(cfg)?;
    let depth = cfg.depth.unwrap_or(8);
    let opts = ProbeOptions {
        delta: DeltaOptions {
            tol: cfg.tol,
            ..Default::default()
        },
        epsilon2: cfg.epsilon2.unwrap_or(0.3),
        theta_levels: cfg.theta_levels.unwrap_or(18),
        convergence_depth: PROBE_CONVERGENCE_DEPTH,
        ..Default::default()
    };
    out.summary
        .insert("convergence_depth".into(), json!(PROBE_CONVERGENCE_DEPTH));
    let (cells, reference) = par::join(
        Exec::Parallel,
        || probe_grid::<T>(&alphas, &period, depth, &opts, Exec::Parallel),
        || rotation_reference::<T>(&period, depth, &opts.delta),
    );
    let mut depth_min = usize::MAX;
    let labels = alphas
        .iter()
        .map(|a| format!("{a}"))
        .chain(std::iter::once("rotation".to_string()));
    let mut passes = 0;
    for (label, cell) in labels.zip(cells.into_iter().chain(std::iter::once(reference))) {
        match cell {
            Ok(r) => {
                depth_min = depth_min.min(r.certified_depth);
                if r.alpha.is_some() && r.passes() {
                    passes += 1;
                }
                let halted = r.halted.as_ref().map(Error::to_string).unwrap_or_default();
                if let Some(e) = &r.halted {
                    out.halted.get_or_insert_with(|| e.clone());
                }
                out.rows.push(vec![
                    label,
                    opt_float::<T>(r.delta),
                    opt_float::<T>(r.delta_uncertainty),
                    opt_float::<T>(r.lambda_s),
                    opt_float::<T>(r.r_squared),
                    r.certified_depth.to_string(),
                    if r.alpha.is_some() {
                        r.passes().to_string()
                    } else {
                        String::new()
                    },
                    halted,
                ]);
            }
            Err(e) => {
                depth_min = 0;
                out.rows.push(vec![
                    label,
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "0".into(),
                    "false".into(),
                    e.to_string(),
                ]);
                out.halted.get_or_insert(e);
            }
        }
    }
    out.summary.insert("cells_passing".into(), json!(passes));
    out.summary.insert("cells".into(), json!(alphas.len()));
    out.certified_depth = if depth_min == usize::MAX {
        0
    } else {
        depth_min
    };
    Ok(out)
}

/// Metadata sidecar contents other than the wall time.
pub fn meta(cmd: Command, cfg: &RunConfig, out: &Outcome) -> Value {
    json!({
        "command": cmd,
        "config": cfg,
        "status": if out.halted.is_some() { "halted" } else { "ok" },
        "error": out.halted.as_ref().map(Error::to_string),
        "certified_depth": out.certified_depth,
        "rows": out.rows.len(),
        "tolerances": out.tolerances,
        "summary": out.summary,
    })
}
