//! Run configuration: flags and JSON files share the same field names.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every setting a subcommand can read. Unset fields fall back to
/// per-command defaults, which are written back into the metadata sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mantissa bits: 53, 128 or 256.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,

    /// Critical exponent of the family.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,

    /// Shape parameter of the family.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    /// Shape parameter of the comparison map (converge, rigidity, probe).
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon2: Option<f64>,

    /// Parameter θ, parsed at the working precision.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,

    /// Continued fraction: a period ("1" is golden) or an explicit prefix.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cf: Option<String>,

    /// Rational rotation number P/Q.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,

    /// Solver tolerance; its meaning depends on the subcommand.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    /// Output stem: writes <out>.csv and <out>.meta.json.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Exponents for the probe grid, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<Vec<f64>>,

    /// Superstable levels used to extrapolate θ_*.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_levels: Option<usize>,
}

impl RunConfig {
    /// Reads a config file. A metadata sidecar is accepted too: its
    /// `config` object is the resolved configuration of that run.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        RunConfig {
            bits: self.bits.or(base.bits),
            alpha: self.alpha.or(base.alpha),
            epsilon: self.epsilon.or(base.epsilon),
            epsilon2: self.epsilon2.or(base.epsilon2),
            theta: self.theta.or(base.theta),
            cf: self.cf.or(base.cf),
            target: self.target.or(base.target),
            depth: self.depth.or(base.depth),
            tol: self.tol.or(base.tol),
            workers: self.workers.or(base.workers),
            out: self.out.or(base.out),
            alpha_grid: self.alpha_grid.or(base.alpha_grid),
            theta_levels: self.theta_levels.or(base.theta_levels),
        }
    }

    /// Range checks shared by all subcommands.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if let Some(b) = self.bits {
            if ![53, 128, 256].contains(&b) {
                return bad(format!("bits must be 53, 128 or 256, got {b}"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a > 1.0) {
                return bad(format!("alpha must be a finite number above 1, got {a}"));
            }
        }
        for (name, v) in [("epsilon", self.epsilon), ("epsilon2", self.epsilon2)] {
            if let Some(e) = v {
                if !e.is_finite() {
                    return bad(format!("{name} must be finite, got {e}"));
                }
            }
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("tol must be positive, got {t}"));
            }
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if self.depth == Some(0) {
            return bad("depth must be at least 1".into());
        }
        if let Some(grid) = &self.alpha_grid {
            if grid.is_empty() || grid.iter().any(|a| !(a.is_finite() && *a > 1.0)) {
                return bad("alpha-grid entries must be finite numbers above 1".into());
            }
        }
        Ok(())
    }
}

/// Parses `P/Q` with `0 ≤ P ≤ Q`, `Q ≥ 1`, in lowest terms.
pub fn parse_target(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Config(format!("target must look like P/Q, got {s:?}"));
    let (p, q) = s.split_once('/').ok_or_else(bad)?;
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    let q: u64 = q.trim().parse().map_err(|_| bad())?;
    if q == 0 || p > q {
        return Err(CliError::Config(format!(
            "target must satisfy 0 <= P <= Q and Q >= 1, got {s}"
        )));
    }
    let (mut a, mut b) = (p, q);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    if a != 1 {
        return Err(CliError::Config(format!(
            "target {s} is not in lowest terms"
        )));
    }
    Ok((p, q))
}
