use std::path::Path;

use failsafe_core::GridPolicy;
use serde::Deserialize;

use crate::commands::CliError;
use crate::{GridFlags, Spacing, ToleranceFlags};

pub const SEED_ENV: &str = "FAILSAFE_SEED";

/// Settings read from `--config`. Every field is optional; command-line
/// flags override whatever is set here.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// Partial grid policy; missing fields keep their defaults.
    pub policy: Option<GridPolicy>,
    pub points: Option<usize>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub spacing: Option<Spacing>,
    pub count: Option<usize>,
    pub boot_n: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }

    pub fn seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(s) = flag.or(self.seed) {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
            Err(_) => Ok(0),
        }
    }

    pub fn policy(&self, tol: &ToleranceFlags) -> Result<GridPolicy, CliError> {
        let mut p = self.policy.clone().unwrap_or_default();
        let overrides = [
            (tol.dominance_tol, &mut p.dominance_tol, "dominance-tol"),
            (tol.crossing_tol, &mut p.crossing_tol, "crossing-tol"),
            (tol.shape_tol, &mut p.shape_tol, "shape-tol"),
            (tol.classification_tol, &mut p.classification_tol, "classification-tol"),
        ];
        for (flag, slot, name) in overrides {
            if let Some(v) = flag {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(CliError::input(format!("--{name} must be finite and non-negative")));
                }
                *slot = v;
            }
        }
        Ok(p)
    }

    /// Grid flags merged over the config file.
    pub fn grid(&self, flags: &GridFlags) -> GridRequest {
        GridRequest {
            points: flags.points.or(self.points),
            lo: flags.lo.or(self.lo),
            hi: flags.hi.or(self.hi),
            spacing: flags.spacing.or(self.spacing),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridRequest {
    pub points: Option<usize>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub spacing: Option<Spacing>,
}

impl GridRequest {
    /// Builds the grid, filling unset ends from `range` and the point count
    /// from `default_points`.
    pub fn build(&self, range: (f64, f64), default_points: usize) -> Result<Vec<f64>, CliError> {
        let points = self.points.unwrap_or(default_points);
        if points < 2 {
            return Err(CliError::input("grid needs at least 2 points"));
        }
        let lo = self.lo.unwrap_or(range.0);
        let hi = self.hi.unwrap_or(range.1);
        if !(lo.is_finite() && hi.is_finite() && lo < hi && lo >= 0.0) {
            return Err(CliError::input(format!("invalid grid range [{lo}, {hi}]")));
        }
        let xs = match self.spacing {
            Some(Spacing::Linear) => failsafe_core::grid::linspace(lo, hi, points),
            Some(Spacing::Log) if lo > 0.0 => failsafe_core::grid::logspace(lo, hi, points),
            Some(Spacing::Log) => return Err(CliError::input("log spacing needs lo > 0")),
            None => failsafe_core::systems::span_grid(lo, hi, points),
        };
        failsafe_core::grid::validate_increasing(&xs)?;
        Ok(xs)
    }
}
