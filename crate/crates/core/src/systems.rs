//! Survival of the smallest and second-smallest order statistics.
//!
//! With marginals `sᵢ = F̄(x; θᵢ)` coupled by an Archimedean copula,
//!
//! ```text
//! F̄_{X₁:ₙ}(x) = ψ(Σᵢ φ(sᵢ))
//! F̄_{X₂:ₙ}(x) = Σᵢ ψ(Σ_{j≠i} φ(sⱼ)) − (n−1) ψ(Σᵢ φ(sᵢ))
//! ```
//!
//! The leave-one-out sums are accumulated directly rather than as
//! `total − φ(sᵢ)`, which would cancel badly once one `φ(sᵢ)` dominates.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::generators::GeneratorSpec;
use crate::grid::{invert_decreasing, linspace, logspace, validate_increasing};
use crate::models::{SemiParamModel, SURVIVAL_FLOOR};

/// Slack allowed when clamping a computed survival back into `[0, 1]`.
const CLAMP_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem")]
pub struct SystemSpec {
    pub n: usize,
    pub generator: GeneratorSpec,
    pub model: SemiParamModel,
    pub theta: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSystem {
    #[serde(default)]
    n: Option<usize>,
    generator: GeneratorSpec,
    model: SemiParamModel,
    theta: Vec<f64>,
}

impl TryFrom<RawSystem> for SystemSpec {
    type Error = Error;

    fn try_from(raw: RawSystem) -> Result<Self> {
        if let Some(n) = raw.n {
            if n != raw.theta.len() {
                return Err(Error::Mismatch(format!(
                    "n = {n} but theta has {} entries",
                    raw.theta.len()
                )));
            }
        }
        SystemSpec::new(raw.model, raw.theta, raw.generator)
    }
}

impl SystemSpec {
    pub fn new(model: SemiParamModel, theta: Vec<f64>, generator: GeneratorSpec) -> Result<Self> {
        if theta.len() < 2 {
            return Err(Error::param(format!(
                "a system needs n ≥ 2 components, got {}",
                theta.len()
            )));
        }
        ensure_finite(&theta)?;
        for &t in &theta {
            model.check_theta(t)?;
        }
        Ok(SystemSpec {
            n: theta.len(),
            generator,
            model,
            theta,
        })
    }

    /// Same model and generator with a different parameter vector.
    pub fn with_theta(&self, theta: Vec<f64>) -> Result<Self> {
        SystemSpec::new(self.model, theta, self.generator)
    }

    /// Component survivals at `x`, clipped below at the underflow floor.
    pub fn marginals(&self, x: f64) -> Vec<f64> {
        self.theta
            .iter()
            .map(|&t| self.model.survival_raw(x, t).clamp(SURVIVAL_FLOOR, 1.0))
            .collect()
    }

    fn phis(&self, x: f64) -> Vec<f64> {
        self.marginals(x)
            .into_iter()
            .map(|s| self.generator.phi_raw(s))
            .collect()
    }

    pub fn survival_x1n(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let total: f64 = self.phis(x).iter().sum();
        clamp_unit(self.generator.psi_raw(total))
    }

    pub fn survival_x2n(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        x2n_from_phis(&self.generator, &self.phis(x))
    }

    /// `F̄_{X₂:ₙ}` over a strictly increasing grid of nonnegative points.
    pub fn curve(&self, xs: &[f64]) -> Result<SurvivalCurve> {
        validate_increasing(xs)?;
        if xs[0] < 0.0 {
            return Err(Error::Grid("curve grid must be nonnegative".into()));
        }
        let values = xs
            .par_iter()
            .map(|&x| self.survival_x2n(x))
            .collect::<Result<Vec<f64>>>()?;
        let curve = SurvivalCurve {
            xs: xs.to_vec(),
            values,
        };
        curve.check_monotone(CLAMP_SLACK)?;
        Ok(curve)
    }

    /// `n ψ((n−1) φ(s)) − (n−1) ψ(n φ(s))` with `s = F̄(x; θ*)`.
    pub fn homogeneous_survival(&self, x: f64, theta_star: f64) -> Result<f64> {
        check_x(x)?;
        self.model.check_theta(theta_star)?;
        let s = self.model.survival_raw(x, theta_star).clamp(SURVIVAL_FLOOR, 1.0);
        let p = self.generator.phi_raw(s);
        let n = self.n as f64;
        let g = &self.generator;
        clamp_unit(n * g.psi_raw((n - 1.0) * p) - (n - 1.0) * g.psi_raw(n * p))
    }

    fn positive_theta(&self) -> Result<()> {
        match self.theta.iter().position(|&t| t <= 0.0) {
            Some(index) => Err(Error::NonPositive {
                index,
                value: self.theta[index],
            }),
            None => Ok(()),
        }
    }

    pub fn geometric_mean_theta(&self) -> Result<f64> {
        self.positive_theta()?;
        let mean_log = self.theta.iter().map(|t| t.ln()).sum::<f64>() / self.n as f64;
        Ok(mean_log.exp())
    }

    pub fn harmonic_mean_theta(&self) -> Result<f64> {
        self.positive_theta()?;
        Ok(self.n as f64 / self.theta.iter().map(|t| 1.0 / t).sum::<f64>())
    }

    /// Homogeneous bound at the geometric mean of θ.
    pub fn lower_bound_plarger(&self, x: f64) -> Result<f64> {
        self.homogeneous_survival(x, self.geometric_mean_theta()?)
    }

    /// Homogeneous bound at the harmonic mean of θ.
    pub fn lower_bound_rm(&self, x: f64) -> Result<f64> {
        self.homogeneous_survival(x, self.harmonic_mean_theta()?)
    }

    /// Mixture survival `(1/n) Σ F̄(x; θᵢ)`.
    pub fn mixture_survival(&self, x: f64) -> f64 {
        self.theta.iter().map(|&t| self.model.survival_raw(x, t)).sum::<f64>() / self.n as f64
    }

    /// Lower and upper mixture quantiles at levels `lo` and `hi`.
    pub fn mixture_range(&self, lo: f64, hi: f64) -> Result<(f64, f64)> {
        let start = self
            .theta
            .iter()
            .map(|&t| self.model.support_start(t))
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let a = invert_decreasing(|x| self.mixture_survival(x), 1.0 - lo, start, 1e-12)?;
        let b = invert_decreasing(|x| self.mixture_survival(x), 1.0 - hi, start, 1e-12)?;
        Ok((a, b))
    }

    /// 1000 log-spaced points over the mixture's `[q(0.001), q(0.999)]`.
    pub fn default_grid(&self) -> Result<Vec<f64>> {
        let (a, b) = self.mixture_range(0.001, 0.999)?;
        Ok(span_grid(a, b, 1000))
    }
}

/// Log-spaced when the range is positive, linear otherwise.
pub fn span_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if lo > 0.0 {
        logspace(lo, hi, points)
    } else {
        linspace(lo.max(0.0), hi, points)
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() {
        Err(Error::domain("x is NaN"))
    } else {
        Ok(())
    }
}

fn clamp_unit(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if (-CLAMP_SLACK..0.0).contains(&v) {
        Ok(0.0)
    } else if v > 1.0 && v <= 1.0 + CLAMP_SLACK {
        Ok(1.0)
    } else {
        Err(Error::Numerical(format!("survival value {v:e} outside [0,1]")))
    }
}

pub(crate) fn x2n_from_phis(g: &GeneratorSpec, phis: &[f64]) -> Result<f64> {
    let n = phis.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut s = 0.0;
        for (j, p) in phis.iter().enumerate() {
            if j != i {
                s += p;
            }
        }
        acc += g.psi_raw(s);
    }
    let total: f64 = phis.iter().sum();
    clamp_unit(acc - (n as f64 - 1.0) * g.psi_raw(total))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
}

impl SurvivalCurve {
    pub fn new(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: values.len(),
            });
        }
        validate_increasing(&xs)?;
        let c = SurvivalCurve { xs, values };
        c.check_monotone(CLAMP_SLACK)?;
        Ok(c)
    }

    fn check_monotone(&self, slack: f64) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Numerical(format!(
                "survival {} at x={} outside [0,1]",
                self.values[i], self.xs[i]
            )));
        }
        match self.values.windows(2).position(|w| w[1] > w[0] + slack) {
            Some(i) => Err(Error::Numerical(format!(
                "survival curve increases between x={} and x={}",
                self.xs[i],
                self.xs[i + 1]
            ))),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// CSV with header `x,survival`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,survival")?;
        for (x, v) in self.xs.iter().zip(&self.values) {
            writeln!(w, "{x:.16e},{v:.16e}")?;
        }
        Ok(())
    }
}

/// CSV with header `x,survival_x,survival_y,gap` for two curves on one grid.
pub fn write_paired_csv<W: Write>(cx: &SurvivalCurve, cy: &SurvivalCurve, mut w: W) -> Result<()> {
    if cx.xs != cy.xs {
        return Err(Error::Grid("paired curves must share the grid".into()));
    }
    let io = |e: std::io::Error| Error::Data(e.to_string());
    writeln!(w, "x,survival_x,survival_y,gap").map_err(io)?;
    for ((x, a), b) in cx.xs.iter().zip(&cx.values).zip(&cy.values) {
        writeln!(w, "{x:.16e},{a:.16e},{b:.16e},{:.16e}", a - b).map_err(io)?;
    }
    Ok(())
}
