//! Baseline lifetime laws, semi-parametric transforms and grid shape checks.
//!
//! A [`SemiParamModel`] turns a baseline survival `F̄` into a one-parameter
//! family `F̄(x; θ)`:
//!
//! - `Scale`: `F̄(θx)`
//! - `Phr`: `F̄(x)^θ`
//! - `Location`: `F̄(x − θ)`
//! - `Mphrs { α, λ }`: `α F̄(xθ)^λ / (1 − (1−α) F̄(xθ)^λ)`
//! - `Ls { λ }`: `F̄(θ(x − λ))` for `x > λ`, one otherwise
//!
//! The shape checks certify monotonicity and log-convexity on finite probe
//! grids. Survival values below [`SURVIVAL_FLOOR`] are excluded from every
//! log-based probe.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};
use crate::grid::{invert_decreasing, logspace, validate_increasing};

pub const SURVIVAL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBaseline", into = "RawBaseline")]
pub enum Baseline {
    Exponential {
        rate: f64,
    },
    /// `F̄(x) = exp(−(x/scale)^shape)`.
    Weibull {
        scale: f64,
        shape: f64,
    },
    /// `F(x) = (1 − e^{−x^α})^β`.
    ExpWeibull {
        alpha: f64,
        beta: f64,
    },
    /// `F̄(x) = (1 + x^c)^{−k}`.
    Burr {
        c: f64,
        k: f64,
    },
    /// `F̄(x) = (1 + αx)^{−1/α}`.
    GeneralizedPareto {
        alpha: f64,
    },
    /// Density `p x^{q−1} e^{−x^p} / Γ(q/p)`.
    GeneralizedGamma {
        p: f64,
        q: f64,
    },
    Gamma {
        shape: f64,
        rate: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawBaseline {
    family: String,
    params: Vec<f64>,
}

impl TryFrom<RawBaseline> for Baseline {
    type Error = Error;

    fn try_from(raw: RawBaseline) -> Result<Self> {
        Baseline::from_parts(&raw.family, &raw.params)
    }
}

impl From<Baseline> for RawBaseline {
    fn from(b: Baseline) -> Self {
        RawBaseline {
            family: b.family_name().to_string(),
            params: b.params(),
        }
    }
}

impl Baseline {
    pub fn from_parts(family: &str, params: &[f64]) -> Result<Self> {
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::param(format!(
                    "{family} baseline takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let b = match family {
            "exponential" | "exp" => {
                want(1)?;
                Baseline::Exponential { rate: params[0] }
            }
            "weibull" => {
                want(2)?;
                Baseline::Weibull {
                    scale: params[0],
                    shape: params[1],
                }
            }
            "exp-weibull" | "ew" => {
                want(2)?;
                Baseline::ExpWeibull {
                    alpha: params[0],
                    beta: params[1],
                }
            }
            "burr" => {
                want(2)?;
                Baseline::Burr {
                    c: params[0],
                    k: params[1],
                }
            }
            "generalized-pareto" | "gp" => {
                want(1)?;
                Baseline::GeneralizedPareto { alpha: params[0] }
            }
            "generalized-gamma" | "gg" => {
                want(2)?;
                Baseline::GeneralizedGamma {
                    p: params[0],
                    q: params[1],
                }
            }
            "gamma" => {
                want(2)?;
                Baseline::Gamma {
                    shape: params[0],
                    rate: params[1],
                }
            }
            other => return Err(Error::param(format!("unknown baseline family '{other}'"))),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Baseline::Exponential { .. } => "exponential",
            Baseline::Weibull { .. } => "weibull",
            Baseline::ExpWeibull { .. } => "exp-weibull",
            Baseline::Burr { .. } => "burr",
            Baseline::GeneralizedPareto { .. } => "generalized-pareto",
            Baseline::GeneralizedGamma { .. } => "generalized-gamma",
            Baseline::Gamma { .. } => "gamma",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Baseline::Exponential { rate } => vec![rate],
            Baseline::Weibull { scale, shape } => vec![scale, shape],
            Baseline::ExpWeibull { alpha, beta } => vec![alpha, beta],
            Baseline::Burr { c, k } => vec![c, k],
            Baseline::GeneralizedPareto { alpha } => vec![alpha],
            Baseline::GeneralizedGamma { p, q } => vec![p, q],
            Baseline::Gamma { shape, rate } => vec![shape, rate],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ps = self.params();
        if ps.iter().all(|p| p.is_finite() && *p > 0.0) {
            Ok(())
        } else {
            Err(Error::param(format!(
                "{} parameters must be finite and > 0, got {ps:?}",
                self.family_name()
            )))
        }
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            Baseline::Exponential { rate } => (-rate * x).exp(),
            Baseline::Weibull { scale, shape } => (-(x / scale).powf(shape)).exp(),
            Baseline::ExpWeibull { alpha, beta } => -(beta * ln_one_minus_exp(-x.powf(alpha))).exp_m1(),
            Baseline::Burr { c, k } => (-k * x.powf(c).ln_1p()).exp(),
            Baseline::GeneralizedPareto { alpha } => (-(alpha * x).ln_1p() / alpha).exp(),
            Baseline::GeneralizedGamma { p, q } => gamma_ur(q / p, x.powf(p)),
            Baseline::Gamma { shape, rate } => gamma_ur(shape, rate * x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Baseline::Exponential { rate } => -(-rate * x).exp_m1(),
            Baseline::Weibull { scale, shape } => -(-(x / scale).powf(shape)).exp_m1(),
            Baseline::ExpWeibull { alpha, beta } => (beta * ln_one_minus_exp(-x.powf(alpha))).exp(),
            Baseline::Burr { c, k } => -(-k * x.powf(c).ln_1p()).exp_m1(),
            Baseline::GeneralizedPareto { alpha } => -(-(alpha * x).ln_1p() / alpha).exp_m1(),
            _ => 1.0 - self.sf(x),
        }
    }

    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Baseline::Exponential { rate } => -rate * x,
            Baseline::Weibull { scale, shape } => -(x / scale).powf(shape),
            Baseline::ExpWeibull { alpha, beta } => {
                let y = x.powf(alpha);
                let l = ln_one_minus_exp(-y);
                if l > -1e-12 {
                    // sf ≈ β e^{−y}(1 + (1−β)e^{−y}/2)
                    beta.ln() - y + (0.5 * (1.0 - beta) * (-y).exp()).ln_1p()
                } else {
                    (-(beta * l).exp_m1()).ln()
                }
            }
            Baseline::Burr { c, k } => -k * x.powf(c).ln_1p(),
            Baseline::GeneralizedPareto { alpha } => -(alpha * x).ln_1p() / alpha,
            Baseline::GeneralizedGamma { p, q } => ln_gamma_ur(q / p, x.powf(p)),
            Baseline::Gamma { shape, rate } => ln_gamma_ur(shape, rate * x),
        }
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let lx = x.ln();
        match *self {
            Baseline::Exponential { rate } => rate.ln() - rate * x,
            Baseline::Weibull { scale, shape } => {
                let z = x / scale;
                (shape / scale).ln() + (shape - 1.0) * z.ln() - z.powf(shape)
            }
            Baseline::ExpWeibull { alpha, beta } => {
                let y = x.powf(alpha);
                (alpha * beta).ln() + (alpha - 1.0) * lx - y + (beta - 1.0) * ln_one_minus_exp(-y)
            }
            Baseline::Burr { c, k } => (c * k).ln() + (c - 1.0) * lx - (k + 1.0) * x.powf(c).ln_1p(),
            Baseline::GeneralizedPareto { alpha } => -(1.0 / alpha + 1.0) * (alpha * x).ln_1p(),
            Baseline::GeneralizedGamma { p, q } => p.ln() + (q - 1.0) * lx - x.powf(p) - ln_gamma(q / p),
            Baseline::Gamma { shape, rate } => shape * rate.ln() + (shape - 1.0) * lx - rate * x - ln_gamma(shape),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Hazard `h(x) = f(x)/F̄(x)`, in closed form where one exists.
    pub fn hazard(&self, x: f64) -> f64 {
        match *self {
            Baseline::Exponential { rate } => rate,
            Baseline::Weibull { scale, shape } => (shape / scale) * (x / scale).powf(shape - 1.0),
            Baseline::Burr { c, k } => c * k * x.powf(c - 1.0) / (1.0 + x.powf(c)),
            Baseline::GeneralizedPareto { alpha } => 1.0 / (1.0 + alpha * x),
            _ => (self.ln_pdf(x) - self.ln_sf(x)).exp(),
        }
    }

    /// The `x` with `F̄(x) = s`, for `s ∈ (0, 1)`.
    pub fn inverse_sf(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!("survival level must lie in (0,1), got {s}")));
        }
        let ln_s = s.ln();
        Ok(match *self {
            Baseline::Exponential { rate } => -ln_s / rate,
            Baseline::Weibull { scale, shape } => scale * (-ln_s).powf(1.0 / shape),
            Baseline::ExpWeibull { alpha, beta } => {
                // F = 1 − s, so 1 − e^{−y} = (1−s)^{1/β}
                let y = -ln_one_minus_exp((-s).ln_1p() / beta);
                y.powf(1.0 / alpha)
            }
            Baseline::Burr { c, k } => (-ln_s / k).exp_m1().powf(1.0 / c),
            Baseline::GeneralizedPareto { alpha } => (-alpha * ln_s).exp_m1() / alpha,
            _ => invert_decreasing(|x| self.sf(x), s, 0.0, 1e-14)?,
        })
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.inverse_sf(1.0 - p)
    }
}

/// `ln(1 − e^{z})` for `z < 0`.
fn ln_one_minus_exp(z: f64) -> f64 {
    if z > -std::f64::consts::LN_2 {
        (-z.exp_m1()).ln()
    } else {
        (-z.exp()).ln_1p()
    }
}

/// `ln Q(a, x)` with an asymptotic tail once `Q` underflows.
fn ln_gamma_ur(a: f64, x: f64) -> f64 {
    let q = gamma_ur(a, x);
    if q > 1e-280 {
        return q.ln();
    }
    // Q(a,x) ~ x^{a−1}e^{−x}/Γ(a) · Σ (a−1)…(a−k)/x^k
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term *= (a - k as f64) / x;
        if term.abs() < 1e-17 {
            break;
        }
        sum += term;
    }
    (a - 1.0) * x.ln() - x - ln_gamma(a) + sum.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    Scale,
    Phr,
    Location,
    Mphrs { alpha: f64, lambda: f64 },
    Ls { lambda: f64 },
}

impl ModelKind {
    /// Scale proportional hazards: MPHRS with `α = 1`.
    pub fn sph(lambda: f64) -> Self {
        ModelKind::Mphrs { alpha: 1.0, lambda }
    }

    /// Modified proportional hazards: MPHRS evaluated at `θ = 1`.
    pub fn mphr(alpha: f64, lambda: f64) -> Self {
        ModelKind::Mphrs { alpha, lambda }
    }

    /// Proportional odds: MPHRS with `λ = 1` evaluated at `θ = 1`.
    pub fn po(alpha: f64) -> Self {
        ModelKind::Mphrs { alpha, lambda: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Scale => "scale",
            ModelKind::Phr => "phr",
            ModelKind::Location => "location",
            ModelKind::Mphrs { .. } => "mphrs",
            ModelKind::Ls { .. } => "ls",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct SemiParamModel {
    pub kind: ModelKind,
    pub baseline: Baseline,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct Fixed {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawModel {
    kind: String,
    baseline: Baseline,
    #[serde(default)]
    fixed: Fixed,
}

impl TryFrom<RawModel> for SemiParamModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::param(format!("{} model needs fixed.{name}", raw.kind)))
        };
        let kind = match raw.kind.as_str() {
            "scale" => ModelKind::Scale,
            "phr" => ModelKind::Phr,
            "location" => ModelKind::Location,
            "mphrs" => ModelKind::Mphrs {
                alpha: need(raw.fixed.alpha, "alpha")?,
                lambda: need(raw.fixed.lambda, "lambda")?,
            },
            "sph" => ModelKind::sph(need(raw.fixed.lambda, "lambda")?),
            "ls" => ModelKind::Ls {
                lambda: need(raw.fixed.lambda, "lambda")?,
            },
            other => return Err(Error::param(format!("unknown model kind '{other}'"))),
        };
        SemiParamModel::new(kind, raw.baseline)
    }
}

impl From<SemiParamModel> for RawModel {
    fn from(m: SemiParamModel) -> Self {
        let fixed = match m.kind {
            ModelKind::Mphrs { alpha, lambda } => Fixed {
                alpha: Some(alpha),
                lambda: Some(lambda),
            },
            ModelKind::Ls { lambda } => Fixed {
                alpha: None,
                lambda: Some(lambda),
            },
            _ => Fixed::default(),
        };
        RawModel {
            kind: m.kind.name().to_string(),
            baseline: m.baseline,
            fixed,
        }
    }
}

impl SemiParamModel {
    pub fn new(kind: ModelKind, baseline: Baseline) -> Result<Self> {
        baseline.validate()?;
        match kind {
            ModelKind::Mphrs { alpha, lambda } => {
                if !(alpha > 0.0 && alpha.is_finite() && lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::param(format!(
                        "MPHRS needs α > 0 and λ > 0, got α={alpha}, λ={lambda}"
                    )));
                }
            }
            ModelKind::Ls { lambda } if !lambda.is_finite() => {
                return Err(Error::param("LS location must be finite"));
            }
            _ => {}
        }
        Ok(SemiParamModel { kind, baseline })
    }

    pub fn scale(baseline: Baseline) -> Self {
        SemiParamModel {
            kind: ModelKind::Scale,
            baseline,
        }
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        let ok = match self.kind {
            ModelKind::Location => theta.is_finite(),
            _ => theta.is_finite() && theta > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!(
                "{} model does not admit theta = {theta}",
                self.kind.name()
            )))
        }
    }

    /// Left end of the support of `F̄(·; θ)`.
    pub fn support_start(&self, theta: f64) -> f64 {
        match self.kind {
            ModelKind::Location => theta,
            ModelKind::Ls { lambda } => lambda,
            _ => 0.0,
        }
    }

    /// `F̄(x; θ)` without parameter validation.
    pub(crate) fn survival_raw(&self, x: f64, theta: f64) -> f64 {
        let b = &self.baseline;
        match self.kind {
            ModelKind::Scale => b.sf(theta * x),
            ModelKind::Phr => b.sf(x).powf(theta),
            ModelKind::Location => b.sf(x - theta),
            ModelKind::Mphrs { alpha, lambda } => {
                let l = lambda * b.ln_sf(x * theta);
                alpha * l.exp() / (alpha - (1.0 - alpha) * l.exp_m1())
            }
            ModelKind::Ls { lambda } => {
                if x <= lambda {
                    1.0
                } else {
                    b.sf(theta * (x - lambda))
                }
            }
        }
    }

    pub(crate) fn ln_survival_raw(&self, x: f64, theta: f64) -> f64 {
        let b = &self.baseline;
        match self.kind {
            ModelKind::Scale => b.ln_sf(theta * x),
            ModelKind::Phr => theta * b.ln_sf(x),
            ModelKind::Location => b.ln_sf(x - theta),
            ModelKind::Mphrs { alpha, lambda } => {
                let l = lambda * b.ln_sf(x * theta);
                alpha.ln() + l - (alpha - (1.0 - alpha) * l.exp_m1()).ln()
            }
            ModelKind::Ls { lambda } => {
                if x <= lambda {
                    0.0
                } else {
                    b.ln_sf(theta * (x - lambda))
                }
            }
        }
    }

    pub fn sp_survival(&self, x: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        if x.is_nan() {
            return Err(Error::domain("x is NaN"));
        }
        Ok(self.survival_raw(x, theta).clamp(0.0, 1.0))
    }

    pub fn ln_sp_survival(&self, x: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        Ok(self.ln_survival_raw(x, theta).min(0.0))
    }

    /// The `x` with `F̄(x; θ) = s`, by bisection to `1e−10` relative.
    pub fn inverse_survival(&self, s: f64, theta: f64) -> Result<f64> {
        self.check_theta(theta)?;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!("survival level must lie in (0,1), got {s}")));
        }
        invert_decreasing(|x| self.survival_raw(x, theta), s, self.support_start(theta), 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeProperty {
    Dfr,
    Dpfr,
    DecreasingInLogTheta,
    LogConvexInLogTheta,
    IncreasingInTheta,
    LogConvexInTheta,
}

/// Result of one grid shape check.
///
/// `worst_violation` is the largest signed violation found (positive means
/// the property is broken by that amount); `holds` is `worst_violation ≤ tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeVerdict {
    pub property: ShapeProperty,
    pub holds: bool,
    pub worst_violation: f64,
    /// Where the worst violation occurred: `(x, parameter)`; parameter is
    /// `NaN` for baseline properties.
    pub worst_at: (f64, f64),
    pub tol: f64,
    pub probe: String,
}

impl ShapeVerdict {
    fn new(property: ShapeProperty, worst: (f64, f64, f64), tol: f64, probe: String) -> Self {
        ShapeVerdict {
            property,
            holds: worst.0 <= tol,
            worst_violation: worst.0,
            worst_at: (worst.1, worst.2),
            tol,
            probe,
        }
    }
}

fn check_x_grid(xs: &[f64]) -> Result<()> {
    if xs.len() < 100 {
        return Err(Error::Grid(format!(
            "shape probes need at least 100 x-points, got {}",
            xs.len()
        )));
    }
    validate_increasing(xs)?;
    if xs[0] <= 0.0 {
        return Err(Error::Grid("x-grid must lie in the support (0, ∞)".into()));
    }
    Ok(())
}

/// Worst relative increase of `f` along the grid.
fn worst_increase(xs: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64, f64) {
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut worst = (f64::NEG_INFINITY, f64::NAN, f64::NAN);
    for i in 1..vals.len() {
        let scale = vals[i - 1].abs().max(vals[i].abs()).max(f64::MIN_POSITIVE);
        let v = (vals[i] - vals[i - 1]) / scale;
        if v > worst.0 || worst.0.is_nan() {
            worst = (v, xs[i], f64::NAN);
        }
    }
    worst
}

/// Default x-grid for a baseline: log-spaced over its quantile range.
pub fn baseline_grid(b: &Baseline, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    let a = b.quantile(lo)?;
    let z = b.quantile(hi)?;
    Ok(logspace(a, z, points))
}

/// Nonincrease of the hazard rate on `xs`.
pub fn check_dfr(b: &Baseline, xs: &[f64], tol: f64) -> Result<ShapeVerdict> {
    check_x_grid(xs)?;
    Ok(ShapeVerdict::new(
        ShapeProperty::Dfr,
        worst_increase(xs, |x| b.hazard(x)),
        tol,
        format!(
            "hazard on {} points in [{:.4e}, {:.4e}]",
            xs.len(),
            xs[0],
            xs[xs.len() - 1]
        ),
    ))
}

/// Nonincrease of `x·h(x)` on `xs`.
pub fn check_dpfr(b: &Baseline, xs: &[f64], tol: f64) -> Result<ShapeVerdict> {
    check_x_grid(xs)?;
    Ok(ShapeVerdict::new(
        ShapeProperty::Dpfr,
        worst_increase(xs, |x| x * b.hazard(x)),
        tol,
        format!(
            "x*hazard on {} points in [{:.4e}, {:.4e}]",
            xs.len(),
            xs[0],
            xs[xs.len() - 1]
        ),
    ))
}

/// Monotonicity and log-convexity of `p ↦ F̄(x; map(p))` over `ps` for each x.
///
/// `decreasing` selects the monotone direction. Log-convexity uses
/// second divided differences scaled by `1 + Σ|ln F̄|`, so the verdict is
/// insensitive to the magnitude of the log-survival.
fn param_shape(
    m: &SemiParamModel,
    xs: &[f64],
    ps: &[f64],
    map: impl Fn(f64) -> f64,
    decreasing: bool,
) -> Result<((f64, f64, f64), (f64, f64, f64))> {
    if ps.len() < 3 {
        return Err(Error::Grid("parameter grid needs at least 3 points".into()));
    }
    validate_increasing(ps)?;
    validate_increasing(xs)?;
    for &p in ps {
        m.check_theta(map(p))?;
    }
    let mut mono = (f64::NEG_INFINITY, f64::NAN, f64::NAN);
    let mut conv = (f64::NEG_INFINITY, f64::NAN, f64::NAN);
    let mut s = vec![0.0; ps.len()];
    let mut l = vec![0.0; ps.len()];
    for &x in xs {
        for (j, &p) in ps.iter().enumerate() {
            let th = map(p);
            s[j] = m.survival_raw(x, th);
            l[j] = m.ln_survival_raw(x, th);
        }
        for j in 1..ps.len() {
            let d = s[j] - s[j - 1];
            let v = if decreasing { d } else { -d };
            if v > mono.0 {
                mono = (v, x, ps[j]);
            }
        }
        for j in 1..ps.len() - 1 {
            if s[j - 1] < SURVIVAL_FLOOR || s[j] < SURVIVAL_FLOOR || s[j + 1] < SURVIVAL_FLOOR {
                continue;
            }
            let d1 = (l[j] - l[j - 1]) / (ps[j] - ps[j - 1]);
            let d2 = (l[j + 1] - l[j]) / (ps[j + 1] - ps[j]);
            let dd = 2.0 * (d2 - d1) / (ps[j + 1] - ps[j - 1]);
            let scale = 1.0 + l[j - 1].abs() + l[j].abs() + l[j + 1].abs();
            let v = -dd / scale;
            if v > conv.0 {
                conv = (v, x, ps[j]);
            }
        }
    }
    Ok((mono, conv))
}

fn grid_desc(xs: &[f64], ps: &[f64], pname: &str) -> String {
    format!(
        "{} x-points in [{:.4e}, {:.4e}] × {} {pname}-points in [{:.4e}, {:.4e}]",
        xs.len(),
        xs[0],
        xs[xs.len() - 1],
        ps.len(),
        ps[0],
        ps[ps.len() - 1]
    )
}

/// `F̄(x; e^a)` decreasing and log-convex in `a` over `a_grid`, for every x.
pub fn check_theorem1_condition2(
    m: &SemiParamModel,
    xs: &[f64],
    a_grid: &[f64],
    tol: f64,
) -> Result<(ShapeVerdict, ShapeVerdict)> {
    let (mono, conv) = param_shape(m, xs, a_grid, f64::exp, true)?;
    let desc = grid_desc(xs, a_grid, "a");
    Ok((
        ShapeVerdict::new(ShapeProperty::DecreasingInLogTheta, mono, tol, desc.clone()),
        ShapeVerdict::new(ShapeProperty::LogConvexInLogTheta, conv, tol, desc),
    ))
}

/// `F̄(x; θ)` increasing and log-convex in `θ` over `theta_grid`, for every x.
pub fn check_theorem2_condition2(
    m: &SemiParamModel,
    xs: &[f64],
    theta_grid: &[f64],
    tol: f64,
) -> Result<(ShapeVerdict, ShapeVerdict)> {
    let (mono, conv) = param_shape(m, xs, theta_grid, |t| t, false)?;
    let desc = grid_desc(xs, theta_grid, "theta");
    Ok((
        ShapeVerdict::new(ShapeProperty::IncreasingInTheta, mono, tol, desc.clone()),
        ShapeVerdict::new(ShapeProperty::LogConvexInTheta, conv, tol, desc),
    ))
}
