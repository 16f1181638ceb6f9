//! Archimedean generators.
//!
//! A generator `ψ : [0,∞) → [0,1]` is continuous, strictly decreasing and
//! satisfies `ψ(0) = 1`, `ψ(∞) = 0`. The copula it generates is
//! `C(u₁,…,uₙ) = ψ(Σ φ(uᵢ))` with `φ = ψ⁻¹`.
//!
//! | family            | `ψ(t)`                               | θ range    | log-shape |
//! |-------------------|--------------------------------------|------------|-----------|
//! | `Independence`    | `e^{-t}`                             | none       | both      |
//! | `Clayton`         | `(1+θt)^{-1/θ}`                      | `(0,∞)`    | convex    |
//! | `Gumbel`          | `exp(-t^{1/θ})`                      | `[1,∞)`    | convex    |
//! | `Frank`           | `-ln(1-(1-e^{-θ})e^{-t})/θ`          | `(0,∞)`    | convex    |
//! | `AliMikhailHaq`   | `(1-θ)/(e^t-θ)`                      | `[-1,1)`   | concave for θ≤0, convex for θ≥0 |
//! | `GumbelBarnett`   | `exp((1-e^t)/θ)`                     | `(0,1]`    | concave   |
//! | `GumbelHougaard`  | `exp(1-(1+t)^θ)`                     | `(1,∞)`    | concave   |
//!
//! All evaluations go through `ln1p`/`expm1` forms so that small `t` and
//! `u` near one keep full relative precision.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::logspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Independence,
    Clayton,
    #[serde(alias = "gumbel-table3")]
    Gumbel,
    Frank,
    #[serde(alias = "amh")]
    AliMikhailHaq,
    GumbelBarnett,
    #[serde(alias = "gumbel-hougaard-table1")]
    GumbelHougaard,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Independence,
        Family::Clayton,
        Family::Gumbel,
        Family::Frank,
        Family::AliMikhailHaq,
        Family::GumbelBarnett,
        Family::GumbelHougaard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Independence => "independence",
            Family::Clayton => "clayton",
            Family::Gumbel => "gumbel",
            Family::Frank => "frank",
            Family::AliMikhailHaq => "ali-mikhail-haq",
            Family::GumbelBarnett => "gumbel-barnett",
            Family::GumbelHougaard => "gumbel-hougaard",
        }
    }

    fn check_theta(self, theta: f64) -> Result<()> {
        let ok = match self {
            Family::Independence => true,
            Family::Clayton | Family::Frank => theta > 0.0,
            Family::Gumbel => theta >= 1.0,
            Family::AliMikhailHaq => (-1.0..1.0).contains(&theta),
            Family::GumbelBarnett => theta > 0.0 && theta <= 1.0,
            Family::GumbelHougaard => theta > 1.0,
        };
        if ok && theta.is_finite() {
            Ok(())
        } else {
            Err(Error::param(format!(
                "{} generator does not admit theta = {theta}",
                self.name()
            )))
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sign of `d²/dt² ln ψ` over the probed range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogCurvature {
    LogConcave,
    LogConvex,
    /// Second differences vanish within tolerance (log-linear).
    Both,
    Neither,
}

impl LogCurvature {
    pub fn is_log_concave(self) -> bool {
        matches!(self, LogCurvature::LogConcave | LogCurvature::Both)
    }

    pub fn is_log_convex(self) -> bool {
        matches!(self, LogCurvature::LogConvex | LogCurvature::Both)
    }

    fn from_signs(any_pos: bool, any_neg: bool) -> Self {
        match (any_pos, any_neg) {
            (false, false) => LogCurvature::Both,
            (true, false) => LogCurvature::LogConvex,
            (false, true) => LogCurvature::LogConcave,
            (true, true) => LogCurvature::Neither,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogShape {
    pub curvature: LogCurvature,
    /// Extremes of the scaled second differences of `ln ψ` on the grid.
    pub min_second_diff: f64,
    pub max_second_diff: f64,
    /// Whether the closed-form curvature gives the same label.
    pub analytic_agrees: bool,
    pub t_max: f64,
    pub grid_points: usize,
}

#[derive(Deserialize)]
struct RawGenerator {
    family: Family,
    #[serde(default)]
    theta: Option<f64>,
}

/// A generator family with a validated parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGenerator")]
pub struct GeneratorSpec {
    pub family: Family,
    pub theta: f64,
}

impl TryFrom<RawGenerator> for GeneratorSpec {
    type Error = Error;

    fn try_from(raw: RawGenerator) -> Result<Self> {
        match (raw.family, raw.theta) {
            (Family::Independence, t) => GeneratorSpec::new(Family::Independence, t.unwrap_or(0.0)),
            (family, Some(t)) => GeneratorSpec::new(family, t),
            (family, None) => Err(Error::param(format!("{family} generator needs theta"))),
        }
    }
}

const PROBE_T: [f64; 12] = [0.0, 1e-8, 1e-4, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0];

impl GeneratorSpec {
    /// Validates the parameter range and probes `ψ(0) = 1` and monotonicity.
    pub fn new(family: Family, theta: f64) -> Result<Self> {
        family.check_theta(theta)?;
        let theta = if family == Family::Independence { 0.0 } else { theta };
        let g = GeneratorSpec { family, theta };
        if (g.psi_raw(0.0) - 1.0).abs() > 1e-15 {
            return Err(Error::Numerical(format!("{family}: psi(0) != 1")));
        }
        let values: Vec<f64> = PROBE_T.iter().map(|&t| g.psi_raw(t)).collect();
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) || values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Numerical(format!(
                "{family} theta={theta}: psi not decreasing on probe grid"
            )));
        }
        Ok(g)
    }

    pub fn independence() -> Self {
        GeneratorSpec {
            family: Family::Independence,
            theta: 0.0,
        }
    }

    /// Published log-shape of the family at this parameter.
    pub fn catalog_shape(&self) -> LogCurvature {
        match self.family {
            Family::Independence => LogCurvature::Both,
            Family::Clayton | Family::Gumbel | Family::Frank => LogCurvature::LogConvex,
            Family::AliMikhailHaq if self.theta < 0.0 => LogCurvature::LogConcave,
            Family::AliMikhailHaq if self.theta > 0.0 => LogCurvature::LogConvex,
            Family::AliMikhailHaq => LogCurvature::Both,
            Family::GumbelBarnett | Family::GumbelHougaard => LogCurvature::LogConcave,
        }
    }

    /// `e^{-θ} - 1` for Frank.
    fn frank_c(&self) -> f64 {
        (-self.theta).exp_m1()
    }

    /// `ln(1 + c e^{-t})` for Frank with `c = e^{-θ} - 1`.
    fn frank_ln1p(&self, t: f64) -> f64 {
        let w = self.frank_c() * (-t).exp();
        if w < -0.5 {
            (-(-t).exp_m1() + (-self.theta - t).exp()).ln()
        } else {
            w.ln_1p()
        }
    }

    /// `1 - θ e^{-t}` for AMH, without cancellation when θ is near one.
    fn amh_denominator(&self, t: f64) -> f64 {
        (1.0 - self.theta) - self.theta * (-t).exp_m1()
    }

    pub(crate) fn psi_raw(&self, t: f64) -> f64 {
        let th = self.theta;
        match self.family {
            Family::Independence => (-t).exp(),
            Family::Clayton => (-(th * t).ln_1p() / th).exp(),
            Family::Gumbel => (-t.powf(1.0 / th)).exp(),
            Family::Frank => (-self.frank_ln1p(t) / th).min(1.0),
            Family::AliMikhailHaq => {
                if t.is_infinite() {
                    0.0
                } else {
                    (1.0 - th) * (-t).exp() / self.amh_denominator(t)
                }
            }
            Family::GumbelBarnett => (-t.exp_m1() / th).exp(),
            Family::GumbelHougaard => (-(th * t.ln_1p()).exp_m1()).exp(),
        }
    }

    pub(crate) fn phi_raw(&self, u: f64) -> f64 {
        let th = self.theta;
        match self.family {
            Family::Independence => -u.ln(),
            Family::Clayton => (-th * u.ln()).exp_m1() / th,
            Family::Gumbel => (-u.ln()).powf(th),
            Family::Frank => {
                // e^{−θu} − e^{−θ} = −e^{−θu}·expm1(−θ(1−u)), kept exact near u = 1
                let diff = -(-th * u).exp() * (-th * (1.0 - u)).exp_m1();
                -(diff / (-th).exp_m1()).ln_1p()
            }
            Family::AliMikhailHaq => ((1.0 - th) * (1.0 - u) / u).ln_1p(),
            Family::GumbelBarnett => (-th * u.ln()).ln_1p(),
            Family::GumbelHougaard => ((-u.ln()).ln_1p() / th).exp_m1(),
        }
    }

    pub(crate) fn psi_prime_raw(&self, t: f64) -> f64 {
        let th = self.theta;
        match self.family {
            Family::Independence => -(-t).exp(),
            Family::Clayton => -(-(1.0 / th + 1.0) * (th * t).ln_1p()).exp(),
            Family::Gumbel => {
                if th == 1.0 {
                    -(-t).exp()
                } else if t == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let s = t.powf(1.0 / th);
                    -(s / (th * t)) * (-s).exp()
                }
            }
            Family::Frank => {
                let w = self.frank_c() * (-t).exp();
                w / (th * self.frank_ln1p(t).exp())
            }
            Family::AliMikhailHaq => {
                let d = self.amh_denominator(t);
                -(1.0 - th) * (-t).exp() / (d * d)
            }
            Family::GumbelBarnett => -(t - th.ln() - t.exp_m1() / th).exp(),
            Family::GumbelHougaard => {
                let l = t.ln_1p();
                -(th.ln() + (th - 1.0) * l - (th * l).exp_m1()).exp()
            }
        }
    }

    /// `ln ψ(t)`, finite well past the point where `ψ` itself underflows.
    pub fn ln_psi(&self, t: f64) -> f64 {
        let th = self.theta;
        match self.family {
            Family::Independence => -t,
            Family::Clayton => -(th * t).ln_1p() / th,
            Family::Gumbel => -t.powf(1.0 / th),
            Family::Frank => {
                let c = self.frank_c();
                let w = c * (-t).exp();
                let ratio = if w.abs() < 1e-8 {
                    1.0 - 0.5 * w
                } else {
                    self.frank_ln1p(t) / w
                };
                (-c).ln() - t + ratio.ln() - th.ln()
            }
            Family::AliMikhailHaq => -t - (-th * (-t).exp_m1() / (1.0 - th)).ln_1p(),
            Family::GumbelBarnett => -t.exp_m1() / th,
            Family::GumbelHougaard => -(th * t.ln_1p()).exp_m1(),
        }
    }

    /// Closed-form `d²/dt² ln ψ(t)` for `t > 0`.
    pub fn curvature(&self, t: f64) -> f64 {
        let th = self.theta;
        match self.family {
            Family::Independence => 0.0,
            Family::Clayton => th / (1.0 + th * t).powi(2),
            Family::Gumbel => {
                let r = 1.0 / th;
                -r * (r - 1.0) * t.powf(r - 2.0)
            }
            Family::Frank => {
                let w = self.frank_c() * (-t).exp();
                let g = self.frank_ln1p(t);
                let one_w = g.exp();
                let g1 = -w / one_w;
                let g2 = w / (one_w * one_w);
                (g2 * g - g1 * g1) / (g * g)
            }
            Family::AliMikhailHaq => {
                let d = self.amh_denominator(t);
                th * (-t).exp() / (d * d)
            }
            Family::GumbelBarnett => -t.exp() / th,
            Family::GumbelHougaard => -th * (th - 1.0) * (1.0 + t).powf(th - 2.0),
        }
    }

    pub fn psi(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.psi_raw(t))
    }

    pub fn phi(&self, u: f64) -> Result<f64> {
        check_u(u)?;
        Ok(self.phi_raw(u))
    }

    pub fn psi_prime(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(self.psi_prime_raw(t))
    }

    /// `C(u) = ψ(Σ φ(uᵢ))`.
    pub fn copula_eval(&self, u: &[f64]) -> Result<f64> {
        if u.is_empty() {
            return Err(Error::Empty("copula arguments"));
        }
        let mut s = 0.0;
        for &ui in u {
            check_u(ui)?;
            s += self.phi_raw(ui);
        }
        Ok(self.psi_raw(s))
    }

    /// Sign-classifies central second differences of `ln ψ` on
    /// `grid_points` log-spaced points in `[1e-6, t_max]`.
    ///
    /// The step at `t` is `rel_step · t`. A difference counts as signed only
    /// when it exceeds `tol` plus the roundoff bound of the stencil.
    pub fn classify_log_shape(&self, t_max: f64, grid_points: usize) -> Result<LogShape> {
        self.classify_log_shape_with(t_max, grid_points, 1e-3, 1e-9)
    }

    pub fn classify_log_shape_with(&self, t_max: f64, grid_points: usize, rel_step: f64, tol: f64) -> Result<LogShape> {
        const T_MIN: f64 = 1e-6;
        if !(t_max.is_finite() && t_max > T_MIN) {
            return Err(Error::Grid(format!("t_max must exceed {T_MIN}, got {t_max}")));
        }
        if grid_points < 50 {
            return Err(Error::Grid(format!(
                "log-shape probe needs at least 50 points, got {grid_points}"
            )));
        }
        if !(rel_step > 0.0 && rel_step < 0.5) {
            return Err(Error::Grid(format!("relative step {rel_step} out of (0, 0.5)")));
        }
        let grid = logspace(T_MIN, t_max, grid_points);
        let (mut any_pos, mut any_neg) = (false, false);
        let (mut a_pos, mut a_neg) = (false, false);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &t in &grid {
            let h = rel_step * t;
            let (fm, f0, fp) = (self.ln_psi(t - h), self.ln_psi(t), self.ln_psi(t + h));
            let d = (fp - 2.0 * f0 + fm) / (h * h);
            // closed forms may cancel O(1) terms, so the roundoff floor is at least 4ε
            let noise = 16.0 * f64::EPSILON * (fp.abs() + 2.0 * f0.abs() + fm.abs() + 4.0) / (h * h);
            let slack = tol + noise;
            any_pos |= d > slack;
            any_neg |= d < -slack;
            lo = lo.min(d);
            hi = hi.max(d);
            let exact = self.curvature(t);
            a_pos |= exact > tol;
            a_neg |= exact < -tol;
        }
        let curvature = LogCurvature::from_signs(any_pos, any_neg);
        Ok(LogShape {
            curvature,
            min_second_diff: lo,
            max_second_diff: hi,
            analytic_agrees: curvature == LogCurvature::from_signs(a_pos, a_neg),
            t_max,
            grid_points,
        })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Independence => f.write_str("independence"),
            fam => write!(f, "{fam}(θ={})", self.theta),
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && !t.is_nan() {
        Ok(())
    } else {
        Err(Error::domain(format!("generator argument must be ≥ 0, got {t}")))
    }
}

fn check_u(u: f64) -> Result<()> {
    if u > 0.0 && u <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("copula argument must lie in (0,1], got {u}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(family: Family, theta: f64) -> GeneratorSpec {
        GeneratorSpec::new(family, theta).unwrap()
    }

    fn sample_specs() -> Vec<GeneratorSpec> {
        vec![
            GeneratorSpec::independence(),
            g(Family::Clayton, 0.5),
            g(Family::Clayton, 10.0),
            g(Family::Gumbel, 1.0),
            g(Family::Gumbel, 2.5),
            g(Family::Frank, 0.3),
            g(Family::Frank, 8.0),
            g(Family::AliMikhailHaq, -1.0),
            g(Family::AliMikhailHaq, 0.0),
            g(Family::AliMikhailHaq, 0.9),
            g(Family::GumbelBarnett, 0.2),
            g(Family::GumbelBarnett, 1.0),
            g(Family::GumbelHougaard, 1.5),
            g(Family::GumbelHougaard, 3.0),
        ]
    }

    #[test]
    fn closed_form_values() {
        let c1 = g(Family::Clayton, 1.0);
        assert!((c1.psi(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((c1.phi(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((c1.psi_prime(1.0).unwrap() + 0.25).abs() < 1e-15);
        assert!((c1.copula_eval(&[0.5, 0.5]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let ind = GeneratorSpec::independence();
        assert!((ind.psi_prime(1.0).unwrap() + (-1.0f64).exp()).abs() < 1e-16);
        assert!((ind.copula_eval(&[0.3, 0.5]).unwrap() - 0.15).abs() < 1e-15);
        // exp(5(1-e)) from an arbitrary-precision evaluation
        let gb = g(Family::GumbelBarnett, 0.2);
        let v = gb.psi(1.0).unwrap();
        assert!((v - 1.856_942_336_050_705_2e-4).abs() < 1e-16, "{v}");
    }

    #[test]
    fn boundary_conditions() {
        for s in sample_specs() {
            assert_eq!(s.psi(0.0).unwrap(), 1.0, "{s}");
            assert_eq!(s.phi(1.0).unwrap(), 0.0, "{s}");
            assert!((s.copula_eval(&[0.37, 1.0, 1.0]).unwrap() - 0.37).abs() < 1e-13, "{s}");
            assert_eq!(s.copula_eval(&[1.0, 1.0]).unwrap(), 1.0);
            assert!(s.copula_eval(&[1e-300, 0.9]).unwrap() < 1e-6, "{s}");
            assert!(s.psi(1e200).unwrap() < 1e-6, "{s}");
        }
    }

    #[test]
    fn copula_is_below_minimum() {
        for s in sample_specs() {
            let c = s.copula_eval(&[0.2, 0.7, 0.5]).unwrap();
            assert!(c <= 0.2 + 1e-15, "{s}: {c}");
        }
    }

    #[test]
    fn range_validation() {
        assert!(GeneratorSpec::new(Family::Clayton, 0.0).is_err());
        assert!(GeneratorSpec::new(Family::Gumbel, 0.99).is_err());
        assert!(GeneratorSpec::new(Family::AliMikhailHaq, 1.0).is_err());
        assert!(GeneratorSpec::new(Family::AliMikhailHaq, -1.0).is_ok());
        assert!(GeneratorSpec::new(Family::GumbelBarnett, 1.01).is_err());
        assert!(GeneratorSpec::new(Family::GumbelHougaard, 1.0).is_err());
        assert!(GeneratorSpec::new(Family::Frank, f64::NAN).is_err());
        let c = g(Family::Clayton, 2.0);
        assert!(c.psi(-1.0).is_err());
        assert!(c.phi(0.0).is_err());
        assert!(c.phi(1.1).is_err());
        assert!(c.copula_eval(&[]).is_err());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let s: GeneratorSpec = serde_json::from_str(r#"{"family":"gumbel-barnett","theta":0.2}"#).unwrap();
        assert_eq!(s, g(Family::GumbelBarnett, 0.2));
        let back: GeneratorSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let alias: GeneratorSpec = serde_json::from_str(r#"{"family":"gumbel-table3","theta":2}"#).unwrap();
        assert_eq!(alias.family, Family::Gumbel);
        let ind: GeneratorSpec = serde_json::from_str(r#"{"family":"independence"}"#).unwrap();
        assert_eq!(ind.family, Family::Independence);
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"family":"clayton","theta":-1}"#).is_err());
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"family":"clayton"}"#).is_err());
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"family":"gauss","theta":1}"#).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for s in sample_specs() {
            for &t in &[0.01, 0.3, 1.0, 3.0, 7.0] {
                // Richardson-extrapolated central difference
                let d = |h: f64| (s.psi_raw(t + h) - s.psi_raw(t - h)) / (2.0 * h);
                let h = 1e-4 * t;
                let fd = (4.0 * d(0.5 * h) - d(h)) / 3.0;
                let exact = s.psi_prime_raw(t);
                assert!(exact <= 0.0);
                let rel = (fd - exact).abs() / exact.abs().max(1e-300);
                assert!(rel < 1e-6, "{s} t={t}: {exact} vs {fd}");
            }
        }
    }

    #[test]
    fn curvature_matches_finite_difference() {
        for s in sample_specs() {
            for &t in &[0.05, 0.5, 2.0, 6.0] {
                let h = 1e-4 * t;
                let fd = (s.ln_psi(t + h) - 2.0 * s.ln_psi(t) + s.ln_psi(t - h)) / (h * h);
                let exact = s.curvature(t);
                let err = (fd - exact).abs();
                assert!(err < 1e-4 * exact.abs().max(1.0), "{s} t={t}: {exact} vs {fd}");
            }
        }
    }

    #[test]
    fn ln_psi_matches_log_of_psi() {
        for s in sample_specs() {
            for &t in &[1e-6, 0.1, 1.0, 5.0] {
                if s.psi_raw(t) < 1e-300 {
                    continue;
                }
                let a = s.ln_psi(t);
                let b = s.psi_raw(t).ln();
                assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{s} t={t}");
            }
        }
    }

    #[test]
    fn catalog_log_shapes() {
        let concave = [
            (Family::GumbelBarnett, 0.1),
            (Family::GumbelBarnett, 0.2),
            (Family::GumbelBarnett, 0.5),
            (Family::GumbelBarnett, 1.0),
            (Family::GumbelHougaard, 1.5),
            (Family::GumbelHougaard, 3.0),
            (Family::AliMikhailHaq, -1.0),
            (Family::AliMikhailHaq, -0.5),
        ];
        let convex = [
            (Family::Clayton, 0.5),
            (Family::Clayton, 2.0),
            (Family::Clayton, 10.0),
            (Family::Gumbel, 2.0),
            (Family::Frank, 1.0),
            (Family::Frank, 5.0),
            (Family::AliMikhailHaq, 0.2),
            (Family::AliMikhailHaq, 0.8),
        ];
        for (f, th) in concave {
            let shape = g(f, th).classify_log_shape(50.0, 200).unwrap();
            assert_eq!(shape.curvature, LogCurvature::LogConcave, "{f} {th}");
            assert!(shape.analytic_agrees);
        }
        for (f, th) in convex {
            let shape = g(f, th).classify_log_shape(50.0, 200).unwrap();
            assert_eq!(shape.curvature, LogCurvature::LogConvex, "{f} {th}");
            assert!(shape.analytic_agrees);
        }
        let ind = GeneratorSpec::independence().classify_log_shape(50.0, 200).unwrap();
        assert_eq!(ind.curvature, LogCurvature::Both);
        let g1 = g(Family::Gumbel, 1.0).classify_log_shape(50.0, 200).unwrap();
        assert!(g1.curvature.is_log_convex());
    }

    #[test]
    fn classification_rejects_degenerate_grids() {
        let s = g(Family::Clayton, 1.0);
        assert!(s.classify_log_shape(50.0, 10).is_err());
        assert!(s.classify_log_shape(0.0, 200).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = GeneratorSpec> {
        prop_oneof![
            Just(GeneratorSpec::independence()),
            (0.05f64..20.0).prop_map(|t| g(Family::Clayton, t)),
            (1.0f64..10.0).prop_map(|t| g(Family::Gumbel, t)),
            (0.05f64..30.0).prop_map(|t| g(Family::Frank, t)),
            (-1.0f64..0.99).prop_map(|t| g(Family::AliMikhailHaq, t)),
            (0.01f64..1.0).prop_map(|t| g(Family::GumbelBarnett, t)),
            (1.01f64..6.0).prop_map(|t| g(Family::GumbelHougaard, t)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn roundtrip(s in arb_spec(), u in 1e-6f64..=1.0) {
            let back = s.psi_raw(s.phi_raw(u));
            prop_assert!((back - u).abs() <= 1e-12 * u, "{} u={} back={}", s, u, back);
        }

        #[test]
        fn psi_decreasing(s in arb_spec(), t1 in 0.0f64..60.0, dt in 0.0f64..10.0) {
            prop_assert!(s.psi_raw(t1) >= s.psi_raw(t1 + dt));
        }
    }
}
