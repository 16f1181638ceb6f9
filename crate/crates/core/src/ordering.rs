//! Stochastic-order verdicts between two systems.
//!
//! The verifiers never conclude dominance from hypotheses alone. Each one
//! evaluates both survival curves, reports the observed relation, and turns
//! "hypotheses hold but the curves disagree" into [`Error::Inconsistency`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::LogShape;
use crate::grid::{linspace, GridPolicy};
use crate::models::{
    baseline_grid, check_dpfr, check_theorem1_condition2, check_theorem2_condition2, ModelKind, ShapeVerdict,
};
use crate::preorders::{holds, PreorderKind, DEFAULT_TOL};
use crate::systems::{span_grid, SurvivalCurve, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    XDominatesY,
    YDominatesX,
    Crossing,
    TiesWithinTol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub relation: Relation,
    /// Extremes of `cx − cy` over the grid.
    pub min_gap: f64,
    pub max_gap: f64,
    /// Brackets `[x_lo, x_hi]` around each significant sign change.
    pub crossings: Vec<[f64; 2]>,
    pub grid_points: usize,
    pub grid_range: [f64; 2],
    pub tol: f64,
    pub crossing_tol: f64,
}

impl DominanceVerdict {
    /// Whether X is at least as reliable as Y.
    pub fn x_dominates_or_ties(&self) -> bool {
        matches!(self.relation, Relation::XDominatesY | Relation::TiesWithinTol)
    }
}

/// Compares `cx` against `cy` pointwise.
///
/// With gap `g = cx − cy`: ties when `|g| ≤ tol` everywhere; dominance when
/// one sign never passes `−tol`. When both signs pass `tol`, a crossing is
/// reported only if both exceed `crossing_tol`; smaller excursions are float
/// chatter and the verdict follows the side whose excursion is larger.
pub fn compare_curves(cx: &SurvivalCurve, cy: &SurvivalCurve, tol: f64, crossing_tol: f64) -> Result<DominanceVerdict> {
    if cx.xs != cy.xs {
        return Err(Error::Grid("curves must share an identical grid".into()));
    }
    if cx.is_empty() {
        return Err(Error::Empty("survival curve"));
    }
    let gaps: Vec<f64> = cx.values.iter().zip(&cy.values).map(|(a, b)| a - b).collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_gap = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut crossings = Vec::new();
    let relation = if min_gap >= -tol && max_gap <= tol {
        Relation::TiesWithinTol
    } else if min_gap >= -tol {
        Relation::XDominatesY
    } else if max_gap <= tol {
        Relation::YDominatesX
    } else if min_gap < -crossing_tol && max_gap > crossing_tol {
        let mut last: Option<(f64, f64)> = None;
        for (&x, &g) in cx.xs.iter().zip(&gaps) {
            if g.abs() <= crossing_tol {
                continue;
            }
            if let Some((lx, lg)) = last {
                if lg.signum() != g.signum() {
                    crossings.push([lx, x]);
                }
            }
            last = Some((x, g));
        }
        Relation::Crossing
    } else if max_gap >= -min_gap {
        Relation::XDominatesY
    } else {
        Relation::YDominatesX
    };
    Ok(DominanceVerdict {
        relation,
        min_gap,
        max_gap,
        crossings,
        grid_points: cx.len(),
        grid_range: [cx.xs[0], cx.xs[cx.len() - 1]],
        tol,
        crossing_tol,
    })
}

/// Whether `cy/cx` is nondecreasing along the grid within `slack`.
pub fn hazard_ratio_monotone(cx: &SurvivalCurve, cy: &SurvivalCurve, slack: f64) -> Result<bool> {
    if cx.xs != cy.xs {
        return Err(Error::Grid("curves must share an identical grid".into()));
    }
    if let Some(i) = cx.values.iter().position(|&v| v <= 0.0) {
        return Err(Error::domain(format!("zero denominator survival at x = {}", cx.xs[i])));
    }
    let ratio: Vec<f64> = cy.values.iter().zip(&cx.values).map(|(y, x)| y / x).collect();
    Ok(ratio.windows(2).all(|w| w[1] >= w[0] - slack))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "t1")]
    PLargerLogConcave,
    #[serde(rename = "t2")]
    ReciprocalLogConvex,
    #[serde(rename = "p-mphrs")]
    Mphrs,
    #[serde(rename = "p-ls")]
    LocationScale,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::PLargerLogConcave => "t1",
            Theorem::ReciprocalLogConvex => "t2",
            Theorem::Mphrs => "p-mphrs",
            Theorem::LocationScale => "p-ls",
        }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "t1" => Ok(Theorem::PLargerLogConcave),
            "t2" => Ok(Theorem::ReciprocalLogConvex),
            "p-mphrs" => Ok(Theorem::Mphrs),
            "p-ls" => Ok(Theorem::LocationScale),
            other => Err(Error::param(format!(
                "unknown theorem id '{other}' (expected t1, t2, p-mphrs, p-ls)"
            ))),
        }
    }

    fn preorder(self) -> PreorderKind {
        match self {
            Theorem::ReciprocalLogConvex => PreorderKind::ReciprocalMajorize,
            _ => PreorderKind::PLarger,
        }
    }

    fn wants_log_concave(self) -> bool {
        self != Theorem::ReciprocalLogConvex
    }
}

/// One named hypothesis with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub theorem: Theorem,
    pub checks: Vec<Check>,
    pub generator_shape: LogShape,
    pub model_shapes: Vec<ShapeVerdict>,
    /// All checks hold.
    pub overall: bool,
    /// Observed relation between the two curves, always evaluated.
    pub dominance: DominanceVerdict,
}

impl ConditionReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Grids shared by one verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyGrids {
    /// Grid for the two survival curves.
    pub curve_xs: Vec<f64>,
    /// x-points for model shape checks.
    pub shape_xs: Vec<f64>,
    /// Parameter grid: log θ for p-larger verifiers, θ for the rm verifier.
    pub param_grid: Vec<f64>,
    pub policy: GridPolicy,
}

impl VerifyGrids {
    /// Grids spanning both systems' mixture quantile ranges and the hull of
    /// both parameter vectors, padded by 5% of its width on each side.
    pub fn default_for(theorem: Theorem, x: &SystemSpec, y: &SystemSpec, policy: &GridPolicy) -> Result<Self> {
        let (ax, bx) = x.mixture_range(policy.quantile_lo, policy.quantile_hi)?;
        let (ay, by) = y.mixture_range(policy.quantile_lo, policy.quantile_hi)?;
        let (lo, hi) = (ax.min(ay), bx.max(by));
        let log_params = theorem != Theorem::ReciprocalLogConvex;
        let vals: Vec<f64> = x
            .theta
            .iter()
            .chain(&y.theta)
            .map(|&t| if log_params { t.ln() } else { t })
            .collect();
        let pmin = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let pmax = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = (0.05 * (pmax - pmin)).max(0.05);
        let mut plo = pmin - pad;
        if !log_params && x.model.kind != ModelKind::Location {
            plo = plo.max(0.5 * pmin);
        }
        Ok(VerifyGrids {
            curve_xs: span_grid(lo, hi, policy.curve_points),
            shape_xs: span_grid(lo.max(f64::MIN_POSITIVE), hi, policy.shape_x_points),
            param_grid: linspace(plo, pmax + pad, policy.param_points),
            policy: policy.clone(),
        })
    }
}

fn shared_structure(x: &SystemSpec, y: &SystemSpec) -> Result<Vec<Check>> {
    if x.n != y.n {
        return Err(Error::Mismatch(format!("systems have {} and {} components", x.n, y.n)));
    }
    Ok(vec![
        Check {
            name: "shared-generator".into(),
            holds: x.generator == y.generator,
            detail: format!("{} vs {}", x.generator, y.generator),
        },
        Check {
            name: "shared-model".into(),
            holds: x.model == y.model,
            detail: format!(
                "{}∘{} vs {}∘{}",
                x.model.kind.name(),
                x.model.baseline.family_name(),
                y.model.kind.name(),
                y.model.baseline.family_name()
            ),
        },
    ])
}

fn shape_check(v: &ShapeVerdict) -> Check {
    Check {
        name: serde_json::to_value(v.property)
            .ok()
            .and_then(|s| s.as_str().map(str::to_string))
            .unwrap_or_default(),
        holds: v.holds,
        detail: format!(
            "worst violation {:.3e} (tol {:.1e}) on {}",
            v.worst_violation, v.tol, v.probe
        ),
    }
}

fn assemble(
    theorem: Theorem,
    x: &SystemSpec,
    y: &SystemSpec,
    grids: &VerifyGrids,
    mut checks: Vec<Check>,
    model_shapes: Vec<ShapeVerdict>,
) -> Result<ConditionReport> {
    let p = &grids.policy;
    let shape =
        x.generator
            .classify_log_shape_with(p.log_shape_t_max, p.log_shape_points, 1e-3, p.classification_tol)?;
    let (gen_ok, want) = if theorem.wants_log_concave() {
        (shape.curvature.is_log_concave(), "log-concave")
    } else {
        (shape.curvature.is_log_convex(), "log-convex")
    };
    checks.push(Check {
        name: format!("generator-{want}"),
        holds: gen_ok,
        detail: format!(
            "{} classified {:?} (second differences in [{:.3e}, {:.3e}])",
            x.generator, shape.curvature, shape.min_second_diff, shape.max_second_diff
        ),
    });
    checks.extend(model_shapes.iter().map(shape_check));
    let order = theorem.preorder();
    let order_ok = holds(order, &x.theta, &y.theta, DEFAULT_TOL)?;
    checks.push(Check {
        name: serde_json::to_value(order)
            .ok()
            .and_then(|s| s.as_str().map(str::to_string))
            .unwrap_or_default(),
        holds: order_ok,
        detail: format!("θX = {:?}, θY = {:?}", x.theta, y.theta),
    });
    let overall = checks.iter().all(|c| c.holds);
    let cx = x.curve(&grids.curve_xs)?;
    let cy = y.curve(&grids.curve_xs)?;
    let dominance = compare_curves(&cx, &cy, p.dominance_tol, p.crossing_tol)?;
    let report = ConditionReport {
        theorem,
        checks,
        generator_shape: shape,
        model_shapes,
        overall,
        dominance,
    };
    if overall && !report.dominance.x_dominates_or_ties() {
        return Err(Error::Inconsistency {
            min_gap: report.dominance.min_gap,
            report: Box::new(report),
        });
    }
    Ok(report)
}

fn pair(v: (ShapeVerdict, ShapeVerdict)) -> Vec<ShapeVerdict> {
    vec![v.0, v.1]
}

/// Log-concave generator, `F̄(x; eᵃ)` decreasing and log-convex in `a`,
/// and `θX ⪰p θY`.
pub fn verify_theorem1(x: &SystemSpec, y: &SystemSpec, grids: &VerifyGrids) -> Result<ConditionReport> {
    let checks = shared_structure(x, y)?;
    let shapes = pair(check_theorem1_condition2(
        &x.model,
        &grids.shape_xs,
        &grids.param_grid,
        grids.policy.shape_tol,
    )?);
    assemble(Theorem::PLargerLogConcave, x, y, grids, checks, shapes)
}

/// Log-convex generator, `F̄(x; θ)` increasing and log-convex in `θ`,
/// and `θX ⪰rm θY`.
pub fn verify_theorem2(x: &SystemSpec, y: &SystemSpec, grids: &VerifyGrids) -> Result<ConditionReport> {
    let checks = shared_structure(x, y)?;
    let shapes = pair(check_theorem2_condition2(
        &x.model,
        &grids.shape_xs,
        &grids.param_grid,
        grids.policy.shape_tol,
    )?);
    assemble(Theorem::ReciprocalLogConvex, x, y, grids, checks, shapes)
}

fn dpfr_verdict(x: &SystemSpec, grids: &VerifyGrids) -> Result<ShapeVerdict> {
    let p = &grids.policy;
    let xs = baseline_grid(&x.model.baseline, p.quantile_lo, p.quantile_hi, p.shape_x_points)?;
    check_dpfr(&x.model.baseline, &xs, p.shape_tol)
}

/// MPHRS systems with common `α ∈ (0,1]` and `λ`: log-concave generator,
/// DPFR baseline and `μX ⪰p μY`.
pub fn verify_prop_mphrs(x: &SystemSpec, y: &SystemSpec, grids: &VerifyGrids) -> Result<ConditionReport> {
    let (ModelKind::Mphrs { alpha, lambda }, ModelKind::Mphrs { alpha: a2, lambda: l2 }) = (x.model.kind, y.model.kind)
    else {
        return Err(Error::Mismatch("both systems must use the MPHRS model".into()));
    };
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param(format!("MPHRS α must lie in (0,1], got {alpha}")));
    }
    if alpha != a2 || lambda != l2 {
        return Err(Error::Mismatch(format!(
            "fixed parameters differ: (α, λ) = ({alpha}, {lambda}) vs ({a2}, {l2})"
        )));
    }
    let checks = shared_structure(x, y)?;
    let shapes = vec![dpfr_verdict(x, grids)?];
    assemble(Theorem::Mphrs, x, y, grids, checks, shapes)
}

/// LS systems with common `λ`: log-concave generator, DPFR baseline and
/// `θX ⪰p θY`. Dominance is judged on the curve grid, which starts above λ.
pub fn verify_prop_ls(x: &SystemSpec, y: &SystemSpec, grids: &VerifyGrids) -> Result<ConditionReport> {
    let (ModelKind::Ls { lambda }, ModelKind::Ls { lambda: l2 }) = (x.model.kind, y.model.kind) else {
        return Err(Error::Mismatch("both systems must use the LS model".into()));
    };
    if lambda != l2 {
        return Err(Error::Mismatch(format!("locations differ: {lambda} vs {l2}")));
    }
    let checks = shared_structure(x, y)?;
    let shapes = vec![dpfr_verdict(x, grids)?];
    let mut g = grids.clone();
    g.curve_xs.retain(|&v| v > lambda);
    if g.curve_xs.is_empty() {
        return Err(Error::Grid(format!("no curve points above λ = {lambda}")));
    }
    assemble(Theorem::LocationScale, x, y, &g, checks, shapes)
}

/// Runs the verifier for `theorem` with default grids.
pub fn verify(theorem: Theorem, x: &SystemSpec, y: &SystemSpec, policy: &GridPolicy) -> Result<ConditionReport> {
    let grids = VerifyGrids::default_for(theorem, x, y, policy)?;
    match theorem {
        Theorem::PLargerLogConcave => verify_theorem1(x, y, &grids),
        Theorem::ReciprocalLogConvex => verify_theorem2(x, y, &grids),
        Theorem::Mphrs => verify_prop_mphrs(x, y, &grids),
        Theorem::LocationScale => verify_prop_ls(x, y, &grids),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurProbe {
    /// Minimum of `(a_p − a_q)(∂_p − ∂_q) F̄_{X₂:ₙ}` over the grid and pairs.
    pub worst: f64,
    pub worst_x: f64,
    pub worst_pair: (usize, usize),
    pub evaluations: usize,
}

/// Finite-difference check of `(a_p − a_q)(∂F̄/∂a_p − ∂F̄/∂a_q) ≥ 0`, where
/// `a = ln θ` and `F̄` is the survival of `X₂:ₙ` at each grid point.
///
/// `pairs = None` probes every `p < q`. The step is `step · max(1, |a_p|)`.
pub fn schur_condition_probe(
    sys: &SystemSpec,
    a_point: &[f64],
    pairs: Option<&[(usize, usize)]>,
    xs: &[f64],
    step: f64,
) -> Result<SchurProbe> {
    if a_point.len() != sys.n {
        return Err(Error::LengthMismatch {
            left: a_point.len(),
            right: sys.n,
        });
    }
    if !(step >= 1e-9) {
        return Err(Error::param(format!(
            "finite-difference step {step:e} is below float resolution (1e-9)"
        )));
    }
    if xs.is_empty() {
        return Err(Error::Empty("probe grid"));
    }
    let all: Vec<(usize, usize)>;
    let pairs = match pairs {
        Some(p) => p,
        None => {
            all = (0..sys.n).flat_map(|p| (p + 1..sys.n).map(move |q| (p, q))).collect();
            &all
        }
    };
    if let Some(&(p, q)) = pairs.iter().find(|(p, q)| *p >= sys.n || *q >= sys.n) {
        return Err(Error::param(format!("pair ({p}, {q}) out of range")));
    }
    let base = sys.with_theta(a_point.iter().map(|a| a.exp()).collect())?;
    let shifted = |i: usize, h: f64| -> Result<SystemSpec> {
        let mut a = a_point.to_vec();
        a[i] += h;
        base.with_theta(a.iter().map(|v| v.exp()).collect())
    };
    let mut partial = vec![vec![0.0; xs.len()]; sys.n];
    for (i, row) in partial.iter_mut().enumerate() {
        let h = step * a_point[i].abs().max(1.0);
        let up = shifted(i, h)?;
        let down = shifted(i, -h)?;
        for (k, &x) in xs.iter().enumerate() {
            row[k] = (up.survival_x2n(x)? - down.survival_x2n(x)?) / (2.0 * h);
        }
    }
    let mut out = SchurProbe {
        worst: f64::INFINITY,
        worst_x: f64::NAN,
        worst_pair: (0, 0),
        evaluations: 0,
    };
    for &(p, q) in pairs {
        for (k, &x) in xs.iter().enumerate() {
            let v = (a_point[p] - a_point[q]) * (partial[p][k] - partial[q][k]);
            out.evaluations += 1;
            if v < out.worst {
                out = SchurProbe {
                    worst: v,
                    worst_x: x,
                    worst_pair: (p, q),
                    evaluations: out.evaluations,
                };
            }
        }
    }
    Ok(out)
}
