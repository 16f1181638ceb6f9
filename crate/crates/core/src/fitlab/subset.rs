use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridPolicy;
use crate::ordering::{compare_curves, verify_theorem1, ConditionReport, DominanceVerdict, Theorem, VerifyGrids};
use crate::preorders::{classify, DEFAULT_TOL};
use crate::systems::SystemSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetCandidate {
    pub label: String,
    pub system: SystemSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairRelation {
    /// p-larger in both directions.
    Tie,
    FirstOver,
    SecondOver,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub first: String,
    pub second: String,
    pub relation: PairRelation,
    /// Hypothesis report for the p-larger direction, when there is one.
    pub hypotheses: Option<ConditionReport>,
    /// Set when every hypothesis held, making the dominance a certificate.
    pub certified: bool,
    /// First system's second-order-statistic survival against the second's.
    pub dominance: DominanceVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRecommendation {
    pub labels: Vec<String>,
    pub comparisons: Vec<PairComparison>,
    /// Candidates not strictly p-dominated by another candidate.
    pub maximal: Vec<String>,
    /// Candidates by how many others they strictly p-dominate.
    pub ranking: Vec<String>,
    pub total_order: bool,
}

fn same_structure(a: &SystemSpec, b: &SystemSpec) -> bool {
    a.n == b.n && a.model == b.model && a.generator == b.generator
}

/// Pairwise p-larger comparison of candidate subsets, with log-concave
/// verifier reports for every ordered pair.
pub fn recommend_subset(candidates: &[SubsetCandidate], policy: &GridPolicy) -> Result<SubsetRecommendation> {
    let first = candidates.first().ok_or(Error::Empty("subset candidates"))?;
    for c in candidates {
        if !same_structure(&first.system, &c.system) {
            return Err(Error::Mismatch(format!(
                "candidate {} differs from {} in size, model or generator",
                c.label, first.label
            )));
        }
    }
    let k = candidates.len();
    let mut beats = vec![vec![false; k]; k];
    let mut comparisons = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let (a, b) = (&candidates[i].system, &candidates[j].system);
            let report = classify(&a.theta, &b.theta, DEFAULT_TOL)?;
            let ab = report.a_over_b.p_larger == Some(true);
            let ba = report.b_over_a.p_larger == Some(true);
            let relation = match (ab, ba) {
                (true, true) => PairRelation::Tie,
                (true, false) => PairRelation::FirstOver,
                (false, true) => PairRelation::SecondOver,
                (false, false) => PairRelation::Incomparable,
            };
            beats[i][j] = ab && !ba;
            beats[j][i] = ba && !ab;

            let grids = VerifyGrids::default_for(Theorem::PLargerLogConcave, a, b, policy)?;
            let hypotheses = match relation {
                PairRelation::FirstOver | PairRelation::Tie => Some(verify_theorem1(a, b, &grids)?),
                PairRelation::SecondOver => Some(verify_theorem1(b, a, &grids)?),
                PairRelation::Incomparable => None,
            };
            let cx = a.curve(&grids.curve_xs)?;
            let cy = b.curve(&grids.curve_xs)?;
            let dominance = compare_curves(&cx, &cy, policy.dominance_tol, policy.crossing_tol)?;
            comparisons.push(PairComparison {
                first: candidates[i].label.clone(),
                second: candidates[j].label.clone(),
                relation,
                certified: hypotheses.as_ref().is_some_and(|h| h.overall),
                hypotheses,
                dominance,
            });
        }
    }
    let labels: Vec<String> = candidates.iter().map(|c| c.label.clone()).collect();
    let maximal = (0..k)
        .filter(|&j| !(0..k).any(|i| beats[i][j]))
        .map(|j| labels[j].clone())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    let wins = |i: usize| beats[i].iter().filter(|&&b| b).count();
    order.sort_by(|&a, &b| wins(b).cmp(&wins(a)).then(a.cmp(&b)));
    let total_order = comparisons.iter().all(|c| c.relation != PairRelation::Incomparable);
    Ok(SubsetRecommendation {
        ranking: order.into_iter().map(|i| labels[i].clone()).collect(),
        labels,
        comparisons,
        maximal,
        total_order,
    })
}
