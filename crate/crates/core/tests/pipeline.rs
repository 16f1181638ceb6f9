use failsafe_core::fitlab::{
    cvm_gof, fit_copula, mle_fit, pseudo_observations, rank_models, recommend_subset, survival_pseudo_observations,
    FitMethod, LifetimeDataset, MarginalFamily, PairRelation, SubsetCandidate,
};
use failsafe_core::grid::linspace;
use failsafe_core::mcsim::{compare_with_analytic, sample_lifetimes};
use failsafe_core::ordering::compare_curves;
use failsafe_core::preorders::{classify, DEFAULT_TOL};
use failsafe_core::{presets, Baseline, Family, GeneratorSpec, GridPolicy, Relation, SemiParamModel, SystemSpec};

fn clayton_weibull(theta: &[f64]) -> SystemSpec {
    SystemSpec::new(
        SemiParamModel::scale(Baseline::Weibull { scale: 1.0, shape: 3.0 }),
        theta.to_vec(),
        GeneratorSpec::new(Family::Clayton, 2.0).unwrap(),
    )
    .unwrap()
}

fn lifetime_columns(sys: &SystemSpec, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let m = sample_lifetimes(sys, count, seed).unwrap();
    (0..sys.n).map(|j| m.column(j)).collect()
}

#[test]
fn survival_ranks_mirror_distribution_ranks() {
    let cols = lifetime_columns(&clayton_weibull(&[1.0, 2.0, 3.0]), 50, 4);
    let p = pseudo_observations(&cols).unwrap();
    let s = survival_pseudo_observations(&cols).unwrap();
    for (pc, sc) in p.iter().zip(&s) {
        for (u, v) in pc.iter().zip(sc) {
            assert!((u + v - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn simulated_lifetimes_recover_their_survival_copula() {
    let cols = lifetime_columns(&clayton_weibull(&[1.0, 1.5, 2.0, 2.5]), 300, 17);
    let surv = survival_pseudo_observations(&cols).unwrap();
    let fit = fit_copula(Family::Clayton, &surv, FitMethod::TauInversion).unwrap();
    assert!((fit.sample_tau - 0.5).abs() < 0.06, "tau {}", fit.sample_tau);
    assert!((fit.theta - 2.0).abs() < 0.5, "theta {}", fit.theta);

    let right = cvm_gof(Family::Clayton, &surv, 100, 3).unwrap();
    let dist = pseudo_observations(&cols).unwrap();
    let rotated = cvm_gof(Family::Clayton, &dist, 100, 3).unwrap();
    assert!(right.p_value > 0.05, "p {}", right.p_value);
    assert!(rotated.p_value < right.p_value);
}

#[test]
fn marginal_pipeline_prefers_weibull_on_weibull_lifetimes() {
    let cols = lifetime_columns(&clayton_weibull(&[0.5, 0.5]), 200, 8);
    let ds = LifetimeDataset::from_columns(vec!["a".into(), "b".into()], cols).unwrap();
    ds.ensure_fittable().unwrap();
    let pooled = ds.pooled();
    let fits: Vec<_> = MarginalFamily::ALL
        .iter()
        .map(|&f| mle_fit(f, &pooled).unwrap())
        .collect();
    let ranked = rank_models(&fits).unwrap();
    assert_eq!(ranked[0].fit.family, MarginalFamily::Weibull);
    let w = &ranked[0].fit;
    // F̄(x) = exp(-(0.5x)^3): scale 2, shape 3
    assert!((w.params[0] - 2.0).abs() < 0.1, "scale {}", w.params[0]);
    assert!((w.params[1] - 3.0).abs() < 0.4, "shape {}", w.params[1]);
}

#[test]
fn frank_sampler_agrees_with_analytic_survival() {
    let sys = SystemSpec::new(
        SemiParamModel::scale(Baseline::Gamma { shape: 2.0, rate: 1.0 }),
        vec![0.5, 1.0, 1.5, 2.0],
        GeneratorSpec::new(Family::Frank, 4.0).unwrap(),
    )
    .unwrap();
    let cmp = compare_with_analytic(&sys, &linspace(0.2, 4.0, 20), 200_000, 99).unwrap();
    assert!(cmp.max_abs_diff <= 0.009, "{}", cmp.max_abs_diff);
}

#[test]
fn gumbel_barnett_preset_dominates_on_its_grid() {
    let p = presets::gumbel_barnett();
    let xs: Vec<f64> = linspace(p.grid.0, p.grid.1, 1001)[1..].to_vec();
    let v = compare_curves(&p.x.curve(&xs).unwrap(), &p.y.curve(&xs).unwrap(), 1e-10, 1e-8).unwrap();
    assert_eq!(v.relation, Relation::XDominatesY);
    let r = classify(&p.x.theta, &p.y.theta, DEFAULT_TOL).unwrap();
    assert_eq!(r.a_over_b.p_larger, Some(true));
}

#[test]
fn cable_preset_reciprocal_scales_favor_second_group() {
    let p = presets::cable();
    let cands = [
        SubsetCandidate {
            label: "x".into(),
            system: p.x.clone(),
        },
        SubsetCandidate {
            label: "y".into(),
            system: p.y.clone(),
        },
    ];
    let rec = recommend_subset(&cands, &GridPolicy::default()).unwrap();
    // the scale vectors are p-incomparable, but their reciprocals are not
    let scales = |s: &SystemSpec| s.theta.iter().map(|t| 1.0 / t).collect::<Vec<f64>>();
    let raw = classify(&scales(&p.x), &scales(&p.y), DEFAULT_TOL).unwrap();
    assert_eq!(
        (raw.a_over_b.p_larger, raw.b_over_a.p_larger),
        (Some(false), Some(false))
    );
    assert_eq!(rec.comparisons[0].relation, PairRelation::SecondOver);
    assert!(rec.total_order);
    assert_eq!(rec.maximal, vec!["y"]);
    assert!(rec.comparisons[0].hypotheses.is_some());
    assert_eq!(rec.comparisons[0].dominance.relation, Relation::YDominatesX);
}

#[test]
fn system_json_round_trips() {
    for p in presets::all() {
        let text = serde_json::to_string(&p.x).unwrap();
        let back: SystemSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p.x);
    }
}
