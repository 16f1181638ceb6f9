//! Data pipeline: marginal maximum likelihood with AIC/BIC ranking,
//! Archimedean copula estimation on pseudo-observations with a
//! Cramér–von Mises bootstrap test, and subset recommendation under the
//! p-larger order.

mod copula;
mod dataset;
mod marginal;
mod optim;
mod subset;

pub use copula::{
    copula_tau, cvm_gof, cvm_statistic, empirical_copula, fit_copula, kendall_tau, kendall_tau_matrix,
    ln_copula_density, pseudo_observations, select_copula, survival_pseudo_observations, theta_from_tau, write_gof_table,
    CopulaFit, FitMethod, GofResult, COPULA_CANDIDATES, DEFAULT_BOOT_N,
};
pub use dataset::{CsvLayout, LifetimeDataset, MIN_FIT_OBSERVATIONS};
pub use marginal::{mle_fit, rank_models, write_criteria_table, FitResult, MarginalFamily, RankedFit};
pub use subset::{recommend_subset, PairComparison, PairRelation, SubsetCandidate, SubsetRecommendation};

/// Reference values for the cable-strength study, checked only when the
/// dataset itself is supplied.
pub const CABLE_MANIFEST: &str = include_str!("../../data/cable_manifest.json");
