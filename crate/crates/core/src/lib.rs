//! Reliability of fail-safe ((n-1)-out-of-n) systems with dependent,
//! heterogeneous components.
//!
//! Component lifetimes follow a semi-parametric family `F̄(x; θᵢ)` and are
//! coupled through an Archimedean copula with generator `ψ`. The crate
//! evaluates the survival function of the second-smallest order statistic
//! `X₂:ₙ`, checks the majorization-type sufficient conditions for usual
//! stochastic dominance between two such systems, and audits every verdict
//! against a grid comparison of the survival curves. A Monte-Carlo sampler and
//! a maximum-likelihood / copula goodness-of-fit pipeline round out the
//! toolkit.
//!
//! Module map:
//!
//! - [`preorders`]: majorization, weak super/sub-majorization, p-larger and
//!   reciprocal majorization of parameter vectors.
//! - [`generators`]: Archimedean generators `ψ`, pseudo-inverses `φ`,
//!   derivatives and log-shape classification.
//! - [`models`]: baseline lifetime laws and semi-parametric transforms, plus
//!   the grid shape checks (DFR, DPFR, monotonicity and log-convexity in the
//!   parameter).
//! - [`systems`]: survival of `X₁:ₙ` and `X₂:ₙ`, survival curves, and the
//!   homogeneous lower bounds.
//! - [`ordering`]: curve dominance, hazard-ratio monotonicity, theorem
//!   verifiers and the Schur-condition probe.
//! - [`mcsim`]: frailty sampling of Archimedean copulas and empirical
//!   survival of order statistics.
//! - [`fitlab`]: MLE fitting, AIC/BIC ranking, pseudo-observations, copula
//!   fitting, Cramér-von Mises bootstrap and subset recommendation.
//! - [`presets`]: the worked configurations behind the figure data.

pub mod error;
pub mod fitlab;
pub mod generators;
pub mod grid;
pub mod mcsim;
pub mod models;
pub mod ordering;
pub mod preorders;
pub mod presets;
pub mod systems;

pub use error::{Error, Result};
pub use generators::{Family, GeneratorSpec, LogCurvature, LogShape};
pub use grid::GridPolicy;
pub use models::{Baseline, ModelKind, SemiParamModel, ShapeProperty, ShapeVerdict};
pub use ordering::{ConditionReport, DominanceVerdict, Relation, Theorem};
pub use preorders::{OrderReport, PreorderKind};
pub use systems::{SurvivalCurve, SystemSpec};
