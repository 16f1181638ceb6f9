//! The worked configurations used for figure data and regression checks.

use crate::generators::{Family, GeneratorSpec};
use crate::models::{Baseline, SemiParamModel};
use crate::systems::SystemSpec;

/// A named pair of systems compared on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub x: SystemSpec,
    pub y: SystemSpec,
    pub grid: (f64, f64),
}

fn pair(gen: GeneratorSpec, model: SemiParamModel, tx: &[f64], ty: &[f64]) -> (SystemSpec, SystemSpec) {
    let build = |t: &[f64]| SystemSpec::new(model, t.to_vec(), gen).expect("preset parameters are valid");
    (build(tx), build(ty))
}

/// Gumbel–Barnett θ = 0.2, Scale∘ExpWeibull(0.9, 0.9), n = 5.
pub fn gumbel_barnett() -> Preset {
    let (x, y) = pair(
        GeneratorSpec::new(Family::GumbelBarnett, 0.2).expect("valid"),
        SemiParamModel::scale(Baseline::ExpWeibull { alpha: 0.9, beta: 0.9 }),
        &[0.12, 0.28, 0.51, 0.62, 0.73],
        &[0.21, 0.42, 0.73, 0.89, 0.92],
    );
    Preset {
        name: "gumbel-barnett",
        x,
        y,
        grid: (0.0, 10.0),
    }
}

/// Clayton θ = 10, Scale∘Weibull(1, 0.9), n = 5.
pub fn clayton_crossing() -> Preset {
    let (x, y) = pair(
        GeneratorSpec::new(Family::Clayton, 10.0).expect("valid"),
        SemiParamModel::scale(Baseline::Weibull { scale: 1.0, shape: 0.9 }),
        &[0.13, 0.31, 0.49, 0.61, 0.72],
        &[0.22, 0.41, 0.71, 0.88, 0.92],
    );
    Preset {
        name: "clayton-crossing",
        x,
        y,
        grid: (0.0, 10.0),
    }
}

/// Per-wire Weibull scales 341.3373… against 340.3877…, Clayton θ = 1.0822,
/// unit-scale Weibull of shape 67.739 with `θᵢ = 1/scaleᵢ`.
pub fn cable() -> Preset {
    let inv = |v: &[f64]| v.iter().map(|s| 1.0 / s).collect::<Vec<f64>>();
    let (x, y) = pair(
        GeneratorSpec::new(Family::Clayton, 1.0822).expect("valid"),
        SemiParamModel::scale(Baseline::Weibull {
            scale: 1.0,
            shape: 67.739,
        }),
        &inv(&[341.3373, 341.6547, 342.1098, 343.2238]),
        &inv(&[340.3877, 342.6283, 344.6258, 345.1538]),
    );
    Preset {
        name: "cable",
        x,
        y,
        grid: (320.0, 360.0),
    }
}

pub fn all() -> Vec<Preset> {
    vec![gumbel_barnett(), clayton_crossing(), cable()]
}
