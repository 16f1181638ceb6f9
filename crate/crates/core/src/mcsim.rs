//! Monte-Carlo oracle for the analytic survival formulas.
//!
//! Archimedean samples use the frailty construction `Uᵢ = ψ(Eᵢ/V)` with
//! `Eᵢ` i.i.d. unit exponentials and `V` a positive variable whose Laplace
//! transform is `ψ`:
//!
//! | family         | `V`                                                   |
//! |----------------|-------------------------------------------------------|
//! | independence   | `1`                                                   |
//! | Clayton        | `θ·Gamma(1/θ, 1)`                                     |
//! | Gumbel         | positive stable, index `1/θ` (Kanter / CMS)           |
//! | Frank          | logarithmic series, `p = 1 − e^{−θ}` (Kemp)           |
//! | AMH, θ ∈ [0,1) | geometric on `{1,2,…}`, success probability `1 − θ`   |
//!
//! Lifetimes are `Xᵢ = F̄⁻¹(Uᵢ; θᵢ)`, so the sampled copula is the survival
//! copula of `X`, which is the one entering the order-statistic formulas.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64(seed)` with the stream
//! set to the row-block index; blocks of [`BLOCK_ROWS`] rows run in parallel
//! and are concatenated in block order, so output is independent of the
//! thread count.

use std::f64::consts::PI;
use std::io::Write;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorSpec};
use crate::grid::invert_decreasing;
use crate::systems::SystemSpec;

pub const BLOCK_ROWS: usize = 4096;

/// Smallest and largest uniforms emitted.
const U_MIN: f64 = 1e-300;
const U_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy)]
enum Frailty {
    One,
    Gamma(Gamma<f64>, f64),
    Stable(f64),
    LogSeries(f64),
    Geometric(f64),
}

impl Frailty {
    fn for_generator(g: &GeneratorSpec) -> Result<Self> {
        let th = g.theta;
        Ok(match g.family {
            Family::Independence => Frailty::One,
            Family::Clayton => Frailty::Gamma(Gamma::new(1.0 / th, 1.0).map_err(|e| Error::param(e.to_string()))?, th),
            Family::Gumbel if th == 1.0 => Frailty::One,
            Family::Gumbel => Frailty::Stable(1.0 / th),
            Family::Frank => Frailty::LogSeries(th),
            Family::AliMikhailHaq if th == 0.0 => Frailty::One,
            Family::AliMikhailHaq if th > 0.0 => Frailty::Geometric(th),
            _ => {
                return Err(Error::Unsupported(format!(
                    "{g} has no frailty sampler (supported: independence, clayton, gumbel, \
                     frank, ali-mikhail-haq with theta in [0,1)); use the analytic path instead"
                )))
            }
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Frailty::One => 1.0,
            Frailty::Gamma(ref g, th) => th * g.sample(rng),
            Frailty::Stable(alpha) => positive_stable(alpha, rng),
            Frailty::LogSeries(th) => log_series(th, rng) as f64,
            Frailty::Geometric(th) => {
                let u: f64 = rng.sample(Open01);
                1.0 + (u.ln() / th.ln()).floor()
            }
        }
    }
}

/// Positive stable variate with Laplace transform `exp(−s^α)`, `0 < α < 1`.
fn positive_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = PI * rng.sample::<f64, _>(Open01);
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha);
    a * b
}

/// Logarithmic-series variate with `P(V = k) ∝ p^k / k`, `p = 1 − e^{−θ}`.
fn log_series<R: Rng>(theta: f64, rng: &mut R) -> u64 {
    let p = -(-theta).exp_m1();
    let v: f64 = rng.sample(Open01);
    if v > p {
        return 1;
    }
    let u: f64 = rng.sample(Open01);
    let q = -(-theta * u).exp_m1();
    if v < q * q {
        let k = 1.0 + (v.ln() / q.ln()).floor();
        if k.is_finite() && k >= 1.0 {
            k as u64
        } else {
            1
        }
    } else if v > q {
        1
    } else {
        2
    }
}

/// A `count × n` matrix of copula uniforms, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub generator: GeneratorSpec,
    pub uniforms: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.uniforms[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.uniforms.iter().skip(j).step_by(self.n).copied().collect()
    }
}

fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn check_shape(n: usize, count: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("dimension must be ≥ 1"));
    }
    if count == 0 {
        return Err(Error::param("sample count must be ≥ 1"));
    }
    Ok(())
}

pub fn sample_copula(g: &GeneratorSpec, n: usize, count: usize, seed: u64) -> Result<SampleBatch> {
    check_shape(n, count)?;
    let frailty = Frailty::for_generator(g)?;
    let blocks = count.div_ceil(BLOCK_ROWS);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let rows = BLOCK_ROWS.min(count - b * BLOCK_ROWS);
            let mut rng = block_rng(seed, b);
            let mut out = Vec::with_capacity(rows * n);
            for _ in 0..rows {
                let v = frailty.draw(&mut rng);
                for _ in 0..n {
                    let e: f64 = rng.sample(Exp1);
                    out.push(g.psi_raw(e / v).clamp(U_MIN, U_MAX));
                }
            }
            out
        })
        .collect();
    Ok(SampleBatch {
        n,
        count,
        seed,
        generator: *g,
        uniforms: parts.concat(),
    })
}

/// A `count × n` matrix of component lifetimes, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeMatrix {
    pub n: usize,
    pub count: usize,
    pub values: Vec<f64>,
}

impl LifetimeMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || values.is_empty() || !values.len().is_multiple_of(n) {
            return Err(Error::param(format!(
                "{} values do not form rows of width {n}",
                values.len()
            )));
        }
        Ok(LifetimeMatrix {
            n,
            count: values.len() / n,
            values,
        })
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().skip(j).step_by(self.n).copied().collect()
    }

    /// Second-smallest entry of every row.
    pub fn second_smallest(&self) -> Vec<f64> {
        self.rows().map(second_smallest).collect()
    }

    /// CSV with header `x1,…,xn`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.n).map(|i| format!("x{i}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

/// Second-smallest of a slice with at least two entries, by one linear scan.
pub fn second_smallest(row: &[f64]) -> f64 {
    let (mut a, mut b) = (f64::INFINITY, f64::INFINITY);
    for &v in row {
        if v < a {
            b = a;
            a = v;
        } else if v < b {
            b = v;
        }
    }
    b
}

/// Lifetimes `Xᵢ = F̄⁻¹(Uᵢ; θᵢ)` by bisection to `1e−10` relative resolution.
pub fn sample_lifetimes(sys: &SystemSpec, count: usize, seed: u64) -> Result<LifetimeMatrix> {
    let batch = sample_copula(&sys.generator, sys.n, count, seed)?;
    let values = batch
        .uniforms
        .par_chunks(sys.n)
        .flat_map_iter(|row| {
            row.iter()
                .zip(&sys.theta)
                .map(|(&u, &th)| {
                    let m = &sys.model;
                    invert_decreasing(|x| m.survival_raw(x, th), u, m.support_start(th), 1e-10)
                })
                .collect::<Vec<_>>()
        })
        .collect::<Result<Vec<f64>>>()?;
    LifetimeMatrix::new(sys.n, values)
}

/// Fraction of rows whose second-smallest entry exceeds `x`.
pub fn empirical_survival_x2n(lifetimes: &LifetimeMatrix, x: f64) -> f64 {
    let above = lifetimes.rows().filter(|r| second_smallest(r) > x).count();
    above as f64 / lifetimes.count as f64
}

/// Empirical survival of the second-smallest entry on a grid.
pub fn empirical_curve_x2n(lifetimes: &LifetimeMatrix, xs: &[f64]) -> Vec<f64> {
    let mut s = lifetimes.second_smallest();
    s.sort_by(f64::total_cmp);
    let total = s.len() as f64;
    xs.iter()
        .map(|&x| {
            let at_or_below = s.partition_point(|&v| v <= x);
            (s.len() - at_or_below) as f64 / total
        })
        .collect()
}

/// Kolmogorov–Smirnov distance between a sample and a continuous cdf.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value `√(−ln(α/2)/2) / √n`.
pub fn ks_critical(n: usize, level: f64) -> f64 {
    (-(level / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Analytic and empirical `X₂:ₙ` survival on a grid, with the largest gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub xs: Vec<f64>,
    pub analytic: Vec<f64>,
    pub empirical: Vec<f64>,
    pub max_abs_diff: f64,
    pub count: usize,
    pub seed: u64,
}

pub fn compare_with_analytic(sys: &SystemSpec, xs: &[f64], count: usize, seed: u64) -> Result<OracleComparison> {
    let lifetimes = sample_lifetimes(sys, count, seed)?;
    let empirical = empirical_curve_x2n(&lifetimes, xs);
    let analytic = xs.iter().map(|&x| sys.survival_x2n(x)).collect::<Result<Vec<f64>>>()?;
    let max_abs_diff = analytic
        .iter()
        .zip(&empirical)
        .map(|(a, e)| (a - e).abs())
        .fold(0.0, f64::max);
    Ok(OracleComparison {
        xs: xs.to_vec(),
        analytic,
        empirical,
        max_abs_diff,
        count,
        seed,
    })
}
