use std::io::Write;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::optim::{bisect, golden_section};
use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorSpec};
use crate::mcsim::sample_copula;

pub const DEFAULT_BOOT_N: usize = 200;
pub const COPULA_CANDIDATES: [Family; 3] = [Family::Clayton, Family::Gumbel, Family::Frank];

/// Column ranks over `count + 1`, ties sharing their average rank.
pub fn pseudo_observations(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let count = columns.first().ok_or(Error::Empty("data matrix"))?.len();
    if count < 2 {
        return Err(Error::Data(format!("need at least 2 rows, got {count}")));
    }
    columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            if col.len() != count {
                return Err(Error::LengthMismatch {
                    left: count,
                    right: col.len(),
                });
            }
            if let Some(i) = col.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
            if col.iter().all(|&v| v == col[0]) {
                return Err(Error::Data(format!("column {j} is constant")));
            }
            let ranks = average_ranks(col);
            Ok(ranks.into_iter().map(|r| r / (count as f64 + 1.0)).collect())
        })
        .collect()
}

/// Pseudo-observations of the survival functions, `(count + 1 − rank)/(count + 1)`.
/// Lifetimes coupled through a survival copula `Ĉ` give a sample from `Ĉ`
/// under this transform, whereas [`pseudo_observations`] targets the
/// distribution-function copula.
pub fn survival_pseudo_observations(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out = pseudo_observations(columns)?;
    let count = out[0].len() as f64;
    for col in &mut out {
        for u in col.iter_mut() {
            *u = (count + 1.0 - *u * (count + 1.0)) / (count + 1.0);
        }
    }
    Ok(out)
}

fn average_ranks(col: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..col.len()).collect();
    idx.sort_by(|&a, &b| col[a].total_cmp(&col[b]));
    let mut ranks = vec![0.0; col.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && col[idx[j + 1]] == col[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Number of pairs `i < j` with `v[i] > v[j]`, sorting `v` in place.
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (l, r) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_inversions(l, bl) + count_inversions(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

fn tie_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Kendall's tau-b in `O(n log n)` (Knight's algorithm).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Data("Kendall tau needs at least 2 pairs".into()));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let (mut x_ties, mut joint_ties) = (0u64, 0u64);
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let t = (j - i + 1) as u64;
        x_ties += t * (t - 1) / 2;
        let ys: Vec<f64> = idx[i..=j].iter().map(|&k| y[k]).collect();
        joint_ties += tie_pairs(&ys);
        i = j + 1;
    }

    let mut ys: Vec<f64> = idx.iter().map(|&k| y[k]).collect();
    let mut buf = vec![0.0; n];
    let swaps = count_inversions(&mut ys, &mut buf);
    let y_ties = tie_pairs(&ys);

    let total = (n as u64) * (n as u64 - 1) / 2;
    let denom = ((total - x_ties) as f64 * (total - y_ties) as f64).sqrt();
    if denom == 0.0 {
        return Err(Error::Data("Kendall tau undefined for a constant column".into()));
    }
    let num = total as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * swaps as f64;
    Ok(num / denom)
}

/// Pairwise Kendall taus, row-major `d × d`.
pub fn kendall_tau_matrix(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = columns.len();
    let mut m = vec![vec![1.0; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            let t = kendall_tau(&columns[i], &columns[j])?;
            m[i][j] = t;
            m[j][i] = t;
        }
    }
    Ok(m)
}

fn mean_pairwise_tau(columns: &[Vec<f64>]) -> Result<f64> {
    let d = columns.len();
    if d < 2 {
        return Err(Error::Data("copula fitting needs at least 2 columns".into()));
    }
    let m = kendall_tau_matrix(columns)?;
    let mut sum = 0.0;
    for (i, row) in m.iter().enumerate() {
        sum += row[i + 1..].iter().sum::<f64>();
    }
    Ok(sum / (d * (d - 1) / 2) as f64)
}

/// Adaptive Simpson quadrature.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// `∫₀^θ t/(eᵗ − 1) dt`.
fn debye_integral(theta: f64) -> f64 {
    let f = |t: f64| if t == 0.0 { 1.0 } else { t / t.exp_m1() };
    simpson(&f, 0.0, theta, 1e-14)
}

/// `τ = 1 − 4∫₀^∞ t ψ′(t)² dt`, integrated in `ln t`.
fn tau_by_quadrature(g: &GeneratorSpec) -> f64 {
    let f = |v: f64| {
        let t = v.exp();
        let d = g.psi_prime_raw(t);
        let r = t * t * d * d;
        if r.is_finite() {
            r
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    let mut a = -40.0;
    while a < 60.0 {
        total += simpson(&f, a, a + 2.0, 1e-14);
        a += 2.0;
    }
    1.0 - 4.0 * total
}

/// Kendall's tau of the bivariate copula generated by `g`.
pub fn copula_tau(g: &GeneratorSpec) -> Result<f64> {
    let th = g.theta;
    Ok(match g.family {
        Family::Independence => 0.0,
        Family::Clayton => th / (th + 2.0),
        Family::Gumbel => 1.0 - 1.0 / th,
        Family::Frank => 1.0 - 4.0 / th + 4.0 * debye_integral(th) / (th * th),
        Family::AliMikhailHaq if th == 0.0 => 0.0,
        Family::AliMikhailHaq => 1.0 - 2.0 * (th + (1.0 - th).powi(2) * (-th).ln_1p()) / (3.0 * th * th),
        Family::GumbelBarnett | Family::GumbelHougaard => tau_by_quadrature(g),
    })
}

fn frank_theta(tau: f64) -> Result<f64> {
    let f = |th: f64| {
        copula_tau(&GeneratorSpec {
            family: Family::Frank,
            theta: th,
        })
        .map(|t| t - tau)
    };
    let mut hi = 1.0;
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical(format!("no Frank parameter attains tau {tau}")));
        }
    }
    Ok(bisect(|th| f(th).unwrap_or(f64::NAN), 1e-12, hi, 1e-14))
}

/// Inverts the tau relation of a fitting candidate.
pub fn theta_from_tau(family: Family, tau: f64) -> Result<f64> {
    let out_of_range = |range: &str| {
        Err(Error::Domain(format!(
            "sample tau {tau:.6} is outside the {} range {range}",
            family.name()
        )))
    };
    match family {
        Family::Clayton if tau > 0.0 && tau < 1.0 => Ok(2.0 * tau / (1.0 - tau)),
        Family::Clayton => out_of_range("(0, 1)"),
        Family::Gumbel if (0.0..1.0).contains(&tau) => Ok(1.0 / (1.0 - tau)),
        Family::Gumbel => out_of_range("[0, 1)"),
        Family::Frank if tau > 0.0 && tau < 1.0 => frank_theta(tau),
        Family::Frank => out_of_range("(0, 1)"),
        other => Err(Error::Unsupported(format!(
            "copula fitting supports clayton, gumbel and frank, not {}",
            other.name()
        ))),
    }
}

/// `ln c(u, v)` for the bivariate copula of a fitting candidate.
pub fn ln_copula_density(g: &GeneratorSpec, u: f64, v: f64) -> Result<f64> {
    let th = g.theta;
    let (lu, lv) = (u.ln(), v.ln());
    Ok(match g.family {
        Family::Independence => 0.0,
        Family::Gumbel if th == 1.0 => 0.0,
        Family::Clayton => {
            let s = (-th * lu).exp_m1() + (-th * lv).exp_m1() + 1.0;
            th.ln_1p() - (1.0 + th) * (lu + lv) - (2.0 + 1.0 / th) * s.ln()
        }
        Family::Gumbel => {
            let (x, y) = (-lu, -lv);
            let s = x.powf(th) + y.powf(th);
            let a = s.powf(1.0 / th);
            -a + x + y + (th - 1.0) * (x.ln() + y.ln()) - (2.0 - 1.0 / th) * s.ln() + (a + th - 1.0).ln()
        }
        Family::Frank => {
            let a = -(-th).exp_m1();
            let d = a - (-th * u).exp_m1() * (-th * v).exp_m1();
            (th * a).ln() - th * (u + v) - 2.0 * d.abs().ln()
        }
        other => {
            return Err(Error::Unsupported(format!(
                "no closed-form density for {}",
                other.name()
            )))
        }
    })
}

fn composite_log_likelihood(g: &GeneratorSpec, pseudo: &[Vec<f64>]) -> f64 {
    let d = pseudo.len();
    let mut total = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            for (&u, &v) in pseudo[i].iter().zip(&pseudo[j]) {
                total += ln_copula_density(g, u, v).unwrap_or(f64::NEG_INFINITY);
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    /// Inversion of the sample Kendall tau (averaged over column pairs).
    TauInversion,
    /// Maximum pairwise composite pseudo-likelihood, started at the tau fit.
    PseudoLikelihood,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CopulaFit {
    pub family: Family,
    pub theta: f64,
    pub sample_tau: f64,
    pub method: FitMethod,
    pub log_pseudo_likelihood: Option<f64>,
}

impl CopulaFit {
    pub fn generator(&self) -> Result<GeneratorSpec> {
        GeneratorSpec::new(self.family, self.theta)
    }
}

pub fn fit_copula(family: Family, pseudo: &[Vec<f64>], method: FitMethod) -> Result<CopulaFit> {
    let tau = mean_pairwise_tau(pseudo)?;
    let theta = theta_from_tau(family, tau)?;
    if method == FitMethod::TauInversion {
        return Ok(CopulaFit {
            family,
            theta,
            sample_tau: tau,
            method,
            log_pseudo_likelihood: None,
        });
    }
    // optimize over an unconstrained coordinate around the tau estimate
    let (to, from): (fn(f64) -> f64, fn(f64) -> f64) = match family {
        Family::Gumbel => (|t| (t - 1.0).max(1e-8).ln(), |z| 1.0 + z.exp()),
        _ => (|t| t.ln(), |z| z.exp()),
    };
    let z0 = to(theta);
    let nll = |z: f64| {
        let g = GeneratorSpec { family, theta: from(z) };
        let v = -composite_log_likelihood(&g, pseudo);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (z, v) = golden_section(nll, z0 - 4.0, z0 + 4.0, 1e-10);
    let theta = from(z);
    GeneratorSpec::new(family, theta)?;
    Ok(CopulaFit {
        family,
        theta,
        sample_tau: tau,
        method,
        log_pseudo_likelihood: Some(-v),
    })
}

/// Empirical copula `Cₙ(u) = n⁻¹ Σⱼ 1{Uⱼ ≤ u}` of row-aligned columns.
pub fn empirical_copula(pseudo: &[Vec<f64>], u: &[f64]) -> f64 {
    let n = pseudo[0].len();
    let hits = (0..n)
        .filter(|&r| pseudo.iter().zip(u).all(|(col, &ui)| col[r] <= ui))
        .count();
    hits as f64 / n as f64
}

/// `Sₙ = Σᵢ (Cₙ(Uᵢ) − C_θ(Uᵢ))²` over the pseudo-observations.
pub fn cvm_statistic(g: &GeneratorSpec, pseudo: &[Vec<f64>]) -> Result<f64> {
    let n = pseudo[0].len();
    let mut s = 0.0;
    let mut row = vec![0.0; pseudo.len()];
    for r in 0..n {
        for (x, col) in row.iter_mut().zip(pseudo) {
            *x = col[r];
        }
        let diff = empirical_copula(pseudo, &row) - g.copula_eval(&row)?;
        s += diff * diff;
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub family: Family,
    pub theta: f64,
    pub sample_tau: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub boot_n: usize,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    /// `1.96·√(p(1 − p)/boot_n)`.
    pub noise_band: f64,
}

/// Tau inversion clamped into the family's parameter space, for bootstrap
/// replicates whose sample tau leaves the attainable range.
fn refit_theta(family: Family, pseudo: &[Vec<f64>]) -> Result<f64> {
    let tau = mean_pairwise_tau(pseudo)?.clamp(1e-6, 1.0 - 1e-6);
    let tau = if family == Family::Gumbel { tau.max(0.0) } else { tau };
    theta_from_tau(family, tau)
}

fn replicate_seed(seed: u64, b: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b as u64 + 1);
    rng.next_u64()
}

/// Cramér–von Mises test with a parametric bootstrap that re-estimates θ
/// by tau inversion in every replicate.
pub fn cvm_gof(family: Family, pseudo: &[Vec<f64>], boot_n: usize, seed: u64) -> Result<GofResult> {
    if boot_n < 100 {
        return Err(Error::param(format!("boot_n must be ≥ 100, got {boot_n}")));
    }
    let fit = fit_copula(family, pseudo, FitMethod::TauInversion)?;
    let g = fit.generator()?;
    let statistic = cvm_statistic(&g, pseudo)?;
    let (n, d) = (pseudo[0].len(), pseudo.len());
    let stats = (0..boot_n)
        .into_par_iter()
        .map(|b| -> Result<f64> {
            let batch = sample_copula(&g, d, n, replicate_seed(seed, b))?;
            let cols: Vec<Vec<f64>> = (0..d).map(|j| batch.column(j)).collect();
            let ps = pseudo_observations(&cols)?;
            let gb = GeneratorSpec::new(family, refit_theta(family, &ps)?)?;
            cvm_statistic(&gb, &ps)
        })
        .collect::<Result<Vec<f64>>>()?;
    let exceed = stats.iter().filter(|&&s| s >= statistic).count();
    let p_value = exceed as f64 / boot_n as f64;
    Ok(GofResult {
        family,
        theta: fit.theta,
        sample_tau: fit.sample_tau,
        statistic,
        p_value,
        boot_n,
        seed,
        n,
        d,
        noise_band: 1.96 * (p_value * (1.0 - p_value) / boot_n as f64).sqrt(),
    })
}

/// The candidate with the largest p-value, ties broken by the smaller
/// statistic.
pub fn select_copula(results: &[GofResult]) -> Option<&GofResult> {
    results.iter().max_by(|a, b| {
        a.p_value
            .total_cmp(&b.p_value)
            .then(b.statistic.total_cmp(&a.statistic))
    })
}

/// Estimate, statistic and p-value per candidate copula.
pub fn write_gof_table<W: Write>(results: &[GofResult], mut w: W) -> std::io::Result<()> {
    writeln!(w, "copula,theta,statistic,p_value")?;
    for r in results {
        writeln!(
            w,
            "{},{:.16e},{:.16e},{:.16e}",
            r.family.name(),
            r.theta,
            r.statistic,
            r.p_value
        )?;
    }
    Ok(())
}
