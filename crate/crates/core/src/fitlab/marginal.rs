use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use super::optim::nelder_mead;
use crate::error::{Error, Result};
use crate::models::Baseline;

const OBJECTIVE_TOL: f64 = 1e-10;
const MAX_EVALS: usize = 20_000;
const START_FACTORS: [f64; 5] = [1.0, 0.5, 2.0, 0.7, 1.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginalFamily {
    Exponential,
    Gamma,
    Weibull,
    /// Three-parameter Burr XII: `F̄(x) = (1 + (x/s)^c)^{−k}`.
    Burr,
}

impl MarginalFamily {
    pub const ALL: [MarginalFamily; 4] = [
        MarginalFamily::Exponential,
        MarginalFamily::Gamma,
        MarginalFamily::Weibull,
        MarginalFamily::Burr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MarginalFamily::Exponential => "exponential",
            MarginalFamily::Gamma => "gamma",
            MarginalFamily::Weibull => "weibull",
            MarginalFamily::Burr => "burr",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            MarginalFamily::Exponential => &["rate"],
            MarginalFamily::Gamma => &["shape", "rate"],
            MarginalFamily::Weibull => &["scale", "shape"],
            MarginalFamily::Burr => &["c", "k", "scale"],
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::param(format!("unknown marginal family {s:?}")))
    }
}

impl fmt::Display for MarginalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: MarginalFamily,
    pub params: Vec<f64>,
    pub param_names: Vec<String>,
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
    pub n: usize,
    pub k: usize,
    pub converged: bool,
    pub evaluations: usize,
    /// Log-likelihood at each multi-start initial point.
    pub start_log_likelihoods: Vec<f64>,
    /// Order-sensitive hash of the fitted sample.
    pub data_fingerprint: u64,
}

impl FitResult {
    fn assemble(family: MarginalFamily, params: Vec<f64>, ll: f64, data: &[f64]) -> Self {
        let k = params.len();
        let n = data.len();
        FitResult {
            family,
            param_names: family.param_names().iter().map(|s| s.to_string()).collect(),
            params,
            log_likelihood: ll,
            aic: 2.0 * k as f64 - 2.0 * ll,
            bic: k as f64 * (n as f64).ln() - 2.0 * ll,
            n,
            k,
            converged: true,
            evaluations: 0,
            start_log_likelihoods: Vec::new(),
            data_fingerprint: fingerprint(data),
        }
    }

    /// Unit-scale baseline and scale `s` with `F̄(x) = F̄₀(x/s)`.
    pub fn scale_form(&self) -> (Baseline, f64) {
        let p = &self.params;
        match self.family {
            MarginalFamily::Exponential => (Baseline::Exponential { rate: 1.0 }, 1.0 / p[0]),
            MarginalFamily::Gamma => (Baseline::Gamma { shape: p[0], rate: 1.0 }, 1.0 / p[1]),
            MarginalFamily::Weibull => (
                Baseline::Weibull {
                    scale: 1.0,
                    shape: p[1],
                },
                p[0],
            ),
            MarginalFamily::Burr => (Baseline::Burr { c: p[0], k: p[1] }, p[2]),
        }
    }

    pub fn log_likelihood_at(&self, data: &[f64]) -> f64 {
        log_likelihood(self.family, &self.params, data)
    }
}

fn fingerprint(data: &[f64]) -> u64 {
    // FNV-1a over the IEEE bit patterns
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in data {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

/// Log-likelihood of `data` under `family` with natural parameters.
pub(crate) fn log_likelihood(family: MarginalFamily, p: &[f64], data: &[f64]) -> f64 {
    let n = data.len() as f64;
    match family {
        MarginalFamily::Exponential => n * p[0].ln() - p[0] * data.iter().sum::<f64>(),
        MarginalFamily::Gamma => {
            let (a, b) = (p[0], p[1]);
            let sl: f64 = data.iter().map(|x| x.ln()).sum();
            let s: f64 = data.iter().sum();
            n * (a * b.ln() - ln_gamma(a)) + (a - 1.0) * sl - b * s
        }
        MarginalFamily::Weibull => {
            let (lam, k) = (p[0], p[1]);
            data.iter()
                .map(|&x| {
                    let lz = (x / lam).ln();
                    (k / lam).ln() + (k - 1.0) * lz - (k * lz).exp()
                })
                .sum()
        }
        MarginalFamily::Burr => {
            let (c, k, s) = (p[0], p[1], p[2]);
            let base = (c * k / s).ln();
            data.iter()
                .map(|&x| {
                    let lz = (x / s).ln();
                    base + (c - 1.0) * lz - (k + 1.0) * (c * lz).exp().ln_1p()
                })
                .sum()
        }
    }
}

fn starts(family: MarginalFamily, y: &[f64], cv: f64) -> Vec<Vec<f64>> {
    let k_weibull = cv.powf(-1.086).clamp(0.05, 1e3);
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let med = sorted[sorted.len() / 2];
    START_FACTORS
        .iter()
        .map(|&m| match family {
            MarginalFamily::Exponential => vec![1.0],
            MarginalFamily::Gamma => {
                let a = m / (cv * cv);
                vec![a, a]
            }
            MarginalFamily::Weibull => {
                let k = k_weibull * m;
                vec![1.0 / gamma(1.0 + 1.0 / k), k]
            }
            MarginalFamily::Burr => {
                let kb = m;
                let c = k_weibull;
                let s = med / (2f64.powf(1.0 / kb) - 1.0).powf(1.0 / c);
                vec![c, kb, s]
            }
        })
        .collect()
}

/// Maximum-likelihood fit by multi-started Nelder–Mead on log-parameters.
/// The data are rescaled to unit mean internally and the estimates mapped
/// back.
pub fn mle_fit(family: MarginalFamily, data: &[f64]) -> Result<FitResult> {
    if data.len() < 2 {
        return Err(Error::Data(format!("need at least 2 observations, got {}", data.len())));
    }
    for (i, &v) in data.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositive { index: i, value: v });
        }
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let cv = var.sqrt() / mean;
    if cv < 1e-12 {
        return Err(Error::Data("all observations are equal".into()));
    }

    if family == MarginalFamily::Exponential {
        let ll = -n * (mean.ln() + 1.0);
        let mut fit = FitResult::assemble(family, vec![1.0 / mean], ll, data);
        fit.start_log_likelihoods = vec![ll];
        return Ok(fit);
    }

    let y: Vec<f64> = data.iter().map(|x| x / mean).collect();
    let shift = n * mean.ln();
    let objective = |z: &[f64]| {
        let p: Vec<f64> = z.iter().map(|v| v.exp()).collect();
        -log_likelihood(family, &p, &y)
    };

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    let mut start_lls = Vec::new();
    let mut evaluations = 0;
    for s in starts(family, &y, cv) {
        let z0: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        start_lls.push(-objective(&z0) - shift);
        let m = nelder_mead(objective, &z0, 0.2, OBJECTIVE_TOL, MAX_EVALS);
        evaluations += m.evaluations;
        if !m.value.is_finite() {
            continue;
        }
        let better = best.as_ref().is_none_or(|(_, v, _)| m.value < *v);
        if better {
            best = Some((m.x, m.value, m.converged));
        }
    }
    let Some((z, value, converged)) = best else {
        return Err(Error::NonConvergence(format!(
            "{family}: no start produced a finite likelihood"
        )));
    };
    if !converged {
        return Err(Error::NonConvergence(format!(
            "{family}: simplex did not reach objective tolerance {OBJECTIVE_TOL:e} from any start"
        )));
    }
    let mut p: Vec<f64> = z.iter().map(|v| v.exp()).collect();
    match family {
        MarginalFamily::Gamma => p[1] /= mean,
        MarginalFamily::Weibull => p[0] *= mean,
        MarginalFamily::Burr => p[2] *= mean,
        MarginalFamily::Exponential => unreachable!(),
    }
    let mut fit = FitResult::assemble(family, p, -value - shift, data);
    fit.converged = converged;
    fit.evaluations = evaluations;
    fit.start_log_likelihoods = start_lls;
    Ok(fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFit {
    pub rank: usize,
    pub delta_aic: f64,
    pub delta_bic: f64,
    pub fit: FitResult,
}

/// Orders fits by AIC, then BIC.
pub fn rank_models(results: &[FitResult]) -> Result<Vec<RankedFit>> {
    let first = results.first().ok_or(Error::Empty("fit results"))?;
    for r in results {
        if r.n != first.n || r.data_fingerprint != first.data_fingerprint {
            return Err(Error::Mismatch("fits were computed on different datasets".into()));
        }
    }
    let mut sorted = results.to_vec();
    sorted.sort_by(|a, b| a.aic.total_cmp(&b.aic).then(a.bic.total_cmp(&b.bic)));
    let (aic0, bic0) = (
        sorted[0].aic,
        sorted.iter().map(|f| f.bic).fold(f64::INFINITY, f64::min),
    );
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, fit)| RankedFit {
            rank: i + 1,
            delta_aic: fit.aic - aic0,
            delta_bic: fit.bic - bic0,
            fit,
        })
        .collect())
}

/// AIC and BIC in a criterion-by-family table.
pub fn write_criteria_table<W: Write>(fits: &[FitResult], mut w: W) -> std::io::Result<()> {
    let names: Vec<&str> = fits.iter().map(|f| f.family.name()).collect();
    writeln!(w, "criterion,{}", names.join(","))?;
    for (label, get) in [
        ("aic", (|f: &FitResult| f.aic) as fn(&FitResult) -> f64),
        ("bic", |f| f.bic),
    ] {
        let cells: Vec<String> = fits.iter().map(|f| format!("{:.16e}", get(f))).collect();
        writeln!(w, "{label},{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Weibull};

    fn weibull_sample(scale: f64, shape: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = Weibull::new(scale, shape).unwrap();
        (0..n).map(|_| d.sample(&mut rng)).collect()
    }

    #[test]
    fn exponential_closed_form() {
        let data = [1.0, 2.0, 3.0, 6.0];
        let f = mle_fit(MarginalFamily::Exponential, &data).unwrap();
        assert_eq!(f.params[0], 1.0 / 3.0);
        let ll = log_likelihood(MarginalFamily::Exponential, &f.params, &data);
        assert!((f.log_likelihood - ll).abs() < 1e-12);
    }

    #[test]
    fn information_criteria_identities() {
        let data = weibull_sample(2.0, 1.5, 50, 1);
        for fam in MarginalFamily::ALL {
            let f = mle_fit(fam, &data).unwrap();
            let k = f.k as f64;
            assert_eq!(f.aic, 2.0 * k - 2.0 * f.log_likelihood);
            assert_eq!(f.bic, k * 50f64.ln() - 2.0 * f.log_likelihood);
            assert!((f.log_likelihood_at(&data) - f.log_likelihood).abs() < 1e-8 * f.log_likelihood.abs());
            for &s in &f.start_log_likelihoods {
                assert!(f.log_likelihood >= s - 1e-9, "{fam}");
            }
        }
    }

    #[test]
    fn weibull_recovery() {
        let data = weibull_sample(67.7, 5.0, 108, 7);
        let f = mle_fit(MarginalFamily::Weibull, &data).unwrap();
        assert!((f.params[0] / 67.7 - 1.0).abs() < 0.1, "{:?}", f.params);
        assert!((f.params[1] / 5.0 - 1.0).abs() < 0.1, "{:?}", f.params);
        // stationarity of the scale: Σ(x/λ)^k = n at the MLE
        let s: f64 = data.iter().map(|x| (x / f.params[0]).powf(f.params[1])).sum();
        assert!((s / 108.0 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn gamma_on_exponential_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..400).map(|_| rand_distr::Exp1.sample(&mut rng)).collect();
        let f = mle_fit(MarginalFamily::Gamma, &data).unwrap();
        // SE of the shape MLE at a = 1 is 1/√(n(ψ′(1) − 1)) ≈ 0.0623
        assert!((f.params[0] - 1.0).abs() < 2.0 * 0.0623, "{:?}", f.params);
    }

    #[test]
    fn degenerate_and_bad_data() {
        assert!(matches!(
            mle_fit(MarginalFamily::Weibull, &[2.0; 10]),
            Err(Error::Data(_))
        ));
        assert!(mle_fit(MarginalFamily::Gamma, &[1.0, -2.0, 3.0]).is_err());
    }

    #[test]
    fn ranking() {
        let data = weibull_sample(67.7, 5.0, 108, 11);
        let fits: Vec<FitResult> = MarginalFamily::ALL
            .iter()
            .map(|&f| mle_fit(f, &data).unwrap())
            .collect();
        let ranked = rank_models(&fits).unwrap();
        assert_eq!(ranked[0].fit.family, MarginalFamily::Weibull);
        assert_eq!(ranked[0].delta_aic, 0.0);
        assert!(ranked.windows(2).all(|w| w[0].fit.aic <= w[1].fit.aic));
        let single = rank_models(&fits[..1]).unwrap();
        assert_eq!(single[0].fit, fits[0]);
        let other = mle_fit(MarginalFamily::Exponential, &data[1..]).unwrap();
        assert!(rank_models(&[fits[0].clone(), other]).is_err());
        let mut out = Vec::new();
        write_criteria_table(&fits, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("criterion,exponential,gamma,weibull,burr\naic,"));
    }

    #[test]
    fn burr_recovers_its_own_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (c, k, s) = (3.0, 2.0, 10.0);
        let data: Vec<f64> = (0..2000)
            .map(|_| {
                let u: f64 = rand::Rng::random(&mut rng);
                s * ((1.0 - u).powf(-1.0 / k) - 1.0).powf(1.0 / c)
            })
            .collect();
        let f = mle_fit(MarginalFamily::Burr, &data).unwrap();
        assert!((f.params[0] / c - 1.0).abs() < 0.15, "{:?}", f.params);
        assert!((f.params[1] / k - 1.0).abs() < 0.3, "{:?}", f.params);
    }
}
