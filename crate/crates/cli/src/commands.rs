use std::fmt;
use std::path::Path;

use failsafe_core::fitlab::{
    cvm_gof, fit_copula, mle_fit, pseudo_observations, rank_models, recommend_subset, select_copula,
    survival_pseudo_observations, write_criteria_table, write_gof_table, CopulaFit, CsvLayout, FitMethod, FitResult, GofResult,
    LifetimeDataset, MarginalFamily, RankedFit, SubsetCandidate, SubsetRecommendation, COPULA_CANDIDATES,
    DEFAULT_BOOT_N,
};
use failsafe_core::grid::linspace;
use failsafe_core::mcsim::{compare_with_analytic, sample_lifetimes};
use failsafe_core::ordering::verify;
use failsafe_core::preorders::{classify, DEFAULT_TOL};
use failsafe_core::systems::write_paired_csv;
use failsafe_core::{presets, Baseline, Error, Family, GeneratorSpec, SemiParamModel, SystemSpec, Theorem};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{emit, emit_json, write_atomic};
use crate::{Cli, Command, CopulaMethod, Orientation};

pub const EXIT_OK: u8 = 0;
pub const EXIT_HYPOTHESIS: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INCONSISTENT: u8 = 3;

const SIMULATE_COUNT: usize = 200_000;
const SIMULATE_POINTS: usize = 20;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::input(e.to_string())
    }
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    let config = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Preorder {
            a,
            a_file,
            b,
            b_file,
            tol,
            out,
        } => {
            let a = read_vector(a.as_deref(), a_file.as_deref(), "a")?;
            let b = read_vector(b.as_deref(), b_file.as_deref(), "b")?;
            let report = classify(&a, &b, tol.unwrap_or(DEFAULT_TOL))?;
            emit_json(out.as_deref(), &report)?;
            Ok(EXIT_OK)
        }
        Command::Curve {
            system,
            paired,
            grid,
            out,
            emit_figures,
        } => {
            let policy = config.policy(&cli.tolerances)?;
            let request = config.grid(&grid);
            if let Some(dir) = emit_figures {
                return emit_figure_data(&dir, request.points.unwrap_or(policy.curve_points));
            }
            let system = system.ok_or_else(|| CliError::input("a system file is required"))?;
            let x = load_system(&system)?;
            let (qlo, qhi) = (policy.quantile_lo, policy.quantile_hi);
            match paired {
                None => {
                    let xs = request.build(x.mixture_range(qlo, qhi)?, policy.curve_points)?;
                    let curve = x.curve(&xs)?;
                    emit(out.as_deref(), |w| curve.write_csv(w))?;
                }
                Some(path) => {
                    let y = load_system(&path)?;
                    let (a0, a1) = x.mixture_range(qlo, qhi)?;
                    let (b0, b1) = y.mixture_range(qlo, qhi)?;
                    let xs = request.build((a0.min(b0), a1.max(b1)), policy.curve_points)?;
                    let (cx, cy) = (x.curve(&xs)?, y.curve(&xs)?);
                    let mut buf = Vec::new();
                    write_paired_csv(&cx, &cy, &mut buf)?;
                    emit(out.as_deref(), |w| w.write_all(&buf))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            theorem,
            system_x,
            system_y,
            out,
        } => {
            let theorem = Theorem::from_id(&theorem)?;
            let policy = config.policy(&cli.tolerances)?;
            let x = load_system(&system_x)?;
            let y = load_system(&system_y)?;
            if x.n != y.n || x.model != y.model || x.generator != y.generator {
                return Err(CliError::input(format!(
                    "systems must share size, model and generator ({} vs {} components)",
                    x.n, y.n
                )));
            }
            match verify(theorem, &x, &y, &policy) {
                Ok(report) => {
                    emit_json(out.as_deref(), &report)?;
                    Ok(if report.overall { EXIT_OK } else { EXIT_HYPOTHESIS })
                }
                Err(Error::Inconsistency { min_gap, report }) => {
                    emit_json(out.as_deref(), &report)?;
                    eprintln!("failsafe: hypotheses hold but dominance fails (min gap {min_gap:e})");
                    Ok(EXIT_INCONSISTENT)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Simulate {
            system,
            count,
            grid,
            out,
            lifetimes,
        } => {
            let seed = config.seed(cli.seed)?;
            let count = count.or(config.count).unwrap_or(SIMULATE_COUNT);
            if count == 0 {
                return Err(CliError::input("--count must be positive"));
            }
            let sys = load_system(&system)?;
            let xs = config
                .grid(&grid)
                .build(sys.mixture_range(0.01, 0.99)?, SIMULATE_POINTS)?;
            let cmp = compare_with_analytic(&sys, &xs, count, seed)?;
            if let Some(path) = lifetimes {
                let m = sample_lifetimes(&sys, count, seed)?;
                write_atomic(&path, |w| m.write_csv(w))?;
            }
            emit(out.as_deref(), |w| {
                writeln!(w, "x,analytic,empirical,abs_diff")?;
                for ((x, a), e) in cmp.xs.iter().zip(&cmp.analytic).zip(&cmp.empirical) {
                    writeln!(w, "{x:.16e},{a:.16e},{e:.16e},{:.16e}", (a - e).abs())?;
                }
                writeln!(w, "max,,,{:.16e}", cmp.max_abs_diff)
            })?;
            Ok(EXIT_OK)
        }
        Command::Fit {
            data,
            boot_n,
            copula_method,
            orientation,
            subsets,
            out_dir,
        } => {
            let settings = FitSettings {
                seed: config.seed(cli.seed)?,
                boot_n: boot_n.or(config.boot_n).unwrap_or(DEFAULT_BOOT_N),
                method: match copula_method {
                    CopulaMethod::Tau => FitMethod::TauInversion,
                    CopulaMethod::PseudoLikelihood => FitMethod::PseudoLikelihood,
                },
                orientation,
                subsets: subsets.as_deref().map(parse_subsets).transpose()?,
                policy: config.policy(&cli.tolerances)?,
            };
            if settings.boot_n < 100 {
                return Err(CliError::input(format!(
                    "--boot-n must be at least 100, got {}",
                    settings.boot_n
                )));
            }
            let ds = LifetimeDataset::from_path(&data)?;
            let (report, fits, gofs) = fit_pipeline(&ds, &settings)?;
            match out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)
                        .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
                    emit_json(Some(&dir.join("report.json")), &report)?;
                    write_atomic(&dir.join("criteria.csv"), |w| write_criteria_table(&fits, w))?;
                    write_atomic(&dir.join("copula_gof.csv"), |w| write_gof_table(&gofs, w))?;
                }
                None => emit_json(None, &report)?,
            }
            Ok(EXIT_OK)
        }
    }
}

fn load_system(path: &Path) -> Result<SystemSpec, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Accepts a JSON array or numbers separated by commas and/or whitespace.
fn parse_vector(text: &str) -> Result<Vec<f64>, CliError> {
    let trimmed = text.trim();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| CliError::input(format!("bad vector: {e}")))?
    } else {
        trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| CliError::input(format!("bad number {s:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(CliError::input("empty vector"));
    }
    Ok(values)
}

fn read_vector(inline: Option<&str>, file: Option<&Path>, name: &str) -> Result<Vec<f64>, CliError> {
    match (inline, file) {
        (Some(s), _) => parse_vector(s),
        (None, Some(p)) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display())))?;
            parse_vector(&text)
        }
        (None, None) => Err(CliError::input(format!("vector {name} is missing"))),
    }
}

/// Writes `<dir>/<preset>/{x,y,paired}.csv` on `points` points of `(lo, hi]`.
fn emit_figure_data(dir: &Path, points: usize) -> Result<u8, CliError> {
    if points < 2 {
        return Err(CliError::input("grid needs at least 2 points"));
    }
    for preset in presets::all() {
        let (lo, hi) = preset.grid;
        let xs = linspace(lo, hi, points + 1)[1..].to_vec();
        let (cx, cy) = (preset.x.curve(&xs)?, preset.y.curve(&xs)?);
        let sub = dir.join(preset.name);
        std::fs::create_dir_all(&sub).map_err(|e| CliError::input(format!("cannot create {}: {e}", sub.display())))?;
        write_atomic(&sub.join("x.csv"), |w| cx.write_csv(w))?;
        write_atomic(&sub.join("y.csv"), |w| cy.write_csv(w))?;
        let mut buf = Vec::new();
        write_paired_csv(&cx, &cy, &mut buf)?;
        write_atomic(&sub.join("paired.csv"), |w| w.write_all(&buf))?;
    }
    Ok(EXIT_OK)
}

fn parse_subsets(text: &str) -> Result<Vec<Vec<String>>, CliError> {
    let groups: Vec<Vec<String>> = text
        .split(';')
        .map(|g| {
            g.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
        })
        .filter(|g| !g.is_empty())
        .collect();
    if groups.len() < 2 {
        return Err(CliError::input("--subsets needs at least two ';'-separated groups"));
    }
    Ok(groups)
}

struct FitSettings {
    seed: u64,
    boot_n: usize,
    method: FitMethod,
    orientation: Orientation,
    subsets: Option<Vec<Vec<String>>>,
    policy: failsafe_core::GridPolicy,
}

#[derive(Debug, Serialize)]
struct FitReport {
    labels: Vec<String>,
    layout: CsvLayout,
    observations: usize,
    seed: u64,
    boot_n: usize,
    marginal: MarginalSection,
    copula: Option<CopulaSection>,
    subsets: Option<SubsetSection>,
}

#[derive(Debug, Serialize)]
struct MarginalSection {
    fits: Vec<FitResult>,
    ranking: Vec<RankedFit>,
    best: MarginalFamily,
}

#[derive(Debug, Serialize)]
struct CopulaSection {
    method: FitMethod,
    orientation: Orientation,
    rows: usize,
    candidates: Vec<CopulaCandidate>,
    selected: Option<Family>,
}

#[derive(Debug, Serialize)]
struct CopulaCandidate {
    family: Family,
    fit: Option<CopulaFit>,
    gof: Option<GofResult>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct SubsetSection {
    shape: f64,
    generator: GeneratorSpec,
    components: Vec<ComponentFit>,
    recommendation: SubsetRecommendation,
}

#[derive(Debug, Serialize)]
struct ComponentFit {
    label: String,
    scale: f64,
    shape: f64,
    theta: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len().is_multiple_of(2) {
        0.5 * (values[m - 1] + values[m])
    } else {
        values[m]
    }
}

fn fit_pipeline(
    ds: &LifetimeDataset,
    s: &FitSettings,
) -> Result<(FitReport, Vec<FitResult>, Vec<GofResult>), CliError> {
    ds.ensure_fittable()?;
    let pooled = ds.pooled();
    let fits = MarginalFamily::ALL
        .iter()
        .map(|&f| mle_fit(f, &pooled))
        .collect::<Result<Vec<_>, _>>()?;
    let ranking = rank_models(&fits)?;
    let marginal = MarginalSection {
        best: ranking[0].fit.family,
        fits: fits.clone(),
        ranking,
    };

    let mut gofs = Vec::new();
    let copula = if ds.dimension() >= 2 {
        let matrix = ds.matrix()?;
        let pseudo = match s.orientation {
            Orientation::Distribution => pseudo_observations(&matrix)?,
            Orientation::Survival => survival_pseudo_observations(&matrix)?,
        };
        let mut candidates = Vec::new();
        for family in COPULA_CANDIDATES {
            let outcome = fit_copula(family, &pseudo, s.method)
                .and_then(|fit| cvm_gof(family, &pseudo, s.boot_n, s.seed).map(|gof| (fit, gof)));
            candidates.push(match outcome {
                Ok((fit, gof)) => {
                    gofs.push(gof.clone());
                    CopulaCandidate {
                        family,
                        fit: Some(fit),
                        gof: Some(gof),
                        error: None,
                    }
                }
                Err(e) => CopulaCandidate {
                    family,
                    fit: None,
                    gof: None,
                    error: Some(e.to_string()),
                },
            });
        }
        Some(CopulaSection {
            method: s.method,
            orientation: s.orientation,
            rows: pseudo[0].len(),
            selected: select_copula(&gofs).map(|g| g.family),
            candidates,
        })
    } else {
        None
    };

    let subsets = match &s.subsets {
        None => None,
        Some(groups) => {
            let selected = copula
                .as_ref()
                .and_then(|c| c.candidates.iter().find(|k| Some(k.family) == c.selected))
                .and_then(|k| k.fit.as_ref())
                .ok_or_else(|| CliError::input("subset comparison needs a fitted copula"))?;
            Some(subset_section(ds, groups, selected.generator()?, &s.policy)?)
        }
    };

    let report = FitReport {
        labels: ds.labels.clone(),
        layout: ds.layout,
        observations: ds.total(),
        seed: s.seed,
        boot_n: s.boot_n,
        marginal,
        copula,
        subsets,
    };
    Ok((report, fits, gofs))
}

/// Per-component Weibull fits with a common (median) shape; each subset
/// becomes a system with `θᵢ = 1/scaleᵢ` under the selected copula.
fn subset_section(
    ds: &LifetimeDataset,
    groups: &[Vec<String>],
    generator: GeneratorSpec,
    policy: &failsafe_core::GridPolicy,
) -> Result<SubsetSection, CliError> {
    let mut components: Vec<ComponentFit> = Vec::new();
    for label in groups.iter().flatten() {
        if components.iter().any(|c| &c.label == label) {
            continue;
        }
        let fit = mle_fit(MarginalFamily::Weibull, ds.component(label)?)?;
        let (scale, shape) = (fit.params[0], fit.params[1]);
        components.push(ComponentFit {
            label: label.clone(),
            scale,
            shape,
            theta: 1.0 / scale,
        });
    }
    let shape = median(&mut components.iter().map(|c| c.shape).collect::<Vec<_>>());
    let model = SemiParamModel::scale(Baseline::Weibull { scale: 1.0, shape });
    let candidates = groups
        .iter()
        .map(|g| {
            let theta = g
                .iter()
                .map(|l| {
                    components
                        .iter()
                        .find(|c| &c.label == l)
                        .map(|c| c.theta)
                        .unwrap_or(f64::NAN)
                })
                .collect();
            Ok(SubsetCandidate {
                label: g.join(","),
                system: SystemSpec::new(model, theta, generator)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let recommendation = recommend_subset(&candidates, policy)?;
    Ok(SubsetSection {
        shape,
        generator,
        components,
        recommendation,
    })
}
