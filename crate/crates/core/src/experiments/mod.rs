//! Monte Carlo harness behind every figure: replicated fits, the
//! depth sweep, fitted-density snapshots, θ*/θ̄ solves and the asymptotic
//! variance, written as CSV (one file per table) plus JSON summaries.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{problem_by_name, ExperimentConfig, ExperimentKind, Scale, TrainOverrides};

use crate::asymptotics::{
    build_asymptotics, clt_variance, envelope_hessian_fd, normality_check, AsymptoticReport, CltVariance,
    HistogramBin, NormalityReport,
};
use crate::criterion::{js_divergence, AdversarialProblem};
use crate::densities::{kde, Bandwidth, Density};
use crate::error::{Error, Result};
use crate::families::{neural_pushforward_density, GeneratorFamily};
use crate::numerics::{derive_seed, Matrix, SeededRng};
use crate::solvers::{solve_theta_bar, solve_theta_star, train_gan, FitResult, TrainConfig};

pub const FIT_GRID_POINTS: usize = 512;
const FIT_HISTOGRAM_BINS: usize = 50;
/// Relative step for the direct envelope Hessian.
pub const ENVELOPE_FD_STEP: f64 = 1e-4;

/// Seed of repetition `rep` at sample size `n`.
pub fn run_seed(base: u64, n: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(base, n as u64), rep as u64)
}

/// Draws `n` target points and `n` noise draws from `seed`, then trains.
pub fn fit_once(p: &AdversarialProblem, n: usize, seed: u64, train: &TrainConfig) -> Result<(FitResult, Vec<f64>, Vec<f64>)> {
    let mut rng = SeededRng::new(seed);
    let xs = p.target.sample(&mut rng, n);
    let zs = rng.uniforms(n);
    let cfg = TrainConfig {
        seed,
        ..train.clone()
    };
    let fit = train_gan(p, &xs, &zs, &cfg)?;
    Ok((fit, xs, zs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub model: String,
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub theta_hat: f64,
    pub converged: bool,
    #[serde(skip)]
    pub failure: Option<String>,
}

fn replicate(p: &AdversarialProblem, sizes: &[usize], reps: usize, base: u64, train: &TrainConfig) -> Result<Vec<FitRow>> {
    if p.theta_dim() != 1 {
        return Err(Error::InvalidInput(format!(
            "model `{}` has a {}-dimensional θ; replicated fits need a scalar θ",
            p.name,
            p.theta_dim()
        )));
    }
    let jobs: Vec<(usize, usize)> = sizes.iter().flat_map(|&n| (0..reps).map(move |r| (n, r))).collect();
    let mut rows: Vec<FitRow> = jobs
        .into_par_iter()
        .map(|(n, rep)| {
            let seed = run_seed(base, n, rep);
            let (theta_hat, converged, failure) = match fit_once(p, n, seed, train) {
                Ok((f, _, _)) => (f.theta_hat[0], f.converged, None),
                Err(e) => (f64::NAN, false, Some(e.to_string())),
            };
            FitRow {
                model: p.name.clone(),
                n,
                rep,
                seed,
                theta_hat,
                converged,
                failure,
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.n, r.rep));
    Ok(rows)
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (divisor `m − 1`).
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeSummary {
    pub n: usize,
    pub reps: usize,
    pub failures: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    /// Median of `θ̂ − θ̄` with the population `θ̄`.
    pub median_error: f64,
}

fn summarize(rows: &[FitRow], sizes: &[usize], theta_bar: f64) -> Vec<SizeSummary> {
    sizes
        .iter()
        .map(|&n| {
            let at: Vec<&FitRow> = rows.iter().filter(|r| r.n == n).collect();
            let ok: Vec<f64> = at.iter().filter(|r| r.failure.is_none()).map(|r| r.theta_hat).collect();
            let errs: Vec<f64> = ok.iter().map(|t| t - theta_bar).collect();
            SizeSummary {
                n,
                reps: at.len(),
                failures: at.len() - ok.len(),
                mean: if ok.is_empty() { f64::NAN } else { mean(&ok) },
                sd: sample_sd(&ok),
                median: median(&ok),
                median_error: median(&errs),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub error: String,
}

fn failures(rows: &[FitRow]) -> Vec<Failure> {
    rows.iter()
        .filter_map(|r| {
            r.failure.as_ref().map(|e| Failure {
                n: r.n,
                rep: r.rep,
                seed: r.seed,
                error: e.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyRun {
    pub model: String,
    pub config_hash: String,
    pub rows: Vec<FitRow>,
    pub summaries: Vec<SizeSummary>,
    /// `θ̄` from the population solver.
    pub theta_bar_population: f64,
    /// `θ̄` as the average of `θ̂` at the largest sample size.
    pub theta_bar_largest_n_average: f64,
    pub failures: Vec<Failure>,
}

pub fn run_consistency(cfg: &ExperimentConfig) -> Result<ConsistencyRun> {
    let cfg = cfg.resolved()?;
    let p = problem_by_name(cfg.model_name()?)?;
    let train = cfg.train_config(&p);
    let rows = replicate(&p, cfg.sizes(), cfg.reps(), cfg.seed, &train)?;
    let theta_bar = solve_theta_bar(&p)?.theta_bar[0];
    let largest = *cfg.sizes().last().expect("validated non-empty");
    let top: Vec<f64> = rows
        .iter()
        .filter(|r| r.n == largest && r.failure.is_none())
        .map(|r| r.theta_hat)
        .collect();
    Ok(ConsistencyRun {
        model: p.name.clone(),
        config_hash: cfg.hash(),
        summaries: summarize(&rows, cfg.sizes(), theta_bar),
        failures: failures(&rows),
        theta_bar_population: theta_bar,
        theta_bar_largest_n_average: if top.is_empty() { f64::NAN } else { mean(&top) },
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltRow {
    pub model: String,
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub theta_hat: f64,
    pub s_standardized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltSize {
    pub n: usize,
    pub normality: NormalityReport,
    /// `n·Var(θ̂) / V` over the successful repetitions.
    pub variance_ratio: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltRun {
    pub model: String,
    pub config_hash: String,
    pub theta_bar: f64,
    pub alpha_bar: Vec<f64>,
    pub v: f64,
    pub v_standard_error: f64,
    pub hv: f64,
    pub rows: Vec<CltRow>,
    pub sizes: Vec<CltSize>,
    pub failures: Vec<Failure>,
}

/// Asymptotics at the population equilibrium of a scalar-θ model.
pub fn equilibrium_asymptotics(
    p: &AdversarialProblem,
    mc_samples: usize,
    seed: u64,
) -> Result<(crate::solvers::Equilibrium, AsymptoticReport, CltVariance)> {
    let eq = solve_theta_bar(p)?;
    let report = build_asymptotics(p, &eq.theta_bar, &eq.alpha_bar)?;
    let mut rng = SeededRng::new(derive_seed(seed, u64::MAX));
    let clt = clt_variance(p, &report, mc_samples, &mut rng)?;
    Ok((eq, report.with_variance(&clt), clt))
}

pub fn run_clt(cfg: &ExperimentConfig) -> Result<CltRun> {
    let cfg = cfg.resolved()?;
    let p = problem_by_name(cfg.model_name()?)?;
    let train = cfg.train_config(&p);
    let (eq, report, clt) = equilibrium_asymptotics(&p, cfg.mc_samples.expect("resolved"), cfg.seed)?;
    let theta_bar = eq.theta_bar[0];
    let v = clt.v[(0, 0)];
    let fits = replicate(&p, cfg.sizes(), cfg.reps(), cfg.seed, &train)?;

    let mut rows = Vec::with_capacity(fits.len());
    let mut sizes = Vec::new();
    for &n in cfg.sizes() {
        let at: Vec<&FitRow> = fits.iter().filter(|r| r.n == n).collect();
        let ok: Vec<f64> = at.iter().filter(|r| r.failure.is_none()).map(|r| r.theta_hat).collect();
        let normality = normality_check(&ok, theta_bar, n, v)?;
        let scale = (n as f64 / v).sqrt();
        rows.extend(at.iter().map(|r| CltRow {
            model: r.model.clone(),
            n,
            rep: r.rep,
            seed: r.seed,
            theta_hat: r.theta_hat,
            s_standardized: scale * (r.theta_hat - theta_bar),
        }));
        let sd = sample_sd(&ok);
        sizes.push(CltSize {
            n,
            normality,
            variance_ratio: n as f64 * sd * sd / v,
            failures: at.len() - ok.len(),
        });
    }
    Ok(CltRun {
        model: p.name.clone(),
        config_hash: cfg.hash(),
        theta_bar,
        alpha_bar: eq.alpha_bar,
        v,
        v_standard_error: clt.v_standard_errors[0],
        hv: report.hv[(0, 0)],
        failures: failures(&fits),
        rows,
        sizes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthRow {
    pub gen_depth: usize,
    pub disc_depth: usize,
    pub rep: usize,
    pub seed: u64,
    pub js_estimate: f64,
    pub converged: bool,
    #[serde(skip)]
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthSummary {
    pub gen_depth: usize,
    pub disc_depth: usize,
    pub reps: usize,
    pub failures: usize,
    pub mean_js: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthSweepRun {
    pub config_hash: String,
    pub n: usize,
    pub rows: Vec<DepthRow>,
    pub summary: Vec<DepthSummary>,
}

/// JS between the target and a KDE of `m` generator draws.
pub fn neural_js_estimate(p: &AdversarialProblem, theta: &[f64], m: usize, seed: u64) -> Result<f64> {
    let GeneratorFamily::Mlp(net) = &p.generator else {
        return js_divergence(&p.target, &p.pushforward(theta)?);
    };
    let mut rng = SeededRng::new(derive_seed(seed, 1));
    let q = neural_pushforward_density(net, theta, &mut rng, m)?;
    js_divergence(&p.target, &q)
}

/// Trains every (generator depth, discriminator depth) pair on the same
/// per-repetition data and scores each fit by its JS divergence.
pub fn run_depth_sweep(cfg: &ExperimentConfig) -> Result<DepthSweepRun> {
    let cfg = cfg.resolved()?;
    let n = *cfg.sizes().last().expect("resolved");
    let m = cfg.js_samples.expect("resolved");
    let gens = cfg.gen_depths.clone().expect("resolved");
    let discs = cfg.disc_depths.clone().expect("resolved");
    let mut jobs = Vec::new();
    for &g in &gens {
        for &d in &discs {
            for rep in 0..cfg.reps() {
                jobs.push((g, d, rep));
            }
        }
    }
    let mut rows: Vec<DepthRow> = jobs
        .into_par_iter()
        .map(|(g, d, rep)| -> Result<DepthRow> {
            let p = crate::families::neural_problem(g, d)?;
            let train = cfg.train_config(&p);
            let seed = run_seed(cfg.seed, n, rep);
            let (js, converged, failure) = match fit_once(&p, n, seed, &train)
                .and_then(|(f, _, _)| Ok((neural_js_estimate(&p, &f.theta_hat, m, seed)?, f.converged)))
            {
                Ok((js, c)) => (js, c, None),
                Err(e) => (f64::NAN, false, Some(e.to_string())),
            };
            Ok(DepthRow {
                gen_depth: g,
                disc_depth: d,
                rep,
                seed,
                js_estimate: js,
                converged,
                failure,
            })
        })
        .collect::<Result<_>>()?;
    rows.sort_by_key(|r| (r.gen_depth, r.disc_depth, r.rep));
    let mut summary = Vec::new();
    for &g in &gens {
        for &d in &discs {
            let at: Vec<&DepthRow> = rows.iter().filter(|r| r.gen_depth == g && r.disc_depth == d).collect();
            let ok: Vec<f64> = at.iter().filter(|r| r.failure.is_none()).map(|r| r.js_estimate).collect();
            summary.push(DepthSummary {
                gen_depth: g,
                disc_depth: d,
                reps: at.len(),
                failures: at.len() - ok.len(),
                mean_js: if ok.is_empty() { f64::NAN } else { mean(&ok) },
            });
        }
    }
    Ok(DepthSweepRun {
        config_hash: cfg.hash(),
        n,
        rows,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub x: f64,
    pub p_star: f64,
    pub p_theta_hat: f64,
    pub d_alpha_hat: f64,
    pub p_theta_init: f64,
    pub d_alpha_init: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSnapshot {
    pub model: String,
    pub config_hash: String,
    pub n: usize,
    pub seed: u64,
    pub fit: FitResult,
    pub grid: Vec<GridRow>,
    /// Histogram of the generated sample `G_θ̂(zᵢ)`.
    pub sample_histogram: Vec<HistogramBin>,
    /// Silverman KDE of the generated sample on the grid abscissae.
    pub sample_kde: Vec<f64>,
}

fn model_density(p: &AdversarialProblem, theta: &[f64], m: usize, seed: u64) -> Result<Density> {
    match &p.generator {
        GeneratorFamily::Mlp(net) => {
            let mut rng = SeededRng::new(derive_seed(seed, 2));
            neural_pushforward_density(net, theta, &mut rng, m)
        }
        g => g.pushforward(theta),
    }
}

pub fn run_fit_snapshot(cfg: &ExperimentConfig) -> Result<FitSnapshot> {
    let cfg = cfg.resolved()?;
    let p = problem_by_name(cfg.model_name()?)?;
    let n = *cfg.sizes().last().expect("resolved");
    let m = cfg.js_samples.expect("resolved");
    let seed = run_seed(cfg.seed, n, 0);
    let (fit, _, zs) = fit_once(&p, n, seed, &cfg.train_config(&p))?;
    let fitted = model_density(&p, &fit.theta_hat, m, seed)?;
    let init = model_density(&p, &fit.theta_init, m, seed)?;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in [&p.target, &fitted, &init] {
        lo = lo.min(d.quantile(1e-3)?);
        hi = hi.max(d.quantile(1.0 - 1e-3)?);
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let step = (hi - lo) / (FIT_GRID_POINTS - 1) as f64;
    let disc = &p.discriminator;
    let grid: Vec<GridRow> = (0..FIT_GRID_POINTS)
        .map(|k| {
            let x = lo + k as f64 * step;
            GridRow {
                x,
                p_star: p.target.pdf(x),
                p_theta_hat: fitted.pdf(x),
                d_alpha_hat: disc.apply(&fit.alpha_hat, x),
                p_theta_init: init.pdf(x),
                d_alpha_init: disc.apply(&fit.alpha_init, x),
            }
        })
        .collect();

    let sample: Vec<f64> = zs.iter().map(|&z| p.generator.apply(&fit.theta_hat, z)).collect();
    let width = (hi - lo) / FIT_HISTOGRAM_BINS as f64;
    let mut sample_histogram: Vec<HistogramBin> = (0..FIT_HISTOGRAM_BINS)
        .map(|k| HistogramBin {
            lo: lo + k as f64 * width,
            hi: lo + (k + 1) as f64 * width,
            count: 0,
        })
        .collect();
    for &y in &sample {
        if (lo..=hi).contains(&y) {
            let k = (((y - lo) / width) as usize).min(FIT_HISTOGRAM_BINS - 1);
            sample_histogram[k].count += 1;
        }
    }
    let sample_kde = match kde(&sample, Bandwidth::Silverman) {
        Ok(k) => {
            let d = Density::Kde(k);
            grid.iter().map(|g| d.pdf(g.x)).collect()
        }
        Err(Error::DegenerateSample) => vec![f64::NAN; grid.len()],
        Err(e) => return Err(e),
    };
    Ok(FitSnapshot {
        model: p.name.clone(),
        config_hash: cfg.hash(),
        n,
        seed,
        fit,
        grid,
        sample_histogram,
        sample_kde,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaStarRun {
    pub model: String,
    pub config_hash: String,
    pub theta_star: f64,
    pub js_theta_star: f64,
    pub theta_bar: f64,
    pub js_theta_bar: f64,
    /// `JS(p*‖p_θ̄) − JS(p*‖p_θ*)`.
    pub gap: f64,
}

pub fn run_theta_star(cfg: &ExperimentConfig) -> Result<ThetaStarRun> {
    let cfg = cfg.resolved()?;
    let p = problem_by_name(cfg.model_name()?)?;
    let star = solve_theta_star(&p)?;
    let bar = solve_theta_bar(&p)?;
    let js_bar = js_divergence(&p.target, &p.pushforward(&bar.theta_bar)?)?;
    Ok(ThetaStarRun {
        model: p.name.clone(),
        config_hash: cfg.hash(),
        theta_star: star.theta_star[0],
        js_theta_star: star.js,
        theta_bar: bar.theta_bar[0],
        js_theta_bar: js_bar,
        gap: js_bar - star.js,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRun {
    pub model: String,
    pub config_hash: String,
    pub report: AsymptoticReport,
    pub clt: CltVariance,
    /// Hessian of `V(θ)` at `θ̄` by differences of the re-solved inner problem.
    pub hv_direct: Matrix,
    /// Largest entrywise relative gap between `hv` and `hv_direct`.
    pub hv_rel_err: f64,
}

pub fn run_variance(cfg: &ExperimentConfig) -> Result<VarianceRun> {
    let cfg = cfg.resolved()?;
    let p = problem_by_name(cfg.model_name()?)?;
    let (eq, report, clt) = equilibrium_asymptotics(&p, cfg.mc_samples.expect("resolved"), cfg.seed)?;
    let hv_direct = envelope_hessian_fd(&p, &eq.theta_bar, &eq.alpha_bar, ENVELOPE_FD_STEP)?;
    let scale = hv_direct.max_abs().max(f64::MIN_POSITIVE);
    let hv_rel_err = report.hv.sub(&hv_direct)?.max_abs() / scale;
    Ok(VarianceRun {
        model: p.name.clone(),
        config_hash: cfg.hash(),
        report,
        clt,
        hv_direct,
        hv_rel_err,
    })
}

/// Writes `# config_hash=<hash>`, the header and the rows.
pub fn write_csv<T: Serialize>(path: &Path, config_hash: &str, rows: &[T]) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "# config_hash={config_hash}")?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file)?;
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    config_hash: String,
    wall_time_s: f64,
    result: T,
}

fn summary<'a, T: Serialize>(config: &'a ExperimentConfig, start: Instant, result: T) -> Summary<'a, T> {
    Summary {
        config,
        config_hash: config.hash(),
        wall_time_s: start.elapsed().as_secs_f64(),
        result,
    }
}

fn slug(model: &str) -> String {
    model.replace(['/', ' '], "_")
}

/// Runs the configured experiment and writes its files into `out`.
/// Returns the paths written.
pub fn execute(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let resolved = cfg.resolved()?;
    std::fs::create_dir_all(out)?;
    let start = Instant::now();
    let hash = resolved.hash();
    let mut written = Vec::new();
    let mut put = |name: String| {
        let path = out.join(name);
        written.push(path.clone());
        path
    };
    match resolved.experiment {
        ExperimentKind::Consistency => {
            let r = run_consistency(&resolved)?;
            write_csv(&put(format!("consistency_{}.csv", slug(&r.model))), &hash, &r.rows)?;
            #[derive(Serialize)]
            struct S<'a> {
                model: &'a str,
                theta_bar_population: f64,
                theta_bar_largest_n_average: f64,
                summaries: &'a [SizeSummary],
                failures: &'a [Failure],
            }
            let s = S {
                model: &r.model,
                theta_bar_population: r.theta_bar_population,
                theta_bar_largest_n_average: r.theta_bar_largest_n_average,
                summaries: &r.summaries,
                failures: &r.failures,
            };
            write_json(&put(format!("consistency_{}_summary.json", slug(&r.model))), &summary(&resolved, start, s))?;
        }
        ExperimentKind::Clt => {
            let r = run_clt(&resolved)?;
            write_csv(&put(format!("clt_{}.csv", slug(&r.model))), &hash, &r.rows)?;
            #[derive(Serialize)]
            struct HistRow {
                n: usize,
                lo: f64,
                hi: f64,
                count: usize,
            }
            let hist: Vec<HistRow> = r
                .sizes
                .iter()
                .flat_map(|s| {
                    s.normality.histogram.iter().map(move |b| HistRow {
                        n: s.n,
                        lo: b.lo,
                        hi: b.hi,
                        count: b.count,
                    })
                })
                .collect();
            write_csv(&put(format!("clt_{}_histogram.csv", slug(&r.model))), &hash, &hist)?;
            write_json(&put(format!("clt_{}_summary.json", slug(&r.model))), &summary(&resolved, start, &r))?;
        }
        ExperimentKind::DepthSweep => {
            let r = run_depth_sweep(&resolved)?;
            write_csv(&put("depth_sweep.csv".into()), &hash, &r.rows)?;
            write_csv(&put("depth_sweep_summary.csv".into()), &hash, &r.summary)?;
            let failed: Vec<_> = r
                .rows
                .iter()
                .filter_map(|x| x.failure.as_ref().map(|e| (x.gen_depth, x.disc_depth, x.rep, e)))
                .collect();
            write_json(&put("depth_sweep_summary.json".into()), &summary(&resolved, start, (&r.summary, failed)))?;
        }
        ExperimentKind::Fit => {
            let r = run_fit_snapshot(&resolved)?;
            write_csv(&put(format!("fit_{}.csv", slug(&r.model))), &hash, &r.grid)?;
            write_json(&put(format!("fit_{}.json", slug(&r.model))), &summary(&resolved, start, &r))?;
        }
        ExperimentKind::ThetaStar => {
            let r = run_theta_star(&resolved)?;
            write_json(&put(format!("theta_star_{}.json", slug(&r.model))), &summary(&resolved, start, &r))?;
        }
        ExperimentKind::Variance => {
            let r = run_variance(&resolved)?;
            write_json(&put(format!("variance_{}.json", slug(&r.model))), &summary(&resolved, start, &r))?;
        }
    }
    Ok(written)
}
