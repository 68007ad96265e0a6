//! Replication driver for convergence experiments: paired MC/CVNN runs over a
//! grid of sample sizes, RMSE per method and size, and log-log slope fits.

mod csv_io;
mod integrands;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::estimator::{cvnn_from_stats, cvnn_loo_from_stats, estimate_mc, AuxRule, EstimateRecord, Method};
use crate::nn_index::{cell_stats_mc_with, NnIndex, StatsDepth};
use crate::seed::{derive_seed, role, stable_mix};
use crate::spaces::DistributionSpec;

pub use csv_io::{
    format_float, read_bench_csv, read_records_csv, write_bench_csv, write_records_csv, BenchLine, BENCH_HEADER,
    RECORD_HEADER,
};
pub use integrands::{builtin_integrands, IntegrandSpec, Registry, SpaceKind};

/// Seed of replication `rep`.
pub fn replication_seed(base_seed: u64, rep: usize) -> u64 {
    stable_mix(base_seed, rep as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub methods: Vec<Method>,
    /// Ascending sample sizes.
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub base_seed: u64,
    pub aux: AuxRule,
}

impl BenchConfig {
    fn validate(&self) -> Result<()> {
        if self.reps < 2 {
            return Err(invalid("at least 2 replications are needed"));
        }
        if self.methods.is_empty() {
            return Err(invalid("no methods selected"));
        }
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("n grid must be non-empty and strictly ascending"));
        }
        if self.methods.iter().any(|m| m.needs_aux()) && self.n_grid[0] < 2 {
            return Err(invalid("control-neighbors methods need n >= 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub n: usize,
    pub rmse: f64,
}

/// Ordinary least squares fit of `log10 rmse = intercept + slope · log10 n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub method: Method,
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    pub fits: Vec<SlopeFit>,
    pub reps: usize,
    pub base_seed: u64,
    /// Every individual estimate, ordered by (n, rep, method).
    pub records: Vec<EstimateRecord>,
}

impl BenchResult {
    pub fn rmse(&self, method: Method, n: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.n == n)
            .map(|r| r.rmse)
    }

    pub fn slope(&self, method: Method) -> Option<f64> {
        self.fits.iter().find(|f| f.method == method).map(|f| f.slope)
    }
}

/// Least-squares slope and intercept of `ys` against `xs`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Log10-log10 fit of `values` against `ns`.
pub fn fit_loglog(ns: &[usize], values: &[f64]) -> (f64, f64) {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).log10()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.log10()).collect();
    ols(&xs, &ys)
}

/// Runs a registered integrand.
pub fn run_bench(integrand: &IntegrandSpec, spec: &DistributionSpec, config: &BenchConfig) -> Result<BenchResult> {
    integrand.check_space(spec)?;
    let truth = integrand.true_value(spec).ok_or_else(|| {
        invalid(format!(
            "integrand '{}' has no reference value on this space",
            integrand.label
        ))
    })?;
    let problem = Problem {
        label: integrand.label,
        eval: integrand.evaluator(),
        truth,
        mass: integrand.measure_mass(),
    };
    run_problem(&problem, spec, config)
}

/// An arbitrary integrand with its reference value.
///
/// `mass` rescales the normalized estimate into the units of `truth`.
#[derive(Debug, Clone)]
pub struct Problem<'a, F> {
    pub label: &'a str,
    pub eval: F,
    pub truth: f64,
    pub mass: f64,
}

/// Runs every (n, replication) pair. Replication `r` at size `n` draws its
/// primary sample and auxiliary sample from independent streams derived from
/// `(base_seed, r, n)`, and all methods share the primary sample and its
/// integrand values.
pub fn run_problem<F>(problem: &Problem<'_, F>, spec: &DistributionSpec, config: &BenchConfig) -> Result<BenchResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    spec.validate()?;
    let tasks: Vec<(usize, usize)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.reps).map(move |r| (n, r)))
        .collect();
    let per_task: Vec<Vec<EstimateRecord>> = tasks
        .par_iter()
        .map(|&(n, rep)| replicate(problem, spec, config, n, rep))
        .collect::<Result<_>>()?;
    let records: Vec<EstimateRecord> = per_task.into_iter().flatten().collect();
    Ok(summarize(records, config))
}

fn replicate<F>(
    problem: &Problem<'_, F>,
    spec: &DistributionSpec,
    config: &BenchConfig,
    n: usize,
    rep: usize,
) -> Result<Vec<EstimateRecord>>
where
    F: Fn(&[f64]) -> f64,
{
    let rep_seed = replication_seed(config.base_seed, rep);
    let sample_seed = derive_seed(rep_seed, &[n as u64, role::PRIMARY]);
    let aux_seed = derive_seed(rep_seed, &[n as u64, role::AUXILIARY]);
    let sample = spec.sample(n, sample_seed)?;
    let values = sample.map(&problem.eval);

    let aux_n = config.aux.resolve(n, spec.intrinsic_dim());
    let stats = if config.methods.iter().any(|m| m.needs_aux()) {
        let depth = if config.methods.contains(&Method::CvnnLoo) {
            StatsDepth::Full
        } else {
            StatsDepth::Volumes
        };
        let index = NnIndex::build(sample, spec.natural_metric())?;
        Some(cell_stats_mc_with(&index, spec, &values, aux_n, aux_seed, depth)?)
    } else {
        None
    };

    config
        .methods
        .iter()
        .map(|&method| {
            let (value, used_aux) = match (method, &stats) {
                (Method::Mc, _) => (estimate_mc(&values)?, 0),
                (Method::Cvnn, Some(s)) => (cvnn_from_stats(&values, s)?, aux_n),
                (Method::CvnnLoo, Some(s)) => (cvnn_loo_from_stats(&values, s)?, aux_n),
                _ => unreachable!("statistics computed for every control-neighbors method"),
            };
            Ok(
                EstimateRecord::new(method, n, used_aux, sample_seed, problem.mass * value)
                    .with_labels(spec.label(), spec.ambient_dim(), problem.label)
                    .with_rep(rep)
                    .with_truth(problem.truth),
            )
        })
        .collect()
}

fn summarize(records: Vec<EstimateRecord>, config: &BenchConfig) -> BenchResult {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &method in &config.methods {
        let rmses: Vec<f64> = config
            .n_grid
            .iter()
            .map(|&n| {
                let sq: Vec<f64> = records
                    .iter()
                    .filter(|r| r.method == method && r.n == n)
                    .map(|r| r.abs_error.unwrap_or(f64::NAN).powi(2))
                    .collect();
                (sq.iter().sum::<f64>() / sq.len() as f64).sqrt()
            })
            .collect();
        for (&n, &rmse) in config.n_grid.iter().zip(&rmses) {
            rows.push(BenchRow { method, n, rmse });
        }
        if config.n_grid.len() >= 2 {
            let (slope, intercept) = fit_loglog(&config.n_grid, &rmses);
            fits.push(SlopeFit {
                method,
                slope,
                intercept,
            });
        }
    }
    BenchResult {
        rows,
        fits,
        reps: config.reps,
        base_seed: config.base_seed,
        records,
    }
}
