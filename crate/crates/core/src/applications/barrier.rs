use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::estimator::{cvnn_from_stats, cvnn_loo_from_stats, estimate_mc, EstimateRecord, Method};
use crate::nn_index::{cell_stats_mc_with, NnIndex, StatsDepth};
use crate::seed::{derive_seed, rng_from, role};
use crate::spaces::{simulate_paths, DistributionSpec, MarketModel, MetricKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierKind {
    /// Pays the call payoff only if the path reaches the barrier.
    UpIn,
    /// Pays the call payoff only if the path stays below the barrier.
    UpOut,
}

impl BarrierKind {
    pub fn label(self) -> &'static str {
        match self {
            BarrierKind::UpIn => "up-in",
            BarrierKind::UpOut => "up-out",
        }
    }
}

/// European barrier call. `barrier = f64::INFINITY` makes the barrier unreachable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionContract {
    pub kind: BarrierKind,
    pub strike: f64,
    pub barrier: f64,
    pub maturity: f64,
    pub rate: f64,
}

impl OptionContract {
    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(invalid("strike must be positive"));
        }
        if self.barrier.is_nan() || self.barrier <= 0.0 {
            return Err(invalid("barrier must be positive"));
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(invalid("maturity must be positive"));
        }
        if !self.rate.is_finite() {
            return Err(invalid("rate must be finite"));
        }
        Ok(())
    }

    pub fn discount(&self) -> f64 {
        (-self.rate * self.maturity).exp()
    }
}

/// `(S_T − K)_+`.
pub fn vanilla_payoff(strike: f64, path: &[f64]) -> Result<f64> {
    let last = path.last().ok_or_else(|| invalid("empty path"))?;
    Ok((last - strike).max(0.0))
}

/// Undiscounted payoff; the barrier is monitored on the grid values only.
pub fn payoff(contract: &OptionContract, path: &[f64]) -> Result<f64> {
    let call = vanilla_payoff(contract.strike, path)?;
    let touched = path.iter().any(|&s| s >= contract.barrier);
    let alive = match contract.kind {
        BarrierKind::UpIn => touched,
        BarrierKind::UpOut => !touched,
    };
    Ok(if alive { call } else { 0.0 })
}

fn check_pair(contract: &OptionContract, model: &MarketModel) -> Result<()> {
    contract.validate()?;
    model.validate()?;
    if contract.maturity != model.maturity() {
        return Err(invalid("contract and model maturities differ"));
    }
    Ok(())
}

/// Prices a barrier call from `n_paths` Euler paths of `m_grid` grid points.
///
/// The control-neighbors variants index the paths by Euclidean distance on the
/// path vector and draw `aux_n` auxiliary paths from the same model.
#[allow(clippy::too_many_arguments)]
pub fn price_option(
    contract: &OptionContract,
    model: &MarketModel,
    n_paths: usize,
    m_grid: usize,
    method: Method,
    seed: u64,
    aux_n: usize,
) -> Result<EstimateRecord> {
    check_pair(contract, model)?;
    if method.needs_aux() && n_paths < 2 {
        return Err(invalid("control neighbors need at least 2 paths"));
    }
    let paths = simulate_paths(model, n_paths, m_grid, derive_seed(seed, &[role::PRIMARY]))?;
    let values = paths
        .points()
        .map(|p| payoff(contract, p))
        .collect::<Result<Vec<f64>>>()?;
    let (mean, used_aux) = match method {
        Method::Mc => (estimate_mc(&values)?, 0),
        Method::Cvnn | Method::CvnnLoo => {
            let spec = DistributionSpec::Paths {
                model: model.clone(),
                steps: m_grid,
            };
            let depth = if method == Method::Cvnn {
                StatsDepth::Volumes
            } else {
                StatsDepth::Full
            };
            let index = NnIndex::build(paths, MetricKind::Euclidean)?;
            let aux_seed = derive_seed(seed, &[role::AUXILIARY]);
            let stats = cell_stats_mc_with(&index, &spec, &values, aux_n, aux_seed, depth)?;
            let v = if method == Method::Cvnn {
                cvnn_from_stats(&values, &stats)?
            } else {
                cvnn_loo_from_stats(&values, &stats)?
            };
            (v, aux_n)
        }
    };
    Ok(
        EstimateRecord::new(method, n_paths, used_aux, seed, contract.discount() * mean).with_labels(
            "paths",
            m_grid,
            contract.kind.label(),
        ),
    )
}

/// Large-sample Monte Carlo price with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferencePrice {
    pub price: f64,
    pub std_error: f64,
    pub paths: usize,
}

/// Plain Monte Carlo price from `n_paths` streamed paths, without storing them.
pub fn reference_price(
    contract: &OptionContract,
    model: &MarketModel,
    n_paths: usize,
    m_grid: usize,
    seed: u64,
) -> Result<ReferencePrice> {
    const CHUNK: usize = 65_536;
    check_pair(contract, model)?;
    if m_grid < 2 || n_paths < 2 {
        return Err(invalid("need at least 2 paths and 2 grid points"));
    }
    let chunks = n_paths.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng_from(derive_seed(seed, &[role::CHUNK, c as u64]));
            let mut path = vec![0.0; m_grid];
            let count = CHUNK.min(n_paths - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                model.fill_path(&mut rng, &mut path, None);
                let v = payoff(contract, &path).expect("non-empty path");
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = n_paths as f64;
    let mean = s1 / n;
    let var = (s2 - n * mean * mean) / (n - 1.0);
    let disc = contract.discount();
    Ok(ReferencePrice {
        price: disc * mean,
        std_error: disc * (var.max(0.0) / n).sqrt(),
        paths: n_paths,
    })
}
