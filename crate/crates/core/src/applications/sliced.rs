use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::estimator::{cvnn_from_stats, cvnn_loo_from_stats, estimate_mc, Method};
use crate::nn_index::{cell_stats_mc_with, NnIndex, StatsDepth};
use crate::seed::{derive_seed, rng_from, role};
use crate::spaces::{standard_normal, DistributionSpec, MetricKind};

/// Uniform empirical measure on `len` atoms of R^dim.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    dim: usize,
    atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn from_flat(dim: usize, atoms: Vec<f64>) -> Result<Self> {
        if dim == 0 || atoms.is_empty() || !atoms.len().is_multiple_of(dim) {
            return Err(invalid("atoms must form a non-empty list of equal-length points"));
        }
        Ok(EmpiricalMeasure { dim, atoms })
    }

    pub fn from_rows<P: AsRef<[f64]>>(rows: &[P]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != dim) {
            return Err(invalid("atoms have different dimensions"));
        }
        Self::from_flat(dim, rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect())
    }

    /// `m` atoms drawn from `N(mean, sigma² I)`.
    pub fn gaussian(mean: &[f64], sigma: f64, m: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from(seed);
        let atoms = (0..m)
            .flat_map(|_| {
                mean.iter()
                    .map(|mu| mu + sigma * standard_normal(&mut rng))
                    .collect::<Vec<_>>()
            })
            .collect();
        Self::from_flat(mean.len(), atoms)
    }

    pub fn len(&self) -> usize {
        self.atoms.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> impl Iterator<Item = &[f64]> {
        self.atoms.chunks_exact(self.dim)
    }

    /// Applies `f` to every atom (e.g. a rotation), returning a new measure.
    pub fn map_atoms<F: FnMut(&[f64]) -> Vec<f64>>(&self, f: F) -> Result<Self> {
        let rows: Vec<Vec<f64>> = self.atoms().map(f).collect();
        Self::from_rows(&rows)
    }

    fn project(&self, theta: &[f64]) -> Vec<f64> {
        self.atoms()
            .map(|a| a.iter().zip(theta).map(|(x, t)| x * t).sum())
            .collect()
    }
}

/// `W_p^p` between two uniform empirical measures on the line with the same
/// number of atoms: the mean `p`-th power gap between sorted atoms.
pub fn w1d_pp(xs: &[f64], ys: &[f64], p: f64) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(invalid(format!(
            "need equal non-zero atom counts, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("order p must be >= 1, got {p}")));
    }
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let cost = |d: f64| if p == 2.0 { d * d } else { d.abs().powf(p) };
    Ok(a.iter().zip(&b).map(|(x, y)| cost(x - y)).sum::<f64>() / a.len() as f64)
}

/// Estimates `SW_p^p(P, Q)` from `n_proj` random directions.
///
/// Directions come from the stream `(seed, projections)`; the control-neighbors
/// variants draw their auxiliary directions from `(seed, auxiliary)` and index
/// the directions by great-circle distance.
pub fn sw_estimate(
    p_measure: &EmpiricalMeasure,
    q_measure: &EmpiricalMeasure,
    order: f64,
    n_proj: usize,
    method: Method,
    seed: u64,
    aux_n: usize,
) -> Result<f64> {
    if p_measure.dim() != q_measure.dim() {
        return Err(invalid(format!(
            "measures live in R^{} and R^{}",
            p_measure.dim(),
            q_measure.dim()
        )));
    }
    if p_measure.len() != q_measure.len() {
        return Err(invalid("measures must have the same number of atoms"));
    }
    if n_proj == 0 || (method.needs_aux() && n_proj < 2) {
        return Err(invalid("too few projections"));
    }
    let sphere = DistributionSpec::UniformSphere {
        ambient: p_measure.dim(),
    };
    let directions = sphere.sample(n_proj, derive_seed(seed, &[role::PROJECTIONS]))?;
    let values = directions
        .points()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|theta| w1d_pp(&p_measure.project(theta), &q_measure.project(theta), order))
        .collect::<Result<Vec<f64>>>()?;
    match method {
        Method::Mc => estimate_mc(&values),
        Method::Cvnn | Method::CvnnLoo => {
            let depth = if method == Method::Cvnn {
                StatsDepth::Volumes
            } else {
                StatsDepth::Full
            };
            let index = NnIndex::build(directions, MetricKind::GreatCircle)?;
            let aux_seed = derive_seed(seed, &[role::AUXILIARY]);
            let stats = cell_stats_mc_with(&index, &sphere, &values, aux_n, aux_seed, depth)?;
            if method == Method::Cvnn {
                cvnn_from_stats(&values, &stats)
            } else {
                cvnn_loo_from_stats(&values, &stats)
            }
        }
    }
}

/// Two Gaussian laws `N(m_x, σ_x² I)` and `N(m_y, σ_y² I)` with means drawn from
/// `N(0, I)`, plus their empirical measures.
#[derive(Debug, Clone)]
pub struct GaussianPair {
    pub mean_x: Vec<f64>,
    pub mean_y: Vec<f64>,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub p: EmpiricalMeasure,
    pub q: EmpiricalMeasure,
}

impl GaussianPair {
    pub fn draw(dim: usize, sigma_x: f64, sigma_y: f64, atoms: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from(derive_seed(seed, &[role::ATOMS, 0]));
        let mut mean = || (0..dim).map(|_| standard_normal(&mut rng)).collect::<Vec<f64>>();
        let (mean_x, mean_y) = (mean(), mean());
        Self::with_means(mean_x, mean_y, sigma_x, sigma_y, atoms, seed)
    }

    /// Fresh empirical measures of the same two laws.
    pub fn with_means(
        mean_x: Vec<f64>,
        mean_y: Vec<f64>,
        sigma_x: f64,
        sigma_y: f64,
        atoms: usize,
        seed: u64,
    ) -> Result<Self> {
        let p = EmpiricalMeasure::gaussian(&mean_x, sigma_x, atoms, derive_seed(seed, &[role::ATOMS, 1]))?;
        let q = EmpiricalMeasure::gaussian(&mean_y, sigma_y, atoms, derive_seed(seed, &[role::ATOMS, 2]))?;
        Ok(GaussianPair {
            mean_x,
            mean_y,
            sigma_x,
            sigma_y,
            p,
            q,
        })
    }

    /// Exact `SW_2²` between the two Gaussian laws.
    pub fn sw2_exact(&self) -> f64 {
        gaussian_sw2(&self.mean_x, &self.mean_y, self.sigma_x, self.sigma_y)
    }
}

/// `SW_2²(N(m_x, σ_x² I_q), N(m_y, σ_y² I_q)) = ‖m_x − m_y‖²/q + (σ_x − σ_y)²`.
pub fn gaussian_sw2(mean_x: &[f64], mean_y: &[f64], sigma_x: f64, sigma_y: f64) -> f64 {
    let q = mean_x.len() as f64;
    let gap: f64 = mean_x.iter().zip(mean_y).map(|(a, b)| (a - b).powi(2)).sum();
    gap / q + (sigma_x - sigma_y).powi(2)
}
