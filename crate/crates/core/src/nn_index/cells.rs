//! Voronoi statistics: degrees, cell volumes, cumulative leave-one-out
//! volumes, and the integrals of the 1-NN interpolant and its leave-one-out
//! variants.

use rayon::prelude::*;

use super::{degrees_from, KBest, NnIndex};
use crate::error::{invalid, Result};
use crate::seed::{derive_seed, rng_from, role};
use crate::spaces::{DistributionSpec, MetricKind, Sample};

/// Auxiliary points drawn per RNG stream.
const AUX_CHUNK: usize = 4096;
/// Upper bound on the number of partial accumulators. Fixed so that results do
/// not depend on the worker count.
const MAX_GROUPS: usize = 64;

/// How much of [`CellStats`] to estimate from the auxiliary sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsDepth {
    /// Volumes and the interpolant integral only (one NN query per point).
    Volumes,
    /// Also cumulative volumes and leave-one-out integrals (two NN per point).
    Full,
}

/// Per-point Voronoi statistics of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    /// Leave-one-out nearest neighbor of each point.
    pub loo_nn: Vec<usize>,
    /// How many other points have each point as leave-one-out neighbor.
    pub degrees: Vec<usize>,
    /// Measure of each Voronoi cell.
    pub volumes: Vec<f64>,
    /// Sum over `i != j` of the volume of cell `j` once point `i` is removed.
    pub cum_volumes: Option<Vec<f64>>,
    /// Integral of the 1-NN interpolant of the values.
    pub interp_integral: f64,
    /// Integral of each leave-one-out interpolant.
    pub loo_integrals: Option<Vec<f64>>,
    /// Auxiliary sample size; 0 when computed exactly.
    pub aux_count: usize,
}

impl CellStats {
    pub fn len(&self) -> usize {
        self.volumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volumes.is_empty()
    }
}

#[derive(Debug, Clone)]
struct Tally {
    first: Vec<u64>,
    second: Vec<u64>,
    /// Sum of the values at the second neighbor, per first neighbor.
    second_values: Vec<f64>,
}

impl Tally {
    fn new(n: usize, depth: StatsDepth) -> Self {
        let m = if depth == StatsDepth::Full { n } else { 0 };
        Tally {
            first: vec![0; n],
            second: vec![0; m],
            second_values: vec![0.0; m],
        }
    }

    fn absorb(&mut self, other: &Tally) {
        self.first.iter_mut().zip(&other.first).for_each(|(a, b)| *a += b);
        self.second.iter_mut().zip(&other.second).for_each(|(a, b)| *a += b);
        self.second_values
            .iter_mut()
            .zip(&other.second_values)
            .for_each(|(a, b)| *a += b);
    }
}

/// Monte Carlo estimate of all cell statistics from `aux_n` fresh draws of `spec`.
pub fn cell_stats_mc(
    index: &NnIndex,
    spec: &DistributionSpec,
    values: &[f64],
    aux_n: usize,
    seed: u64,
) -> Result<CellStats> {
    cell_stats_mc_with(index, spec, values, aux_n, seed, StatsDepth::Full)
}

/// As [`cell_stats_mc`], limited to `depth`.
///
/// Auxiliary point `t` belongs to chunk `t / 4096`, whose generator is seeded
/// from `(seed, chunk)`. The output is a function of the inputs only.
pub fn cell_stats_mc_with(
    index: &NnIndex,
    spec: &DistributionSpec,
    values: &[f64],
    aux_n: usize,
    seed: u64,
    depth: StatsDepth,
) -> Result<CellStats> {
    index.check_values(values)?;
    spec.validate()?;
    if aux_n == 0 {
        return Err(invalid("auxiliary sample size must be at least 1"));
    }
    if spec.ambient_dim() != index.dim() {
        return Err(invalid(format!(
            "distribution '{}' draws points of dimension {}, index holds dimension {}",
            spec.label(),
            spec.ambient_dim(),
            index.dim()
        )));
    }
    if index.metric() == MetricKind::GreatCircle && !matches!(spec, DistributionSpec::UniformSphere { .. }) {
        return Err(invalid("great-circle index needs a sphere auxiliary law"));
    }

    let n = index.len();
    let chunks = aux_n.div_ceil(AUX_CHUNK);
    let groups = chunks.min(MAX_GROUPS);
    let partials: Vec<Tally> = (0..groups)
        .into_par_iter()
        .map(|g| {
            let mut tally = Tally::new(n, depth);
            let mut point = vec![0.0; spec.ambient_dim()];
            let mut best = KBest::new(if depth == StatsDepth::Full { 2 } else { 1 });
            for c in (g * chunks / groups)..((g + 1) * chunks / groups) {
                let mut rng = rng_from(derive_seed(seed, &[role::CHUNK, c as u64]));
                let count = AUX_CHUNK.min(aux_n - c * AUX_CHUNK);
                for _ in 0..count {
                    spec.fill_point(&mut rng, &mut point);
                    index.search(&point, &mut best);
                    let items = best.items();
                    let j = items[0].1 as usize;
                    tally.first[j] += 1;
                    if depth == StatsDepth::Full {
                        let k = items[1].1 as usize;
                        tally.second[k] += 1;
                        tally.second_values[j] += values[k];
                    }
                }
            }
            tally
        })
        .collect();

    let mut total = Tally::new(n, depth);
    for p in &partials {
        total.absorb(p);
    }

    let big_n = aux_n as f64;
    let volumes: Vec<f64> = total.first.iter().map(|&c| c as f64 / big_n).collect();
    let weighted: f64 = total.first.iter().zip(values).map(|(&c, v)| c as f64 * v).sum();
    let interp_integral = weighted / big_n;

    let (cum_volumes, loo_integrals) = match depth {
        StatsDepth::Volumes => (None, None),
        StatsDepth::Full => {
            let cum = volumes
                .iter()
                .zip(&total.second)
                .map(|(v, &c2)| (n - 1) as f64 * v + c2 as f64 / big_n)
                .collect();
            let loo = (0..n)
                .map(|i| {
                    let shift = total.second_values[i] - total.first[i] as f64 * values[i];
                    interp_integral + shift / big_n
                })
                .collect();
            (Some(cum), Some(loo))
        }
    };

    let loo_nn = index.loo_nn();
    Ok(CellStats {
        degrees: degrees_from(&loo_nn, n),
        loo_nn,
        volumes,
        cum_volumes,
        interp_integral,
        loo_integrals,
        aux_count: aux_n,
    })
}

/// Exact statistics for distinct points of `[0, 1]` under the uniform law.
///
/// Cells are the intervals between consecutive midpoints. Removing a point
/// hands its interval to its sorted neighbors, split at their midpoint (or
/// entirely to the single neighbor at either end).
pub fn cell_stats_exact_1d(sample: &Sample, values: &[f64]) -> Result<CellStats> {
    if sample.dim() != 1 {
        return Err(invalid("exact Voronoi statistics need one-dimensional points"));
    }
    let xs = sample.as_flat();
    if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(invalid(format!("point {x} lies outside [0, 1]")));
    }
    let index = NnIndex::build(sample.clone(), MetricKind::Euclidean)?;
    index.check_values(values)?;
    let n = xs.len();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let x = |k: usize| xs[order[k]];
    let v = |k: usize| values[order[k]];

    // bounds[k]..bounds[k + 1] is the cell of the k-th smallest point.
    let mut bounds = Vec::with_capacity(n + 1);
    bounds.push(0.0);
    bounds.extend((0..n - 1).map(|k| 0.5 * (x(k) + x(k + 1))));
    bounds.push(1.0);

    let mut volumes = vec![0.0; n];
    for k in 0..n {
        volumes[order[k]] = bounds[k + 1] - bounds[k];
    }
    let interp_integral: f64 = (0..n).map(|k| volumes[order[k]] * v(k)).sum();

    // Volume received by the left and right neighbors when the k-th point goes.
    let gains = |k: usize| -> (f64, f64) {
        let width = bounds[k + 1] - bounds[k];
        match (k > 0, k + 1 < n) {
            (true, true) => {
                let split = 0.5 * (x(k - 1) + x(k + 1));
                (split - bounds[k], bounds[k + 1] - split)
            }
            (false, true) => (0.0, width),
            (true, false) => (width, 0.0),
            (false, false) => unreachable!("n >= 2"),
        }
    };

    let mut cum_volumes: Vec<f64> = volumes.iter().map(|vol| (n - 1) as f64 * vol).collect();
    let mut loo_integrals = vec![0.0; n];
    for k in 0..n {
        let (left, right) = gains(k);
        let mut integral = interp_integral - volumes[order[k]] * v(k);
        if k > 0 {
            cum_volumes[order[k - 1]] += left;
            integral += left * v(k - 1);
        }
        if k + 1 < n {
            cum_volumes[order[k + 1]] += right;
            integral += right * v(k + 1);
        }
        loo_integrals[order[k]] = integral;
    }

    let loo_nn = index.loo_nn();
    Ok(CellStats {
        degrees: degrees_from(&loo_nn, n),
        loo_nn,
        volumes,
        cum_volumes: Some(cum_volumes),
        interp_integral,
        loo_integrals: Some(loo_integrals),
        aux_count: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn exact_volumes() {
        let s = Sample::from_scalars(&[0.1, 0.5, 0.9]).unwrap();
        let stats = cell_stats_exact_1d(&s, &[0.0; 3]).unwrap();
        assert!(close(&stats.volumes, &[0.3, 0.4, 0.3], 1e-15));
        assert_eq!(stats.degrees, vec![1, 2, 0]);

        let s = Sample::from_scalars(&[0.75, 0.25]).unwrap();
        let stats = cell_stats_exact_1d(&s, &[1.0, 2.0]).unwrap();
        assert!(close(&stats.volumes, &[0.5, 0.5], 0.0));
        assert!(close(stats.cum_volumes.as_ref().unwrap(), &[1.0, 1.0], 1e-15));
        // Without one point, the other covers [0, 1].
        assert!(close(stats.loo_integrals.as_ref().unwrap(), &[2.0, 1.0], 1e-15));
    }

    #[test]
    fn exact_rejects_points_outside_unit_interval() {
        let s = Sample::from_scalars(&[0.1, 1.5]).unwrap();
        assert!(cell_stats_exact_1d(&s, &[0.0; 2]).is_err());
        let s = Sample::from_rows(&[[0.1, 0.2], [0.3, 0.4]]).unwrap();
        assert!(cell_stats_exact_1d(&s, &[0.0; 2]).is_err());
    }

    #[test]
    fn exact_volumes_sum_to_one() {
        let s = DistributionSpec::UniformCube { dim: 1 }.sample(37, 3).unwrap();
        let stats = cell_stats_exact_1d(&s, &vec![0.0; 37]).unwrap();
        assert!((stats.volumes.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!((stats.cum_volumes.unwrap().iter().sum::<f64>() - 37.0).abs() <= 1e-12);
    }

    #[test]
    fn mc_constant_values() {
        let spec = DistributionSpec::UniformCube { dim: 2 };
        let s = spec.sample(50, 1).unwrap();
        let idx = NnIndex::build(s, MetricKind::Euclidean).unwrap();
        let stats = cell_stats_mc(&idx, &spec, &[-3.5; 50], 10_000, 2).unwrap();
        assert_eq!(stats.interp_integral, -3.5);
        assert!(stats.loo_integrals.unwrap().iter().all(|&v| v == -3.5));
        let vol_sum: f64 = stats.volumes.iter().sum();
        assert!((vol_sum - 1.0).abs() <= 1e-12);
        let cum_sum: f64 = stats.cum_volumes.unwrap().iter().sum();
        assert!((cum_sum - 50.0).abs() <= 1e-10);
        assert_eq!(stats.degrees.iter().sum::<usize>(), 50);
    }

    #[test]
    fn mc_volumes_match_exact_two_points() {
        let s = Sample::from_scalars(&[0.25, 0.75]).unwrap();
        let idx = NnIndex::build(s, MetricKind::Euclidean).unwrap();
        let spec = DistributionSpec::UniformCube { dim: 1 };
        let aux = 1_000_000;
        let stats = cell_stats_mc(&idx, &spec, &[0.0, 1.0], aux, 5).unwrap();
        let tol = 3.0 * (0.25 / aux as f64).sqrt();
        assert!(close(&stats.volumes, &[0.5, 0.5], tol), "{:?}", stats.volumes);
    }

    #[test]
    fn mc_rejects_mismatched_law() {
        let spec = DistributionSpec::UniformCube { dim: 2 };
        let s = spec.sample(10, 1).unwrap();
        let idx = NnIndex::build(s, MetricKind::Euclidean).unwrap();
        let wrong = DistributionSpec::UniformCube { dim: 3 };
        assert!(cell_stats_mc(&idx, &wrong, &[0.0; 10], 100, 0).is_err());
        assert!(cell_stats_mc(&idx, &spec, &[0.0; 10], 0, 0).is_err());
        assert!(cell_stats_mc(&idx, &spec, &[0.0; 9], 10, 0).is_err());
    }

    #[test]
    fn mc_volumes_only_skips_second_neighbor() {
        let spec = DistributionSpec::UniformCube { dim: 2 };
        let s = spec.sample(20, 1).unwrap();
        let idx = NnIndex::build(s, MetricKind::Euclidean).unwrap();
        let values: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let lite = cell_stats_mc_with(&idx, &spec, &values, 5000, 3, StatsDepth::Volumes).unwrap();
        let full = cell_stats_mc(&idx, &spec, &values, 5000, 3).unwrap();
        assert!(lite.cum_volumes.is_none() && lite.loo_integrals.is_none());
        assert_eq!(lite.volumes, full.volumes);
        assert_eq!(lite.interp_integral, full.interp_integral);
    }
}
