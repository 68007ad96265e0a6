//! Exact nearest-neighbor search over a sample and the Voronoi statistics
//! derived from it.
//!
//! All metrics are served through squared Euclidean distance on the ambient
//! coordinates: Frobenius distance is the Euclidean distance of the flattened
//! matrices, and great-circle distance is an increasing function of the chord.
//! Ties are always resolved toward the smallest point index.

mod cells;
mod kdtree;

use crate::error::{invalid, Error, Result};
use crate::spaces::{squared_euclidean, MetricKind, Sample};

pub use cells::{cell_stats_exact_1d, cell_stats_mc, cell_stats_mc_with, CellStats, StatsDepth};

use kdtree::KdTree;

/// Largest ambient dimension served by the k-d tree under [`BackendChoice::Auto`].
pub const TREE_MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendChoice {
    /// Tree up to [`TREE_MAX_DIM`] ambient coordinates, linear scan above.
    #[default]
    Auto,
    KdTree,
    Exhaustive,
}

#[derive(Debug, Clone)]
enum Backend {
    Tree(KdTree),
    Exhaustive,
}

/// One query result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    /// Distance under the index's metric.
    pub distance: f64,
}

/// The `k` smallest `(squared distance, index)` pairs seen so far, ascending.
#[derive(Debug, Clone)]
pub(crate) struct KBest {
    k: usize,
    items: Vec<(f64, u32)>,
}

impl KBest {
    pub(crate) fn new(k: usize) -> Self {
        KBest {
            k,
            items: Vec::with_capacity(k + 1),
        }
    }

    pub(crate) fn clear(&mut self) {
        self.items.clear();
    }

    /// Squared distance a candidate must not exceed to be admitted.
    #[inline]
    pub(crate) fn worst(&self) -> f64 {
        if self.items.len() < self.k {
            f64::INFINITY
        } else {
            self.items[self.k - 1].0
        }
    }

    #[inline]
    pub(crate) fn offer(&mut self, d2: f64, id: u32) {
        let after = |&(d, i): &(f64, u32)| d2 < d || (d2 == d && id < i);
        if self.items.len() == self.k {
            if !after(&self.items[self.k - 1]) {
                return;
            }
            self.items.pop();
        }
        self.items.push((d2, id));
        let mut pos = self.items.len() - 1;
        while pos > 0 && after(&self.items[pos - 1]) {
            self.items.swap(pos, pos - 1);
            pos -= 1;
        }
    }

    pub(crate) fn items(&self) -> &[(f64, u32)] {
        &self.items
    }
}

/// Immutable nearest-neighbor index over a sample.
#[derive(Debug, Clone)]
pub struct NnIndex {
    sample: Sample,
    metric: MetricKind,
    backend: Backend,
}

impl NnIndex {
    /// Builds an index with the default backend policy.
    pub fn build(sample: Sample, metric: MetricKind) -> Result<Self> {
        Self::build_with(sample, metric, BackendChoice::Auto)
    }

    pub fn build_with(sample: Sample, metric: MetricKind, choice: BackendChoice) -> Result<Self> {
        if sample.len() < 2 {
            return Err(invalid("an index needs at least 2 points"));
        }
        metric.check_dim(sample.dim())?;
        for p in sample.points() {
            metric.check_point(p)?;
        }
        let use_tree = match choice {
            BackendChoice::Auto => sample.dim() <= TREE_MAX_DIM,
            BackendChoice::KdTree => true,
            BackendChoice::Exhaustive => false,
        };
        let backend = if use_tree {
            Backend::Tree(KdTree::new(sample.dim(), sample.as_flat()))
        } else {
            Backend::Exhaustive
        };
        let index = NnIndex {
            sample,
            metric,
            backend,
        };
        // A point's two nearest neighbors are itself and its closest peer;
        // a zero second distance means a coincident point.
        let mut best = KBest::new(2);
        for i in 0..index.len() {
            index.search(index.sample.point(i), &mut best);
            let &[(_, a), (d2, b)] = best.items() else {
                unreachable!("n >= 2")
            };
            if d2 == 0.0 {
                let (first, second) = (a.min(b) as usize, a.max(b) as usize);
                return Err(Error::DuplicatePoint { first, second });
            }
        }
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sample.dim()
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn sample(&self) -> &Sample {
        &self.sample
    }

    pub fn uses_tree(&self) -> bool {
        matches!(self.backend, Backend::Tree(_))
    }

    pub(crate) fn search(&self, query: &[f64], best: &mut KBest) {
        best.clear();
        match &self.backend {
            Backend::Tree(tree) => tree.search(query, best),
            Backend::Exhaustive => {
                for (i, p) in self.sample.points().enumerate() {
                    if let Some(d2) = bounded_squared_euclidean(query, p, best.worst()) {
                        best.offer(d2, i as u32);
                    }
                }
            }
        }
    }

    /// The `k` nearest sample points of `x`, ascending by `(distance, index)`.
    pub fn query_knn(&self, x: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        self.check_query(x, k)?;
        let mut best = KBest::new(k);
        self.search(x, &mut best);
        Ok(best
            .items()
            .iter()
            .map(|&(d2, i)| Neighbor {
                index: i as usize,
                distance: self.metric.from_euclidean(d2.sqrt()),
            })
            .collect())
    }

    fn check_query(&self, x: &[f64], k: usize) -> Result<()> {
        if x.len() != self.dim() {
            return Err(invalid(format!(
                "query has dimension {}, index has {}",
                x.len(),
                self.dim()
            )));
        }
        if k == 0 || k > self.len() {
            return Err(invalid(format!("k must lie in 1..={}, got {k}", self.len())));
        }
        self.metric.check_point(x)
    }

    /// Leave-one-out nearest neighbor of every sample point, i.e. its second
    /// nearest neighbor in the full sample.
    pub fn loo_nn(&self) -> Vec<usize> {
        let mut best = KBest::new(2);
        (0..self.len())
            .map(|i| {
                self.search(self.sample.point(i), &mut best);
                let items = best.items();
                // Points are distinct, so the first neighbor is `i` itself.
                debug_assert_eq!(items[0].1 as usize, i);
                items[1].1 as usize
            })
            .collect()
    }

    /// Number of points whose leave-one-out neighbor is each point.
    pub fn degrees(&self) -> Vec<usize> {
        degrees_from(&self.loo_nn(), self.len())
    }

    /// Mean of `values` over the `k` nearest sample points of `x`.
    pub fn knn_predict(&self, values: &[f64], x: &[f64], k: usize) -> Result<f64> {
        self.check_values(values)?;
        let nn = self.query_knn(x, k)?;
        Ok(nn.iter().map(|nb| values[nb.index]).sum::<f64>() / k as f64)
    }

    pub(crate) fn check_values(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(invalid(format!("expected {} values, got {}", self.len(), values.len())));
        }
        Ok(())
    }

    /// Reference answer by linear scan, independent of the configured backend.
    pub fn query_knn_exhaustive(&self, x: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        self.check_query(x, k)?;
        let mut all: Vec<(f64, usize)> = self
            .sample
            .points()
            .enumerate()
            .map(|(i, p)| (squared_euclidean(x, p), i))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(all
            .into_iter()
            .take(k)
            .map(|(d2, index)| Neighbor {
                index,
                distance: self.metric.from_euclidean(d2.sqrt()),
            })
            .collect())
    }
}

pub(crate) fn degrees_from(loo_nn: &[usize], n: usize) -> Vec<usize> {
    let mut degrees = vec![0usize; n];
    for &j in loo_nn {
        degrees[j] += 1;
    }
    degrees
}

/// Squared distance, abandoned once the partial sum exceeds `bound`. When it
/// returns `Some`, the value is bit-identical to [`squared_euclidean`].
#[inline]
fn bounded_squared_euclidean(a: &[f64], b: &[f64], bound: f64) -> Option<f64> {
    const BLOCK: usize = 16;
    let mut acc = 0.0;
    for (ca, cb) in a.chunks(BLOCK).zip(b.chunks(BLOCK)) {
        for (x, y) in ca.iter().zip(cb) {
            let d = x - y;
            acc += d * d;
        }
        if acc > bound {
            return None;
        }
    }
    Some(acc)
}
