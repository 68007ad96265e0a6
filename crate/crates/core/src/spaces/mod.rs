//! Metric spaces and the sampling laws used by the experiments.
//!
//! Points are stored as flat `f64` slices in their ambient embedding: cube and
//! Gaussian points in R^d, sphere points as unit vectors in R^q, orthogonal
//! matrices flattened row-major, and price paths as the vector of grid values.

mod market;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::seed::{rng_from, StreamRng};

pub use market::{simulate_paths, MarketModel};

/// Tolerance on `|‖x‖ − 1|` for sphere points and on `‖XᵀX − I‖_∞` for
/// orthogonal matrices.
pub const MANIFOLD_TOL: f64 = 1e-9;

/// Distance function attached to a space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Euclidean,
    /// Geodesic distance on the unit sphere, `arccos⟨a, b⟩`.
    GreatCircle,
    /// Frobenius norm of the difference of two square matrices.
    FrobeniusMatrix,
}

impl MetricKind {
    pub fn label(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::GreatCircle => "great-circle",
            MetricKind::FrobeniusMatrix => "frobenius",
        }
    }

    /// Checks that a point of length `dim` can carry this metric.
    pub fn check_dim(self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(invalid("points must have at least one coordinate"));
        }
        if self == MetricKind::FrobeniusMatrix && square_side(dim).is_none() {
            return Err(invalid(format!(
                "Frobenius metric needs a square-matrix flattening, got length {dim}"
            )));
        }
        Ok(())
    }

    /// Checks the per-point invariant of the metric (unit norm for great circles).
    pub fn check_point(self, p: &[f64]) -> Result<()> {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(invalid("point has non-finite coordinates"));
        }
        if self == MetricKind::GreatCircle {
            let norm = squared_norm(p).sqrt();
            if (norm - 1.0).abs() > MANIFOLD_TOL {
                return Err(invalid(format!(
                    "great-circle metric needs unit vectors, got norm {norm}"
                )));
            }
        }
        Ok(())
    }

    /// Converts a Euclidean (chord) distance into this metric's distance.
    ///
    /// Great-circle distance is a strictly increasing function of the chord
    /// length on the unit sphere, so nearest-neighbor orderings agree.
    pub fn from_euclidean(self, chord: f64) -> f64 {
        match self {
            MetricKind::Euclidean | MetricKind::FrobeniusMatrix => chord,
            MetricKind::GreatCircle => 2.0 * (0.5 * chord).min(1.0).asin(),
        }
    }
}

pub(crate) fn square_side(len: usize) -> Option<usize> {
    let m = (len as f64).sqrt().round() as usize;
    (m * m == len).then_some(m)
}

#[inline]
pub(crate) fn squared_norm(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum()
}

/// Squared Euclidean distance. The single routine every index backend uses, so
/// that backends agree to the last bit.
#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Distance between two points under `kind`.
pub fn distance(kind: MetricKind, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(format!("dimension mismatch: {} vs {}", a.len(), b.len())));
    }
    kind.check_dim(a.len())?;
    kind.check_point(a)?;
    kind.check_point(b)?;
    Ok(match kind {
        MetricKind::Euclidean | MetricKind::FrobeniusMatrix => squared_euclidean(a, b).sqrt(),
        MetricKind::GreatCircle => {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            dot.clamp(-1.0, 1.0).acos()
        }
    })
}

/// Sampling law of the integration problem.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// Uniform on `[0, 1]^dim`.
    UniformCube { dim: usize },
    /// `N(0, I_dim)`.
    StandardGaussian { dim: usize },
    /// Uniform on the unit sphere of R^ambient (intrinsic dimension `ambient − 1`).
    UniformSphere { ambient: usize },
    /// Haar measure on `O_size(R)`.
    HaarOrthogonal { size: usize },
    /// Discretized price paths of a market model on `steps` grid times.
    Paths { model: MarketModel, steps: usize },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::UniformCube { dim } | DistributionSpec::StandardGaussian { dim } => {
                if dim == 0 {
                    return Err(invalid("dimension must be positive"));
                }
            }
            DistributionSpec::UniformSphere { ambient } => {
                if ambient == 0 {
                    return Err(invalid("sphere ambient dimension must be positive"));
                }
            }
            DistributionSpec::HaarOrthogonal { size } => {
                if size < 2 {
                    return Err(invalid("orthogonal group needs matrix size >= 2"));
                }
            }
            DistributionSpec::Paths { ref model, steps } => {
                model.validate()?;
                if steps < 2 {
                    return Err(invalid("path grid needs at least 2 time points"));
                }
            }
        }
        Ok(())
    }

    /// Length of the flat coordinate vector of one point.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            DistributionSpec::UniformCube { dim } | DistributionSpec::StandardGaussian { dim } => dim,
            DistributionSpec::UniformSphere { ambient } => ambient,
            DistributionSpec::HaarOrthogonal { size } => size * size,
            DistributionSpec::Paths { steps, .. } => steps,
        }
    }

    /// Dimension `d` of the support, as used by the `n^{1+2/d}` auxiliary rule.
    pub fn intrinsic_dim(&self) -> f64 {
        match *self {
            DistributionSpec::UniformCube { dim } | DistributionSpec::StandardGaussian { dim } => dim as f64,
            DistributionSpec::UniformSphere { ambient } => ambient.saturating_sub(1).max(1) as f64,
            DistributionSpec::HaarOrthogonal { size } => (size * (size - 1) / 2) as f64,
            // Brownian increments: one dimension per step.
            DistributionSpec::Paths { steps, .. } => (steps - 1) as f64,
        }
    }

    /// The metric the experiments pair with this law.
    pub fn natural_metric(&self) -> MetricKind {
        match self {
            DistributionSpec::UniformSphere { .. } => MetricKind::GreatCircle,
            DistributionSpec::HaarOrthogonal { .. } => MetricKind::FrobeniusMatrix,
            _ => MetricKind::Euclidean,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DistributionSpec::UniformCube { .. } => "cube",
            DistributionSpec::StandardGaussian { .. } => "gaussian",
            DistributionSpec::UniformSphere { .. } => "sphere",
            DistributionSpec::HaarOrthogonal { .. } => "orthogonal",
            DistributionSpec::Paths { .. } => "paths",
        }
    }

    /// Draws one point into `out` (`out.len() == self.ambient_dim()`).
    pub fn fill_point<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.ambient_dim());
        match self {
            DistributionSpec::UniformCube { .. } => {
                for v in out.iter_mut() {
                    *v = rng.gen::<f64>();
                }
            }
            DistributionSpec::StandardGaussian { .. } => {
                for v in out.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
            }
            DistributionSpec::UniformSphere { .. } => loop {
                for v in out.iter_mut() {
                    *v = StandardNormal.sample(rng);
                }
                let norm = squared_norm(out).sqrt();
                if norm > 1e-12 {
                    out.iter_mut().for_each(|v| *v /= norm);
                    break;
                }
            },
            DistributionSpec::HaarOrthogonal { size } => haar_orthogonal(*size, rng, out),
            DistributionSpec::Paths { model, .. } => model.fill_path(rng, out, None),
        }
    }

    /// Draws `n` i.i.d. points; deterministic in `(self, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        self.validate()?;
        if n == 0 {
            return Err(invalid("sample size must be at least 1"));
        }
        let dim = self.ambient_dim();
        let mut coords = vec![0.0; n * dim];
        let mut rng = rng_from(seed);
        for chunk in coords.chunks_exact_mut(dim) {
            self.fill_point(&mut rng, chunk);
        }
        Ok(Sample {
            dim,
            coords,
            spec: Some(self.clone()),
            seed: Some(seed),
        })
    }
}

/// Haar-distributed orthogonal matrix via QR of a Gaussian matrix, with the
/// columns of Q rescaled by `sign(R_ii)` so the law is exactly Haar.
fn haar_orthogonal<R: Rng + ?Sized>(m: usize, rng: &mut R, out: &mut [f64]) {
    let g = DMatrix::<f64>::from_fn(m, m, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    for i in 0..m {
        for j in 0..m {
            out[i * m + j] = q[(i, j)];
        }
    }
}

/// An ordered collection of points with the law and seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    dim: usize,
    coords: Vec<f64>,
    spec: Option<DistributionSpec>,
    seed: Option<u64>,
}

impl Sample {
    /// Wraps hand-built points given as a flat row-major buffer.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "buffer of length {} is not a non-empty multiple of dimension {dim}",
                coords.len()
            )));
        }
        Ok(Sample {
            dim,
            coords,
            spec: None,
            seed: None,
        })
    }

    /// One-dimensional points.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        Self::from_flat(1, xs.to_vec())
    }

    pub fn from_rows<P: AsRef<[f64]>>(rows: &[P]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != dim) {
            return Err(invalid("rows have different lengths"));
        }
        Self::from_flat(dim, rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn spec(&self) -> Option<&DistributionSpec> {
        self.spec.as_ref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Evaluates `f` at every point, in order.
    pub fn map<F: FnMut(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        self.points().map(f).collect()
    }
}

/// `‖XᵀX − I‖_∞` of a flattened square matrix.
pub fn orthogonality_defect(flat: &[f64]) -> f64 {
    let m = square_side(flat.len()).expect("square matrix");
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let dot: f64 = (0..m).map(|k| flat[k * m + a] * flat[k * m + b]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

/// Trace of a flattened square matrix.
pub fn trace(flat: &[f64]) -> f64 {
    let m = square_side(flat.len()).expect("square matrix");
    (0..m).map(|i| flat[i * m + i]).sum()
}

pub(crate) fn standard_normal(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}
