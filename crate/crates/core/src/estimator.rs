//! Integral estimators: plain Monte Carlo and the two control-neighbors
//! estimators, in direct form and as quadrature rules.
//!
//! With `v_i = φ(X_i)`, `j(i)` the leave-one-out neighbor of `X_i`, `μ(φ̂)` the
//! integral of the 1-NN interpolant and `μ(φ̂⁽ⁱ⁾)` that of the interpolant
//! without `X_i`:
//!
//! ```text
//! CVNN     = (1/n) Σ [ v_i − v_j(i) + μ(φ̂) ]
//! CVNN-loo = (1/n) Σ [ v_i − v_j(i) + μ(φ̂⁽ⁱ⁾) ]
//! ```
//!
//! Both are linear in the values with weights `(1 + nV_i − d_i)/n` and
//! `(1 + c_i − d_i)/n` respectively.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::nn_index::{cell_stats_mc_with, CellStats, NnIndex, StatsDepth};
use crate::spaces::{MetricKind, Sample};

/// Default ceiling on the auxiliary sample size.
pub const DEFAULT_AUX_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Mc,
    Cvnn,
    CvnnLoo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Mc => "MC",
            Method::Cvnn => "CVNN",
            Method::CvnnLoo => "CVNN-loo",
        }
    }

    pub fn needs_aux(self) -> bool {
        self != Method::Mc
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mc" => Ok(Method::Mc),
            "cvnn" => Ok(Method::Cvnn),
            "cvnn-loo" | "cvnn_loo" => Ok(Method::CvnnLoo),
            other => Err(invalid(format!(
                "unknown method '{other}' (expected mc, cvnn, cvnn-loo)"
            ))),
        }
    }
}

/// Rule for the auxiliary sample size `N` as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxPolicy {
    /// `N = n²`.
    Square,
    /// `N = ⌈n^{1+2/d}⌉` with `d` the intrinsic dimension.
    Theory,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxRule {
    pub policy: AuxPolicy,
    pub cap: usize,
}

impl Default for AuxRule {
    fn default() -> Self {
        AuxRule {
            policy: AuxPolicy::Square,
            cap: DEFAULT_AUX_CAP,
        }
    }
}

impl AuxRule {
    pub fn new(policy: AuxPolicy) -> Self {
        AuxRule {
            policy,
            ..Default::default()
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn resolve(&self, n: usize, intrinsic_dim: f64) -> usize {
        let raw = match self.policy {
            AuxPolicy::Square => n.saturating_mul(n),
            AuxPolicy::Theory => {
                let v = (n as f64).powf(1.0 + 2.0 / intrinsic_dim).ceil();
                if v >= usize::MAX as f64 {
                    usize::MAX
                } else {
                    v as usize
                }
            }
            AuxPolicy::Fixed(m) => m,
        };
        raw.min(self.cap).max(1)
    }

    pub fn label(&self) -> String {
        match self.policy {
            AuxPolicy::Square => "square".into(),
            AuxPolicy::Theory => "theory".into(),
            AuxPolicy::Fixed(m) => format!("fixed:{m}"),
        }
    }
}

impl FromStr for AuxPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(AuxPolicy::Square),
            "theory" => Ok(AuxPolicy::Theory),
            _ => s
                .strip_prefix("fixed:")
                .and_then(|m| m.parse().ok())
                .map(AuxPolicy::Fixed)
                .ok_or_else(|| invalid(format!("unknown aux policy '{s}' (expected square, theory, fixed:<N>)"))),
        }
    }
}

/// One integration result; the unit of record CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub method: Method,
    pub space: String,
    pub dim: usize,
    pub integrand: String,
    pub n: usize,
    /// 0 for plain Monte Carlo.
    pub aux_n: usize,
    pub rep: usize,
    pub seed: u64,
    pub estimate: f64,
    pub true_value: Option<f64>,
    pub abs_error: Option<f64>,
}

impl EstimateRecord {
    pub fn new(method: Method, n: usize, aux_n: usize, seed: u64, estimate: f64) -> Self {
        EstimateRecord {
            method,
            space: String::new(),
            dim: 0,
            integrand: String::new(),
            n,
            aux_n,
            rep: 0,
            seed,
            estimate,
            true_value: None,
            abs_error: None,
        }
    }

    pub fn with_labels(mut self, space: &str, dim: usize, integrand: &str) -> Self {
        self.space = space.to_string();
        self.dim = dim;
        self.integrand = integrand.to_string();
        self
    }

    pub fn with_rep(mut self, rep: usize) -> Self {
        self.rep = rep;
        self
    }

    pub fn with_truth(mut self, truth: f64) -> Self {
        self.true_value = Some(truth);
        self.abs_error = Some((self.estimate - truth).abs());
        self
    }
}

/// Sample mean.
pub fn estimate_mc(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("no values to average"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

fn check_stats(values: &[f64], stats: &CellStats) -> Result<()> {
    if values.len() != stats.len() || stats.loo_nn.len() != stats.len() {
        return Err(invalid(format!(
            "{} values for cell statistics of {} points",
            values.len(),
            stats.len()
        )));
    }
    Ok(())
}

/// Mean leave-one-out residual `(1/n) Σ (v_i − v_j(i))`.
fn mean_loo_residual(values: &[f64], loo_nn: &[usize]) -> f64 {
    let own: f64 = values.iter().sum();
    let neighbor: f64 = loo_nn.iter().map(|&j| values[j]).sum();
    (own - neighbor) / values.len() as f64
}

/// Control-neighbors estimate from precomputed statistics.
pub fn cvnn_from_stats(values: &[f64], stats: &CellStats) -> Result<f64> {
    check_stats(values, stats)?;
    Ok(mean_loo_residual(values, &stats.loo_nn) + stats.interp_integral)
}

/// Leave-one-out control-neighbors estimate from precomputed statistics.
pub fn cvnn_loo_from_stats(values: &[f64], stats: &CellStats) -> Result<f64> {
    check_stats(values, stats)?;
    let loo = stats
        .loo_integrals
        .as_ref()
        .ok_or_else(|| invalid("leave-one-out integrals were not computed"))?;
    let n = values.len() as f64;
    Ok(mean_loo_residual(values, &stats.loo_nn) + loo.iter().sum::<f64>() / n)
}

fn stats_for(
    sample: &Sample,
    values: &[f64],
    metric: MetricKind,
    aux_n: usize,
    seed: u64,
    depth: StatsDepth,
) -> Result<CellStats> {
    let spec = sample
        .spec()
        .ok_or_else(|| invalid("sample carries no distribution to draw auxiliary points from"))?
        .clone();
    let index = NnIndex::build(sample.clone(), metric)?;
    cell_stats_mc_with(&index, &spec, values, aux_n, seed, depth)
}

/// Control-neighbors estimate with an auxiliary sample of size `aux_n` drawn
/// from the sample's own law. Uses no integrand evaluations beyond `values`.
pub fn estimate_cvnn(
    sample: &Sample,
    values: &[f64],
    metric: MetricKind,
    aux_n: usize,
    seed: u64,
) -> Result<EstimateRecord> {
    let stats = stats_for(sample, values, metric, aux_n, seed, StatsDepth::Volumes)?;
    let value = cvnn_from_stats(values, &stats)?;
    Ok(EstimateRecord::new(Method::Cvnn, values.len(), aux_n, seed, value))
}

/// Leave-one-out control-neighbors estimate; all leave-one-out integrals share
/// one auxiliary sample.
pub fn estimate_cvnn_loo(
    sample: &Sample,
    values: &[f64],
    metric: MetricKind,
    aux_n: usize,
    seed: u64,
) -> Result<EstimateRecord> {
    let stats = stats_for(sample, values, metric, aux_n, seed, StatsDepth::Full)?;
    let value = cvnn_loo_from_stats(values, &stats)?;
    Ok(EstimateRecord::new(Method::CvnnLoo, values.len(), aux_n, seed, value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Nn,
    NnLoo,
}

/// Integrand-independent weights of a control-neighbors estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub weights: Vec<f64>,
    pub variant: Variant,
}

impl QuadratureRule {
    /// `Σ w_i v_i`.
    pub fn apply(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(invalid(format!(
                "{} values for a rule of {} weights",
                values.len(),
                self.weights.len()
            )));
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }
}

/// Weights `(1 + nV_i − d_i)/n` (NN) or `(1 + c_i − d_i)/n` (NN-loo).
pub fn quadrature_weights(stats: &CellStats, variant: Variant) -> Result<QuadratureRule> {
    let n = stats.len() as f64;
    let weights = match variant {
        Variant::Nn => stats
            .volumes
            .iter()
            .zip(&stats.degrees)
            .map(|(v, &d)| (1.0 + n * v - d as f64) / n)
            .collect(),
        Variant::NnLoo => {
            let cum = stats
                .cum_volumes
                .as_ref()
                .ok_or_else(|| invalid("NN-loo weights need cumulative volumes"))?;
            cum.iter()
                .zip(&stats.degrees)
                .map(|(c, &d)| (1.0 + c - d as f64) / n)
                .collect()
        }
    };
    Ok(QuadratureRule { weights, variant })
}

/// Same as [`QuadratureRule::apply`].
pub fn estimate_from_rule(rule: &QuadratureRule, values: &[f64]) -> Result<f64> {
    rule.apply(values)
}
