use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DistributionSpec, Sample};
use crate::error::{invalid, Result};

/// Risk-neutral dynamics of the underlying asset.
#[derive(Debug, Clone, PartialEq)]
pub enum MarketModel {
    BlackScholes {
        s0: f64,
        rate: f64,
        sigma: f64,
        maturity: f64,
    },
    /// Stochastic variance `v` with mean reversion `kappa` toward `theta`,
    /// vol-of-vol `xi` and spot/variance correlation `rho`.
    Heston {
        s0: f64,
        rate: f64,
        v0: f64,
        theta: f64,
        kappa: f64,
        xi: f64,
        rho: f64,
        maturity: f64,
    },
}

impl MarketModel {
    pub fn s0(&self) -> f64 {
        match *self {
            MarketModel::BlackScholes { s0, .. } | MarketModel::Heston { s0, .. } => s0,
        }
    }

    pub fn rate(&self) -> f64 {
        match *self {
            MarketModel::BlackScholes { rate, .. } | MarketModel::Heston { rate, .. } => rate,
        }
    }

    pub fn maturity(&self) -> f64 {
        match *self {
            MarketModel::BlackScholes { maturity, .. } | MarketModel::Heston { maturity, .. } => maturity,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MarketModel::BlackScholes { .. } => "black-scholes",
            MarketModel::Heston { .. } => "heston",
        }
    }

    // Zero volatility (sigma or xi) is allowed: it gives deterministic dynamics.
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {v}")))
            }
        }
        fn nonnegative(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be non-negative, got {v}")))
            }
        }
        match *self {
            MarketModel::BlackScholes {
                s0,
                rate,
                sigma,
                maturity,
            } => {
                positive("S0", s0)?;
                positive("T", maturity)?;
                nonnegative("sigma", sigma)?;
                if !rate.is_finite() {
                    return Err(invalid("rate must be finite"));
                }
            }
            MarketModel::Heston {
                s0,
                rate,
                v0,
                theta,
                kappa,
                xi,
                rho,
                maturity,
            } => {
                positive("S0", s0)?;
                positive("T", maturity)?;
                positive("v0", v0)?;
                positive("theta", theta)?;
                positive("kappa", kappa)?;
                nonnegative("xi", xi)?;
                if !(rho.is_finite() && rho.abs() <= 1.0) {
                    return Err(invalid(format!("|rho| must be <= 1, got {rho}")));
                }
                if !rate.is_finite() {
                    return Err(invalid("rate must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Simulates one Euler path on the uniform grid `t_1 = 0 < … < t_m = T`
    /// with `m = out.len()`. For Heston, the variance at each grid time is
    /// written to `variance` when provided.
    pub(crate) fn fill_path<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64], mut variance: Option<&mut [f64]>) {
        let m = out.len();
        let dt = self.maturity() / (m - 1) as f64;
        let sqrt_dt = dt.sqrt();
        out[0] = self.s0();
        match *self {
            MarketModel::BlackScholes { rate, sigma, .. } => {
                for k in 1..m {
                    let z: f64 = StandardNormal.sample(rng);
                    out[k] = out[k - 1] * (1.0 + rate * dt + sigma * sqrt_dt * z);
                }
            }
            MarketModel::Heston {
                rate,
                v0,
                theta,
                kappa,
                xi,
                rho,
                ..
            } => {
                // Cholesky factor of [[1, rho], [rho, 1]].
                let rho_bar = (1.0 - rho * rho).max(0.0).sqrt();
                let mut v = v0;
                if let Some(vs) = variance.as_deref_mut() {
                    vs[0] = v;
                }
                for k in 1..m {
                    let z1: f64 = StandardNormal.sample(rng);
                    let w: f64 = StandardNormal.sample(rng);
                    let z2 = rho * z1 + rho_bar * w;
                    // Full truncation: negative variance is clamped inside drift and diffusion.
                    let vp = v.max(0.0);
                    let vol = (vp * dt).sqrt();
                    out[k] = out[k - 1] * (1.0 + rate * dt + vol * z1);
                    v += kappa * (theta - vp) * dt + xi * vol * z2;
                    if let Some(vs) = variance.as_deref_mut() {
                        vs[k] = v;
                    }
                }
            }
        }
    }
}

/// Simulates `n` Euler paths with `m_grid` grid points each.
pub fn simulate_paths(model: &MarketModel, n: usize, m_grid: usize, seed: u64) -> Result<Sample> {
    DistributionSpec::Paths {
        model: model.clone(),
        steps: m_grid,
    }
    .sample(n, seed)
}
