//! End-to-end uses of the estimators: sliced-Wasserstein distances and
//! barrier-option pricing.

mod barrier;
mod sliced;

pub use barrier::{payoff, price_option, reference_price, vanilla_payoff, BarrierKind, OptionContract, ReferencePrice};
pub use sliced::{gaussian_sw2, sw_estimate, w1d_pp, EmpiricalMeasure, GaussianPair};
