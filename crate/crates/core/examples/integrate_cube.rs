// Estimate the integral of a smooth function on the unit square with plain
// Monte Carlo, CVNN and CVNN-loo from the same sample.

use control_neighbors::estimator::{estimate_cvnn, estimate_cvnn_loo, estimate_mc};
use control_neighbors::spaces::{DistributionSpec, MetricKind};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let law = DistributionSpec::UniformCube { dim: 2 };
    let n = 500;
    let sample = law.sample(n, 7)?;
    // ∫ x0·e^{x1} over [0,1]² = (e − 1)/2
    let values = sample.map(|p| p[0] * p[1].exp());
    let truth = (std::f64::consts::E - 1.0) / 2.0;

    let mc = estimate_mc(&values)?;
    let cv = estimate_cvnn(&sample, &values, MetricKind::Euclidean, n * 50, 11)?;
    let loo = estimate_cvnn_loo(&sample, &values, MetricKind::Euclidean, n * 50, 11)?;

    println!("truth    {truth:.6}");
    println!("MC       {mc:.6}  error {:.2e}", (mc - truth).abs());
    println!("CVNN     {:.6}  error {:.2e}", cv.estimate, (cv.estimate - truth).abs());
    println!(
        "CVNN-loo {:.6}  error {:.2e}",
        loo.estimate,
        (loo.estimate - truth).abs()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
