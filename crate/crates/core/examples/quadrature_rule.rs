// Compute CVNN weights once and reuse them for several integrands evaluated
// on the same nodes.

use control_neighbors::estimator::{quadrature_weights, Variant};
use control_neighbors::nn_index::{cell_stats_mc, NnIndex};
use control_neighbors::spaces::{DistributionSpec, MetricKind};

type Integrand = (&'static str, fn(&[f64]) -> f64, f64);

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let law = DistributionSpec::UniformCube { dim: 2 };
    let n = 200;
    let sample = law.sample(n, 1)?;
    let index = NnIndex::build(sample.clone(), MetricKind::Euclidean)?;
    // the statistics depend on the values only through the interpolant integrals
    let zeros = vec![0.0; n];
    let stats = cell_stats_mc(&index, &law, &zeros, 40_000, 2)?;

    for variant in [Variant::Nn, Variant::NnLoo] {
        let rule = quadrature_weights(&stats, variant)?;
        let total: f64 = rule.weights.iter().sum();
        println!("{variant:?}: Σw = {total:.6}");
        let integrands: [Integrand; 3] = [
            ("x0", |p| p[0], 0.5),
            ("x0·x1", |p| p[0] * p[1], 0.25),
            (
                "sin(πx0)",
                |p| (std::f64::consts::PI * p[0]).sin(),
                2.0 / std::f64::consts::PI,
            ),
        ];
        for (name, f, truth) in integrands {
            let estimate = rule.apply(&sample.map(f))?;
            println!("  {name:>9}: {estimate:.5} (truth {truth:.5})");
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
