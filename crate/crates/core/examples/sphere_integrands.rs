// Surface integrals over the unit sphere S² from the built-in registry,
// estimated with the great-circle metric.

use control_neighbors::estimator::{estimate_cvnn, estimate_mc};
use control_neighbors::harness::builtin_integrands;
use control_neighbors::spaces::DistributionSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let law = DistributionSpec::UniformSphere { ambient: 3 };
    let registry = builtin_integrands();
    let n = 300;
    let sample = law.sample(n, 21)?;
    for label in ["phi3", "phi4", "phi5"] {
        let spec = registry.get(label).ok_or("missing integrand")?;
        let values = sample.map(|p| spec.eval(p));
        let mass = spec.measure_mass();
        let truth = spec.true_value(&law).ok_or("no truth")?;
        let mc = mass * estimate_mc(&values)?;
        let cv = mass * estimate_cvnn(&sample, &values, law.natural_metric(), n * n, 8)?.estimate;
        println!(
            "{label}: truth {truth:.5}  MC {mc:.5} ({:.1e})  CVNN {cv:.5} ({:.1e})",
            (mc - truth).abs(),
            (cv - truth).abs()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
