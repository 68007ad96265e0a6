// RMSE against sample size for MC and CVNN, with log-log slope fits.

use control_neighbors::estimator::{AuxPolicy, AuxRule, Method};
use control_neighbors::harness::{builtin_integrands, run_bench, BenchConfig};
use control_neighbors::spaces::DistributionSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let registry = builtin_integrands();
    let phi1 = registry.get("phi1").ok_or("missing integrand")?;
    let law = DistributionSpec::UniformCube { dim: 2 };
    let config = BenchConfig {
        methods: vec![Method::Mc, Method::Cvnn],
        n_grid: vec![32, 64, 128, 256],
        reps: 20,
        base_seed: 2024,
        aux: AuxRule::new(AuxPolicy::Square),
    };
    let result = run_bench(phi1, &law, &config)?;
    for row in &result.rows {
        println!("{:>5} n={:<5} rmse {:.3e}", row.method, row.n, row.rmse);
    }
    for fit in &result.fits {
        println!("{} slope {:.3}", fit.method, fit.slope);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
