// Sliced-Wasserstein distance between two empirical Gaussian measures in
// R³, with random projection directions integrated by MC and by CVNN.

use control_neighbors::applications::{sw_estimate, GaussianPair};
use control_neighbors::estimator::Method;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let pair = GaussianPair::draw(3, 2.0, 5.0, 500, 99)?;
    println!("closed form SW₂² of the laws: {:.5}", pair.sw2_exact());
    let n_proj = 50;
    for method in [Method::Mc, Method::Cvnn] {
        let values: Vec<f64> = (0..10)
            .map(|rep| sw_estimate(&pair.p, &pair.q, 2.0, n_proj, method, rep, n_proj * n_proj))
            .collect::<Result<_, _>>()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt();
        println!("{method:>4}: mean {mean:.5}  sd over directions {sd:.2e}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
