// Moments of the trace of a Haar-distributed orthogonal matrix, with the
// Frobenius metric on O(d).

use control_neighbors::estimator::{estimate_cvnn, estimate_mc};
use control_neighbors::spaces::{orthogonality_defect, trace, DistributionSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let law = DistributionSpec::HaarOrthogonal { size: 3 };
    let n = 400;
    let sample = law.sample(n, 3)?;
    let defect = sample.points().map(orthogonality_defect).fold(0.0, f64::max);
    println!("largest |QᵀQ − I| entry: {defect:.1e}");

    for (power, truth) in [(1, 0.0), (2, 1.0)] {
        let values = sample.map(|q| trace(q).powi(power));
        let mc = estimate_mc(&values)?;
        let cv = estimate_cvnn(&sample, &values, law.natural_metric(), 20_000, 5)?;
        println!(
            "E[tr(Q)^{power}] = {truth}: MC {mc:.4}, CVNN {:.4} (aux {})",
            cv.estimate, cv.aux_n
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
