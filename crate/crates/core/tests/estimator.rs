mod common;

use control_neighbors::estimator::{
    cvnn_from_stats, cvnn_loo_from_stats, estimate_cvnn, estimate_cvnn_loo, estimate_from_rule, estimate_mc,
    quadrature_weights, Variant,
};
use control_neighbors::nn_index::{cell_stats_exact_1d, cell_stats_mc, NnIndex};
use control_neighbors::spaces::{DistributionSpec, Sample};
use proptest::prelude::*;

fn all_laws() -> Vec<DistributionSpec> {
    vec![
        DistributionSpec::UniformCube { dim: 2 },
        DistributionSpec::StandardGaussian { dim: 3 },
        DistributionSpec::UniformSphere { ambient: 3 },
        DistributionSpec::HaarOrthogonal { size: 3 },
    ]
}

#[test]
fn plain_monte_carlo() {
    assert_eq!(estimate_mc(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
    assert!(estimate_mc(&[]).is_err());
    let s = DistributionSpec::UniformCube { dim: 1 }.sample(100_000, 1).unwrap();
    let m = estimate_mc(&s.map(|p| p[0])).unwrap();
    assert!((m - 0.5).abs() <= 4.0 / 12f64.sqrt() / (1e5f64).sqrt());
}

#[test]
fn constants_are_integrated_exactly_everywhere() {
    for law in all_laws() {
        let sample = law.sample(64, 3).unwrap();
        for c in [0.0, 1.0, -3.5] {
            let values = vec![c; 64];
            let a = estimate_cvnn(&sample, &values, law.natural_metric(), 5000, 4).unwrap();
            let b = estimate_cvnn_loo(&sample, &values, law.natural_metric(), 5000, 4).unwrap();
            assert!((a.estimate - c).abs() <= 1e-12, "{}: {}", law.label(), a.estimate);
            assert!((b.estimate - c).abs() <= 1e-12, "{}: {}", law.label(), b.estimate);
        }
    }
}

#[test]
fn two_points() {
    let sample = Sample::from_scalars(&[0.2, 0.9]).unwrap();
    let values = [3.0, -1.0];
    let stats = cell_stats_exact_1d(&sample, &values).unwrap();
    let v = stats.volumes[0];
    assert!((v - 0.55).abs() < 1e-15);
    let nn = cvnn_from_stats(&values, &stats).unwrap();
    assert!((nn - (v * 3.0 - (1.0 - v))).abs() < 1e-14);
    let loo = cvnn_loo_from_stats(&values, &stats).unwrap();
    assert!((loo - 1.0).abs() < 1e-14);
    let rule = quadrature_weights(&stats, Variant::NnLoo).unwrap();
    assert_eq!(rule.weights, vec![0.5, 0.5]);
}

#[test]
fn weights_on_three_points() {
    let sample = Sample::from_scalars(&[0.1, 0.5, 0.9]).unwrap();
    let stats = cell_stats_exact_1d(&sample, &[0.0; 3]).unwrap();
    let rule = quadrature_weights(&stats, Variant::Nn).unwrap();
    let expected = [0.3, 0.2 / 3.0, 1.9 / 3.0];
    for (w, e) in rule.weights.iter().zip(expected) {
        assert!((w - e).abs() < 1e-14);
    }
    assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
}

#[test]
fn loo_weights_need_cumulative_volumes() {
    let law = DistributionSpec::UniformCube { dim: 2 };
    let sample = law.sample(10, 1).unwrap();
    let index = NnIndex::build(sample, law.natural_metric()).unwrap();
    let mut stats = cell_stats_mc(&index, &law, &[0.0; 10], 100, 2).unwrap();
    stats.cum_volumes = None;
    assert!(quadrature_weights(&stats, Variant::NnLoo).is_err());
    let rule = quadrature_weights(&stats, Variant::Nn).unwrap();
    assert!(estimate_from_rule(&rule, &[1.0; 9]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn direct_and_quadrature_forms_agree(dim in 1usize..=3, n in 2usize..=50, seed in any::<u64>()) {
        let law = DistributionSpec::UniformCube { dim };
        let sample = law.sample(n, seed).unwrap();
        let values = sample.map(|p| p.iter().map(|x| (4.0 * x).cos()).sum());
        let index = NnIndex::build(sample, law.natural_metric()).unwrap();
        let stats = cell_stats_mc(&index, &law, &values, 3000, seed ^ 1).unwrap();
        let nn = quadrature_weights(&stats, Variant::Nn).unwrap();
        let loo = quadrature_weights(&stats, Variant::NnLoo).unwrap();
        prop_assert!((nn.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!((loo.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!((nn.apply(&values).unwrap() - cvnn_from_stats(&values, &stats).unwrap()).abs() <= 1e-10);
        prop_assert!((loo.apply(&values).unwrap() - cvnn_loo_from_stats(&values, &stats).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn one_rule_serves_many_integrands() {
    let law = DistributionSpec::UniformSphere { ambient: 3 };
    let sample = law.sample(80, 5).unwrap();
    let index = NnIndex::build(sample.clone(), law.natural_metric()).unwrap();
    let f = sample.map(|p| p[0] * p[1]);
    let g = sample.map(|p| (p[2] + 1.0).ln());
    let rule_stats = cell_stats_mc(&index, &law, &vec![0.0; 80], 8000, 6).unwrap();
    for (values, variant) in [
        (&f, Variant::Nn),
        (&g, Variant::Nn),
        (&f, Variant::NnLoo),
        (&g, Variant::NnLoo),
    ] {
        let direct_stats = cell_stats_mc(&index, &law, values, 8000, 6).unwrap();
        let direct = match variant {
            Variant::Nn => cvnn_from_stats(values, &direct_stats).unwrap(),
            Variant::NnLoo => cvnn_loo_from_stats(values, &direct_stats).unwrap(),
        };
        let rule = quadrature_weights(&rule_stats, variant).unwrap();
        assert!((rule.apply(values).unwrap() - direct).abs() <= 1e-12);
    }
}

#[test]
fn estimates_are_reproducible() {
    let law = DistributionSpec::HaarOrthogonal { size: 3 };
    let sample = law.sample(50, 9).unwrap();
    let values = sample.map(|q| q[0] + q[4] + q[8]);
    let a = estimate_cvnn_loo(&sample, &values, law.natural_metric(), 4000, 10).unwrap();
    let b = estimate_cvnn_loo(&sample, &values, law.natural_metric(), 4000, 10).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
}

#[test]
fn control_neighbors_beat_plain_mc_on_a_smooth_integrand() {
    let law = DistributionSpec::UniformCube { dim: 1 };
    let (n, reps) = (1000, 100);
    let (mut mc_sq, mut cv_sq) = (0.0, 0.0);
    for rep in 0..reps {
        let sample = law.sample(n, 100 + rep).unwrap();
        let values = sample.map(|p| p[0] * p[0]);
        mc_sq += (estimate_mc(&values).unwrap() - 1.0 / 3.0).powi(2);
        let cv = estimate_cvnn(&sample, &values, law.natural_metric(), 1_000_000, 500 + rep).unwrap();
        cv_sq += (cv.estimate - 1.0 / 3.0).powi(2);
    }
    let ratio = (mc_sq / cv_sq).sqrt();
    assert!(ratio >= 3.0, "RMSE ratio {ratio}");
}

#[test]
fn leave_one_out_estimator_is_unbiased() {
    let law = DistributionSpec::UniformCube { dim: 1 };
    let errors: Vec<f64> = (0..5000)
        .map(|rep| {
            let sample = law.sample(16, rep).unwrap();
            let values = sample.map(|p| p[0] * p[0]);
            let stats = cell_stats_exact_1d(&sample, &values).unwrap();
            cvnn_loo_from_stats(&values, &stats).unwrap() - 1.0 / 3.0
        })
        .collect();
    let (mean, se) = common::mean_and_se(&errors);
    assert!(mean.abs() <= 4.0 * se, "{mean} ± {se}");
}

#[test]
fn the_two_estimators_merge_quickly() {
    let law = DistributionSpec::UniformCube { dim: 1 };
    let ns = [16usize, 64, 256, 1024];
    let gaps: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let total: f64 = (0..50)
                .map(|rep| {
                    let sample = law.sample(n, rep * 7919 + n as u64).unwrap();
                    let values = sample.map(|p| p[0] * p[0]);
                    let stats = cell_stats_exact_1d(&sample, &values).unwrap();
                    (cvnn_from_stats(&values, &stats).unwrap() - cvnn_loo_from_stats(&values, &stats).unwrap()).abs()
                })
                .sum();
            total / 50.0
        })
        .collect();
    let (slope, _) = control_neighbors::harness::fit_loglog(&ns, &gaps);
    assert!(slope <= -1.5, "gap slope {slope}");
}
