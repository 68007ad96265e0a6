use std::sync::atomic::{AtomicUsize, Ordering};

use control_neighbors::estimator::{AuxPolicy, AuxRule, EstimateRecord, Method};
use control_neighbors::harness::{
    builtin_integrands, fit_loglog, read_bench_csv, read_records_csv, run_bench, run_problem, write_bench_csv,
    write_records_csv, BenchConfig, Problem, SpaceKind,
};
use control_neighbors::spaces::DistributionSpec;
use proptest::prelude::*;

fn config(methods: Vec<Method>) -> BenchConfig {
    BenchConfig {
        methods,
        n_grid: vec![16, 32],
        reps: 3,
        base_seed: 77,
        aux: AuxRule::new(AuxPolicy::Fixed(2000)),
    }
}

#[test]
fn control_neighbors_add_no_integrand_calls() {
    let law = DistributionSpec::UniformCube { dim: 2 };
    let count = |methods: Vec<Method>| {
        let calls = AtomicUsize::new(0);
        let problem = Problem {
            label: "counted",
            eval: |p: &[f64]| {
                calls.fetch_add(1, Ordering::Relaxed);
                p[0] + p[1]
            },
            truth: 1.0,
            mass: 1.0,
        };
        run_problem(&problem, &law, &config(methods)).unwrap();
        calls.into_inner()
    };
    let plain = count(vec![Method::Mc]);
    assert_eq!(plain, (16 + 32) * 3);
    assert_eq!(count(vec![Method::Mc, Method::Cvnn, Method::CvnnLoo]), plain);
}

#[test]
fn methods_share_each_replication_sample() {
    let law = DistributionSpec::UniformCube { dim: 2 };
    let phi1 = builtin_integrands();
    let result = run_bench(phi1.get("phi1").unwrap(), &law, &config(vec![Method::Mc, Method::Cvnn])).unwrap();
    assert_eq!(result.records.len(), 2 * 2 * 3);
    for mc in result.records.iter().filter(|r| r.method == Method::Mc) {
        let twin = result
            .records
            .iter()
            .find(|r| r.method == Method::Cvnn && r.n == mc.n && r.rep == mc.rep)
            .unwrap();
        assert_eq!(twin.seed, mc.seed);
        assert_eq!(mc.aux_n, 0);
        assert_eq!(twin.aux_n, 2000);
    }
}

#[test]
fn bench_is_reproducible() {
    let law = DistributionSpec::UniformSphere { ambient: 3 };
    let registry = builtin_integrands();
    let phi3 = registry.get("phi3").unwrap();
    let mut cfg = config(vec![Method::Mc, Method::Cvnn]);
    cfg.reps = 2;
    let a = run_bench(phi3, &law, &cfg).unwrap();
    let b = run_bench(phi3, &law, &cfg).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.rows, b.rows);
    // sphere estimates carry the 4π surface measure
    let truth = phi3.true_value(&law).unwrap();
    assert!(a.records.iter().all(|r| (r.estimate - truth).abs() < 0.5 * truth));
}

#[test]
fn bench_rejects_bad_grids() {
    let law = DistributionSpec::UniformCube { dim: 2 };
    let registry = builtin_integrands();
    let phi1 = registry.get("phi1").unwrap();
    let mut cfg = config(vec![Method::Cvnn]);
    cfg.n_grid = vec![32, 16];
    assert!(run_bench(phi1, &law, &cfg).is_err());
    cfg.n_grid = vec![1, 4];
    assert!(run_bench(phi1, &law, &cfg).is_err());
    cfg.n_grid = vec![4, 8];
    cfg.reps = 1;
    assert!(run_bench(phi1, &law, &cfg).is_err());
}

#[test]
fn registry_covers_every_space() {
    let registry = builtin_integrands();
    for kind in SpaceKind::ALL {
        let law = kind.spec(if kind == SpaceKind::Sphere { 3 } else { 2 });
        assert!(registry.iter().any(|s| s.check_space(&law).is_ok()), "{}", kind.label());
    }
    let trace_1 = registry.get("trace_1").unwrap();
    assert!(trace_1.check_space(&DistributionSpec::UniformCube { dim: 2 }).is_err());
}

#[test]
fn bench_csv_round_trip() {
    let law = DistributionSpec::StandardGaussian { dim: 2 };
    let registry = builtin_integrands();
    let result = run_bench(
        registry.get("phi2").unwrap(),
        &law,
        &config(vec![Method::Mc, Method::Cvnn]),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bench.csv");
    write_bench_csv(&path, &result, &[("seed".into(), "77".into())]).unwrap();
    let rows = read_bench_csv(&path).unwrap();
    assert_eq!(rows.len(), result.rows.len());
    for ((method, n, rmse, reps, slope), row) in rows.iter().zip(&result.rows) {
        assert_eq!((*method, *n, *reps), (row.method, row.n, 3));
        assert_eq!(rmse.to_bits(), row.rmse.to_bits());
        assert_eq!(*slope, result.slope(row.method));
    }
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# seed=77\nmethod,n,rmse,reps,slope\n"));
}

#[test]
fn malformed_csv_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "method,n\nMC,3\n").unwrap();
    assert!(read_records_csv(&path).is_err());
    assert!(read_records_csv(&dir.path().join("missing.csv")).is_err());
}

#[test]
fn slope_fit_on_exact_power_law() {
    let ns = [64usize, 128, 256, 512];
    let ys: Vec<f64> = ns.iter().map(|&n| 0.7 * (n as f64).powf(-1.25)).collect();
    let (slope, _) = fit_loglog(&ns, &ys);
    assert!((slope + 1.25).abs() <= 1e-12);
}

fn any_record() -> impl Strategy<Value = EstimateRecord> {
    (
        prop::sample::select(vec![Method::Mc, Method::Cvnn, Method::CvnnLoo]),
        "[a-z0-9_, -]{0,10}",
        0usize..100,
        "[a-z0-9_\"]{0,10}",
        (0usize..1_000_000, 0usize..10_000_000, 0usize..1000, any::<u64>()),
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO,
        prop::option::of(-1e6..1e6f64),
    )
        .prop_map(
            |(method, space, dim, integrand, (n, aux_n, rep, seed), estimate, truth)| {
                let rec = EstimateRecord::new(method, n, aux_n, seed, estimate)
                    .with_labels(&space, dim, &integrand)
                    .with_rep(rep);
                match truth {
                    Some(t) => rec.with_truth(t),
                    None => rec,
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn record_csv_round_trip(records in prop::collection::vec(any_record(), 1000)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let comments = vec![("command".to_string(), "bench".to_string())];
        write_records_csv(&path, &records, &comments).unwrap();
        let back = read_records_csv(&path).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in back.iter().zip(&records) {
            prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
            prop_assert_eq!(a, b);
        }
    }
}
