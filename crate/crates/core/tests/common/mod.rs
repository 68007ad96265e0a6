//! Brute-force references shared by the integration tests.
#![allow(dead_code)]

use control_neighbors::spaces::squared_euclidean;

/// Integral over `[0, 1]` of the 1-NN interpolant of `(xs, vs)` with point
/// `skip` removed, by sorting the survivors and summing interval widths.
pub fn interp_integral_1d(xs: &[f64], vs: &[f64], skip: Option<usize>) -> f64 {
    interp_integral_on(xs, vs, skip, 0.0, 1.0)
}

/// As [`interp_integral_1d`], restricted to `[a, b]`.
pub fn interp_integral_on(xs: &[f64], vs: &[f64], skip: Option<usize>, a: f64, b: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(vs)
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, (&x, &v))| (x, v))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    for k in 0..pts.len() {
        let lo = if k == 0 { 0.0 } else { 0.5 * (pts[k - 1].0 + pts[k].0) };
        let hi = if k + 1 == pts.len() {
            1.0
        } else {
            0.5 * (pts[k].0 + pts[k + 1].0)
        };
        let overlap = (hi.min(b) - lo.max(a)).max(0.0);
        total += overlap * pts[k].1;
    }
    total
}

/// Bounds of the Voronoi cell of point `j` in `[0, 1]`.
pub fn cell_bounds_1d(xs: &[f64], j: usize) -> (f64, f64) {
    let lo = xs
        .iter()
        .filter(|&&x| x < xs[j])
        .fold(0.0f64, |m, &x| m.max(0.5 * (x + xs[j])));
    let hi = xs
        .iter()
        .filter(|&&x| x > xs[j])
        .fold(1.0f64, |m, &x| m.min(0.5 * (x + xs[j])));
    (lo, hi)
}

/// Volume of the cell of `j` once `skip` is removed.
pub fn cell_volume_1d(xs: &[f64], j: usize, skip: Option<usize>) -> f64 {
    let indicator: Vec<f64> = (0..xs.len()).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
    interp_integral_1d(xs, &indicator, skip)
}

/// Indices of the `k` nearest rows to `q`, ordered by (distance, index),
/// skipping `exclude`.
pub fn brute_knn(flat: &[f64], dim: usize, q: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = flat
        .chunks(dim)
        .enumerate()
        .filter(|(i, _)| Some(*i) != exclude)
        .map(|(i, p)| (squared_euclidean(p, q), i))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(_, i)| i).collect()
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}
