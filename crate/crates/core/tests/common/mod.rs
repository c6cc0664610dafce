#![allow(dead_code)]

use integral_indicator::{EnterpriseModel, MappedSeries, Matrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("c{i}")).collect()
}

pub fn series_from(values: Matrix) -> MappedSeries {
    let n = values.cols();
    MappedSeries::unmasked(&EnterpriseModel::new(values, labels(n)).unwrap())
}

/// Random `t_max x n` series; roughly one channel in eight is constant so that
/// degenerate windows show up.
pub fn random_series(rng: &mut StdRng, t_max: usize, n: usize) -> MappedSeries {
    let mut m = Matrix::zeros(t_max, n);
    for j in 0..n {
        let constant = rng.random_bool(0.125);
        let level: f64 = rng.random_range(-50.0..50.0);
        let spread: f64 = rng.random_range(0.1..20.0);
        for t in 0..t_max {
            let v = if constant {
                level
            } else {
                level + spread * rng.random_range(-1.0..1.0)
            };
            m.set(t, j, v);
        }
    }
    series_from(m)
}

/// `(t_max, n, k)` with `n <= 6`, `t_max <= 30`, `k` in 2..=6 and `t_max > k`.
pub fn random_shape(rng: &mut StdRng) -> (usize, usize, usize) {
    let k = rng.random_range(2..=6);
    let t_max = rng.random_range(k + 1..=30);
    let n = rng.random_range(1..=6);
    (t_max, n, k)
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn min_eigenvalue(r: &Matrix) -> f64 {
    let n = r.rows();
    let m = nalgebra::DMatrix::from_row_slice(n, n, r.as_slice());
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn max_diagonal(r: &Matrix) -> f64 {
    (0..r.rows())
        .map(|i| r.get(i, i))
        .fold(f64::NEG_INFINITY, f64::max)
}
