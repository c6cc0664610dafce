//! Brute-force reference for the engine, written with explicit loops over the
//! coefficient definition and its own z-scoring. Tests compare the engine against it;
//! nothing in the pipeline calls it.

#![allow(clippy::needless_range_loop)]

use crate::engine::CorrelationMatrix;
use crate::enterprise::{MappedSeries, Normalization, DEGENERATE_REL_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Coefficient matrix and integral indicators for period `t`, computed directly.
pub fn naive_oracle(
    series: &MappedSeries,
    t: usize,
    k: usize,
    mode: Normalization,
) -> Result<(CorrelationMatrix, Vec<f64>)> {
    if k < 2 {
        return Err(Error::InvalidWindow(k));
    }
    if t <= k {
        return Err(Error::InsufficientHistory { t, k });
    }
    let n = series.n();

    // value of channel i at lag l (1-based), after optional z-scoring
    let mut lagged = vec![vec![0.0f64; k + 1]; n];
    for (i, lags) in lagged.iter_mut().enumerate() {
        for l in 1..=k {
            lags[l] = series.values().get(t - l - 1, i);
        }
        if mode == Normalization::Standardized {
            let mut mean = 0.0;
            for l in 1..=k {
                mean += lags[l];
            }
            mean /= k as f64;
            let mut ss = 0.0;
            let mut biggest = 0.0f64;
            for l in 1..=k {
                ss += (lags[l] - mean) * (lags[l] - mean);
                biggest = biggest.max(lags[l].abs());
            }
            let sd = (ss / (k as f64 - 1.0)).sqrt();
            let degenerate = sd == 0.0 || sd <= DEGENERATE_REL_TOL * biggest;
            for l in 1..=k {
                lags[l] = if degenerate {
                    0.0
                } else {
                    (lags[l] - mean) / sd
                };
            }
        }
    }

    let mut r = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut sum = 0.0;
            for l in 1..=k {
                sum += lagged[i][l] * lagged[j][l];
            }
            r.set(i, j, sum / (k as f64 - 1.0));
        }
    }

    let mut indicators = vec![0.0; n];
    for (i, v) in indicators.iter_mut().enumerate() {
        for j in 0..n {
            *v += r.get(i, j).abs();
        }
    }
    Ok((CorrelationMatrix { t, k, mode, r }, indicators))
}
