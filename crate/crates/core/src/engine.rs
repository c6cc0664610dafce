//! Sliding-window correlation matrices and integral indicators.
//!
//! For a period `t` and window length `k`, the window block stacks the channel
//! vectors of periods `t-1, ..., t-k`. The coefficient matrix is the Gram product
//! of that block scaled by `1/(k-1)`, and a channel's integral indicator is the
//! absolute row sum of the matrix (diagonal included). Periods `t <= k` have no
//! full window and are not evaluable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enterprise::{standardize_block, MappedSeries, Normalization};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_WINDOW: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowMatrix {
    pub t: usize,
    pub k: usize,
    pub mode: Normalization,
    /// `k x n`; row `l - 1` is the (possibly standardized) vector of period `t - l`.
    pub block: Matrix,
    /// Zero-variance columns; always all false in raw mode.
    pub degenerate: Vec<bool>,
}

impl WindowMatrix {
    pub fn n(&self) -> usize {
        self.block.cols()
    }
}

/// Builds the window block for period `t`, standardizing columns when the series is in
/// standardized mode.
pub fn build_window_matrix(series: &MappedSeries, t: usize, k: usize) -> Result<WindowMatrix> {
    window_with_mode(series, t, k, series.mode())
}

fn window_with_mode(
    series: &MappedSeries,
    t: usize,
    k: usize,
    mode: Normalization,
) -> Result<WindowMatrix> {
    let raw = series.window_rows(t, k)?;
    let (block, degenerate) = match mode {
        Normalization::Raw => {
            let n = raw.cols();
            (raw, vec![false; n])
        }
        Normalization::Standardized => {
            let s = standardize_block(&raw);
            (s.block, s.degenerate)
        }
    };
    Ok(WindowMatrix {
        t,
        k,
        mode,
        block,
        degenerate,
    })
}

/// `(1/(k-1)) * sum_l block[l][i] * block[l][j]`.
pub fn pairwise_coefficient(window: &WindowMatrix, i: usize, j: usize) -> f64 {
    let sum: f64 = window.block.iter_rows().map(|row| row[i] * row[j]).sum();
    sum / (window.k as f64 - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub t: usize,
    pub k: usize,
    pub mode: Normalization,
    pub r: Matrix,
}

/// Scaled Gram product of the window block. Only the upper triangle is accumulated;
/// the lower triangle is mirrored so the result is exactly symmetric.
pub fn correlation_matrix(window: &WindowMatrix) -> CorrelationMatrix {
    let n = window.n();
    let mut acc = vec![0.0f64; n * n];
    gram_upper(&window.block, &mut acc);
    let scale = window.k as f64 - 1.0;
    let mut r = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = acc[i * n + j] / scale;
            r.set(i, j, v);
            r.set(j, i, v);
        }
    }
    CorrelationMatrix {
        t: window.t,
        k: window.k,
        mode: window.mode,
        r,
    }
}

// acc[i*n + j] (j >= i) += sum over rows of row[i] * row[j], rows taken in order
fn gram_upper(block: &Matrix, acc: &mut [f64]) {
    let n = block.cols();
    for row in block.iter_rows() {
        for i in 0..n {
            let xi = row[i];
            let dst = &mut acc[i * n + i..(i + 1) * n];
            for (a, xj) in dst.iter_mut().zip(&row[i..]) {
                *a += xi * xj;
            }
        }
    }
}

/// Absolute row sums of the coefficient matrix, summed in channel order.
pub fn integral_indicator(corr: &CorrelationMatrix) -> Vec<f64> {
    corr.r
        .iter_rows()
        .map(|row| row.iter().map(|v| v.abs()).sum())
        .collect()
}

/// Per-period integral indicators over the evaluable range and their grand total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub k: usize,
    pub mode: Normalization,
    /// First evaluable period, always `k + 1`.
    pub first_period: usize,
    /// `components[p][i]` is `V_i(first_period + p)`.
    pub components: Vec<Vec<f64>>,
    pub total: f64,
}

impl IndicatorSeries {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn last_period(&self) -> usize {
        self.first_period + self.len() - 1
    }

    pub fn periods(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).map(|p| self.first_period + p)
    }

    /// Aggregate `sum_i V_i(t)` per period.
    pub fn row_sums(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.iter().sum()).collect()
    }

    pub fn column(&self) -> IndicatorColumn {
        IndicatorColumn {
            first_period: self.first_period,
            values: self.row_sums(),
        }
    }
}

/// Computes `V_i(t)` for every `t` in `k+1..=t_max`. Periods are evaluated in
/// parallel; each period's sums run in fixed channel order and the total is
/// accumulated sequentially, so results do not depend on thread scheduling.
pub fn indicator_series(
    series: &MappedSeries,
    k: usize,
    mode: Normalization,
) -> Result<IndicatorSeries> {
    if k < 2 {
        return Err(Error::InvalidWindow(k));
    }
    if series.t_max() <= k {
        return Err(Error::InsufficientData {
            t_max: series.t_max(),
            k,
        });
    }
    let components = (k + 1..=series.t_max())
        .into_par_iter()
        .map(|t| {
            let window = window_with_mode(series, t, k, mode)?;
            Ok(integral_indicator(&correlation_matrix(&window)))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = components.iter().map(|c| c.iter().sum::<f64>()).sum();
    Ok(IndicatorSeries {
        k,
        mode,
        first_period: k + 1,
        components,
        total,
    })
}

/// Aggregate indicator values for a contiguous run of periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorColumn {
    pub first_period: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeComparison {
    pub first_period: usize,
    pub basic: Vec<f64>,
    pub treated: Vec<f64>,
    /// `treated - basic` per period.
    pub delta: Vec<f64>,
    pub total_basic: f64,
    pub total_treated: f64,
    pub total_delta: f64,
}

impl RegimeComparison {
    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    pub fn periods(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).map(|p| self.first_period + p)
    }
}

pub fn compare_regimes(
    basic: &IndicatorColumn,
    treated: &IndicatorColumn,
) -> Result<RegimeComparison> {
    if basic.first_period != treated.first_period || basic.values.len() != treated.values.len() {
        return Err(Error::PeriodMismatch(format!(
            "basic covers {}..+{}, treated covers {}..+{}",
            basic.first_period,
            basic.values.len(),
            treated.first_period,
            treated.values.len()
        )));
    }
    let delta: Vec<f64> = basic
        .values
        .iter()
        .zip(&treated.values)
        .map(|(b, d)| d - b)
        .collect();
    Ok(RegimeComparison {
        first_period: basic.first_period,
        total_basic: basic.values.iter().sum(),
        total_treated: treated.values.iter().sum(),
        total_delta: delta.iter().sum(),
        basic: basic.values.clone(),
        treated: treated.values.clone(),
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enterprise::EnterpriseModel;

    fn series(rows: &[&[f64]]) -> MappedSeries {
        let n = rows[0].len();
        let model = EnterpriseModel::new(
            Matrix::from_rows(rows).unwrap(),
            (1..=n).map(|i| format!("c{i}")).collect(),
        )
        .unwrap();
        MappedSeries::unmasked(&model)
    }

    fn window(cols: &[&[f64]]) -> WindowMatrix {
        let k = cols[0].len();
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|l| cols.iter().map(|c| c[l]).collect())
            .collect();
        WindowMatrix {
            t: k + 1,
            k,
            mode: Normalization::Raw,
            block: Matrix::from_rows(&rows).unwrap(),
            degenerate: vec![false; cols.len()],
        }
    }

    #[test]
    fn window_rows_run_backwards() {
        let s = series(&[&[1.0], &[2.0], &[3.0], &[4.0], &[5.0]]);
        let w = build_window_matrix(&s, 4, 3).unwrap();
        assert_eq!(w.block.column(0), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn window_boundary_errors() {
        let s = series(&[&[1.0], &[2.0], &[3.0]]);
        assert!(matches!(
            build_window_matrix(&s, 3, 3),
            Err(Error::InsufficientHistory { .. })
        ));
        assert!(matches!(
            build_window_matrix(&s, 3, 1),
            Err(Error::InvalidWindow(1))
        ));
    }

    #[test]
    fn coefficient_hand_computed() {
        let w = window(&[&[1.0, 2.0, 3.0], &[2.0, 0.0, 1.0]]);
        assert_eq!(pairwise_coefficient(&w, 0, 1), 2.5);
        let w = window(&[&[0.0, 0.0, 0.0], &[2.0, 0.0, 1.0]]);
        assert_eq!(pairwise_coefficient(&w, 0, 0), 0.0);
        assert_eq!(pairwise_coefficient(&w, 0, 1), 0.0);
    }

    #[test]
    fn gram_hand_computed() {
        let c = correlation_matrix(&window(&[&[1.0, 2.0, 3.0], &[2.0, 0.0, 1.0]]));
        assert_eq!(c.r, Matrix::from_rows(&[[7.0, 2.5], [2.5, 2.5]]).unwrap());
        let z = correlation_matrix(&window(&[&[0.0, 0.0], &[0.0, 0.0]]));
        assert!(z.r.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn standardized_self_coefficient_is_one() {
        let s = series(&[&[1.0, 4.0], &[3.0, 4.0], &[2.0, 4.0], &[8.0, 4.0]])
            .with_mode(Normalization::Standardized);
        let w = build_window_matrix(&s, 5, 4).unwrap();
        assert!((pairwise_coefficient(&w, 0, 0) - 1.0).abs() <= 1e-9);
        assert_eq!(pairwise_coefficient(&w, 1, 1), 0.0);
        assert_eq!(w.degenerate, vec![false, true]);
    }

    #[test]
    fn indicator_examples() {
        let id = CorrelationMatrix {
            t: 4,
            k: 3,
            mode: Normalization::Raw,
            r: Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap(),
        };
        assert_eq!(integral_indicator(&id), vec![1.0, 1.0, 1.0]);
        let r = CorrelationMatrix {
            r: Matrix::from_rows(&[[2.5, -1.0], [-1.0, 0.5]]).unwrap(),
            ..id.clone()
        };
        assert_eq!(integral_indicator(&r), vec![3.5, 1.5]);
        let z = CorrelationMatrix {
            r: Matrix::zeros(2, 2),
            ..id
        };
        assert_eq!(integral_indicator(&z), vec![0.0, 0.0]);
    }

    #[test]
    fn zero_series_has_zero_total() {
        let s = series(&[&[0.0, 0.0] as &[f64]; 6]);
        let ind = indicator_series(&s, 3, Normalization::Raw).unwrap();
        assert_eq!(ind.first_period, 4);
        assert_eq!(ind.len(), 3);
        assert_eq!(ind.total, 0.0);
    }

    #[test]
    fn single_channel_standardized_is_unit() {
        let s = series(&[
            &[3.0],
            &[1.0],
            &[4.0],
            &[1.0],
            &[5.0],
            &[9.0],
            &[2.0],
            &[6.0],
        ]);
        let ind = indicator_series(&s, 3, Normalization::Standardized).unwrap();
        for c in &ind.components {
            assert!((c[0] - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn single_channel_raw_hand_computed() {
        let s = series(&[&[2.0], &[4.0], &[0.0]]);
        let w = build_window_matrix(&s, 3, 2).unwrap();
        let c = correlation_matrix(&w);
        assert_eq!(c.r.get(0, 0), 20.0);
        assert_eq!(integral_indicator(&c), vec![20.0]);
    }

    #[test]
    fn series_needs_evaluable_periods() {
        let s = series(&[&[1.0] as &[f64]; 3]);
        assert!(matches!(
            indicator_series(&s, 3, Normalization::Raw),
            Err(Error::InsufficientData { t_max: 3, k: 3 })
        ));
        assert!(matches!(
            indicator_series(&s, 1, Normalization::Raw),
            Err(Error::InvalidWindow(1))
        ));
    }

    #[test]
    fn compare_first_row_of_published_table() {
        let basic = IndicatorColumn {
            first_period: 1,
            values: vec![87.34],
        };
        let treated = IndicatorColumn {
            first_period: 1,
            values: vec![110.64],
        };
        let c = compare_regimes(&basic, &treated).unwrap();
        assert!((c.delta[0] - 23.30).abs() <= 1e-9);
    }

    #[test]
    fn compare_published_totals() {
        let c = compare_regimes(
            &IndicatorColumn {
                first_period: 1,
                values: vec![5069.93],
            },
            &IndicatorColumn {
                first_period: 1,
                values: vec![5491.28],
            },
        )
        .unwrap();
        assert!((c.total_delta - 421.35).abs() <= 1e-9 * 421.35);
    }

    #[test]
    fn compare_self_is_zero() {
        let col = IndicatorColumn {
            first_period: 13,
            values: vec![1.5, 2.25, 1e6],
        };
        let c = compare_regimes(&col, &col).unwrap();
        assert!(c.delta.iter().all(|&d| d == 0.0));
        assert_eq!(c.total_delta, 0.0);
        assert_eq!(c.periods().collect::<Vec<_>>(), vec![13, 14, 15]);
    }

    #[test]
    fn compare_rejects_misaligned_periods() {
        let a = IndicatorColumn {
            first_period: 4,
            values: vec![1.0, 2.0],
        };
        let b = IndicatorColumn {
            first_period: 5,
            values: vec![1.0, 2.0],
        };
        assert!(matches!(
            compare_regimes(&a, &b),
            Err(Error::PeriodMismatch(_))
        ));
        let c = IndicatorColumn {
            first_period: 4,
            values: vec![1.0],
        };
        assert!(matches!(
            compare_regimes(&a, &c),
            Err(Error::PeriodMismatch(_))
        ));
    }
}
