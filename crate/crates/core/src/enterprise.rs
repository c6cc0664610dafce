//! Enterprise event model, competency mapping and budget feasibility.
//!
//! An enterprise is a dense grid of periods `1..=t_max` by `n` labelled event
//! channels (expenses and income, in thousand rubles). A competency mapping is a
//! binary `m x n` matrix saying which channels evidence which catalog competency;
//! applying it masks every channel no competency claims.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::DescriptorCatalog;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A window column whose standard deviation is at most this fraction of its
/// largest magnitude is treated as zero-variance.
pub const DEGENERATE_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnterpriseModel {
    events: Matrix,
    labels: Vec<String>,
}

impl EnterpriseModel {
    /// `events` is `t_max x n`; row `t - 1` holds period `t`.
    pub fn new(events: Matrix, labels: Vec<String>) -> Result<Self> {
        if events.rows() == 0 {
            return Err(Error::Validation("model needs at least one period".into()));
        }
        if events.cols() == 0 {
            return Err(Error::Validation("model needs at least one channel".into()));
        }
        if labels.len() != events.cols() {
            return Err(Error::Dimension(format!(
                "{} labels for {} channels",
                labels.len(),
                events.cols()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Validation(format!("duplicate channel label `{l}`")));
            }
        }
        if let Some(pos) = events.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite event at period {}, channel `{}`",
                pos / events.cols() + 1,
                labels[pos % events.cols()]
            )));
        }
        Ok(Self { events, labels })
    }

    pub fn t_max(&self) -> usize {
        self.events.rows()
    }

    pub fn n(&self) -> usize {
        self.events.cols()
    }

    pub fn events(&self) -> &Matrix {
        &self.events
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Event vector x(t) for a 1-based period.
    pub fn period(&self, t: usize) -> &[f64] {
        self.events.row(t - 1)
    }
}

/// Binary competency-to-channel mapping with per-competency costs and a budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetencyMapping {
    competency_ids: Vec<String>,
    flags: Vec<Vec<bool>>,
    costs: Vec<f64>,
    budget: f64,
}

impl CompetencyMapping {
    /// `flags[i][j]` is true when channel `j` evidences competency `i`.
    pub fn new(
        competency_ids: Vec<String>,
        flags: Vec<Vec<bool>>,
        costs: Vec<f64>,
        budget: f64,
        catalog: &DescriptorCatalog,
    ) -> Result<Self> {
        let m = competency_ids.len();
        if m == 0 {
            return Err(Error::Validation(
                "mapping needs at least one competency".into(),
            ));
        }
        if flags.len() != m || costs.len() != m {
            return Err(Error::Dimension(format!(
                "{m} competencies but {} flag rows and {} costs",
                flags.len(),
                costs.len()
            )));
        }
        let n = flags[0].len();
        if flags.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension("ragged flag matrix".into()));
        }
        let mut seen = HashSet::new();
        for id in &competency_ids {
            if !catalog.contains(id) {
                return Err(Error::NotFound(format!("competency `{id}` not in catalog")));
            }
            if !seen.insert(id.as_str()) {
                return Err(Error::Validation(format!("duplicate competency `{id}`")));
            }
        }
        for (id, c) in competency_ids.iter().zip(&costs) {
            if !c.is_finite() || *c < 0.0 {
                return Err(Error::Validation(format!(
                    "competency `{id}` has invalid cost {c}"
                )));
            }
        }
        if !budget.is_finite() || budget < 0.0 {
            return Err(Error::Validation(format!("invalid budget {budget}")));
        }
        Ok(Self {
            competency_ids,
            flags,
            costs,
            budget,
        })
    }

    pub fn m(&self) -> usize {
        self.competency_ids.len()
    }

    pub fn n(&self) -> usize {
        self.flags[0].len()
    }

    pub fn competency_ids(&self) -> &[String] {
        &self.competency_ids
    }

    pub fn flags(&self) -> &[Vec<bool>] {
        &self.flags
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    /// Column-wise OR of the flag matrix.
    pub fn active_channels(&self) -> Vec<bool> {
        (0..self.n())
            .map(|j| self.flags.iter().any(|row| row[j]))
            .collect()
    }

    fn is_active(&self, competency: usize) -> bool {
        self.flags[competency].iter().any(|&f| f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    pub total_cost: f64,
    pub budget: f64,
    pub satisfied: bool,
    pub active_competencies: Vec<String>,
}

/// Sums the cost of every competency that flags at least one channel.
pub fn check_budget(mapping: &CompetencyMapping) -> BudgetReport {
    let mut total_cost = 0.0;
    let mut active_competencies = Vec::new();
    for i in 0..mapping.m() {
        if mapping.is_active(i) {
            total_cost += mapping.costs[i];
            active_competencies.push(mapping.competency_ids[i].clone());
        }
    }
    BudgetReport {
        total_cost,
        budget: mapping.budget,
        satisfied: total_cost <= mapping.budget,
        active_competencies,
    }
}

/// How window blocks are normalized before the Gram product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Masked values enter the coefficient formula as they are.
    #[default]
    Raw,
    /// Each window column is z-scored first, so coefficients are Pearson correlations.
    Standardized,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Raw => "raw",
            Normalization::Standardized => "standardized",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Normalization::Raw),
            "standardized" => Ok(Normalization::Standardized),
            other => Err(Error::Validation(format!(
                "unknown mode `{other}` (expected raw or standardized)"
            ))),
        }
    }
}

/// Event series after competency masking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappedSeries {
    values: Matrix,
    labels: Vec<String>,
    mode: Normalization,
    masked: Vec<usize>,
}

impl MappedSeries {
    /// Uses every channel of the model unmasked.
    pub fn unmasked(model: &EnterpriseModel) -> Self {
        Self {
            values: model.events.clone(),
            labels: model.labels.clone(),
            mode: Normalization::Raw,
            masked: Vec::new(),
        }
    }

    pub fn with_mode(mut self, mode: Normalization) -> Self {
        self.mode = mode;
        self
    }

    pub fn t_max(&self) -> usize {
        self.values.rows()
    }

    pub fn n(&self) -> usize {
        self.values.cols()
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn mode(&self) -> Normalization {
        self.mode
    }

    /// Zero-based indices of channels no competency claims.
    pub fn masked_channels(&self) -> &[usize] {
        &self.masked
    }

    pub fn period(&self, t: usize) -> &[f64] {
        self.values.row(t - 1)
    }

    pub fn to_model(&self) -> EnterpriseModel {
        EnterpriseModel {
            events: self.values.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Rows `v(t-1), v(t-2), ..., v(t-k)` without normalization.
    pub fn window_rows(&self, t: usize, k: usize) -> Result<Matrix> {
        check_window(t, k)?;
        if t > self.t_max() + 1 {
            return Err(Error::Validation(format!(
                "period {t} beyond series end {}",
                self.t_max() + 1
            )));
        }
        let n = self.n();
        let mut block = Matrix::zeros(k, n);
        for l in 1..=k {
            block.row_mut(l - 1).copy_from_slice(self.period(t - l));
        }
        Ok(block)
    }
}

pub(crate) fn check_window(t: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidWindow(k));
    }
    if t <= k {
        return Err(Error::InsufficientHistory { t, k });
    }
    Ok(())
}

/// Masks unclaimed channels to zero after checking dimensions and budget.
pub fn apply_mapping(model: &EnterpriseModel, mapping: &CompetencyMapping) -> Result<MappedSeries> {
    if mapping.n() != model.n() {
        return Err(Error::Dimension(format!(
            "mapping has {} channel columns, model has {}",
            mapping.n(),
            model.n()
        )));
    }
    let report = check_budget(mapping);
    if !report.satisfied {
        return Err(Error::BudgetExceeded {
            total_cost: report.total_cost,
            budget: report.budget,
        });
    }
    let active = mapping.active_channels();
    let mut values = model.events.clone();
    for t in 0..values.rows() {
        for (v, &on) in values.row_mut(t).iter_mut().zip(&active) {
            if !on {
                *v = 0.0;
            }
        }
    }
    let masked = active
        .iter()
        .enumerate()
        .filter_map(|(j, &on)| (!on).then_some(j))
        .collect();
    Ok(MappedSeries {
        values,
        labels: model.labels.clone(),
        mode: Normalization::Raw,
        masked,
    })
}

/// A window block together with the columns found to have zero variance.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedBlock {
    pub block: Matrix,
    pub degenerate: Vec<bool>,
}

/// Z-scores each column (sample standard deviation, divisor `rows - 1`).
/// Zero-variance columns become all-zero and are flagged degenerate.
pub fn standardize_block(block: &Matrix) -> StandardizedBlock {
    let (k, n) = (block.rows(), block.cols());
    let mut out = Matrix::zeros(k, n);
    let mut degenerate = vec![false; n];
    for (j, flag) in degenerate.iter_mut().enumerate() {
        let col = block.column(j);
        let mean = col.iter().sum::<f64>() / k as f64;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = (ss / (k as f64 - 1.0)).sqrt();
        let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sd <= DEGENERATE_REL_TOL * scale || sd == 0.0 {
            *flag = true;
            continue;
        }
        for (l, v) in col.iter().enumerate() {
            out.set(l, j, (v - mean) / sd);
        }
    }
    StandardizedBlock {
        block: out,
        degenerate,
    }
}

/// Standardized window of periods `t-1 ... t-k`.
pub fn standardize_window(series: &MappedSeries, t: usize, k: usize) -> Result<StandardizedBlock> {
    Ok(standardize_block(&series.window_rows(t, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(rows: &[&[f64]]) -> EnterpriseModel {
        let n = rows[0].len();
        EnterpriseModel::new(
            Matrix::from_rows(rows).unwrap(),
            (1..=n).map(|i| format!("c{i}")).collect(),
        )
        .unwrap()
    }

    fn mapping(
        ids: &[&str],
        flags: Vec<Vec<bool>>,
        costs: Vec<f64>,
        budget: f64,
    ) -> CompetencyMapping {
        CompetencyMapping::new(
            ids.iter().map(|s| s.to_string()).collect(),
            flags,
            costs,
            budget,
            &DescriptorCatalog::bundled(),
        )
        .unwrap()
    }

    #[test]
    fn model_rejects_bad_input() {
        let m = Matrix::from_rows(&[[1.0, f64::NAN]]).unwrap();
        assert!(EnterpriseModel::new(m, vec!["a".into(), "b".into()]).is_err());
        let m = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(EnterpriseModel::new(m.clone(), vec!["a".into(), "a".into()]).is_err());
        assert!(EnterpriseModel::new(m, vec!["a".into()]).is_err());
        assert!(EnterpriseModel::new(Matrix::zeros(0, 2), vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn mapping_rejects_unknown_competency() {
        let err = CompetencyMapping::new(
            vec!["7.1".into()],
            vec![vec![true]],
            vec![1.0],
            1.0,
            &DescriptorCatalog::bundled(),
        );
        assert!(matches!(err, Err(Error::NotFound(_))));
    }

    #[test]
    fn budget_single_competency_from_experiment() {
        let m = mapping(
            &["1.1"],
            vec![vec![true, false]],
            vec![28_208.0],
            5_669_650.0,
        );
        let r = check_budget(&m);
        assert_eq!(r.total_cost, 28_208.0);
        assert!(r.satisfied);
    }

    #[test]
    fn budget_no_active_competency() {
        let m = mapping(
            &["1.1", "2.1"],
            vec![vec![false; 3]; 2],
            vec![5.0, 7.0],
            0.0,
        );
        let r = check_budget(&m);
        assert_eq!(r.total_cost, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn budget_violation() {
        let m = mapping(
            &["1.1", "2.1"],
            vec![vec![true, false], vec![false, true]],
            vec![10.0, 20.0],
            25.0,
        );
        let r = check_budget(&m);
        assert_eq!(r.total_cost, 30.0);
        assert!(!r.satisfied);
        let x = model(&[&[1.0, 2.0]]);
        match apply_mapping(&x, &m) {
            Err(Error::BudgetExceeded { total_cost, .. }) => assert_eq!(total_cost, 30.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn full_mask_is_identity() {
        let x = model(&[&[1.0, -2.0], &[3.5, 4.0]]);
        let m = mapping(&["1.1"], vec![vec![true, true]], vec![0.0], 0.0);
        let s = apply_mapping(&x, &m).unwrap();
        assert_eq!(s.values(), x.events());
        assert!(s.masked_channels().is_empty());
        assert_eq!(s.mode(), Normalization::Raw);
    }

    #[test]
    fn empty_mask_zeroes_everything() {
        let x = model(&[&[1.0, -2.0, 3.0], &[3.5, 4.0, 1.0]]);
        let m = mapping(&["1.1"], vec![vec![false; 3]], vec![0.0], 0.0);
        let s = apply_mapping(&x, &m).unwrap();
        assert!(s.values().as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(s.masked_channels(), &[0, 1, 2]);
    }

    #[test]
    fn partial_mask_matches_elementwise_oracle() {
        let rows: Vec<[f64; 3]> = (0..4)
            .map(|t| [t as f64 + 0.5, -(t as f64) * 2.0, 10.0 - t as f64])
            .collect();
        let x = EnterpriseModel::new(
            Matrix::from_rows(&rows).unwrap(),
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let m = mapping(
            &["1.1", "2.2"],
            vec![vec![true, false, false], vec![false, false, true]],
            vec![1.0, 1.0],
            2.0,
        );
        let s = apply_mapping(&x, &m).unwrap();
        let keep = [true, false, true];
        for (t, row) in rows.iter().enumerate() {
            for j in 0..3 {
                let expected = if keep[j] { row[j] } else { 0.0 };
                assert_eq!(s.values().get(t, j), expected);
            }
        }
        assert_eq!(s.masked_channels(), &[1]);
    }

    #[test]
    fn dimension_mismatch() {
        let x = model(&[&[1.0, 2.0, 3.0]]);
        let m = mapping(&["1.1"], vec![vec![true, true]], vec![0.0], 0.0);
        assert!(matches!(apply_mapping(&x, &m), Err(Error::Dimension(_))));
    }

    #[test]
    fn mapping_is_idempotent() {
        let x = model(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let m = mapping(&["1.1"], vec![vec![true, false, true]], vec![0.0], 0.0);
        let once = apply_mapping(&x, &m).unwrap();
        let twice = apply_mapping(&once.to_model(), &m).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn standardize_hand_computed() {
        // window rows are t-1, t-2, t-3 = 3, 2, 1 for t = 4
        let x = model(&[&[1.0, 5.0], &[2.0, 5.0], &[3.0, 5.0]]);
        let s = MappedSeries::unmasked(&x);
        let w = standardize_window(&s, 4, 3).unwrap();
        assert_eq!(w.block.column(0), vec![1.0, 0.0, -1.0]);
        assert_eq!(w.block.column(1), vec![0.0, 0.0, 0.0]);
        assert_eq!(w.degenerate, vec![false, true]);
    }

    #[test]
    fn standardize_is_idempotent() {
        let x = model(&[&[1.0, 0.3], &[2.5, -1.0], &[-3.0, 4.0], &[7.0, 2.0]]);
        let s = MappedSeries::unmasked(&x);
        let once = standardize_window(&s, 5, 4).unwrap();
        let twice = standardize_block(&once.block);
        for (a, b) in once.block.as_slice().iter().zip(twice.block.as_slice()) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn standardize_window_errors() {
        let x = model(&[&[1.0], &[2.0], &[3.0]]);
        let s = MappedSeries::unmasked(&x);
        assert!(matches!(
            standardize_window(&s, 3, 3),
            Err(Error::InsufficientHistory { t: 3, k: 3 })
        ));
        assert!(matches!(
            standardize_window(&s, 3, 1),
            Err(Error::InvalidWindow(1))
        ));
    }

    #[test]
    fn mode_parses() {
        assert_eq!("raw".parse::<Normalization>().unwrap(), Normalization::Raw);
        assert_eq!(
            "standardized".parse::<Normalization>().unwrap(),
            Normalization::Standardized
        );
        assert!("pearson".parse::<Normalization>().is_err());
    }
}
