//! Scoring metrics, feature-importance rankings, and cluster-ablation
//! trials.
//!
//! Importance comes three ways: signed Pearson correlation against the
//! target, LASSO coefficient magnitude on the standardized scale, and
//! forest impurity importance. Ablation removes the cluster-count
//! columns of selected clusters and refits with the identical seed so
//! metric deltas isolate the clusters' contribution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ColumnLabel, SupervisedDataset};
use crate::learn::{
    forest_fit, forest_predict, lasso_fit, lasso_predict, ForestConfig, ForestModel, LassoConfig,
    LassoModel, LearnError,
};
use crate::matrix::Matrix;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("dimension mismatch: {a} vs {b}")]
    DimensionMismatch { a: usize, b: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("target variance is zero; r2 undefined")]
    ZeroVariance,
    #[error("too few rows: needed {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("dataset has no columns for cluster {0}")]
    UnknownCluster(i64),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

fn check_lengths(a: usize, b: usize) -> Result<(), EvalError> {
    if a != b {
        return Err(EvalError::DimensionMismatch { a, b });
    }
    if a == 0 {
        return Err(EvalError::EmptyInput);
    }
    Ok(())
}

pub fn mae(y_pred: &[f64], y_true: &[f64]) -> Result<f64, EvalError> {
    check_lengths(y_pred.len(), y_true.len())?;
    Ok(y_pred
        .iter()
        .zip(y_true)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / y_true.len() as f64)
}

pub fn mse(y_pred: &[f64], y_true: &[f64]) -> Result<f64, EvalError> {
    check_lengths(y_pred.len(), y_true.len())?;
    Ok(y_pred
        .iter()
        .zip(y_true)
        .map(|(p, t)| (p - t) * (p - t))
        .sum::<f64>()
        / y_true.len() as f64)
}

/// 1 - SSres/SStot; negative when predictions are worse than the mean.
pub fn r2(y_pred: &[f64], y_true: &[f64]) -> Result<f64, EvalError> {
    check_lengths(y_pred.len(), y_true.len())?;
    let mean = y_true.iter().sum::<f64>() / y_true.len() as f64;
    let ss_tot: f64 = y_true.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    let ss_res: f64 = y_pred
        .iter()
        .zip(y_true)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

/// Per-label f1 averaged with true-label support weights; labels with
/// undefined precision or recall contribute 0.
pub fn f1_weighted(
    labels_pred: &[i64],
    labels_true: &[i64],
    label_set: &[i64],
) -> Result<f64, EvalError> {
    check_lengths(labels_pred.len(), labels_true.len())?;
    let n = labels_true.len() as f64;
    let mut weighted = 0.0;
    for &label in label_set {
        let tp = labels_pred
            .iter()
            .zip(labels_true)
            .filter(|(p, t)| **p == label && **t == label)
            .count() as f64;
        let pred_count = labels_pred.iter().filter(|&&p| p == label).count() as f64;
        let true_count = labels_true.iter().filter(|&&t| t == label).count() as f64;
        if true_count == 0.0 {
            continue;
        }
        let precision = if pred_count > 0.0 { tp / pred_count } else { 0.0 };
        let recall = tp / true_count;
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        weighted += (true_count / n) * f1;
    }
    Ok(weighted)
}

/// Default category label set 1..6.
pub fn category_label_set() -> Vec<i64> {
    (1..=6).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMethod {
    Correlation,
    Lasso,
    Forest,
}

impl std::fmt::Display for ImportanceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ImportanceMethod::Correlation => write!(f, "correlation"),
            ImportanceMethod::Lasso => write!(f, "lasso"),
            ImportanceMethod::Forest => write!(f, "forest"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub method: ImportanceMethod,
    pub feature_name: String,
    pub time_offset: i32,
    /// Signed for correlation; nonnegative magnitude otherwise.
    pub importance: f64,
    pub rank: usize,
}

fn ranked_entries(
    method: ImportanceMethod,
    columns: &[ColumnLabel],
    scores: &[f64],
) -> Vec<ImportanceEntry> {
    let mut order: Vec<usize> = (0..columns.len()).collect();
    // descending magnitude; column order breaks exact ties
    order.sort_by(|&a, &b| scores[b].abs().total_cmp(&scores[a].abs()).then(a.cmp(&b)));
    order
        .into_iter()
        .enumerate()
        .map(|(rank, idx)| ImportanceEntry {
            method,
            feature_name: columns[idx].source.clone(),
            time_offset: columns[idx].offset,
            importance: scores[idx],
            rank: rank + 1,
        })
        .collect()
}

/// Pearson r of every predictor column against the target, ranked by
/// magnitude; zero-variance columns score 0.
pub fn correlation_importance(dataset: &SupervisedDataset) -> Result<Vec<ImportanceEntry>, EvalError> {
    let n = dataset.x.n_rows();
    if n < 3 {
        return Err(EvalError::TooFewRows { needed: 3, got: n });
    }
    let y = &dataset.y;
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let y_var: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();

    let scores: Vec<f64> = (0..dataset.x.n_cols())
        .map(|j| {
            let col = dataset.x.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
            if var == 0.0 || y_var == 0.0 {
                return 0.0;
            }
            let cov: f64 = col
                .iter()
                .zip(y)
                .map(|(x, t)| (x - mean) * (t - y_mean))
                .sum();
            cov / (var.sqrt() * y_var.sqrt())
        })
        .collect();
    Ok(ranked_entries(ImportanceMethod::Correlation, &dataset.columns, &scores))
}

/// |standardized coefficient| ranking from a fitted LASSO model.
pub fn lasso_importance(
    model: &LassoModel,
    columns: &[ColumnLabel],
) -> Result<Vec<ImportanceEntry>, EvalError> {
    if model.std_coefficients.len() != columns.len() {
        return Err(EvalError::DimensionMismatch {
            a: model.std_coefficients.len(),
            b: columns.len(),
        });
    }
    let scores: Vec<f64> = model.std_coefficients.iter().map(|c| c.abs()).collect();
    Ok(ranked_entries(ImportanceMethod::Lasso, columns, &scores))
}

/// Normalized impurity-decrease ranking from a fitted forest.
pub fn forest_importance_report(
    model: &ForestModel,
    columns: &[ColumnLabel],
) -> Result<Vec<ImportanceEntry>, EvalError> {
    if model.feature_importances.len() != columns.len() {
        return Err(EvalError::DimensionMismatch {
            a: model.feature_importances.len(),
            b: columns.len(),
        });
    }
    Ok(ranked_entries(
        ImportanceMethod::Forest,
        columns,
        &model.feature_importances,
    ))
}

/// Regression metrics over one prediction/target slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceMetrics {
    pub mae: f64,
    pub mse: f64,
    pub r2: Option<f64>,
    pub f1: Option<f64>,
}

pub fn regression_slice(y_pred: &[f64], y_true: &[f64]) -> Result<SliceMetrics, EvalError> {
    Ok(SliceMetrics {
        mae: mae(y_pred, y_true)?,
        mse: mse(y_pred, y_true)?,
        r2: r2(y_pred, y_true).ok(),
        f1: None,
    })
}

pub fn classification_slice(
    labels_pred: &[i64],
    labels_true: &[i64],
    label_set: &[i64],
) -> Result<SliceMetrics, EvalError> {
    let as_f64_pred: Vec<f64> = labels_pred.iter().map(|&v| v as f64).collect();
    let as_f64_true: Vec<f64> = labels_true.iter().map(|&v| v as f64).collect();
    Ok(SliceMetrics {
        mae: mae(&as_f64_pred, &as_f64_true)?,
        mse: mse(&as_f64_pred, &as_f64_true)?,
        r2: r2(&as_f64_pred, &as_f64_true).ok(),
        f1: Some(f1_weighted(labels_pred, labels_true, label_set)?),
    })
}

/// Metrics per dataset slice, keyed "full" / "train" / "test".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct EvalReport {
    pub slices: BTreeMap<String, SliceMetrics>,
}

/// Which learner an ablation trial refits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum AblationLearner {
    Lasso(LassoConfig),
    Forest(ForestConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AblationResult {
    pub removed_clusters: Vec<i64>,
    pub eval: EvalReport,
    /// (metric key, slice) -> ablated minus baseline.
    pub delta_vs_baseline: BTreeMap<String, f64>,
}

/// Fits the learner on the chronological train slice and scores the
/// full/train/test slices.
pub fn fit_and_evaluate(
    dataset: &SupervisedDataset,
    learner: &AblationLearner,
    test_fraction: f64,
) -> Result<EvalReport, EvalError> {
    let (train, test) = crate::dataset::chronological_split(dataset, test_fraction)
        .map_err(|_| EvalError::TooFewRows { needed: 2, got: dataset.x.n_rows() })?;
    let predict = |x: &Matrix| -> Result<Vec<f64>, EvalError> {
        match learner {
            AblationLearner::Lasso(config) => {
                let model = lasso_fit(&train.x, &train.y, config)?;
                Ok(lasso_predict(&model, x)?)
            }
            AblationLearner::Forest(config) => {
                let model = forest_fit(&train.x, &train.y, config)?;
                Ok(forest_predict(&model, x)?)
            }
        }
    };
    let mut report = EvalReport::default();
    let full_pred = predict(&dataset.x)?;
    report
        .slices
        .insert("full".to_string(), regression_slice(&full_pred, &dataset.y)?);
    let train_pred = predict(&train.x)?;
    report
        .slices
        .insert("train".to_string(), regression_slice(&train_pred, &train.y)?);
    let test_pred = predict(&test.x)?;
    report
        .slices
        .insert("test".to_string(), regression_slice(&test_pred, &test.y)?);
    Ok(report)
}

fn metric_deltas(baseline: &EvalReport, ablated: &EvalReport) -> BTreeMap<String, f64> {
    let mut deltas = BTreeMap::new();
    for (slice, metrics) in &ablated.slices {
        let base = &baseline.slices[slice];
        deltas.insert(format!("mae_{slice}"), metrics.mae - base.mae);
        deltas.insert(format!("mse_{slice}"), metrics.mse - base.mse);
        if let (Some(a), Some(b)) = (metrics.r2, base.r2) {
            deltas.insert(format!("r2_{slice}"), a - b);
        }
    }
    deltas
}

/// Removes the named clusters' count columns (all offsets), refits with
/// the identical seed and split, and reports metric deltas vs the
/// baseline fit on the intact dataset.
pub fn ablate_clusters(
    dataset: &SupervisedDataset,
    cluster_ids: &[i64],
    learner: &AblationLearner,
    test_fraction: f64,
) -> Result<AblationResult, EvalError> {
    let present = dataset.cluster_ids_present();
    for id in cluster_ids {
        if !present.contains(id) {
            return Err(EvalError::UnknownCluster(*id));
        }
    }
    let baseline = fit_and_evaluate(dataset, learner, test_fraction)?;
    let ablated_dataset = dataset.drop_columns(&dataset.cluster_column_indices(cluster_ids));
    let eval = fit_and_evaluate(&ablated_dataset, learner, test_fraction)?;
    let delta_vs_baseline = metric_deltas(&baseline, &eval);
    Ok(AblationResult {
        removed_clusters: cluster_ids.to_vec(),
        eval,
        delta_vs_baseline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::TargetKind;
    use crate::learn::Criterion;
    use crate::rng::Rng;

    #[test]
    fn mae_mse_fixture() {
        assert_eq!(mae(&[1.0, 3.0], &[1.0, 2.0]).unwrap(), 0.5);
        assert_eq!(mse(&[1.0, 3.0], &[1.0, 2.0]).unwrap(), 0.5);
    }

    #[test]
    fn r2_fixtures() {
        let y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(r2(&y, &y).unwrap(), 1.0);
        let mean_pred = [2.5; 4];
        assert_eq!(r2(&mean_pred, &y).unwrap(), 0.0);
        // anti-predictive: worse than the mean
        let anti = [4.0, 3.0, 2.0, 1.0];
        assert!(r2(&anti, &y).unwrap() < 0.0);
        assert!(matches!(
            r2(&[1.0, 2.0], &[3.0, 3.0]),
            Err(EvalError::ZeroVariance)
        ));
    }

    #[test]
    fn mae_bounded_by_rmse() {
        let mut rng = Rng::seed_from(19);
        for _ in 0..1000 {
            let n = 2 + rng.next_below(30) as usize;
            let pred: Vec<f64> = (0..n).map(|_| rng.next_f64_range(-5.0, 5.0)).collect();
            let truth: Vec<f64> = (0..n).map(|_| rng.next_f64_range(-5.0, 5.0)).collect();
            let mae_v = mae(&pred, &truth).unwrap();
            let mse_v = mse(&pred, &truth).unwrap();
            let max_abs = pred
                .iter()
                .zip(&truth)
                .map(|(p, t)| (p - t).abs())
                .fold(0.0f64, f64::max);
            assert!(mae_v <= mse_v.sqrt() + 1e-12);
            assert!(mse_v.sqrt() <= max_abs + 1e-12);
        }
    }

    #[test]
    fn f1_perfect_and_disjoint() {
        let labels = category_label_set();
        assert_eq!(f1_weighted(&[1, 2, 3], &[1, 2, 3], &labels).unwrap(), 1.0);
        assert_eq!(f1_weighted(&[4, 4, 4], &[1, 2, 3], &labels).unwrap(), 0.0);
    }

    #[test]
    fn f1_matches_confusion_matrix_oracle() {
        let mut rng = Rng::seed_from(20);
        for _ in 0..50 {
            let n = 5 + rng.next_below(60) as usize;
            let truth: Vec<i64> = (0..n).map(|_| 1 + rng.next_below(6) as i64).collect();
            let pred: Vec<i64> = (0..n).map(|_| 1 + rng.next_below(6) as i64).collect();

            // oracle: explicit confusion counts
            let mut expected = 0.0;
            for label in 1..=6i64 {
                let tp = (0..n).filter(|&i| pred[i] == label && truth[i] == label).count() as f64;
                let fp = (0..n).filter(|&i| pred[i] == label && truth[i] != label).count() as f64;
                let fn_ = (0..n).filter(|&i| pred[i] != label && truth[i] == label).count() as f64;
                let support = tp + fn_;
                if support == 0.0 {
                    continue;
                }
                let p = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
                let r = tp / support;
                let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
                expected += support / n as f64 * f1;
            }
            let got = f1_weighted(&pred, &truth, &category_label_set()).unwrap();
            assert!((got - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn f1_invariant_under_relabeling() {
        let truth = vec![1, 1, 2, 3, 3, 3];
        let pred = vec![1, 2, 2, 3, 1, 3];
        let base = f1_weighted(&pred, &truth, &[1, 2, 3]).unwrap();
        // consistent relabeling 1->10, 2->20, 3->30
        let map = |v: i64| v * 10;
        let truth2: Vec<i64> = truth.iter().map(|&v| map(v)).collect();
        let pred2: Vec<i64> = pred.iter().map(|&v| map(v)).collect();
        let relabeled = f1_weighted(&pred2, &truth2, &[10, 20, 30]).unwrap();
        assert_eq!(base, relabeled);
    }

    fn toy_dataset(x: Matrix, y: Vec<f64>) -> SupervisedDataset {
        let columns = (0..x.n_cols())
            .map(|j| ColumnLabel {
                source: format!("col{j}"),
                offset: -(j as i32) - 1,
            })
            .collect();
        SupervisedDataset {
            columns,
            x,
            y,
            target_kind: TargetKind::RegressionInflow,
        }
    }

    #[test]
    fn correlation_identity_and_negation() {
        let y = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let mut data = Vec::new();
        for v in &y {
            data.push(*v);
            data.push(-v);
            data.push(7.0);
        }
        let ds = toy_dataset(Matrix::from_vec(5, 3, data), y);
        let entries = correlation_importance(&ds).unwrap();
        assert_eq!(entries[0].rank, 1);
        assert!((entries[0].importance.abs() - 1.0).abs() < 1e-12);
        // both the identity and negated columns have |r| = 1
        assert!((entries[1].importance.abs() - 1.0).abs() < 1e-12);
        assert!(entries[0].importance * entries[1].importance < 0.0);
        // constant column scores 0 and ranks last
        assert_eq!(entries[2].importance, 0.0);
        assert_eq!(entries[2].rank, 3);
    }

    #[test]
    fn correlation_matches_textbook_formula() {
        let mut rng = Rng::seed_from(21);
        let n = 20;
        let p = 5;
        let data: Vec<f64> = (0..n * p).map(|_| rng.next_f64_range(-3.0, 3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.next_f64_range(-3.0, 3.0)).collect();
        let ds = toy_dataset(Matrix::from_vec(n, p, data), y.clone());
        let entries = correlation_importance(&ds).unwrap();
        let by_name: BTreeMap<&str, f64> = entries
            .iter()
            .map(|e| (e.feature_name.as_str(), e.importance))
            .collect();
        for j in 0..p {
            let col = ds.x.column(j);
            let mx = col.iter().sum::<f64>() / n as f64;
            let my = y.iter().sum::<f64>() / n as f64;
            let cov: f64 = col.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
                / n as f64;
            let sx = (col.iter().map(|v| (v - mx) * (v - mx)).sum::<f64>() / n as f64).sqrt();
            let sy = (y.iter().map(|v| (v - my) * (v - my)).sum::<f64>() / n as f64).sqrt();
            let expected = cov / (sx * sy);
            assert!((by_name[format!("col{j}").as_str()] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_invariant_under_affine_rescaling() {
        let mut rng = Rng::seed_from(22);
        let n = 30;
        let data: Vec<f64> = (0..n * 3).map(|_| rng.next_f64_range(-2.0, 2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.next_f64_range(-2.0, 2.0)).collect();
        let ds = toy_dataset(Matrix::from_vec(n, 3, data.clone()), y.clone());
        let base = correlation_importance(&ds).unwrap();

        // rescale column 1 by 100 and shift by 7
        let mut scaled = data;
        for i in 0..n {
            scaled[i * 3 + 1] = scaled[i * 3 + 1] * 100.0 + 7.0;
        }
        let ds2 = toy_dataset(Matrix::from_vec(n, 3, scaled), y);
        let rescaled = correlation_importance(&ds2).unwrap();
        let ranks = |entries: &[ImportanceEntry]| -> Vec<String> {
            entries.iter().map(|e| e.feature_name.clone()).collect()
        };
        assert_eq!(ranks(&base), ranks(&rescaled));
    }

    #[test]
    fn lasso_importance_single_survivor() {
        let columns = vec![
            ColumnLabel { source: "a".to_string(), offset: -1 },
            ColumnLabel { source: "b".to_string(), offset: -2 },
        ];
        let model = LassoModel {
            intercept: 0.0,
            coefficients: vec![0.0, 0.4],
            std_coefficients: vec![0.0, 0.9],
            converged: true,
            sweeps_used: 3,
            objective_trace: vec![],
        };
        let entries = lasso_importance(&model, &columns).unwrap();
        assert_eq!(entries[0].feature_name, "b");
        assert_eq!(entries[0].rank, 1);
        assert_eq!(entries[1].importance, 0.0);
    }

    #[test]
    fn forest_importance_entries_resum_to_one() {
        let mut rng = Rng::seed_from(23);
        let data: Vec<f64> = (0..80).map(|_| rng.next_f64_range(0.0, 1.0)).collect();
        let x = Matrix::from_vec(20, 4, data);
        let y: Vec<f64> = (0..20).map(|i| x.get(i, 1)).collect();
        let model = forest_fit(&x, &y, &ForestConfig::new(Criterion::Mse, 1)).unwrap();
        let columns: Vec<ColumnLabel> = (0..4)
            .map(|j| ColumnLabel { source: format!("f{j}"), offset: 0 })
            .collect();
        let entries = forest_importance_report(&model, &columns).unwrap();
        let total: f64 = entries.iter().map(|e| e.importance).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let ranks: Vec<usize> = entries.iter().map(|e| e.rank).collect();
        assert_eq!(ranks, vec![1, 2, 3, 4]);
    }

    fn dataset_with_clusters(rng: &mut Rng, zero_cluster: bool) -> SupervisedDataset {
        let n = 30;
        let mut columns = vec![
            ColumnLabel { source: "tr_inflow".to_string(), offset: -1 },
            ColumnLabel { source: "cluster_0".to_string(), offset: -1 },
            ColumnLabel { source: "cluster_1".to_string(), offset: 0 },
        ];
        columns.push(ColumnLabel { source: "mean_dev_time".to_string(), offset: -1 });
        let mut data = Vec::new();
        for _ in 0..n {
            data.push(rng.next_f64_range(0.0, 10.0));
            data.push(if zero_cluster { 0.0 } else { rng.next_f64_range(0.0, 3.0) });
            data.push(rng.next_f64_range(0.0, 3.0));
            data.push(rng.next_f64_range(0.0, 50.0));
        }
        let x = Matrix::from_vec(n, 4, data);
        let y: Vec<f64> = (0..n).map(|i| x.get(i, 0) * 0.8 + x.get(i, 2)).collect();
        SupervisedDataset {
            columns,
            x,
            y,
            target_kind: TargetKind::RegressionInflow,
        }
    }

    #[test]
    fn ablating_zero_column_changes_nothing() {
        let mut rng = Rng::seed_from(24);
        let ds = dataset_with_clusters(&mut rng, true);
        for learner in [
            AblationLearner::Forest(ForestConfig::new(Criterion::Mse, 11)),
            AblationLearner::Lasso(LassoConfig::default()),
        ] {
            let result = ablate_clusters(&ds, &[0], &learner, 0.2).unwrap();
            for (key, delta) in &result.delta_vs_baseline {
                assert_eq!(*delta, 0.0, "{key}");
            }
        }
    }

    #[test]
    fn ablating_causal_cluster_hurts() {
        let mut rng = Rng::seed_from(25);
        let ds = dataset_with_clusters(&mut rng, false);
        // cluster_1 is causal (y depends on it)
        let learner = AblationLearner::Forest(ForestConfig::new(Criterion::Mse, 11));
        let result = ablate_clusters(&ds, &[1], &learner, 0.2).unwrap();
        assert!(result.delta_vs_baseline["mae_full"] > 0.0);
    }

    #[test]
    fn ablating_unknown_cluster_errors() {
        let mut rng = Rng::seed_from(26);
        let ds = dataset_with_clusters(&mut rng, false);
        let learner = AblationLearner::Lasso(LassoConfig::default());
        assert!(matches!(
            ablate_clusters(&ds, &[9], &learner, 0.2),
            Err(EvalError::UnknownCluster(9))
        ));
    }

    #[test]
    fn removing_all_clusters_equals_no_cluster_dataset() {
        let mut rng = Rng::seed_from(27);
        let ds = dataset_with_clusters(&mut rng, false);
        let stripped = ds.drop_columns(&ds.cluster_column_indices(&[0, 1]));
        assert_eq!(stripped.columns.len(), 2);
        assert!(stripped.cluster_ids_present().is_empty());
        let learner = AblationLearner::Forest(ForestConfig::new(Criterion::Mse, 5));
        let via_ablation = ablate_clusters(&ds, &[0, 1], &learner, 0.2).unwrap();
        let direct = fit_and_evaluate(&stripped, &learner, 0.2).unwrap();
        assert_eq!(via_ablation.eval, direct);
    }
}
