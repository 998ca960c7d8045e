//! End-to-end orchestration: validate, synth, test1 (inflow prediction),
//! test2 (footprint clustering), test3 (cluster-augmented prediction),
//! and the combined `all` run.
//!
//! Every stage is a library function returning plain data; the CLI only
//! parses flags and prints. Given the same corpus bytes and RunConfig,
//! every emitted byte is identical across reruns and thread counts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::{
    attach_silhouette, default_eps_values, default_min_pts_values,
    grid_search_dbscan_with_distances, kmeans_fit, select_model, ClusterAlgorithm, ClusterError,
    ClusterModel, DbscanConfig, KMeansConfig, PairwiseDistances, SelectionPolicy,
};
use crate::corpus::{
    build_footprints, consolidate_rare_subsystems, corpus_inflow_stats, cumulative_inflow_curve,
    link_features_to_releases, load_corpus_dir, save_corpus, CorpusBundle, CorpusError,
    FootprintLevel, FootprintMeasure, InflowCurve, InflowStats, CONSOLIDATION_THRESHOLD,
};
use crate::dataset::{
    aggregate_periods, augment_with_clusters, build_lagged, chronological_split, DatasetError,
    Granularity, LagConfig, SupervisedDataset, TargetKind,
};
use crate::evaluate::{
    category_label_set, classification_slice, correlation_importance, fit_and_evaluate,
    forest_importance_report, lasso_importance, AblationLearner, AblationResult, EvalError,
    EvalReport, ImportanceEntry,
};
use crate::learn::{
    forest_fit, forest_predict, lasso_fit, svc_fit, svc_predict, Criterion, ForestConfig,
    LassoConfig, LearnError, SvcConfig,
};
use crate::matrix::Matrix;
use crate::preprocess::{fit as fit_scaler, FittedScaler, PreprocessError, ScalerKind, ScalerSpec};
use crate::rng::Rng;
use crate::synth::{generate_corpus, GroundTruth, SynthConfig, SynthError};

pub mod report;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{stage}: {source}")]
    Corpus {
        stage: &'static str,
        source: CorpusError,
    },
    #[error("{stage}: {source}")]
    Dataset {
        stage: &'static str,
        source: DatasetError,
    },
    #[error("{stage}: {source}")]
    Preprocess {
        stage: &'static str,
        source: PreprocessError,
    },
    #[error("{stage}: {source}")]
    Cluster {
        stage: &'static str,
        source: ClusterError,
    },
    #[error("{stage}: {source}")]
    Learn {
        stage: &'static str,
        source: LearnError,
    },
    #[error("{stage}: {source}")]
    Eval {
        stage: &'static str,
        source: EvalError,
    },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("configuration: {0}")]
    Config(String),
    #[error("io: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl PipelineError {
    /// 1 = validation failure, 2 = configuration error, 3 = internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Corpus { .. } => 1,
            PipelineError::Synth(_) | PipelineError::Config(_) => 2,
            _ => 3,
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> PipelineError {
    PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Full run configuration; JSON-loadable via `--config`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Load the corpus from this directory; when absent, synthesize it.
    pub corpus_dir: Option<PathBuf>,
    pub synth: SynthConfig,
    pub granularity: Granularity,
    pub lag: LagConfig,
    pub split_fraction: f64,
    /// Master seed for every learner and restart.
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Worker cap; 0 uses all cores. Output is identical for any value.
    pub threads: usize,
    /// Importance classes given their own Test-3 targets.
    pub importance_classes: Vec<u8>,
    pub selection: SelectionPolicy,
    pub kmeans_ks: Vec<usize>,
    pub subsystem_threshold: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            corpus_dir: None,
            synth: SynthConfig::default(),
            granularity: Granularity::Month,
            lag: LagConfig::default(),
            split_fraction: 0.2,
            seed: 42,
            out_dir: PathBuf::from("out"),
            threads: 0,
            importance_classes: vec![2, 4],
            selection: SelectionPolicy::default(),
            kmeans_ks: (2..=10).collect(),
            subsystem_threshold: CONSOLIDATION_THRESHOLD,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return Err(PipelineError::Config(format!(
                "split fraction {} outside (0,1)",
                self.split_fraction
            )));
        }
        if self.lag.lag == 0 {
            return Err(PipelineError::Config("lag must be at least 1".into()));
        }
        for &k in &self.importance_classes {
            if !(1..=5).contains(&k) {
                return Err(PipelineError::Config(format!("importance class {k} outside 1..5")));
            }
        }
        Ok(())
    }
}

/// Counts and diagnostics from loading + linking + consolidation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub commits: usize,
    pub trouble_reports: usize,
    pub features: usize,
    pub releases: usize,
    pub orphan_feature_ids: Vec<String>,
    pub unreleased_features: Vec<String>,
    pub clean: bool,
}

/// Loads, links, and consolidates a corpus directory.
pub fn prepare_corpus(dir: &Path, threshold: usize) -> Result<CorpusBundle, PipelineError> {
    let bundle = load_corpus_dir(dir).map_err(|source| PipelineError::Corpus {
        stage: "load",
        source,
    })?;
    let linked = link_features_to_releases(&bundle);
    Ok(consolidate_rare_subsystems(&linked, threshold))
}

/// Links and consolidates an in-memory bundle (the synth path).
pub fn prepare_bundle(bundle: &CorpusBundle, threshold: usize) -> CorpusBundle {
    consolidate_rare_subsystems(&link_features_to_releases(bundle), threshold)
}

pub fn cmd_validate(dir: &Path, threshold: usize) -> Result<ValidationReport, PipelineError> {
    let prepared = prepare_corpus(dir, threshold)?;
    Ok(ValidationReport {
        commits: prepared.commits.len(),
        trouble_reports: prepared.trouble_reports.len(),
        features: prepared.features.len(),
        releases: prepared.releases.len(),
        orphan_feature_ids: prepared.orphan_feature_ids.clone(),
        unreleased_features: prepared
            .unreleased_features()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        clean: prepared.orphan_feature_ids.is_empty(),
    })
}

/// Writes the synthetic corpus CSVs plus ground_truth.json (5 files).
pub fn cmd_synth(config: &SynthConfig, out_dir: &Path) -> Result<(CorpusBundle, GroundTruth), PipelineError> {
    let (bundle, ground_truth) = generate_corpus(config)?;
    save_corpus(&bundle, out_dir).map_err(|source| PipelineError::Corpus {
        stage: "write corpus",
        source,
    })?;
    let gt_path = out_dir.join("ground_truth.json");
    let json = serde_json::to_string_pretty(&ground_truth)
        .map_err(|e| PipelineError::Config(format!("ground truth serialization: {e}")))?;
    std::fs::write(&gt_path, json).map_err(|e| io_err(&gt_path, e))?;
    Ok((bundle, ground_truth))
}

// ---------------------------------------------------------------------
// Test 1: failure-inflow prediction on the basic period table
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Test1Report {
    /// Model name -> full/train/test metrics.
    pub performance: BTreeMap<String, EvalReport>,
    pub forest_classifier_top: Vec<ImportanceEntry>,
    pub forest_regressor_top: Vec<ImportanceEntry>,
    /// Corpus-level pre-release / early-post detection statistics.
    pub detection_stats: Option<InflowStats>,
    pub supervised_rows: usize,
    pub notes: Vec<String>,
}

/// Fitted artifacts the charts and follow-up analyses reuse.
pub struct Test1Artifacts {
    pub table: crate::dataset::TimeSeriesTable,
    pub regression_scaled: SupervisedDataset,
    pub target_scaler: FittedScaler,
    /// (period key, actual inflow, predicted inflow) in raw units.
    pub prediction_series: Vec<(String, f64, f64)>,
    pub busiest_release_curve: Option<InflowCurve>,
}

struct ScaledRegression {
    dataset: SupervisedDataset,
    target_scaler: FittedScaler,
}

/// MinMax-scales predictors and target, with parameters fitted on the
/// chronological train slice only (test rows may leave [0,1]).
fn scale_regression(
    dataset: &SupervisedDataset,
    split_fraction: f64,
) -> Result<ScaledRegression, PipelineError> {
    let (train, _) = chronological_split(dataset, split_fraction).map_err(|source| {
        PipelineError::Dataset {
            stage: "split for scaling",
            source,
        }
    })?;
    let stage = |source| PipelineError::Preprocess {
        stage: "minmax scaling",
        source,
    };
    let x_scaler = fit_scaler(&ScalerSpec::new(ScalerKind::MinMax), &train.x).map_err(stage)?;
    let y_scaler = crate::preprocess::fit_vec(&ScalerSpec::new(ScalerKind::MinMax), &train.y)
        .map_err(stage)?;
    Ok(ScaledRegression {
        dataset: SupervisedDataset {
            columns: dataset.columns.clone(),
            x: x_scaler.transform(&dataset.x).map_err(stage)?,
            y: y_scaler.transform_vec(&dataset.y).map_err(stage)?,
            target_kind: dataset.target_kind,
        },
        target_scaler: y_scaler,
    })
}

fn classifier_metrics(
    x_full: &Matrix,
    labels: &[i64],
    split_fraction: f64,
    fit_predict: impl Fn(&Matrix, &[i64], &Matrix) -> Result<Vec<i64>, PipelineError>,
) -> Result<EvalReport, PipelineError> {
    let rows = x_full.n_rows();
    let test_rows = ((rows as f64) * split_fraction).ceil() as usize;
    let cut = rows - test_rows.clamp(1, rows - 1);
    let train_x = x_full.slice_rows(0, cut);
    let train_y = &labels[..cut];

    let slices = [
        ("full", x_full.clone(), labels.to_vec()),
        ("train", train_x.clone(), train_y.to_vec()),
        ("test", x_full.slice_rows(cut, rows), labels[cut..].to_vec()),
    ];
    let mut report = EvalReport::default();
    for (name, x, y_true) in slices {
        let pred = fit_predict(&train_x, train_y, &x)?;
        let metrics = classification_slice(&pred, &y_true, &category_label_set()).map_err(
            |source| PipelineError::Eval {
                stage: "classifier metrics",
                source,
            },
        )?;
        report.slices.insert(name.to_string(), metrics);
    }
    Ok(report)
}

/// Shared body of test1 and test3: fit the four learners on a period
/// table (optionally carrying cluster columns) and score every slice.
struct FittedStage {
    performance: BTreeMap<String, EvalReport>,
    forest_classifier_top: Vec<ImportanceEntry>,
    forest_regressor_top: Vec<ImportanceEntry>,
    regression_raw: SupervisedDataset,
    regression_scaled: SupervisedDataset,
    target_scaler: FittedScaler,
    lasso_model: crate::learn::LassoModel,
    forest_regressor: crate::learn::ForestModel,
    supervised_rows: usize,
}

fn fit_stage(
    table: &crate::dataset::TimeSeriesTable,
    config: &RunConfig,
) -> Result<FittedStage, PipelineError> {
    let dataset_err = |stage| {
        move |source| PipelineError::Dataset { stage, source }
    };
    let regression_raw = build_lagged(table, &config.lag, TargetKind::RegressionInflow)
        .map_err(dataset_err("lagged regression dataset"))?;
    let categories = build_lagged(table, &config.lag, TargetKind::Category1To6)
        .map_err(dataset_err("lagged category dataset"))?;

    let scaled = scale_regression(&regression_raw, config.split_fraction)?;

    let mut performance = BTreeMap::new();

    // regressors: LASSO and the MSE forest on the scaled data
    let lasso_eval = fit_and_evaluate(
        &scaled.dataset,
        &AblationLearner::Lasso(LassoConfig::default()),
        config.split_fraction,
    )
    .map_err(|source| PipelineError::Eval {
        stage: "lasso evaluation",
        source,
    })?;
    performance.insert("lasso".to_string(), lasso_eval);

    let forest_reg_config = ForestConfig::new(Criterion::Mse, config.seed);
    let forest_eval = fit_and_evaluate(
        &scaled.dataset,
        &AblationLearner::Forest(forest_reg_config.clone()),
        config.split_fraction,
    )
    .map_err(|source| PipelineError::Eval {
        stage: "forest regressor evaluation",
        source,
    })?;
    performance.insert("random_forest_regressor".to_string(), forest_eval);

    // the importance models are the same fits the metrics used: train-slice fits
    let (train_scaled, _) = chronological_split(&scaled.dataset, config.split_fraction)
        .map_err(dataset_err("train slice"))?;
    let lasso_model = lasso_fit(&train_scaled.x, &train_scaled.y, &LassoConfig::default())
        .map_err(|source| PipelineError::Learn {
            stage: "lasso fit",
            source,
        })?;
    let forest_regressor = forest_fit(&train_scaled.x, &train_scaled.y, &forest_reg_config)
        .map_err(|source| PipelineError::Learn {
            stage: "forest regressor fit",
            source,
        })?;

    // classifiers on the raw predictors and Table-3 category labels
    let labels: Vec<i64> = categories.y.iter().map(|&v| v as i64).collect();
    let forest_cls_config = ForestConfig::new(Criterion::Gini, config.seed);
    let forest_cls_eval = classifier_metrics(
        &categories.x,
        &labels,
        config.split_fraction,
        |train_x, train_y, query| {
            let y: Vec<f64> = train_y.iter().map(|&v| v as f64).collect();
            let model = forest_fit(train_x, &y, &forest_cls_config).map_err(|source| {
                PipelineError::Learn {
                    stage: "forest classifier fit",
                    source,
                }
            })?;
            let pred = forest_predict(&model, query).map_err(|source| PipelineError::Learn {
                stage: "forest classifier predict",
                source,
            })?;
            Ok(pred.iter().map(|&v| v as i64).collect())
        },
    )?;
    performance.insert("random_forest_classifier".to_string(), forest_cls_eval);

    let svc_config = SvcConfig {
        seed: config.seed,
        ..SvcConfig::default()
    };
    let svc_eval = classifier_metrics(
        &categories.x,
        &labels,
        config.split_fraction,
        |train_x, train_y, query| {
            let model = svc_fit(train_x, train_y, &svc_config).map_err(|source| {
                PipelineError::Learn {
                    stage: "svc fit",
                    source,
                }
            })?;
            svc_predict(&model, query).map_err(|source| PipelineError::Learn {
                stage: "svc predict",
                source,
            })
        },
    )?;
    performance.insert("svc".to_string(), svc_eval);

    // top-5 importance tables from the fitted forests
    let (cat_train_x, cat_train_y): (Matrix, Vec<f64>) = {
        let rows = categories.x.n_rows();
        let test_rows = ((rows as f64) * config.split_fraction).ceil() as usize;
        let cut = rows - test_rows.clamp(1, rows - 1);
        (
            categories.x.slice_rows(0, cut),
            categories.y[..cut].to_vec(),
        )
    };
    let forest_classifier = forest_fit(&cat_train_x, &cat_train_y, &forest_cls_config).map_err(
        |source| PipelineError::Learn {
            stage: "forest classifier fit",
            source,
        },
    )?;
    let eval_err = |stage| {
        move |source| PipelineError::Eval { stage, source }
    };
    let forest_classifier_top: Vec<ImportanceEntry> =
        forest_importance_report(&forest_classifier, &categories.columns)
            .map_err(eval_err("classifier importance"))?
            .into_iter()
            .take(5)
            .collect();
    let forest_regressor_top: Vec<ImportanceEntry> =
        forest_importance_report(&forest_regressor, &regression_raw.columns)
            .map_err(eval_err("regressor importance"))?
            .into_iter()
            .take(5)
            .collect();

    let supervised_rows = regression_raw.x.n_rows();
    Ok(FittedStage {
        performance,
        forest_classifier_top,
        forest_regressor_top,
        regression_raw,
        regression_scaled: scaled.dataset,
        target_scaler: scaled.target_scaler,
        lasso_model,
        forest_regressor,
        supervised_rows,
    })
}

pub fn cmd_test1(
    bundle: &CorpusBundle,
    config: &RunConfig,
) -> Result<(Test1Report, Test1Artifacts), PipelineError> {
    let table =
        aggregate_periods(bundle, config.granularity).map_err(|source| PipelineError::Dataset {
            stage: "period aggregation",
            source,
        })?;
    let stage = fit_stage(&table, config)?;

    // actual vs predicted inflow in raw units, via the invertible scaler
    let lasso_pred_scaled = crate::learn::lasso_predict(&stage.lasso_model, &stage.regression_scaled.x)
        .map_err(|source| PipelineError::Learn {
            stage: "lasso predict",
            source,
        })?;
    let predicted_raw = stage
        .target_scaler
        .inverse_transform_vec(&lasso_pred_scaled)
        .map_err(|source| PipelineError::Preprocess {
            stage: "inverse target scaling",
            source,
        })?;
    let offset = table.rows.len() - stage.supervised_rows;
    let prediction_series: Vec<(String, f64, f64)> = (0..stage.supervised_rows)
        .map(|i| {
            (
                table.rows[offset + i].period_key.clone(),
                stage.regression_raw.y[i],
                predicted_raw[i],
            )
        })
        .collect();

    let detection_stats = corpus_inflow_stats(bundle);
    let busiest = bundle
        .releases
        .iter()
        .map(|r| {
            let count = bundle
                .trouble_reports
                .iter()
                .filter(|tr| tr.release_id == r.release_id)
                .count();
            (count, r.release_id.clone())
        })
        .max()
        .filter(|(count, _)| *count > 0);
    let busiest_release_curve =
        busiest.and_then(|(_, id)| cumulative_inflow_curve(bundle, &id).ok());

    let report = Test1Report {
        performance: stage.performance,
        forest_classifier_top: stage.forest_classifier_top,
        forest_regressor_top: stage.forest_regressor_top,
        detection_stats,
        supervised_rows: stage.supervised_rows,
        notes: vec![
            "neural-network baselines are out of scope for this pipeline".to_string(),
            "regression metrics are reported in minmax-scaled units; the charts use raw units"
                .to_string(),
        ],
    };
    let artifacts = Test1Artifacts {
        table,
        regression_scaled: stage.regression_scaled,
        target_scaler: stage.target_scaler,
        prediction_series,
        busiest_release_curve,
    };
    Ok((report, artifacts))
}

// ---------------------------------------------------------------------
// Test 2: change-footprint clustering
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterCandidateInfo {
    pub level: FootprintLevel,
    pub measure: FootprintMeasure,
    pub scaler: ScalerKind,
    pub algorithm: ClusterAlgorithm,
    /// "k=5" or "eps=0.3 min_pts=7".
    pub params: String,
    pub silhouette: Option<f64>,
    pub cluster_count: usize,
    pub largest_fraction: f64,
    pub noise_fraction: f64,
}

/// One row of the per-level clustering summary tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringSummaryRow {
    pub algorithm: ClusterAlgorithm,
    pub scaler: ScalerKind,
    pub files: Option<ClusterCandidateInfo>,
    pub loc: Option<ClusterCandidateInfo>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridRow {
    pub min_pts: usize,
    pub eps: f64,
    pub silhouette: Option<f64>,
    pub clusters: usize,
    pub largest_fraction: f64,
    pub noise_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridTable {
    pub level: FootprintLevel,
    pub measure: FootprintMeasure,
    pub scaler: ScalerKind,
    pub rows: Vec<GridRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Test2Report {
    pub candidates_evaluated: usize,
    /// Per level: Tables-7/8-shaped summary rows.
    pub summaries: BTreeMap<String, Vec<ClusteringSummaryRow>>,
    pub winner: ClusterCandidateInfo,
    /// Feature id -> cluster id under the winning model (-1 = noise).
    pub winner_assignments: BTreeMap<String, i64>,
    pub skipped_empty_features: Vec<String>,
}

pub struct Test2Artifacts {
    pub grids: Vec<GridTable>,
}

struct Candidate {
    info: ClusterCandidateInfo,
    model: ClusterModel,
    /// Row-aligned feature ids of the footprint matrix this model used.
    feature_ids: std::sync::Arc<Vec<String>>,
}

pub fn cmd_test2(
    bundle: &CorpusBundle,
    config: &RunConfig,
) -> Result<(Test2Report, Test2Artifacts), PipelineError> {
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut grids = Vec::new();
    let mut skipped = Vec::new();

    for level in [FootprintLevel::System, FootprintLevel::Subsystem] {
        for measure in [FootprintMeasure::Files, FootprintMeasure::Loc] {
            let set = build_footprints(bundle, level, measure);
            skipped.extend(set.skipped_empty.iter().cloned());
            let (raw, feature_ids, _units) = set.to_matrix();
            if raw.n_rows() == 0 {
                continue;
            }
            let feature_ids = std::sync::Arc::new(feature_ids);

            for kind in ScalerKind::all() {
                let scaler =
                    fit_scaler(&ScalerSpec::new(kind), &raw).map_err(|source| {
                        PipelineError::Preprocess {
                            stage: "footprint scaling",
                            source,
                        }
                    })?;
                let scaled = scaler.transform(&raw).map_err(|source| {
                    PipelineError::Preprocess {
                        stage: "footprint scaling",
                        source,
                    }
                })?;
                let pd = PairwiseDistances::from_matrix(&scaled);

                // DBSCAN grid (240 cells)
                let grid = grid_search_dbscan_with_distances(
                    &pd,
                    &default_min_pts_values(),
                    &default_eps_values(),
                );
                grids.push(GridTable {
                    level,
                    measure,
                    scaler: kind,
                    rows: grid
                        .iter()
                        .map(|(cfg, model)| GridRow {
                            min_pts: cfg.min_pts,
                            eps: cfg.eps,
                            silhouette: model.silhouette,
                            clusters: model.cluster_count,
                            largest_fraction: model.largest_fraction,
                            noise_fraction: model.noise_fraction,
                        })
                        .collect(),
                });
                for (cfg, model) in grid {
                    candidates.push(Candidate {
                        info: candidate_info(level, measure, kind, &model, dbscan_params(&cfg)),
                        model,
                        feature_ids: feature_ids.clone(),
                    });
                }

                // k-means sweep
                use rayon::prelude::*;
                let ks: Vec<usize> = config
                    .kmeans_ks
                    .iter()
                    .copied()
                    .filter(|&k| k >= 1 && k <= raw.n_rows())
                    .collect();
                let kmeans_models: Vec<(usize, ClusterModel)> = ks
                    .par_iter()
                    .map(|&k| {
                        let seed = Rng::derive_seed(
                            config.seed,
                            &format!("kmeans/{level}/{measure}/{kind}/k{k}"),
                        );
                        let mut model = kmeans_fit(&scaled, &KMeansConfig::new(k, seed))
                            .expect("k <= n checked");
                        attach_silhouette(&mut model, &pd);
                        (k, model)
                    })
                    .collect();
                for (k, model) in kmeans_models {
                    candidates.push(Candidate {
                        info: candidate_info(level, measure, kind, &model, format!("k={k}")),
                        model,
                        feature_ids: feature_ids.clone(),
                    });
                }
            }
        }
    }

    let models: Vec<ClusterModel> = candidates.iter().map(|c| c.model.clone()).collect();
    let winner_idx =
        select_model(&models, &config.selection).map_err(|source| PipelineError::Cluster {
            stage: "model selection",
            source,
        })?;
    let winner = &candidates[winner_idx];
    let winner_assignments: BTreeMap<String, i64> = winner
        .feature_ids
        .iter()
        .cloned()
        .zip(winner.model.assignments.iter().copied())
        .collect();

    let mut summaries = BTreeMap::new();
    for level in [FootprintLevel::System, FootprintLevel::Subsystem] {
        summaries.insert(level.to_string(), summarize_level(&candidates, level));
    }

    skipped.sort();
    skipped.dedup();
    let report = Test2Report {
        candidates_evaluated: candidates.len(),
        summaries,
        winner: winner.info.clone(),
        winner_assignments,
        skipped_empty_features: skipped,
    };
    Ok((report, Test2Artifacts { grids }))
}

fn dbscan_params(cfg: &DbscanConfig) -> String {
    format!("eps={:.1} min_pts={}", cfg.eps, cfg.min_pts)
}

fn candidate_info(
    level: FootprintLevel,
    measure: FootprintMeasure,
    scaler: ScalerKind,
    model: &ClusterModel,
    params: String,
) -> ClusterCandidateInfo {
    ClusterCandidateInfo {
        level,
        measure,
        scaler,
        algorithm: model.algorithm,
        params,
        silhouette: model.silhouette,
        cluster_count: model.cluster_count,
        largest_fraction: model.largest_fraction,
        noise_fraction: model.noise_fraction,
    }
}

/// Best representative per (algorithm, scaler, measure) cell: feasible
/// candidates first (by the selection ordering), best silhouette as the
/// fallback so even degenerate cells report something.
fn summarize_level(candidates: &[Candidate], level: FootprintLevel) -> Vec<ClusteringSummaryRow> {
    let mut rows = Vec::new();
    for algorithm in [ClusterAlgorithm::KMeans, ClusterAlgorithm::Dbscan] {
        for scaler in ScalerKind::all() {
            let mut row = ClusteringSummaryRow {
                algorithm,
                scaler,
                files: None,
                loc: None,
            };
            for measure in [FootprintMeasure::Files, FootprintMeasure::Loc] {
                let pool: Vec<&Candidate> = candidates
                    .iter()
                    .filter(|c| {
                        c.info.level == level
                            && c.info.measure == measure
                            && c.info.scaler == scaler
                            && c.info.algorithm == algorithm
                    })
                    .collect();
                let policy = SelectionPolicy::default();
                let models: Vec<ClusterModel> = pool.iter().map(|c| c.model.clone()).collect();
                let best = match select_model(&models, &policy) {
                    Ok(idx) => Some(idx),
                    Err(_) => pool
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.info.silhouette.is_some())
                        .max_by(|a, b| {
                            a.1.info
                                .silhouette
                                .unwrap()
                                .total_cmp(&b.1.info.silhouette.unwrap())
                        })
                        .map(|(i, _)| i),
                };
                let info = best.map(|i| pool[i].info.clone());
                match measure {
                    FootprintMeasure::Files => row.files = info,
                    FootprintMeasure::Loc => row.loc = info,
                }
            }
            rows.push(row);
        }
    }
    rows
}

// ---------------------------------------------------------------------
// Test 3: cluster-augmented prediction and importance analysis
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportanceTable {
    /// "inflow" or "class_k".
    pub target: String,
    /// method name -> top entries.
    pub methods: BTreeMap<String, Vec<ImportanceEntry>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Test3Report {
    pub performance: BTreeMap<String, EvalReport>,
    pub importance: Vec<ImportanceTable>,
    /// One ablation trial per cluster, each removed singly.
    pub ablation: Vec<AblationResult>,
    pub cluster_ids: Vec<i64>,
    pub forest_classifier_top: Vec<ImportanceEntry>,
    pub forest_regressor_top: Vec<ImportanceEntry>,
}

const IMPORTANCE_TABLE_WIDTH: usize = 8;

pub fn cmd_test3(
    bundle: &CorpusBundle,
    config: &RunConfig,
    assignments: &BTreeMap<String, i64>,
) -> Result<Test3Report, PipelineError> {
    let base_table =
        aggregate_periods(bundle, config.granularity).map_err(|source| PipelineError::Dataset {
            stage: "period aggregation",
            source,
        })?;
    let table = augment_with_clusters(&base_table, assignments).map_err(|source| {
        PipelineError::Dataset {
            stage: "cluster augmentation",
            source,
        }
    })?;

    let stage = fit_stage(&table, config)?;
    let cluster_ids = stage.regression_scaled.cluster_ids_present();

    // three-way importance for the total inflow and each class target
    let mut importance = Vec::new();
    importance.push(importance_table(
        "inflow",
        &stage.regression_raw,
        &stage.regression_scaled,
        &stage.lasso_model,
        &stage.forest_regressor,
    )?);
    for &class in &config.importance_classes {
        let raw = build_lagged(&table, &config.lag, TargetKind::RegressionInflowClass(class))
            .map_err(|source| PipelineError::Dataset {
                stage: "class target dataset",
                source,
            })?;
        let scaled = scale_regression(&raw, config.split_fraction)?;
        let (train, _) = chronological_split(&scaled.dataset, config.split_fraction).map_err(
            |source| PipelineError::Dataset {
                stage: "class train slice",
                source,
            },
        )?;
        let lasso_model =
            lasso_fit(&train.x, &train.y, &LassoConfig::default()).map_err(|source| {
                PipelineError::Learn {
                    stage: "class lasso fit",
                    source,
                }
            })?;
        let forest_model = forest_fit(
            &train.x,
            &train.y,
            &ForestConfig::new(Criterion::Mse, config.seed),
        )
        .map_err(|source| PipelineError::Learn {
            stage: "class forest fit",
            source,
        })?;
        importance.push(importance_table(
            &format!("class_{class}"),
            &raw,
            &scaled.dataset,
            &lasso_model,
            &forest_model,
        )?);
    }

    // ablation ladder: each cluster removed singly, forest regressor refit
    let learner = AblationLearner::Forest(ForestConfig::new(Criterion::Mse, config.seed));
    let mut ablation = Vec::new();
    for &id in &cluster_ids {
        let result = crate::evaluate::ablate_clusters(
            &stage.regression_scaled,
            &[id],
            &learner,
            config.split_fraction,
        )
        .map_err(|source| PipelineError::Eval {
            stage: "cluster ablation",
            source,
        })?;
        ablation.push(result);
    }

    Ok(Test3Report {
        performance: stage.performance,
        importance,
        ablation,
        cluster_ids,
        forest_classifier_top: stage.forest_classifier_top,
        forest_regressor_top: stage.forest_regressor_top,
    })
}

fn importance_table(
    target: &str,
    raw: &SupervisedDataset,
    scaled: &SupervisedDataset,
    lasso_model: &crate::learn::LassoModel,
    forest_model: &crate::learn::ForestModel,
) -> Result<ImportanceTable, PipelineError> {
    let eval_err = |stage| {
        move |source| PipelineError::Eval { stage, source }
    };
    let mut methods = BTreeMap::new();
    methods.insert(
        "correlation".to_string(),
        correlation_importance(raw)
            .map_err(eval_err("correlation importance"))?
            .into_iter()
            .take(IMPORTANCE_TABLE_WIDTH)
            .collect(),
    );
    methods.insert(
        "lasso".to_string(),
        lasso_importance(lasso_model, &scaled.columns)
            .map_err(eval_err("lasso importance"))?
            .into_iter()
            .take(IMPORTANCE_TABLE_WIDTH)
            .collect(),
    );
    methods.insert(
        "forest".to_string(),
        forest_importance_report(forest_model, &scaled.columns)
            .map_err(eval_err("forest importance"))?
            .into_iter()
            .take(IMPORTANCE_TABLE_WIDTH)
            .collect(),
    );
    Ok(ImportanceTable {
        target: target.to_string(),
        methods,
    })
}

// ---------------------------------------------------------------------
// Combined run
// ---------------------------------------------------------------------

/// The analytic parameters echoed into report.json. Execution details
/// (output directory, thread cap) are deliberately absent so reruns are
/// byte-identical wherever and however they execute.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub corpus_dir: Option<PathBuf>,
    pub synth: SynthConfig,
    pub granularity: Granularity,
    pub lag: LagConfig,
    pub split_fraction: f64,
    pub seed: u64,
    pub importance_classes: Vec<u8>,
    pub selection: SelectionPolicy,
    pub kmeans_ks: Vec<usize>,
    pub subsystem_threshold: usize,
}

impl RunConfig {
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            corpus_dir: self.corpus_dir.clone(),
            synth: self.synth.clone(),
            granularity: self.granularity,
            lag: self.lag.clone(),
            split_fraction: self.split_fraction,
            seed: self.seed,
            importance_classes: self.importance_classes.clone(),
            selection: self.selection.clone(),
            kmeans_ks: self.kmeans_ks.clone(),
            subsystem_threshold: self.subsystem_threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullReport {
    pub config: ConfigEcho,
    pub validation: ValidationReport,
    pub test1: Test1Report,
    pub test2: Test2Report,
    pub test3: Test3Report,
}

/// The Test-2 winner persisted for `test3` to pick up.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectedModel {
    pub winner: ClusterCandidateInfo,
    pub assignments: BTreeMap<String, i64>,
}

fn with_pool<T>(
    config: &RunConfig,
    body: impl FnOnce() -> Result<T, PipelineError> + Send,
) -> Result<T, PipelineError>
where
    T: Send,
{
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    pool.install(body)
}

fn load_or_synthesize(config: &RunConfig) -> Result<CorpusBundle, PipelineError> {
    match &config.corpus_dir {
        Some(dir) => prepare_corpus(dir, config.subsystem_threshold),
        None => {
            let (raw, _gt) = generate_corpus(&config.synth)?;
            Ok(prepare_bundle(&raw, config.subsystem_threshold))
        }
    }
}

fn validation_of(bundle: &CorpusBundle) -> ValidationReport {
    ValidationReport {
        commits: bundle.commits.len(),
        trouble_reports: bundle.trouble_reports.len(),
        features: bundle.features.len(),
        releases: bundle.releases.len(),
        orphan_feature_ids: bundle.orphan_feature_ids.clone(),
        unreleased_features: bundle
            .unreleased_features()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        clean: bundle.orphan_feature_ids.is_empty(),
    }
}

/// Test 1 alone: loads (or synthesizes) the corpus and writes the
/// Test-1 tables, charts, and test1_report.json.
pub fn run_test1(config: &RunConfig) -> Result<Test1Report, PipelineError> {
    with_pool(config, || {
        let bundle = load_or_synthesize(config)?;
        let (test1, artifacts) = cmd_test1(&bundle, config)?;
        report::emit_test1(&test1, &artifacts, &config.out_dir)?;
        report::write_json(&config.out_dir.join("test1_report.json"), &test1)?;
        Ok(test1)
    })
}

/// Test 2 alone: writes the clustering summaries, the DBSCAN grids,
/// selected_model.json, and test2_report.json.
pub fn run_test2(config: &RunConfig) -> Result<Test2Report, PipelineError> {
    with_pool(config, || {
        let bundle = load_or_synthesize(config)?;
        let (test2, artifacts) = cmd_test2(&bundle, config)?;
        report::emit_test2(&test2, &artifacts, &config.out_dir)?;
        report::write_json(&config.out_dir.join("test2_report.json"), &test2)?;
        Ok(test2)
    })
}

/// Test 3 alone: consumes `<out_dir>/selected_model.json` written by
/// test2 and writes the Test-3 tables and test3_report.json.
pub fn run_test3(config: &RunConfig) -> Result<Test3Report, PipelineError> {
    with_pool(config, || {
        let path = config.out_dir.join("selected_model.json");
        let raw = std::fs::read_to_string(&path).map_err(|_| {
            PipelineError::Config(format!(
                "missing {}; run the test2 stage first",
                path.display()
            ))
        })?;
        let selected: SelectedModel = serde_json::from_str(&raw)
            .map_err(|e| PipelineError::Config(format!("selected model: {e}")))?;
        let bundle = load_or_synthesize(config)?;
        let test3 = cmd_test3(&bundle, config, &selected.assignments)?;
        report::emit_test3(&test3, &config.out_dir)?;
        report::write_json(&config.out_dir.join("test3_report.json"), &test3)?;
        Ok(test3)
    })
}

/// Runs synth-or-load, validate, and all three tests; writes report.json,
/// the CSV tables, and the SVG charts under `config.out_dir`.
pub fn run_all(config: &RunConfig) -> Result<FullReport, PipelineError> {
    with_pool(config, || {
        let bundle = load_or_synthesize(config)?;
        let validation = validation_of(&bundle);
        let (test1, artifacts1) = cmd_test1(&bundle, config)?;
        let (test2, artifacts2) = cmd_test2(&bundle, config)?;
        let test3 = cmd_test3(&bundle, config, &test2.winner_assignments)?;
        let full = FullReport {
            config: config.echo(),
            validation,
            test1,
            test2,
            test3,
        };
        report::emit_outputs(&full, &artifacts1, &artifacts2, &config.out_dir)?;
        Ok(full)
    })
}

/// Loads a RunConfig overlay from JSON; missing fields keep `base`'s.
pub fn load_config_overlay(path: &Path, base: RunConfig) -> Result<RunConfig, PipelineError> {
    let raw = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let base_value = serde_json::to_value(&base)
        .map_err(|e| PipelineError::Config(format!("config serialization: {e}")))?;
    let overlay: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| PipelineError::Config(format!("config file {}: {e}", path.display())))?;
    let merged = merge_json(base_value, overlay);
    serde_json::from_value(merged)
        .map_err(|e| PipelineError::Config(format!("config file {}: {e}", path.display())))
}

fn merge_json(base: serde_json::Value, overlay: serde_json::Value) -> serde_json::Value {
    match (base, overlay) {
        (serde_json::Value::Object(mut base_map), serde_json::Value::Object(overlay_map)) => {
            for (key, value) in overlay_map {
                let merged = match base_map.remove(&key) {
                    Some(existing) => merge_json(existing, value),
                    None => value,
                };
                base_map.insert(key, merged);
            }
            serde_json::Value::Object(base_map)
        }
        (_, overlay) => overlay,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_run_config() -> RunConfig {
        RunConfig {
            synth: SynthConfig {
                n_features: 250,
                months: 36,
                cadence_switch_month: 18,
                ..SynthConfig::default()
            },
            ..RunConfig::default()
        }
    }

    fn small_bundle(config: &RunConfig) -> CorpusBundle {
        let (raw, _) = generate_corpus(&config.synth).unwrap();
        prepare_bundle(&raw, config.subsystem_threshold)
    }

    #[test]
    fn test1_report_has_every_cell() {
        let config = small_run_config();
        let bundle = small_bundle(&config);
        let (report, _) = cmd_test1(&bundle, &config).unwrap();
        for model in [
            "lasso",
            "random_forest_regressor",
            "random_forest_classifier",
            "svc",
        ] {
            let eval = &report.performance[model];
            for slice in ["full", "train", "test"] {
                let metrics = &eval.slices[slice];
                assert!(metrics.mae.is_finite(), "{model}/{slice}");
                assert!(metrics.mse.is_finite());
            }
        }
        // classifiers carry f1, regressors do not
        assert!(report.performance["svc"].slices["full"].f1.is_some());
        assert!(report.performance["lasso"].slices["full"].f1.is_none());
        assert_eq!(report.forest_regressor_top.len(), 5);
        assert_eq!(report.forest_classifier_top.len(), 5);
    }

    #[test]
    fn test1_scaled_training_targets_in_unit_range() {
        let config = small_run_config();
        let bundle = small_bundle(&config);
        let (_, artifacts) = cmd_test1(&bundle, &config).unwrap();
        let (train, _) =
            chronological_split(&artifacts.regression_scaled, config.split_fraction).unwrap();
        for v in &train.y {
            assert!((0.0..=1.0).contains(v), "target {v}");
        }
        for v in train.x.data() {
            assert!((0.0..=1.0).contains(v), "predictor {v}");
        }
    }

    #[test]
    fn test1_deterministic() {
        let config = small_run_config();
        let bundle = small_bundle(&config);
        let (a, _) = cmd_test1(&bundle, &config).unwrap();
        let (b, _) = cmd_test1(&bundle, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn test3_with_empty_assignments_degrades_to_test1() {
        let config = small_run_config();
        let bundle = small_bundle(&config);
        let (test1, _) = cmd_test1(&bundle, &config).unwrap();
        let test3 = cmd_test3(&bundle, &config, &BTreeMap::new()).unwrap();
        assert_eq!(
            serde_json::to_string(&test1.performance).unwrap(),
            serde_json::to_string(&test3.performance).unwrap()
        );
        assert!(test3.cluster_ids.is_empty());
        assert!(test3.ablation.is_empty());
    }

    #[test]
    fn release_granularity_runs_end_to_end() {
        let config = RunConfig {
            granularity: Granularity::Release,
            ..small_run_config()
        };
        let bundle = small_bundle(&config);
        let (report, _) = cmd_test1(&bundle, &config).unwrap();
        // one row per release minus the lag window
        assert_eq!(report.supervised_rows, bundle.releases.len() - config.lag.lag);
        let test3 = cmd_test3(&bundle, &config, &BTreeMap::new()).unwrap();
        assert_eq!(
            serde_json::to_string(&report.performance).unwrap(),
            serde_json::to_string(&test3.performance).unwrap()
        );
    }

    #[test]
    fn config_overlay_merges_fields() {
        let dir = std::env::temp_dir().join(format!("inflow_cfg_{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("config.json");
        std::fs::write(&path, r#"{"seed": 99, "lag": {"lag": 6}}"#).unwrap();
        let merged = load_config_overlay(&path, RunConfig::default()).unwrap();
        assert_eq!(merged.seed, 99);
        assert_eq!(merged.lag.lag, 6);
        assert!(merged.lag.include_current_exogenous); // untouched
        assert_eq!(merged.split_fraction, 0.2); // untouched
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn run_config_validation() {
        let bad = RunConfig {
            split_fraction: 1.5,
            ..RunConfig::default()
        };
        assert_eq!(bad.validate().unwrap_err().exit_code(), 2);
        let bad_class = RunConfig {
            importance_classes: vec![7],
            ..RunConfig::default()
        };
        assert!(bad_class.validate().is_err());
    }
}
