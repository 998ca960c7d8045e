//! Period-indexed aggregation and lagged supervised datasets.
//!
//! The corpus is first rolled up into a `TimeSeriesTable` (one row per
//! calendar month or per release). Lagged design matrices are then cut
//! from the table: every numeric period field at offsets -1..-lag plus
//! the exogenous fields (releases, features, mean development time,
//! cluster counts) at offset 0. The current period's inflow is only ever
//! the target, never a predictor.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusBundle;
use crate::matrix::Matrix;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("corpus has no periods to aggregate")]
    EmptyCorpus,
    #[error("too few rows: needed {needed}, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("cluster assignment references unknown feature '{0}'")]
    UnknownFeature(String),
    #[error("test fraction {0} outside (0, 1)")]
    InvalidTestFraction(f64),
    #[error("importance class {0} outside 1..5")]
    UnknownClass(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Month,
    Release,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Granularity::Month => write!(f, "month"),
            Granularity::Release => write!(f, "release"),
        }
    }
}

/// One aggregated period: a calendar month or one release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRow {
    /// "YYYY-MM" in month mode, the release id in release mode.
    pub period_key: String,
    pub tr_inflow: u64,
    /// Counts per importance class 1..5 (index 0 = class 1).
    pub tr_inflow_by_class: [u64; 5],
    pub releases_delivered: u64,
    pub features_delivered: u64,
    /// Mean development_time_days of the delivered features; 0 when none.
    pub mean_dev_time: f64,
    /// Per-cluster delivered-feature counts (empty before augmentation).
    pub cluster_counts: BTreeMap<i64, u64>,
    /// Ids of the features delivered this period (used by augmentation).
    pub delivered_feature_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesTable {
    pub granularity: Granularity,
    pub rows: Vec<PeriodRow>,
    /// Every feature id in the corpus behind the table.
    pub known_feature_ids: BTreeSet<String>,
}

/// Lag window configuration; the lag default of 4 periods is the
/// latency the models consume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LagConfig {
    pub lag: usize,
    pub include_current_exogenous: bool,
}

impl Default for LagConfig {
    fn default() -> Self {
        Self {
            lag: 4,
            include_current_exogenous: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    RegressionInflow,
    Category1To6,
    RegressionInflowClass(u8),
}

/// A labeled design-matrix column: source field plus time offset
/// (0 = current period, -k = k periods back).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnLabel {
    pub source: String,
    pub offset: i32,
}

impl fmt::Display for ColumnLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.source, self.offset)
    }
}

impl ColumnLabel {
    /// "name (t-4)" / "name (t)" formatting used in the report tables.
    pub fn report_style(&self) -> String {
        if self.offset == 0 {
            format!("{} (t)", self.source)
        } else {
            format!("{} (t{})", self.source, self.offset)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupervisedDataset {
    pub columns: Vec<ColumnLabel>,
    pub x: Matrix,
    pub y: Vec<f64>,
    pub target_kind: TargetKind,
}

/// Inflow-delta category 1..6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CategoryLabel(pub u8);

/// Categorizes the month-over-month inflow difference.
///
/// With x = current - previous: x > 30 maps to 6, then left-open
/// right-closed steps (15,30] -> 5, (5,15] -> 4, (-5,5] -> 3,
/// (-15,-5] -> 2, and everything at or below -15 -> 1, so every real
/// gets exactly one category.
pub fn categorize_delta(current_inflow: f64, previous_inflow: f64) -> CategoryLabel {
    let x = current_inflow - previous_inflow;
    CategoryLabel(if x > 30.0 {
        6
    } else if x > 15.0 {
        5
    } else if x > 5.0 {
        4
    } else if x > -5.0 {
        3
    } else if x > -15.0 {
        2
    } else {
        1
    })
}

fn month_index(date: NaiveDate) -> i32 {
    date.year() * 12 + date.month0() as i32
}

fn key_from_index(idx: i32) -> String {
    format!("{:04}-{:02}", idx.div_euclid(12), idx.rem_euclid(12) + 1)
}

/// Rolls the corpus up into one row per month (gap-free) or per release.
///
/// Trouble reports are counted by report month in month mode and by
/// attributed release in release mode; features count as delivered in
/// their linked release's period.
pub fn aggregate_periods(
    bundle: &CorpusBundle,
    granularity: Granularity,
) -> Result<TimeSeriesTable, DatasetError> {
    let known_feature_ids: BTreeSet<String> = bundle
        .features
        .iter()
        .map(|f| f.feature_id.clone())
        .collect();

    let release_dates: BTreeMap<&str, NaiveDate> = bundle
        .releases
        .iter()
        .map(|r| (r.release_id.as_str(), r.release_date))
        .collect();

    let rows = match granularity {
        Granularity::Month => {
            let mut span: Option<(i32, i32)> = None;
            let mut widen = |idx: i32| {
                span = Some(match span {
                    None => (idx, idx),
                    Some((lo, hi)) => (lo.min(idx), hi.max(idx)),
                });
            };
            for tr in &bundle.trouble_reports {
                widen(month_index(tr.date_reported));
            }
            for r in &bundle.releases {
                widen(month_index(r.release_date));
            }
            let Some((lo, hi)) = span else {
                return Err(DatasetError::EmptyCorpus);
            };

            let mut rows: BTreeMap<i32, PeriodRow> = (lo..=hi)
                .map(|idx| {
                    (
                        idx,
                        PeriodRow {
                            period_key: key_from_index(idx),
                            tr_inflow: 0,
                            tr_inflow_by_class: [0; 5],
                            releases_delivered: 0,
                            features_delivered: 0,
                            mean_dev_time: 0.0,
                            cluster_counts: BTreeMap::new(),
                            delivered_feature_ids: Vec::new(),
                        },
                    )
                })
                .collect();

            for tr in &bundle.trouble_reports {
                let row = rows.get_mut(&month_index(tr.date_reported)).unwrap();
                row.tr_inflow += 1;
                row.tr_inflow_by_class[(tr.importance_class - 1) as usize] += 1;
            }
            for r in &bundle.releases {
                rows.get_mut(&month_index(r.release_date)).unwrap().releases_delivered += 1;
            }
            let mut dev_sums: BTreeMap<i32, f64> = BTreeMap::new();
            for f in &bundle.features {
                let Some(release_id) = f.release_id.as_deref() else {
                    continue;
                };
                let idx = month_index(release_dates[release_id]);
                let row = rows.get_mut(&idx).unwrap();
                row.features_delivered += 1;
                row.delivered_feature_ids.push(f.feature_id.clone());
                *dev_sums.entry(idx).or_insert(0.0) += f.development_time_days as f64;
            }
            for (idx, sum) in dev_sums {
                let row = rows.get_mut(&idx).unwrap();
                row.mean_dev_time = sum / row.features_delivered as f64;
            }
            rows.into_values()
                .map(|mut r| {
                    r.delivered_feature_ids.sort();
                    r
                })
                .collect()
        }
        Granularity::Release => {
            let ordered = bundle.releases_in_order();
            if ordered.is_empty() {
                return Err(DatasetError::EmptyCorpus);
            }
            let mut rows: Vec<PeriodRow> = ordered
                .iter()
                .map(|r| PeriodRow {
                    period_key: r.release_id.clone(),
                    tr_inflow: 0,
                    tr_inflow_by_class: [0; 5],
                    releases_delivered: 1,
                    features_delivered: 0,
                    mean_dev_time: 0.0,
                    cluster_counts: BTreeMap::new(),
                    delivered_feature_ids: Vec::new(),
                })
                .collect();
            let index: BTreeMap<&str, usize> = ordered
                .iter()
                .enumerate()
                .map(|(i, r)| (r.release_id.as_str(), i))
                .collect();

            for tr in &bundle.trouble_reports {
                let row = &mut rows[index[tr.release_id.as_str()]];
                row.tr_inflow += 1;
                row.tr_inflow_by_class[(tr.importance_class - 1) as usize] += 1;
            }
            let mut dev_sums = vec![0.0f64; rows.len()];
            for f in &bundle.features {
                let Some(release_id) = f.release_id.as_deref() else {
                    continue;
                };
                let i = index[release_id];
                rows[i].features_delivered += 1;
                rows[i].delivered_feature_ids.push(f.feature_id.clone());
                dev_sums[i] += f.development_time_days as f64;
            }
            for (i, row) in rows.iter_mut().enumerate() {
                if row.features_delivered > 0 {
                    row.mean_dev_time = dev_sums[i] / row.features_delivered as f64;
                }
                row.delivered_feature_ids.sort();
            }
            rows
        }
    };

    Ok(TimeSeriesTable {
        granularity,
        rows,
        known_feature_ids,
    })
}

/// Cluster ids present anywhere in the table, ascending.
fn cluster_ids(table: &TimeSeriesTable) -> Vec<i64> {
    let mut ids: BTreeSet<i64> = BTreeSet::new();
    for row in &table.rows {
        ids.extend(row.cluster_counts.keys().copied());
    }
    ids.into_iter().collect()
}

fn field_value(row: &PeriodRow, source: &str) -> f64 {
    match source {
        "tr_inflow" => row.tr_inflow as f64,
        "releases_delivered" => row.releases_delivered as f64,
        "features_delivered" => row.features_delivered as f64,
        "mean_dev_time" => row.mean_dev_time,
        _ => {
            if let Some(k) = source.strip_prefix("tr_class_") {
                let class: usize = k.parse().expect("class field");
                row.tr_inflow_by_class[class - 1] as f64
            } else if let Some(id) = source.strip_prefix("cluster_") {
                let id: i64 = id.parse().expect("cluster field");
                row.cluster_counts.get(&id).copied().unwrap_or(0) as f64
            } else {
                panic!("unknown period field '{source}'")
            }
        }
    }
}

fn lagged_field_names(ids: &[i64]) -> Vec<String> {
    let mut names = vec!["tr_inflow".to_string()];
    names.extend((1..=5).map(|k| format!("tr_class_{k}")));
    names.extend(
        ["releases_delivered", "features_delivered", "mean_dev_time"]
            .iter()
            .map(|s| (*s).to_string()),
    );
    names.extend(ids.iter().map(|id| format!("cluster_{id}")));
    names
}

fn exogenous_field_names(ids: &[i64]) -> Vec<String> {
    let mut names: Vec<String> = ["releases_delivered", "features_delivered", "mean_dev_time"]
        .iter()
        .map(|s| (*s).to_string())
        .collect();
    names.extend(ids.iter().map(|id| format!("cluster_{id}")));
    names
}

/// Cuts the lagged supervised dataset out of the table.
///
/// Supervised row i covers table row lag+i; its predictors are every
/// period field at offsets -1..-lag plus (when configured) the exogenous
/// fields at offset 0. The target is the current-period inflow, the
/// Table-3 category of its delta, or one importance class's inflow.
pub fn build_lagged(
    table: &TimeSeriesTable,
    config: &LagConfig,
    target_kind: TargetKind,
) -> Result<SupervisedDataset, DatasetError> {
    if let TargetKind::RegressionInflowClass(k) = target_kind {
        if !(1..=5).contains(&k) {
            return Err(DatasetError::UnknownClass(k));
        }
    }
    let lag = config.lag.max(1);
    let n = table.rows.len();
    if n <= lag {
        return Err(DatasetError::TooFewRows {
            needed: lag + 1,
            got: n,
        });
    }

    let ids = cluster_ids(table);
    let mut columns = Vec::new();
    for k in 1..=lag {
        for name in lagged_field_names(&ids) {
            columns.push(ColumnLabel {
                source: name,
                offset: -(k as i32),
            });
        }
    }
    if config.include_current_exogenous {
        for name in exogenous_field_names(&ids) {
            columns.push(ColumnLabel {
                source: name,
                offset: 0,
            });
        }
    }

    let rows = n - lag;
    let mut x = Matrix::zeros(rows, columns.len());
    let mut y = Vec::with_capacity(rows);
    for i in 0..rows {
        let t = lag + i;
        for (j, col) in columns.iter().enumerate() {
            let row = &table.rows[(t as i32 + col.offset) as usize];
            x.set(i, j, field_value(row, &col.source));
        }
        let target = match target_kind {
            TargetKind::RegressionInflow => table.rows[t].tr_inflow as f64,
            TargetKind::Category1To6 => f64::from(
                categorize_delta(
                    table.rows[t].tr_inflow as f64,
                    table.rows[t - 1].tr_inflow as f64,
                )
                .0,
            ),
            TargetKind::RegressionInflowClass(k) => {
                table.rows[t].tr_inflow_by_class[(k - 1) as usize] as f64
            }
        };
        y.push(target);
    }

    Ok(SupervisedDataset {
        columns,
        x,
        y,
        target_kind,
    })
}

/// Last ceil(rows * test_fraction) rows become the test set; order kept.
pub fn chronological_split(
    dataset: &SupervisedDataset,
    test_fraction: f64,
) -> Result<(SupervisedDataset, SupervisedDataset), DatasetError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatasetError::InvalidTestFraction(test_fraction));
    }
    let rows = dataset.x.n_rows();
    if rows < 2 {
        return Err(DatasetError::TooFewRows { needed: 2, got: rows });
    }
    let test_rows = ((rows as f64) * test_fraction).ceil() as usize;
    let test_rows = test_rows.clamp(1, rows - 1);
    let cut = rows - test_rows;

    let part = |start: usize, end: usize| SupervisedDataset {
        columns: dataset.columns.clone(),
        x: dataset.x.slice_rows(start, end),
        y: dataset.y[start..end].to_vec(),
        target_kind: dataset.target_kind,
    };
    Ok((part(0, cut), part(cut, rows)))
}

/// Fills each period's cluster counts from a feature -> cluster map
/// (DBSCAN noise keyed as -1 becomes its own column).
pub fn augment_with_clusters(
    table: &TimeSeriesTable,
    assignments: &BTreeMap<String, i64>,
) -> Result<TimeSeriesTable, DatasetError> {
    for feature_id in assignments.keys() {
        if !table.known_feature_ids.contains(feature_id) {
            return Err(DatasetError::UnknownFeature(feature_id.clone()));
        }
    }
    let ids: BTreeSet<i64> = assignments.values().copied().collect();
    let mut out = table.clone();
    for row in &mut out.rows {
        let mut counts: BTreeMap<i64, u64> =
            ids.iter().map(|&id| (id, 0)).collect();
        for feature_id in &row.delivered_feature_ids {
            if let Some(&cluster) = assignments.get(feature_id) {
                *counts.get_mut(&cluster).unwrap() += 1;
            }
        }
        row.cluster_counts = if assignments.is_empty() {
            BTreeMap::new()
        } else {
            counts
        };
    }
    Ok(out)
}

/// Per-period inflow of one importance class over the whole table;
/// `build_lagged` targets are the [lag..] suffix of this vector.
pub fn per_class_target(table: &TimeSeriesTable, class_k: u8) -> Result<Vec<f64>, DatasetError> {
    if !(1..=5).contains(&class_k) {
        return Err(DatasetError::UnknownClass(class_k));
    }
    Ok(table
        .rows
        .iter()
        .map(|r| r.tr_inflow_by_class[(class_k - 1) as usize] as f64)
        .collect())
}

impl SupervisedDataset {
    /// Writes "name@offset" predictor columns plus a final "y" column.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = self.columns.iter().map(ColumnLabel::to_string).collect();
        header.push("y".to_string());
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..self.x.n_rows() {
            let mut cells: Vec<String> = self.x.row(i).iter().map(|v| format!("{v}")).collect();
            cells.push(format!("{}", self.y[i]));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Indices of columns whose source is `cluster_<id>` for any listed id.
    pub fn cluster_column_indices(&self, ids: &[i64]) -> Vec<usize> {
        let names: BTreeSet<String> = ids.iter().map(|id| format!("cluster_{id}")).collect();
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| names.contains(&c.source))
            .map(|(i, _)| i)
            .collect()
    }

    /// All cluster ids that have columns in this dataset.
    pub fn cluster_ids_present(&self) -> Vec<i64> {
        let mut ids = BTreeSet::new();
        for c in &self.columns {
            if let Some(raw) = c.source.strip_prefix("cluster_") {
                if let Ok(id) = raw.parse::<i64>() {
                    ids.insert(id);
                }
            }
        }
        ids.into_iter().collect()
    }

    /// Copy without the columns at the given indices.
    pub fn drop_columns(&self, drop: &[usize]) -> SupervisedDataset {
        let dropset: BTreeSet<usize> = drop.iter().copied().collect();
        let keep: Vec<usize> = (0..self.columns.len())
            .filter(|i| !dropset.contains(i))
            .collect();
        SupervisedDataset {
            columns: keep.iter().map(|&i| self.columns[i].clone()).collect(),
            x: self.x.select_columns(&keep),
            y: self.y.clone(),
            target_kind: self.target_kind,
        }
    }
}
