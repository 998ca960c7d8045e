//! The four-subset corpus: commits, trouble reports, software features,
//! and releases, plus the derived per-feature change footprints.
//!
//! Corpora arrive as flat CSV files (UTF-8, header row, RFC-4180). After
//! loading, a bundle is validated (unique keys, resolvable references),
//! features are linked to the first release at or after their last commit,
//! and rare subsystems are consolidated into "Single Group".

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name given to consolidated rare subsystems.
pub const SINGLE_GROUP: &str = "Single Group";

/// Default occurrence threshold below which a subsystem is consolidated.
pub const CONSOLIDATION_THRESHOLD: usize = 13;

/// Post-release window, in days, counted as "early" detection.
pub const EARLY_POST_WINDOW_DAYS: i64 = 122;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{row}: column '{column}': {reason}")]
    Parse {
        file: String,
        row: usize,
        column: String,
        reason: String,
    },
    #[error("duplicate {kind} id '{id}'")]
    DuplicateKey { kind: &'static str, id: String },
    #[error("{kind} references unknown '{id}'")]
    DanglingReference { kind: &'static str, id: String },
    #[error("unknown release '{0}'")]
    UnknownRelease(String),
    #[error("release '{0}' has no trouble reports")]
    NoReports(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// One commit row: what changed, where, and for which software feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub commit_id: String,
    pub feature_id: String,
    pub date: NaiveDate,
    pub system: String,
    pub subsystem: String,
    pub files_changed: u64,
    pub loc_added: u64,
    pub loc_removed: u64,
    pub loc_modified: u64,
}

/// One reported failure with release attribution and severity class 1-5.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TroubleReport {
    pub tr_id: String,
    pub date_reported: NaiveDate,
    pub release_id: String,
    pub importance_class: u8,
}

/// A delivered software feature. `release_id` is filled by linking.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub feature_id: String,
    pub completion_date: NaiveDate,
    pub development_time_days: u64,
    pub release_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Release {
    pub release_id: String,
    pub release_date: NaiveDate,
}

/// The four linked collections. Immutable after validation; operations
/// return new bundles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusBundle {
    pub commits: Vec<CommitRecord>,
    pub trouble_reports: Vec<TroubleReport>,
    pub features: Vec<FeatureRecord>,
    pub releases: Vec<Release>,
    /// Commit feature_ids with no matching feature record (reported, not fatal).
    pub orphan_feature_ids: Vec<String>,
    /// Set once `link_features_to_releases` has run.
    pub linked: bool,
}

/// Aggregation granularity for footprints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FootprintLevel {
    System,
    Subsystem,
}

impl fmt::Display for FootprintLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FootprintLevel::System => write!(f, "system"),
            FootprintLevel::Subsystem => write!(f, "subsystem"),
        }
    }
}

/// Change magnitude measure for footprints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FootprintMeasure {
    Files,
    Loc,
}

impl fmt::Display for FootprintMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FootprintMeasure::Files => write!(f, "files"),
            FootprintMeasure::Loc => write!(f, "loc"),
        }
    }
}

/// Per-feature change vector over systems or subsystems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFootprint {
    pub feature_id: String,
    pub level: FootprintLevel,
    pub measure: FootprintMeasure,
    pub vector: BTreeMap<String, f64>,
}

/// Footprint construction result: the vectors plus skipped feature ids
/// (features whose commits sum to an all-zero vector).
#[derive(Debug, Clone)]
pub struct FootprintSet {
    pub footprints: Vec<FeatureFootprint>,
    pub skipped_empty: Vec<String>,
}

/// Daily cumulative-inflow step curve for one release, plus the
/// pre-release / early-post detection statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InflowCurve {
    pub release_id: String,
    pub release_date: NaiveDate,
    /// (date, cumulative percent of total) at each distinct report date.
    pub points: Vec<(NaiveDate, f64)>,
    pub stats: InflowStats,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InflowStats {
    pub total: usize,
    pub pre_release: usize,
    pub post_release: usize,
    pub early_post: usize,
    /// Reports dated before the release date, over the total.
    pub pre_release_fraction: f64,
    /// Among post-release reports, those within 122 days of release.
    pub early_post_fraction: Option<f64>,
}

fn parse_err(file: &str, row: usize, column: &str, reason: impl fmt::Display) -> CorpusError {
    CorpusError::Parse {
        file: file.to_string(),
        row,
        column: column.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_date(file: &str, row: usize, column: &str, raw: &str) -> Result<NaiveDate, CorpusError> {
    NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d")
        .map_err(|e| parse_err(file, row, column, format!("invalid date '{raw}': {e}")))
}

fn parse_count(file: &str, row: usize, column: &str, raw: &str) -> Result<u64, CorpusError> {
    raw.trim()
        .parse::<u64>()
        .map_err(|e| parse_err(file, row, column, format!("invalid count '{raw}': {e}")))
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CorpusError> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: match e.into_kind() {
                csv::ErrorKind::Io(io) => io,
                other => std::io::Error::other(format!("{other:?}")),
            },
        })
}

fn record_fields<'a>(
    file: &str,
    row: usize,
    rec: &'a csv::StringRecord,
    expect: usize,
) -> Result<&'a csv::StringRecord, CorpusError> {
    if rec.len() != expect {
        return Err(parse_err(
            file,
            row,
            "<row>",
            format!("expected {expect} fields, got {}", rec.len()),
        ));
    }
    Ok(rec)
}

fn read_rows(path: &Path, file: &str, expect: usize) -> Result<Vec<csv::StringRecord>, CorpusError> {
    let mut reader = open_reader(path)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after the header line
        let rec = rec.map_err(|e| parse_err(file, row, "<row>", e))?;
        record_fields(file, row, &rec, expect)?;
        rows.push(rec);
    }
    Ok(rows)
}

/// Loads and validates the four corpus files.
///
/// `feature_id_map` optionally translates commit-data feature ids into
/// feature-data ids (columns `feature_data_id,commit_data_id`); when
/// absent the two id spaces are assumed shared.
pub fn load_corpus(
    commit_path: &Path,
    tr_path: &Path,
    feature_path: &Path,
    release_path: &Path,
    feature_id_map: Option<&Path>,
) -> Result<CorpusBundle, CorpusError> {
    let id_map: BTreeMap<String, String> = match feature_id_map {
        Some(path) => {
            let rows = read_rows(path, "feature_id_map.csv", 2)?;
            let mut map = BTreeMap::new();
            for (i, rec) in rows.iter().enumerate() {
                // keyed by commit-data id, value is the feature-data id
                let prev = map.insert(rec[1].to_string(), rec[0].to_string());
                if prev.is_some() {
                    return Err(parse_err(
                        "feature_id_map.csv",
                        i + 2,
                        "commit_data_id",
                        format!("duplicate mapping for '{}'", &rec[1]),
                    ));
                }
            }
            map
        }
        None => BTreeMap::new(),
    };

    let mut releases = Vec::new();
    for (i, rec) in read_rows(release_path, "releases.csv", 2)?.iter().enumerate() {
        let row = i + 2;
        releases.push(Release {
            release_id: rec[0].to_string(),
            release_date: parse_date("releases.csv", row, "release_date", &rec[1])?,
        });
    }

    let mut features = Vec::new();
    for (i, rec) in read_rows(feature_path, "features.csv", 3)?.iter().enumerate() {
        let row = i + 2;
        if rec[0].trim().is_empty() {
            return Err(parse_err("features.csv", row, "feature_id", "empty id"));
        }
        features.push(FeatureRecord {
            feature_id: rec[0].to_string(),
            completion_date: parse_date("features.csv", row, "completion_date", &rec[1])?,
            development_time_days: parse_count("features.csv", row, "development_time_days", &rec[2])?,
            release_id: None,
        });
    }

    let mut trouble_reports = Vec::new();
    for (i, rec) in read_rows(tr_path, "trouble_reports.csv", 4)?.iter().enumerate() {
        let row = i + 2;
        let class = parse_count("trouble_reports.csv", row, "importance_class", &rec[3])?;
        if !(1..=5).contains(&class) {
            return Err(parse_err(
                "trouble_reports.csv",
                row,
                "importance_class",
                format!("class {class} outside 1..5"),
            ));
        }
        trouble_reports.push(TroubleReport {
            tr_id: rec[0].to_string(),
            date_reported: parse_date("trouble_reports.csv", row, "date_reported", &rec[1])?,
            release_id: rec[2].to_string(),
            importance_class: class as u8,
        });
    }

    let mut commits = Vec::new();
    for (i, rec) in read_rows(commit_path, "commits.csv", 9)?.iter().enumerate() {
        let row = i + 2;
        if rec[1].trim().is_empty() {
            return Err(parse_err("commits.csv", row, "feature_id", "empty id"));
        }
        let raw_feature = rec[1].to_string();
        let feature_id = id_map.get(&raw_feature).cloned().unwrap_or(raw_feature);
        commits.push(CommitRecord {
            commit_id: rec[0].to_string(),
            feature_id,
            date: parse_date("commits.csv", row, "date", &rec[2])?,
            system: rec[3].to_string(),
            subsystem: rec[4].to_string(),
            files_changed: parse_count("commits.csv", row, "files_changed", &rec[5])?,
            loc_added: parse_count("commits.csv", row, "loc_added", &rec[6])?,
            loc_removed: parse_count("commits.csv", row, "loc_removed", &rec[7])?,
            loc_modified: parse_count("commits.csv", row, "loc_modified", &rec[8])?,
        });
    }

    validate_bundle(commits, trouble_reports, features, releases)
}

/// Convenience loader over a directory with the canonical file names.
pub fn load_corpus_dir(dir: &Path) -> Result<CorpusBundle, CorpusError> {
    let map_path = dir.join("feature_id_map.csv");
    load_corpus(
        &dir.join("commits.csv"),
        &dir.join("trouble_reports.csv"),
        &dir.join("features.csv"),
        &dir.join("releases.csv"),
        map_path.exists().then_some(map_path.as_path()),
    )
}

fn validate_bundle(
    commits: Vec<CommitRecord>,
    trouble_reports: Vec<TroubleReport>,
    features: Vec<FeatureRecord>,
    releases: Vec<Release>,
) -> Result<CorpusBundle, CorpusError> {
    let mut seen = BTreeSet::new();
    for r in &releases {
        if !seen.insert(r.release_id.clone()) {
            return Err(CorpusError::DuplicateKey {
                kind: "release",
                id: r.release_id.clone(),
            });
        }
    }
    let release_ids: BTreeSet<&str> = releases.iter().map(|r| r.release_id.as_str()).collect();

    let mut feature_ids = BTreeSet::new();
    for f in &features {
        if !feature_ids.insert(f.feature_id.clone()) {
            return Err(CorpusError::DuplicateKey {
                kind: "feature",
                id: f.feature_id.clone(),
            });
        }
    }

    let mut tr_ids = BTreeSet::new();
    for (i, tr) in trouble_reports.iter().enumerate() {
        if !(1..=5).contains(&tr.importance_class) {
            return Err(parse_err(
                "trouble_reports",
                i + 1,
                "importance_class",
                format!("class {} outside 1..5", tr.importance_class),
            ));
        }
        if !tr_ids.insert(tr.tr_id.clone()) {
            return Err(CorpusError::DuplicateKey {
                kind: "trouble_report",
                id: tr.tr_id.clone(),
            });
        }
        if !release_ids.contains(tr.release_id.as_str()) {
            return Err(CorpusError::DanglingReference {
                kind: "trouble_report",
                id: tr.release_id.clone(),
            });
        }
    }

    let mut commit_ids = BTreeSet::new();
    let mut orphans = BTreeSet::new();
    for (i, c) in commits.iter().enumerate() {
        if c.feature_id.trim().is_empty() {
            return Err(parse_err("commits", i + 1, "feature_id", "empty id"));
        }
        if !commit_ids.insert(c.commit_id.clone()) {
            return Err(CorpusError::DuplicateKey {
                kind: "commit",
                id: c.commit_id.clone(),
            });
        }
        if !feature_ids.contains(&c.feature_id) {
            orphans.insert(c.feature_id.clone());
        }
    }

    Ok(CorpusBundle {
        commits,
        trouble_reports,
        features,
        releases,
        orphan_feature_ids: orphans.into_iter().collect(),
        linked: false,
    })
}

/// Builds a validated bundle from in-memory records (the generator path).
pub fn bundle_from_records(
    commits: Vec<CommitRecord>,
    trouble_reports: Vec<TroubleReport>,
    features: Vec<FeatureRecord>,
    releases: Vec<Release>,
) -> Result<CorpusBundle, CorpusError> {
    validate_bundle(commits, trouble_reports, features, releases)
}

impl CorpusBundle {
    /// Releases sorted by date, ties broken by id.
    pub fn releases_in_order(&self) -> Vec<&Release> {
        let mut ordered: Vec<&Release> = self.releases.iter().collect();
        ordered.sort_by(|a, b| {
            a.release_date
                .cmp(&b.release_date)
                .then_with(|| a.release_id.cmp(&b.release_id))
        });
        ordered
    }

    pub fn release_by_id(&self, id: &str) -> Option<&Release> {
        self.releases.iter().find(|r| r.release_id == id)
    }

    /// Feature ids that remained unlinked after `link_features_to_releases`.
    pub fn unreleased_features(&self) -> Vec<&str> {
        if !self.linked {
            return Vec::new();
        }
        self.features
            .iter()
            .filter(|f| f.release_id.is_none())
            .map(|f| f.feature_id.as_str())
            .collect()
    }
}

/// Assigns each feature the earliest release dated at or after the
/// feature's latest commit (completion date when it has no commits).
/// Features dated later than every release stay unassigned and are
/// reported by `CorpusBundle::unreleased_features`.
pub fn link_features_to_releases(bundle: &CorpusBundle) -> CorpusBundle {
    let ordered: Vec<(NaiveDate, String)> = bundle
        .releases_in_order()
        .iter()
        .map(|r| (r.release_date, r.release_id.clone()))
        .collect();

    let mut last_commit: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    for c in &bundle.commits {
        last_commit
            .entry(c.feature_id.as_str())
            .and_modify(|d| {
                if c.date > *d {
                    *d = c.date;
                }
            })
            .or_insert(c.date);
    }

    let mut out = bundle.clone();
    for f in &mut out.features {
        let reference = last_commit
            .get(f.feature_id.as_str())
            .copied()
            .unwrap_or(f.completion_date);
        f.release_id = ordered
            .iter()
            .find(|(date, _)| *date >= reference)
            .map(|(_, id)| id.clone());
    }
    out.linked = true;
    out
}

/// Renames every subsystem occurring fewer than `threshold` times across
/// all commit rows to "Single Group". Idempotent.
pub fn consolidate_rare_subsystems(bundle: &CorpusBundle, threshold: usize) -> CorpusBundle {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in &bundle.commits {
        *counts.entry(c.subsystem.as_str()).or_insert(0) += 1;
    }
    let rare: BTreeSet<String> = counts
        .iter()
        .filter(|(name, &n)| n < threshold && **name != SINGLE_GROUP)
        .map(|(name, _)| (*name).to_string())
        .collect();

    let mut out = bundle.clone();
    for c in &mut out.commits {
        if rare.contains(&c.subsystem) {
            c.subsystem = SINGLE_GROUP.to_string();
        }
    }
    out
}

/// Builds one footprint per feature with at least one commit, summing
/// `files_changed` (files) or added+removed+modified LOC (loc) per unit.
pub fn build_footprints(
    bundle: &CorpusBundle,
    level: FootprintLevel,
    measure: FootprintMeasure,
) -> FootprintSet {
    let mut per_feature: BTreeMap<&str, BTreeMap<String, f64>> = BTreeMap::new();
    for c in &bundle.commits {
        let unit = match level {
            FootprintLevel::System => c.system.clone(),
            FootprintLevel::Subsystem => c.subsystem.clone(),
        };
        let magnitude = match measure {
            FootprintMeasure::Files => c.files_changed as f64,
            FootprintMeasure::Loc => (c.loc_added + c.loc_removed + c.loc_modified) as f64,
        };
        *per_feature
            .entry(c.feature_id.as_str())
            .or_default()
            .entry(unit)
            .or_insert(0.0) += magnitude;
    }

    let mut footprints = Vec::new();
    let mut skipped = Vec::new();
    for (feature_id, vector) in per_feature {
        if vector.values().all(|&v| v == 0.0) {
            skipped.push(feature_id.to_string());
            continue;
        }
        footprints.push(FeatureFootprint {
            feature_id: feature_id.to_string(),
            level,
            measure,
            vector,
        });
    }
    FootprintSet {
        footprints,
        skipped_empty: skipped,
    }
}

impl FootprintSet {
    /// Dense matrix over the union vocabulary (unit names sorted), plus
    /// the feature ids in row order and the unit names in column order.
    pub fn to_matrix(&self) -> (crate::matrix::Matrix, Vec<String>, Vec<String>) {
        let mut units: BTreeSet<&str> = BTreeSet::new();
        for fp in &self.footprints {
            units.extend(fp.vector.keys().map(String::as_str));
        }
        let units: Vec<String> = units.into_iter().map(str::to_string).collect();
        let index: BTreeMap<&str, usize> = units
            .iter()
            .enumerate()
            .map(|(i, u)| (u.as_str(), i))
            .collect();
        let mut m = crate::matrix::Matrix::zeros(self.footprints.len(), units.len());
        let mut ids = Vec::with_capacity(self.footprints.len());
        for (r, fp) in self.footprints.iter().enumerate() {
            ids.push(fp.feature_id.clone());
            for (unit, &v) in &fp.vector {
                m.set(r, index[unit.as_str()], v);
            }
        }
        (m, ids, units)
    }
}

/// Cumulative percentage of the release's trouble reports as a daily step
/// function, plus pre-release / early-post fractions.
pub fn cumulative_inflow_curve(
    bundle: &CorpusBundle,
    release_id: &str,
) -> Result<InflowCurve, CorpusError> {
    let release = bundle
        .release_by_id(release_id)
        .ok_or_else(|| CorpusError::UnknownRelease(release_id.to_string()))?;

    let mut dates: Vec<NaiveDate> = bundle
        .trouble_reports
        .iter()
        .filter(|tr| tr.release_id == release_id)
        .map(|tr| tr.date_reported)
        .collect();
    if dates.is_empty() {
        return Err(CorpusError::NoReports(release_id.to_string()));
    }
    dates.sort();

    let total = dates.len();
    let mut points = Vec::new();
    let mut seen = 0usize;
    let mut i = 0usize;
    while i < total {
        let day = dates[i];
        while i < total && dates[i] == day {
            seen += 1;
            i += 1;
        }
        points.push((day, 100.0 * seen as f64 / total as f64));
    }

    let pre = dates.iter().filter(|d| **d < release.release_date).count();
    let post = total - pre;
    let early = dates
        .iter()
        .filter(|d| {
            **d >= release.release_date
                && (**d - release.release_date).num_days() <= EARLY_POST_WINDOW_DAYS
        })
        .count();

    Ok(InflowCurve {
        release_id: release_id.to_string(),
        release_date: release.release_date,
        points,
        stats: InflowStats {
            total,
            pre_release: pre,
            post_release: post,
            early_post: early,
            pre_release_fraction: pre as f64 / total as f64,
            early_post_fraction: (post > 0).then(|| early as f64 / post as f64),
        },
    })
}

/// Corpus-level aggregate of the per-release detection statistics,
/// weighted by report count.
pub fn corpus_inflow_stats(bundle: &CorpusBundle) -> Option<InflowStats> {
    let mut total = 0usize;
    let mut pre = 0usize;
    let mut post = 0usize;
    let mut early = 0usize;
    for release in &bundle.releases {
        if let Ok(curve) = cumulative_inflow_curve(bundle, &release.release_id) {
            total += curve.stats.total;
            pre += curve.stats.pre_release;
            post += curve.stats.post_release;
            early += curve.stats.early_post;
        }
    }
    (total > 0).then(|| InflowStats {
        total,
        pre_release: pre,
        post_release: post,
        early_post: early,
        pre_release_fraction: pre as f64 / total as f64,
        early_post_fraction: (post > 0).then(|| early as f64 / post as f64),
    })
}

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes the bundle back out in the canonical CSV schemas.
pub fn save_corpus(bundle: &CorpusBundle, dir: &Path) -> Result<(), CorpusError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;

    let write = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<(), CorpusError> {
        let path = dir.join(name);
        let mut w = csv::Writer::from_path(&path).map_err(|e| {
            io_err(
                &path,
                match e.into_kind() {
                    csv::ErrorKind::Io(io) => io,
                    other => std::io::Error::other(format!("{other:?}")),
                },
            )
        })?;
        w.write_record(header)
            .and_then(|()| rows.iter().try_for_each(|r| w.write_record(r)))
            .and_then(|()| w.flush().map_err(csv::Error::from))
            .map_err(|e| io_err(&path, std::io::Error::other(e)))
    };

    write(
        "commits.csv",
        &[
            "commit_id",
            "feature_id",
            "date",
            "system",
            "subsystem",
            "files_changed",
            "loc_added",
            "loc_removed",
            "loc_modified",
        ],
        bundle
            .commits
            .iter()
            .map(|c| {
                vec![
                    c.commit_id.clone(),
                    c.feature_id.clone(),
                    c.date.to_string(),
                    c.system.clone(),
                    c.subsystem.clone(),
                    c.files_changed.to_string(),
                    c.loc_added.to_string(),
                    c.loc_removed.to_string(),
                    c.loc_modified.to_string(),
                ]
            })
            .collect(),
    )?;

    write(
        "trouble_reports.csv",
        &["tr_id", "date_reported", "release_id", "importance_class"],
        bundle
            .trouble_reports
            .iter()
            .map(|tr| {
                vec![
                    tr.tr_id.clone(),
                    tr.date_reported.to_string(),
                    tr.release_id.clone(),
                    tr.importance_class.to_string(),
                ]
            })
            .collect(),
    )?;

    write(
        "features.csv",
        &["feature_id", "completion_date", "development_time_days"],
        bundle
            .features
            .iter()
            .map(|f| {
                vec![
                    f.feature_id.clone(),
                    f.completion_date.to_string(),
                    f.development_time_days.to_string(),
                ]
            })
            .collect(),
    )?;

    write(
        "releases.csv",
        &["release_id", "release_date"],
        bundle
            .releases
            .iter()
            .map(|r| vec![r.release_id.clone(), r.release_date.to_string()])
            .collect(),
    )
}
