//! Report emission: report.json, the CSV tables, and the SVG charts.
//!
//! Table cells print at 4 decimal places; report.json keeps full
//! precision. Everything is assembled from plain report data in a fixed
//! order so output bytes never depend on timing or thread count.

use std::fmt::Write as _;
use std::path::Path;

use super::{
    io_err, FullReport, GridTable, ImportanceTable, PipelineError, Test1Artifacts, Test2Artifacts,
    Test3Report,
};
use crate::corpus::InflowCurve;
use crate::evaluate::{EvalReport, ImportanceEntry};

fn fmt4(value: f64) -> String {
    format!("{value:.4}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt4).unwrap_or_default()
}

fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Table-4/14-shaped performance grid: one column per model, one row per
/// (score, slice).
pub fn performance_csv(performance: &std::collections::BTreeMap<String, EvalReport>) -> String {
    let models = [
        "random_forest_classifier",
        "random_forest_regressor",
        "lasso",
        "svc",
    ];
    let mut out = String::from("score,slice");
    for m in models {
        out.push(',');
        out.push_str(m);
    }
    out.push('\n');
    let cell = |model: &str, slice: &str, score: &str| -> String {
        let Some(eval) = performance.get(model) else {
            return String::new();
        };
        let Some(metrics) = eval.slices.get(slice) else {
            return String::new();
        };
        match score {
            "MAE" => fmt4(metrics.mae),
            "MSE" => fmt4(metrics.mse),
            "R2" => fmt_opt(metrics.r2),
            "f1" => fmt_opt(metrics.f1),
            _ => String::new(),
        }
    };
    for score in ["MAE", "R2", "MSE", "f1"] {
        for slice in ["full", "test", "train"] {
            let _ = write!(out, "{score},{slice}");
            for model in models {
                out.push(',');
                out.push_str(&cell(model, slice, score));
            }
            out.push('\n');
        }
    }
    out
}

/// Table-5/6-shaped top-features list.
pub fn importance_top_csv(entries: &[ImportanceEntry]) -> String {
    let mut out = String::from("rank,feature,importance\n");
    for e in entries {
        let label = crate::dataset::ColumnLabel {
            source: e.feature_name.clone(),
            offset: e.time_offset,
        };
        let _ = writeln!(out, "{},{},{}", e.rank, label.report_style(), fmt4(e.importance));
    }
    out
}

/// Tables-7/8-shaped clustering summary for one level.
pub fn clustering_summary_csv(rows: &[super::ClusteringSummaryRow]) -> String {
    let mut out = String::from(
        "algorithm,scaler,files_silhouette,files_largest_pct,files_clusters,loc_silhouette,loc_largest_pct,loc_clusters\n",
    );
    for row in rows {
        let side = |info: &Option<super::ClusterCandidateInfo>| -> (String, String, String) {
            match info {
                Some(i) => (
                    fmt_opt(i.silhouette),
                    format!("{:.1}", 100.0 * i.largest_fraction),
                    i.cluster_count.to_string(),
                ),
                None => (String::new(), String::new(), String::new()),
            }
        };
        let (fs, fl, fc) = side(&row.files);
        let (ls, ll, lc) = side(&row.loc);
        let _ = writeln!(
            out,
            "{:?},{},{fs},{fl},{fc},{ls},{ll},{lc}",
            row.algorithm, row.scaler
        );
    }
    out.to_lowercase()
}

/// One DBSCAN grid (240 rows) as CSV.
pub fn grid_csv(grid: &GridTable) -> String {
    let mut out = String::from("min_pts,eps,silhouette,clusters,largest_fraction,noise_fraction\n");
    for row in &grid.rows {
        let _ = writeln!(
            out,
            "{},{:.1},{},{},{},{}",
            row.min_pts,
            row.eps,
            fmt_opt(row.silhouette),
            row.clusters,
            fmt4(row.largest_fraction),
            fmt4(row.noise_fraction)
        );
    }
    out
}

/// Tables-11/12/13-shaped importance grid: methods as row triples
/// (feature / time step / importance), ranks as columns.
pub fn importance_table_csv(table: &ImportanceTable) -> String {
    let width = super::IMPORTANCE_TABLE_WIDTH;
    let mut out = String::from("method,row");
    for rank in 1..=width {
        let _ = write!(out, ",{rank}");
    }
    out.push('\n');
    for method in ["correlation", "lasso", "forest"] {
        let entries = table.methods.get(method).cloned().unwrap_or_default();
        for row_kind in ["feature", "time_step", "importance"] {
            let _ = write!(out, "{method},{row_kind}");
            for rank in 0..width {
                out.push(',');
                if let Some(e) = entries.get(rank) {
                    match row_kind {
                        "feature" => out.push_str(&e.feature_name),
                        "time_step" => {
                            let _ = write!(out, "{}", e.time_offset);
                        }
                        _ => out.push_str(&fmt4(e.importance)),
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Per-cluster ablation deltas.
pub fn ablation_csv(test3: &Test3Report) -> String {
    let mut out = String::from(
        "removed_cluster,mae_full,mae_test,mse_full,mse_test,r2_full,r2_test,delta_mae_test,delta_mse_test\n",
    );
    for result in &test3.ablation {
        let ids: Vec<String> = result.removed_clusters.iter().map(|i| i.to_string()).collect();
        let full = &result.eval.slices["full"];
        let test = &result.eval.slices["test"];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            ids.join("+"),
            fmt4(full.mae),
            fmt4(test.mae),
            fmt4(full.mse),
            fmt4(test.mse),
            fmt_opt(full.r2),
            fmt_opt(test.r2),
            fmt_opt(result.delta_vs_baseline.get("mae_test").copied()),
            fmt_opt(result.delta_vs_baseline.get("mse_test").copied()),
        );
    }
    out
}

// ---------------------------------------------------------------------
// SVG charts
// ---------------------------------------------------------------------

const CHART_W: f64 = 860.0;
const CHART_H: f64 = 420.0;
const MARGIN: f64 = 55.0;

struct Scale {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Scale {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-12);
        MARGIN + (v - self.x_min) / span * (CHART_W - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-12);
        CHART_H - MARGIN - (v - self.y_min) / span * (CHART_H - 2.0 * MARGIN)
    }
}

fn svg_header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {CHART_W} {CHART_H}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{CHART_W}\" height=\"{CHART_H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        CHART_W / 2.0
    )
}

fn axes(scale: &Scale, x_label: &str, y_label: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>",
        m = MARGIN,
        r = CHART_W - MARGIN,
        t = MARGIN,
        b = CHART_H - MARGIN
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>",
        CHART_W / 2.0,
        CHART_H - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{y_label}</text>",
        CHART_H / 2.0,
        CHART_H / 2.0
    );
    for i in 0..=4 {
        let vy = scale.y_min + (scale.y_max - scale.y_min) * f64::from(i) / 4.0;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\">{:.1}</text>",
            MARGIN - 6.0,
            scale.y(vy) + 4.0,
            vy
        );
    }
    out
}

fn polyline(scale: &Scale, points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", scale.x(*x), scale.y(*y)))
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

/// Cumulative-inflow step chart for one release with markers at the
/// release date and 122 days later.
pub fn cumulative_inflow_svg(curve: &InflowCurve) -> String {
    let first_day = curve.points.first().map(|(d, _)| *d).unwrap_or(curve.release_date);
    let day = |d: chrono::NaiveDate| (d - first_day).num_days() as f64;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut prev = 0.0;
    for (date, pct) in &curve.points {
        pts.push((day(*date), prev));
        pts.push((day(*date), *pct));
        prev = *pct;
    }
    let x_max = pts.last().map(|(x, _)| *x).unwrap_or(1.0).max(day(curve.release_date) + 130.0);
    let scale = Scale {
        x_min: 0.0,
        x_max,
        y_min: 0.0,
        y_max: 100.0,
    };
    let mut svg = svg_header(&format!(
        "Cumulative trouble-report inflow, release {}",
        curve.release_id
    ));
    svg.push_str(&axes(&scale, "days", "% of total reports"));
    svg.push_str(&polyline(&scale, &pts, "#1f77b4"));
    for (offset, label) in [(0.0, "release"), (122.0, "+122 days")] {
        let x = scale.x(day(curve.release_date) + offset);
        let _ = writeln!(
            svg,
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n\
             <text x=\"{x:.2}\" y=\"{}\" text-anchor=\"middle\" fill=\"gray\">{label}</text>",
            MARGIN,
            CHART_H - MARGIN,
            MARGIN - 8.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Actual vs predicted inflow over the supervised periods (raw units).
pub fn actual_vs_predicted_svg(series: &[(String, f64, f64)]) -> String {
    let actual: Vec<(f64, f64)> = series
        .iter()
        .enumerate()
        .map(|(i, (_, a, _))| (i as f64, *a))
        .collect();
    let predicted: Vec<(f64, f64)> = series
        .iter()
        .enumerate()
        .map(|(i, (_, _, p))| (i as f64, *p))
        .collect();
    let y_max = actual
        .iter()
        .chain(&predicted)
        .map(|(_, y)| *y)
        .fold(1.0f64, f64::max);
    let y_min = actual
        .iter()
        .chain(&predicted)
        .map(|(_, y)| *y)
        .fold(0.0f64, f64::min);
    let scale = Scale {
        x_min: 0.0,
        x_max: (series.len().max(2) - 1) as f64,
        y_min,
        y_max,
    };
    let mut svg = svg_header("Actual vs predicted trouble-report inflow");
    svg.push_str(&axes(&scale, "period", "reports"));
    svg.push_str(&polyline(&scale, &actual, "#1f77b4"));
    svg.push_str(&polyline(&scale, &predicted, "#d62728"));
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"40\" fill=\"#1f77b4\">actual</text>\n\
         <text x=\"{}\" y=\"56\" fill=\"#d62728\">predicted</text>",
        CHART_W - MARGIN - 70.0,
        CHART_W - MARGIN - 70.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Serializes any report section as pretty JSON.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let json = serde_json::to_string_pretty(value)
        .map_err(|e| PipelineError::Config(format!("report serialization: {e}")))?;
    write_file(path, &json)
}

/// Test-1 tables and charts.
pub fn emit_test1(
    test1: &super::Test1Report,
    artifacts: &Test1Artifacts,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let tables = out_dir.join("tables");
    write_file(
        &tables.join("test1_performance.csv"),
        &performance_csv(&test1.performance),
    )?;
    write_file(
        &tables.join("test1_forest_classifier_top5.csv"),
        &importance_top_csv(&test1.forest_classifier_top),
    )?;
    write_file(
        &tables.join("test1_forest_regressor_top5.csv"),
        &importance_top_csv(&test1.forest_regressor_top),
    )?;
    let charts = out_dir.join("charts");
    if let Some(curve) = &artifacts.busiest_release_curve {
        write_file(&charts.join("cumulative_inflow.svg"), &cumulative_inflow_svg(curve))?;
    }
    write_file(
        &charts.join("actual_vs_predicted.svg"),
        &actual_vs_predicted_svg(&artifacts.prediction_series),
    )
}

/// Test-2 summaries, grids, and the persisted winner.
pub fn emit_test2(
    test2: &super::Test2Report,
    artifacts: &Test2Artifacts,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    let tables = out_dir.join("tables");
    for (level, rows) in &test2.summaries {
        write_file(
            &tables.join(format!("clustering_{level}.csv")),
            &clustering_summary_csv(rows),
        )?;
    }
    for grid in &artifacts.grids {
        write_file(
            &tables.join(format!(
                "dbscan_grid_{}_{}_{}.csv",
                grid.level, grid.measure, grid.scaler
            )),
            &grid_csv(grid),
        )?;
    }
    write_json(
        &out_dir.join("selected_model.json"),
        &super::SelectedModel {
            winner: test2.winner.clone(),
            assignments: test2.winner_assignments.clone(),
        },
    )
}

/// Test-3 tables.
pub fn emit_test3(test3: &Test3Report, out_dir: &Path) -> Result<(), PipelineError> {
    let tables = out_dir.join("tables");
    write_file(
        &tables.join("test3_performance.csv"),
        &performance_csv(&test3.performance),
    )?;
    for table in &test3.importance {
        write_file(
            &tables.join(format!("importance_{}.csv", table.target)),
            &importance_table_csv(table),
        )?;
    }
    write_file(&tables.join("ablation.csv"), &ablation_csv(test3))
}

/// Writes report.json plus every table and chart.
pub fn emit_outputs(
    full: &FullReport,
    artifacts1: &Test1Artifacts,
    artifacts2: &Test2Artifacts,
    out_dir: &Path,
) -> Result<(), PipelineError> {
    write_json(&out_dir.join("report.json"), full)?;
    emit_test1(&full.test1, artifacts1, out_dir)?;
    emit_test2(&full.test2, artifacts2, out_dir)?;
    emit_test3(&full.test3, out_dir)
}
