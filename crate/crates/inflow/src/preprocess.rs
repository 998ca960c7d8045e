//! Column-wise scalers: MinMax, two Robust variants, and the quantile
//! transformer with uniform or normal output.
//!
//! All scalers follow the same fit/transform contract. Percentiles use
//! linear interpolation between closest ranks; constant columns always
//! transform to 0. MinMax and Robust are exactly invertible, the
//! quantile kinds are not.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("input matrix is empty")]
    EmptyInput,
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("dimension mismatch: fitted on {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0:?} scaling is not invertible")]
    NotInvertible(ScalerKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalerKind {
    MinMax,
    /// Median center, interquartile (p25..p75) scale.
    RobustV1,
    /// Median center, wider p10..p90 scale.
    RobustV2,
    QuantileUniform,
    QuantileNormal,
}

impl ScalerKind {
    pub fn all() -> [ScalerKind; 5] {
        [
            ScalerKind::MinMax,
            ScalerKind::RobustV1,
            ScalerKind::RobustV2,
            ScalerKind::QuantileUniform,
            ScalerKind::QuantileNormal,
        ]
    }

    pub fn label(&self) -> &'static str {
        match self {
            ScalerKind::MinMax => "minmax",
            ScalerKind::RobustV1 => "robust_v1",
            ScalerKind::RobustV2 => "robust_v2",
            ScalerKind::QuantileUniform => "quantile_uniform",
            ScalerKind::QuantileNormal => "quantile_normal",
        }
    }
}

impl std::fmt::Display for ScalerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalerSpec {
    pub kind: ScalerKind,
    /// Landmark count for the quantile kinds, capped at the row count.
    pub quantile_landmarks: usize,
}

impl ScalerSpec {
    pub fn new(kind: ScalerKind) -> Self {
        Self {
            kind,
            quantile_landmarks: 1000,
        }
    }
}

/// Per-column fitted parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
enum ColumnParams {
    MinMax {
        min: f64,
        max: f64,
    },
    Robust {
        center: f64,
        scale: f64,
    },
    /// Landmark table: input values (nondecreasing) with their
    /// cumulative ranks in [0, 1]. Empty for constant columns.
    Quantile {
        values: Vec<f64>,
        ranks: Vec<f64>,
        constant: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedScaler {
    pub spec: ScalerSpec,
    columns: Vec<ColumnParams>,
}

/// Percentile by linear interpolation between closest ranks
/// (q in [0, 1], data must be sorted ascending).
fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    if sorted.len() == 1 {
        return sorted[0];
    }
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Inverse standard-normal CDF (Acklam's rational approximation,
/// accurate to ~1e-9 over the clipped input range used here).
fn probit(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -probit(1.0 - p)
    }
}

const NORMAL_CLIP: f64 = 1e-7;

/// Median center with an interpercentile scale. A zero percentile range
/// on a non-constant column (e.g. mostly-zero counts) widens to the next
/// window - p10..p90, then min..max - so the scale stays positive and
/// the transform invertible; truly constant columns are flagged and
/// transform to 0.
fn robust_params(sorted: &[f64], lo: f64, hi: f64) -> ColumnParams {
    let constant = sorted[0] == sorted[sorted.len() - 1];
    let scale = if constant {
        0.0
    } else {
        [(lo, hi), (0.10, 0.90), (0.0, 1.0)]
            .iter()
            .map(|&(l, h)| percentile_sorted(sorted, h) - percentile_sorted(sorted, l))
            .find(|&range| range > 0.0)
            .unwrap_or(1.0)
    };
    ColumnParams::Robust {
        center: percentile_sorted(sorted, 0.5),
        scale,
    }
}

/// Fits per-column parameters on the training matrix.
pub fn fit(spec: &ScalerSpec, x: &Matrix) -> Result<FittedScaler, PreprocessError> {
    if x.is_empty() {
        return Err(PreprocessError::EmptyInput);
    }
    for r in 0..x.n_rows() {
        for c in 0..x.n_cols() {
            if !x.get(r, c).is_finite() {
                return Err(PreprocessError::NonFiniteValue { row: r, col: c });
            }
        }
    }

    let mut columns = Vec::with_capacity(x.n_cols());
    for c in 0..x.n_cols() {
        let mut col = x.column(c);
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let params = match spec.kind {
            ScalerKind::MinMax => ColumnParams::MinMax {
                min: col[0],
                max: col[col.len() - 1],
            },
            ScalerKind::RobustV1 => robust_params(&col, 0.25, 0.75),
            ScalerKind::RobustV2 => robust_params(&col, 0.10, 0.90),
            ScalerKind::QuantileUniform | ScalerKind::QuantileNormal => {
                let constant = col[0] == col[col.len() - 1];
                if constant {
                    ColumnParams::Quantile {
                        values: Vec::new(),
                        ranks: Vec::new(),
                        constant: true,
                    }
                } else {
                    let n = spec.quantile_landmarks.max(2).min(col.len()).max(2);
                    let mut values = Vec::with_capacity(n);
                    let mut ranks = Vec::with_capacity(n);
                    for i in 0..n {
                        let q = i as f64 / (n - 1) as f64;
                        values.push(percentile_sorted(&col, q));
                        ranks.push(q);
                    }
                    // collapse duplicate landmark values to their mean rank
                    // so interpolation stays single-valued
                    let mut cv: Vec<f64> = Vec::new();
                    let mut cr: Vec<f64> = Vec::new();
                    let mut i = 0;
                    while i < values.len() {
                        let mut j = i;
                        let mut rank_sum = 0.0;
                        while j < values.len() && values[j] == values[i] {
                            rank_sum += ranks[j];
                            j += 1;
                        }
                        cv.push(values[i]);
                        cr.push(rank_sum / (j - i) as f64);
                        i = j;
                    }
                    ColumnParams::Quantile {
                        values: cv,
                        ranks: cr,
                        constant: false,
                    }
                }
            }
        };
        columns.push(params);
    }
    Ok(FittedScaler {
        spec: spec.clone(),
        columns,
    })
}

fn quantile_rank(values: &[f64], ranks: &[f64], x: f64) -> f64 {
    if x <= values[0] {
        return ranks[0];
    }
    let last = values.len() - 1;
    if x >= values[last] {
        return ranks[last];
    }
    // values strictly increasing after duplicate collapsing
    let hi = values.partition_point(|v| *v < x);
    let lo = hi - 1;
    if values[hi] == x {
        return ranks[hi];
    }
    let t = (x - values[lo]) / (values[hi] - values[lo]);
    ranks[lo] + t * (ranks[hi] - ranks[lo])
}

impl FittedScaler {
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    fn check_cols(&self, got: usize) -> Result<(), PreprocessError> {
        if got != self.columns.len() {
            return Err(PreprocessError::DimensionMismatch {
                expected: self.columns.len(),
                got,
            });
        }
        Ok(())
    }

    fn transform_value(&self, c: usize, v: f64) -> f64 {
        match &self.columns[c] {
            ColumnParams::MinMax { min, max } => {
                if max > min {
                    (v - min) / (max - min)
                } else {
                    0.0
                }
            }
            ColumnParams::Robust { center, scale } => {
                if *scale > 0.0 {
                    (v - center) / scale
                } else {
                    0.0
                }
            }
            ColumnParams::Quantile {
                values,
                ranks,
                constant,
            } => {
                if *constant {
                    return 0.0;
                }
                let rank = quantile_rank(values, ranks, v).clamp(0.0, 1.0);
                match self.spec.kind {
                    ScalerKind::QuantileNormal => {
                        probit(rank.clamp(NORMAL_CLIP, 1.0 - NORMAL_CLIP))
                    }
                    _ => rank,
                }
            }
        }
    }

    pub fn transform(&self, x: &Matrix) -> Result<Matrix, PreprocessError> {
        self.check_cols(x.n_cols())?;
        let mut out = Matrix::zeros(x.n_rows(), x.n_cols());
        for r in 0..x.n_rows() {
            for c in 0..x.n_cols() {
                out.set(r, c, self.transform_value(c, x.get(r, c)));
            }
        }
        Ok(out)
    }

    /// Exact algebraic inverse for MinMax/Robust; the quantile kinds reject.
    pub fn inverse_transform(&self, x: &Matrix) -> Result<Matrix, PreprocessError> {
        self.check_cols(x.n_cols())?;
        let mut out = Matrix::zeros(x.n_rows(), x.n_cols());
        for r in 0..x.n_rows() {
            for c in 0..x.n_cols() {
                let v = x.get(r, c);
                let raw = match &self.columns[c] {
                    ColumnParams::MinMax { min, max } => {
                        if max > min {
                            v * (max - min) + min
                        } else {
                            *min
                        }
                    }
                    ColumnParams::Robust { center, scale } => {
                        if *scale > 0.0 {
                            v * scale + center
                        } else {
                            *center
                        }
                    }
                    ColumnParams::Quantile { .. } => {
                        return Err(PreprocessError::NotInvertible(self.spec.kind));
                    }
                };
                out.set(r, c, raw);
            }
        }
        Ok(out)
    }

    /// Fit/transform convenience for a single vector (e.g. targets).
    pub fn transform_vec(&self, v: &[f64]) -> Result<Vec<f64>, PreprocessError> {
        let m = Matrix::from_vec(v.len(), 1, v.to_vec());
        Ok(self.transform(&m)?.data().to_vec())
    }

    pub fn inverse_transform_vec(&self, v: &[f64]) -> Result<Vec<f64>, PreprocessError> {
        let m = Matrix::from_vec(v.len(), 1, v.to_vec());
        Ok(self.inverse_transform(&m)?.data().to_vec())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scaler serializes")
    }

    pub fn from_json(raw: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(raw)
    }
}

/// Fits a scaler on a single column vector.
pub fn fit_vec(spec: &ScalerSpec, v: &[f64]) -> Result<FittedScaler, PreprocessError> {
    fit(spec, &Matrix::from_vec(v.len(), 1, v.to_vec()))
}
