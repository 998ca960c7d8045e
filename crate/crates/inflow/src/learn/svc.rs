//! Soft-margin support vector classifier.
//!
//! Each class pair gets its own dual problem solved by simplified
//! sequential minimal optimization; multi-class decisions are
//! one-vs-one votes with ties to the lower label. The RBF bandwidth
//! follows the variance heuristic gamma = 1 / (n_features * Var(X)),
//! falling back to 1 when the variance is zero.

use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::matrix::Matrix;
use crate::rng::Rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvcConfig {
    pub c: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Consecutive clean passes over the data before stopping.
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvcConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 100,
            seed: 0,
        }
    }
}

/// One trained class pair: support vectors with their signed dual
/// coefficients and the bias term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairModel {
    pub class_low: i64,
    pub class_high: i64,
    pub support_vectors: Vec<Vec<f64>>,
    /// alpha_i * y_i per support vector.
    pub dual_coefficients: Vec<f64>,
    /// Raw alphas (for feasibility checks).
    pub alphas: Vec<f64>,
    /// +1/-1 labels of the support vectors.
    pub signs: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvcModel {
    pub classes: Vec<i64>,
    pub gamma: f64,
    pub c: f64,
    pub pairs: Vec<PairModel>,
}

fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    (-gamma * crate::matrix::squared_distance(a, b)).exp()
}

/// gamma = 1 / (n_features * population variance of all entries); 1 when
/// the variance (or width) is zero.
pub fn rbf_gamma_heuristic(x: &Matrix) -> f64 {
    let total = x.n_rows() * x.n_cols();
    if total == 0 {
        return 1.0;
    }
    let mean = x.data().iter().sum::<f64>() / total as f64;
    let var = x.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / total as f64;
    if var > 0.0 && x.n_cols() > 0 {
        1.0 / (x.n_cols() as f64 * var)
    } else {
        1.0
    }
}

struct PairProblem<'a> {
    rows: Vec<usize>,
    signs: Vec<f64>,
    x: &'a Matrix,
    kernel: Vec<f64>,
    m: usize,
}

impl PairProblem<'_> {
    fn decision(&self, alphas: &[f64], bias: f64, i: usize) -> f64 {
        let mut sum = bias;
        for k in 0..self.m {
            if alphas[k] > 0.0 {
                sum += alphas[k] * self.signs[k] * self.kernel[k * self.m + i];
            }
        }
        sum
    }
}

fn train_pair(
    x: &Matrix,
    labels: &[i64],
    class_low: i64,
    class_high: i64,
    gamma: f64,
    config: &SvcConfig,
    rng: &mut Rng,
) -> PairModel {
    let rows: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == class_low || labels[i] == class_high)
        .collect();
    let signs: Vec<f64> = rows
        .iter()
        .map(|&i| if labels[i] == class_low { 1.0 } else { -1.0 })
        .collect();
    let m = rows.len();
    let mut kernel = vec![0.0f64; m * m];
    for a in 0..m {
        for b in a..m {
            let k = rbf(gamma, x.row(rows[a]), x.row(rows[b]));
            kernel[a * m + b] = k;
            kernel[b * m + a] = k;
        }
    }
    let problem = PairProblem {
        rows,
        signs,
        x,
        kernel,
        m,
    };

    let mut alphas = vec![0.0f64; m];
    let mut bias = 0.0f64;
    let mut passes = 0usize;
    let mut total_sweeps = 0usize;
    // hard cap so adversarial data cannot spin forever
    let sweep_cap = config.max_passes.max(1) * 50;

    while passes < config.max_passes && total_sweeps < sweep_cap {
        let mut changed = 0usize;
        for i in 0..m {
            let e_i = problem.decision(&alphas, bias, i) - problem.signs[i];
            let r_i = problem.signs[i] * e_i;
            if !((r_i < -config.tol && alphas[i] < config.c)
                || (r_i > config.tol && alphas[i] > 0.0))
            {
                continue;
            }
            if m < 2 {
                break;
            }
            let mut j = rng.next_below(m as u64 - 1) as usize;
            if j >= i {
                j += 1;
            }
            let e_j = problem.decision(&alphas, bias, j) - problem.signs[j];
            let (alpha_i_old, alpha_j_old) = (alphas[i], alphas[j]);
            let (low, high) = if problem.signs[i] == problem.signs[j] {
                (
                    (alpha_i_old + alpha_j_old - config.c).max(0.0),
                    (alpha_i_old + alpha_j_old).min(config.c),
                )
            } else {
                (
                    (alpha_j_old - alpha_i_old).max(0.0),
                    (config.c + alpha_j_old - alpha_i_old).min(config.c),
                )
            };
            if low >= high {
                continue;
            }
            let eta = 2.0 * problem.kernel[i * m + j]
                - problem.kernel[i * m + i]
                - problem.kernel[j * m + j];
            if eta >= 0.0 {
                continue;
            }
            let mut alpha_j = alpha_j_old - problem.signs[j] * (e_i - e_j) / eta;
            alpha_j = alpha_j.clamp(low, high);
            if (alpha_j - alpha_j_old).abs() < 1e-5 {
                continue;
            }
            let alpha_i =
                alpha_i_old + problem.signs[i] * problem.signs[j] * (alpha_j_old - alpha_j);

            let b1 = bias
                - e_i
                - problem.signs[i] * (alpha_i - alpha_i_old) * problem.kernel[i * m + i]
                - problem.signs[j] * (alpha_j - alpha_j_old) * problem.kernel[i * m + j];
            let b2 = bias
                - e_j
                - problem.signs[i] * (alpha_i - alpha_i_old) * problem.kernel[i * m + j]
                - problem.signs[j] * (alpha_j - alpha_j_old) * problem.kernel[j * m + j];
            bias = if alpha_i > 0.0 && alpha_i < config.c {
                b1
            } else if alpha_j > 0.0 && alpha_j < config.c {
                b2
            } else {
                (b1 + b2) / 2.0
            };
            alphas[i] = alpha_i;
            alphas[j] = alpha_j;
            changed += 1;
        }
        if changed == 0 {
            passes += 1;
        } else {
            passes = 0;
        }
        total_sweeps += 1;
    }

    let mut support_vectors = Vec::new();
    let mut dual_coefficients = Vec::new();
    let mut kept_alphas = Vec::new();
    let mut kept_signs = Vec::new();
    for k in 0..m {
        if alphas[k] > 0.0 {
            support_vectors.push(problem.x.row(problem.rows[k]).to_vec());
            dual_coefficients.push(alphas[k] * problem.signs[k]);
            kept_alphas.push(alphas[k]);
            kept_signs.push(problem.signs[k]);
        }
    }
    PairModel {
        class_low,
        class_high,
        support_vectors,
        dual_coefficients,
        alphas: kept_alphas,
        signs: kept_signs,
        bias,
    }
}

impl PairModel {
    /// Decision value for one query point.
    pub fn decision(&self, gamma: f64, row: &[f64]) -> f64 {
        let mut sum = self.bias;
        for (sv, coef) in self.support_vectors.iter().zip(&self.dual_coefficients) {
            sum += coef * rbf(gamma, sv, row);
        }
        sum
    }
}

pub fn svc_fit(x: &Matrix, labels: &[i64], config: &SvcConfig) -> Result<SvcModel, LearnError> {
    let n = x.n_rows();
    if n == 0 || x.n_cols() == 0 {
        return Err(LearnError::EmptyInput);
    }
    if n != labels.len() {
        return Err(LearnError::LengthMismatch {
            rows: n,
            targets: labels.len(),
        });
    }
    if x.data().iter().any(|v| !v.is_finite()) {
        return Err(LearnError::NonFiniteValue);
    }
    let mut classes: Vec<i64> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(LearnError::SingleClass);
    }

    let gamma = rbf_gamma_heuristic(x);
    let mut pairs = Vec::new();
    for a in 0..classes.len() {
        for b in (a + 1)..classes.len() {
            let mut rng = Rng::substream(
                config.seed,
                "svc_pair",
                (a as u64) << 32 | b as u64,
            );
            pairs.push(train_pair(
                x, labels, classes[a], classes[b], gamma, config, &mut rng,
            ));
        }
    }
    Ok(SvcModel {
        classes,
        gamma,
        c: config.c,
        pairs,
    })
}

/// One-vs-one vote aggregation; a pair decision >= 0 votes the lower
/// class, and overall ties go to the lowest label.
pub fn svc_predict(model: &SvcModel, x: &Matrix) -> Result<Vec<i64>, LearnError> {
    if x.n_rows() > 0 && x.n_cols() != model.pairs[0].support_vectors.first().map_or(x.n_cols(), Vec::len)
    {
        return Err(LearnError::DimensionMismatch {
            expected: model.pairs[0].support_vectors[0].len(),
            got: x.n_cols(),
        });
    }
    let mut out = Vec::with_capacity(x.n_rows());
    for i in 0..x.n_rows() {
        let row = x.row(i);
        let mut votes: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
        for pair in &model.pairs {
            let winner = if pair.decision(model.gamma, row) >= 0.0 {
                pair.class_low
            } else {
                pair.class_high
            };
            *votes.entry(winner).or_insert(0) += 1;
        }
        // BTreeMap iterates ascending, so `>` keeps the lowest label on ties
        let mut best = (i64::MIN, 0usize);
        for (&label, &count) in &votes {
            if count > best.1 {
                best = (label, count);
            }
        }
        out.push(best.0);
    }
    Ok(out)
}
