//! From-scratch learners: LASSO by cyclic coordinate descent, Random
//! Forest (Gini classifier / MSE regressor), and a soft-margin SVC
//! trained with sequential minimal optimization.

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod forest;
mod lasso;
mod svc;

pub use forest::{
    forest_fit, forest_predict, gini_impurity, Criterion, ForestConfig, ForestMode, ForestModel,
    TreeNode,
};
pub use lasso::{lasso_fit, lasso_predict, soft_threshold, LassoConfig, LassoModel};
pub use svc::{svc_fit, svc_predict, SvcConfig, SvcModel};

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row/target length mismatch: {rows} rows vs {targets} targets")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("non-finite value in input")]
    NonFiniteValue,
    #[error("training data contains a single class")]
    SingleClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    L1,
    L2,
}

/// Error of one output-input pair: the norm of the prediction residual.
pub fn pair_error(y_pred: &[f64], y_true: &[f64], norm: Norm) -> Result<f64, LearnError> {
    if y_pred.len() != y_true.len() {
        return Err(LearnError::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let error = match norm {
        Norm::L1 => y_pred
            .iter()
            .zip(y_true)
            .map(|(p, t)| (p - t).abs())
            .sum(),
        Norm::L2 => y_pred
            .iter()
            .zip(y_true)
            .map(|(p, t)| (p - t) * (p - t))
            .sum::<f64>()
            .sqrt(),
    };
    Ok(error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_error_identity() {
        assert_eq!(pair_error(&[3.0], &[3.0], Norm::L2).unwrap(), 0.0);
    }

    #[test]
    fn pair_error_l2() {
        assert_eq!(pair_error(&[1.0, 2.0], &[1.0, 4.0], Norm::L2).unwrap(), 2.0);
    }

    #[test]
    fn pair_error_l1() {
        assert_eq!(pair_error(&[1.0, 2.0], &[0.0, 0.0], Norm::L1).unwrap(), 3.0);
    }

    #[test]
    fn pair_error_rejects_mismatch() {
        assert!(pair_error(&[1.0], &[1.0, 2.0], Norm::L1).is_err());
    }
}
