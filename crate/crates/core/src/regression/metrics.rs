//! Evaluation metrics: mean squared error and coefficient of determination.

use crate::error::{Error, Result};

fn check_lengths(y_true: &[f64], y_pred: &[f64]) -> Result<()> {
    if y_true.is_empty() {
        return Err(Error::invalid("empty evaluation set"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} true vs {} predicted",
            y_true.len(),
            y_pred.len()
        )));
    }
    Ok(())
}

/// Mean of squared residuals.
pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    let n = y_true.len() as f64;
    Ok(y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p) * (t - p))
        .sum::<f64>()
        / n)
}

/// `1 - SS_res / SS_tot`, with `SS_tot` taken about the mean of the
/// evaluation set itself. Negative when the model underperforms a constant
/// mean predictor; undefined (error) when the evaluation target has zero
/// variance.
pub fn r2_score(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let ss_tot: f64 = y_true.iter().map(|t| (t - mean) * (t - mean)).sum();
    if ss_tot <= 0.0 {
        return Err(Error::UndefinedMetric(
            "R^2 requires nonzero target variance".to_string(),
        ));
    }
    let ss_res: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| (t - p) * (t - p))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}
