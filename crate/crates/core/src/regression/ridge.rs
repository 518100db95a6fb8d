//! Degree-2 polynomial feature expansion and closed-form ridge regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expands feature rows to `[1, x_1..x_m, x_i * x_j for i <= j]`.
///
/// Column order is deterministic: the bias, the linear terms in input
/// order, then the degree-2 monomials in lexicographic `(i, j)` order
/// (squares included). Four inputs expand to 1 + 4 + 10 = 15 columns.
pub fn polynomial_features(rows: &[Vec<f64>], degree: usize) -> Result<Vec<Vec<f64>>> {
    if degree != 2 {
        return Err(Error::invalid(format!(
            "only degree 2 expansion is supported, got {degree}"
        )));
    }
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    let m = first.len();
    let width = 1 + m + m * (m + 1) / 2;
    let mut out = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        if row.len() != m {
            return Err(Error::invalid(format!(
                "ragged feature matrix: row {r} has {} columns, expected {m}",
                row.len()
            )));
        }
        let mut expanded = Vec::with_capacity(width);
        expanded.push(1.0);
        expanded.extend_from_slice(row);
        for i in 0..m {
            for j in i..m {
                expanded.push(row[i] * row[j]);
            }
        }
        out.push(expanded);
    }
    Ok(out)
}

/// Hyperparameters of the polynomial + ridge model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolyRidgeConfig {
    pub alpha: f64,
    pub degree: usize,
}

impl Default for PolyRidgeConfig {
    fn default() -> Self {
        PolyRidgeConfig {
            alpha: 1.0,
            degree: 2,
        }
    }
}

/// A fitted linear model in the original (unstandardized) feature space.
/// `weights[0]` is the intercept; `weights[j]` multiplies input column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub weights: Vec<f64>,
}

impl RidgeModel {
    /// `row` excludes the bias entry (it is implicit).
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.weights[0]
            + self.weights[1..]
                .iter()
                .zip(row)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }
}

/// Fits ridge regression on a design matrix whose first column is the bias
/// (all ones). Non-bias columns are standardized to training mean 0 and
/// variance 1 internally; the L2 penalty `alpha` is applied to the
/// standardized coefficients and never to the bias. The returned weights
/// are folded back to the original feature scale.
pub fn fit_ridge(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Result<RidgeModel> {
    if x.is_empty() || x.len() != y.len() {
        return Err(Error::invalid(format!(
            "design matrix has {} rows for {} targets",
            x.len(),
            y.len()
        )));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid(format!(
            "alpha must be non-negative, got {alpha}"
        )));
    }
    let n = x.len();
    let p = x[0].len();
    if p == 0 {
        return Err(Error::invalid("design matrix has no columns"));
    }
    for (r, row) in x.iter().enumerate() {
        if row.len() != p {
            return Err(Error::invalid(format!(
                "ragged design matrix: row {r} has {} columns, expected {p}",
                row.len()
            )));
        }
        if row[0] != 1.0 {
            return Err(Error::invalid(format!(
                "design matrix row {r} does not start with a bias 1"
            )));
        }
    }

    // column statistics over the training rows (bias column exempt)
    let mut mean = vec![0.0; p];
    let mut std = vec![1.0; p];
    for j in 1..p {
        let mu = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = x.iter().map(|r| (r[j] - mu) * (r[j] - mu)).sum::<f64>() / n as f64;
        mean[j] = mu;
        std[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
    }

    // normal equations on the standardized design: (Xs^T Xs + alpha I') w = Xs^T y
    let xs_at = |i: usize, j: usize| -> f64 {
        if j == 0 {
            1.0
        } else {
            (x[i][j] - mean[j]) / std[j]
        }
    };
    let mut gram = vec![vec![0.0; p]; p];
    let mut rhs = vec![0.0; p];
    for i in 0..n {
        for j in 0..p {
            let v = xs_at(i, j);
            rhs[j] += v * y[i];
            for k in j..p {
                gram[j][k] += v * xs_at(i, k);
            }
        }
    }
    for j in 0..p {
        for k in 0..j {
            gram[j][k] = gram[k][j];
        }
    }
    for (j, row) in gram.iter_mut().enumerate().skip(1) {
        row[j] += alpha;
    }

    let w = cholesky_solve(&gram, &rhs).map_err(|pivot| {
        if alpha == 0.0 {
            Error::RankDeficient(format!(
                "normal equations singular at column {pivot} with alpha = 0; \
                 the standardized design matrix is column-rank deficient"
            ))
        } else {
            Error::RankDeficient(format!("normal equations not positive definite at column {pivot}"))
        }
    })?;

    // fold standardization back into original-scale weights
    let mut weights = vec![0.0; p];
    weights[0] = w[0];
    for j in 1..p {
        weights[j] = w[j] / std[j];
        weights[0] -= w[j] * mean[j] / std[j];
    }
    Ok(RidgeModel { weights })
}

/// Cholesky factorization solve for a symmetric positive definite system.
/// Returns the offending column index when a pivot collapses.
fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> std::result::Result<Vec<f64>, usize> {
    let p = a.len();
    let scale = a
        .iter()
        .enumerate()
        .map(|(j, row)| row[j].abs())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let mut l = vec![vec![0.0; p]; p];
    for j in 0..p {
        for i in j..p {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= scale * 1e-12 {
                    return Err(j);
                }
                l[j][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // forward then backward substitution
    let mut z = vec![0.0; p];
    for i in 0..p {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * z[k];
        }
        z[i] = sum / l[i][i];
    }
    let mut w = vec![0.0; p];
    for i in (0..p).rev() {
        let mut sum = z[i];
        for k in (i + 1)..p {
            sum -= l[k][i] * w[k];
        }
        w[i] = sum / l[i][i];
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DeterministicRng;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn with_bias(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| {
                let mut v = Vec::with_capacity(r.len() + 1);
                v.push(1.0);
                v.extend_from_slice(r);
                v
            })
            .collect()
    }

    #[test]
    fn expansion_column_count() {
        let rows = vec![vec![1.0, 2.0, 3.0, 4.0]];
        let out = polynomial_features(&rows, 2).unwrap();
        assert_eq!(out[0].len(), 15);
    }

    #[test]
    fn expansion_of_zeros_is_bias_only() {
        let out = polynomial_features(&[vec![0.0; 4]], 2).unwrap();
        assert_eq!(out[0][0], 1.0);
        assert!(out[0][1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn expansion_of_ones_is_all_ones() {
        let out = polynomial_features(&[vec![1.0; 4]], 2).unwrap();
        assert!(out[0].iter().all(|v| *v == 1.0));
    }

    #[test]
    fn expansion_order_is_documented() {
        let out = polynomial_features(&[vec![2.0, 3.0]], 2).unwrap();
        // [1, x1, x2, x1^2, x1*x2, x2^2]
        assert_eq!(out[0], vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn unsupported_degree_rejected() {
        assert!(polynomial_features(&[vec![1.0]], 3).is_err());
    }

    #[test]
    fn exact_recovery_without_penalty() {
        let mut rng = DeterministicRng::seeded(5);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.next_f64() * 10.0, rng.next_f64() * 10.0])
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 3.0 * r[0] - 2.0 * r[1]).collect();
        let model = fit_ridge(&with_bias(&rows), &y, 0.0).unwrap();
        assert_abs_diff_eq!(model.weights[0], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(model.weights[1], 3.0, epsilon = 1e-6);
        assert_abs_diff_eq!(model.weights[2], -2.0, epsilon = 1e-6);
    }

    #[test]
    fn huge_penalty_predicts_train_mean() {
        let mut rng = DeterministicRng::seeded(6);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| vec![rng.next_f64(), rng.next_f64()])
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| 5.0 + r[0] - r[1]).collect();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        let model = fit_ridge(&with_bias(&rows), &y, 1e12).unwrap();
        for r in &rows {
            assert_abs_diff_eq!(model.predict_row(r), mean, epsilon = 1e-6);
        }
    }

    #[test]
    fn matches_normal_equations_oracle() {
        // independent route: Gauss-Jordan inversion of the same standardized
        // normal equations, coefficients folded back identically
        let mut rng = DeterministicRng::seeded(7);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..4).map(|_| rng.next_f64() * 4.0 - 2.0).collect())
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| 1.5 + r[0] - 0.5 * r[1] + 2.0 * r[2] * r[3] + 0.1 * rng.normal())
            .collect();
        let x = with_bias(&rows);
        let alpha = 1.0;
        let model = fit_ridge(&x, &y, alpha).unwrap();
        let oracle = oracle_ridge(&x, &y, alpha);
        for (a, b) in model.weights.iter().zip(&oracle) {
            assert_relative_eq!(a, b, max_relative = 1e-8, epsilon = 1e-8);
        }
    }

    #[test]
    fn singular_system_without_penalty_errors() {
        // duplicated column makes X rank deficient
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, i as f64]).collect();
        let y: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let err = fit_ridge(&with_bias(&rows), &y, 0.0).unwrap_err();
        assert!(matches!(err, Error::RankDeficient(_)), "{err}");
        // the same system solves with a positive penalty
        assert!(fit_ridge(&with_bias(&rows), &y, 1e-6).is_ok());
    }

    /// Brute-force reference: explicit matrix inversion of the standardized
    /// normal equations.
    fn oracle_ridge(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Vec<f64> {
        let n = x.len();
        let p = x[0].len();
        let mut mean = vec![0.0; p];
        let mut std = vec![1.0; p];
        for j in 1..p {
            let mu = x.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            let var = x.iter().map(|r| (r[j] - mu) * (r[j] - mu)).sum::<f64>() / n as f64;
            mean[j] = mu;
            std[j] = var.sqrt();
        }
        let xs: Vec<Vec<f64>> = x
            .iter()
            .map(|r| {
                (0..p)
                    .map(|j| if j == 0 { 1.0 } else { (r[j] - mean[j]) / std[j] })
                    .collect()
            })
            .collect();
        let mut a = vec![vec![0.0; p]; p];
        let mut b = vec![0.0; p];
        for i in 0..n {
            for j in 0..p {
                b[j] += xs[i][j] * y[i];
                for k in 0..p {
                    a[j][k] += xs[i][j] * xs[i][k];
                }
            }
        }
        for (j, row) in a.iter_mut().enumerate().skip(1) {
            row[j] += alpha;
        }
        let inv = invert(a);
        let w: Vec<f64> = (0..p)
            .map(|j| (0..p).map(|k| inv[j][k] * b[k]).sum())
            .collect();
        let mut weights = vec![0.0; p];
        weights[0] = w[0];
        for j in 1..p {
            weights[j] = w[j] / std[j];
            weights[0] -= w[j] * mean[j] / std[j];
        }
        weights
    }

    fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let p = a.len();
        let mut inv: Vec<Vec<f64>> = (0..p)
            .map(|i| (0..p).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        for col in 0..p {
            let pivot_row = (col..p)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, pivot_row);
            inv.swap(col, pivot_row);
            let pivot = a[col][col];
            for j in 0..p {
                a[col][j] /= pivot;
                inv[col][j] /= pivot;
            }
            for i in 0..p {
                if i != col {
                    let factor = a[i][col];
                    for j in 0..p {
                        a[i][j] -= factor * a[col][j];
                        inv[i][j] -= factor * inv[col][j];
                    }
                }
            }
        }
        inv
    }
}
