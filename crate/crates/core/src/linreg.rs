//! Ridge regression solved through the normal equations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_LAMBDA: f64 = 1e-6;

/// Cholesky pivots below this fraction of the largest diagonal entry are
/// treated as zero.
const PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum LinregError {
    #[error("empty training set")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("{rows} rows but {targets} targets")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("lambda must be non-negative and finite")]
    BadLambda,
    #[error("normal equations are singular; use lambda > 0")]
    Singular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
}

impl LinModel {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `w·x + b` without clamping.
    pub fn raw(&self, x: &[f64]) -> Result<f64, LinregError> {
        if x.len() != self.weights.len() {
            return Err(LinregError::DimMismatch {
                expected: self.weights.len(),
                found: x.len(),
            });
        }
        Ok(self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.intercept)
    }

    /// Prediction clamped to `[0, 1]`.
    pub fn predict(&self, x: &[f64]) -> Result<f64, LinregError> {
        Ok(self.raw(x)?.clamp(0.0, 1.0))
    }
}

/// Minimizes `‖Xw + b − y‖² + λ‖w‖²` with an unpenalized intercept.
///
/// Centering removes the intercept from the system, leaving
/// `(XcᵀXc + λI) w = Xcᵀ yc` and `b = ȳ − x̄·w`.
pub fn fit<R: AsRef<[f64]>>(x: &[R], y: &[f64], lambda: f64) -> Result<LinModel, LinregError> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(LinregError::BadLambda);
    }
    let n = x.len();
    if n == 0 {
        return Err(LinregError::Empty);
    }
    if y.len() != n {
        return Err(LinregError::LengthMismatch {
            rows: n,
            targets: y.len(),
        });
    }
    let d = x[0].as_ref().len();
    for r in x {
        if r.as_ref().len() != d {
            return Err(LinregError::DimMismatch {
                expected: d,
                found: r.as_ref().len(),
            });
        }
    }

    let nf = n as f64;
    let mut x_mean = vec![0.0; d];
    for r in x {
        for (m, v) in x_mean.iter_mut().zip(r.as_ref()) {
            *m += v;
        }
    }
    x_mean.iter_mut().for_each(|m| *m /= nf);
    let y_mean = y.iter().sum::<f64>() / nf;

    // upper triangle of the Gram matrix, row-major
    let mut a = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    let mut xc = vec![0.0; d];
    for (r, &yi) in x.iter().zip(y) {
        for (c, (v, m)) in xc.iter_mut().zip(r.as_ref().iter().zip(&x_mean)) {
            *c = v - m;
        }
        let yc = yi - y_mean;
        for i in 0..d {
            let xi = xc[i];
            if xi == 0.0 {
                continue;
            }
            rhs[i] += xi * yc;
            let row = &mut a[i * d..(i + 1) * d];
            for j in i..d {
                row[j] += xi * xc[j];
            }
        }
    }
    for i in 0..d {
        a[i * d + i] += lambda;
        for j in 0..i {
            a[i * d + j] = a[j * d + i];
        }
    }

    let weights = if d == 0 {
        Vec::new()
    } else {
        cholesky_solve(&mut a, &rhs, d)?
    };
    let intercept = y_mean - weights.iter().zip(&x_mean).map(|(w, m)| w * m).sum::<f64>();
    Ok(LinModel {
        weights,
        intercept,
        lambda,
    })
}

/// Solves `A w = b` for symmetric positive definite `A` (overwritten by its
/// Cholesky factor).
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn cholesky_solve(a: &mut [f64], b: &[f64], d: usize) -> Result<Vec<f64>, LinregError> {
    let max_diag = (0..d).map(|i| a[i * d + i]).fold(0.0_f64, f64::max);
    let floor = max_diag * PIVOT_RTOL;
    for j in 0..d {
        let mut s = a[j * d + j];
        for k in 0..j {
            s -= a[j * d + k] * a[j * d + k];
        }
        if !(s > floor) || s <= 0.0 {
            return Err(LinregError::Singular);
        }
        let l = s.sqrt();
        a[j * d + j] = l;
        for i in j + 1..d {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = s / l;
        }
    }
    // forward: L z = b
    let mut z = b.to_vec();
    for i in 0..d {
        let mut s = z[i];
        for k in 0..i {
            s -= a[i * d + k] * z[k];
        }
        z[i] = s / a[i * d + i];
    }
    // backward: Lᵀ w = z
    for i in (0..d).rev() {
        let mut s = z[i];
        for k in i + 1..d {
            s -= a[k * d + i] * z[k];
        }
        z[i] = s / a[i * d + i];
    }
    Ok(z)
}
