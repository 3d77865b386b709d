//! MAE, MSE and Pearson correlation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty series")]
    Empty,
    #[error("pearson needs at least 2 samples")]
    TooFew,
    #[error("pearson is undefined for a constant {0} series")]
    ZeroVariance(&'static str),
}

fn check(pred: &[f64], gold: &[f64]) -> Result<(), MetricsError> {
    if pred.len() != gold.len() {
        return Err(MetricsError::LengthMismatch(pred.len(), gold.len()));
    }
    if pred.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

pub fn mae(pred: &[f64], gold: &[f64]) -> Result<f64, MetricsError> {
    check(pred, gold)?;
    let s: f64 = pred.iter().zip(gold).map(|(p, g)| (p - g).abs()).sum();
    Ok(s / pred.len() as f64)
}

pub fn mse(pred: &[f64], gold: &[f64]) -> Result<f64, MetricsError> {
    check(pred, gold)?;
    let s: f64 = pred.iter().zip(gold).map(|(p, g)| (p - g) * (p - g)).sum();
    Ok(s / pred.len() as f64)
}

/// Sample Pearson correlation, computed on centered values.
pub fn pearson(pred: &[f64], gold: &[f64]) -> Result<f64, MetricsError> {
    check(pred, gold)?;
    if pred.len() < 2 {
        return Err(MetricsError::TooFew);
    }
    let n = pred.len() as f64;
    let mp = pred.iter().sum::<f64>() / n;
    let mg = gold.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (p, g) in pred.iter().zip(gold) {
        let (dp, dg) = (p - mp, g - mg);
        sxy += dp * dg;
        sxx += dp * dp;
        syy += dg * dg;
    }
    if sxx == 0.0 {
        return Err(MetricsError::ZeroVariance("prediction"));
    }
    if syy == 0.0 {
        return Err(MetricsError::ZeroVariance("gold"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mae: f64,
    pub mse: f64,
    pub pearson: f64,
    pub n: usize,
}

impl MetricsReport {
    pub fn compute(pred: &[f64], gold: &[f64]) -> Result<Self, MetricsError> {
        Ok(Self {
            mae: mae(pred, gold)?,
            mse: mse(pred, gold)?,
            pearson: pearson(pred, gold)?,
            n: pred.len(),
        })
    }

    pub fn to_tsv(&self) -> String {
        format!(
            "metric\tvalue\nmae\t{}\nmse\t{}\npearson\t{}\nn\t{}\n",
            self.mae, self.mse, self.pearson, self.n
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}
