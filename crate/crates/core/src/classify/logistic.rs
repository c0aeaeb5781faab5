//! L2-regularized logistic regression trained by full-batch gradient descent.
//!
//! The objective is the mean binary cross-entropy plus `(λ/2)·‖w‖²`:
//!
//! ```text
//! L(w, b) = (1/N) Σ [ y·softplus(−z) + (1−y)·softplus(z) ] + (λ/2)·‖w‖²,   z = w·x + b
//! ```
//!
//! which is the usual `−y·ln σ(z) − (1−y)·ln(1−σ(z))` written so that no
//! logarithm of a rounded-to-zero probability is ever taken.

use log::debug;
use serde::{Deserialize, Serialize};

use super::{check_examples, Example};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::textfeat::SparseVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            learning_rate: 0.5,
            epochs: 200,
            l2_lambda: 1e-4,
        }
    }
}

impl LogisticConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.l2_lambda.is_finite() && self.l2_lambda >= 0.0) {
            return Err(Error::Config(format!(
                "l2 lambda must be non-negative, got {}",
                self.l2_lambda
            )));
        }
        Ok(())
    }
}

/// Weights and bias of a fitted model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogisticParams {
    pub fn zeros(n_features: usize) -> Self {
        LogisticParams {
            weights: vec![0.0; n_features],
            bias: 0.0,
        }
    }

    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    pub fn probability(&self, x: &SparseVector) -> f64 {
        sigmoid(self.decision(x))
    }

    /// Positive when the probability is at least one half.
    pub fn predict(&self, x: &SparseVector) -> Label {
        Label::from(self.probability(x) >= 0.5)
    }
}

/// Logistic function evaluated without overflow for large `|z|`.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)`, equal to `−ln σ(−z)`.
pub fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn target(label: Label) -> f64 {
    label.as_u8() as f64
}

fn l2_penalty(params: &LogisticParams, l2: f64) -> f64 {
    0.5 * l2 * params.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Regularized mean cross-entropy over `data`.
pub fn loss(params: &LogisticParams, data: &[Example], l2: f64) -> f64 {
    let n = data.len() as f64;
    let data_term: f64 = data
        .iter()
        .map(|(x, y)| {
            let z = params.decision(x);
            match y {
                Label::Positive => softplus(-z),
                Label::Negative => softplus(z),
            }
        })
        .sum();
    data_term / n + l2_penalty(params, l2)
}

/// Analytic gradient `((1/N)·Σ(σ(z)−y)·x + λw, (1/N)·Σ(σ(z)−y))`.
pub fn gradient(params: &LogisticParams, batch: &[Example], l2: f64) -> Result<(Vec<f64>, f64)> {
    if batch.is_empty() {
        return Err(Error::Usage("gradient of an empty batch".into()));
    }
    let n = batch.len() as f64;
    let mut grad_w = vec![0.0; params.weights.len()];
    let mut grad_b = 0.0;
    for (x, y) in batch {
        let residual = sigmoid(params.decision(x)) - target(*y);
        for (i, v) in x.iter() {
            grad_w[i] += residual * v;
        }
        grad_b += residual;
    }
    for (g, w) in grad_w.iter_mut().zip(&params.weights) {
        *g = *g / n + l2 * w;
    }
    Ok((grad_w, grad_b / n))
}

/// Runs exactly `cfg.epochs` gradient steps from zero weights.
///
/// Returns the fitted parameters and the loss trajectory: the loss before
/// every step followed by the final loss, `epochs + 1` values in all.
pub fn train(
    data: &[Example],
    n_features: usize,
    cfg: &LogisticConfig,
) -> Result<(LogisticParams, Vec<f64>)> {
    cfg.validate()?;
    check_examples(data, n_features)?;

    let mut params = LogisticParams::zeros(n_features);
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    for epoch in 0..cfg.epochs {
        let current = loss(&params, data, cfg.l2_lambda);
        if !current.is_finite() {
            return Err(Error::NonFinite { epoch });
        }
        history.push(current);
        let (grad_w, grad_b) = gradient(&params, data, cfg.l2_lambda)?;
        for (w, g) in params.weights.iter_mut().zip(&grad_w) {
            *w -= cfg.learning_rate * g;
        }
        params.bias -= cfg.learning_rate * grad_b;
        if epoch % 50 == 0 {
            debug!("logistic epoch {epoch}: loss {current:.6}");
        }
    }
    let last = loss(&params, data, cfg.l2_lambda);
    if !last.is_finite() || params.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::NonFinite { epoch: cfg.epochs });
    }
    history.push(last);
    Ok((params, history))
}
