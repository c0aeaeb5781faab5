//! Multinomial naive Bayes over raw term counts with additive smoothing.

use serde::{Deserialize, Serialize};

use super::{check_examples, Example};
use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::textfeat::SparseVector;

/// Relative gap below which two class scores are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesConfig {
    pub alpha: f64,
}

impl Default for NaiveBayesConfig {
    fn default() -> Self {
        NaiveBayesConfig { alpha: 1.0 }
    }
}

impl NaiveBayesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Config(format!(
                "smoothing alpha must be positive, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Class log-priors and per-class term log-probabilities, indexed by label
/// (`[negative, positive]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    pub log_prior: [f64; 2],
    pub log_likelihood: [Vec<f64>; 2],
}

impl NaiveBayesParams {
    /// Unnormalized log-posterior of each class.
    pub fn scores(&self, x: &SparseVector) -> [f64; 2] {
        [0, 1].map(|c| self.log_prior[c] + x.dot(&self.log_likelihood[c]))
    }

    /// Highest-scoring class; a tie goes to the positive class.
    ///
    /// Scores within [`TIE_TOLERANCE`] (relative) of each other count as a
    /// tie, so posteriors that are equal as rationals are not split by
    /// rounding in the summed logarithms.
    pub fn predict(&self, x: &SparseVector) -> Label {
        let [neg, pos] = self.scores(x);
        let slack = TIE_TOLERANCE * neg.abs().max(pos.abs()).max(1.0);
        Label::from(pos >= neg - slack)
    }

    pub fn n_features(&self) -> usize {
        self.log_likelihood[0].len()
    }

    pub(crate) fn validate(&self, n_features: usize) -> Result<(), String> {
        if self.log_likelihood.iter().any(|l| l.len() != n_features) {
            return Err(format!(
                "log_likelihood rows must have {n_features} entries"
            ));
        }
        let all = self
            .log_prior
            .iter()
            .chain(self.log_likelihood.iter().flatten());
        if all.clone().any(|v| !v.is_finite() || *v > 0.0) {
            return Err("log probabilities must be finite and non-positive".into());
        }
        Ok(())
    }
}

/// Fits priors `ln(N_c / N)` and likelihoods
/// `ln((count(t, c) + α) / (total(c) + α·V))`.
///
/// ```
/// use sentirec::classify::naive_bayes::{train, NaiveBayesConfig};
/// use sentirec::corpus::Label;
/// use sentirec::textfeat::SparseVector;
///
/// // vocabulary {bad: 0, good: 1}
/// let data = vec![
///     (SparseVector::from_dense(&[0.0, 2.0]).unwrap(), Label::Positive),
///     (SparseVector::from_dense(&[1.0, 0.0]).unwrap(), Label::Negative),
/// ];
/// let model = train(&data, 2, &NaiveBayesConfig::default()).unwrap();
/// assert!((model.log_likelihood[1][1].exp() - 0.75).abs() < 1e-12);
/// ```
pub fn train(
    data: &[Example],
    n_features: usize,
    cfg: &NaiveBayesConfig,
) -> Result<NaiveBayesParams> {
    cfg.validate()?;
    check_examples(data, n_features)?;

    let mut docs = [0usize; 2];
    let mut counts = [vec![0.0; n_features], vec![0.0; n_features]];
    for (x, y) in data {
        let c = y.index();
        docs[c] += 1;
        for (i, v) in x.iter() {
            counts[c][i] += v;
        }
    }

    let n = data.len() as f64;
    let log_prior = docs.map(|d| (d as f64 / n).ln());
    let log_likelihood = counts.map(|row| {
        let total: f64 = row.iter().sum();
        let denom = total + cfg.alpha * n_features as f64;
        row.into_iter()
            .map(|c| ((c + cfg.alpha) / denom).ln())
            .collect()
    });
    Ok(NaiveBayesParams {
        log_prior,
        log_likelihood,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> NaiveBayesParams {
        let data = vec![
            (
                SparseVector::from_dense(&[0.0, 2.0]).unwrap(),
                Label::Positive,
            ),
            (
                SparseVector::from_dense(&[1.0, 0.0]).unwrap(),
                Label::Negative,
            ),
        ];
        train(&data, 2, &NaiveBayesConfig::default()).unwrap()
    }

    #[test]
    fn smoothing_formula() {
        let m = toy();
        assert!((m.log_likelihood[1][1].exp() - 0.75).abs() < 1e-12);
        assert!((m.log_likelihood[0][1].exp() - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.log_prior[0].exp() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn toy_predictions() {
        let m = toy();
        assert_eq!(
            m.predict(&SparseVector::from_dense(&[0.0, 1.0]).unwrap()),
            Label::Positive
        );
        assert_eq!(
            m.predict(&SparseVector::from_dense(&[1.0, 0.0]).unwrap()),
            Label::Negative
        );
        // Equal priors and no evidence: tie goes to the positive class.
        assert_eq!(m.predict(&SparseVector::default()), Label::Positive);
    }

    #[test]
    fn distributions_are_normalized() {
        let data = vec![
            (
                SparseVector::from_dense(&[3.0, 0.0, 1.0, 0.0]).unwrap(),
                Label::Positive,
            ),
            (
                SparseVector::from_dense(&[0.0, 2.0, 1.0, 0.0]).unwrap(),
                Label::Negative,
            ),
            (
                SparseVector::from_dense(&[1.0, 1.0, 0.0, 0.0]).unwrap(),
                Label::Negative,
            ),
        ];
        let m = train(&data, 4, &NaiveBayesConfig { alpha: 0.25 }).unwrap();
        let prior: f64 = m.log_prior.iter().map(|p| p.exp()).sum();
        assert!((prior - 1.0).abs() < 1e-9);
        for row in &m.log_likelihood {
            let total: f64 = row.iter().map(|l| l.exp()).sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(row.iter().all(|l| l.is_finite()));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let one_class = vec![(SparseVector::from_dense(&[1.0]).unwrap(), Label::Negative)];
        assert!(matches!(
            train(&one_class, 1, &NaiveBayesConfig::default()),
            Err(Error::TrainingData(_))
        ));
        let both = vec![
            (SparseVector::from_dense(&[1.0]).unwrap(), Label::Negative),
            (SparseVector::from_dense(&[2.0]).unwrap(), Label::Positive),
        ];
        for alpha in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                train(&both, 1, &NaiveBayesConfig { alpha }),
                Err(Error::Config(_))
            ));
        }
    }
}
