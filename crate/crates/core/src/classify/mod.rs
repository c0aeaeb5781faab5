//! Binary sentiment classifiers.
//!
//! Three model families share one contract: fit on labelled sparse vectors,
//! predict `0` or `1` for a new vector. [`SentimentModel`] bundles a fitted
//! model with its vocabulary and configuration so it can classify raw text
//! and be written to disk.

pub mod forest;
pub mod logistic;
pub mod naive_bayes;
mod persist;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{CustomerRecord, Label};
use crate::error::{Error, Result};
use crate::textfeat::{tokenize, FeatureKind, SparseVector, Vocabulary, DEFAULT_MAX_TERMS};

pub use self::forest::{ForestConfig, MaxFeatures, RandomForest};
pub use self::logistic::{LogisticConfig, LogisticParams};
pub use self::naive_bayes::{NaiveBayesConfig, NaiveBayesParams};
pub use self::persist::FORMAT_VERSION;

/// A feature vector paired with its label.
pub type Example = (SparseVector, Label);

/// Shared preconditions of every trainer: non-empty, both classes present,
/// indices inside the feature space.
pub(crate) fn check_examples(data: &[Example], n_features: usize) -> Result<()> {
    if n_features == 0 {
        return Err(Error::TrainingData("feature space is empty".into()));
    }
    if let Some((x, _)) = data
        .iter()
        .find(|(x, _)| x.max_index().is_some_and(|i| i >= n_features))
    {
        return Err(Error::TrainingData(format!(
            "feature index {} outside a space of {n_features}",
            x.max_index().unwrap_or_default()
        )));
    }
    let positives = data.iter().filter(|(_, y)| *y == Label::Positive).count();
    match (positives, data.len() - positives) {
        (0, 0) => Err(Error::TrainingData("no training examples".into())),
        (0, _) => Err(Error::TrainingData(
            "training data has only negative examples".into(),
        )),
        (_, 0) => Err(Error::TrainingData(
            "training data has only positive examples".into(),
        )),
        _ => Ok(()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "lr")]
    Logistic,
    #[serde(rename = "mnb")]
    NaiveBayes,
    #[serde(rename = "rf")]
    Forest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::Logistic,
        ModelKind::NaiveBayes,
        ModelKind::Forest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Logistic => "lr",
            ModelKind::NaiveBayes => "mnb",
            ModelKind::Forest => "rf",
        }
    }

    /// Naive Bayes consumes raw counts; the others use TF-IDF.
    pub fn feature_kind(self) -> FeatureKind {
        match self {
            ModelKind::NaiveBayes => FeatureKind::Counts,
            ModelKind::Logistic | ModelKind::Forest => FeatureKind::TfIdf,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelKind> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown model kind `{s}`; expected one of lr, mnb, rf"
                ))
            })
    }
}

/// Everything needed to reproduce a training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model_kind: ModelKind,
    pub seed: u64,
    pub max_terms: usize,
    pub logistic: LogisticConfig,
    pub naive_bayes: NaiveBayesConfig,
    pub forest: ForestConfig,
}

impl TrainConfig {
    pub fn new(model_kind: ModelKind) -> TrainConfig {
        TrainConfig {
            model_kind,
            seed: 42,
            max_terms: DEFAULT_MAX_TERMS,
            logistic: LogisticConfig::default(),
            naive_bayes: NaiveBayesConfig::default(),
            forest: ForestConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        self.logistic.validate()?;
        self.naive_bayes.validate()?;
        self.forest.validate()
    }
}

/// Kind-specific fitted parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelParams {
    Logistic(LogisticParams),
    NaiveBayes(NaiveBayesParams),
    Forest(RandomForest),
}

/// Anything that can label a piece of feedback text.
pub trait Predictor {
    fn predict(&self, text: &str) -> Result<Label>;
}

/// A fitted classifier together with its vocabulary and configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SentimentModel {
    config: TrainConfig,
    vocabulary: Vocabulary,
    params: ModelParams,
}

impl SentimentModel {
    /// Fits on the reviews and labels of `records`, using all available
    /// threads for forests.
    pub fn train(records: &[CustomerRecord], config: &TrainConfig) -> Result<SentimentModel> {
        Self::train_with_threads(records, config, 0)
    }

    pub fn train_with_threads(
        records: &[CustomerRecord],
        config: &TrainConfig,
        threads: usize,
    ) -> Result<SentimentModel> {
        let docs: Vec<(&str, Label)> = records
            .iter()
            .map(|r| (r.review.as_str(), r.sentiment))
            .collect();
        Self::train_texts(&docs, config, threads)
    }

    /// Fits on `(text, label)` pairs. The vocabulary comes from these texts only.
    pub fn train_texts<S: AsRef<str>>(
        docs: &[(S, Label)],
        config: &TrainConfig,
        threads: usize,
    ) -> Result<SentimentModel> {
        config.validate()?;
        let labels: Vec<Label> = docs.iter().map(|(_, y)| *y).collect();
        if !labels.contains(&Label::Positive) || !labels.contains(&Label::Negative) {
            return Err(Error::TrainingData(
                "training data must contain both positive and negative examples".into(),
            ));
        }

        let tokens: Vec<Vec<String>> = docs.iter().map(|(t, _)| tokenize(t.as_ref())).collect();
        let vocabulary = Vocabulary::build(&tokens, config.max_terms)?;
        let features = config.model_kind.feature_kind();
        let data: Vec<Example> = tokens
            .iter()
            .zip(labels)
            .map(|(t, y)| (features.vectorize(t, &vocabulary), y))
            .collect();

        let v = vocabulary.len();
        let params = match config.model_kind {
            ModelKind::Logistic => {
                ModelParams::Logistic(logistic::train(&data, v, &config.logistic)?.0)
            }
            ModelKind::NaiveBayes => {
                ModelParams::NaiveBayes(naive_bayes::train(&data, v, &config.naive_bayes)?)
            }
            ModelKind::Forest => ModelParams::Forest(forest::train(
                &data,
                v,
                &config.forest,
                config.seed,
                threads,
            )?),
        };
        Ok(SentimentModel {
            config: config.clone(),
            vocabulary,
            params,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.config.model_kind
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Vector in this model's own feature convention.
    pub fn vectorize(&self, text: &str) -> SparseVector {
        self.kind()
            .feature_kind()
            .vectorize(&tokenize(text), &self.vocabulary)
    }

    pub fn predict_vector(&self, x: &SparseVector) -> Label {
        match &self.params {
            ModelParams::Logistic(p) => p.predict(x),
            ModelParams::NaiveBayes(p) => p.predict(x),
            ModelParams::Forest(p) => p.predict(x),
        }
    }

    pub fn predict_text(&self, text: &str) -> Label {
        self.predict_vector(&self.vectorize(text))
    }
}

impl Predictor for SentimentModel {
    fn predict(&self, text: &str) -> Result<Label> {
        Ok(self.predict_text(text))
    }
}

/// Estimator-style wrapper: configure, then `fit`, then predict.
#[derive(Clone, Debug)]
pub struct SentimentClassifier {
    config: TrainConfig,
    threads: usize,
    model: Option<SentimentModel>,
}

impl SentimentClassifier {
    pub fn new(config: TrainConfig) -> SentimentClassifier {
        SentimentClassifier {
            config,
            threads: 0,
            model: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> SentimentClassifier {
        self.threads = threads;
        self
    }

    pub fn fit(&mut self, records: &[CustomerRecord]) -> Result<&SentimentModel> {
        let model = SentimentModel::train_with_threads(records, &self.config, self.threads)?;
        Ok(self.model.insert(model))
    }

    pub fn model(&self) -> Option<&SentimentModel> {
        self.model.as_ref()
    }
}

impl Predictor for SentimentClassifier {
    fn predict(&self, text: &str) -> Result<Label> {
        match &self.model {
            Some(m) => Ok(m.predict_text(text)),
            None => Err(Error::Usage(format!(
                "the {} classifier must be trained before predicting",
                self.config.model_kind
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs() -> Vec<(&'static str, Label)> {
        vec![
            ("great product, amazing agent", Label::Positive),
            ("amazing coverage and great price", Label::Positive),
            ("really helpful and great", Label::Positive),
            ("terrible product, awful agent", Label::Negative),
            ("awful coverage and terrible price", Label::Negative),
            ("slow and terrible", Label::Negative),
        ]
    }

    #[test]
    fn untrained_classifier_refuses() {
        let clf = SentimentClassifier::new(TrainConfig::new(ModelKind::Logistic));
        assert!(matches!(clf.predict("fine"), Err(Error::Usage(_))));
    }

    #[test]
    fn every_kind_learns_the_toy_set() {
        for kind in ModelKind::ALL {
            let mut cfg = TrainConfig::new(kind);
            cfg.forest.n_trees = 15;
            let model = SentimentModel::train_texts(&docs(), &cfg, 1).unwrap();
            assert_eq!(model.kind(), kind);
            assert_eq!(
                model.predict_text("a great and amazing product"),
                Label::Positive,
                "{kind}"
            );
            assert_eq!(
                model.predict_text("an awful and terrible product"),
                Label::Negative,
                "{kind}"
            );
        }
    }

    #[test]
    fn feature_convention_follows_kind() {
        let nb = SentimentModel::train_texts(&docs(), &TrainConfig::new(ModelKind::NaiveBayes), 1)
            .unwrap();
        assert_eq!(nb.vectorize("great great").sum(), 2.0);
        let lr = SentimentModel::train_texts(&docs(), &TrainConfig::new(ModelKind::Logistic), 1)
            .unwrap();
        assert!((lr.vectorize("great great").norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_unknown_text() {
        let lr = SentimentModel::train_texts(&docs(), &TrainConfig::new(ModelKind::Logistic), 1)
            .unwrap();
        let label = lr.predict_text("");
        assert_eq!(lr.predict_text("zzz qqq"), label);
    }

    #[test]
    fn single_class_rejected() {
        let one: Vec<_> = docs()
            .into_iter()
            .filter(|(_, y)| *y == Label::Positive)
            .collect();
        for kind in ModelKind::ALL {
            let err = SentimentModel::train_texts(&one, &TrainConfig::new(kind), 1).unwrap_err();
            assert!(matches!(err, Error::TrainingData(_)), "{err}");
        }
    }

    #[test]
    fn parse_kind() {
        assert_eq!("rf".parse::<ModelKind>().unwrap(), ModelKind::Forest);
        let err = "xyz".parse::<ModelKind>().unwrap_err();
        assert!(err.to_string().contains("lr, mnb, rf"));
    }
}
