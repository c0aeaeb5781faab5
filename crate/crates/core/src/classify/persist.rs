//! JSON model files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "model_kind": "lr",
//!   "config": { ... },
//!   "vocabulary": { "terms": { ... }, "document_frequency": [ ... ], "n_documents": 1400 },
//!   "parameters": { ... }
//! }
//! ```

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use super::{
    LogisticParams, ModelKind, ModelParams, NaiveBayesParams, RandomForest, SentimentModel,
    TrainConfig,
};
use crate::error::{Error, Result};
use crate::textfeat::Vocabulary;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize)]
struct ModelFileRef<'a> {
    format_version: u64,
    model_kind: ModelKind,
    config: &'a TrainConfig,
    vocabulary: &'a Vocabulary,
    parameters: ParamsRef<'a>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ParamsRef<'a> {
    Logistic(&'a LogisticParams),
    NaiveBayes(&'a NaiveBayesParams),
    Forest(&'a RandomForest),
}

impl SentimentModel {
    pub fn to_json(&self) -> Result<String> {
        let parameters = match &self.params {
            ModelParams::Logistic(p) => ParamsRef::Logistic(p),
            ModelParams::NaiveBayes(p) => ParamsRef::NaiveBayes(p),
            ModelParams::Forest(p) => ParamsRef::Forest(p),
        };
        let file = ModelFileRef {
            format_version: FORMAT_VERSION,
            model_kind: self.kind(),
            config: &self.config,
            vocabulary: &self.vocabulary,
            parameters,
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        Ok(text)
    }

    /// Parses and validates a model file. Unknown versions or kinds are
    /// rejected; every error names the offending field.
    pub fn from_json(text: &str) -> Result<SentimentModel> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Object(mut root) = value else {
            return Err(Error::ModelFile("top level must be a JSON object".into()));
        };

        match root.get("format_version") {
            None => return Err(missing("format_version")),
            Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(Error::ModelFile(format!(
                    "field `format_version`: unsupported version {v}"
                )))
            }
        }
        let kind = match root.get("model_kind") {
            None => return Err(missing("model_kind")),
            Some(Value::String(s)) => s
                .parse::<ModelKind>()
                .map_err(|_| Error::ModelFile(format!("field `model_kind`: unknown kind `{s}`")))?,
            Some(v) => {
                return Err(Error::ModelFile(format!(
                    "field `model_kind`: expected a string, got {v}"
                )))
            }
        };

        let config: TrainConfig = take(&mut root, "config")?;
        if config.model_kind != kind {
            return Err(Error::ModelFile(format!(
                "field `config.model_kind`: `{}` disagrees with `{kind}`",
                config.model_kind
            )));
        }
        config
            .validate()
            .map_err(|e| Error::ModelFile(format!("field `config`: {e}")))?;
        let vocabulary: Vocabulary = take(&mut root, "vocabulary")?;
        let v = vocabulary.len();

        let invalid = |e: String| Error::ModelFile(format!("field `parameters`: {e}"));
        let params = match kind {
            ModelKind::Logistic => {
                let p: LogisticParams = take(&mut root, "parameters")?;
                if p.weights.len() != v {
                    return Err(invalid(format!(
                        "expected {v} weights, found {}",
                        p.weights.len()
                    )));
                }
                if !p.bias.is_finite() || p.weights.iter().any(|w| !w.is_finite()) {
                    return Err(invalid("weights must be finite".into()));
                }
                ModelParams::Logistic(p)
            }
            ModelKind::NaiveBayes => {
                let p: NaiveBayesParams = take(&mut root, "parameters")?;
                p.validate(v).map_err(invalid)?;
                ModelParams::NaiveBayes(p)
            }
            ModelKind::Forest => {
                let p: RandomForest = take(&mut root, "parameters")?;
                if p.trees.is_empty() {
                    return Err(invalid("forest has no trees".into()));
                }
                for (i, tree) in p.trees.iter().enumerate() {
                    tree.validate(v)
                        .map_err(|e| invalid(format!("tree {i}: {e}")))?;
                }
                ModelParams::Forest(p)
            }
        };
        Ok(SentimentModel {
            config,
            vocabulary,
            params,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SentimentModel> {
        SentimentModel::from_json(&fs::read_to_string(path)?)
    }
}

fn missing(field: &str) -> Error {
    Error::ModelFile(format!("missing field `{field}`"))
}

fn take<T: DeserializeOwned>(root: &mut Map<String, Value>, field: &str) -> Result<T> {
    let value = root.remove(field).ok_or_else(|| missing(field))?;
    serde_json::from_value(value).map_err(|e| Error::ModelFile(format!("field `{field}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Label;

    fn docs() -> Vec<(&'static str, Label)> {
        vec![
            ("great amazing", Label::Positive),
            ("lovely great", Label::Positive),
            ("awful bad", Label::Negative),
            ("bad terrible", Label::Negative),
        ]
    }

    fn model(kind: ModelKind) -> SentimentModel {
        let mut cfg = TrainConfig::new(kind);
        cfg.forest.n_trees = 3;
        cfg.logistic.epochs = 20;
        SentimentModel::train_texts(&docs(), &cfg, 1).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        for kind in ModelKind::ALL {
            let m = model(kind);
            let text = m.to_json().unwrap();
            let back = SentimentModel::from_json(&text).unwrap();
            assert_eq!(back, m);
            assert_eq!(back.to_json().unwrap(), text);
        }
    }

    #[test]
    fn header_fields() {
        let value: Value =
            serde_json::from_str(&model(ModelKind::Forest).to_json().unwrap()).unwrap();
        assert_eq!(value["format_version"], 1);
        assert_eq!(value["model_kind"], "rf");
        assert_eq!(value["config"]["forest"]["max_features"], "sqrt");
        assert!(value["vocabulary"]["terms"].is_object());
        assert!(value["parameters"]["trees"].is_array());
    }

    fn edit(kind: ModelKind, f: impl FnOnce(&mut Value)) -> Result<SentimentModel> {
        let mut value: Value = serde_json::from_str(&model(kind).to_json().unwrap()).unwrap();
        f(&mut value);
        SentimentModel::from_json(&value.to_string())
    }

    #[test]
    fn rejects_unknown_version_and_kind() {
        let err = edit(ModelKind::Logistic, |v| v["format_version"] = 2.into()).unwrap_err();
        assert!(err.to_string().contains("format_version"), "{err}");
        let err = edit(ModelKind::Logistic, |v| v["model_kind"] = "svm".into()).unwrap_err();
        assert!(err.to_string().contains("model_kind"), "{err}");
        let err = edit(ModelKind::Logistic, |v| {
            v.as_object_mut().unwrap().remove("format_version");
        })
        .unwrap_err();
        assert!(err.to_string().contains("format_version"), "{err}");
    }

    #[test]
    fn errors_name_the_field() {
        let err = edit(ModelKind::Logistic, |v| {
            v["parameters"].as_object_mut().unwrap().remove("weights");
        })
        .unwrap_err();
        assert!(err.to_string().contains("weights"), "{err}");

        let err = edit(ModelKind::Logistic, |v| {
            v["parameters"]["weights"] = Value::Array(vec![])
        })
        .unwrap_err();
        assert!(err.to_string().contains("parameters"), "{err}");

        let err = edit(ModelKind::NaiveBayes, |v| v["model_kind"] = "lr".into()).unwrap_err();
        assert!(err.to_string().contains("config.model_kind"), "{err}");

        let err = edit(ModelKind::Forest, |v| {
            v["parameters"]["trees"][0]["nodes"] = serde_json::json!([
                {"split": {"feature": 9999, "threshold": 0.5, "left": 1, "right": 2}},
                {"leaf": {"label": 1}},
                {"leaf": {"label": 0}}
            ])
        })
        .unwrap_err();
        assert!(err.to_string().contains("tree 0"), "{err}");

        assert!(SentimentModel::from_json("not json").is_err());
        assert!(SentimentModel::from_json("[1,2]").is_err());
    }
}
