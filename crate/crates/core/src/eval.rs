//! Confusion matrices and accuracy.
//!
//! Layout follows the convention rows = actual class (positive first),
//! columns = predicted class:
//!
//! ```text
//! [[tp fn]
//!  [fp tn]]
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::Predictor;
use crate::corpus::{CustomerRecord, Label};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    #[serde(rename = "tp")]
    pub true_pos: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
    #[serde(rename = "fp")]
    pub false_pos: u64,
    #[serde(rename = "tn")]
    pub true_neg: u64,
}

impl ConfusionMatrix {
    pub fn from_cells(true_pos: u64, false_neg: u64, false_pos: u64, true_neg: u64) -> Self {
        ConfusionMatrix {
            true_pos,
            false_neg,
            false_pos,
            true_neg,
        }
    }

    /// Tallies paired predictions and ground truths.
    pub fn from_labels(predictions: &[Label], truths: &[Label]) -> Result<ConfusionMatrix> {
        if predictions.len() != truths.len() {
            return Err(Error::Usage(format!(
                "{} predictions for {} truths",
                predictions.len(),
                truths.len()
            )));
        }
        if predictions.is_empty() {
            return Err(Error::Usage("cannot evaluate an empty set".into()));
        }
        let mut m = ConfusionMatrix::default();
        for (p, t) in predictions.iter().zip(truths) {
            match (p, t) {
                (Label::Positive, Label::Positive) => m.true_pos += 1,
                (Label::Negative, Label::Positive) => m.false_neg += 1,
                (Label::Positive, Label::Negative) => m.false_pos += 1,
                (Label::Negative, Label::Negative) => m.true_neg += 1,
            }
        }
        Ok(m)
    }

    pub fn total(&self) -> u64 {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }

    /// `(tp + tn) / total`; zero for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => (self.true_pos + self.true_neg) as f64 / n as f64,
        }
    }

    /// The matrix obtained by swapping the roles of the two classes.
    pub fn relabeled(&self) -> ConfusionMatrix {
        ConfusionMatrix::from_cells(self.true_neg, self.false_pos, self.false_neg, self.true_pos)
    }

    pub fn report(&self) -> Report {
        Report {
            confusion: *self,
            accuracy: self.accuracy(),
        }
    }
}

/// Accuracy with four decimals and trailing zeros dropped (`0.844`, `1.0`).
pub fn format_accuracy(accuracy: f64) -> String {
    let s = format!("{accuracy:.4}");
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}

/// Renders the five-line text report:
///
/// ```text
/// Confusion matrix:
/// [[3287  452]
///  [ 457 3304]]
/// Accuracy:
/// 0.8788
/// ```
impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = [self.true_pos, self.false_neg, self.false_pos, self.true_neg]
            .iter()
            .map(|c| c.to_string().len())
            .max()
            .unwrap_or(1);
        writeln!(f, "Confusion matrix:")?;
        writeln!(f, "[[{:>w$} {:>w$}]", self.true_pos, self.false_neg)?;
        writeln!(f, " [{:>w$} {:>w$}]]", self.false_pos, self.true_neg)?;
        writeln!(f, "Accuracy:")?;
        write!(f, "{}", format_accuracy(self.accuracy()))
    }
}

/// Machine-readable evaluation output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(flatten)]
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
}

/// Classifies every review in `test` and tallies against its stored label.
pub fn evaluate<P: Predictor + ?Sized>(
    model: &P,
    test: &[CustomerRecord],
) -> Result<ConfusionMatrix> {
    if test.is_empty() {
        return Err(Error::Usage("test set is empty".into()));
    }
    let predictions = test
        .iter()
        .map(|r| model.predict(&r.review))
        .collect::<Result<Vec<_>>>()?;
    let truths: Vec<Label> = test.iter().map(|r| r.sentiment).collect();
    ConfusionMatrix::from_labels(&predictions, &truths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(bits: &[u8]) -> Vec<Label> {
        bits.iter().map(|&b| Label::from_u8(b).unwrap()).collect()
    }

    #[test]
    fn cell_assignment() {
        let m = ConfusionMatrix::from_labels(&labels(&[1, 0, 1, 0, 1]), &labels(&[1, 1, 0, 0, 1]))
            .unwrap();
        assert_eq!(m, ConfusionMatrix::from_cells(2, 1, 1, 1));
        assert_eq!(m.total(), 5);
        assert_eq!(m.accuracy(), 0.6);
    }

    #[test]
    fn errors() {
        assert!(ConfusionMatrix::from_labels(&labels(&[1]), &labels(&[1, 0])).is_err());
        assert!(ConfusionMatrix::from_labels(&[], &[]).is_err());
    }

    #[test]
    fn reference_matrices() {
        let cases = [
            ((3287, 452, 457, 3304), 0.8788, "0.8788"),
            ((3271, 468, 702, 3059), 0.8440, "0.844"),
            ((3126, 613, 551, 3210), 0.8448, "0.8448"),
        ];
        for ((tp, fn_, fp, tn), acc, text) in cases {
            let m = ConfusionMatrix::from_cells(tp, fn_, fp, tn);
            assert_eq!(m.total(), 7500);
            assert_eq!(m.accuracy(), acc);
            assert_eq!(format_accuracy(m.accuracy()), text);
        }
    }

    #[test]
    fn text_report() {
        let m = ConfusionMatrix::from_cells(3287, 452, 457, 3304);
        assert_eq!(
            m.to_string(),
            "Confusion matrix:\n[[3287  452]\n [ 457 3304]]\nAccuracy:\n0.8788"
        );
        assert_eq!(format_accuracy(1.0), "1.0");
        assert_eq!(format_accuracy(0.5), "0.5");
        assert_eq!(format_accuracy(0.0), "0.0");
    }

    #[test]
    fn json_report() {
        let json =
            serde_json::to_string(&ConfusionMatrix::from_cells(1, 2, 3, 4).report()).unwrap();
        assert_eq!(json, r#"{"tp":1,"fn":2,"fp":3,"tn":4,"accuracy":0.5}"#);
    }

    #[test]
    fn relabeling_preserves_accuracy() {
        let preds = labels(&[1, 0, 0, 1, 1, 0, 1]);
        let truths = labels(&[1, 1, 0, 0, 1, 0, 0]);
        let m = ConfusionMatrix::from_labels(&preds, &truths).unwrap();
        let flip = |v: &[Label]| v.iter().map(|l| l.flip()).collect::<Vec<_>>();
        let swapped = ConfusionMatrix::from_labels(&flip(&preds), &flip(&truths)).unwrap();
        assert_eq!(swapped, m.relabeled());
        assert_eq!(swapped.accuracy(), m.accuracy());
    }
}
