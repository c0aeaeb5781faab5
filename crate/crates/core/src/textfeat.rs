//! Tokenization, vocabulary construction and sparse document vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on vocabulary size.
pub const DEFAULT_MAX_TERMS: usize = 20_000;

/// Splits text into lowercase alphabetic tokens of length two or more.
///
/// `<...>` spans are removed first, so markup such as `<br />` never
/// produces tokens. There is no stemming and no stop-word list.
///
/// ```
/// use sentirec::textfeat::tokenize;
///
/// assert_eq!(tokenize("Superbly trashy<br />8/10!"), ["superbly", "trashy"]);
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    strip_tags(text)
        .to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_owned)
        .collect()
}

fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        match rest[open..].find('>') {
            Some(close) => {
                out.push_str(&rest[..open]);
                out.push(' ');
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    out.push_str(rest);
    out
}

/// Term-to-index map fitted on a training corpus.
///
/// Indices follow lexicographic term order, so two vocabularies holding the
/// same terms are identical.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyRepr", into = "VocabularyRepr")]
pub struct Vocabulary {
    term_to_index: BTreeMap<String, usize>,
    document_frequency: Vec<u32>,
    n_documents: u32,
}

#[derive(Clone, Serialize, Deserialize)]
struct VocabularyRepr {
    terms: BTreeMap<String, usize>,
    document_frequency: Vec<u32>,
    n_documents: u32,
}

impl From<Vocabulary> for VocabularyRepr {
    fn from(v: Vocabulary) -> Self {
        VocabularyRepr {
            terms: v.term_to_index,
            document_frequency: v.document_frequency,
            n_documents: v.n_documents,
        }
    }
}

impl TryFrom<VocabularyRepr> for Vocabulary {
    type Error = String;

    fn try_from(r: VocabularyRepr) -> Result<Self, String> {
        let v = r.terms.len();
        if v == 0 {
            return Err("vocabulary is empty".into());
        }
        if r.document_frequency.len() != v {
            return Err(format!(
                "document_frequency has {} entries for {v} terms",
                r.document_frequency.len()
            ));
        }
        let mut seen = vec![false; v];
        for (term, &i) in &r.terms {
            if i >= v || std::mem::replace(&mut seen[i], true) {
                return Err(format!("term `{term}` has invalid index {i}"));
            }
        }
        if r.n_documents == 0 {
            return Err("n_documents must be at least 1".into());
        }
        if let Some(bad) = r
            .document_frequency
            .iter()
            .find(|&&df| df == 0 || df > r.n_documents)
        {
            return Err(format!("document frequency {bad} out of range"));
        }
        Ok(Vocabulary {
            term_to_index: r.terms,
            document_frequency: r.document_frequency,
            n_documents: r.n_documents,
        })
    }
}

impl Vocabulary {
    /// Keeps the `max_terms` terms with the highest document frequency,
    /// breaking ties by ascending term.
    ///
    /// ```
    /// use sentirec::textfeat::Vocabulary;
    ///
    /// let docs = vec![vec!["aa".to_string()], vec!["bb".to_string()]];
    /// let vocab = Vocabulary::build(&docs, 1).unwrap();
    /// assert_eq!(vocab.index_of("aa"), Some(0));
    /// assert_eq!(vocab.len(), 1);
    /// ```
    pub fn build<S: AsRef<str>>(docs: &[Vec<S>], max_terms: usize) -> Result<Vocabulary> {
        if docs.is_empty() {
            return Err(Error::TrainingData(
                "no documents to build a vocabulary from".into(),
            ));
        }
        if max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        let n_documents = u32::try_from(docs.len())
            .map_err(|_| Error::TrainingData("too many documents".into()))?;

        let mut df: HashMap<&str, u32> = HashMap::new();
        for doc in docs {
            let unique: HashSet<&str> = doc.iter().map(AsRef::as_ref).collect();
            for term in unique {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        if df.is_empty() {
            return Err(Error::TrainingData("every document is empty".into()));
        }

        let mut ranked: Vec<(&str, u32)> = df.into_iter().collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        ranked.truncate(max_terms);
        ranked.sort_unstable_by(|a, b| a.0.cmp(b.0));

        let document_frequency = ranked.iter().map(|&(_, f)| f).collect();
        let term_to_index = ranked
            .into_iter()
            .enumerate()
            .map(|(i, (t, _))| (t.to_owned(), i))
            .collect();
        Ok(Vocabulary {
            term_to_index,
            document_frequency,
            n_documents,
        })
    }

    pub fn len(&self) -> usize {
        self.document_frequency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.document_frequency.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    pub fn document_frequency(&self, index: usize) -> u32 {
        self.document_frequency[index]
    }

    pub fn n_documents(&self) -> u32 {
        self.n_documents
    }

    /// Terms in index order.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.term_to_index.keys().map(String::as_str)
    }

    /// Smoothed inverse document frequency, `ln((1 + n) / (1 + df)) + 1`.
    pub fn idf(&self, index: usize) -> f64 {
        let n = self.n_documents as f64;
        let df = self.document_frequency[index] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Raw occurrence counts of in-vocabulary tokens.
    pub fn count_vector<S: AsRef<str>>(&self, doc: &[S]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for token in doc {
            if let Some(i) = self.index_of(token.as_ref()) {
                *counts.entry(i).or_insert(0.0) += 1.0;
            }
        }
        SparseVector {
            entries: counts.into_iter().map(|(i, c)| (i as u32, c)).collect(),
        }
    }

    /// L2-normalized term frequency times smoothed idf.
    pub fn tfidf_vector<S: AsRef<str>>(&self, doc: &[S]) -> SparseVector {
        let mut v = self.count_vector(doc);
        for (i, value) in &mut v.entries {
            *value *= self.idf(*i as usize);
        }
        let norm = v.norm();
        if norm > 0.0 {
            for (_, value) in &mut v.entries {
                *value /= norm;
            }
        }
        v
    }
}

/// Which vector representation a model consumes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureKind {
    Counts,
    TfIdf,
}

impl FeatureKind {
    pub fn vectorize<S: AsRef<str>>(self, doc: &[S], vocab: &Vocabulary) -> SparseVector {
        match self {
            FeatureKind::Counts => vocab.count_vector(doc),
            FeatureKind::TfIdf => vocab.tfidf_vector(doc),
        }
    }
}

/// Sorted `(index, value)` pairs with no explicit zeros.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    /// Builds a vector from arbitrary-order entries. Zeros are dropped;
    /// negative, non-finite or repeated indices are rejected.
    pub fn from_entries(mut entries: Vec<(u32, f64)>) -> Result<SparseVector> {
        entries.retain(|&(_, v)| v != 0.0);
        entries.sort_unstable_by_key(|&(i, _)| i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation("repeated index in sparse vector".into()));
        }
        if let Some(&(i, v)) = entries.iter().find(|(_, v)| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(format!(
                "sparse value {v} at index {i} must be finite and non-negative"
            )));
        }
        Ok(SparseVector { entries })
    }

    /// Dense input; zeros are skipped.
    pub fn from_dense(values: &[f64]) -> Result<SparseVector> {
        SparseVector::from_entries(
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as u32, v))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|&(i, v)| (i as usize, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        match self
            .entries
            .binary_search_by_key(&(index as u32), |&(i, _)| i)
        {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i as usize)
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| v * dense[i as usize])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("It is an amazing insurance product"),
            toks(&["it", "is", "an", "amazing", "insurance", "product"])
        );
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("Superbly trashy<br />8/10!"),
            toks(&["superbly", "trashy"])
        );
        assert_eq!(tokenize("a < b and c"), toks(&["and"]));
        assert_eq!(tokenize("don't"), toks(&["don"]));
    }

    #[test]
    fn vocab_examples() {
        let v = Vocabulary::build(&[toks(&["good", "good"]), toks(&["bad"])], 10).unwrap();
        assert_eq!(v.terms().collect::<Vec<_>>(), ["bad", "good"]);
        assert_eq!((v.index_of("bad"), v.index_of("good")), (Some(0), Some(1)));
        assert_eq!((v.document_frequency(0), v.document_frequency(1)), (1, 1));
        assert_eq!(v.n_documents(), 2);

        let v = Vocabulary::build(&[toks(&["aa"]), toks(&["aa"]), toks(&["bb"])], 1).unwrap();
        assert_eq!(v.terms().collect::<Vec<_>>(), ["aa"]);
        let v = Vocabulary::build(&[toks(&["bb"]), toks(&["aa"])], 1).unwrap();
        assert_eq!(v.terms().collect::<Vec<_>>(), ["aa"]);
    }

    #[test]
    fn vocab_errors() {
        assert!(Vocabulary::build::<String>(&[], 10).is_err());
        assert!(Vocabulary::build::<String>(&[vec![], vec![]], 10).is_err());
        assert!(Vocabulary::build(&[toks(&["a"])], 0).is_err());
    }

    #[test]
    fn count_examples() {
        let v = Vocabulary::build(&[toks(&["good"]), toks(&["bad"])], 10).unwrap();
        let x = v.count_vector(&toks(&["good", "good", "bad"]));
        assert_eq!(x.entries(), &[(0, 1.0), (1, 2.0)]);
        assert!(v.count_vector(&toks(&["unknown"])).is_empty());
        assert!(v.count_vector::<String>(&[]).is_empty());
    }

    #[test]
    fn tfidf_examples() {
        // n_documents 2, df(good) = df(bad) = 1.
        let v = Vocabulary::build(&[toks(&["good"]), toks(&["bad"])], 10).unwrap();
        let expected_idf = (3.0f64 / 2.0).ln() + 1.0;
        assert!((v.idf(1) - expected_idf).abs() < 1e-15);
        assert!((expected_idf - 1.405465).abs() < 1e-6);

        let x = v.tfidf_vector(&toks(&["good"]));
        assert_eq!(x.entries(), &[(1, 1.0)]);

        let x = v.tfidf_vector(&toks(&["good", "bad"]));
        let half = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(x.nnz(), 2);
        assert!((x.get(0) - half).abs() < 1e-15 && (x.get(1) - half).abs() < 1e-15);

        assert!(v.tfidf_vector::<String>(&[]).is_empty());
    }

    #[test]
    fn sparse_vector_checks() {
        let x = SparseVector::from_entries(vec![(3, 2.0), (1, 0.0), (0, 1.0)]).unwrap();
        assert_eq!(x.entries(), &[(0, 1.0), (3, 2.0)]);
        assert_eq!(x.get(3), 2.0);
        assert_eq!(x.get(2), 0.0);
        assert!(SparseVector::from_entries(vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(SparseVector::from_entries(vec![(1, -1.0)]).is_err());
        assert!(SparseVector::from_entries(vec![(1, f64::NAN)]).is_err());
    }

    #[test]
    fn vocabulary_json_validation() {
        let v = Vocabulary::build(&[toks(&["good"]), toks(&["bad"])], 10).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(
            json,
            r#"{"terms":{"bad":0,"good":1},"document_frequency":[1,1],"n_documents":2}"#
        );
        assert_eq!(serde_json::from_str::<Vocabulary>(&json).unwrap(), v);

        let gap = r#"{"terms":{"bad":0,"good":2},"document_frequency":[1,1],"n_documents":2}"#;
        assert!(serde_json::from_str::<Vocabulary>(gap).is_err());
        let zero_df = r#"{"terms":{"bad":0},"document_frequency":[0],"n_documents":2}"#;
        assert!(serde_json::from_str::<Vocabulary>(zero_df).is_err());
    }
}
