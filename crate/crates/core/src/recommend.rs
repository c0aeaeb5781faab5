//! Attribute-match recommendation.
//!
//! The query's feedback is classified, the existing customers sharing the
//! query's age bucket, gender, income category, locality and polarity are
//! selected, and the products those customers bought are ranked by how often
//! they occur.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classify::Predictor;
use crate::corpus::{age_bucket, CustomerRecord, Dataset, Gender, Label, Locality, QueryCustomer};
use crate::error::{Error, Result};

/// The six attributes a customer must share with the query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchCriteria {
    pub age_range_lower: u32,
    pub age_range_upper: u32,
    pub gender: Gender,
    pub income_category: u32,
    pub locality: Locality,
    pub sentiment: Label,
}

impl MatchCriteria {
    pub fn for_query(query: &QueryCustomer, sentiment: Label) -> Result<MatchCriteria> {
        let bucket = age_bucket(query.age as i64)?;
        Ok(MatchCriteria {
            age_range_lower: bucket.lower,
            age_range_upper: bucket.upper,
            gender: query.gender,
            income_category: query.income_category,
            locality: query.locality,
            sentiment,
        })
    }

    pub fn matches(&self, r: &CustomerRecord) -> bool {
        r.age_range_lower == self.age_range_lower
            && r.age_range_upper == self.age_range_upper
            && r.gender == self.gender
            && r.income_category == self.income_category
            && r.locality == self.locality
            && r.sentiment == self.sentiment
    }
}

/// Whether the polarity filter reproduces the positive-feedback case or its
/// mirror for negative feedback.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarityRule {
    PositiveMatch,
    SymmetricNegative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductFrequency {
    pub product_id: u32,
    pub frequency: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationResult {
    pub ranked: Vec<ProductFrequency>,
    pub matched_count: usize,
    pub total_customers: usize,
    pub criteria: MatchCriteria,
    pub polarity_rule: PolarityRule,
    pub excluded_product: Option<u32>,
}

impl RecommendationResult {
    pub fn product_ids(&self) -> Vec<u32> {
        self.ranked.iter().map(|p| p.product_id).collect()
    }
}

/// Ranked id list, one `<product>  <frequency>` line per product, then the
/// match count.
impl fmt::Display for RecommendationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self
            .ranked
            .iter()
            .map(|p| p.product_id.to_string())
            .collect();
        writeln!(f, "[{}]", ids.join(", "))?;
        for p in &self.ranked {
            writeln!(f, "{}  {}", p.product_id, p.frequency)?;
        }
        write!(
            f,
            "matched: {} of {}",
            self.matched_count, self.total_customers
        )
    }
}

/// Records equal to `criteria` on all six fields, in input order.
pub fn match_customers<'a>(ds: &'a Dataset, criteria: &MatchCriteria) -> Vec<&'a CustomerRecord> {
    ds.records()
        .iter()
        .filter(|r| criteria.matches(r))
        .collect()
}

/// Purchase counts sorted by frequency, descending; ties by ascending id.
///
/// ```
/// use sentirec::recommend::rank_products;
///
/// let ranked = rank_products([2, 3, 3, 2, 5].iter().copied(), None);
/// let ids: Vec<u32> = ranked.iter().map(|p| p.product_id).collect();
/// assert_eq!(ids, [2, 3, 5]);
/// ```
pub fn rank_products<I>(products: I, exclude: Option<u32>) -> Vec<ProductFrequency>
where
    I: IntoIterator<Item = u32>,
{
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for p in products {
        if Some(p) != exclude {
            *counts.entry(p).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<ProductFrequency> = counts
        .into_iter()
        .map(|(product_id, frequency)| ProductFrequency {
            product_id,
            frequency,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then(a.product_id.cmp(&b.product_id))
    });
    ranked
}

/// Full recommendation for one new customer.
pub fn recommend<P: Predictor + ?Sized>(
    ds: &Dataset,
    model: &P,
    query: &QueryCustomer,
) -> Result<RecommendationResult> {
    if query.feedback.trim().is_empty() {
        return Err(Error::Usage("feedback text must not be empty".into()));
    }
    let sentiment = model.predict(&query.feedback)?;
    let criteria = MatchCriteria::for_query(query, sentiment)?;
    let matches = match_customers(ds, &criteria);
    let excluded = query.reviewed_product();
    Ok(RecommendationResult {
        ranked: rank_products(matches.iter().map(|r| r.other_product_id), Some(excluded)),
        matched_count: matches.len(),
        total_customers: ds.len(),
        criteria,
        polarity_rule: match sentiment {
            Label::Positive => PolarityRule::PositiveMatch,
            Label::Negative => PolarityRule::SymmetricNegative,
        },
        excluded_product: Some(excluded),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Fixed(Label);

    impl Predictor for Fixed {
        fn predict(&self, _: &str) -> Result<Label> {
            Ok(self.0)
        }
    }

    fn record(
        id: &str,
        age: u32,
        locality: Locality,
        product: u32,
        sentiment: u8,
    ) -> CustomerRecord {
        let b = age_bucket(age as i64).unwrap();
        CustomerRecord {
            id: id.into(),
            age,
            age_range_lower: b.lower,
            age_range_upper: b.upper,
            gender: Gender::M,
            income_category: 2,
            locality,
            other_product_id: product,
            sentiment: Label::from_u8(sentiment).unwrap(),
            review: String::new(),
        }
    }

    fn query() -> QueryCustomer {
        QueryCustomer::new(42, Gender::M, 2, Locality::City, "It is a great product")
    }

    #[test]
    fn ranking_examples() {
        let counts = [(4, 47), (5, 46), (3, 35), (2, 21), (6, 4)];
        let products = counts.iter().flat_map(|&(p, c)| std::iter::repeat_n(p, c));
        let ranked = rank_products(products, Some(1));
        assert_eq!(
            ranked,
            counts
                .iter()
                .map(|&(product_id, frequency)| ProductFrequency {
                    product_id,
                    frequency
                })
                .collect::<Vec<_>>()
        );
        assert!(rank_products(std::iter::empty(), None).is_empty());
        let tie = rank_products([3, 2, 3, 2, 2, 3, 3, 2, 2, 3], None);
        assert_eq!(tie.iter().map(|p| p.product_id).collect::<Vec<_>>(), [2, 3]);
        assert_eq!(rank_products([1, 1, 2], Some(1)).len(), 1);
    }

    #[test]
    fn criteria_from_query() {
        let c = MatchCriteria::for_query(&query(), Label::Positive).unwrap();
        assert_eq!((c.age_range_lower, c.age_range_upper), (40, 45));
        assert_eq!(query().reviewed_product(), 1);
    }

    #[test]
    fn no_city_customers() {
        let ds = Dataset::new(vec![record("a", 42, Locality::Outskirts, 3, 1)]).unwrap();
        let c = MatchCriteria::for_query(&query(), Label::Positive).unwrap();
        assert!(match_customers(&ds, &c).is_empty());
        let r = recommend(&ds, &Fixed(Label::Positive), &query()).unwrap();
        assert!(r.ranked.is_empty());
        assert_eq!((r.matched_count, r.total_customers), (0, 1));
        assert_eq!(r.to_string(), "[]\nmatched: 0 of 1");
    }

    #[test]
    fn single_match() {
        let ds = Dataset::new(vec![record("a", 44, Locality::City, 3, 1)]).unwrap();
        let c = MatchCriteria::for_query(&query(), Label::Positive).unwrap();
        assert_eq!(match_customers(&ds, &c).len(), 1);
    }

    #[test]
    fn negative_feedback_matches_negative_customers() {
        let ds = Dataset::new(vec![
            record("p1", 41, Locality::City, 2, 1),
            record("p2", 43, Locality::City, 2, 1),
            record("n1", 42, Locality::City, 5, 0),
            record("n2", 40, Locality::City, 4, 0),
            record("n3", 44, Locality::City, 5, 0),
            record("n4", 46, Locality::City, 6, 0),
        ])
        .unwrap();
        let r = recommend(&ds, &Fixed(Label::Negative), &query()).unwrap();
        assert_eq!(r.criteria.sentiment, Label::Negative);
        assert_eq!(r.polarity_rule, PolarityRule::SymmetricNegative);
        assert_eq!(r.matched_count, 3);
        assert_eq!(r.product_ids(), [5, 4]);

        let r = recommend(&ds, &Fixed(Label::Positive), &query()).unwrap();
        assert_eq!(r.matched_count, 2);
        assert_eq!(r.product_ids(), [2]);
        assert_eq!(r.to_string(), "[2]\n2  2\nmatched: 2 of 6");
    }

    #[test]
    fn reviewed_product_is_excluded() {
        let ds = Dataset::new(vec![
            record("a", 41, Locality::City, 1, 1),
            record("b", 42, Locality::City, 1, 1),
            record("c", 43, Locality::City, 2, 1),
        ])
        .unwrap();
        let r = recommend(&ds, &Fixed(Label::Positive), &query()).unwrap();
        assert_eq!(r.matched_count, 3);
        assert_eq!(r.product_ids(), [2]);
        let r = recommend(
            &ds,
            &Fixed(Label::Positive),
            &query().with_reviewed_product(2),
        )
        .unwrap();
        assert_eq!(r.product_ids(), [1]);
    }

    #[test]
    fn empty_feedback_is_a_usage_error() {
        let mut q = query();
        q.feedback = "  ".into();
        let err = recommend(&Dataset::default(), &Fixed(Label::Positive), &q).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }
}
