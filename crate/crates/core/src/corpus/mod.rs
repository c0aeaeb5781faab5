//! Customer records, the CSV table format, seeded splits and synthetic data.

mod io;
mod synth;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use self::io::{load_csv, read_csv, write_csv, write_csv_file, CSV_HEADER};
pub use self::synth::{
    desk_corpus, fixture_query, generate_synthetic, DESK_ROWS, DESK_SEED, FIXTURE_PRODUCT_COUNTS,
    FIXTURE_ROWS,
};

/// Width of an age bucket in years.
pub const AGE_BUCKET_WIDTH: u32 = 5;

/// Binary sentiment polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn from_u8(value: u8) -> Option<Label> {
        match value {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }

    pub(crate) fn index(self) -> usize {
        self.as_u8() as usize
    }
}

impl From<bool> for Label {
    fn from(positive: bool) -> Label {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = u8::deserialize(deserializer)?;
        Label::from_u8(raw)
            .ok_or_else(|| serde::de::Error::custom(format!("label must be 0 or 1, got {raw}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::M => "M",
            Gender::F => "F",
        })
    }
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gender> {
        match s {
            "M" => Ok(Gender::M),
            "F" => Ok(Gender::F),
            other => Err(Error::Validation(format!(
                "gender must be `M` or `F`, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Locality {
    City,
    Outskirts,
}

impl fmt::Display for Locality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locality::City => "City",
            Locality::Outskirts => "Outskirts",
        })
    }
}

impl FromStr for Locality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Locality> {
        match s {
            "City" => Ok(Locality::City),
            "Outskirts" => Ok(Locality::Outskirts),
            other => Err(Error::Validation(format!(
                "locality must be `City` or `Outskirts`, got `{other}`"
            ))),
        }
    }
}

/// Half-open five-year age interval `[lower, upper)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgeBucket {
    pub lower: u32,
    pub upper: u32,
}

/// Maps an age onto its bucket: `lower = 5 * floor(age / 5)`, `upper = lower + 5`.
///
/// ```
/// use sentirec::corpus::age_bucket;
///
/// let bucket = age_bucket(47).unwrap();
/// assert_eq!((bucket.lower, bucket.upper), (45, 50));
/// assert!(age_bucket(-1).is_err());
/// ```
pub fn age_bucket(age: i64) -> Result<AgeBucket> {
    if age < 0 {
        return Err(Error::Validation(format!(
            "age must be non-negative, got {age}"
        )));
    }
    let age =
        u32::try_from(age).map_err(|_| Error::Validation(format!("age {age} is out of range")))?;
    let lower = age / AGE_BUCKET_WIDTH * AGE_BUCKET_WIDTH;
    Ok(AgeBucket {
        lower,
        upper: lower + AGE_BUCKET_WIDTH,
    })
}

/// One row of the existing-customer table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomerRecord {
    pub id: String,
    pub age: u32,
    pub age_range_lower: u32,
    pub age_range_upper: u32,
    pub gender: Gender,
    pub income_category: u32,
    pub locality: Locality,
    pub other_product_id: u32,
    pub sentiment: Label,
    pub review: String,
}

impl CustomerRecord {
    /// Checks the per-record invariants.
    pub fn validate(&self) -> Result<()> {
        if self.age_range_upper.checked_sub(self.age_range_lower) != Some(AGE_BUCKET_WIDTH) {
            return Err(Error::Validation(format!(
                "age range {}-{} is not {AGE_BUCKET_WIDTH} years wide",
                self.age_range_lower, self.age_range_upper
            )));
        }
        if !(self.age_range_lower <= self.age && self.age < self.age_range_upper) {
            return Err(Error::Validation(format!(
                "age {} is outside its range {}-{}",
                self.age, self.age_range_lower, self.age_range_upper
            )));
        }
        if self.income_category == 0 {
            return Err(Error::Validation("income category must be positive".into()));
        }
        if self.other_product_id == 0 {
            return Err(Error::Validation("product id must be positive".into()));
        }
        Ok(())
    }

    pub fn bucket(&self) -> AgeBucket {
        AgeBucket {
            lower: self.age_range_lower,
            upper: self.age_range_upper,
        }
    }
}

/// A new customer asking for recommendations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCustomer {
    pub age: u32,
    pub gender: Gender,
    pub income_category: u32,
    pub locality: Locality,
    pub feedback: String,
    pub reviewed_product_id: Option<u32>,
}

impl QueryCustomer {
    pub fn new(
        age: u32,
        gender: Gender,
        income_category: u32,
        locality: Locality,
        feedback: impl Into<String>,
    ) -> QueryCustomer {
        QueryCustomer {
            age,
            gender,
            income_category,
            locality,
            feedback: feedback.into(),
            reviewed_product_id: None,
        }
    }

    pub fn with_reviewed_product(mut self, product_id: u32) -> QueryCustomer {
        self.reviewed_product_id = Some(product_id);
        self
    }

    /// The product whose feedback was given; product 1 when unspecified.
    pub fn reviewed_product(&self) -> u32 {
        self.reviewed_product_id.unwrap_or(1)
    }
}

/// An ordered table of customer records with unique ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dataset {
    records: Vec<CustomerRecord>,
}

impl Dataset {
    /// Validates every record and the id uniqueness constraint.
    pub fn new(records: Vec<CustomerRecord>) -> Result<Dataset> {
        let mut seen = HashSet::with_capacity(records.len());
        for (i, record) in records.iter().enumerate() {
            record.validate().map_err(|e| Error::Row {
                row: i + 1,
                message: e.to_string(),
            })?;
            if !seen.insert(record.id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate id `{}` at row {}",
                    record.id,
                    i + 1
                )));
            }
        }
        Ok(Dataset { records })
    }

    pub fn records(&self) -> &[CustomerRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<CustomerRecord> {
        self.records
    }
}

/// Parameters of a seeded train/test split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> SplitSpec {
        SplitSpec {
            test_fraction: 0.3,
            seed: 42,
        }
    }
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: u64) -> Result<SplitSpec> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test fraction must lie strictly between 0 and 1, got {test_fraction}"
            )));
        }
        Ok(SplitSpec {
            test_fraction,
            seed,
        })
    }

    /// Number of records that land in the test side for a dataset of `n`.
    pub fn test_len(&self, n: usize) -> usize {
        (self.test_fraction * n as f64).round() as usize
    }
}

/// Uniform seeded shuffle split. Both sides keep the input's relative order.
///
/// The permutation depends only on the seed and the dataset length.
pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let spec = SplitSpec::new(spec.test_fraction, spec.seed)?;
    let n = ds.len();
    if n < 2 {
        return Err(Error::Usage(format!(
            "cannot split a dataset of {n} record(s); need at least 2"
        )));
    }
    let n_test = spec.test_len(n);
    if n_test == 0 || n_test == n {
        return Err(Error::Usage(format!(
            "test fraction {} leaves one side of a {n}-record split empty",
            spec.test_fraction
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let mut in_test = vec![false; n];
    for &i in &order[..n_test] {
        in_test[i] = true;
    }

    let (test, train): (Vec<_>, Vec<_>) = ds
        .records
        .iter()
        .cloned()
        .zip(in_test)
        .partition(|(_, t)| *t);
    let strip = |v: Vec<(CustomerRecord, bool)>| Dataset {
        records: v.into_iter().map(|(r, _)| r).collect(),
    };
    Ok((strip(train), strip(test)))
}
