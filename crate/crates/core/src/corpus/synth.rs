//! Seeded synthetic customer tables.
//!
//! Reviews are assembled from a small polarity lexicon embedded in shared
//! neutral templates, so neutral words ("it", "is", "product", "insurance")
//! occur in both classes at the same rate while words like "amazing" and
//! "great" only carry positive reviews.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{age_bucket, CustomerRecord, Dataset, Gender, Label, Locality, QueryCustomer};
use crate::error::{Error, Result};

/// Row count of the recommendation fixture.
pub const FIXTURE_ROWS: usize = 25_000;

/// Purchases among the fixture's matching customers, in rank order.
pub const FIXTURE_PRODUCT_COUNTS: [(u32, usize); 5] = [(4, 47), (5, 46), (3, 35), (2, 21), (6, 4)];

/// Size and seed of the small corpus used for quick accuracy checks.
pub const DESK_ROWS: usize = 2_000;
pub const DESK_SEED: u64 = 1_234;

const MIN_AGE: u32 = 18;
const MAX_AGE: u32 = 75;
const N_PRODUCTS: u32 = 6;

const POSITIVE: &[&str] = &[
    "amazing",
    "great",
    "excellent",
    "wonderful",
    "fantastic",
    "helpful",
    "reliable",
    "quick",
    "smooth",
    "outstanding",
    "superb",
    "pleasant",
    "friendly",
    "affordable",
    "trustworthy",
    "satisfying",
    "impressive",
    "generous",
    "painless",
    "brilliant",
];

const NEGATIVE: &[&str] = &[
    "bad",
    "terrible",
    "awful",
    "poor",
    "horrible",
    "slow",
    "useless",
    "disappointing",
    "worst",
    "rude",
    "overpriced",
    "confusing",
    "frustrating",
    "unhelpful",
    "unreliable",
    "pathetic",
    "annoying",
    "misleading",
    "dreadful",
    "shoddy",
];

const OPENERS: &[&str] = &[
    "I bought this insurance product last year",
    "We have had this policy for two years",
    "I switched to this company after a car accident",
    "My family uses this health plan",
    "I renewed the home insurance in March",
    "This was my first insurance product",
    "I compared several plans before picking this one",
    "My agent suggested this policy",
];

const TEMPLATES: &[&str] = &[
    "the claim process was {}",
    "the agent was {}",
    "it is a {} product",
    "it is an {} insurance product",
    "this product is {}",
    "the coverage for my family is {}",
    "customer service was {}",
    "the premium renewal was {}",
    "my experience with this company has been {}",
    "a {} policy overall",
    "the app and the website are {}",
    "honestly {}",
];

const POSITIVE_EXTRAS: &[&str] = &[
    "I would recommend it",
    "it is worth the premium",
    "good value for the money",
    "not bad at all",
];

const NEGATIVE_EXTRAS: &[&str] = &[
    "this product is not that good",
    "it is not worth the premium",
    "I would not recommend it",
    "never again",
];

/// Generates `rows` reproducible customer records.
///
/// With `paper_fixture` set, the table holds exactly 25,000 rows and exactly
/// 153 of them share the tuple (40-45, M, income 2, City, positive), whose
/// purchases are distributed as [`FIXTURE_PRODUCT_COUNTS`].
pub fn generate_synthetic(rows: usize, seed: u64, paper_fixture: bool) -> Result<Dataset> {
    if rows == 0 {
        return Err(Error::Config("row count must be at least 1".into()));
    }
    if paper_fixture && rows != FIXTURE_ROWS {
        return Err(Error::Config(format!(
            "the fixture corpus has exactly {FIXTURE_ROWS} rows, got {rows}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drafts: Vec<Draft> = if paper_fixture {
        fixture_rows(&mut rng)
    } else {
        (0..rows).map(|_| Draft::random(&mut rng, false)).collect()
    };

    let records = drafts
        .drain(..)
        .enumerate()
        .map(|(i, d)| d.finish(i))
        .collect();
    Dataset::new(records)
}

/// The seeded 2,000-review corpus used for desk-scale accuracy checks.
pub fn desk_corpus() -> Dataset {
    generate_synthetic(DESK_ROWS, DESK_SEED, false).expect("desk corpus parameters are valid")
}

/// The new customer whose query the fixture is built around.
pub fn fixture_query() -> QueryCustomer {
    QueryCustomer::new(42, Gender::M, 2, Locality::City, "It is a great product")
        .with_reviewed_product(1)
}

fn fixture_rows(rng: &mut ChaCha8Rng) -> Vec<Draft> {
    let n_matches: usize = FIXTURE_PRODUCT_COUNTS.iter().map(|(_, c)| c).sum();
    let background: Vec<Draft> = (0..FIXTURE_ROWS - n_matches)
        .map(|_| Draft::random(rng, true))
        .collect();

    let mut products: Vec<u32> = FIXTURE_PRODUCT_COUNTS
        .iter()
        .flat_map(|&(p, c)| std::iter::repeat_n(p, c))
        .collect();
    products.shuffle(rng);
    let matches: Vec<Draft> = products
        .into_iter()
        .map(|product| {
            let age = rng.gen_range(40..45);
            Draft {
                age,
                gender: Gender::M,
                income_category: 2,
                locality: Locality::City,
                product,
                sentiment: Label::Positive,
                review: review(rng, Label::Positive),
                rating: rating(rng, Label::Positive),
            }
        })
        .collect();

    let mut slots: Vec<usize> = index::sample(rng, FIXTURE_ROWS, n_matches).into_vec();
    slots.sort_unstable();
    let mut out = Vec::with_capacity(FIXTURE_ROWS);
    let mut matches = matches.into_iter();
    let mut background = background.into_iter();
    let mut slots = slots.into_iter().peekable();
    for pos in 0..FIXTURE_ROWS {
        let next = if slots.peek() == Some(&pos) {
            slots.next();
            matches.next()
        } else {
            background.next()
        };
        out.push(next.expect("row counts add up"));
    }
    out
}

struct Draft {
    age: u32,
    gender: Gender,
    income_category: u32,
    locality: Locality,
    product: u32,
    sentiment: Label,
    review: String,
    rating: u32,
}

impl Draft {
    fn random(rng: &mut ChaCha8Rng, avoid_fixture_tuple: bool) -> Draft {
        let sentiment = Label::from(rng.gen_bool(0.5));
        let (age, gender, income_category, locality) = loop {
            let attrs = (
                rng.gen_range(MIN_AGE..=MAX_AGE),
                if rng.gen_bool(0.5) {
                    Gender::M
                } else {
                    Gender::F
                },
                rng.gen_range(1..=2),
                if rng.gen_bool(0.5) {
                    Locality::City
                } else {
                    Locality::Outskirts
                },
            );
            let is_fixture_tuple = (40..45).contains(&attrs.0)
                && attrs.1 == Gender::M
                && attrs.2 == 2
                && attrs.3 == Locality::City
                && sentiment == Label::Positive;
            if !(avoid_fixture_tuple && is_fixture_tuple) {
                break attrs;
            }
        };
        Draft {
            age,
            gender,
            income_category,
            locality,
            product: rng.gen_range(1..=N_PRODUCTS),
            sentiment,
            review: review(rng, sentiment),
            rating: rating(rng, sentiment),
        }
    }

    fn finish(self, index: usize) -> CustomerRecord {
        let bucket = age_bucket(self.age as i64).expect("generated ages are non-negative");
        CustomerRecord {
            id: format!("{}_{}", index, self.rating),
            age: self.age,
            age_range_lower: bucket.lower,
            age_range_upper: bucket.upper,
            gender: self.gender,
            income_category: self.income_category,
            locality: self.locality,
            other_product_id: self.product,
            sentiment: self.sentiment,
            review: self.review,
        }
    }
}

fn rating(rng: &mut ChaCha8Rng, sentiment: Label) -> u32 {
    match sentiment {
        Label::Positive => rng.gen_range(7..=10),
        Label::Negative => rng.gen_range(1..=4),
    }
}

fn review(rng: &mut ChaCha8Rng, sentiment: Label) -> String {
    let (own, other, extras) = match sentiment {
        Label::Positive => (POSITIVE, NEGATIVE, POSITIVE_EXTRAS),
        Label::Negative => (NEGATIVE, POSITIVE, NEGATIVE_EXTRAS),
    };

    // A minority of reviews send mixed signals after their first phrase.
    let mixed = rng.gen_bool(0.08);
    let mut parts = vec![OPENERS.choose(rng).unwrap().to_string()];
    let n_phrases = rng.gen_range(2..=4);
    for i in 0..n_phrases {
        // Keep the two headline positive words frequent.
        let word = if i == 0 && sentiment == Label::Positive && rng.gen_bool(0.6) {
            ["amazing", "great"][rng.gen_range(0..2)]
        } else if i > 0 && mixed && rng.gen_bool(0.5) {
            other.choose(rng).unwrap()
        } else {
            own.choose(rng).unwrap()
        };
        parts.push(TEMPLATES.choose(rng).unwrap().replace("{}", word));
    }
    if rng.gen_bool(0.3) {
        parts.push(extras.choose(rng).unwrap().to_string());
    }
    if rng.gen_bool(0.12) {
        let word = other.choose(rng).unwrap();
        parts.push(format!("only the paperwork was {word}"));
    }

    let sep = if rng.gen_bool(0.1) {
        ". <br /><br />"
    } else {
        ". "
    };
    let mut text = parts.join(sep);
    text.push('.');
    text
}
