//! Sentiment-aware recommendation of insurance products.
//!
//! The crate is a small two-stage pipeline:
//!
//! 1. A customer's free-text feedback is classified as positive (`1`) or
//!    negative (`0`) by one of three classifiers built from scratch:
//!    logistic regression, multinomial naive Bayes, or a random forest.
//! 2. Existing customers sharing the new customer's age bucket, gender,
//!    income category, locality and polarity are selected, and the products
//!    they bought are ranked by purchase frequency.
//!
//! ```
//! use sentirec::corpus::{self, Gender, Locality, QueryCustomer};
//! use sentirec::classify::{ModelKind, SentimentModel, TrainConfig};
//! use sentirec::recommend::recommend;
//!
//! let data = corpus::generate_synthetic(400, 3, false)?;
//! let model = SentimentModel::train(data.records(), &TrainConfig::new(ModelKind::NaiveBayes))?;
//!
//! let query = QueryCustomer::new(42, Gender::M, 2, Locality::City, "It is a great product");
//! let result = recommend(&data, &model, &query)?;
//! assert_eq!(result.criteria.sentiment.as_u8(), 1);
//! # Ok::<(), sentirec::Error>(())
//! ```
//!
//! The guide under `book/` walks through each stage in more depth.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod recommend;
pub mod textfeat;

pub use crate::error::{Error, ErrorCategory, Result};

// Compile and run the guide's code listings as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/features.md")]
    mod features {}
    #[doc = include_str!("../../../book/src/logistic.md")]
    mod logistic {}
    #[doc = include_str!("../../../book/src/naive_bayes.md")]
    mod naive_bayes {}
    #[doc = include_str!("../../../book/src/forest.md")]
    mod forest {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/recommendation.md")]
    mod recommendation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
