//! Corpus-driven stopword curation.
//!
//! The pipeline ingests monolingual documents labelled by domain, counts
//! terms, scores every frequent term under four stopwordness metrics, fuses
//! the per-metric rankings into one candidate list, and hands the candidates
//! to human reviewers. Accepted words join a curated per-language list that
//! keeps the provenance of every entry.
//!
//! Metric, ranking and evaluation code is generic over the float type
//! ([`scalar::Scalar`], implemented for `f32` and `f64`). The aliases below
//! fix it to `f64`, which is what the CLI and the file formats use.
//!
//! ```
//! use stopcurate::corpus::{Corpus, Document};
//! use stopcurate::pipeline::{extract, ExtractConfig};
//!
//! let docs = ["na da ba", "na da", "da na ka"]
//!     .iter()
//!     .enumerate()
//!     .map(|(i, t)| Document::new(format!("d{i}"), *t, "ha", "news", "inline"))
//!     .collect();
//! let corpus = Corpus::new("ha", docs).unwrap();
//! let cfg = ExtractConfig { min_count: 2, min_df: 2, ..ExtractConfig::default() };
//! let candidates: stopcurate::CandidateList = extract(&corpus, &cfg).unwrap();
//! assert_eq!(candidates.terms().collect::<Vec<_>>(), ["da", "na"]);
//! ```

pub mod corpus;
pub mod curation;
pub mod error;
pub mod evaluation;
pub mod json;
pub mod manifest;
pub mod metrics;
pub mod pipeline;
pub mod ranking;
pub mod scalar;
pub mod tokenizer;

pub use corpus::{Corpus, Document};
pub use curation::{CuratedStore, ReviewSheet, StopwordList};
pub use error::{Error, Result};
pub use metrics::{CandidatePool, Metric, TermStats};
pub use scalar::Scalar;
pub use tokenizer::TokenizerConfig;

pub type MetricScore = metrics::MetricScore<f64>;
pub type MetricScoreF32 = metrics::MetricScore<f32>;
pub type Ranking = ranking::Ranking<f64>;
pub type RankingF32 = ranking::Ranking<f32>;
pub type CandidateList = ranking::CandidateList<f64>;
pub type CandidateListF32 = ranking::CandidateList<f32>;
pub type EvalReport = evaluation::EvalReport<f64>;
pub type ReductionReport = evaluation::ReductionReport<f64>;
