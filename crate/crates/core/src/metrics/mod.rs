//! Corpus statistics and the four per-term stopwordness metrics.
//!
//! Every metric is oriented so that a higher score means "more stopword-like",
//! which lets rank fusion treat them uniformly. Natural logarithms throughout.

mod logsum;
mod scores;
mod stats;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::{json, Error, Result};

pub use scores::{
    compute_metric, kl_divergence, metric_entropy, metric_freq_spread,
    metric_information_gain, metric_kl_divergence, ntf,
};
pub use stats::{
    candidate_pool, count_terms, CandidatePool, TermCounter, TermCounts, TermStats,
    DEFAULT_MIN_COUNT, DEFAULT_MIN_DF, TERM_STATS_SCHEMA_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Normalized term frequency scaled by document spread (inverted TF-IDF).
    FreqSpread,
    /// Normalized entropy of the term's distribution over documents.
    Entropy,
    /// One minus the normalized information gain about the domain label.
    InfoGain,
    /// exp(−KL) between the term's domain distribution and the background.
    KlDiv,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::FreqSpread,
        Metric::Entropy,
        Metric::InfoGain,
        Metric::KlDiv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::FreqSpread => "freq_spread",
            Metric::Entropy => "entropy",
            Metric::InfoGain => "info_gain",
            Metric::KlDiv => "kl_div",
        }
    }

    /// Whether the metric needs at least two domain labels.
    pub fn needs_domains(self) -> bool {
        matches!(self, Metric::InfoGain | Metric::KlDiv)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "freq_spread" | "tfidf" | "tf_idf" => Ok(Metric::FreqSpread),
            "entropy" => Ok(Metric::Entropy),
            "info_gain" | "ig" | "information_gain" => Ok(Metric::InfoGain),
            "kl_div" | "kl" | "kl_divergence" => Ok(Metric::KlDiv),
            _ => Err(Error::InvalidArgument(format!("unknown metric {s:?}"))),
        }
    }
}

/// Per-term stopwordness under one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MetricScore<S: Scalar = f64> {
    pub metric: Metric,
    #[serde(
        serialize_with = "ser_score_map",
        deserialize_with = "de_score_map"
    )]
    pub scores: BTreeMap<String, S>,
    pub params: BTreeMap<String, String>,
}

impl<S: Scalar> MetricScore<S> {
    pub fn get(&self, term: &str) -> Option<S> {
        self.scores.get(term).copied()
    }

    /// Applies `f` to every score.
    pub fn map_scores(&self, f: impl Fn(S) -> S) -> MetricScore<S> {
        MetricScore {
            metric: self.metric,
            scores: self.scores.iter().map(|(t, &x)| (t.clone(), f(x))).collect(),
            params: self.params.clone(),
        }
    }
}

fn ser_score_map<S: Scalar, Z: serde::Serializer>(
    m: &BTreeMap<String, S>,
    z: Z,
) -> std::result::Result<Z::Ok, Z::Error> {
    use serde::ser::SerializeMap;
    let mut map = z.serialize_map(Some(m.len()))?;
    for (t, x) in m {
        map.serialize_entry(t, &json::float_number(x.to_f64_lossy()))?;
    }
    map.end()
}

fn de_score_map<'de, S: Scalar, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<BTreeMap<String, S>, D::Error> {
    let raw = BTreeMap::<String, f64>::deserialize(d)?;
    raw.into_iter()
        .map(|(t, x)| {
            S::from_f64(x)
                .map(|s| (t, s))
                .ok_or_else(|| serde::de::Error::custom("score out of range"))
        })
        .collect()
}
