//! Per-metric rankings and their mean-rank (Borda) fusion.
//!
//! Only ranks enter the fusion, never raw scores, so any strictly increasing
//! rescaling of a metric leaves the fused order unchanged.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::metrics::{CandidatePool, Metric, MetricScore, TermStats};
use crate::scalar::Scalar;
use crate::tokenizer::TokenizerConfig;
use crate::{json, Error, Result};

pub const DEFAULT_TOP_K: usize = 200;
pub const CANDIDATE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct RankedTerm<S: Scalar = f64> {
    pub term: String,
    /// 1-based.
    pub rank: usize,
    pub score: S,
    /// c(t), kept for tie-breaking during fusion.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking<S: Scalar = f64> {
    pub metric: Metric,
    pub ordered: Vec<RankedTerm<S>>,
}

impl<S: Scalar> Ranking<S> {
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.ordered.iter().map(|r| r.term.as_str())
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }
}

/// Descending score; ties go to the higher count, then codepoint order.
pub fn rank_by_metric<S: Scalar>(
    scores: &MetricScore<S>,
    pool: &CandidatePool,
    stats: &TermStats,
) -> Result<Ranking<S>> {
    let mut items = Vec::with_capacity(pool.len());
    for t in pool.terms() {
        let score = scores.get(t).ok_or_else(|| {
            Error::Consistency(format!("{} has no score for pool term {t:?}", scores.metric))
        })?;
        if !score.is_finite() {
            return Err(Error::Consistency(format!(
                "{} score for {t:?} is not finite",
                scores.metric
            )));
        }
        items.push((t.as_str(), score, stats.count(t)));
    }
    items.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| b.2.cmp(&a.2))
            .then_with(|| a.0.cmp(b.0))
    });
    Ok(Ranking {
        metric: scores.metric,
        ordered: items
            .into_iter()
            .enumerate()
            .map(|(i, (term, score, count))| RankedTerm {
                term: term.to_string(),
                rank: i + 1,
                score,
                count,
            })
            .collect(),
    })
}

/// True iff rescaling `scores` through `f` leaves the ranking order intact.
/// `f` must be strictly increasing on the score range.
pub fn rank_invariance_check<S: Scalar>(
    scores: &MetricScore<S>,
    pool: &CandidatePool,
    stats: &TermStats,
    f: impl Fn(S) -> S,
) -> Result<bool> {
    let before = rank_by_metric(scores, pool, stats)?;
    let after = rank_by_metric(&scores.map_scores(f), pool, stats)?;
    Ok(before.terms().eq(after.terms()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MetricEvidence<S: Scalar = f64> {
    pub rank: usize,
    #[serde(serialize_with = "json::ser_scalar", deserialize_with = "json::de_scalar")]
    pub score: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CandidateEntry<S: Scalar = f64> {
    pub term: String,
    pub fused_rank: usize,
    #[serde(serialize_with = "json::ser_scalar", deserialize_with = "json::de_scalar")]
    pub mean_rank: S,
    pub count: u64,
    pub per_metric: BTreeMap<Metric, MetricEvidence<S>>,
}

/// Mean-rank fusion of rankings over one shared pool, truncated to the top `k`.
pub fn fuse_rankings<S: Scalar>(rankings: &[Ranking<S>], k: usize) -> Result<Vec<CandidateEntry<S>>> {
    let first = rankings
        .first()
        .ok_or_else(|| Error::InvalidArgument("no rankings to fuse".into()))?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let pool: BTreeSet<&str> = first.terms().collect();
    for r in &rankings[1..] {
        let other: BTreeSet<&str> = r.terms().collect();
        let difference = pool.symmetric_difference(&other).count();
        if difference > 0 || other.len() != r.len() {
            return Err(Error::PoolMismatch { difference });
        }
    }

    struct Acc<S: Scalar> {
        rank_sum: usize,
        count: u64,
        per_metric: BTreeMap<Metric, MetricEvidence<S>>,
    }
    let mut acc: BTreeMap<&str, Acc<S>> = BTreeMap::new();
    for r in rankings {
        for item in &r.ordered {
            let a = acc.entry(item.term.as_str()).or_insert_with(|| Acc {
                rank_sum: 0,
                count: item.count,
                per_metric: BTreeMap::new(),
            });
            a.rank_sum += item.rank;
            a.per_metric.insert(
                r.metric,
                MetricEvidence {
                    rank: item.rank,
                    score: item.score,
                },
            );
        }
    }

    // Every term has the same number of ranks, so comparing integer rank sums
    // compares mean ranks without rounding.
    let mut merged: Vec<(&str, Acc<S>)> = acc.into_iter().collect();
    merged.sort_by(|a, b| {
        a.1.rank_sum
            .cmp(&b.1.rank_sum)
            .then_with(|| b.1.count.cmp(&a.1.count))
            .then_with(|| a.0.cmp(b.0))
    });
    let n = S::from_usize(rankings.len()).expect("ranking count fits");
    Ok(merged
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (term, a))| CandidateEntry {
            term: term.to_string(),
            fused_rank: i + 1,
            mean_rank: S::from_usize(a.rank_sum).expect("rank sum fits") / n,
            count: a.count,
            per_metric: a.per_metric,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedMetric {
    pub metric: Metric,
    pub reason: String,
}

/// Everything needed to reproduce a candidate list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub run_id: String,
    pub tool_version: String,
    pub corpus_fingerprint: String,
    pub doc_count: u64,
    pub total_tokens: u64,
    pub domains: Vec<String>,
    pub tokenizer: TokenizerConfig,
    pub min_count: u64,
    pub min_df: u64,
    pub top_k: usize,
    pub metrics_used: Vec<Metric>,
    pub metrics_skipped: Vec<SkippedMetric>,
    pub metric_params: BTreeMap<Metric, BTreeMap<String, String>>,
    /// Stopwords are normalized surface forms, not lemmas.
    pub word_form: String,
    /// Every term that passed the count thresholds, sorted.
    pub pool: Vec<String>,
}

/// Fused stopword candidates for one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CandidateList<S: Scalar = f64> {
    pub schema_version: u32,
    pub lang: String,
    pub entries: Vec<CandidateEntry<S>>,
    pub run_meta: RunMeta,
}

impl<S: Scalar> CandidateList<S> {
    pub fn run_id(&self) -> &str {
        &self.run_meta.run_id
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.term.as_str())
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_canonical_string(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let list: Self = serde_json::from_str(s)?;
        list.check()?;
        Ok(list)
    }

    /// Entry order, dense fused ranks and per-metric coverage.
    pub fn check(&self) -> Result<()> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.fused_rank != i + 1 {
                return Err(Error::Consistency(format!(
                    "entry {:?} has fused_rank {} at position {}",
                    e.term,
                    e.fused_rank,
                    i + 1
                )));
            }
            if i > 0 && self.entries[i - 1].mean_rank > e.mean_rank {
                return Err(Error::Consistency("entries not sorted by mean_rank".into()));
            }
            for m in &self.run_meta.metrics_used {
                if !e.per_metric.contains_key(m) {
                    return Err(Error::Consistency(format!("{:?} lacks a {m} rank", e.term)));
                }
            }
        }
        Ok(())
    }
}
