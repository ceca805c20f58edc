//! Corpus → candidate list: count, filter, score, rank, fuse.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::metrics::{
    candidate_pool, compute_metric, count_terms, CandidatePool, Metric, MetricScore, TermStats,
    DEFAULT_MIN_COUNT, DEFAULT_MIN_DF,
};
use crate::ranking::{
    fuse_rankings, rank_by_metric, CandidateList, RunMeta, SkippedMetric,
    CANDIDATE_SCHEMA_VERSION, DEFAULT_TOP_K,
};
use crate::scalar::Scalar;
use crate::tokenizer::TokenizerConfig;
use crate::{json, Error, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const WORD_FORM: &str = "normalized_surface";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub tokenizer: TokenizerConfig,
    pub min_count: u64,
    pub min_df: u64,
    pub top_k: usize,
    pub metrics: Vec<Metric>,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            tokenizer: TokenizerConfig::default(),
            min_count: DEFAULT_MIN_COUNT,
            min_df: DEFAULT_MIN_DF,
            top_k: DEFAULT_TOP_K,
            metrics: Metric::ALL.to_vec(),
        }
    }
}

/// Scores every requested metric; metrics whose preconditions fail on this
/// corpus are returned as skipped instead of failing the run.
pub fn score_metrics<S: Scalar>(
    stats: &TermStats,
    pool: &CandidatePool,
    metrics: &[Metric],
) -> Result<(Vec<MetricScore<S>>, Vec<SkippedMetric>)> {
    let mut wanted = metrics.to_vec();
    wanted.sort();
    wanted.dedup();
    let mut scored = Vec::new();
    let mut skipped = Vec::new();
    for metric in wanted {
        match compute_metric::<S>(metric, stats, pool) {
            Ok(m) => scored.push(m),
            Err(Error::MetricInapplicable { metric, reason }) => {
                skipped.push(SkippedMetric { metric, reason })
            }
            Err(e) => return Err(e),
        }
    }
    Ok((scored, skipped))
}

/// Deterministic run id over the corpus content and the extraction settings.
pub fn run_id(corpus_fingerprint: &str, cfg: &ExtractConfig) -> Result<String> {
    let mut h = Sha256::new();
    h.update(b"extract\0");
    h.update(corpus_fingerprint.as_bytes());
    h.update(b"\0");
    h.update(json::to_canonical_line(cfg)?.as_bytes());
    Ok(hex::encode(h.finalize()))
}

/// Ranks and fuses already-computed metric scores into a candidate list.
pub fn assemble<S: Scalar>(
    corpus_fingerprint: &str,
    stats: &TermStats,
    pool: &CandidatePool,
    scores: &[MetricScore<S>],
    skipped: Vec<SkippedMetric>,
    cfg: &ExtractConfig,
) -> Result<CandidateList<S>> {
    if scores.is_empty() {
        return Err(Error::NoMetrics(
            skipped.iter().map(|s| format!("{}: {}", s.metric, s.reason)).collect(),
        ));
    }
    let rankings = scores
        .iter()
        .map(|m| rank_by_metric(m, pool, stats))
        .collect::<Result<Vec<_>>>()?;
    let entries = fuse_rankings(&rankings, cfg.top_k)?;
    let run_meta = RunMeta {
        run_id: run_id(corpus_fingerprint, cfg)?,
        tool_version: TOOL_VERSION.to_string(),
        corpus_fingerprint: corpus_fingerprint.to_string(),
        doc_count: stats.doc_count(),
        total_tokens: stats.total_tokens(),
        domains: stats.domains().to_vec(),
        tokenizer: stats.tokenizer().clone(),
        min_count: pool.min_count(),
        min_df: pool.min_df(),
        top_k: cfg.top_k,
        metrics_used: scores.iter().map(|m| m.metric).collect(),
        metrics_skipped: skipped,
        metric_params: scores.iter().map(|m| (m.metric, m.params.clone())).collect(),
        word_form: WORD_FORM.to_string(),
        pool: pool.terms().iter().cloned().collect(),
    };
    let list = CandidateList {
        schema_version: CANDIDATE_SCHEMA_VERSION,
        lang: stats.lang().to_string(),
        entries,
        run_meta,
    };
    list.check()?;
    Ok(list)
}

/// The full automatic stage.
pub fn extract<S: Scalar>(corpus: &Corpus, cfg: &ExtractConfig) -> Result<CandidateList<S>> {
    if cfg.metrics.is_empty() {
        return Err(Error::InvalidArgument("no metrics selected".into()));
    }
    let stats = count_terms(corpus, &cfg.tokenizer)?;
    let pool = candidate_pool(&stats, cfg.min_count, cfg.min_df)?;
    let (scores, skipped) = score_metrics::<S>(&stats, &pool, &cfg.metrics)?;
    assemble(&corpus.fingerprint()?, &stats, &pool, &scores, skipped, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn corpus(domains: &[&str]) -> Corpus {
        let texts = ["na da ba x", "na da y", "na ba z da", "da na q"];
        Corpus::new(
            "ha",
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| Document::new(format!("d{i}"), *t, "ha", domains[i % domains.len()], "s"))
                .collect(),
        )
        .unwrap()
    }

    fn cfg() -> ExtractConfig {
        ExtractConfig {
            min_count: 1,
            min_df: 1,
            ..ExtractConfig::default()
        }
    }

    #[test]
    fn labeled_corpus_uses_all_metrics() {
        let cl = extract::<f64>(&corpus(&["a", "b"]), &cfg()).unwrap();
        assert_eq!(cl.run_meta.metrics_used, Metric::ALL);
        assert!(cl.entries.iter().all(|e| e.per_metric.len() == 4));
        // "da" and "na" tie everywhere; codepoint order decides.
        assert_eq!(cl.entries[0].term, "da");
        assert_eq!(cl.entries[1].term, "na");
    }

    #[test]
    fn unlabeled_corpus_skips_domain_metrics() {
        let cl = extract::<f64>(&corpus(&["a"]), &cfg()).unwrap();
        assert_eq!(cl.run_meta.metrics_used, [Metric::FreqSpread, Metric::Entropy]);
        let skipped: Vec<_> = cl.run_meta.metrics_skipped.iter().map(|s| s.metric).collect();
        assert_eq!(skipped, [Metric::InfoGain, Metric::KlDiv]);
    }

    #[test]
    fn only_inapplicable_metrics_is_error() {
        let c = ExtractConfig {
            metrics: vec![Metric::KlDiv],
            ..cfg()
        };
        assert!(matches!(extract::<f64>(&corpus(&["a"]), &c), Err(Error::NoMetrics(_))));
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let c = corpus(&["a", "b"]);
        let a = extract::<f64>(&c, &cfg()).unwrap();
        let b = extract::<f64>(&c, &cfg()).unwrap();
        let text = a.to_json().unwrap();
        assert_eq!(text, b.to_json().unwrap());
        assert_eq!(CandidateList::<f64>::from_json(&text).unwrap(), a);
    }

    #[test]
    fn run_id_tracks_config() {
        let c = corpus(&["a", "b"]);
        let a = extract::<f64>(&c, &cfg()).unwrap();
        let b = extract::<f64>(&c, &ExtractConfig { top_k: 3, ..cfg() }).unwrap();
        assert_ne!(a.run_id(), b.run_id());
    }
}
