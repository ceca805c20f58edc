//! Comparing candidate lists with gold lists, and measuring how much of a
//! corpus a stopword list removes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::corpus::Corpus;
use crate::curation::StopwordList;
use crate::metrics::TermStats;
use crate::ranking::CandidateList;
use crate::scalar::{ratio, Scalar};
use crate::tokenizer::{tokenize, TokenizerConfig};
use crate::{json, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct EvalReport<S: Scalar = f64> {
    pub k: usize,
    #[serde(serialize_with = "json::ser_scalar")]
    pub precision_at_k: S,
    #[serde(serialize_with = "json::ser_scalar")]
    pub recall: S,
    #[serde(serialize_with = "json::ser_scalar")]
    pub f1: S,
    pub gold_size: usize,
    pub overlap: BTreeSet<String>,
    pub missed: BTreeSet<String>,
    pub spurious: BTreeSet<String>,
    /// Gold words that never reached the candidate pool (thresholds or
    /// absence from the corpus), so no k could have recovered them.
    pub gold_outside_pool: BTreeSet<String>,
}

/// Precision of the top `k` candidates and recall against the whole gold list.
pub fn precision_recall<S: Scalar>(
    candidates: &CandidateList<S>,
    gold: &StopwordList,
    k: usize,
) -> Result<EvalReport<S>> {
    if candidates.lang != gold.lang() {
        return Err(Error::LanguageMismatch(vec![
            candidates.lang.clone(),
            gold.lang().to_string(),
        ]));
    }
    if gold.is_empty() {
        return Err(Error::EmptyList("gold".into()));
    }
    let max = candidates.entries.len();
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let top: BTreeSet<String> = candidates.terms().take(k).map(String::from).collect();
    let gold_words = gold.words();
    let overlap: BTreeSet<String> = top.intersection(gold_words).cloned().collect();
    let precision = ratio::<S>(overlap.len() as u64, k as u64);
    let recall = ratio::<S>(overlap.len() as u64, gold_words.len() as u64);
    let pool: BTreeSet<&str> = candidates.run_meta.pool.iter().map(String::as_str).collect();
    Ok(EvalReport {
        k,
        precision_at_k: precision,
        recall,
        f1: f1(precision, recall),
        gold_size: gold_words.len(),
        missed: gold_words.difference(&top).cloned().collect(),
        spurious: top.difference(gold_words).cloned().collect(),
        gold_outside_pool: gold_words
            .iter()
            .filter(|w| !pool.contains(w.as_str()))
            .cloned()
            .collect(),
        overlap,
    })
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1<S: Scalar>(precision: S, recall: S) -> S {
    let sum = precision + recall;
    if sum == S::zero() {
        S::zero()
    } else {
        (S::one() + S::one()) * precision * recall / sum
    }
}

/// Share of corpus tokens that are list words: Σ_{t∈list} c(t) / T.
pub fn token_coverage<S: Scalar>(list: &StopwordList, stats: &TermStats) -> S {
    let covered: u64 = list.words().iter().map(|w| stats.count(w)).sum();
    ratio(covered, stats.total_tokens())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct ReductionReport<S: Scalar = f64> {
    pub tokens_before: u64,
    pub tokens_after: u64,
    #[serde(serialize_with = "json::ser_scalar")]
    pub reduction_fraction: S,
    /// domain → (before, after)
    pub per_domain: BTreeMap<String, (u64, u64)>,
}

/// Token counts before and after removing list words.
pub fn reduction_report<S: Scalar>(
    list: &StopwordList,
    corpus: &Corpus,
    cfg: &TokenizerConfig,
) -> ReductionReport<S> {
    let mut per_domain: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for doc in corpus.documents() {
        let tokens = tokenize(&doc.text, cfg);
        let before = tokens.len() as u64;
        let after = tokens.iter().filter(|t| !list.contains(t)).count() as u64;
        let e = per_domain.entry(doc.domain.clone()).or_insert((0, 0));
        e.0 += before;
        e.1 += after;
    }
    let tokens_before = per_domain.values().map(|p| p.0).sum();
    let tokens_after = per_domain.values().map(|p| p.1).sum();
    ReductionReport {
        tokens_before,
        tokens_after,
        // Same numerator/denominator form as token_coverage, so the two agree
        // exactly on the same list and corpus.
        reduction_fraction: ratio(tokens_before - tokens_after, tokens_before),
        per_domain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::curation::ProvenanceRecord;
    use crate::metrics::count_terms;
    use crate::pipeline::{extract, ExtractConfig};

    fn list(words: &[&str]) -> StopwordList {
        let mut l = StopwordList::new("xx");
        for w in words {
            l.insert(w, ProvenanceRecord::seed("gold")).unwrap();
        }
        l
    }

    fn corpus() -> Corpus {
        let docs = [("g1", "a b a c"), ("g1", "b a d"), ("g2", "a e b b")];
        Corpus::new(
            "xx",
            docs.iter()
                .enumerate()
                .map(|(i, (g, t))| Document::new(format!("d{i}"), *t, "xx", *g, "s"))
                .collect(),
        )
        .unwrap()
    }

    fn candidates() -> CandidateList {
        let cfg = ExtractConfig {
            min_count: 1,
            min_df: 1,
            ..ExtractConfig::default()
        };
        extract(&corpus(), &cfg).unwrap()
    }

    #[test]
    fn top_two_against_gold() {
        let cl = candidates();
        let top: Vec<&str> = cl.terms().take(2).collect();
        assert_eq!(top, ["a", "b"]);
        let r = precision_recall(&cl, &list(&["a", "c"]), 2).unwrap();
        assert_eq!(r.precision_at_k, 0.5);
        assert_eq!(r.recall, 0.5);
        assert_eq!(r.f1, 0.5);
        assert_eq!(r.missed, BTreeSet::from(["c".to_string()]));
        assert_eq!(r.spurious, BTreeSet::from(["b".to_string()]));
    }

    #[test]
    fn gold_inside_top_k() {
        let r = precision_recall(&candidates(), &list(&["a"]), 3).unwrap();
        assert_eq!(r.recall, 1.0);
    }

    #[test]
    fn gold_outside_pool_reported() {
        let r = precision_recall(&candidates(), &list(&["a", "zzz"]), 1).unwrap();
        assert_eq!(r.gold_outside_pool, BTreeSet::from(["zzz".to_string()]));
    }

    #[test]
    fn k_range_checked() {
        let cl = candidates();
        let n = cl.entries.len();
        assert!(matches!(precision_recall(&cl, &list(&["a"]), 0), Err(Error::KOutOfRange { .. })));
        assert!(matches!(precision_recall(&cl, &list(&["a"]), n + 1), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn f1_zero_case() {
        assert_eq!(f1(0.0f64, 0.0), 0.0);
    }

    #[test]
    fn coverage_extremes() {
        let s = count_terms(&corpus(), &TokenizerConfig::default()).unwrap();
        let vocab: Vec<&str> = s.terms().keys().map(String::as_str).collect();
        assert_eq!(token_coverage::<f64>(&list(&vocab), &s), 1.0);
        assert_eq!(token_coverage::<f64>(&list(&["zz"]), &s), 0.0);
    }

    #[test]
    fn reduction_hand_counts() {
        let cfg = TokenizerConfig::default();
        let r = reduction_report::<f64>(&list(&["a", "b"]), &corpus(), &cfg);
        // g1: 7 tokens, 5 of them a/b; g2: 4 tokens, 3 of them a/b.
        assert_eq!(r.per_domain["g1"], (7, 2));
        assert_eq!(r.per_domain["g2"], (4, 1));
        assert_eq!((r.tokens_before, r.tokens_after), (11, 3));
        assert_eq!(r.reduction_fraction, 8.0 / 11.0);

        let none = reduction_report::<f64>(&list(&["zz"]), &corpus(), &cfg);
        assert_eq!(none.reduction_fraction, 0.0);
        let all = reduction_report::<f64>(&list(&["a", "b", "c", "d", "e"]), &corpus(), &cfg);
        assert_eq!((all.tokens_after, all.reduction_fraction), (0, 1.0));
    }
}
