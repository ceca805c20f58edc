use std::collections::BTreeMap;

use super::{CandidatePool, Metric, MetricScore, TermCounts, TermStats};
use super::logsum::LogSum;
use crate::scalar::{ratio, Scalar};
use crate::{Error, Result};

fn clamp01<S: Scalar>(x: S) -> S {
    x.max(S::zero()).min(S::one())
}

fn base_params(metric: Metric, pool: &CandidatePool) -> BTreeMap<String, String> {
    let mut p = BTreeMap::new();
    p.insert("log".to_string(), "natural".to_string());
    p.insert("min_count".to_string(), pool.min_count().to_string());
    p.insert("min_df".to_string(), pool.min_df().to_string());
    let formula = match metric {
        Metric::FreqSpread => "c(t)/T * df(t)/N",
        Metric::Entropy => "H(d|t)/ln(N)",
        Metric::InfoGain => "1 - IG(domain; presence(t))/H(domain)",
        Metric::KlDiv => "exp(-KL(q_t || T_g/T))",
    };
    p.insert("formula".to_string(), formula.to_string());
    if metric.needs_domains() {
        p.insert("class".to_string(), "domain".to_string());
    }
    p
}

fn score_pool<S: Scalar>(
    metric: Metric,
    stats: &TermStats,
    pool: &CandidatePool,
    params: BTreeMap<String, String>,
    f: impl Fn(&TermCounts) -> S,
) -> Result<MetricScore<S>> {
    if pool.is_empty() {
        return Err(Error::Consistency("empty candidate pool".into()));
    }
    let mut scores = BTreeMap::new();
    for t in pool.terms() {
        let counts = stats
            .term(t)
            .ok_or_else(|| Error::Consistency(format!("pool term {t:?} missing from stats")))?;
        scores.insert(t.clone(), f(counts));
    }
    Ok(MetricScore {
        metric,
        scores,
        params,
    })
}

/// NTF(t) = c(t)/T.
pub fn ntf<S: Scalar>(stats: &TermStats, t: &str) -> S {
    ratio(stats.count(t), stats.total_tokens())
}

/// score(t) = c(t)/T · df(t)/N, in (0, 1].
pub fn metric_freq_spread<S: Scalar>(
    stats: &TermStats,
    pool: &CandidatePool,
) -> Result<MetricScore<S>> {
    let (n, total) = (stats.doc_count(), stats.total_tokens());
    let den = S::from_u128(total as u128 * n as u128).expect("finite");
    score_pool(
        Metric::FreqSpread,
        stats,
        pool,
        base_params(Metric::FreqSpread, pool),
        // Integer numerator: equal products c·df give bit-identical scores.
        |c| S::from_u128(c.count as u128 * c.df() as u128).expect("finite") / den,
    )
}

/// ln n, evaluated through the same prime decomposition as the metric sums
/// so that ratios of equal quantities are exactly 1.
fn ln_count<S: Scalar>(n: u64) -> S {
    let mut s = LogSum::default();
    s.add(n, 1);
    s.value(1)
}

/// score(t) = H(t)/ln N where H is the entropy of p(d|t) = c(t,d)/c(t).
pub fn metric_entropy<S: Scalar>(stats: &TermStats, pool: &CandidatePool) -> Result<MetricScore<S>> {
    let n = stats.doc_count();
    if n < 2 {
        return Err(Error::MetricInapplicable {
            metric: Metric::Entropy,
            reason: format!("needs at least 2 documents, corpus has {n}"),
        });
    }
    let ln_n: S = ln_count(n);
    score_pool(
        Metric::Entropy,
        stats,
        pool,
        base_params(Metric::Entropy, pool),
        |c| {
            // c·H = c ln c − Σ_d c_d ln c_d
            let mut h = LogSum::default();
            h.add_xlnx(c.count);
            for &k in c.per_doc.values() {
                h.sub_xlnx(k);
            }
            clamp01(h.value::<S>(c.count) / ln_n)
        },
    )
}

/// Adds N·H(counts) = N ln N − Σ k ln k to `acc`, with N = Σ k.
fn add_scaled_entropy(acc: &mut LogSum, counts: impl Iterator<Item = u64>) {
    let mut total = 0;
    for k in counts {
        acc.sub_xlnx(k);
        total += k;
    }
    acc.add_xlnx(total);
}

fn require_domains(metric: Metric, stats: &TermStats) -> Result<()> {
    let g = stats.domain_count();
    if g < 2 {
        return Err(Error::MetricInapplicable {
            metric,
            reason: format!("needs at least 2 domains, corpus has {g}"),
        });
    }
    Ok(())
}

/// score(t) = 1 − IG(t)/H(C), with classes = domains and document-level
/// presence. Since IG = H(C) − H(C|X), this is H(C|X)/H(C).
pub fn metric_information_gain<S: Scalar>(
    stats: &TermStats,
    pool: &CandidatePool,
) -> Result<MetricScore<S>> {
    require_domains(Metric::InfoGain, stats)?;
    let n = stats.doc_count();
    let class_docs = stats.domain_docs();
    let mut h_class = LogSum::default();
    add_scaled_entropy(&mut h_class, class_docs.iter().copied());
    let h_class: S = h_class.value(n);
    let doc_domain = stats.doc_domains();
    let g = stats.domain_count();

    let mut params = base_params(Metric::InfoGain, pool);
    params.insert("presence".to_string(), "document".to_string());
    score_pool(Metric::InfoGain, stats, pool, params, |c| {
        let mut present = vec![0u64; g];
        for &d in c.per_doc.keys() {
            present[doc_domain[d as usize]] += 1;
        }
        let absent = class_docs.iter().zip(&present).map(|(&all, &p)| all - p);
        // N·H(C|X) = n₁·H(C|present) + n₀·H(C|absent), each already scaled.
        let mut conditional = LogSum::default();
        add_scaled_entropy(&mut conditional, present.iter().copied());
        add_scaled_entropy(&mut conditional, absent);
        clamp01(conditional.value::<S>(n) / h_class)
    })
}

fn require_domain_tokens(stats: &TermStats) -> Result<()> {
    require_domains(Metric::KlDiv, stats)?;
    if let Some(i) = stats.domain_tokens().iter().position(|&t| t == 0) {
        return Err(Error::MetricInapplicable {
            metric: Metric::KlDiv,
            reason: format!("domain {:?} has no tokens", stats.domains()[i]),
        });
    }
    Ok(())
}

fn kl_of_counts<S: Scalar>(c: &TermCounts, domain_tokens: &[u64], total: u64) -> S {
    // c·D = Σ_g c_g ln c_g − Σ_g c_g ln T_g + c ln T − c ln c
    let mut d = LogSum::default();
    for (&cg, &tg) in c.per_domain.iter().zip(domain_tokens) {
        if cg > 0 {
            d.add_xlnx(cg);
            d.add(tg, -(cg as i128));
        }
    }
    d.add(total, c.count as i128);
    d.sub_xlnx(c.count);
    if d.is_zero() {
        return S::zero();
    }
    d.value::<S>(c.count).max(S::zero())
}

/// KL(q_t ‖ π) for a single term, `None` if the term is unseen.
pub fn kl_divergence<S: Scalar>(stats: &TermStats, t: &str) -> Option<S> {
    stats
        .term(t)
        .map(|c| kl_of_counts(c, stats.domain_tokens(), stats.total_tokens()))
}

/// score(t) = exp(−KL(q_t ‖ π)) with q_t(g) = c_g(t)/c(t) and π(g) = T_g/T.
pub fn metric_kl_divergence<S: Scalar>(
    stats: &TermStats,
    pool: &CandidatePool,
) -> Result<MetricScore<S>> {
    require_domain_tokens(stats)?;
    let mut params = base_params(Metric::KlDiv, pool);
    params.insert("background".to_string(), "domain_token_mass".to_string());
    let total = stats.total_tokens();
    score_pool(Metric::KlDiv, stats, pool, params, |c| {
        (-kl_of_counts::<S>(c, stats.domain_tokens(), total)).exp()
    })
}

pub fn compute_metric<S: Scalar>(
    metric: Metric,
    stats: &TermStats,
    pool: &CandidatePool,
) -> Result<MetricScore<S>> {
    match metric {
        Metric::FreqSpread => metric_freq_spread(stats, pool),
        Metric::Entropy => metric_entropy(stats, pool),
        Metric::InfoGain => metric_information_gain(stats, pool),
        Metric::KlDiv => metric_kl_divergence(stats, pool),
    }
}
