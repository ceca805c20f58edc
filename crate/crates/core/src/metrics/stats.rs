use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::tokenizer::{tokenize, TokenizerConfig};
use crate::{Error, Result};

/// Exact counts for one term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TermCounts {
    /// Collection frequency c(t).
    pub count: u64,
    /// Document index → occurrences.
    pub per_doc: BTreeMap<u32, u64>,
    /// Domain index → occurrences.
    pub per_domain: Vec<u64>,
}

impl TermCounts {
    pub fn df(&self) -> u64 {
        self.per_doc.len() as u64
    }
}

/// Partial counts over a subset of documents.
///
/// Counting a corpus in pieces and merging the pieces in any order gives the
/// same result as counting it in one pass; `count_terms` relies on this to fan
/// out over documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermCounter {
    domain_count: usize,
    total_tokens: u64,
    domain_tokens: Vec<u64>,
    terms: HashMap<String, TermCounts>,
}

impl TermCounter {
    pub fn new(domain_count: usize) -> Self {
        TermCounter {
            domain_count,
            total_tokens: 0,
            domain_tokens: vec![0; domain_count],
            terms: HashMap::new(),
        }
    }

    pub fn add_document<I, T>(&mut self, doc: u32, domain: usize, tokens: I)
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        for tok in tokens {
            let tok = tok.as_ref();
            let entry = match self.terms.get_mut(tok) {
                Some(e) => e,
                None => self.terms.entry(tok.to_string()).or_insert_with(|| TermCounts {
                    per_domain: vec![0; self.domain_count],
                    ..TermCounts::default()
                }),
            };
            entry.count += 1;
            *entry.per_doc.entry(doc).or_insert(0) += 1;
            entry.per_domain[domain] += 1;
            self.domain_tokens[domain] += 1;
            self.total_tokens += 1;
        }
    }

    pub fn merge(mut self, other: TermCounter) -> TermCounter {
        assert_eq!(self.domain_count, other.domain_count, "domain count mismatch");
        if self.terms.len() < other.terms.len() {
            return other.merge(self);
        }
        self.total_tokens += other.total_tokens;
        for (a, b) in self.domain_tokens.iter_mut().zip(&other.domain_tokens) {
            *a += b;
        }
        for (term, counts) in other.terms {
            match self.terms.get_mut(&term) {
                Some(mine) => {
                    mine.count += counts.count;
                    for (d, n) in counts.per_doc {
                        *mine.per_doc.entry(d).or_insert(0) += n;
                    }
                    for (a, b) in mine.per_domain.iter_mut().zip(&counts.per_domain) {
                        *a += b;
                    }
                }
                None => {
                    self.terms.insert(term, counts);
                }
            }
        }
        self
    }
}

/// Aggregated corpus statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermStats {
    lang: String,
    doc_ids: Vec<String>,
    doc_domain: Vec<usize>,
    domains: Vec<String>,
    domain_docs: Vec<u64>,
    domain_tokens: Vec<u64>,
    total_tokens: u64,
    terms: BTreeMap<String, TermCounts>,
    tokenizer: TokenizerConfig,
}

impl TermStats {
    /// Finishes a merged [`TermCounter`]. `doc_domain[i]` is the domain index
    /// of document `i`, indexing into `domains`.
    pub fn from_counter(
        lang: impl Into<String>,
        counter: TermCounter,
        doc_ids: Vec<String>,
        doc_domain: Vec<usize>,
        domains: Vec<String>,
        tokenizer: TokenizerConfig,
    ) -> Result<Self> {
        if counter.total_tokens == 0 {
            return Err(Error::EmptyVocabulary);
        }
        if doc_ids.len() != doc_domain.len() || domains.len() != counter.domain_count {
            return Err(Error::Consistency("document/domain tables disagree".into()));
        }
        let mut domain_docs = vec![0u64; domains.len()];
        for &g in &doc_domain {
            domain_docs[g] += 1;
        }
        Ok(TermStats {
            lang: lang.into(),
            doc_ids,
            doc_domain,
            domains,
            domain_docs,
            domain_tokens: counter.domain_tokens,
            total_tokens: counter.total_tokens,
            terms: counter.terms.into_iter().collect(),
            tokenizer,
        })
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    /// N
    pub fn doc_count(&self) -> u64 {
        self.doc_ids.len() as u64
    }

    /// T
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// G
    pub fn domain_count(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[String] {
        &self.domains
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    /// Domain index of each document.
    pub fn doc_domains(&self) -> &[usize] {
        &self.doc_domain
    }

    /// Documents per domain (N_g).
    pub fn domain_docs(&self) -> &[u64] {
        &self.domain_docs
    }

    /// Tokens per domain (T_g).
    pub fn domain_tokens(&self) -> &[u64] {
        &self.domain_tokens
    }

    pub fn tokenizer(&self) -> &TokenizerConfig {
        &self.tokenizer
    }

    pub fn terms(&self) -> &BTreeMap<String, TermCounts> {
        &self.terms
    }

    pub fn term(&self, t: &str) -> Option<&TermCounts> {
        self.terms.get(t)
    }

    /// c(t), zero for unseen terms.
    pub fn count(&self, t: &str) -> u64 {
        self.terms.get(t).map_or(0, |c| c.count)
    }

    pub fn df(&self, t: &str) -> u64 {
        self.terms.get(t).map_or(0, TermCounts::df)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    /// Documents of each domain that contain `t`.
    pub fn domain_df(&self, t: &str) -> Vec<u64> {
        let mut out = vec![0; self.domains.len()];
        if let Some(c) = self.terms.get(t) {
            for &d in c.per_doc.keys() {
                out[self.doc_domain[d as usize]] += 1;
            }
        }
        out
    }

    /// Checks every counting identity; used by tests and after loading.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Consistency(m));
        let n = self.doc_count();
        let sum_c: u64 = self.terms.values().map(|c| c.count).sum();
        if sum_c != self.total_tokens {
            return fail(format!("Σc(t)={sum_c} but T={}", self.total_tokens));
        }
        if self.domain_tokens.iter().sum::<u64>() != self.total_tokens {
            return fail("Σ T_g ≠ T".into());
        }
        for (t, c) in &self.terms {
            if c.per_doc.values().sum::<u64>() != c.count {
                return fail(format!("Σ_d c({t},d) ≠ c({t})"));
            }
            if c.per_domain.iter().sum::<u64>() != c.count {
                return fail(format!("Σ_g c_g({t}) ≠ c({t})"));
            }
            if c.df() < 1 || c.df() > n {
                return fail(format!("df({t})={} outside 1..={n}", c.df()));
            }
        }
        Ok(())
    }
}

/// Tokenizes every document and counts exactly.
pub fn count_terms(corpus: &Corpus, cfg: &TokenizerConfig) -> Result<TermStats> {
    let domains: Vec<String> = corpus.domains().iter().cloned().collect();
    let domain_index: HashMap<&str, usize> = domains
        .iter()
        .enumerate()
        .map(|(i, g)| (g.as_str(), i))
        .collect();
    let doc_domain: Vec<usize> = corpus
        .documents()
        .iter()
        .map(|d| domain_index[d.domain.as_str()])
        .collect();
    let g = domains.len();

    let counter = corpus
        .documents()
        .par_iter()
        .enumerate()
        .fold(
            || TermCounter::new(g),
            |mut acc, (i, doc)| {
                acc.add_document(i as u32, doc_domain[i], tokenize(&doc.text, cfg));
                acc
            },
        )
        .reduce(|| TermCounter::new(g), TermCounter::merge);

    TermStats::from_counter(
        corpus.lang(),
        counter,
        corpus.documents().iter().map(|d| d.id.clone()).collect(),
        doc_domain,
        domains,
        cfg.clone(),
    )
}

/// Terms eligible for scoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePool {
    terms: BTreeSet<String>,
    min_count: u64,
    min_df: u64,
}

impl CandidatePool {
    pub fn terms(&self) -> &BTreeSet<String> {
        &self.terms
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn min_df(&self) -> u64 {
        self.min_df
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, t: &str) -> bool {
        self.terms.contains(t)
    }
}

pub const DEFAULT_MIN_COUNT: u64 = 5;
pub const DEFAULT_MIN_DF: u64 = 3;

pub fn candidate_pool(stats: &TermStats, min_count: u64, min_df: u64) -> Result<CandidatePool> {
    if min_count == 0 || min_df == 0 {
        return Err(Error::InvalidArgument(
            "min_count and min_df must be at least 1".into(),
        ));
    }
    let terms: BTreeSet<String> = stats
        .terms()
        .iter()
        .filter(|(_, c)| c.count >= min_count && c.df() >= min_df)
        .map(|(t, _)| t.clone())
        .collect();
    if terms.is_empty() {
        return Err(Error::EmptyPool { min_count, min_df });
    }
    Ok(CandidatePool {
        terms,
        min_count,
        min_df,
    })
}

#[derive(Serialize, Deserialize)]
struct DomainJson {
    label: String,
    documents: u64,
    tokens: u64,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    count: u64,
    df: u64,
    per_domain: BTreeMap<String, u64>,
    per_document: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct DocumentJson {
    id: String,
    domain: String,
}

#[derive(Serialize, Deserialize)]
struct TermStatsJson {
    schema_version: u32,
    lang: String,
    doc_count: u64,
    total_tokens: u64,
    domains: Vec<DomainJson>,
    documents: Vec<DocumentJson>,
    terms: BTreeMap<String, TermJson>,
    tokenizer: TokenizerConfig,
}

pub const TERM_STATS_SCHEMA_VERSION: u32 = 1;

impl Serialize for TermStats {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let domains = self
            .domains
            .iter()
            .enumerate()
            .map(|(i, g)| DomainJson {
                label: g.clone(),
                documents: self.domain_docs[i],
                tokens: self.domain_tokens[i],
            })
            .collect();
        let documents = self
            .doc_ids
            .iter()
            .zip(&self.doc_domain)
            .map(|(id, &g)| DocumentJson {
                id: id.clone(),
                domain: self.domains[g].clone(),
            })
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| {
                let per_domain = c
                    .per_domain
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .map(|(g, &n)| (self.domains[g].clone(), n))
                    .collect();
                let per_document = c
                    .per_doc
                    .iter()
                    .map(|(&d, &n)| (self.doc_ids[d as usize].clone(), n))
                    .collect();
                (
                    t.clone(),
                    TermJson {
                        count: c.count,
                        df: c.df(),
                        per_domain,
                        per_document,
                    },
                )
            })
            .collect();
        TermStatsJson {
            schema_version: TERM_STATS_SCHEMA_VERSION,
            lang: self.lang.clone(),
            doc_count: self.doc_count(),
            total_tokens: self.total_tokens,
            domains,
            documents,
            terms,
            tokenizer: self.tokenizer.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TermStats {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TermStatsJson::deserialize(d)?;
        let domain_index: HashMap<&str, usize> = raw
            .domains
            .iter()
            .enumerate()
            .map(|(i, g)| (g.label.as_str(), i))
            .collect();
        let doc_index: HashMap<&str, u32> = raw
            .documents
            .iter()
            .enumerate()
            .map(|(i, doc)| (doc.id.as_str(), i as u32))
            .collect();
        let lookup_domain = |g: &str| {
            domain_index
                .get(g)
                .copied()
                .ok_or_else(|| D::Error::custom(format!("unknown domain {g:?}")))
        };
        let mut doc_domain = Vec::with_capacity(raw.documents.len());
        for doc in &raw.documents {
            doc_domain.push(lookup_domain(&doc.domain)?);
        }
        let mut terms = BTreeMap::new();
        for (t, tj) in &raw.terms {
            let mut per_domain = vec![0; raw.domains.len()];
            for (g, &n) in &tj.per_domain {
                per_domain[lookup_domain(g)?] = n;
            }
            let mut per_doc = BTreeMap::new();
            for (id, &n) in &tj.per_document {
                let d = doc_index
                    .get(id.as_str())
                    .ok_or_else(|| D::Error::custom(format!("unknown document {id:?}")))?;
                per_doc.insert(*d, n);
            }
            terms.insert(
                t.clone(),
                TermCounts {
                    count: tj.count,
                    per_doc,
                    per_domain,
                },
            );
        }
        let stats = TermStats {
            lang: raw.lang,
            doc_ids: raw.documents.iter().map(|d| d.id.clone()).collect(),
            doc_domain,
            domain_docs: raw.domains.iter().map(|g| g.documents).collect(),
            domain_tokens: raw.domains.iter().map(|g| g.tokens).collect(),
            domains: raw.domains.into_iter().map(|g| g.label).collect(),
            total_tokens: raw.total_tokens,
            terms,
            tokenizer: raw.tokenizer,
        };
        stats
            .check_invariants()
            .map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(stats)
    }
}
