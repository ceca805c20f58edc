//! Review sheets for human evaluators and the quorum that turns their
//! decisions into a curated list.
//!
//! Sheets are TSV so they open in any spreadsheet:
//!
//! ```text
//! # run_id: <run id of the candidate list>
//! # lang: <language code>
//! term	fused_rank	metrics	contexts	decision	reviewer	note
//! ```
//!
//! Fields escape `\`, tab, CR and LF as `\\`, `\t`, `\r`, `\n`. Inside the
//! contexts field, snippets are joined by ` | ` and a literal `|` is `\|`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::list::{ProvenanceRecord, StopwordList};
use crate::corpus::Corpus;
use crate::metrics::Metric;
use crate::ranking::CandidateList;
use crate::scalar::Scalar;
use crate::tokenizer::tokenize;
use crate::{json, Error, Result};

pub const TSV_HEADER: &str = "term\tfused_rank\tmetrics\tcontexts\tdecision\treviewer\tnote";
pub const DEFAULT_CONTEXTS_PER_TERM: usize = 3;
/// Tokens shown on each side of the term in a snippet.
pub const KWIC_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
    Unsure,
    #[default]
    Blank,
}

impl Decision {
    pub const ALL: [Decision; 4] = [
        Decision::Accept,
        Decision::Reject,
        Decision::Unsure,
        Decision::Blank,
    ];

    fn as_field(self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
            Decision::Unsure => "unsure",
            Decision::Blank => "",
        }
    }
}

impl FromStr for Decision {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "accept" => Ok(Decision::Accept),
            "reject" => Ok(Decision::Reject),
            "unsure" => Ok(Decision::Unsure),
            "" | "blank" => Ok(Decision::Blank),
            other => Err(format!("unknown decision {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewRow {
    pub term: String,
    pub fused_rank: usize,
    /// metric → (rank, score)
    pub metrics: BTreeMap<Metric, (usize, f64)>,
    pub contexts: Vec<String>,
    pub decision: Decision,
    pub reviewer: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewSheet {
    pub run_id: String,
    pub lang: String,
    pub rows: Vec<ReviewRow>,
}

/// One blank row per candidate, in fused order, with KWIC snippets drawn from
/// the first occurrences in document order.
pub fn emit_review_sheet<S: Scalar>(
    candidates: &CandidateList<S>,
    corpus: &Corpus,
    contexts_per_term: usize,
) -> Result<ReviewSheet> {
    let cfg = &candidates.run_meta.tokenizer;
    let wanted: HashMap<&str, usize> = candidates
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.term.as_str(), i))
        .collect();
    let mut found = vec![false; wanted.len()];
    let mut contexts: Vec<Vec<String>> = vec![Vec::new(); wanted.len()];
    let mut open = wanted.len();

    'docs: for doc in corpus.documents() {
        let tokens = tokenize(&doc.text, cfg);
        for (pos, tok) in tokens.iter().enumerate() {
            let Some(&i) = wanted.get(tok.as_str()) else {
                continue;
            };
            let was_open = !found[i] || contexts[i].len() < contexts_per_term;
            found[i] = true;
            if contexts[i].len() < contexts_per_term {
                contexts[i].push(kwic(&tokens, pos));
            }
            if was_open && contexts[i].len() >= contexts_per_term {
                open -= 1;
                if open == 0 {
                    break 'docs;
                }
            }
        }
    }

    if let Some(i) = found.iter().position(|f| !f) {
        return Err(Error::StaleCandidate(candidates.entries[i].term.clone()));
    }

    let rows = candidates
        .entries
        .iter()
        .zip(contexts)
        .map(|(e, ctx)| ReviewRow {
            term: e.term.clone(),
            fused_rank: e.fused_rank,
            metrics: e
                .per_metric
                .iter()
                .map(|(&m, ev)| (m, (ev.rank, ev.score.to_f64_lossy())))
                .collect(),
            contexts: ctx,
            decision: Decision::Blank,
            reviewer: String::new(),
            note: String::new(),
        })
        .collect();
    Ok(ReviewSheet {
        run_id: candidates.run_id().to_string(),
        lang: candidates.lang.clone(),
        rows,
    })
}

fn kwic(tokens: &[String], pos: usize) -> String {
    let start = pos.saturating_sub(KWIC_WINDOW);
    let end = (pos + 1 + KWIC_WINDOW).min(tokens.len());
    let mut parts: Vec<String> = Vec::with_capacity(end - start);
    for (i, t) in tokens[start..end].iter().enumerate() {
        if start + i == pos {
            parts.push(format!("[{t}]"));
        } else {
            parts.push(t.clone());
        }
    }
    parts.join(" ")
}

fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape_field(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            // Left for the contexts splitter.
            Some('|') => out.push_str("\\|"),
            other => return Err(format!("bad escape \\{}", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

fn join_contexts(contexts: &[String]) -> String {
    contexts
        .iter()
        .map(|c| c.replace('\\', "\\\\").replace('|', "\\|"))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn split_contexts(field: &str) -> Vec<String> {
    if field.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = field.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                if let Some(n) = chars.next() {
                    cur.push(n);
                }
            }
            '|' => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out.into_iter()
        .map(|s| {
            let s = s.strip_prefix(' ').unwrap_or(&s);
            s.strip_suffix(' ').unwrap_or(s).to_string()
        })
        .collect()
}

fn format_metrics(m: &BTreeMap<Metric, (usize, f64)>) -> String {
    m.iter()
        .map(|(metric, (rank, score))| format!("{metric}={rank}:{}", json::format_f64(*score)))
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_metrics(s: &str) -> std::result::Result<BTreeMap<Metric, (usize, f64)>, String> {
    let mut out = BTreeMap::new();
    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
        let (name, rest) = part.split_once('=').ok_or("metric entry without '='")?;
        let (rank, score) = rest.split_once(':').ok_or("metric entry without ':'")?;
        let metric: Metric = name.trim().parse().map_err(|e: Error| e.to_string())?;
        let rank = rank.trim().parse().map_err(|_| format!("bad rank {rank:?}"))?;
        let score = score.trim().parse().map_err(|_| format!("bad score {score:?}"))?;
        out.insert(metric, (rank, score));
    }
    Ok(out)
}

impl ReviewSheet {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# run_id: {}\n# lang: {}\n{TSV_HEADER}\n", self.run_id, self.lang);
        for r in &self.rows {
            let fields = [
                escape_field(&r.term),
                r.fused_rank.to_string(),
                escape_field(&format_metrics(&r.metrics)),
                escape_field(&join_contexts(&r.contexts)),
                r.decision.as_field().to_string(),
                escape_field(&r.reviewer),
                escape_field(&r.note),
            ];
            out.push_str(&fields.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Parses a sheet; `name` is used in error messages.
    pub fn from_tsv(text: &str, name: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::ReviewSheet {
            source_name: name.to_string(),
            message: if line > 0 {
                format!("line {line}: {message}")
            } else {
                message
            },
        };
        let mut run_id = None;
        let mut lang = None;
        let mut header_seen = false;
        let mut rows = Vec::new();
        let mut seen_terms = BTreeSet::new();

        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if !header_seen {
                if let Some(meta) = line.strip_prefix('#') {
                    if let Some((k, v)) = meta.split_once(':') {
                        match k.trim() {
                            "run_id" => run_id = Some(v.trim().to_string()),
                            "lang" => lang = Some(v.trim().to_string()),
                            _ => {}
                        }
                    }
                    continue;
                }
                if line.trim().is_empty() {
                    continue;
                }
                if line.trim_end_matches('\t') != TSV_HEADER {
                    return Err(err(n, format!("expected header {TSV_HEADER:?}")));
                }
                header_seen = true;
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut fields: Vec<&str> = line.split('\t').collect();
            if fields.len() > 7 {
                return Err(err(n, format!("{} fields, expected 7", fields.len())));
            }
            // Spreadsheets drop trailing empty cells.
            fields.resize(7, "");
            let un = |s: &str| unescape_field(s).map_err(|m| err(n, m));
            let term = un(fields[0])?;
            if term.is_empty() {
                return Err(err(n, "empty term".into()));
            }
            if !seen_terms.insert(term.clone()) {
                return Err(err(n, format!("duplicate row for {term:?}")));
            }
            let fused_rank = fields[1]
                .trim()
                .parse()
                .map_err(|_| err(n, format!("bad fused_rank {:?}", fields[1])))?;
            let metrics = parse_metrics(&un(fields[2])?).map_err(|m| err(n, m))?;
            let contexts = split_contexts(&un(fields[3])?);
            let decision = fields[4].parse().map_err(|m| err(n, m))?;
            rows.push(ReviewRow {
                term,
                fused_rank,
                metrics,
                contexts,
                decision,
                reviewer: un(fields[5])?.trim().to_string(),
                note: un(fields[6])?,
            });
        }
        if !header_seen {
            return Err(err(0, "missing header row".into()));
        }
        Ok(ReviewSheet {
            run_id: run_id.ok_or_else(|| err(0, "missing '# run_id:' line".into()))?,
            lang: lang.ok_or_else(|| err(0, "missing '# lang:' line".into()))?,
            rows,
        })
    }
}

/// Decision counts for one term across all sheets.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub accept: usize,
    pub reject: usize,
    pub unsure: usize,
    pub blank: usize,
    pub accepted_by: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    Rejected,
    Unresolved,
}

/// How decisions are turned into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum QuorumRule {
    /// Accepts must strictly outnumber rejects, with at least one accept;
    /// rejects strictly outnumbering accepts reject; anything else is open.
    #[default]
    Majority,
    /// At least `min_accepts` accepts and no rejects.
    Unanimous { min_accepts: usize },
}

impl QuorumRule {
    pub fn verdict(&self, t: &Tally) -> Verdict {
        match *self {
            QuorumRule::Majority => {
                if t.accept > t.reject && t.accept >= 1 {
                    Verdict::Accepted
                } else if t.reject > t.accept {
                    Verdict::Rejected
                } else {
                    Verdict::Unresolved
                }
            }
            QuorumRule::Unanimous { min_accepts } => {
                if t.reject == 0 && t.accept >= min_accepts.max(1) {
                    Verdict::Accepted
                } else if t.reject > t.accept {
                    Verdict::Rejected
                } else {
                    Verdict::Unresolved
                }
            }
        }
    }
}

impl fmt::Display for QuorumRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuorumRule::Majority => f.write_str("majority"),
            QuorumRule::Unanimous { min_accepts } => write!(f, "unanimous(min_accepts={min_accepts})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewOutcome {
    pub run_id: String,
    pub accepted: StopwordList,
    pub rejected: BTreeSet<String>,
    pub unresolved: BTreeSet<String>,
    pub tallies: BTreeMap<String, Tally>,
}

pub fn apply_reviews(sheets: &[ReviewSheet], quorum: QuorumRule) -> Result<ReviewOutcome> {
    let first = sheets
        .first()
        .ok_or_else(|| Error::InvalidArgument("no review sheets".into()))?;
    let run_ids: BTreeSet<&str> = sheets.iter().map(|s| s.run_id.as_str()).collect();
    if run_ids.len() > 1 {
        return Err(Error::RunMismatch(run_ids.into_iter().map(String::from).collect()));
    }
    let langs: BTreeSet<&str> = sheets.iter().map(|s| s.lang.as_str()).collect();
    if langs.len() > 1 {
        return Err(Error::LanguageMismatch(langs.into_iter().map(String::from).collect()));
    }

    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    for (si, sheet) in sheets.iter().enumerate() {
        for row in &sheet.rows {
            let t = tallies.entry(row.term.clone()).or_default();
            if row.decision != Decision::Blank && row.reviewer.is_empty() {
                return Err(Error::ReviewSheet {
                    source_name: format!("sheet {}", si + 1),
                    message: format!("decision for {:?} has no reviewer", row.term),
                });
            }
            match row.decision {
                Decision::Accept => {
                    t.accept += 1;
                    t.accepted_by.insert(row.reviewer.clone());
                }
                Decision::Reject => t.reject += 1,
                Decision::Unsure => t.unsure += 1,
                Decision::Blank => t.blank += 1,
            }
        }
    }

    let mut accepted = StopwordList::new(first.lang.clone());
    let mut rejected = BTreeSet::new();
    let mut unresolved = BTreeSet::new();
    for (term, tally) in &tallies {
        match quorum.verdict(tally) {
            Verdict::Accepted => {
                let reviewers = tally.accepted_by.iter().cloned().collect();
                accepted.insert(term, ProvenanceRecord::extraction(first.run_id.clone(), reviewers))?;
            }
            Verdict::Rejected => {
                rejected.insert(term.clone());
            }
            Verdict::Unresolved => {
                unresolved.insert(term.clone());
            }
        }
    }
    Ok(ReviewOutcome {
        run_id: first.run_id.clone(),
        accepted,
        rejected,
        unresolved,
        tallies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::pipeline::{extract, ExtractConfig};

    fn sheet(run: &str, rows: &[(&str, Decision, &str)]) -> ReviewSheet {
        ReviewSheet {
            run_id: run.into(),
            lang: "ha".into(),
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, (t, d, r))| ReviewRow {
                    term: t.to_string(),
                    fused_rank: i + 1,
                    metrics: BTreeMap::new(),
                    contexts: vec![],
                    decision: *d,
                    reviewer: r.to_string(),
                    note: String::new(),
                })
                .collect(),
        }
    }

    fn fixture() -> (Corpus, CandidateList) {
        let texts = ["na son da kai", "na da shi", "kai na gida da"];
        let c = Corpus::new(
            "ha",
            texts
                .iter()
                .enumerate()
                .map(|(i, t)| Document::new(format!("d{i}"), *t, "ha", "news", "s"))
                .collect(),
        )
        .unwrap();
        let cfg = ExtractConfig {
            min_count: 2,
            min_df: 2,
            ..ExtractConfig::default()
        };
        let cl = extract(&c, &cfg).unwrap();
        (c, cl)
    }

    #[test]
    fn emit_blank_rows_in_order() {
        let (c, cl) = fixture();
        let s = emit_review_sheet(&cl, &c, 3).unwrap();
        assert_eq!(s.rows.len(), 3);
        let terms: Vec<_> = s.rows.iter().map(|r| r.term.as_str()).collect();
        assert_eq!(terms, cl.terms().collect::<Vec<_>>());
        assert!(s.rows.iter().all(|r| r.decision == Decision::Blank));
        assert_eq!(s.rows.iter().find(|r| r.term == "kai").unwrap().contexts.len(), 2);
    }

    #[test]
    fn emit_without_contexts() {
        let (c, cl) = fixture();
        let s = emit_review_sheet(&cl, &c, 0).unwrap();
        assert!(s.rows.iter().all(|r| r.contexts.is_empty()));
    }

    #[test]
    fn kwic_window() {
        let toks: Vec<String> = "a b c d e f g h i j k l m".split(' ').map(String::from).collect();
        assert_eq!(kwic(&toks, 6), "b c d e f [g] h i j k l");
        assert_eq!(kwic(&toks, 0), "[a] b c d e f");
    }

    #[test]
    fn stale_candidate() {
        let (_, cl) = fixture();
        let other = Corpus::new("ha", vec![Document::new("x", "na da", "ha", "news", "s")]).unwrap();
        match emit_review_sheet(&cl, &other, 1).unwrap_err() {
            Error::StaleCandidate(t) => assert_eq!(t, "kai"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn tsv_round_trip_with_awkward_text() {
        let (c, cl) = fixture();
        let mut s = emit_review_sheet(&cl, &c, 2).unwrap();
        s.rows[0].decision = Decision::Accept;
        s.rows[0].reviewer = "amina".into();
        s.rows[0].note = "tab\there, newline\nand \\ and | pipe".into();
        s.rows[1].contexts.push("x | y \\ z".into());
        let text = s.to_tsv();
        assert!(text.lines().nth(2) == Some(TSV_HEADER));
        assert_eq!(ReviewSheet::from_tsv(&text, "t").unwrap(), s);
    }

    #[test]
    fn tsv_errors() {
        assert!(ReviewSheet::from_tsv("# run_id: r\n# lang: ha\nbad header\n", "t").is_err());
        let no_run = format!("# lang: ha\n{TSV_HEADER}\n");
        assert!(ReviewSheet::from_tsv(&no_run, "t").is_err());
        let bad_decision = format!("# run_id: r\n# lang: ha\n{TSV_HEADER}\nna\t1\t\t\tmaybe\tx\t\n");
        let e = ReviewSheet::from_tsv(&bad_decision, "t").unwrap_err();
        assert!(e.to_string().contains("line 4"), "{e}");
        let short = format!("# run_id: r\n# lang: ha\n{TSV_HEADER}\nna\t1\t\t\taccept\tx\n");
        assert_eq!(ReviewSheet::from_tsv(&short, "t").unwrap().rows[0].decision, Decision::Accept);
    }

    #[test]
    fn single_accept() {
        let o = apply_reviews(&[sheet("r", &[("na", Decision::Accept, "a")])], QuorumRule::Majority).unwrap();
        assert!(o.accepted.contains("na"));
        assert_eq!(o.accepted.provenance("na")[0].reviewed_by, ["a"]);
        assert_eq!(o.accepted.provenance("na")[0].reference, "r");
    }

    #[test]
    fn split_vote_unresolved() {
        let o = apply_reviews(
            &[
                sheet("r", &[("na", Decision::Accept, "a")]),
                sheet("r", &[("na", Decision::Reject, "b")]),
            ],
            QuorumRule::Majority,
        )
        .unwrap();
        assert!(o.unresolved.contains("na"));
    }

    #[test]
    fn two_of_three() {
        let o = apply_reviews(
            &[
                sheet("r", &[("na", Decision::Accept, "a")]),
                sheet("r", &[("na", Decision::Accept, "b")]),
                sheet("r", &[("na", Decision::Reject, "c")]),
            ],
            QuorumRule::Majority,
        )
        .unwrap();
        assert_eq!(o.accepted.provenance("na")[0].reviewed_by, ["a", "b"]);
    }

    #[test]
    fn mismatched_runs() {
        let e = apply_reviews(
            &[sheet("r1", &[("na", Decision::Accept, "a")]), sheet("r2", &[])],
            QuorumRule::Majority,
        )
        .unwrap_err();
        assert!(matches!(e, Error::RunMismatch(_)));
    }

    #[test]
    fn decision_needs_reviewer() {
        let e = apply_reviews(&[sheet("r", &[("na", Decision::Reject, "")])], QuorumRule::Majority);
        assert!(e.is_err());
    }

    #[test]
    fn unanimous_rule() {
        let rule = QuorumRule::Unanimous { min_accepts: 2 };
        let mut t = Tally {
            accept: 2,
            ..Tally::default()
        };
        assert_eq!(rule.verdict(&t), Verdict::Accepted);
        t.reject = 1;
        assert_eq!(rule.verdict(&t), Verdict::Unresolved);
        t.accept = 1;
        assert_eq!(rule.verdict(&t), Verdict::Unresolved);
        t.reject = 2;
        assert_eq!(rule.verdict(&t), Verdict::Rejected);
    }
}
