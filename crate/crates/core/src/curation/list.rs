use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::corpus::read_utf8;
use crate::{json, Error, Result};

pub const LIST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProvenanceKind {
    SeedSource,
    Extraction,
}

/// Where a curated word came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub kind: ProvenanceKind,
    /// Citation key for seed sources, run id for extractions.
    #[serde(rename = "ref")]
    pub reference: String,
    pub reviewed_by: Vec<String>,
}

impl ProvenanceRecord {
    pub fn seed(source_key: impl Into<String>) -> Self {
        ProvenanceRecord {
            kind: ProvenanceKind::SeedSource,
            reference: source_key.into(),
            reviewed_by: Vec::new(),
        }
    }

    pub fn extraction(run_id: impl Into<String>, reviewers: Vec<String>) -> Self {
        ProvenanceRecord {
            kind: ProvenanceKind::Extraction,
            reference: run_id.into(),
            reviewed_by: reviewers,
        }
    }
}

/// A curated per-language word set. Every word is NFC and has at least one
/// provenance record.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StopwordList {
    lang: String,
    words: BTreeSet<String>,
    provenance: BTreeMap<String, Vec<ProvenanceRecord>>,
}

impl StopwordList {
    pub fn new(lang: impl Into<String>) -> Self {
        StopwordList {
            lang: lang.into(),
            ..Default::default()
        }
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn words(&self) -> &BTreeSet<String> {
        &self.words
    }

    pub fn provenance(&self, word: &str) -> &[ProvenanceRecord] {
        self.provenance.get(word).map_or(&[], Vec::as_slice)
    }

    pub fn provenance_map(&self) -> &BTreeMap<String, Vec<ProvenanceRecord>> {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    /// Adds `word` (NFC-normalized) with `record`. Returns false if the word
    /// was already present; the record is still attached unless identical.
    pub fn insert(&mut self, word: &str, record: ProvenanceRecord) -> Result<bool> {
        let word = normalize_word(word)?;
        if record.kind == ProvenanceKind::Extraction && record.reviewed_by.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "extraction record for {word:?} has no reviewer"
            )));
        }
        let records = self.provenance.entry(word.clone()).or_default();
        if !records.contains(&record) {
            records.push(record);
        }
        Ok(self.words.insert(word))
    }

    /// One word per line, codepoint order, LF endings.
    pub fn to_txt(&self) -> String {
        let mut out = String::new();
        for w in &self.words {
            out.push_str(w);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_canonical_string(&ListJson::from(self))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: ListJson = serde_json::from_str(s)?;
        let mut list = StopwordList::new(raw.lang);
        for w in &raw.words {
            let records = raw.provenance.get(w).cloned().unwrap_or_default();
            if records.is_empty() {
                return Err(Error::InvalidArgument(format!("word {w:?} has no provenance")));
            }
            for r in records {
                list.insert(w, r)?;
            }
        }
        Ok(list)
    }

    pub(crate) fn from_parts(
        lang: String,
        provenance: BTreeMap<String, Vec<ProvenanceRecord>>,
    ) -> Result<Self> {
        let mut list = StopwordList::new(lang);
        for (w, records) in provenance {
            if records.is_empty() {
                return Err(Error::InvalidArgument(format!("word {w:?} has no provenance")));
            }
            for r in records {
                list.insert(&w, r)?;
            }
        }
        Ok(list)
    }
}

#[derive(Serialize, Deserialize)]
struct ListMeta {
    word_count: usize,
    word_form: String,
}

#[derive(Serialize, Deserialize)]
struct ListJson {
    schema_version: u32,
    lang: String,
    words: Vec<String>,
    provenance: BTreeMap<String, Vec<ProvenanceRecord>>,
    meta: ListMeta,
}

impl From<&StopwordList> for ListJson {
    fn from(l: &StopwordList) -> Self {
        ListJson {
            schema_version: LIST_SCHEMA_VERSION,
            lang: l.lang.clone(),
            words: l.words.iter().cloned().collect(),
            provenance: l.provenance.clone(),
            meta: ListMeta {
                word_count: l.words.len(),
                word_form: crate::pipeline::WORD_FORM.to_string(),
            },
        }
    }
}

/// NFC form of a list entry; rejects anything a line-based file cannot hold.
pub fn normalize_word(word: &str) -> Result<String> {
    let w: String = word.trim().nfc().collect();
    if w.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    if w.starts_with('#') || w.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(Error::InvalidArgument(format!(
            "{w:?} cannot be stored in a one-word-per-line file"
        )));
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LoadReport {
    pub lines: usize,
    pub comments: usize,
    pub blank: usize,
    pub duplicates: usize,
    pub words: usize,
}

/// Reads a one-word-per-line list; `#` lines and blank lines are skipped.
pub fn load_list(
    path: impl AsRef<Path>,
    lang: &str,
    source_key: &str,
) -> Result<(StopwordList, LoadReport)> {
    let path = path.as_ref();
    let text = read_utf8(path)?;
    let (list, report) = parse_list(&text, lang, source_key).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if list.is_empty() {
        return Err(Error::EmptyList(path.display().to_string()));
    }
    Ok((list, report))
}

pub fn parse_list(text: &str, lang: &str, source_key: &str) -> Result<(StopwordList, LoadReport)> {
    let mut list = StopwordList::new(lang);
    let mut report = LoadReport::default();
    for line in text.lines() {
        report.lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            report.blank += 1;
        } else if trimmed.starts_with('#') {
            report.comments += 1;
        } else if !list.insert(trimmed, ProvenanceRecord::seed(source_key))? {
            report.duplicates += 1;
        }
    }
    report.words = list.len();
    Ok((list, report))
}

fn check_same_lang<'a>(lists: impl Iterator<Item = &'a StopwordList>) -> Result<String> {
    let langs: BTreeSet<&str> = lists.map(|l| l.lang.as_str()).collect();
    match langs.len() {
        0 => Err(Error::InvalidArgument("no lists given".into())),
        1 => Ok(langs.into_iter().next().unwrap_or_default().to_string()),
        _ => Err(Error::LanguageMismatch(langs.into_iter().map(String::from).collect())),
    }
}

/// Union of words; provenance concatenated per word with duplicates removed.
pub fn merge_lists(lists: &[StopwordList]) -> Result<StopwordList> {
    let lang = check_same_lang(lists.iter())?;
    let mut out = StopwordList::new(lang);
    for l in lists {
        for (w, records) in &l.provenance {
            for r in records {
                out.insert(w, r.clone())?;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ListDiff {
    pub only_a: BTreeSet<String>,
    pub only_b: BTreeSet<String>,
    pub both: BTreeSet<String>,
}

pub fn diff_lists(a: &StopwordList, b: &StopwordList) -> Result<ListDiff> {
    check_same_lang([a, b].into_iter())?;
    Ok(ListDiff {
        only_a: a.words.difference(&b.words).cloned().collect(),
        only_b: b.words.difference(&a.words).cloned().collect(),
        both: a.words.intersection(&b.words).cloned().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn list(lang: &str, key: &str, words: &[&str]) -> StopwordList {
        let mut l = StopwordList::new(lang);
        for w in words {
            l.insert(w, ProvenanceRecord::seed(key)).unwrap();
        }
        l
    }

    #[test]
    fn load_with_comments_and_duplicates() {
        let (l, report) = parse_list("na\n#comment\n\nda\nna\n", "ha", "tatman").unwrap();
        assert_eq!(l.words().iter().collect::<Vec<_>>(), ["da", "na"]);
        assert_eq!(report.duplicates, 1);
        assert_eq!(report.comments, 1);
        assert_eq!(report.blank, 1);
        assert_eq!(l.provenance("na"), [ProvenanceRecord::seed("tatman")]);
    }

    #[test]
    fn load_normalizes_to_nfc() {
        let (l, _) = parse_list("n\u{0301}la\u{0301}\n", "yo", "k").unwrap();
        assert!(l.contains("ńlá"));
    }

    #[test]
    fn load_empty_file_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.txt");
        std::fs::write(&p, "# only comments\n\n").unwrap();
        assert!(matches!(load_list(&p, "yo", "k"), Err(Error::EmptyList(_))));
    }

    #[test]
    fn txt_export_sorted_lf() {
        assert_eq!(list("ha", "k", &["na", "da"]).to_txt(), "da\nna\n");
    }

    #[test]
    fn merge_unions_provenance() {
        let m = merge_lists(&[list("ha", "x", &["a", "b"]), list("ha", "y", &["b", "c"])]).unwrap();
        assert_eq!(m.words().iter().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(m.provenance("b"), [ProvenanceRecord::seed("x"), ProvenanceRecord::seed("y")]);
        let l = list("ha", "x", &["a", "b"]);
        assert_eq!(merge_lists(&[l.clone(), l.clone()]).unwrap(), l);
    }

    #[test]
    fn mixed_languages_rejected() {
        let a = list("ha", "x", &["a"]);
        let b = list("yo", "x", &["a"]);
        assert!(matches!(merge_lists(&[a.clone(), b.clone()]), Err(Error::LanguageMismatch(_))));
        assert!(matches!(diff_lists(&a, &b), Err(Error::LanguageMismatch(_))));
    }

    #[test]
    fn diff_partition() {
        let d = diff_lists(&list("ha", "k", &["x", "y"]), &list("ha", "k", &["y", "z"])).unwrap();
        assert_eq!(d.only_a, BTreeSet::from(["x".to_string()]));
        assert_eq!(d.only_b, BTreeSet::from(["z".to_string()]));
        assert_eq!(d.both, BTreeSet::from(["y".to_string()]));
        let l = list("ha", "k", &["x", "y"]);
        let same = diff_lists(&l, &l).unwrap();
        assert!(same.only_a.is_empty() && same.only_b.is_empty());
    }

    #[test]
    fn unreviewed_extraction_rejected() {
        let mut l = StopwordList::new("ha");
        assert!(l.insert("na", ProvenanceRecord::extraction("run", vec![])).is_err());
    }

    #[test]
    fn unstorable_words_rejected() {
        let mut l = StopwordList::new("ha");
        assert!(l.insert("#x", ProvenanceRecord::seed("k")).is_err());
        assert!(l.insert("a b", ProvenanceRecord::seed("k")).is_err());
        assert!(l.insert("  ", ProvenanceRecord::seed("k")).is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut l = list("ha", "tatman", &["ʼyan", "da"]);
        l.insert("da", ProvenanceRecord::extraction("r1", vec!["amina".into()])).unwrap();
        assert_eq!(StopwordList::from_json(&l.to_json().unwrap()).unwrap(), l);
    }

    fn arb_list() -> impl Strategy<Value = StopwordList> {
        (
            prop::collection::btree_set("[a-fɓɗƙ]{1,3}", 0..12),
            prop::sample::select(vec!["k1", "k2", "k3"]),
        )
            .prop_map(|(ws, key)| {
                let ws: Vec<&str> = ws.iter().map(String::as_str).collect();
                list("ha", key, &ws)
            })
    }

    proptest! {
        #[test]
        fn merge_laws(a in arb_list(), b in arb_list(), c in arb_list()) {
            let ab = merge_lists(&[a.clone(), b.clone()]).unwrap();
            let ba = merge_lists(&[b.clone(), a.clone()]).unwrap();
            prop_assert_eq!(ab.words(), ba.words());
            let left = merge_lists(&[ab.clone(), c.clone()]).unwrap();
            let right = merge_lists(&[a.clone(), merge_lists(&[b.clone(), c.clone()]).unwrap()]).unwrap();
            prop_assert_eq!(left.words(), right.words());
            prop_assert_eq!(merge_lists(&[a.clone(), a.clone()]).unwrap(), a.clone());
            let expected: BTreeSet<String> = a.words().union(b.words()).cloned().collect();
            prop_assert_eq!(ab.words(), &expected);
        }

        #[test]
        fn diff_is_a_partition(a in arb_list(), b in arb_list()) {
            let d = diff_lists(&a, &b).unwrap();
            let mut all = d.only_a.clone();
            all.extend(d.only_b.iter().cloned());
            all.extend(d.both.iter().cloned());
            let union: BTreeSet<String> = a.words().union(b.words()).cloned().collect();
            prop_assert_eq!(all, union);
            prop_assert!(d.only_a.is_disjoint(&d.both) && d.only_b.is_disjoint(&d.both));
            prop_assert!(d.only_a.is_disjoint(&d.only_b));
        }

        #[test]
        fn txt_round_trip(a in arb_list()) {
            prop_assume!(!a.is_empty());
            let (back, _) = parse_list(&a.to_txt(), "ha", "again").unwrap();
            prop_assert_eq!(back.words(), a.words());
        }
    }
}
