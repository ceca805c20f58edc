//! Loading monolingual documents into a [`Corpus`].
//!
//! Two input layouts are supported: one plain UTF-8 file per document, and
//! line-delimited JSON with a caller-supplied field mapping. Corpora are also
//! written to and read back from a canonical JSONL file by the CLI.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Component, Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{json, Error, Result};

/// One text unit with its language, domain label and origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub lang: String,
    pub domain: String,
    pub source: String,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        lang: impl Into<String>,
        domain: impl Into<String>,
        source: impl Into<String>,
    ) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            lang: lang.into(),
            domain: domain.into(),
            source: source.into(),
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(Error::InvalidDocument {
                id: self.id.clone(),
                reason: reason.to_string(),
            })
        };
        if self.id.is_empty() {
            return fail("empty id");
        }
        if self.text.trim().is_empty() {
            return fail("empty text");
        }
        if self.lang.is_empty() {
            return fail("empty language code");
        }
        Ok(())
    }
}

/// A nonempty, single-language, ordered document collection.
///
/// Immutable once built; every constructor goes through [`Corpus::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    lang: String,
    documents: Vec<Document>,
    domains: BTreeSet<String>,
}

impl Corpus {
    pub fn new(lang: impl Into<String>, documents: Vec<Document>) -> Result<Self> {
        let lang = lang.into();
        if lang.is_empty() {
            return Err(Error::InvalidCorpus("empty language code".into()));
        }
        if documents.is_empty() {
            return Err(Error::InvalidCorpus("no documents".into()));
        }
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            doc.validate()?;
            if doc.lang != lang {
                return Err(Error::InvalidDocument {
                    id: doc.id.clone(),
                    reason: format!("language {:?} differs from corpus language {lang:?}", doc.lang),
                });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::InvalidDocument {
                    id: doc.id.clone(),
                    reason: "duplicate id".into(),
                });
            }
        }
        let domains = documents.iter().map(|d| d.domain.clone()).collect();
        Ok(Corpus {
            lang,
            documents,
            domains,
        })
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Distinct domain labels in sorted order.
    pub fn domains(&self) -> &BTreeSet<String> {
        &self.domains
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Canonical JSONL encoding, one document per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for doc in &self.documents {
            out.push_str(&json::to_canonical_line(doc)?);
            out.push('\n');
        }
        Ok(out)
    }

    /// Reads back a file produced by [`Corpus::to_jsonl`].
    pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = read_utf8(path)?;
        let mut docs = Vec::new();
        for (i, line) in raw.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(line).map_err(|e| Error::Line {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            docs.push(doc);
        }
        let lang = docs
            .first()
            .map(|d| d.lang.clone())
            .ok_or_else(|| Error::InvalidCorpus(format!("{}: no documents", path.display())))?;
        Corpus::new(lang, docs)
    }

    /// SHA-256 over the canonical encoding, hex encoded.
    pub fn fingerprint(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_jsonl()?.as_bytes())))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub doc_count: usize,
    pub domain_histogram: BTreeMap<String, usize>,
    pub total_bytes: usize,
}

pub fn corpus_summary(corpus: &Corpus) -> CorpusSummary {
    let mut domain_histogram = BTreeMap::new();
    for doc in corpus.documents() {
        *domain_histogram.entry(doc.domain.clone()).or_insert(0) += 1;
    }
    CorpusSummary {
        doc_count: corpus.len(),
        domain_histogram,
        total_bytes: corpus.documents().iter().map(|d| d.text.len()).sum(),
    }
}

/// Ingests one document per file. Patterns are resolved against the current
/// working directory.
pub fn ingest_plaintext<P: AsRef<str>>(patterns: &[P], lang: &str, domain: &str) -> Result<Corpus> {
    let cwd = std::env::current_dir().map_err(|e| Error::io(".", e))?;
    ingest_plaintext_in(&cwd, patterns, lang, domain)
}

/// Like [`ingest_plaintext`], with relative patterns and document ids
/// resolved against `base`.
pub fn ingest_plaintext_in<P: AsRef<str>>(
    base: &Path,
    patterns: &[P],
    lang: &str,
    domain: &str,
) -> Result<Corpus> {
    let paths = resolve_patterns(base, patterns)?;
    let docs: Vec<Result<Document>> = paths
        .par_iter()
        .map(|path| {
            let text = read_utf8(path)?;
            let rel = relative_id(base, path);
            Ok(Document::new(rel.clone(), text, lang, domain, rel))
        })
        .collect();
    let docs = docs.into_iter().collect::<Result<Vec<_>>>()?;
    Corpus::new(lang, docs)
}

/// Which JSON keys hold the document fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMap {
    pub text: String,
    pub id: Option<String>,
    pub domain: Option<String>,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            text: "text".into(),
            id: Some("id".into()),
            domain: Some("domain".into()),
        }
    }
}

pub fn ingest_jsonl(
    path: impl AsRef<Path>,
    fields: &FieldMap,
    lang: &str,
    default_domain: &str,
) -> Result<Corpus> {
    let path = path.as_ref();
    let raw = read_utf8(path)?;
    let source = path.to_string_lossy().replace('\\', "/");
    let line_err = |line: usize, message: String| Error::Line {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut docs = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| line_err(n, format!("malformed JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| line_err(n, "not a JSON object".into()))?;
        let text = match obj.get(&fields.text) {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(_) => return Err(line_err(n, format!("field {:?} is not a string", fields.text))),
            None => return Err(line_err(n, format!("missing text field {:?}", fields.text))),
        };
        let id = match fields.id.as_ref().and_then(|k| obj.get(k)) {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(serde_json::Value::Number(x)) => x.to_string(),
            Some(_) => return Err(line_err(n, "id field is not a string or number".into())),
            None => format!("line-{n}"),
        };
        let domain = match fields.domain.as_ref().and_then(|k| obj.get(k)) {
            Some(serde_json::Value::String(s)) => s.clone(),
            Some(_) => return Err(line_err(n, "domain field is not a string".into())),
            None => default_domain.to_string(),
        };
        let doc = Document::new(id, text, lang, domain, format!("{source}:{n}"));
        doc.validate().map_err(|e| line_err(n, e.to_string()))?;
        docs.push(doc);
    }
    if docs.is_empty() {
        return Err(Error::EmptyInput {
            patterns: vec![path.display().to_string()],
        });
    }
    Corpus::new(lang, docs)
}

fn resolve_patterns<P: AsRef<str>>(base: &Path, patterns: &[P]) -> Result<Vec<PathBuf>> {
    let all: Vec<String> = patterns.iter().map(|p| p.as_ref().to_string()).collect();
    if all.is_empty() {
        return Err(Error::EmptyInput { patterns: all });
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for pattern in &all {
        let full = if Path::new(pattern).is_absolute() {
            pattern.clone()
        } else {
            format!(
                "{}/{}",
                glob::Pattern::escape(&base.to_string_lossy()),
                pattern
            )
        };
        let matches = glob::glob(&full).map_err(|e| Error::Pattern {
            path: pattern.clone(),
            message: e.to_string(),
        })?;
        let mut any = false;
        for entry in matches {
            let path = entry.map_err(|e| {
                let p = e.path().to_path_buf();
                Error::io(p, e.into())
            })?;
            if path.is_dir() {
                continue;
            }
            any = true;
            if seen.insert(path.clone()) {
                out.push(path);
            }
        }
        if !any {
            // A literal path that does not exist is reported as unreadable.
            let literal = base.join(pattern);
            if !glob_chars(pattern) {
                return Err(Error::io(
                    literal,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                ));
            }
            return Err(Error::EmptyInput {
                patterns: vec![pattern.clone()],
            });
        }
    }
    Ok(out)
}

fn glob_chars(s: &str) -> bool {
    s.contains(['*', '?', '['])
}

fn relative_id(base: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(base).unwrap_or(path);
    let parts: Vec<String> = rel
        .components()
        .filter_map(|c| match c {
            Component::Normal(s) => Some(s.to_string_lossy().into_owned()),
            Component::ParentDir => Some("..".into()),
            Component::RootDir => Some(String::new()),
            Component::CurDir | Component::Prefix(_) => None,
        })
        .collect();
    parts.join("/")
}

pub(crate) fn read_utf8(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| Error::Utf8 {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, bytes: &[u8]) {
        let p = dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).unwrap();
        }
        fs::write(p, bytes).unwrap();
    }

    #[test]
    fn plaintext_two_files() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.txt", "bàtà dé".as_bytes());
        write(dir.path(), "b.txt", "ilé ńlá".as_bytes());
        let c = ingest_plaintext_in(dir.path(), &["*.txt"], "yo", "news").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.documents()[0].id, "a.txt");
        assert_eq!(c.documents()[1].text, "ilé ńlá");
        assert_eq!(c.domains().iter().collect::<Vec<_>>(), ["news"]);
        assert_eq!(c.documents()[0].source, "a.txt");
    }

    #[test]
    fn nested_ids_use_forward_slashes() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "sub/deep/x.txt", b"word");
        let c = ingest_plaintext_in(dir.path(), &["sub/*/*.txt"], "yo", "news").unwrap();
        assert_eq!(c.documents()[0].id, "sub/deep/x.txt");
    }

    #[test]
    fn zero_matches_is_empty_input() {
        let dir = tempfile::tempdir().unwrap();
        let err = ingest_plaintext_in(dir.path(), &["*.txt"], "yo", "news").unwrap_err();
        assert!(matches!(err, Error::EmptyInput { .. }), "{err}");
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "bad.txt", &[0xFF, b'a']);
        write(dir.path(), "late.txt", &[b'a', b'b', b'c', 0xC3]);
        match ingest_plaintext_in(dir.path(), &["bad.txt"], "yo", "news").unwrap_err() {
            Error::Utf8 { path, offset } => {
                assert!(path.ends_with("bad.txt"));
                assert_eq!(offset, 0);
            }
            e => panic!("unexpected {e}"),
        }
        match ingest_plaintext_in(dir.path(), &["late.txt"], "yo", "news").unwrap_err() {
            Error::Utf8 { offset, .. } => assert_eq!(offset, 3),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "e.txt", b"  \n ");
        let err = ingest_plaintext_in(dir.path(), &["e.txt"], "yo", "news").unwrap_err();
        assert!(matches!(err, Error::InvalidDocument { .. }));
    }

    #[test]
    fn missing_literal_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = ingest_plaintext_in(dir.path(), &["nope.txt"], "yo", "news").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert!(err.to_string().contains("nope.txt"));
    }

    #[test]
    fn jsonl_mapping_and_defaults() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "c.jsonl",
            br#"{"body":"one two","topic":"news"}
{"body":"three","topic":"chat","key":"k2"}
{"body":"four"}
"#,
        );
        let fields = FieldMap {
            text: "body".into(),
            id: Some("key".into()),
            domain: Some("topic".into()),
        };
        let c = ingest_jsonl(dir.path().join("c.jsonl"), &fields, "ha", "misc").unwrap();
        assert_eq!(c.len(), 3);
        let ids: Vec<_> = c.documents().iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["line-1", "k2", "line-3"]);
        let domains: Vec<_> = c.domains().iter().map(String::as_str).collect();
        assert_eq!(domains, ["chat", "misc", "news"]);
    }

    #[test]
    fn jsonl_errors_cite_line() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.jsonl", b"{\"text\":\"a\"}\n{oops\n{\"text\":\"c\"}\n");
        write(dir.path(), "n.jsonl", b"{\"text\":\"a\"}\n{\"text\":\"b\"}\n{\"other\":1}\n");
        let fields = FieldMap::default();
        match ingest_jsonl(dir.path().join("m.jsonl"), &fields, "yo", "d").unwrap_err() {
            Error::Line { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        match ingest_jsonl(dir.path().join("n.jsonl"), &fields, "yo", "d").unwrap_err() {
            Error::Line { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("text"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn summary_histogram() {
        let docs = (0..5)
            .map(|i| Document::new(format!("d{i}"), "x", "yo", if i < 3 { "a" } else { "b" }, "s"))
            .collect();
        let c = Corpus::new("yo", docs).unwrap();
        let s = corpus_summary(&c);
        assert_eq!(s.doc_count, 5);
        assert_eq!(s.domain_histogram, BTreeMap::from([("a".into(), 3), ("b".into(), 2)]));
        assert_eq!(s.total_bytes, 5);
    }

    #[test]
    fn corpus_invariants_enforced() {
        assert!(Corpus::new("yo", vec![]).is_err());
        let d = Document::new("x", "t", "yo", "g", "s");
        assert!(Corpus::new("yo", vec![d.clone(), d.clone()]).is_err());
        assert!(Corpus::new("ha", vec![d]).is_err());
    }

    #[test]
    fn jsonl_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = Corpus::new(
            "yo",
            vec![
                Document::new("a", "ọmọ \"x\"", "yo", "news", "/s/a"),
                Document::new("b", "line\nbreak", "yo", "bible", "/s/b"),
            ],
        )
        .unwrap();
        let p = dir.path().join("c.jsonl");
        fs::write(&p, c.to_jsonl().unwrap()).unwrap();
        assert_eq!(Corpus::read_jsonl(&p).unwrap(), c);
    }
}
