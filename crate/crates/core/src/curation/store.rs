//! On-disk curated store: one directory per language holding `words.txt`,
//! `provenance.json` and `meta.json`.
//!
//! Writers take a lock file and must name the version they read; a save
//! against a stale version fails instead of overwriting newer work.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::list::{ProvenanceKind, ProvenanceRecord, StopwordList};
use crate::{json, Error, Result};

const WORDS: &str = "words.txt";
const PROVENANCE: &str = "provenance.json";
const META: &str = "meta.json";
const LOCK: &str = ".lock";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreMeta {
    pub lang: String,
    pub version: u64,
    pub counts: StoreCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StoreCounts {
    pub words: usize,
    pub seed_source: usize,
    pub extraction: usize,
}

#[derive(Debug, Clone)]
pub struct CuratedStore {
    root: PathBuf,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl CuratedStore {
    pub fn open(root: impl Into<PathBuf>) -> Self {
        CuratedStore { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn dir(&self, lang: &str) -> Result<PathBuf> {
        if lang.is_empty() || lang.contains(['/', '\\']) || lang.starts_with('.') {
            return Err(Error::InvalidArgument(format!("bad language code {lang:?}")));
        }
        Ok(self.root.join(lang))
    }

    /// Languages with a stored list, sorted.
    pub fn languages(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        let entries = match fs::read_dir(&self.root) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(Error::io(&self.root, e)),
        };
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.root, e))?;
            if entry.path().join(META).is_file() {
                out.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        out.sort();
        Ok(out)
    }

    /// Current version, 0 if nothing is stored for `lang`.
    pub fn version(&self, lang: &str) -> Result<u64> {
        Ok(self.meta(lang)?.map_or(0, |m| m.version))
    }

    pub fn meta(&self, lang: &str) -> Result<Option<StoreMeta>> {
        let path = self.dir(lang)?.join(META);
        match fs::read_to_string(&path) {
            Ok(s) => Ok(Some(serde_json::from_str(&s)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// The stored list and its version, if any.
    pub fn load(&self, lang: &str) -> Result<Option<(StopwordList, u64)>> {
        let Some(meta) = self.meta(lang)? else {
            return Ok(None);
        };
        let path = self.dir(lang)?.join(PROVENANCE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let provenance: BTreeMap<String, Vec<ProvenanceRecord>> = serde_json::from_str(&text)?;
        let list = StopwordList::from_parts(lang.to_string(), provenance)?;
        if list.len() != meta.counts.words {
            return Err(Error::Consistency(format!(
                "{}: meta says {} words, provenance has {}",
                path.display(),
                meta.counts.words,
                list.len()
            )));
        }
        Ok(Some((list, meta.version)))
    }

    /// Replaces the stored list. `expected_version` is the version the caller
    /// read (0 for a new language). Returns the new version.
    pub fn save(&self, list: &StopwordList, expected_version: u64) -> Result<u64> {
        let lang = list.lang();
        let dir = self.dir(lang)?;
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let lock_path = dir.join(LOCK);
        let _guard = match OpenOptions::new().write(true).create_new(true).open(&lock_path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                LockGuard(lock_path)
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                return Err(Error::StoreLocked(lang.to_string()))
            }
            Err(e) => return Err(Error::io(lock_path, e)),
        };

        let found = self.version(lang)?;
        if found != expected_version {
            return Err(Error::VersionConflict {
                lang: lang.to_string(),
                expected: expected_version,
                found,
            });
        }

        let mut counts = StoreCounts {
            words: list.len(),
            ..StoreCounts::default()
        };
        for records in list.provenance_map().values() {
            for r in records {
                match r.kind {
                    ProvenanceKind::SeedSource => counts.seed_source += 1,
                    ProvenanceKind::Extraction => counts.extraction += 1,
                }
            }
        }
        let meta = StoreMeta {
            lang: lang.to_string(),
            version: found + 1,
            counts,
        };
        write_atomic(&dir.join(WORDS), &list.to_txt())?;
        write_atomic(&dir.join(PROVENANCE), &json::to_canonical_string(list.provenance_map())?)?;
        // meta.json last: its version bump publishes the new files.
        write_atomic(&dir.join(META), &json::to_canonical_string(&meta)?)?;
        Ok(meta.version)
    }

    /// Loads the current list (or an empty one), merges `additions` into it
    /// and saves against the version that was read.
    pub fn merge_into(&self, additions: &StopwordList) -> Result<(StopwordList, u64)> {
        let (current, version) = self
            .load(additions.lang())?
            .unwrap_or_else(|| (StopwordList::new(additions.lang()), 0));
        let merged = super::list::merge_lists(&[current, additions.clone()])?;
        let v = self.save(&merged, version)?;
        Ok((merged, v))
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(words: &[&str]) -> StopwordList {
        let mut l = StopwordList::new("yo");
        for w in words {
            l.insert(w, ProvenanceRecord::seed("tatman")).unwrap();
        }
        l
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = CuratedStore::open(dir.path());
        assert!(store.load("yo").unwrap().is_none());
        let l = list(&["ni", "àti", "ọ̀"]);
        assert_eq!(store.save(&l, 0).unwrap(), 1);
        let (back, v) = store.load("yo").unwrap().unwrap();
        assert_eq!(back, l);
        assert_eq!(v, 1);
        assert_eq!(store.languages().unwrap(), ["yo"]);
        let words = fs::read_to_string(dir.path().join("yo/words.txt")).unwrap();
        assert_eq!(words, l.to_txt());
        let meta = store.meta("yo").unwrap().unwrap();
        assert_eq!(meta.counts.words, 3);
        assert_eq!(meta.counts.seed_source, 3);
    }

    #[test]
    fn stale_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = CuratedStore::open(dir.path());
        store.save(&list(&["ni"]), 0).unwrap();
        store.save(&list(&["ni", "ti"]), 1).unwrap();
        let e = store.save(&list(&["x"]), 1).unwrap_err();
        assert!(matches!(e, Error::VersionConflict { expected: 1, found: 2, .. }));
        assert_eq!(store.load("yo").unwrap().unwrap().0.len(), 2);
    }

    #[test]
    fn held_lock_blocks_writers() {
        let dir = tempfile::tempdir().unwrap();
        let store = CuratedStore::open(dir.path());
        fs::create_dir_all(dir.path().join("yo")).unwrap();
        fs::write(dir.path().join("yo/.lock"), "1").unwrap();
        assert!(matches!(store.save(&list(&["ni"]), 0), Err(Error::StoreLocked(_))));
    }

    #[test]
    fn merge_into_accumulates() {
        let dir = tempfile::tempdir().unwrap();
        let store = CuratedStore::open(dir.path());
        store.merge_into(&list(&["ni"])).unwrap();
        let (l, v) = store.merge_into(&list(&["ti"])).unwrap();
        assert_eq!(v, 2);
        assert_eq!(l.words().iter().collect::<Vec<_>>(), ["ni", "ti"]);
    }

    #[test]
    fn rejects_path_like_codes() {
        let store = CuratedStore::open("/nonexistent");
        assert!(store.version("../x").is_err());
    }
}
