//! Word segmentation and token normalization.
//!
//! Segmentation follows UAX #29 word boundaries, then re-joins words split at
//! an apostrophe that sits between two letters. Hausa writes the glottal
//! consonant with U+02BC, and many sources substitute U+0027 or U+2019 for it.

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::{is_nfc, UnicodeNormalization};
use unicode_segmentation::UnicodeSegmentation;

use crate::{Error, Result};

/// Apostrophe-like characters treated as word-internal letters.
pub const APOSTROPHES: [char; 3] = ['\u{0027}', '\u{2019}', '\u{02BC}'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WordSegmentation {
    /// UAX #29 default word boundaries.
    #[default]
    Uax29,
    /// Split on whitespace only, then trim non-alphanumeric edges.
    Whitespace,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerConfig {
    pub word_segmentation: WordSegmentation,
    pub nfc_normalize: bool,
    pub case_fold: bool,
    pub keep_internal_apostrophe: bool,
    pub drop_tokens_with_digits: bool,
    pub drop_punctuation_tokens: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            word_segmentation: WordSegmentation::Uax29,
            nfc_normalize: true,
            case_fold: true,
            keep_internal_apostrophe: true,
            drop_tokens_with_digits: true,
            drop_punctuation_tokens: true,
        }
    }
}

/// Splits `text` into normalized word tokens in surface order.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let composed;
    let text = if cfg.nfc_normalize && !is_nfc(text) {
        composed = text.nfc().collect::<String>();
        composed.as_str()
    } else {
        text
    };

    let mut raw = match cfg.word_segmentation {
        WordSegmentation::Uax29 => uax29_segments(text, cfg.keep_internal_apostrophe),
        WordSegmentation::Whitespace => whitespace_segments(text),
    };
    if !cfg.keep_internal_apostrophe {
        raw = raw
            .into_iter()
            .flat_map(|s| {
                s.split(APOSTROPHES)
                    .filter(|p| !p.is_empty())
                    .map(str::to_string)
                    .collect::<Vec<_>>()
            })
            .collect();
    }

    raw.into_iter()
        .filter(|tok| !tok.chars().all(char::is_whitespace))
        .filter(|tok| !(cfg.drop_tokens_with_digits && tok.chars().any(char::is_numeric)))
        .filter(|tok| !(cfg.drop_punctuation_tokens && !has_letter(tok)))
        .map(|tok| normalize_nonempty(&tok, cfg))
        .collect()
}

/// NFC, then simple case folding, then NFC again so folded output is
/// composed. Idempotent.
pub fn normalize_token(token: &str, cfg: &TokenizerConfig) -> Result<String> {
    if token.is_empty() {
        return Err(Error::EmptyToken);
    }
    Ok(normalize_nonempty(token, cfg))
}

fn normalize_nonempty(token: &str, cfg: &TokenizerConfig) -> String {
    let mut s: String = if cfg.nfc_normalize {
        token.nfc().collect()
    } else {
        token.to_string()
    };
    if cfg.case_fold {
        s = s.chars().map(simple_case_fold).collect();
        if cfg.nfc_normalize && !is_nfc(&s) {
            s = s.nfc().collect();
        }
    }
    s
}

pub fn has_letter(s: &str) -> bool {
    s.chars().any(char::is_alphabetic)
}

fn is_letterlike(c: char) -> bool {
    c.is_alphabetic() || is_combining_mark(c)
}

fn uax29_segments(text: &str, join_apostrophes: bool) -> Vec<String> {
    let segments: Vec<&str> = text.split_word_bounds().collect();
    if !join_apostrophes {
        return segments.into_iter().map(str::to_string).collect();
    }
    let mut out: Vec<String> = Vec::with_capacity(segments.len());
    let mut i = 0;
    while i < segments.len() {
        let seg = segments[i];
        let mut chars = seg.chars();
        let single_apostrophe = matches!((chars.next(), chars.next()), (Some(c), None) if APOSTROPHES.contains(&c));
        if single_apostrophe && i + 1 < segments.len() {
            let before = out.last().and_then(|w| w.chars().last());
            let after = segments[i + 1].chars().next();
            if let (Some(b), Some(a)) = (before, after) {
                if is_letterlike(b) && a.is_alphabetic() {
                    let last = out.last_mut().expect("checked above");
                    last.push_str(seg);
                    last.push_str(segments[i + 1]);
                    i += 2;
                    continue;
                }
            }
        }
        out.push(seg.to_string());
        i += 1;
    }
    out
}

fn whitespace_segments(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !(c.is_alphanumeric() || is_combining_mark(c)))
                .to_string()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Unicode simple (single code point) case folding.
///
/// `char::to_lowercase` agrees with the C+S folding table except for the
/// characters special-cased here.
pub fn simple_case_fold(c: char) -> char {
    match c {
        // Cherokee folds to the uppercase letters.
        '\u{13A0}'..='\u{13F5}' => c,
        '\u{13F8}'..='\u{13FD}' => char::from_u32(c as u32 - 8).unwrap_or(c),
        '\u{AB70}'..='\u{ABBF}' => char::from_u32(c as u32 - 0xAB70 + 0x13A0).unwrap_or(c),
        'ς' => 'σ',
        'ſ' => 's',
        'ϐ' => 'β',
        'ϑ' => 'θ',
        'ϕ' => 'φ',
        'ϖ' => 'π',
        'ϰ' => 'κ',
        'ϱ' => 'ρ',
        'ϵ' => 'ε',
        'ẛ' => 'ṡ',
        '\u{0345}' | '\u{1FBE}' => 'ι',
        '\u{1C80}' => 'в',
        '\u{1C81}' => 'д',
        '\u{1C82}' => 'о',
        '\u{1C83}' => 'с',
        '\u{1C84}' | '\u{1C85}' => 'т',
        '\u{1C86}' => 'ъ',
        '\u{1C87}' => 'ѣ',
        '\u{1C88}' => '\u{A64B}',
        _ => {
            let mut lower = c.to_lowercase();
            match (lower.next(), lower.next()) {
                (Some(l), None) => l,
                _ => c,
            }
        }
    }
}
