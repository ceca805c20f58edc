//! Curated per-language stopword lists, the seed registry, and the human
//! review workflow that gates extracted candidates.

mod list;
mod registry;
mod review;
mod store;

pub use list::{
    diff_lists, load_list, merge_lists, normalize_word, parse_list, ListDiff, LoadReport,
    ProvenanceKind, ProvenanceRecord, StopwordList, LIST_SCHEMA_VERSION,
};
pub use registry::{lookup, seed_registry, SeedRegistryEntry, SeedStatus};
pub use review::{
    apply_reviews, emit_review_sheet, Decision, QuorumRule, ReviewOutcome, ReviewRow,
    ReviewSheet, Tally, Verdict, DEFAULT_CONTEXTS_PER_TERM, KWIC_WINDOW, TSV_HEADER,
};
pub use store::{CuratedStore, StoreCounts, StoreMeta};
