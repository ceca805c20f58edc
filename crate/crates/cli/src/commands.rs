use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use stopcurate::corpus::{corpus_summary, ingest_jsonl, ingest_plaintext, FieldMap};
use stopcurate::curation::{
    apply_reviews, diff_lists, emit_review_sheet, load_list, lookup, merge_lists, seed_registry,
    ProvenanceRecord, QuorumRule, SeedRegistryEntry, DEFAULT_CONTEXTS_PER_TERM,
};
use stopcurate::evaluation::{precision_recall, reduction_report};
use stopcurate::manifest::{fingerprint_bytes, fingerprint_file, RunManifest};
use stopcurate::pipeline::{extract, ExtractConfig};
use stopcurate::tokenizer::WordSegmentation;
use stopcurate::{json as cjson, CandidateList, Corpus, CuratedStore, Metric, ReviewSheet, StopwordList, TokenizerConfig};

use crate::args::*;
use crate::table::render;
use crate::Failure;

type Outcome = std::result::Result<(), Failure>;

/// Defaults read from `--config`; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    tokenizer: Option<TokenizerConfig>,
    min_count: Option<u64>,
    min_df: Option<u64>,
    top_k: Option<usize>,
    metrics: Option<Vec<Metric>>,
    contexts_per_term: Option<usize>,
    quorum: Option<QuorumRule>,
}

struct Ctx {
    quiet: bool,
    json: bool,
    config: FileConfig,
}

impl Ctx {
    fn info(&self, text: &str) {
        if !self.quiet && !self.json {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Outcome {
        if self.json {
            print!("{}", cjson::to_canonical_string(value)?);
        }
        Ok(())
    }
}

pub fn run(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(path) => {
            let text = read_text(path)?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::usage(format!("{}: invalid config: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        quiet: cli.quiet,
        json: cli.json,
        config,
    };
    match cli.command {
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Extract(a) => extract_cmd(&ctx, a),
        Command::Review(ReviewCommand::Emit(a)) => review_emit(&ctx, a),
        Command::Review(ReviewCommand::Apply(a)) => review_apply(&ctx, a),
        Command::Merge(a) => merge(&ctx, a),
        Command::Diff(a) => diff(&ctx, a),
        Command::Eval(a) => eval(&ctx, a),
        Command::Export(a) => export(&ctx, a),
        Command::Registry(a) => registry(&ctx, a),
    }
}

fn invocation() -> Vec<String> {
    std::env::args().skip(1).collect()
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, contents: &str) -> Outcome {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Failure::data(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn read_candidates(path: &Path) -> std::result::Result<CandidateList, Failure> {
    CandidateList::from_json(&read_text(path)?)
        .map_err(|e| Failure::data(format!("{}: {e}", path.display())))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn source_key(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "list".into())
}

/// A `.json` list carries its language; anything else is one word per line
/// and needs `lang`.
fn read_list(path: &Path, lang: Option<&str>, key: &str) -> std::result::Result<StopwordList, Failure> {
    if is_json(path) {
        let list = StopwordList::from_json(&read_text(path)?)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
        if let Some(l) = lang.filter(|l| *l != list.lang()) {
            return Err(stopcurate::Error::LanguageMismatch(vec![l.to_string(), list.lang().to_string()]).into());
        }
        Ok(list)
    } else {
        let lang = lang.ok_or_else(|| {
            Failure::usage(format!("{}: plain-text lists need --lang", path.display()))
        })?;
        Ok(load_list(path, lang, key)?.0)
    }
}

fn ingest(ctx: &Ctx, a: IngestArgs) -> Outcome {
    let (corpus, inputs) = match a.format {
        InputFormat::Txt => {
            let corpus = ingest_plaintext(&a.inputs, &a.lang, &a.domain)?;
            let inputs = corpus
                .documents()
                .iter()
                .map(|d| fingerprint_bytes(&d.id, d.text.as_bytes()))
                .collect();
            (corpus, inputs)
        }
        InputFormat::Jsonl => {
            let fields = FieldMap {
                text: a.text_field.clone(),
                id: Some(a.id_field.clone()),
                domain: Some(a.domain_field.clone()),
            };
            let mut docs = Vec::new();
            let mut inputs = Vec::new();
            for input in &a.inputs {
                let path = Path::new(input);
                docs.extend(ingest_jsonl(path, &fields, &a.lang, &a.domain)?.documents().iter().cloned());
                inputs.push(fingerprint_file(path)?);
            }
            (Corpus::new(&a.lang, docs)?, inputs)
        }
    };
    write_text(&a.out, &corpus.to_jsonl()?)?;
    let config = json!({
        "lang": a.lang,
        "domain": a.domain,
        "format": match a.format { InputFormat::Txt => "txt", InputFormat::Jsonl => "jsonl" },
        "fields": { "text": a.text_field, "id": a.id_field, "domain": a.domain_field },
    });
    RunManifest::new("ingest", invocation(), config, inputs, vec![a.out.display().to_string()])?
        .write_beside(&a.out)?;

    let summary = corpus_summary(&corpus);
    let rows: Vec<Vec<String>> = summary
        .domain_histogram
        .iter()
        .map(|(d, n)| vec![d.clone(), n.to_string()])
        .collect();
    ctx.info(&format!(
        "{} documents, {} bytes -> {}\n{}",
        summary.doc_count,
        summary.total_bytes,
        a.out.display(),
        render(&["domain", "documents"], &rows)
    ));
    ctx.emit_json(&json!({
        "lang": corpus.lang(),
        "fingerprint": corpus.fingerprint()?,
        "summary": summary,
        "out": a.out.display().to_string(),
    }))
}

fn tokenizer_config(base: TokenizerConfig, t: &TokenizerArgs) -> TokenizerConfig {
    let mut cfg = base;
    if let Some(s) = t.segmentation {
        cfg.word_segmentation = match s {
            Segmentation::Uax29 => WordSegmentation::Uax29,
            Segmentation::Whitespace => WordSegmentation::Whitespace,
        };
    }
    if t.no_nfc {
        cfg.nfc_normalize = false;
    }
    if t.no_case_fold {
        cfg.case_fold = false;
    }
    if t.split_apostrophes {
        cfg.keep_internal_apostrophe = false;
    }
    if t.keep_digits {
        cfg.drop_tokens_with_digits = false;
    }
    if t.keep_punctuation {
        cfg.drop_punctuation_tokens = false;
    }
    cfg
}

fn extract_cmd(ctx: &Ctx, a: ExtractArgs) -> Outcome {
    let file = &ctx.config;
    let defaults = ExtractConfig::default();
    let metrics = match &a.metrics {
        Some(names) => {
            let mut seen = BTreeSet::new();
            let mut out = Vec::new();
            for n in names.iter().filter(|n| !n.trim().is_empty()) {
                let m: Metric = n.trim().parse()?;
                if seen.insert(m) {
                    out.push(m);
                }
            }
            if out.is_empty() {
                return Err(Failure::usage("--metrics names no metric"));
            }
            out
        }
        None => file.metrics.clone().unwrap_or(defaults.metrics),
    };
    let cfg = ExtractConfig {
        tokenizer: tokenizer_config(file.tokenizer.clone().unwrap_or_default(), &a.tokenizer),
        min_count: a.min_count.or(file.min_count).unwrap_or(defaults.min_count),
        min_df: a.min_df.or(file.min_df).unwrap_or(defaults.min_df),
        top_k: a.top_k.or(file.top_k).unwrap_or(defaults.top_k),
        metrics,
    };
    if cfg.top_k == 0 {
        return Err(Failure::usage("--top-k must be at least 1"));
    }
    let corpus = Corpus::read_jsonl(&a.corpus)?;
    let cl: CandidateList = extract(&corpus, &cfg)?;
    write_text(&a.out, &cl.to_json()?)?;
    RunManifest::new(
        "extract",
        invocation(),
        serde_json::to_value(&cfg).map_err(stopcurate::Error::from)?,
        vec![fingerprint_file(&a.corpus)?],
        vec![a.out.display().to_string()],
    )?
    .with_run_id(cl.run_id())
    .write_beside(&a.out)?;

    let used: Vec<&str> = cl.run_meta.metrics_used.iter().map(|m| m.name()).collect();
    let mut headers = vec!["rank", "term", "mean_rank", "count"];
    headers.extend(used.iter().copied());
    let rows: Vec<Vec<String>> = cl
        .entries
        .iter()
        .take(20)
        .map(|e| {
            let mut row = vec![
                e.fused_rank.to_string(),
                e.term.clone(),
                format!("{:.2}", e.mean_rank),
                e.count.to_string(),
            ];
            row.extend(e.per_metric.values().map(|ev| ev.rank.to_string()));
            row
        })
        .collect();
    let mut text = format!(
        "{} candidates from a pool of {} terms -> {}\nrun_id {}\n",
        cl.entries.len(),
        cl.run_meta.pool.len(),
        a.out.display(),
        cl.run_id()
    );
    for s in &cl.run_meta.metrics_skipped {
        text.push_str(&format!("skipped {}: {}\n", s.metric, s.reason));
    }
    text.push_str(&render(&headers, &rows));
    ctx.info(&text);
    ctx.emit_json(&json!({
        "run_id": cl.run_id(),
        "candidates": cl.entries.len(),
        "pool": cl.run_meta.pool.len(),
        "metrics_used": cl.run_meta.metrics_used,
        "metrics_skipped": cl.run_meta.metrics_skipped,
        "out": a.out.display().to_string(),
    }))
}

fn review_emit(ctx: &Ctx, a: ReviewEmitArgs) -> Outcome {
    let cl = read_candidates(&a.candidates)?;
    let corpus = Corpus::read_jsonl(&a.corpus)?;
    if corpus.fingerprint()? != cl.run_meta.corpus_fingerprint {
        return Err(Failure::data(format!(
            "{} is not the corpus these candidates were extracted from",
            a.corpus.display()
        )));
    }
    let contexts = a
        .contexts
        .or(ctx.config.contexts_per_term)
        .unwrap_or(DEFAULT_CONTEXTS_PER_TERM);
    let sheet = emit_review_sheet(&cl, &corpus, contexts)?;
    write_text(&a.out, &sheet.to_tsv())?;
    RunManifest::new(
        "review-emit",
        invocation(),
        json!({ "contexts_per_term": contexts }),
        vec![fingerprint_file(&a.candidates)?, fingerprint_file(&a.corpus)?],
        vec![a.out.display().to_string()],
    )?
    .with_run_id(cl.run_id())
    .write_beside(&a.out)?;
    ctx.info(&format!("{} rows -> {}", sheet.rows.len(), a.out.display()));
    ctx.emit_json(&json!({
        "run_id": sheet.run_id,
        "rows": sheet.rows.len(),
        "out": a.out.display().to_string(),
    }))
}

fn parse_quorum(s: &str) -> std::result::Result<QuorumRule, Failure> {
    let s = s.trim().to_ascii_lowercase();
    if s == "majority" {
        return Ok(QuorumRule::Majority);
    }
    if s == "unanimous" {
        return Ok(QuorumRule::Unanimous { min_accepts: 1 });
    }
    if let Some(n) = s.strip_prefix("unanimous:") {
        let min_accepts = n
            .parse()
            .map_err(|_| Failure::usage(format!("bad quorum minimum {n:?}")))?;
        return Ok(QuorumRule::Unanimous { min_accepts });
    }
    Err(Failure::usage(format!(
        "unknown quorum rule {s:?} (expected majority or unanimous:<n>)"
    )))
}

fn review_apply(ctx: &Ctx, a: ReviewApplyArgs) -> Outcome {
    let quorum = match &a.quorum {
        Some(q) => parse_quorum(q)?,
        None => ctx.config.quorum.unwrap_or_default(),
    };
    let sheets = a
        .sheets
        .iter()
        .map(|p| Ok(ReviewSheet::from_tsv(&read_text(p)?, &p.display().to_string())?))
        .collect::<std::result::Result<Vec<_>, Failure>>()?;
    let outcome = apply_reviews(&sheets, quorum)?;
    let store = CuratedStore::open(&a.store);
    let version = if outcome.accepted.is_empty() {
        store.version(outcome.accepted.lang())?
    } else {
        store.merge_into(&outcome.accepted)?.1
    };

    let rows: Vec<Vec<String>> = outcome
        .tallies
        .iter()
        .map(|(term, t)| {
            let verdict = if outcome.accepted.contains(term) {
                "accepted"
            } else if outcome.rejected.contains(term) {
                "rejected"
            } else {
                "unresolved"
            };
            vec![
                term.clone(),
                t.accept.to_string(),
                t.reject.to_string(),
                t.unsure.to_string(),
                t.blank.to_string(),
                verdict.to_string(),
            ]
        })
        .collect();
    ctx.info(&format!(
        "quorum {quorum}: {} accepted, {} rejected, {} unresolved; store {} now at version {version}\n{}",
        outcome.accepted.len(),
        outcome.rejected.len(),
        outcome.unresolved.len(),
        outcome.accepted.lang(),
        render(&["term", "accept", "reject", "unsure", "blank", "verdict"], &rows)
    ));
    ctx.emit_json(&json!({
        "run_id": outcome.run_id,
        "lang": outcome.accepted.lang(),
        "quorum": quorum,
        "accepted": outcome.accepted.words(),
        "rejected": outcome.rejected,
        "unresolved": outcome.unresolved,
        "tallies": outcome.tallies,
        "store_version": version,
    }))
}

fn merge(ctx: &Ctx, a: MergeArgs) -> Outcome {
    if a.out.is_none() && a.store.is_none() {
        return Err(Failure::usage("merge needs --out, --store or both"));
    }
    let mut lists = Vec::new();
    for spec in &a.lists {
        let (key, path) = match spec.split_once('=') {
            Some((k, p)) if !k.is_empty() && !Path::new(spec).exists() => (k.to_string(), PathBuf::from(p)),
            _ => (source_key(Path::new(spec)), PathBuf::from(spec)),
        };
        let lang = a
            .lang
            .clone()
            .or_else(|| lists.first().map(|l: &StopwordList| l.lang().to_string()));
        lists.push(read_list(&path, lang.as_deref(), &key)?);
    }
    let merged = merge_lists(&lists)?;
    if let Some(out) = &a.out {
        let text = if is_json(out) { merged.to_json()? } else { merged.to_txt() };
        write_text(out, &text)?;
    }
    let version = match &a.store {
        Some(root) => Some(CuratedStore::open(root).merge_into(&merged)?.1),
        None => None,
    };
    let rows: Vec<Vec<String>> = a
        .lists
        .iter()
        .zip(&lists)
        .map(|(spec, l)| vec![spec.clone(), l.len().to_string()])
        .collect();
    let mut text = render(&["list", "words"], &rows);
    text.push_str(&format!("merged {} words ({})", merged.len(), merged.lang()));
    if let Some(v) = version {
        text.push_str(&format!("; store version {v}"));
    }
    ctx.info(&text);
    ctx.emit_json(&json!({
        "lang": merged.lang(),
        "words": merged.len(),
        "store_version": version,
    }))
}

fn diff(ctx: &Ctx, a: DiffArgs) -> Outcome {
    let mut lang = a.lang.clone();
    for p in [&a.a, &a.b] {
        if lang.is_none() && is_json(p) {
            lang = Some(StopwordList::from_json(&read_text(p)?)?.lang().to_string());
        }
    }
    let la = read_list(&a.a, lang.as_deref(), &source_key(&a.a))?;
    let lb = read_list(&a.b, lang.as_deref(), &source_key(&a.b))?;
    let d = diff_lists(&la, &lb)?;
    let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
    let rows = vec![
        vec![format!("only {}", a.a.display()), d.only_a.len().to_string(), join(&d.only_a)],
        vec![format!("only {}", a.b.display()), d.only_b.len().to_string(), join(&d.only_b)],
        vec!["both".to_string(), d.both.len().to_string(), join(&d.both)],
    ];
    ctx.info(&render(&["set", "size", "words"], &rows));
    ctx.emit_json(&d)
}

fn eval(ctx: &Ctx, a: EvalArgs) -> Outcome {
    let cl = read_candidates(&a.candidates)?;
    let gold = read_list(&a.gold, Some(&cl.lang), &source_key(&a.gold))?;
    let k = a.k.unwrap_or_else(|| cl.entries.len().min(gold.len()));
    let report = precision_recall(&cl, &gold, k)?;
    let reduction = match &a.corpus {
        Some(path) => {
            let corpus = Corpus::read_jsonl(path)?;
            let mut top = StopwordList::new(&cl.lang);
            for term in cl.terms().take(k) {
                top.insert(term, ProvenanceRecord::seed(cl.run_id()))?;
            }
            Some(reduction_report::<f64>(&top, &corpus, &cl.run_meta.tokenizer))
        }
        None => None,
    };
    let mut rows = vec![
        vec!["k".to_string(), report.k.to_string()],
        vec!["precision@k".to_string(), format!("{:.4}", report.precision_at_k)],
        vec!["recall".to_string(), format!("{:.4}", report.recall)],
        vec!["f1".to_string(), format!("{:.4}", report.f1)],
        vec!["gold size".to_string(), report.gold_size.to_string()],
        vec!["gold outside pool".to_string(), report.gold_outside_pool.len().to_string()],
    ];
    if let Some(r) = &reduction {
        rows.push(vec!["tokens before".to_string(), r.tokens_before.to_string()]);
        rows.push(vec!["tokens after".to_string(), r.tokens_after.to_string()]);
        rows.push(vec!["reduction".to_string(), format!("{:.4}", r.reduction_fraction)]);
    }
    ctx.info(&render(&["measure", "value"], &rows));
    ctx.emit_json(&json!({ "eval": report, "reduction": reduction }))
}

fn export(ctx: &Ctx, a: ExportArgs) -> Outcome {
    let lists: Vec<StopwordList> = match (&a.store, a.lists.is_empty()) {
        (Some(_), false) => return Err(Failure::usage("use either --store or --list, not both")),
        (None, true) => return Err(Failure::usage("export needs --store or --list")),
        (Some(root), true) => {
            let store = CuratedStore::open(root);
            let langs = if a.langs.is_empty() { store.languages()? } else { a.langs.clone() };
            let mut out = Vec::new();
            for lang in langs {
                match store.load(&lang)? {
                    Some((list, _)) => out.push(list),
                    None => return Err(Failure::data(format!("store has no list for {lang:?}"))),
                }
            }
            out
        }
        (None, false) => {
            if a.langs.len() > 1 {
                return Err(Failure::usage("--list takes at most one --lang"));
            }
            let lang = a.langs.first().map(String::as_str);
            a.lists
                .iter()
                .map(|p| read_list(p, lang, &source_key(p)))
                .collect::<std::result::Result<_, _>>()?
        }
    };
    if lists.is_empty() {
        return Err(Failure::data("nothing to export"));
    }
    let mut written = Vec::new();
    match a.format {
        ExportFormat::Txt | ExportFormat::Json => {
            let [list] = lists.as_slice() else {
                return Err(Failure::usage(format!(
                    "{} lists selected; txt and json export one list",
                    lists.len()
                )));
            };
            let text = if a.format == ExportFormat::Txt { list.to_txt() } else { list.to_json()? };
            write_text(&a.out, &text)?;
            written.push((list.lang().to_string(), list.len(), a.out.clone()));
        }
        ExportFormat::ToolkitDir => {
            let langs: BTreeSet<&str> = lists.iter().map(|l| l.lang()).collect();
            if langs.len() != lists.len() {
                return Err(Failure::usage("toolkit-dir export needs one list per language"));
            }
            for list in &lists {
                let path = a.out.join("stopwords").join(list.lang());
                write_text(&path, &list.to_txt())?;
                written.push((list.lang().to_string(), list.len(), path));
            }
        }
    }
    let rows: Vec<Vec<String>> = written
        .iter()
        .map(|(l, n, p)| vec![l.clone(), n.to_string(), p.display().to_string()])
        .collect();
    ctx.info(&render(&["lang", "words", "path"], &rows));
    ctx.emit_json(
        &written
            .iter()
            .map(|(l, n, p)| json!({ "lang": l, "words": n, "path": p.display().to_string() }))
            .collect::<Vec<_>>(),
    )
}

fn registry(ctx: &Ctx, a: RegistryArgs) -> Outcome {
    let entries: Vec<SeedRegistryEntry> = match &a.lang {
        Some(q) => vec![lookup(q).ok_or_else(|| Failure::usage(format!("no registry entry for {q:?}")))?],
        None => seed_registry(),
    };
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|e| {
            vec![
                e.name.clone(),
                e.code.clone(),
                e.expected_count.map_or_else(|| "-".to_string(), |c| c.to_string()),
                if e.source_keys.is_empty() { "-".to_string() } else { e.source_keys.join(",") },
                serde_json::to_value(e.status)
                    .ok()
                    .and_then(|v| v.as_str().map(String::from))
                    .unwrap_or_default(),
            ]
        })
        .collect();
    ctx.info(&render(&["language", "code", "words", "sources", "status"], &rows));
    ctx.emit_json(&entries)
}
