use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stopcurate", version, about = "Extract, review and curate stopword lists from monolingual corpora")]
pub struct Cli {
    /// JSON file with default settings (tokenizer, thresholds, metrics, quorum)
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,

    /// Suppress informational output
    #[arg(long, short, global = true)]
    pub quiet: bool,

    /// Print machine-readable JSON instead of tables
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load documents into a corpus file
    Ingest(IngestArgs),
    /// Score terms and write the fused candidate list
    Extract(ExtractArgs),
    /// Emit or apply human review sheets
    #[command(subcommand)]
    Review(ReviewCommand),
    /// Merge stopword lists
    Merge(MergeArgs),
    /// Compare two stopword lists
    Diff(DiffArgs),
    /// Evaluate candidates against a gold list
    Eval(EvalArgs),
    /// Write curated lists in distributable layouts
    Export(ExportArgs),
    /// Show the seed-list registry
    Registry(RegistryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Txt,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Language code of every document
    #[arg(long)]
    pub lang: String,
    /// Domain label (plaintext input, and the default for JSONL lines without one)
    #[arg(long, default_value = "general")]
    pub domain: String,
    #[arg(long, value_enum, default_value = "txt")]
    pub format: InputFormat,
    /// JSONL key holding the text
    #[arg(long, default_value = "text")]
    pub text_field: String,
    /// JSONL key holding the document id
    #[arg(long, default_value = "id")]
    pub id_field: String,
    /// JSONL key holding the domain label
    #[arg(long, default_value = "domain")]
    pub domain_field: String,
    /// Output corpus file (JSONL)
    #[arg(long)]
    pub out: PathBuf,
    /// Input files or glob patterns
    #[arg(required = true)]
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Segmentation {
    Uax29,
    Whitespace,
}

#[derive(Debug, Args, Default)]
pub struct TokenizerArgs {
    #[arg(long, value_enum)]
    pub segmentation: Option<Segmentation>,
    /// Skip NFC normalization
    #[arg(long)]
    pub no_nfc: bool,
    /// Keep letter case
    #[arg(long)]
    pub no_case_fold: bool,
    /// Split words at internal apostrophes
    #[arg(long)]
    pub split_apostrophes: bool,
    /// Keep tokens containing digits
    #[arg(long)]
    pub keep_digits: bool,
    /// Keep tokens without letters
    #[arg(long)]
    pub keep_punctuation: bool,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Corpus file written by `ingest`
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output candidate list (JSON)
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub min_df: Option<u64>,
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Comma-separated subset of freq_spread,entropy,info_gain,kl_div
    #[arg(long, value_delimiter = ',')]
    pub metrics: Option<Vec<String>>,
    #[command(flatten)]
    pub tokenizer: TokenizerArgs,
}

#[derive(Debug, Subcommand)]
pub enum ReviewCommand {
    /// Write a blank review sheet (TSV) for a candidate list
    Emit(ReviewEmitArgs),
    /// Apply completed sheets to the curated store
    Apply(ReviewApplyArgs),
}

#[derive(Debug, Args)]
pub struct ReviewEmitArgs {
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// KWIC snippets per term
    #[arg(long)]
    pub contexts: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReviewApplyArgs {
    /// Curated store directory
    #[arg(long)]
    pub store: PathBuf,
    /// `majority` or `unanimous:<min accepts>`
    #[arg(long)]
    pub quorum: Option<String>,
    #[arg(required = true)]
    pub sheets: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    /// Language code (needed for plain-text lists)
    #[arg(long)]
    pub lang: Option<String>,
    /// Write the merged list here (.json or .txt)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Merge into this curated store
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Lists as SOURCE_KEY=PATH for plain text, or PATH for .json lists
    #[arg(required = true)]
    pub lists: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DiffArgs {
    #[arg(long)]
    pub lang: Option<String>,
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub candidates: PathBuf,
    /// Gold list (.txt or .json)
    #[arg(long)]
    pub gold: PathBuf,
    /// Cutoff; defaults to min(candidates, gold size)
    #[arg(long)]
    pub k: Option<usize>,
    /// Also report token reduction of the top-k list on this corpus
    #[arg(long)]
    pub corpus: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Txt,
    Json,
    ToolkitDir,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum)]
    pub format: ExportFormat,
    /// Output file, or directory for toolkit-dir
    #[arg(long)]
    pub out: PathBuf,
    /// Read lists from this curated store
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Read lists from files instead (.txt needs --lang)
    #[arg(long = "list")]
    pub lists: Vec<PathBuf>,
    /// Languages to export (default: all in the store)
    #[arg(long = "lang")]
    pub langs: Vec<String>,
}

#[derive(Debug, Args)]
pub struct RegistryArgs {
    /// Show one language (name or code)
    #[arg(long)]
    pub lang: Option<String>,
}
