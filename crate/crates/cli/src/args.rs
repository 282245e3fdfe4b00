use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use morphalign::MorphType;
use serde::Serialize;

/// Tokenizer morphology, corpus metrics and byte-premium analyses.
///
/// Every subcommand reads files and writes files, plus a run manifest
/// (`*.manifest.json`) recording input digests, the seed and a hash of the
/// resolved options. Set MORPHALIGN_THREADS to cap the worker pool.
///
/// Exit codes: 0 success, 2 usage, 3 bad input or format, 4 configuration
/// or statistical failure.
#[derive(Debug, Parser)]
#[command(name = "morphalign", version)]
pub struct Cli {
    /// File of `key = value` lines supplying default flag values. Flags on
    /// the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Train a BPE model on text files, or import a vocabulary.
    #[command(args_override_self = true)]
    TrainTokenizer(TrainArgs),
    /// Encode text line by line.
    #[command(args_override_self = true)]
    Tokenize(TokenizeArgs),
    /// Score a model against a boundary dataset, one row per language.
    #[command(args_override_self = true)]
    Morphscore(MorphscoreArgs),
    /// Build a boundary dataset from CoNLL-U or UniMorph files.
    #[command(args_override_self = true)]
    BuildDataset(BuildDatasetArgs),
    /// Corpus token count, fertility, token length and Rényi entropy.
    #[command(args_override_self = true)]
    Metrics(MetricsArgs),
    /// Byte premiums of a parallel corpus against a pivot language.
    #[command(args_override_self = true)]
    BytePremium(BytePremiumArgs),
    /// Cut a corpus to a premium-scaled byte budget.
    #[command(args_override_self = true)]
    ScaleCorpus(ScaleCorpusArgs),
    /// Generate a synthetic language with gold boundaries.
    #[command(args_override_self = true)]
    Synth(SynthArgs),
    /// Regressions, nested F tests, t tests and correlations on a CSV table.
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
    /// Group summaries and bar charts from per-language result CSVs.
    #[command(args_override_self = true)]
    Report(ReportArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::TrainTokenizer(_) => "train-tokenizer",
            Command::Tokenize(_) => "tokenize",
            Command::Morphscore(_) => "morphscore",
            Command::BuildDataset(_) => "build-dataset",
            Command::Metrics(_) => "metrics",
            Command::BytePremium(_) => "byte-premium",
            Command::ScaleCorpus(_) => "scale-corpus",
            Command::Synth(_) => "synth",
            Command::Analyze(_) => "analyze",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    /// Training text, one or more files, one text per line.
    #[arg(long, num_args = 1.., required_unless_present = "vocab_file", conflicts_with = "vocab_file")]
    pub corpus: Vec<PathBuf>,
    /// Total tokens including specials.
    #[arg(long, required_unless_present = "vocab_file")]
    pub vocab_size: Option<usize>,
    /// Use only the first N lines of each corpus file.
    #[arg(long, value_name = "N")]
    pub max_lines: Option<usize>,
    /// Word-initial marker character.
    #[arg(long, default_value_t = morphalign::tokenizer::DEFAULT_MARKER)]
    pub marker: char,
    /// Import a vocabulary (`token` or `token<TAB>score` per line) instead of training.
    #[arg(long)]
    pub vocab_file: Option<PathBuf>,
    /// Merges (`left right` per line) for an imported BPE vocabulary.
    #[arg(long, requires = "vocab_file")]
    pub merges_file: Option<PathBuf>,
    /// Model JSON to write.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TokenizeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Write token ids instead of token strings.
    #[arg(long)]
    pub ids: bool,
    /// Wrap each line in `<s>` ... `</s>`.
    #[arg(long)]
    pub add_specials: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct MorphscoreArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// TSV with `word`, `boundary`, `lang` and `source` columns.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Report CSV to write.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Language profile CSV (`lang`, `morph_type`) for a group comparison.
    #[arg(long, requires = "compare_output")]
    pub profile: Option<PathBuf>,
    /// JSON file for the agglutinative vs fusional comparison.
    #[arg(long, requires = "profile")]
    pub compare_output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BuildDatasetArgs {
    /// Language code stored on every item.
    #[arg(long)]
    pub lang: String,
    #[arg(long, num_args = 1..)]
    pub conllu: Vec<PathBuf>,
    /// Tab-separated `lemma form features [segmentation]` files.
    #[arg(long, num_args = 1..)]
    pub unimorph: Vec<PathBuf>,
    /// Sampling seed for datasets above the size cap.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MetricsArgs {
    /// One or more model JSON files.
    #[arg(long, num_args = 1.., required = true)]
    pub model: Vec<PathBuf>,
    /// Corpus files named `<lang>.<anything>`.
    #[arg(long, num_args = 1.., required = true)]
    pub corpus: Vec<PathBuf>,
    /// Rényi order.
    #[arg(long, default_value_t = morphalign::metrics::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct BytePremiumArgs {
    /// Directory of line-aligned `<lang>.txt` files.
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    pub corpus_dir: Option<PathBuf>,
    /// Line-aligned corpus files named `<lang>.<anything>`.
    #[arg(long, num_args = 1..)]
    pub corpus: Vec<PathBuf>,
    #[arg(long, default_value = morphalign::byte_premium::DEFAULT_PIVOT)]
    pub pivot: String,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ScaleCorpusArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Premium ratio to scale by.
    #[arg(long, conflicts_with = "premiums", required_unless_present = "premiums")]
    pub premium: Option<f64>,
    /// Premium CSV written by `byte-premium`; needs `--lang`.
    #[arg(long, requires = "lang")]
    pub premiums: Option<PathBuf>,
    #[arg(long)]
    pub lang: Option<String>,
    /// Pivot-language byte budget before scaling.
    #[arg(long)]
    pub budget_bytes: u64,
    /// Shuffle lines before cutting.
    #[arg(long)]
    pub shuffle: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub typology: Option<MorphType>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 2000)]
    pub n_words: usize,
    /// Spec JSON; other flags override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n_roots: Option<usize>,
    #[arg(long)]
    pub n_slots: Option<usize>,
    #[arg(long)]
    pub n_affixes_per_slot: Option<usize>,
    #[arg(long)]
    pub paradigm_size: Option<usize>,
    #[arg(long)]
    pub zipf_s: Option<f64>,
    /// Writes `<lang>.txt`, `<lang>.gold.tsv` and `<lang>.spec.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// CSV table, one row per observation.
    #[arg(long)]
    pub data: PathBuf,
    /// OLS model, e.g. `ppl ~ ctc + morph_type`.
    #[arg(long, conflicts_with_all = ["welch", "pearson"])]
    pub formula: Option<String>,
    /// Reduced model for a nested F test against `--formula`.
    #[arg(long, requires = "formula")]
    pub reduced: Option<String>,
    /// Numeric column for a two-group t test.
    #[arg(long, requires = "by", conflicts_with = "pearson")]
    pub welch: Option<String>,
    /// Two-level grouping column for `--welch`.
    #[arg(long)]
    pub by: Option<String>,
    /// Pooled-variance t test instead of Welch.
    #[arg(long, requires = "welch")]
    pub pooled: bool,
    /// Two numeric columns to correlate.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    pub pearson: Vec<String>,
    /// Result JSON to write.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Result CSVs with a `lang` column.
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
    /// Language profile CSV (`lang`, `morph_type`).
    #[arg(long)]
    pub profile: PathBuf,
    /// Metrics to include; defaults to every numeric column.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    /// Writes `summary.json` and one `<metric>.svg` per metric.
    #[arg(long)]
    pub out_dir: PathBuf,
}
