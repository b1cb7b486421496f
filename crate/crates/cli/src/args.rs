use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "uscore",
    version,
    about = "Unsupervised machine-translation evaluation",
    args_override_self = true,
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score hypotheses against their sources (word, sentence and ensemble metric).
    Score(ScoreArgs),
    /// Mine pseudo-parallel sentence pairs from two monolingual pools.
    Mine(MineArgs),
    /// Drop short, long, copied or wrong-language sentences or pairs.
    Filter(FilterArgs),
    /// Fit a cross-lingual remapping from mined sentence pairs.
    Remap(RemapArgs),
    /// Train the sentence projection contrastively on mined pairs.
    TrainSent(TrainSentArgs),
    /// Train an n-gram language model for the fluency term.
    TrainLm(TrainLmArgs),
    /// Run the iterative mine-and-train loop.
    Selflearn(SelflearnArgs),
    /// Pearson correlation of metric scores with human judgments.
    Eval(EvalArgs),
    /// Significance test between two metrics on the same judgments.
    Compare(CompareArgs),
    /// Write planted synthetic pools (corpora, stores and gold alignment).
    Synth(SynthArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Score(a) => &a.common,
            Command::Mine(a) => &a.common,
            Command::Filter(a) => &a.common,
            Command::Remap(a) => &a.common,
            Command::TrainSent(a) => &a.common,
            Command::TrainLm(a) => &a.common,
            Command::Selflearn(a) => &a.common,
            Command::Eval(a) => &a.common,
            Command::Compare(a) => &a.common,
            Command::Synth(a) => &a.common,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Config file of `flag = value` lines; flags given on the command line win.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads for mining and scoring [default: all cores]. Outputs do not depend on it.
    #[arg(long, value_name = "N")]
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Where to write the run manifest [default: next to the main output, `<out>.manifest.json`].
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizerArg {
    /// NFC normalization, whitespace split, punctuation detached.
    Default,
    /// Whitespace split only.
    Whitespace,
}

impl From<TokenizerArg> for uscore::corpusio::Tokenizer {
    fn from(t: TokenizerArg) -> Self {
        match t {
            TokenizerArg::Default => Self::Default,
            TokenizerArg::Whitespace => Self::Whitespace,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    /// Source sentences, one per line.
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    /// Hypotheses, one per line, aligned with --src.
    #[arg(long, value_name = "FILE")]
    pub hyp: PathBuf,
    /// Source-language embedding store (static-word or contextual).
    #[arg(long, value_name = "FILE")]
    pub src_emb: PathBuf,
    /// Target-language embedding store for the hypotheses.
    #[arg(long, value_name = "FILE")]
    pub hyp_emb: PathBuf,
    /// Pseudo references, one per line, aligned with --hyp.
    #[arg(long, value_name = "FILE")]
    pub pseudo_ref: Option<PathBuf>,
    /// Store for the pseudo references [default: --hyp-emb].
    #[arg(long, value_name = "FILE")]
    pub pseudo_emb: Option<PathBuf>,
    /// Remapping learned by `remap`; repeat to compose maps in order.
    #[arg(long, value_name = "FILE", action = clap::ArgAction::Append)]
    pub map: Vec<PathBuf>,
    /// N-gram model from `train-lm` for the fluency term.
    #[arg(long, value_name = "FILE", conflicts_with = "lm_scores")]
    pub lm: Option<PathBuf>,
    /// Precomputed per-hypothesis fluency scores (`index<TAB>score`).
    #[arg(long, value_name = "FILE")]
    pub lm_scores: Option<PathBuf>,
    /// Sentence projection from `train-sent` [default: identity].
    #[arg(long, value_name = "FILE")]
    pub projection: Option<PathBuf>,
    /// Sentence-embedding store for the sources [default: pooled --src-emb].
    #[arg(long, value_name = "FILE")]
    pub src_sent_emb: Option<PathBuf>,
    /// Sentence-embedding store for the hypotheses [default: pooled --hyp-emb].
    #[arg(long, value_name = "FILE")]
    pub hyp_sent_emb: Option<PathBuf>,
    /// Weight preset.
    #[arg(long, default_value = "tuned", value_parser = ["tuned", "plus", "plusplus"])]
    pub preset: String,
    /// Override the cross-lingual WMD weight.
    #[arg(long, value_name = "W")]
    pub w_xlng: Option<f64>,
    /// Override the fluency weight.
    #[arg(long, value_name = "W")]
    pub w_lm: Option<f64>,
    /// Override the pseudo-reference weight.
    #[arg(long, value_name = "W")]
    pub w_pseudo: Option<f64>,
    /// Override the word-metric ensemble weight.
    #[arg(long, value_name = "W")]
    pub w_wrd: Option<f64>,
    /// Override the sentence-metric ensemble weight.
    #[arg(long, value_name = "W")]
    pub w_snt: Option<f64>,
    /// Combine raw component scores instead of z-normalized ones.
    #[arg(long)]
    pub raw_components: bool,
    #[arg(long, value_enum, default_value = "default")]
    /// How lines are split into tokens.
    pub tokenizer: TokenizerArg,
    /// Output TSV (`index<TAB>score`).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct MineArgs {
    /// Source-language pool, one sentence per line.
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    /// Target-language pool, one sentence per line.
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
    /// Source-language embedding store.
    #[arg(long, value_name = "FILE")]
    pub src_emb: PathBuf,
    /// Target-language embedding store.
    #[arg(long, value_name = "FILE")]
    pub tgt_emb: PathBuf,
    /// Mining strategy.
    #[arg(long, default_value = "wmd-prefetch", value_parser = ["wmd-prefetch", "ratio-margin"])]
    pub strategy: String,
    /// WMD candidates per source sentence after centroid prefetching.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Neighbourhood size of the ratio margin.
    #[arg(long, default_value_t = 5)]
    pub k_margin: usize,
    /// Fraction of mined pairs to keep, best first.
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,
    /// Drop pairs whose source or target text was already kept.
    #[arg(long)]
    pub dedup: bool,
    /// Remapping applied before WMD mining; repeat to compose.
    #[arg(long, value_name = "FILE", action = clap::ArgAction::Append)]
    pub map: Vec<PathBuf>,
    /// Sentence projection applied before margin mining.
    #[arg(long, value_name = "FILE")]
    pub projection: Option<PathBuf>,
    /// How lines are split into tokens.
    #[arg(long, value_enum, default_value = "default")]
    pub tokenizer: TokenizerArg,
    /// Output TSV (`source<TAB>target<TAB>score`).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LangIdArg {
    /// No language filtering.
    None,
    /// Character-trigram classifier trained on the two pools.
    Trigram,
    /// Per-line labels from an external identifier.
    Labels,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Source,
    Target,
}

#[derive(Debug, Args, Serialize)]
pub struct FilterArgs {
    /// Scored pairs to filter (`source<TAB>target<TAB>score`).
    #[arg(long, value_name = "FILE", required_unless_present = "corpus", conflicts_with = "corpus")]
    pub pairs: Option<PathBuf>,
    /// Monolingual corpus to filter instead of pairs.
    #[arg(long, value_name = "FILE")]
    pub corpus: Option<PathBuf>,
    /// Language side of --corpus.
    #[arg(long, value_enum, default_value = "source")]
    pub side: SideArg,
    /// Minimum sentence length in tokens.
    #[arg(long, default_value_t = 3)]
    pub min_tokens: usize,
    /// Maximum sentence length in tokens.
    #[arg(long, default_value_t = 30)]
    pub max_tokens: usize,
    /// Pairs whose character overlap exceeds this are dropped.
    #[arg(long, default_value_t = 0.5)]
    pub max_overlap: f64,
    /// Language filtering.
    #[arg(long, value_enum, default_value = "none")]
    pub langid: LangIdArg,
    /// Source-language sample for the trigram classifier [default: the pair sources].
    #[arg(long, value_name = "FILE")]
    pub src_pool: Option<PathBuf>,
    /// Target-language sample for the trigram classifier [default: the pair targets].
    #[arg(long, value_name = "FILE")]
    pub tgt_pool: Option<PathBuf>,
    /// Language labels for the source sentences, one per line.
    #[arg(long, value_name = "FILE")]
    pub src_labels: Option<PathBuf>,
    /// Language labels for the target sentences, one per line.
    #[arg(long, value_name = "FILE")]
    pub tgt_labels: Option<PathBuf>,
    /// Expected source label.
    #[arg(long, value_name = "LABEL")]
    pub src_lang: Option<String>,
    /// Expected target label.
    #[arg(long, value_name = "LABEL")]
    pub tgt_lang: Option<String>,
    /// How lines are split into tokens.
    #[arg(long, value_enum, default_value = "default")]
    pub tokenizer: TokenizerArg,
    /// Output file, same format as the input.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct RemapArgs {
    /// Mined pairs (`source<TAB>target<TAB>score`).
    #[arg(long, value_name = "FILE")]
    pub pairs: PathBuf,
    /// Source-language static-word store.
    #[arg(long, value_name = "FILE")]
    pub src_emb: PathBuf,
    /// Target-language static-word store.
    #[arg(long, value_name = "FILE")]
    pub tgt_emb: PathBuf,
    /// Orthogonal Procrustes (clp) or shared-direction removal (umd).
    #[arg(long, default_value = "clp", value_parser = ["clp", "umd"])]
    pub kind: String,
    /// Minimum transport mass for a word alignment.
    #[arg(long, default_value_t = uscore::remap::DEFAULT_MIN_FLOW)]
    pub min_flow: f64,
    /// Mean-center both sides before a clp fit.
    #[arg(long)]
    pub center: bool,
    /// Length-normalize both sides before a clp fit.
    #[arg(long)]
    pub normalize: bool,
    /// How lines are split into tokens.
    #[arg(long, value_enum, default_value = "default")]
    pub tokenizer: TokenizerArg,
    /// Output map store.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Also write the remapped source store here.
    #[arg(long, value_name = "FILE")]
    pub out_src_emb: Option<PathBuf>,
    /// Also write the remapped target store here.
    #[arg(long, value_name = "FILE")]
    pub out_tgt_emb: Option<PathBuf>,
    /// Also write the aligned word pairs here.
    #[arg(long, value_name = "FILE")]
    pub word_pairs: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainSentArgs {
    /// Mined pairs (`source<TAB>target<TAB>score`).
    #[arg(long, value_name = "FILE")]
    pub pairs: PathBuf,
    /// Source store: word vectors to pool, or sentence vectors keyed by pair row.
    #[arg(long, value_name = "FILE")]
    pub src_emb: PathBuf,
    /// Target store: word vectors to pool, or sentence vectors keyed by pair row.
    #[arg(long, value_name = "FILE")]
    pub tgt_emb: PathBuf,
    /// Projection to continue from [default: identity].
    #[arg(long, value_name = "FILE")]
    pub init: Option<PathBuf>,
    /// Softmax temperature.
    #[arg(long, default_value_t = 0.05)]
    pub temperature: f64,
    #[arg(long, default_value_t = 256)]
    /// Pairs per batch.
    pub batch_size: usize,
    /// AdamW learning rate.
    #[arg(long, default_value_t = 5e-5)]
    pub lr: f64,
    /// Passes over the pairs.
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Whether the positive pair is part of the softmax denominator.
    #[arg(long, default_value = "exclude-positive", value_parser = ["exclude-positive", "include-positive"])]
    pub denominator: String,
    /// Decoupled weight decay.
    #[arg(long, default_value_t = 0.01)]
    pub weight_decay: f64,
    /// Shuffle seed.
    #[arg(long)]
    pub seed: u64,
    /// How lines are split into tokens.
    #[arg(long, value_enum, default_value = "default")]
    pub tokenizer: TokenizerArg,
    /// Output projection store.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Also write the per-batch loss log here.
    #[arg(long, value_name = "FILE")]
    pub loss_log: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainLmArgs {
    /// Training corpus, one sentence per line.
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// N-gram order.
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// `witten-bell` or `add-k:<k>`.
    #[arg(long, default_value = "witten-bell")]
    pub smoothing: String,
    /// Closed vocabulary, one word per line [default: every training word].
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
    /// How lines are split into tokens.
    #[arg(long, value_enum, default_value = "default")]
    pub tokenizer: TokenizerArg,
    /// Output model file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct SelflearnArgs {
    /// Which model the loop trains.
    #[arg(long, default_value = "remap", value_parser = ["remap", "contrastive"])]
    pub track: String,
    /// Source-language pool.
    #[arg(long, value_name = "FILE")]
    pub src: PathBuf,
    /// Target-language pool.
    #[arg(long, value_name = "FILE")]
    pub tgt: PathBuf,
    /// Source-language embedding store.
    #[arg(long, value_name = "FILE")]
    pub src_emb: PathBuf,
    /// Target-language embedding store.
    #[arg(long, value_name = "FILE")]
    pub tgt_emb: PathBuf,
    /// Mine-and-train rounds.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,
    /// Remapping kind for the remap track.
    #[arg(long, default_value = "clp", value_parser = ["clp", "umd"])]
    pub kind: String,
    /// WMD candidates per source sentence after centroid prefetching.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Neighbourhood size of the ratio margin.
    #[arg(long, default_value_t = 5)]
    pub k_margin: usize,
    /// Fraction of mined pairs kept per round.
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,
    /// Drop pairs whose source or target text was already kept (remap track).
    #[arg(long)]
    pub dedup: bool,
    /// Minimum sentence length in tokens (remap track).
    #[arg(long, default_value_t = 3)]
    pub min_tokens: usize,
    /// Maximum sentence length in tokens (remap track).
    #[arg(long, default_value_t = 30)]
    pub max_tokens: usize,
    /// Pairs whose character overlap exceeds this are dropped (remap track).
    #[arg(long, default_value_t = 0.5)]
    pub max_overlap: f64,
    /// Minimum transport mass for a word alignment.
    #[arg(long, default_value_t = uscore::remap::DEFAULT_MIN_FLOW)]
    pub min_flow: f64,
    /// Mean-center both sides before each clp fit.
    #[arg(long)]
    pub center: bool,
    /// Length-normalize both sides before each clp fit.
    #[arg(long)]
    pub normalize: bool,
    /// Softmax temperature (contrastive track).
    #[arg(long, default_value_t = 0.05)]
    pub temperature: f64,
    /// Pairs per batch (contrastive track).
    #[arg(long, default_value_t = 256)]
    pub batch_size: usize,
    /// AdamW learning rate (contrastive track).
    #[arg(long, default_value_t = 5e-5)]
    pub lr: f64,
    /// Passes over the mined pairs per round (contrastive track).
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Whether the positive pair is part of the softmax denominator.
    #[arg(long, default_value = "exclude-positive", value_parser = ["exclude-positive", "include-positive"])]
    pub denominator: String,
    /// Decoupled weight decay (contrastive track).
    #[arg(long, default_value_t = 0.01)]
    pub weight_decay: f64,
    /// Base seed; round k trains with seed + k.
    #[arg(long)]
    pub seed: u64,
    /// Gold alignment for P@1: line i holds the target index of source sentence i.
    #[arg(long, value_name = "FILE")]
    pub gold: Option<PathBuf>,
    /// Judged segments (`source<TAB>hypothesis<TAB>score`) for Pearson's r per round.
    #[arg(long, value_name = "FILE")]
    pub dev: Option<PathBuf>,
    /// How lines are split into tokens.
    #[arg(long, value_enum, default_value = "default")]
    pub tokenizer: TokenizerArg,
    /// Directory for per-round artifacts, reports.tsv and manifest.json.
    #[arg(long, value_name = "DIR")]
    pub run_dir: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Metric scores (`index<TAB>score`).
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,
    /// Judged segments (`source<TAB>hypothesis<TAB>score[<TAB>reference]`).
    #[arg(long, value_name = "FILE")]
    pub dataset: PathBuf,
    /// Metric name for the report.
    #[arg(long, default_value = "uscore")]
    pub metric: String,
    /// Language pair for the report.
    #[arg(long, default_value = "-")]
    pub langpair: String,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Scores of the first metric.
    #[arg(long, value_name = "FILE")]
    pub scores_a: PathBuf,
    /// Scores of the second metric.
    #[arg(long, value_name = "FILE")]
    pub scores_b: PathBuf,
    /// Judged segments the scores refer to.
    #[arg(long, value_name = "FILE")]
    pub dataset: PathBuf,
    /// Bootstrap resamples.
    #[arg(long, default_value_t = 10000)]
    pub resamples: usize,
    /// Bootstrap seed.
    #[arg(long)]
    pub seed: u64,
    /// Also run the two-sample t-test over score-judgment products.
    #[arg(long)]
    pub t_test: bool,
    /// Write the result here instead of standard output.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// `word` writes remap-track pools, `sentence` contrastive-track pools.
    #[arg(long, default_value = "word", value_parser = ["word", "sentence"])]
    pub kind: String,
    /// Sentences per side.
    #[arg(long, default_value_t = 1000)]
    pub sentences: usize,
    /// Generator seed.
    #[arg(long)]
    pub seed: u64,
    /// Output directory (src.txt, tgt.txt, src.useb, tgt.useb, gold.txt).
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    #[serde(skip)]
    pub common: Common,
}
