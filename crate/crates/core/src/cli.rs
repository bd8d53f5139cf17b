//! The `sense-embed` command line.
//!
//! Every command that writes artifacts also writes `config.json` (the fully
//! resolved configuration) and `manifest.json` (tool version and SHA-256
//! digests of inputs and outputs) into its output directory.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::baselines::{self, ContextFilter, PpmiConfig};
use crate::corpus::{Corpus, Vocabulary};
use crate::error::Error;
use crate::eval::{self, EvalOptions, Weighting};
use crate::induction::{self, CrpLabeler, Mode, TrainingConfig};
use crate::vectors::{self, cosine, SenseVector, Similarity, Tables};
use crate::wsi::{self, KeyEntry, LabelOptions, LabelSummary, Selection, Stoplist};

/// Environment variable naming the directory relative input paths are
/// resolved against.
pub const DATA_DIR_ENV: &str = "SENSE_EMBED_DATA";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_STRICT: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

pub const KEY_FILE: &str = "key.txt";
pub const CONFIG_FILE: &str = "config.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TRAIN_LOG_FILE: &str = "trainlog.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const PPMI_FILE: &str = "ppmi.txt";

#[derive(Debug, Parser)]
#[command(name = "sense-embed", version, about = "Multi-sense embeddings for word sense induction")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Directory relative input paths are resolved against.
    #[arg(long, env = DATA_DIR_ENV, global = true)]
    pub data_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train word and sense tables on a corpus.
    Train(TrainArgs),
    /// Label dataset instances with their nearest sense.
    Label(LabelArgs),
    /// Score a predicted key file against a gold key file.
    Eval(EvalArgs),
    /// Run a baseline system end to end.
    Baseline(BaselineArgs),
    /// Show the senses of a word and their nearest words.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fixed,
    Crp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SenseVectorArg {
    Centroid,
    Embedding,
}

impl From<SenseVectorArg> for SenseVector {
    fn from(v: SenseVectorArg) -> Self {
        match v {
            SenseVectorArg::Centroid => SenseVector::Centroid,
            SenseVectorArg::Embedding => SenseVector::Embedding,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimilarityArg {
    Cosine,
    Dot,
}

impl From<SimilarityArg> for Similarity {
    fn from(v: SimilarityArg) -> Self {
        match v {
            SimilarityArg::Cosine => Similarity::Cosine,
            SimilarityArg::Dot => Similarity::Dot,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SelectionArg {
    Conjunctive,
    Disjunctive,
}

impl From<SelectionArg> for Selection {
    fn from(v: SelectionArg) -> Self {
        match v {
            SelectionArg::Conjunctive => Selection::Conjunctive,
            SelectionArg::Disjunctive => Selection::Disjunctive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Binary,
}

/// Training overrides; each flag wins over the config file.
#[derive(Debug, Default, Args)]
pub struct TrainingFlags {
    /// JSON training configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Senses per multi-sense word in fixed mode.
    #[arg(long)]
    pub k: Option<usize>,
    /// New-sense weight in CRP mode.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub min_lr_ratio: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Subsampling threshold; `inf` disables subsampling.
    #[arg(long)]
    pub subsample: Option<f64>,
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Number of most frequent words that get several senses.
    #[arg(long)]
    pub multi_sense: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub similarity: Option<SimilarityArg>,
    /// Sense vector compared with the context during training.
    #[arg(long, value_enum)]
    pub assign_with: Option<SenseVectorArg>,
    #[arg(long)]
    pub sim_floor: Option<f64>,
    #[arg(long)]
    pub max_senses: Option<usize>,
    /// Let each sense step also update the shared output vectors.
    #[arg(long)]
    pub separate_updates: bool,
    /// Worker threads; 1 is deterministic.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl TrainingFlags {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self, data_dir: Option<&Path>) -> Result<TrainingConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => {
                let p = resolve_input(data_dir, p)?;
                let text = fs::read_to_string(&p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
            }
            None => TrainingConfig::default(),
        };
        if let Some(m) = self.mode {
            c.mode = match m {
                ModeArg::Fixed => Mode::Fixed,
                ModeArg::Crp => Mode::Crp,
            };
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v.into(); } )* };
        }
        set!(
            dim, k, gamma, window, negatives, lr, min_lr_ratio, epochs, subsample, min_count, multi_sense, seed,
            similarity, assign_with, sim_floor, max_senses, threads
        );
        if self.separate_updates {
            c.shared_updates = false;
        }
        c.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training corpus, one sentence per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Pre-trained tables used to initialize CRP mode.
    #[arg(long)]
    pub pretrained: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
    #[command(flatten)]
    pub training: TrainingFlags,
}

#[derive(Debug, Args)]
pub struct LabelOptionFlags {
    /// Stoplist file, one word per line (built-in English list by default).
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "conjunctive")]
    pub selection: SelectionArg,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Trained tables: a text directory or a `.bin` file.
    #[arg(long)]
    pub tables: PathBuf,
    /// Dataset: tab-separated instances or Senseval-style `.xml`.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Sense vector instances are compared with.
    #[arg(long, value_enum, default_value = "embedding")]
    pub label_with: SenseVectorArg,
    #[arg(long, value_enum, default_value = "cosine")]
    pub similarity: SimilarityArg,
    /// Fail on unknown targets.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub select: LabelOptionFlags,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Directory for `metrics.json`; the table is always printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = eval::DEFAULT_SPLITS)]
    pub splits: usize,
    #[arg(long, default_value_t = eval::DEFAULT_FRACTION)]
    pub fraction: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Weight targets by their instance counts.
    #[arg(long)]
    pub instance_weighted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    /// k-means over context vectors built from trained word vectors.
    WeKmeans,
    /// CRP sense learning over PPMI context vectors.
    CrpPpmi,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(value_enum)]
    pub name: BaselineKind,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Trained tables (we-kmeans).
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Clusters per target (we-kmeans).
    #[arg(long = "clusters", default_value_t = baselines::DEFAULT_KMEANS_K)]
    pub clusters: usize,
    #[arg(long, default_value_t = baselines::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Training corpus (crp-ppmi).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Context-distribution smoothing exponent (crp-ppmi); 1 is plain PPMI.
    #[arg(long, default_value_t = 1.0)]
    pub smoothing: f64,
    /// Learn senses for every multi-sense word, not only dataset targets.
    #[arg(long)]
    pub all_words: bool,
    #[command(flatten)]
    pub select: LabelOptionFlags,
    #[command(flatten)]
    pub training: TrainingFlags,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub tables: PathBuf,
    /// Query word.
    pub word: String,
    /// Nearest words listed per sense.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Strict(String),
    Mismatch(Error),
    Internal(Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Strict(_) => EXIT_STRICT,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Strict(m) => f.write_str(m),
            CliError::Mismatch(e) | CliError::Internal(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::UniverseMismatch { .. } => CliError::Mismatch(e),
            Error::Config(_) | Error::MissingVectors(_) => CliError::Usage(e.to_string()),
            e => CliError::Internal(e),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn resolve_input(data_dir: Option<&Path>, path: &Path) -> CliResult<PathBuf> {
    let p = match data_dir {
        Some(d) if path.is_relative() && !path.exists() => d.join(path),
        _ => path.to_path_buf(),
    };
    if !p.exists() {
        return Err(CliError::Usage(format!("input not found: {}", p.display())));
    }
    Ok(p)
}

fn create_dir(path: &Path) -> CliResult {
    fs::create_dir_all(path).map_err(|e| CliError::Internal(Error::io(path, e)))
}

fn sha256_file(path: &Path) -> Result<String, Error> {
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut h = Sha256::new();
    std::io::copy(&mut f, &mut h).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(h.finalize()))
}

#[derive(Debug, Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

/// Digests of a file, or of every file below a directory in sorted order.
fn digests(path: &Path) -> Result<Vec<FileDigest>, Error> {
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .collect();
        entries.sort();
        let mut out = Vec::new();
        for e in entries {
            out.extend(digests(&e)?);
        }
        Ok(out)
    } else {
        Ok(vec![FileDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        }])
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write `config.json` and then `manifest.json` covering `inputs` and the
/// given output files.
fn write_run_files<C: Serialize>(
    out_dir: &Path,
    command: &str,
    config: &C,
    inputs: &[&Path],
    outputs: &[PathBuf],
) -> Result<(), Error> {
    let config_path = out_dir.join(CONFIG_FILE);
    write_json(&config_path, &serde_json::json!({ "command": command, "config": config }))?;
    let mut ins = Vec::new();
    for p in inputs {
        ins.extend(digests(p)?);
    }
    let mut outs = digests(&config_path)?;
    for p in outputs {
        outs.extend(digests(p)?);
    }
    let manifest = serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "inputs": ins,
        "outputs": outs,
    });
    write_json(&out_dir.join(MANIFEST_FILE), &manifest)
}

fn read_corpus(path: &Path, min_count: u64) -> CliResult<(Vocabulary, Corpus)> {
    let open = || File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e));
    let vocab = Vocabulary::from_reader(open()?, min_count)?;
    let corpus = Corpus::from_reader(open()?, &vocab)?;
    log::info!(
        "corpus: {} sentences, {} tokens, vocabulary {}",
        corpus.sentences().len(),
        corpus.num_tokens(),
        vocab.len()
    );
    Ok((vocab, corpus))
}

fn load_stoplist(data_dir: Option<&Path>, path: &Option<PathBuf>) -> CliResult<Stoplist> {
    match path {
        Some(p) => Ok(Stoplist::load(&resolve_input(data_dir, p)?)?),
        None => Ok(Stoplist::default()),
    }
}

fn write_key_file(path: &Path, entries: &[KeyEntry]) -> Result<(), Error> {
    fs::write(path, wsi::key_bytes(entries)).map_err(|e| Error::io(path, e))
}

pub fn cmd_train(args: &TrainArgs, data_dir: Option<&Path>) -> CliResult {
    let corpus_path = resolve_input(data_dir, &args.corpus)?;
    let pretrained = args.pretrained.as_ref().map(|p| resolve_input(data_dir, p)).transpose()?;
    let config = args.training.resolve(data_dir)?;
    if pretrained.is_some() && config.mode != Mode::Crp {
        return Err(CliError::Usage("--pretrained requires --mode crp".into()));
    }
    let (vocab, corpus) = read_corpus(&corpus_path, config.min_count)?;
    let output = match &pretrained {
        Some(p) => {
            let t = vectors::load_tables(p)?;
            if t.words.dim() != config.dim {
                return Err(CliError::Usage(format!(
                    "pre-trained vectors have dimension {}, config says {}",
                    t.words.dim(),
                    config.dim
                )));
            }
            let (words, senses) = induction::crp_pretrain_init(&vocab, &t.vocab, &t.words, config.multi_sense)?;
            induction::train_from(&corpus, &vocab, &config, words, senses)?
        }
        None => induction::train(&corpus, &vocab, &config)?,
    };
    create_dir(&args.out)?;
    let tables_path = match args.format {
        FormatArg::Text => args.out.join("tables"),
        FormatArg::Binary => args.out.join("tables.bin"),
    };
    vectors::save_tables(&tables_path, &vocab, &output.words, &output.senses)?;
    let log_path = args.out.join(TRAIN_LOG_FILE);
    let f = File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
    output.log.write_jsonl(BufWriter::new(f))?;
    let mut inputs: Vec<&Path> = vec![&corpus_path];
    if let Some(p) = &pretrained {
        inputs.push(p);
    }
    #[derive(Serialize)]
    struct Resolved<'a> {
        corpus: &'a Path,
        pretrained: Option<&'a Path>,
        out: &'a Path,
        format: &'static str,
        training: &'a TrainingConfig,
    }
    let resolved = Resolved {
        corpus: &corpus_path,
        pretrained: pretrained.as_deref(),
        out: &args.out,
        format: match args.format {
            FormatArg::Text => "text",
            FormatArg::Binary => "binary",
        },
        training: &config,
    };
    write_run_files(&args.out, "train", &resolved, &inputs, &[tables_path.clone(), log_path])?;
    eprintln!(
        "trained {} words, {} senses; tables in {}",
        vocab.len(),
        output.senses.total_senses(),
        tables_path.display()
    );
    Ok(())
}

/// Tables stored under a training output directory, or at the path itself.
fn locate_tables(path: &Path) -> PathBuf {
    for candidate in [path.join("tables"), path.join("tables.bin")] {
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

pub fn cmd_label(args: &LabelArgs, data_dir: Option<&Path>) -> CliResult {
    let tables_path = locate_tables(&resolve_input(data_dir, &args.tables)?);
    let dataset_path = resolve_input(data_dir, &args.dataset)?;
    let stoplist = load_stoplist(data_dir, &args.select.stoplist)?;
    let tables = vectors::load_tables(&tables_path)?;
    let instances = wsi::load_dataset(&dataset_path)?;
    let opts = LabelOptions {
        selection: args.select.selection.into(),
        label_with: args.label_with.into(),
        similarity: args.similarity.into(),
    };
    let labels = wsi::label_dataset(&instances, &tables, &stoplist, &opts);
    let summary = LabelSummary::from_labels(&labels);
    if !summary.unknown_targets.is_empty() {
        let msg = format!("unknown target(s): {}", summary.unknown_targets.join(", "));
        if args.strict {
            return Err(CliError::Strict(msg));
        }
        log::warn!("{msg}");
        eprintln!("warning: {msg}");
    }
    create_dir(&args.out)?;
    let key_path = args.out.join(KEY_FILE);
    let entries: Vec<KeyEntry> = labels.iter().map(|l| l.key_entry()).collect();
    write_key_file(&key_path, &entries)?;
    let summary_path = args.out.join(SUMMARY_FILE);
    write_json(&summary_path, &summary)?;
    #[derive(Serialize)]
    struct Resolved<'a> {
        tables: &'a Path,
        dataset: &'a Path,
        stoplist: Option<&'a PathBuf>,
        strict: bool,
        labeling: &'a LabelOptions,
    }
    let resolved = Resolved {
        tables: &tables_path,
        dataset: &dataset_path,
        stoplist: args.select.stoplist.as_ref(),
        strict: args.strict,
        labeling: &opts,
    };
    write_run_files(&args.out, "label", &resolved, &[&tables_path, &dataset_path], &[key_path, summary_path])?;
    eprintln!(
        "labeled {} instances; {} OOV context words; {} zero-support contexts",
        summary.instances, summary.oov_context_words, summary.zero_support
    );
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs, data_dir: Option<&Path>) -> CliResult {
    let gold_path = resolve_input(data_dir, &args.gold)?;
    let pred_path = resolve_input(data_dir, &args.pred)?;
    let gold = wsi::load_key(&gold_path)?;
    let pred = wsi::load_key(&pred_path)?;
    let opts = EvalOptions {
        n_splits: args.splits,
        fraction: args.fraction,
        seed: args.seed,
        weighting: if args.instance_weighted {
            Weighting::Instance
        } else {
            Weighting::Target
        },
    };
    let report = eval::evaluate(&gold, &pred, &opts).map_err(|e| match e {
        Error::Domain(m) => CliError::Usage(m),
        e => e.into(),
    })?;
    print!("{}", report.table());
    if let Some(out) = &args.out {
        create_dir(out)?;
        let metrics = out.join(METRICS_FILE);
        write_json(&metrics, &report.to_json())?;
        write_run_files(out, "eval", &opts, &[&gold_path, &pred_path], &[metrics])?;
    }
    Ok(())
}

pub fn cmd_baseline(args: &BaselineArgs, data_dir: Option<&Path>) -> CliResult {
    let dataset_path = resolve_input(data_dir, &args.dataset)?;
    let stoplist = load_stoplist(data_dir, &args.select.stoplist)?;
    let selection: Selection = args.select.selection.into();
    match args.name {
        BaselineKind::WeKmeans => {
            let vectors = args
                .vectors
                .as_ref()
                .ok_or_else(|| CliError::Usage("we-kmeans needs --vectors".into()))?;
            let tables_path = locate_tables(&resolve_input(data_dir, vectors)?);
            let seed = args.training.resolve(data_dir)?.seed;
            let instances = wsi::load_dataset(&dataset_path)?;
            let Tables { vocab, words, .. } = vectors::load_tables(&tables_path)?;
            let entries = baselines::we_kmeans(
                &instances,
                &vocab,
                &words,
                &stoplist,
                selection,
                args.clusters,
                seed,
                args.max_iter,
            )
            .map_err(|e| match e {
                Error::Domain(m) => CliError::Usage(m),
                e => e.into(),
            })?;
            create_dir(&args.out)?;
            let key_path = args.out.join(KEY_FILE);
            write_key_file(&key_path, &entries)?;
            let resolved = serde_json::json!({
                "baseline": args.name,
                "vectors": tables_path,
                "dataset": dataset_path,
                "clusters": args.clusters,
                "max_iter": args.max_iter,
                "seed": seed,
                "selection": selection,
            });
            write_run_files(&args.out, "baseline", &resolved, &[&tables_path, &dataset_path], &[key_path])?;
        }
        BaselineKind::CrpPpmi => {
            let corpus = args
                .corpus
                .as_ref()
                .ok_or_else(|| CliError::Usage("crp-ppmi needs --corpus".into()))?;
            let corpus_path = resolve_input(data_dir, corpus)?;
            let mut config = args.training.resolve(data_dir)?;
            config.mode = Mode::Crp;
            let ppmi = PpmiConfig {
                window: config.window,
                smoothing: args.smoothing,
            };
            let instances = wsi::load_dataset(&dataset_path)?;
            let (vocab, corpus) = read_corpus(&corpus_path, config.min_count)?;
            let model = baselines::build_ppmi(&corpus, &vocab, ppmi.window, ppmi.smoothing, config.threads)?;
            let filter = ContextFilter::new(&vocab, &stoplist);
            let targets = baselines::dataset_targets(&instances, &vocab);
            let restrict = (!args.all_words).then_some(&targets);
            let mut labeler = CrpLabeler::for_worker(&config, 0);
            let senses = baselines::train_crp_ppmi(&corpus, &vocab, &model, &config, &filter, restrict, &mut labeler)?;
            let entries: Vec<KeyEntry> = instances
                .iter()
                .map(|i| baselines::label_ppmi_instance(i, &vocab, &model, &senses, &stoplist, selection).key_entry())
                .collect();
            create_dir(&args.out)?;
            let key_path = args.out.join(KEY_FILE);
            write_key_file(&key_path, &entries)?;
            let ppmi_path = args.out.join(PPMI_FILE);
            model.save(&vocab, &ppmi_path)?;
            let log_path = args.out.join(TRAIN_LOG_FILE);
            let f = File::create(&log_path).map_err(|e| Error::io(&log_path, e))?;
            senses.log.write_jsonl(BufWriter::new(f))?;
            let resolved = serde_json::json!({
                "baseline": args.name,
                "corpus": corpus_path,
                "dataset": dataset_path,
                "ppmi": ppmi,
                "all_words": args.all_words,
                "selection": selection,
                "training": config,
            });
            write_run_files(
                &args.out,
                "baseline",
                &resolved,
                &[&corpus_path, &dataset_path],
                &[key_path, ppmi_path, log_path],
            )?;
        }
    }
    eprintln!("baseline key written to {}", args.out.join(KEY_FILE).display());
    Ok(())
}

pub fn cmd_inspect(args: &InspectArgs, data_dir: Option<&Path>) -> CliResult {
    let tables_path = locate_tables(&resolve_input(data_dir, &args.tables)?);
    let t = vectors::load_tables(&tables_path)?;
    let query = crate::corpus::normalize_token(&args.word).unwrap_or_default();
    let id = t
        .vocab
        .id(&query)
        .ok_or_else(|| CliError::Usage(format!("`{}` is not in the vocabulary", args.word)))?;
    let nearest = |v: &[f32]| -> Vec<(String, f32)> {
        let mut scored: Vec<(u32, f32)> = (0..t.vocab.len() as u32)
            .filter(|&w| w != id)
            .map(|w| (w, cosine(v, t.words.vector(w)).unwrap_or(0.0)))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored
            .into_iter()
            .take(args.top)
            .map(|(w, s)| (t.vocab.word(w).to_owned(), s))
            .collect()
    };
    let mut out = std::io::stdout().lock();
    let fmt = |list: Vec<(String, f32)>| {
        list.iter()
            .map(|(w, s)| format!("{w}:{s:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let io = |e| CliError::Internal(Error::RawIo(e));
    writeln!(out, "{} (count {}, multi-sense {})", query, t.vocab.count(id), t.senses.is_multi_sense(id)).map_err(io)?;
    writeln!(out, "  word: {}", fmt(nearest(t.words.vector(id)))).map_err(io)?;
    for (k, s) in t.senses.senses(id).iter().enumerate() {
        writeln!(out, "  s{} (n={}): {}", k + 1, s.count, fmt(nearest(&s.embedding))).map_err(io)?;
    }
    Ok(())
}

/// Run a parsed command line and return its exit code.
pub fn run(cli: &Cli) -> i32 {
    let data_dir = cli.data_dir.as_deref();
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a, data_dir),
        Command::Label(a) => cmd_label(a, data_dir),
        Command::Eval(a) => cmd_eval(a, data_dir),
        Command::Baseline(a) => cmd_baseline(a, data_dir),
        Command::Inspect(a) => cmd_inspect(a, data_dir),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

/// Parse `args` and run; clap usage errors exit with [`EXIT_USAGE`].
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
