//! Batch command surface: train, predict, eval, stats, rules, corrupt,
//! convert.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{read_corpus, write_corpus, ConllOptions, CorpusError, CorpusFormat, Sentence, Style};
use crate::eval::{dep_srl_score, las, span_srl_score, span_to_dep_eval, EvalError, EvalReport};
use crate::models::{train, ModelConfig, ModelError, SrlModel, TrainConfig};
use crate::pruning::{build_syntactic_rule, prune_statistics, statistics_csv, HardPruneOptions, PruneError};
use crate::stg::{corrupt_corpus, CorruptionConfig};
use crate::treeops::{DistanceTuple, HeadChoice};

pub const THREADS_ENV: &str = "SRLLAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

fn data_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {}", path.display(), e))
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Config(m) => CliError::Config(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<PruneError> for CliError {
    fn from(e: PruneError) -> Self {
        CliError::Data(e.to_string())
    }
}

/// Model, training and path settings of one run. Relative paths resolve
/// against the config file's directory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub training: TrainConfig,
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Pretrained word vectors (text format).
    pub embeddings: Option<PathBuf>,
    /// JSON lines, one `[[f64]]` token-vector list per sentence.
    pub external_vectors: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    /// Predictions written by `predict`.
    pub output: Option<PathBuf>,
    /// Per-epoch metrics CSV; defaults to `<checkpoint>.metrics.csv`.
    pub metrics: Option<PathBuf>,
    /// Report written by `eval`.
    pub report: Option<PathBuf>,
    /// Overrides both `model.seed` and `training.seed`.
    pub seed: Option<u64>,
    /// Read CoNLL-2009 PLEMMA/PPOS/PHEAD/PDEPREL as the primary columns.
    #[serde(default)]
    pub predicted_columns: bool,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e)))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.train,
            &mut cfg.dev,
            &mut cfg.test,
            &mut cfg.embeddings,
            &mut cfg.external_vectors,
            &mut cfg.checkpoint,
            &mut cfg.output,
            &mut cfg.metrics,
            &mut cfg.report,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(seed) = cfg.seed {
            cfg.model.seed = seed;
            cfg.training.seed = seed;
        }
        cfg.model.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    fn conll(&self) -> ConllOptions {
        ConllOptions {
            predicted_columns: self.predicted_columns,
        }
    }

    fn required<'a>(p: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, CliError> {
        p.as_deref()
            .ok_or_else(|| CliError::Config(format!("missing key `{}`", key)))
    }
}

#[derive(Debug, Parser)]
#[command(name = "srllab", version, about = "Semantic role labeling experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SyntaxMetric {
    /// LAS of the alternate (PHEAD/PDEPREL) tree against the gold tree.
    Las,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model; writes the checkpoint and a metrics CSV.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Label a corpus with a trained model.
    Predict {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `test`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Overrides `output`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score predictions against gold; writes an EvalReport JSON.
    Eval {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        pred: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Leave senses out of dependency scoring.
        #[arg(long)]
        no_senses: bool,
        /// Attach a syntax score computed from the gold file.
        #[arg(long, value_enum)]
        syntax: Option<SyntaxMetric>,
        /// Attach this syntax score (LAS or Syn-F1, percent).
        #[arg(long, conflicts_with = "syntax")]
        syntax_score: Option<f64>,
    },
    /// Coverage and reduction of k-order pruning, one CSV row per k.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        #[arg(long)]
        include_root_children: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Most frequent distance tuples of gold arguments.
    Rules {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 20)]
        top_k: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Corrupt dependency trees at error rate `p`.
    Corrupt {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Score span predictions against dependency gold via head-finding.
    Convert {
        #[arg(long)]
        gold_dep: PathBuf,
        #[arg(long)]
        pred_span: PathBuf,
        #[arg(long, value_enum, default_value = "leftmost")]
        head_choice: HeadChoiceArg,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeadChoiceArg {
    Leftmost,
    Rightmost,
}

impl From<HeadChoiceArg> for HeadChoice {
    fn from(h: HeadChoiceArg) -> Self {
        match h {
            HeadChoiceArg::Leftmost => HeadChoice::Leftmost,
            HeadChoiceArg::Rightmost => HeadChoice::Rightmost,
        }
    }
}

/// Sizes the global thread pool from `SRLLAB_THREADS` when set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{} must be a positive integer, got {:?}", THREADS_ENV, v)))?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn load(path: &Path, opts: ConllOptions) -> Result<Vec<Sentence>, CliError> {
    read_corpus(path, opts).map_err(|e| data_err(path, e))
}

fn store(path: &Path, sentences: &[Sentence]) -> Result<(), CliError> {
    write_corpus(path, sentences).map_err(|e| data_err(path, e))
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| data_err(p, e)),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn attach_external(path: &Path, sentences: &mut [Sentence]) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| data_err(path, e))?;
    let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if rows.len() != sentences.len() {
        return Err(data_err(
            path,
            format!("{} vector lines for {} sentences", rows.len(), sentences.len()),
        ));
    }
    for (i, (line, s)) in rows.iter().zip(sentences.iter_mut()).enumerate() {
        let v: Vec<Vec<f64>> =
            serde_json::from_str(line).map_err(|e| data_err(path, format!("line {}: {}", i + 1, e)))?;
        s.ext_vectors = Some(v);
        s.validate()
            .map_err(|e| data_err(path, format!("line {}: {}", i + 1, e)))?;
    }
    Ok(())
}

fn load_with_vectors(cfg: &RunConfig, path: &Path) -> Result<Vec<Sentence>, CliError> {
    let mut s = load(path, cfg.conll())?;
    if let Some(ext) = &cfg.external_vectors {
        attach_external(ext, &mut s)?;
    }
    Ok(s)
}

fn metrics_path(cfg: &RunConfig, checkpoint: &Path) -> PathBuf {
    cfg.metrics.clone().unwrap_or_else(|| {
        let mut s = checkpoint.as_os_str().to_owned();
        s.push(".metrics.csv");
        PathBuf::from(s)
    })
}

pub fn command_train(config: &Path, seed: Option<u64>, epochs: Option<usize>) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(s) = seed {
        cfg.model.seed = s;
        cfg.training.seed = s;
    }
    if let Some(e) = epochs {
        cfg.training.epochs = e;
    }
    let train_path = RunConfig::required(&cfg.train, "train")?;
    let checkpoint = RunConfig::required(&cfg.checkpoint, "checkpoint")?.to_path_buf();
    let train_set = load_with_vectors(&cfg, train_path)?;
    let dev = cfg.dev.as_deref().map(|p| load_with_vectors(&cfg, p)).transpose()?;
    let mut model = SrlModel::with_embeddings(cfg.model.clone(), &train_set, cfg.embeddings.as_deref())?;
    let outcome = train(&mut model, &train_set, dev.as_deref(), &cfg.training)?;
    model.save(&checkpoint).map_err(|e| data_err(&checkpoint, e))?;
    write_text(Some(&metrics_path(&cfg, &checkpoint)), &outcome.metrics_csv())?;
    println!(
        "trained {} epochs, best dev F1 {:.2} at epoch {}",
        outcome.metrics.len(),
        outcome.best_f1,
        outcome.best_epoch
    );
    Ok(())
}

pub fn command_predict(config: &Path, input: Option<PathBuf>, output: Option<PathBuf>) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let checkpoint = RunConfig::required(&cfg.checkpoint, "checkpoint")?;
    let input = input
        .or_else(|| cfg.test.clone())
        .ok_or_else(|| CliError::Config("missing key `test`".into()))?;
    let output = output
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| CliError::Config("missing key `output`".into()))?;
    let model = SrlModel::load(checkpoint).map_err(|e| data_err(checkpoint, e))?;
    let sentences = load_with_vectors(&cfg, &input)?;
    let annotated = model.annotate(&sentences)?;
    store(&output, &annotated)?;
    println!("labeled {} sentences -> {}", annotated.len(), output.display());
    Ok(())
}

/// Scores `pred` against `gold`, in the style of the gold frames.
pub fn evaluate(gold: &[Sentence], pred: &[Sentence], include_senses: bool) -> Result<EvalReport, CliError> {
    let style = gold.iter().chain(pred).find_map(Sentence::style).unwrap_or(Style::Dep);
    Ok(match style {
        Style::Dep => dep_srl_score(gold, pred, include_senses)?,
        Style::Span => span_srl_score(gold, pred)?,
    })
}

fn alt_las(gold: &[Sentence]) -> Result<f64, CliError> {
    let mut g = Vec::new();
    let mut p = Vec::new();
    for (i, s) in gold.iter().enumerate() {
        match (&s.dep, &s.alt_dep) {
            (Some(a), Some(b)) => {
                g.push(a);
                p.push(b);
            }
            _ => {
                return Err(CliError::Data(format!(
                    "sentence {} lacks gold or alternate tree",
                    i + 1
                )))
            }
        }
    }
    Ok(las(&g, &p)?)
}

pub struct EvalArgs {
    pub config: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub pred: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub no_senses: bool,
    pub syntax: Option<SyntaxMetric>,
    pub syntax_score: Option<f64>,
}

pub fn command_eval(a: EvalArgs) -> Result<(), CliError> {
    let cfg = a
        .config
        .as_deref()
        .map(RunConfig::load)
        .transpose()?
        .unwrap_or_default();
    let gold = a
        .gold
        .or_else(|| cfg.test.clone())
        .ok_or_else(|| CliError::Config("missing --gold".into()))?;
    let pred = a
        .pred
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| CliError::Config("missing --pred".into()))?;
    let report_path = a.report.or_else(|| cfg.report.clone());
    let gold_s = load(&gold, cfg.conll())?;
    let pred_s = load(&pred, cfg.conll())?;
    let include_senses = !a.no_senses && (a.config.is_none() || cfg.model.include_senses);
    let mut report = evaluate(&gold_s, &pred_s, include_senses)?;
    let syntax = match (a.syntax, a.syntax_score) {
        (Some(SyntaxMetric::Las), _) => Some(alt_las(&gold_s)?),
        (None, s) => s,
    };
    if let Some(s) = syntax {
        report = report.with_syntax(s)?;
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_text(report_path.as_deref(), &json)?;
    if report_path.is_some() {
        print!("{}", report.to_table());
    }
    Ok(())
}

fn require_trees(path: &Path, corpus: &[Sentence]) -> Result<(), CliError> {
    match corpus.iter().position(|s| s.dep.is_none()) {
        Some(i) => Err(data_err(path, format!("sentence {} has no dependency tree", i + 1))),
        None => Ok(()),
    }
}

pub fn command_stats(
    corpus: &Path,
    k_min: usize,
    k_max: usize,
    include_root_children: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if k_min == 0 || k_min > k_max {
        return Err(CliError::Config(format!("invalid k range {}..={}", k_min, k_max)));
    }
    let c = load(corpus, ConllOptions::default())?;
    require_trees(corpus, &c)?;
    let stats = prune_statistics(&c, k_min..=k_max, HardPruneOptions { include_root_children })?;
    write_text(output, &statistics_csv(&stats))
}

/// `[[[d_p, d_a], count], ...]` for the retained tuples.
pub fn rules_json(corpus: &[Sentence], top_k: usize) -> String {
    let table = build_syntactic_rule(corpus, top_k);
    let rows: Vec<((usize, usize), usize)> = table
        .retained()
        .iter()
        .map(|&(DistanceTuple { d_p, d_a }, c)| ((d_p, d_a), c))
        .collect();
    serde_json::to_string(&rows).expect("rules serialize") + "\n"
}

pub fn command_rules(corpus: &Path, top_k: usize, output: Option<&Path>) -> Result<(), CliError> {
    let c = load(corpus, ConllOptions::default())?;
    require_trees(corpus, &c)?;
    write_text(output, &rules_json(&c, top_k))
}

pub fn command_corrupt(corpus: &Path, p: f64, seed: u64, output: &Path) -> Result<(), CliError> {
    let cfg = CorruptionConfig::new(p, seed).map_err(|e| CliError::Config(e.to_string()))?;
    let c = load(corpus, ConllOptions::default())?;
    require_trees(corpus, &c)?;
    let mut out = corrupt_corpus(&c, &cfg);
    if CorpusFormat::from_path(output) == CorpusFormat::Jsonl {
        for s in &mut out {
            s.dep = s.alt_dep.take();
        }
    }
    store(output, &out)
}

pub fn command_convert(
    gold_dep: &Path,
    pred_span: &Path,
    choice: HeadChoice,
    report: Option<&Path>,
) -> Result<(), CliError> {
    let gold = load(gold_dep, ConllOptions::default())?;
    let pred = load(pred_span, ConllOptions::default())?;
    let r = span_to_dep_eval(&gold, &pred, choice)?;
    let json = serde_json::to_string_pretty(&r).expect("report serializes") + "\n";
    write_text(report, &json)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Train { config, seed, epochs } => command_train(&config, seed, epochs),
        Command::Predict { config, input, output } => command_predict(&config, input, output),
        Command::Eval {
            config,
            gold,
            pred,
            report,
            no_senses,
            syntax,
            syntax_score,
        } => command_eval(EvalArgs {
            config,
            gold,
            pred,
            report,
            no_senses,
            syntax,
            syntax_score,
        }),
        Command::Stats {
            corpus,
            k_min,
            k_max,
            include_root_children,
            output,
        } => command_stats(&corpus, k_min, k_max, include_root_children, output.as_deref()),
        Command::Rules { corpus, top_k, output } => command_rules(&corpus, top_k, output.as_deref()),
        Command::Corrupt {
            corpus,
            p,
            seed,
            output,
        } => command_corrupt(&corpus, p, seed, &output),
        Command::Convert {
            gold_dep,
            pred_span,
            head_choice,
            report,
        } => command_convert(&gold_dep, &pred_span, head_choice.into(), report.as_deref()),
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::Data(e.to_string())
    }
}
