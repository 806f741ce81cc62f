use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log::info;

use gecgen::decode::{RemoteScorer, Scorer, DEFAULT_CHANNEL_PENALTY};
use gecgen::metrics::{read_m2, DEFAULT_BETA};
use gecgen::noise::RuleExtractionConfig;
use gecgen::pipeline::{self, AtomicOutput, DevSet, PipelineConfig, Summary, TuneMetric};
use gecgen::subword::{SubwordModel, WhitespaceSegmenter, DEFAULT_VOCAB_SIZE};
use gecgen::{Error, Result};

/// Build grammatical error correction corpora from revision histories and
/// round-trip translation, decode iteratively, and score the output.
#[derive(Parser)]
#[command(name = "gecgen", version)]
struct Cli {
    /// TOML configuration file. Flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// More log output on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine example pairs from a MediaWiki history dump.
    ExtractRevisions(ExtractArgs),
    /// Synthesise example pairs by round-trip translation.
    BuildRtt(RttArgs),
    /// Train a BPE wordpiece model.
    TrainSubword(SubwordArgs),
    /// Iteratively decode sentences.
    Decode(DecodeArgs),
    /// Grid-search the decoding threshold and iteration count.
    TuneThreshold(TuneArgs),
    /// Score system output with F0.5 and/or GLEU.
    Evaluate(EvaluateArgs),
    /// Count sentences, words and identity pairs in a corpus.
    Stats(StatsArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// Uncompressed XML history dump.
    dump: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Write targets of dropped identity pairs here, one per line.
    #[arg(long)]
    discarded_identities: Option<PathBuf>,
    #[arg(long)]
    max_page_bytes: Option<u64>,
    #[arg(long)]
    downsample_base: Option<f64>,
    #[arg(long)]
    p_cut: Option<f64>,
    #[arg(long)]
    max_wordpieces: Option<usize>,
    #[arg(long)]
    max_edit_distance: Option<usize>,
    #[arg(long)]
    subword_model: Option<PathBuf>,
    #[arg(long)]
    spelling_rate: Option<f64>,
    #[arg(long)]
    keep_prob: Option<f64>,
}

#[derive(Args)]
struct RttArgs {
    /// Clean sentences: plain text lines or example-pair JSON Lines.
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    bridge: Option<String>,
    #[arg(long)]
    identity_fraction: Option<f64>,
    #[arg(long)]
    spelling_rate: Option<f64>,
    /// Edit rules as JSON Lines.
    #[arg(long, conflicts_with = "mine_rules_from")]
    edit_rules: Option<PathBuf>,
    /// Mine edit rules from an example-pair corpus instead.
    #[arg(long)]
    mine_rules_from: Option<PathBuf>,
    /// Save the rules in use.
    #[arg(long)]
    write_rules: Option<PathBuf>,
    #[arg(long)]
    mock_table: Option<PathBuf>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    max_in_flight: Option<usize>,
}

#[derive(Args)]
struct SubwordArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_VOCAB_SIZE)]
    vocab_size: usize,
}

#[derive(Args)]
struct ScorerArgs {
    /// Remote scorer URL. Without it the local reference scorer is used.
    #[arg(long)]
    scorer_endpoint: Option<String>,
    /// Rewrite rules: edit-rule JSON Lines or `error<TAB>correction` lines.
    #[arg(long)]
    rewrites: Option<PathBuf>,
    /// Text used to estimate the reference scorer's bigram model.
    #[arg(long)]
    lm_corpus: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CHANNEL_PENALTY)]
    channel_penalty: f64,
}

#[derive(Args)]
struct DecodeArgs {
    /// Sentences: plain text lines or JSON Lines with a `source` field.
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[command(flatten)]
    scorer: ScorerArgs,
    #[arg(long)]
    beam: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct TuneArgs {
    /// Development set in M2 format; tunes F0.5.
    #[arg(long, required_unless_present = "source")]
    m2: Option<PathBuf>,
    /// Development sources, one per line; tunes GLEU with --refs.
    #[arg(long, requires = "refs", conflicts_with = "m2")]
    source: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    refs: Vec<PathBuf>,
    #[command(flatten)]
    scorer: ScorerArgs,
    #[arg(long)]
    beam: Option<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    thresholds: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    iterations: Vec<usize>,
    /// Tune on a random subset of this many sentences.
    #[arg(long)]
    sample_size: Option<usize>,
    /// Share of corrected sentences in the subset; defaults to the share in
    /// the full development set.
    #[arg(long, requires = "sample_size")]
    modified_ratio: Option<f64>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// System output, one tokenised sentence per line.
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long, required_unless_present = "source")]
    m2: Option<PathBuf>,
    #[arg(long, requires = "refs")]
    source: Option<PathBuf>,
    #[arg(long, num_args = 1..)]
    refs: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
}

#[derive(Args)]
struct StatsArgs {
    corpus: PathBuf,
}

/// Opens `path` for reading; `-` reads standard input.
fn open(path: &Path) -> Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(io::stdin().lock()));
    }
    File::open(path)
        .map(|f| Box::new(BufReader::new(f)) as Box<dyn BufRead>)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn lines(path: &Path) -> Result<Vec<String>> {
    pipeline::read_lines(open(path)?)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn resolve_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    set(&mut config.global_seed, cli.seed);
    set(&mut config.workers, cli.workers);
    match &cli.command {
        Command::ExtractRevisions(a) => {
            set(&mut config.ingest.max_page_bytes, a.max_page_bytes);
            set(&mut config.ingest.downsample_base, a.downsample_base);
            set(&mut config.extract.p_cut, a.p_cut);
            set(&mut config.extract.max_wordpieces, a.max_wordpieces);
            if a.max_edit_distance.is_some() {
                config.extract.max_edit_distance = a.max_edit_distance;
            }
            if a.subword_model.is_some() {
                config.extract.subword_model = a.subword_model.clone();
            }
            set(&mut config.noise.spelling.rate, a.spelling_rate);
            set(&mut config.noise.keep_prob, a.keep_prob);
        }
        Command::BuildRtt(a) => {
            set(&mut config.rtt.bridge_lang, a.bridge.clone());
            set(&mut config.rtt.identity_fraction, a.identity_fraction);
            set(&mut config.rtt.spelling.rate, a.spelling_rate);
            if a.edit_rules.is_some() {
                config.rtt.edit_rules = a.edit_rules.clone();
            }
            if a.mock_table.is_some() {
                config.rtt.provider.mock_table = a.mock_table.clone();
            }
            if a.endpoint.is_some() {
                config.rtt.provider.endpoint = a.endpoint.clone();
                config.rtt.provider.mock_table = None;
            }
            set(&mut config.rtt.provider.max_in_flight, a.max_in_flight);
        }
        Command::Decode(a) => {
            set(&mut config.decode.beam, a.beam);
            set(&mut config.decode.threshold, a.threshold);
            set(&mut config.decode.max_iter, a.max_iter);
        }
        Command::TuneThreshold(a) => set(&mut config.decode.beam, a.beam),
        _ => {}
    }
    config.validate()?;
    Ok(config)
}

fn make_scorer(args: &ScorerArgs, config: &PipelineConfig) -> Result<Box<dyn Scorer>> {
    if let Some(endpoint) = &args.scorer_endpoint {
        let timeout = Duration::from_secs(config.rtt.provider.timeout_secs);
        return Ok(Box::new(RemoteScorer::new(endpoint.clone(), timeout)));
    }
    let lm = args
        .lm_corpus
        .as_deref()
        .ok_or_else(|| Error::config("the reference scorer needs --lm-corpus (or pass --scorer-endpoint)"))?;
    Ok(Box::new(pipeline::load_reference_scorer(args.rewrites.as_deref(), lm, args.channel_penalty)?))
}

fn extract_revisions(a: &ExtractArgs, config: &PipelineConfig) -> Result<String> {
    let dump = open(&a.dump)?;
    let mut out = AtomicOutput::create(&a.output)?;
    let mut side = a.discarded_identities.as_deref().map(AtomicOutput::create).transpose()?;
    let discarded = side.as_mut().map(|w| w as &mut dyn Write);
    let summary = match &config.extract.subword_model {
        Some(path) => {
            let model = SubwordModel::read_from(open(path)?)?;
            pipeline::run_extract_revisions(config, dump, &mut out, discarded, &model)?
        }
        None => {
            log::warn!("no subword model configured; wordpiece limits count whitespace words");
            pipeline::run_extract_revisions(config, dump, &mut out, discarded, &WhitespaceSegmenter)?
        }
    };
    out.commit()?;
    if let Some(side) = side {
        side.commit()?;
    }
    Ok(Summary::new("extract-revisions", config, summary).to_json_line())
}

fn build_rtt(a: &RttArgs, config: &PipelineConfig) -> Result<String> {
    let rules = match (&config.rtt.edit_rules, &a.mine_rules_from) {
        (_, Some(corpus)) => pipeline::mine_edit_rules(open(corpus)?, &RuleExtractionConfig::default())?,
        (Some(path), None) => pipeline::read_edit_rules(open(path)?)?,
        (None, None) => Vec::new(),
    };
    if let Some(path) = &a.write_rules {
        let mut w = AtomicOutput::create(path)?;
        pipeline::write_edit_rules(&rules, &mut w)?;
        w.commit()?;
    }
    let provider = pipeline::make_provider(&config.rtt.provider)?;
    let input = open(&a.input)?;
    let mut out = AtomicOutput::create(&a.output)?;
    let summary = pipeline::run_build_rtt(config, input, &rules, provider.as_ref(), &mut out)?;
    out.commit()?;
    Ok(Summary::new("build-rtt", config, summary).to_json_line())
}

fn train_subword(a: &SubwordArgs, config: &PipelineConfig) -> Result<String> {
    let (model, summary) = pipeline::train_subword(open(&a.input)?, a.vocab_size)?;
    let mut out = AtomicOutput::create(&a.output)?;
    model.write_to(&mut out)?;
    out.commit()?;
    Ok(Summary::new("train-subword", config, summary).to_json_line())
}

fn decode(a: &DecodeArgs, config: &PipelineConfig) -> Result<String> {
    let scorer = make_scorer(&a.scorer, config)?;
    let input = open(&a.input)?;
    let mut out = AtomicOutput::create(&a.output)?;
    let summary = pipeline::run_decode(config, input, scorer.as_ref(), &mut out)?;
    out.commit()?;
    Ok(Summary::new("decode", config, summary).to_json_line())
}

fn reference_sets(paths: &[PathBuf], n: usize) -> Result<Vec<Vec<String>>> {
    let sets = paths.iter().map(|p| lines(p)).collect::<Result<Vec<_>>>()?;
    if sets.iter().any(|s| s.len() != n) {
        return Err(Error::invalid("every reference file must have one line per source"));
    }
    Ok(sets)
}

fn tune(a: &TuneArgs, config: &PipelineConfig) -> Result<String> {
    let (dev, metric) = match (&a.m2, &a.source) {
        (Some(path), _) => (DevSet::from_m2(&read_m2(open(path)?)?), TuneMetric::FBeta),
        (None, Some(path)) => {
            let sources = lines(path)?;
            let sets = reference_sets(&a.refs, sources.len())?;
            let per_sentence: Vec<Vec<String>> =
                (0..sources.len()).map(|i| sets.iter().map(|s| s[i].clone()).collect()).collect();
            (DevSet::from_references(&sources, &per_sentence)?, TuneMetric::Gleu)
        }
        (None, None) => return Err(Error::config("pass --m2 or --source with --refs")),
    };
    let dev = match a.sample_size {
        Some(size) => {
            let modified: Vec<bool> = (0..dev.len()).map(|i| dev.is_modified(i)).collect();
            let ratio = a
                .modified_ratio
                .unwrap_or_else(|| modified.iter().filter(|&&m| m).count() as f64 / modified.len().max(1) as f64);
            let picked = pipeline::sample_dev_subset(&modified, ratio, size, config.global_seed)?;
            info!("tuning on {} of {} sentences", picked.len(), dev.len());
            dev.subset(&picked)
        }
        None => dev,
    };
    let scorer = make_scorer(&a.scorer, config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::config(e.to_string()))?;
    let result = pool.install(|| {
        pipeline::tune_threshold(&dev, scorer.as_ref(), config.decode.beam, &a.thresholds, &a.iterations, metric)
    })?;
    Ok(Summary::new("tune-threshold", config, result).to_json_line())
}

#[derive(serde::Serialize)]
struct Evaluation {
    #[serde(flatten)]
    report: Option<gecgen::metrics::MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gleu: Option<f64>,
}

fn evaluate(a: &EvaluateArgs, config: &PipelineConfig) -> Result<String> {
    let hyps = lines(&a.hyp)?;
    let report = match &a.m2 {
        Some(path) => Some(pipeline::evaluate_m2(&read_m2(open(path)?)?, &hyps, a.beta)?),
        None => None,
    };
    let gleu = match &a.source {
        Some(path) => {
            let sources = lines(path)?;
            let sets = reference_sets(&a.refs, sources.len())?;
            Some(pipeline::evaluate_gleu(&sources, &hyps, &sets)?)
        }
        None => None,
    };
    Ok(Summary::new("evaluate", config, Evaluation { report, gleu }).to_json_line())
}

fn stats(a: &StatsArgs, config: &PipelineConfig) -> Result<String> {
    let stats = pipeline::corpus_stats(open(&a.corpus)?)?;
    Ok(Summary::new("stats", config, stats).to_json_line())
}

fn run(cli: &Cli) -> Result<String> {
    let config = resolve_config(cli)?;
    match &cli.command {
        Command::ExtractRevisions(a) => extract_revisions(a, &config),
        Command::BuildRtt(a) => build_rtt(a, &config),
        Command::TrainSubword(a) => train_subword(a, &config),
        Command::Decode(a) => decode(a, &config),
        Command::TuneThreshold(a) => tune(a, &config),
        Command::Evaluate(a) => evaluate(a, &config),
        Command::Stats(a) => stats(a, &config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { pipeline::EXIT_USAGE as u8 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(pipeline::exit_code(&e) as u8)
        }
    }
}
