use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use topiclite::bench::{self, BenchConfig};
use topiclite::corpus::{self, Corpus, Language, RawDocument, StatsRow, Tokenizer};
use topiclite::eval::{self, HeldOutDoc};
use topiclite::lda::{self, Hyperparameters, TopicModel};
use topiclite::summarize::{self, CompressionRate, System};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_IO: u8 = 3;

/// Summarize a corpus, train LDA topic models on it and measure what the
/// compression costs in perplexity, topic divergence and time.
#[derive(Debug, Parser)]
#[command(name = "topiclite", version)]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = all cores). For `bench` this overrides the config.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log verbosity: off, error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print corpus statistics as CSV on standard output.
    Stats(StatsArgs),
    /// Summarize every document of a corpus.
    Summarize(SummarizeArgs),
    /// Train a topic model with collapsed Gibbs sampling.
    Train(TrainArgs),
    /// Score a model on held-out documents.
    Eval(EvalArgs),
    /// Run an experiment grid described by a JSON config.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct TokenizerArgs {
    /// Remove the built-in stopword list of this language.
    #[arg(long, value_name = "LANG")]
    stopwords: Option<Language>,
}

impl TokenizerArgs {
    fn tokenizer(&self) -> Tokenizer {
        match self.stopwords {
            Some(lang) => Tokenizer::with_default_stopwords(lang),
            None => Tokenizer::new(),
        }
    }
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// JSON-Lines corpus with `id`, `lang` and `text` fields.
    #[arg(long, conflicts_with = "dir", required_unless_present = "dir")]
    input: Option<PathBuf>,
    /// Directory of `.txt` files, one document per file.
    #[arg(long, requires = "lang")]
    dir: Option<PathBuf>,
    /// Language of the documents in `--dir`.
    #[arg(long)]
    lang: Option<Language>,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
}

#[derive(Debug, Args)]
struct SummarizeArgs {
    /// JSON-Lines corpus.
    #[arg(long)]
    input: PathBuf,
    /// Summarizer: bf, br or artex.
    #[arg(long, value_parser = parse_summarizer)]
    system: System,
    /// Compression rate in (0, 1].
    #[arg(long)]
    rate: f64,
    /// Output JSON-Lines file (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// JSON-Lines corpus.
    #[arg(long)]
    input: PathBuf,
    /// Number of topics.
    #[arg(long)]
    k: usize,
    /// Document-topic prior (default: 50/K).
    #[arg(long)]
    alpha: Option<f64>,
    /// Topic-word prior.
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    /// Gibbs sweeps.
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Sweeps discarded before phi is sampled.
    #[arg(long, default_value_t = 500)]
    burn_in: usize,
    /// Sweeps between phi samples.
    #[arg(long, default_value_t = 50)]
    sample_lag: usize,
    /// Model file to write.
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// JSON-Lines held-out corpus.
    #[arg(long)]
    test: PathBuf,
    /// Fold-in sweeps per test document.
    #[arg(long, default_value_t = 50)]
    fold_sweeps: usize,
    /// Also write the K x K topic divergence matrix to this CSV file.
    #[arg(long)]
    pairwise: Option<PathBuf>,
    #[command(flatten)]
    tokenizer: TokenizerArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
}

fn parse_summarizer(s: &str) -> Result<System, String> {
    match s.parse::<System>() {
        Ok(System::Full) => Err("FULL is not a summarizer; use bf, br or artex".into()),
        Ok(system) => Ok(system),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    id: &'a str,
    system: System,
    rate: f64,
    selected: &'a [usize],
    text: &'a str,
}

#[derive(Serialize)]
struct EvalReport {
    perplexity: f64,
    entropy_bits: f64,
    n_scored: usize,
    n_skipped: usize,
    js_total: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::new().filter_level(cli.log_level).init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not configure thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { EXIT_IO } else { EXIT_DATA })
        }
    }
}

fn run(cli: &Cli) -> topiclite::Result<()> {
    match &cli.command {
        Command::Stats(args) => stats(args),
        Command::Summarize(args) => summarize_corpus(args, cli.seed),
        Command::Train(args) => train(args, cli.seed),
        Command::Eval(args) => evaluate(args, cli.seed),
        Command::Bench(args) => run_bench(args, cli.threads),
    }
}

fn load_corpus(path: &Path, tokenizer: &Tokenizer) -> topiclite::Result<Corpus> {
    let raw = corpus::read_jsonl(path)?;
    Corpus::build(&raw, tokenizer)
}

fn output_writer(path: Option<&Path>) -> topiclite::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn stats(args: &StatsArgs) -> topiclite::Result<()> {
    let raw: Vec<RawDocument> = match (&args.input, &args.dir) {
        (Some(input), _) => corpus::read_jsonl(input)?,
        (None, Some(dir)) => corpus::read_text_dir(dir, args.lang.unwrap_or(Language::Other))?,
        (None, None) => unreachable!("clap requires --input or --dir"),
    };
    let corpus = Corpus::build(&raw, &args.tokenizer.tokenizer())?;
    let mut rows: Vec<StatsRow> = corpus::corpus_stats_by_language(&corpus)
        .iter()
        .map(|(lang, s)| StatsRow::new(lang.as_str(), s))
        .collect();
    rows.push(StatsRow::new("all", &corpus::corpus_stats(&corpus)));
    corpus::write_stats_csv(io::stdout().lock(), &rows)
}

fn summarize_corpus(args: &SummarizeArgs, seed: u64) -> topiclite::Result<()> {
    let rate = CompressionRate::new(args.rate)?;
    let corpus = load_corpus(&args.input, &args.tokenizer.tokenizer())?;
    let mut out = output_writer(args.output.as_deref())?;
    for doc in corpus.documents() {
        let summary = summarize::summarize(doc, args.system, rate, summarize::document_seed(seed, doc))?;
        let line = SummaryLine {
            id: &doc.id,
            system: summary.system,
            rate: summary.rate.value(),
            selected: &summary.selected,
            text: &summary.text,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn train(args: &TrainArgs, seed: u64) -> topiclite::Result<()> {
    let corpus = load_corpus(&args.input, &args.tokenizer.tokenizer())?;
    let defaults = Hyperparameters::new(args.k);
    let hyper = Hyperparameters {
        alpha: args.alpha.unwrap_or(defaults.alpha),
        beta: args.beta,
        iterations: args.iterations,
        burn_in: args.burn_in,
        sample_lag: args.sample_lag,
        seed,
        ..defaults
    };
    let model = lda::train(&corpus, &hyper)?;
    if let Some(info) = model.info() {
        log::info!(
            "trained K={} on {} tokens in {:.2}s",
            model.n_topics(),
            corpus.n_tokens(),
            info.wall_time_s
        );
    }
    model.save(&args.output)
}

fn evaluate(args: &EvalArgs, seed: u64) -> topiclite::Result<()> {
    let model = TopicModel::load(&args.model)?;
    let test = load_corpus(&args.test, &args.tokenizer.tokenizer())?;
    let held: Vec<HeldOutDoc> = test
        .documents()
        .iter()
        .map(|d| HeldOutDoc::from_document(d, test.vocabulary(), model.vocabulary()))
        .collect();
    let report = eval::perplexity(&model, &held, args.fold_sweeps, seed)?;
    let divergence = eval::js_model(&model)?;
    if let Some(path) = &args.pairwise {
        divergence.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let out = EvalReport {
        perplexity: report.perplexity,
        entropy_bits: report.entropy_bits,
        n_scored: report.n_tokens_scored,
        n_skipped: report.n_tokens_skipped,
        js_total: divergence.total,
    };
    let mut stdout = io::stdout().lock();
    serde_json::to_writer(&mut stdout, &out)?;
    writeln!(stdout)?;
    Ok(())
}

fn run_bench(args: &BenchArgs, threads: Option<usize>) -> topiclite::Result<()> {
    let mut config = BenchConfig::load(&args.config)?;
    if let Some(threads) = threads {
        config.grid.threads = threads;
    }
    let outputs = bench::run_bench(&config)?;
    let failed = outputs.records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        log::warn!(
            "{failed} of {} cells failed; see the error column",
            outputs.records.len()
        );
    }
    eprintln!("wrote {}", outputs.records_csv.display());
    Ok(())
}
