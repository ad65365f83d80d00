//! Experiment grid: summarize the training split, train, score, time.

mod plot;
mod reference;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{read_jsonl, split_corpus, Corpus, Language, Tokenizer};
use crate::eval::{js_model, perplexity, HeldOutDoc};
use crate::lda::{self, Hyperparameters};
use crate::summarize::{compress_documents, CompressionRate, System};
use crate::{Error, Result};

pub use plot::{emit_plots, line_chart_svg, Series};
pub use reference::{compare_reference, reference_time};

fn default_systems() -> Vec<System> {
    System::ALL.to_vec()
}
fn default_topic_counts() -> Vec<usize> {
    vec![5, 10, 50, 100, 200, 400]
}
fn default_rates() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5]
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_split_ratio() -> f64 {
    0.9
}
fn default_beta() -> f64 {
    0.01
}
fn default_iterations() -> usize {
    1000
}
fn default_burn_in() -> usize {
    500
}
fn default_sample_lag() -> usize {
    50
}
fn default_fold_sweeps() -> usize {
    50
}
fn default_threads() -> usize {
    1
}

/// The grid of systems, topic counts, compression rates and seeds, plus
/// the sampler settings shared by every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentGrid {
    #[serde(default = "default_systems")]
    pub systems: Vec<System>,
    #[serde(default = "default_topic_counts")]
    pub topic_counts: Vec<usize>,
    #[serde(default = "default_rates")]
    pub rates: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_split_ratio")]
    pub split_ratio: f64,
    /// Seed of the train/test shuffle; the first cell seed when absent.
    #[serde(default)]
    pub split_seed: Option<u64>,
    /// `50 / K` when absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_sample_lag")]
    pub sample_lag: usize,
    #[serde(default = "default_fold_sweeps")]
    pub fold_sweeps: usize,
    /// Worker threads for grid cells.
    #[serde(default = "default_threads")]
    pub threads: usize,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(Error::Config(m.to_string()));
        if self.systems.is_empty() {
            return err("systems list is empty");
        }
        if self.topic_counts.is_empty() {
            return err("topic_counts list is empty");
        }
        if self.seeds.is_empty() {
            return err("seeds list is empty");
        }
        if self.systems.iter().any(|&s| s != System::Full) && self.rates.is_empty() {
            return err("rates list is empty");
        }
        for &r in &self.rates {
            CompressionRate::new(r)?;
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::InvalidRatio(self.split_ratio));
        }
        if self.threads == 0 {
            return err("threads must be at least 1");
        }
        for &k in &self.topic_counts {
            self.hyper(k, 0).validate()?;
        }
        Ok(())
    }

    pub fn hyper(&self, k: usize, seed: u64) -> Hyperparameters {
        Hyperparameters {
            k,
            alpha: self.alpha.unwrap_or(50.0 / k.max(1) as f64),
            beta: self.beta,
            iterations: self.iterations,
            burn_in: self.burn_in,
            sample_lag: self.sample_lag,
            seed,
        }
    }

    /// Every (system, rate, K, seed) cell; FULL appears once per (K, seed)
    /// with rate 1.
    pub fn cells(&self) -> Vec<Cell> {
        let mut systems = self.systems.clone();
        systems.dedup();
        let mut cells = Vec::new();
        for &system in &systems {
            let rates: Vec<f64> = if system == System::Full {
                vec![1.0]
            } else {
                self.rates.clone()
            };
            for rate in rates {
                for &k in &self.topic_counts {
                    for &seed in &self.seeds {
                        cells.push(Cell { system, rate, k, seed });
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub system: System,
    pub rate: f64,
    pub k: usize,
    pub seed: u64,
}

/// One grid cell's outcome. Failed cells carry `error` and no scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub language: String,
    pub system: System,
    pub k: usize,
    pub rate: f64,
    pub seed: u64,
    pub summarize_time_s: f64,
    pub train_time_s: f64,
    pub perplexity: Option<f64>,
    pub js_total: Option<f64>,
    pub n_train_tokens: usize,
    pub n_test_scored: usize,
    pub n_test_skipped: usize,
    pub error: Option<String>,
}

struct CellScores {
    summarize_time_s: f64,
    train_time_s: f64,
    perplexity: f64,
    js_total: f64,
    n_train_tokens: usize,
    n_test_scored: usize,
    n_test_skipped: usize,
}

fn run_cell(
    corpus: &Corpus,
    train_idx: &[usize],
    test_idx: &[usize],
    grid: &ExperimentGrid,
    cell: Cell,
) -> Result<CellScores> {
    let train_docs = corpus.subset(train_idx);
    let (docs, summarize_time_s) = if cell.system == System::Full {
        (train_docs, 0.0)
    } else {
        let rate = CompressionRate::new(cell.rate)?;
        let start = Instant::now();
        let docs = compress_documents(&train_docs, cell.system, rate, cell.seed)?;
        (docs, start.elapsed().as_secs_f64())
    };
    let training = Corpus::compact(docs, corpus.vocabulary())?;
    let n_train_tokens = training.n_tokens();

    let hyper = grid.hyper(cell.k, cell.seed);
    let token_docs = training.token_docs();
    let start = Instant::now();
    let model = lda::train_tokens(&token_docs, training.vocabulary().clone(), &hyper, false)?;
    let train_time_s = start.elapsed().as_secs_f64();

    let held_out: Vec<HeldOutDoc> = test_idx
        .iter()
        .map(|&i| HeldOutDoc::from_document(&corpus.documents()[i], corpus.vocabulary(), model.vocabulary()))
        .collect();
    let report = perplexity(&model, &held_out, grid.fold_sweeps, cell.seed)?;
    let js = js_model(&model)?;
    Ok(CellScores {
        summarize_time_s,
        train_time_s,
        perplexity: report.perplexity,
        js_total: js.total,
        n_train_tokens,
        n_test_scored: report.n_tokens_scored,
        n_test_skipped: report.n_tokens_skipped,
    })
}

/// Runs every cell of `grid` on `corpus`. The corpus is split once with
/// `split_ratio`; the test part is scored unsummarized. A failing cell
/// becomes a record with `error` set and the grid continues.
pub fn run_grid(corpus: &Corpus, grid: &ExperimentGrid) -> Result<Vec<RunRecord>> {
    grid.validate()?;
    let split_seed = grid.split_seed.unwrap_or(grid.seeds[0]);
    let split = split_corpus(corpus, grid.split_ratio, split_seed)?;
    let language = corpus
        .documents()
        .first()
        .map_or(Language::Other, |d| d.language)
        .to_string();
    let cells = grid.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(grid.threads)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let records = pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| {
                log::info!(
                    "cell {} rate={} K={} seed={}",
                    cell.system,
                    cell.rate,
                    cell.k,
                    cell.seed
                );
                let mut record = RunRecord {
                    language: language.clone(),
                    system: cell.system,
                    k: cell.k,
                    rate: cell.rate,
                    seed: cell.seed,
                    summarize_time_s: 0.0,
                    train_time_s: 0.0,
                    perplexity: None,
                    js_total: None,
                    n_train_tokens: 0,
                    n_test_scored: 0,
                    n_test_skipped: 0,
                    error: None,
                };
                match run_cell(corpus, &split.train, &split.test, grid, cell) {
                    Ok(s) => {
                        record.summarize_time_s = s.summarize_time_s;
                        record.train_time_s = s.train_time_s;
                        record.perplexity = Some(s.perplexity);
                        record.js_total = Some(s.js_total);
                        record.n_train_tokens = s.n_train_tokens;
                        record.n_test_scored = s.n_test_scored;
                        record.n_test_skipped = s.n_test_skipped;
                    }
                    Err(e) => {
                        log::warn!(
                            "cell {} rate={} K={} seed={} failed: {e}",
                            cell.system,
                            cell.rate,
                            cell.k,
                            cell.seed
                        );
                        record.error = Some(e.to_string());
                    }
                }
                record
            })
            .collect()
    });
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    K,
    Rate,
}

impl GroupBy {
    pub fn column(self) -> &'static str {
        match self {
            GroupBy::K => "k",
            GroupBy::Rate => "rate",
        }
    }
}

/// Per-system means over the axes not grouped on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub system: System,
    pub key: f64,
    pub n: usize,
    pub mean_perplexity: f64,
    pub mean_js_total: f64,
    pub mean_summarize_time_s: f64,
    pub mean_train_time_s: f64,
}

/// Means of successful records per (system, K) or (system, rate). Grouped
/// by rate, FULL has no rate axis: its overall mean is repeated at every
/// rate used by the other systems.
pub fn aggregate(records: &[RunRecord], group_by: GroupBy) -> Vec<AggregateRow> {
    #[derive(Default)]
    struct Acc {
        n: usize,
        ppl: f64,
        js: f64,
        sum_t: f64,
        train_t: f64,
    }
    let mut groups: BTreeMap<(System, u64), Acc> = BTreeMap::new();
    let ok = records
        .iter()
        .filter(|r| r.error.is_none() && r.perplexity.is_some() && r.js_total.is_some());
    for r in ok {
        let key = match group_by {
            GroupBy::K => r.k as f64,
            GroupBy::Rate => r.rate,
        };
        let a = groups.entry((r.system, key.to_bits())).or_default();
        a.n += 1;
        a.ppl += r.perplexity.unwrap_or_default();
        a.js += r.js_total.unwrap_or_default();
        a.sum_t += r.summarize_time_s;
        a.train_t += r.train_time_s;
    }
    let failed: usize = records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        log::warn!("{failed} failed record(s) left out of the aggregates");
    }
    let mut rows: Vec<AggregateRow> = groups
        .into_iter()
        .map(|((system, bits), a)| {
            let n = a.n as f64;
            AggregateRow {
                system,
                key: f64::from_bits(bits),
                n: a.n,
                mean_perplexity: a.ppl / n,
                mean_js_total: a.js / n,
                mean_summarize_time_s: a.sum_t / n,
                mean_train_time_s: a.train_t / n,
            }
        })
        .collect();
    if group_by == GroupBy::Rate {
        let mut other_rates: Vec<f64> = rows
            .iter()
            .filter(|r| r.system != System::Full)
            .map(|r| r.key)
            .collect();
        other_rates.sort_by(f64::total_cmp);
        other_rates.dedup();
        if let Some(full) = rows.iter().position(|r| r.system == System::Full) {
            if !other_rates.is_empty() {
                let template = rows.remove(full);
                let spread = other_rates.into_iter().map(|key| AggregateRow {
                    key,
                    ..template.clone()
                });
                rows.splice(full..full, spread);
            }
        }
    }
    rows
}

pub fn write_aggregate_csv<W: Write>(out: W, rows: &[AggregateRow], group_by: GroupBy) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "system",
        group_by.column(),
        "n",
        "mean_perplexity",
        "mean_js_total",
        "mean_summarize_time_s",
        "mean_train_time_s",
    ])?;
    for r in rows {
        let key = match group_by {
            GroupBy::K => (r.key as usize).to_string(),
            GroupBy::Rate => r.key.to_string(),
        };
        w.write_record([
            r.system.name().to_string(),
            key,
            r.n.to_string(),
            r.mean_perplexity.to_string(),
            r.mean_js_total.to_string(),
            r.mean_summarize_time_s.to_string(),
            r.mean_train_time_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// JSON configuration of a `bench` run: the grid plus input and output locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    /// JSON-Lines corpus.
    pub input: PathBuf,
    /// Only documents in this language are used.
    pub language: Language,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub stopwords: bool,
    #[serde(flatten)]
    pub grid: ExperimentGrid,
}

impl BenchConfig {
    /// Relative `input` and `out_dir` are resolved against `base`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config: BenchConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if config.input.is_relative() {
            config.input = base.join(&config.input);
        }
        if config.out_dir.is_relative() {
            config.out_dir = base.join(&config.out_dir);
        }
        Ok(config)
    }
}

/// Paths written by [`run_bench`].
#[derive(Debug, Clone)]
pub struct BenchOutputs {
    pub records: Vec<RunRecord>,
    pub records_csv: PathBuf,
    pub plots: Vec<PathBuf>,
}

/// Loads the corpus, runs the grid and writes `records.csv`,
/// `aggregate_by_k.csv`, `aggregate_by_rate.csv`, `plots/*.svg` and
/// `reference_comparison.txt` into `out_dir`.
pub fn run_bench(config: &BenchConfig) -> Result<BenchOutputs> {
    config.grid.validate()?;
    let raw: Vec<_> = read_jsonl(&config.input)?
        .into_iter()
        .filter(|d| d.language == config.language)
        .collect();
    let tokenizer = if config.stopwords {
        Tokenizer::with_default_stopwords(config.language)
    } else {
        Tokenizer::new()
    };
    let corpus = Corpus::build(&raw, &tokenizer)?;
    log::info!("corpus: {} documents, {} tokens", corpus.len(), corpus.n_tokens());
    let records = run_grid(&corpus, &config.grid)?;
    write_outputs(&records, &config.out_dir)
}

pub fn write_outputs(records: &[RunRecord], out_dir: &Path) -> Result<BenchOutputs> {
    if records.is_empty() {
        return Err(Error::Config("no records to write".into()));
    }
    fs::create_dir_all(out_dir)?;
    let records_csv = out_dir.join("records.csv");
    emit_csv(records, &records_csv)?;
    let by_k = aggregate(records, GroupBy::K);
    let by_rate = aggregate(records, GroupBy::Rate);
    write_aggregate_csv(fs::File::create(out_dir.join("aggregate_by_k.csv"))?, &by_k, GroupBy::K)?;
    write_aggregate_csv(
        fs::File::create(out_dir.join("aggregate_by_rate.csv"))?,
        &by_rate,
        GroupBy::Rate,
    )?;
    let mut plots = emit_plots(&by_k, GroupBy::K, &out_dir.join("plots"))?;
    plots.extend(emit_plots(&by_rate, GroupBy::Rate, &out_dir.join("plots"))?);
    fs::write(out_dir.join("reference_comparison.txt"), compare_reference(records))?;
    Ok(BenchOutputs {
        records: records.to_vec(),
        records_csv,
        plots,
    })
}
