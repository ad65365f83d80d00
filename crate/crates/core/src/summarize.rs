//! Extractive summarizers: lead sentences (BF), random sentences (BR) and
//! the ARTEX vector-space scorer.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::{derive_seed, fnv1a, Error, Result, WordId};

/// Training-set variant: the full text or one of the summarizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "FULL", alias = "full")]
    Full,
    #[serde(rename = "BF", alias = "bf")]
    Bf,
    #[serde(rename = "BR", alias = "br")]
    Br,
    #[serde(rename = "ARTEX", alias = "artex")]
    Artex,
}

impl System {
    pub const ALL: [System; 4] = [System::Full, System::Bf, System::Br, System::Artex];

    pub fn name(self) -> &'static str {
        match self {
            System::Full => "FULL",
            System::Bf => "BF",
            System::Br => "BR",
            System::Artex => "ARTEX",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(System::Full),
            "bf" => Ok(System::Bf),
            "br" => Ok(System::Br),
            "artex" => Ok(System::Artex),
            _ => Err(Error::Config(format!("unknown system `{s}`"))),
        }
    }
}

/// Fraction of a document's sentences kept, in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CompressionRate(f64);

impl CompressionRate {
    pub const FULL: CompressionRate = CompressionRate(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidRate(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CompressionRate {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<CompressionRate> for f64 {
    fn from(rate: CompressionRate) -> f64 {
        rate.0
    }
}

/// `max(1, round_half_up(rate * p))`.
pub fn sentences_for_rate(p: usize, rate: CompressionRate) -> usize {
    // The epsilon absorbs representation error such as 0.15 * 10 = 1.4999...
    let n = (rate.0 * p as f64 + 0.5 + 1e-9).floor() as usize;
    n.clamp(1, p.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub system: System,
    pub rate: CompressionRate,
    /// Strictly increasing sentence indices.
    pub selected: Vec<usize>,
    pub text: String,
}

impl Summary {
    fn new(doc: &Document, system: System, rate: CompressionRate, selected: Vec<usize>) -> Self {
        let text = selected
            .iter()
            .map(|&i| doc.sentences[i].raw.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        Self {
            system,
            rate,
            selected,
            text,
        }
    }
}

/// Baseline first: the `n` leading sentences.
pub fn summarize_bf(doc: &Document, rate: CompressionRate) -> Summary {
    let n = sentences_for_rate(doc.n_sentences(), rate);
    Summary::new(doc, System::Bf, rate, (0..n).collect())
}

/// Baseline random: `n` sentences drawn uniformly without replacement.
pub fn summarize_br(doc: &Document, rate: CompressionRate, seed: u64) -> Summary {
    let p = doc.n_sentences();
    let selected = random_selection(p, sentences_for_rate(p, rate), seed);
    Summary::new(doc, System::Br, rate, selected)
}

/// Partial Fisher-Yates over `0..p` with a ChaCha8 stream: for `i` in
/// `0..n`, swap position `i` with a uniform position in `i..p`. The first
/// `n` entries, sorted, are the selection.
pub fn random_selection(p: usize, n: usize, seed: u64) -> Vec<usize> {
    let n = n.min(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..p).collect();
    for i in 0..n {
        let j = rng.random_range(i..p);
        order.swap(i, j);
    }
    let mut picked = order[..n].to_vec();
    picked.sort_unstable();
    picked
}

/// Sentence-by-word count matrix over the document's own distinct words.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceMatrix {
    counts: Vec<Vec<u32>>,
    n_words: usize,
}

/// Row averages `a` (one per sentence) and column averages `b` (one per word).
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoVectors {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl SentenceMatrix {
    /// Columns follow the first occurrence of each word in the document.
    pub fn from_document(doc: &Document) -> Self {
        let mut columns: HashMap<WordId, usize> = HashMap::new();
        for t in doc.tokens() {
            let next = columns.len();
            columns.entry(t).or_insert(next);
        }
        let n_words = columns.len();
        let counts = doc
            .sentences
            .iter()
            .map(|s| {
                let mut row = vec![0u32; n_words];
                for t in &s.tokens {
                    row[columns[t]] += 1;
                }
                row
            })
            .collect();
        Self { counts, n_words }
    }

    /// Rows must share one length.
    pub fn from_counts(counts: Vec<Vec<u32>>) -> Result<Self> {
        let n_words = counts.first().map_or(0, Vec::len);
        if let Some(bad) = counts.iter().find(|r| r.len() != n_words) {
            return Err(Error::DimensionMismatch(bad.len(), n_words));
        }
        Ok(Self { counts, n_words })
    }

    /// Sentence count `p`.
    pub fn n_sentences(&self) -> usize {
        self.counts.len()
    }

    /// Distinct word count `N`.
    pub fn n_words(&self) -> usize {
        self.n_words
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.counts
    }

    pub fn scaled(&self, factor: u32) -> Self {
        let counts = self
            .counts
            .iter()
            .map(|r| r.iter().map(|&c| c * factor).collect())
            .collect();
        Self {
            counts,
            n_words: self.n_words,
        }
    }

    fn row_sums(&self) -> Vec<u64> {
        self.counts
            .iter()
            .map(|r| r.iter().map(|&c| u64::from(c)).sum())
            .collect()
    }

    fn column_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.n_words];
        for row in &self.counts {
            for (s, &c) in sums.iter_mut().zip(row) {
                *s += u64::from(c);
            }
        }
        sums
    }

    pub fn pseudo_vectors(&self) -> Result<PseudoVectors> {
        let rows = self.row_sums();
        if rows.iter().all(|&r| r == 0) {
            return Err(Error::EmptyDocument);
        }
        let (p, n) = (self.n_sentences() as f64, self.n_words as f64);
        Ok(PseudoVectors {
            a: rows.iter().map(|&r| r as f64 / n).collect(),
            b: self.column_sums().iter().map(|&c| c as f64 / p).collect(),
        })
    }

    /// Integer key proportional to the raw ARTEX weight:
    /// `(sum_j s_uj * colsum_j) * rowsum_u = w_u * N^2 * p^2`.
    fn exact_keys(&self) -> Vec<u128> {
        let cols = self.column_sums();
        self.counts
            .iter()
            .zip(self.row_sums())
            .map(|(row, r)| {
                let dot: u128 = row
                    .iter()
                    .zip(&cols)
                    .map(|(&s, &c)| u128::from(s) * u128::from(c))
                    .sum();
                dot * u128::from(r)
            })
            .collect()
    }
}

pub fn build_artex_vectors(doc: &Document) -> Result<(SentenceMatrix, PseudoVectors)> {
    let s = SentenceMatrix::from_document(doc);
    let v = s.pseudo_vectors()?;
    Ok((s, v))
}

fn weights_with_constant(s: &SentenceMatrix, v: &PseudoVectors, constant: f64) -> Vec<f64> {
    s.counts
        .iter()
        .zip(&v.a)
        .map(|(row, &a)| {
            let dot: f64 = row.iter().zip(&v.b).map(|(&c, &b)| f64::from(c) * b).sum();
            constant * dot * a
        })
        .collect()
}

/// Unnormalized sentence weights `(1/(N p)) * (s_u . b) * a_u`.
pub fn artex_raw_weights(s: &SentenceMatrix, v: &PseudoVectors) -> Vec<f64> {
    let np = (s.n_words() * s.n_sentences()) as f64;
    weights_with_constant(s, v, 1.0 / np)
}

/// Same inner products with the constant `1/sqrt(N^5 p^3)`; a positive
/// rescaling of [`artex_raw_weights`].
pub fn artex_raw_weights_rescaled(s: &SentenceMatrix, v: &PseudoVectors) -> Vec<f64> {
    let (n, p) = (s.n_words() as f64, s.n_sentences() as f64);
    weights_with_constant(s, v, 1.0 / (n.powi(5) * p.powi(3)).sqrt())
}

/// Min-max normalization into `[0, 1]`. A constant vector maps to zeros.
pub fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span.is_nan() || span <= 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|&v| (v - min) / span).collect()
}

/// Sentence scores in `[0, 1]`.
pub fn artex_weights(s: &SentenceMatrix, v: &PseudoVectors) -> Vec<f64> {
    min_max_normalize(&artex_raw_weights(s, v))
}

/// Indices ordered by decreasing value; values within a relative `1e-12`
/// of each other count as tied and keep increasing index order.
pub fn rank_desc(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let mut ranked = Vec::with_capacity(order.len());
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && nearly_equal(values[order[end - 1]], values[order[end]]) {
            end += 1;
        }
        let mut group = order[start..end].to_vec();
        group.sort_unstable();
        ranked.extend(group);
        start = end;
    }
    ranked
}

fn nearly_equal(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-12 * x.abs().max(y.abs())
}

/// Sentence order by ARTEX weight, highest first, ties to the lower index.
/// Ranks on exact integer keys so mathematically equal weights always tie.
pub fn artex_ranking(s: &SentenceMatrix) -> Vec<usize> {
    let keys = s.exact_keys();
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&i, &j| match keys[j].cmp(&keys[i]) {
        Ordering::Equal => i.cmp(&j),
        other => other,
    });
    order
}

pub fn summarize_artex(doc: &Document, rate: CompressionRate) -> Result<Summary> {
    let s = SentenceMatrix::from_document(doc);
    s.pseudo_vectors()?;
    let n = sentences_for_rate(s.n_sentences(), rate);
    let mut selected: Vec<usize> = artex_ranking(&s).into_iter().take(n).collect();
    selected.sort_unstable();
    Ok(Summary::new(doc, System::Artex, rate, selected))
}

/// Dispatches on `system`. `Full` keeps every sentence; `Br` seeds from
/// `seed` directly.
pub fn summarize(doc: &Document, system: System, rate: CompressionRate, seed: u64) -> Result<Summary> {
    match system {
        System::Full => Ok(Summary::new(
            doc,
            System::Full,
            CompressionRate::FULL,
            (0..doc.n_sentences()).collect(),
        )),
        System::Bf => Ok(summarize_bf(doc, rate)),
        System::Br => Ok(summarize_br(doc, rate, seed)),
        System::Artex => summarize_artex(doc, rate),
    }
}

/// Seed used for `doc` inside a corpus-level run.
pub fn document_seed(seed: u64, doc: &Document) -> u64 {
    derive_seed(seed, fnv1a(doc.id.as_bytes()))
}

/// Summarizes every document and returns the reduced documents.
pub fn compress_documents(
    docs: &[Document],
    system: System,
    rate: CompressionRate,
    seed: u64,
) -> Result<Vec<Document>> {
    docs.par_iter()
        .map(|doc| {
            let summary = summarize(doc, system, rate, document_seed(seed, doc))?;
            Ok(doc.select(&summary.selected))
        })
        .collect()
}
