use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusStats, Language, RawDocument};
use crate::{Error, Result};

/// Reads one `{"id", "lang", "text"}` object per line. Blank lines are skipped.
pub fn read_jsonl(path: impl AsRef<Path>) -> Result<Vec<RawDocument>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = serde_json::from_str(&line).map_err(|e| Error::Input {
            line: i + 1,
            message: e.to_string(),
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

/// Reads every `.txt` file of a directory; the file stem is the document id.
/// Files are taken in name order.
pub fn read_text_dir(dir: impl AsRef<Path>, language: Language) -> Result<Vec<RawDocument>> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "txt"));
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok(RawDocument {
                id,
                language,
                text: fs::read_to_string(&p)?,
            })
        })
        .collect()
}

/// One line of the stats CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub lang: String,
    pub n_docs: usize,
    pub n_words: usize,
    pub n_unique: usize,
    pub n_sentences: usize,
    pub mean_words: f64,
    pub mean_unique: f64,
    pub mean_sentences: f64,
}

impl StatsRow {
    pub fn new(lang: &str, stats: &CorpusStats) -> Self {
        Self {
            lang: lang.to_string(),
            n_docs: stats.n_docs,
            n_words: stats.n_words,
            n_unique: stats.n_unique_words,
            n_sentences: stats.n_sentences,
            mean_words: stats.mean_words,
            mean_unique: stats.mean_unique,
            mean_sentences: stats.mean_sentences,
        }
    }
}

pub fn write_stats_csv<W: Write>(out: W, rows: &[StatsRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
