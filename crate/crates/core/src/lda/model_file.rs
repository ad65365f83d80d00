//! Plain-text model format:
//!
//! ```text
//! topiclite-model v1 K=<int> V=<int> alpha=<float> beta=<float> seed=<int>
//! <K lines of V space-separated probabilities>
//! <V lines of `id word`>
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::TopicModel;
use crate::corpus::Vocabulary;
use crate::{Error, Result};

const MAGIC: &str = "topiclite-model";
const VERSION: &str = "v1";

impl TopicModel {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "{MAGIC} {VERSION} K={} V={} alpha={} beta={} seed={}",
            self.k, self.v, self.alpha, self.beta, self.seed
        )?;
        for row in self.topics() {
            let mut first = true;
            for p in row {
                if !first {
                    out.write_all(b" ")?;
                }
                write!(out, "{p}")?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        for (id, word) in self.vocabulary.words().iter().enumerate() {
            writeln!(out, "{id} {word}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let mut next_line = |what: &str| -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::ModelFormat(format!("missing {what}")))
        };

        let header = next_line("header")?;
        let mut fields = header.split(' ');
        if fields.next() != Some(MAGIC) || fields.next() != Some(VERSION) {
            return Err(Error::ModelFormat(format!("bad header `{header}`")));
        }
        let mut value = |key: &str| -> Result<String> {
            let field = fields
                .next()
                .ok_or_else(|| Error::ModelFormat(format!("missing {key}")))?;
            field
                .strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| Error::ModelFormat(format!("expected {key}=..., got `{field}`")))
        };
        let parse_err = |key: &str| Error::ModelFormat(format!("unparsable {key}"));
        let k: usize = value("K")?.parse().map_err(|_| parse_err("K"))?;
        let v: usize = value("V")?.parse().map_err(|_| parse_err("V"))?;
        let alpha: f64 = value("alpha")?.parse().map_err(|_| parse_err("alpha"))?;
        let beta: f64 = value("beta")?.parse().map_err(|_| parse_err("beta"))?;
        let seed: u64 = value("seed")?.parse().map_err(|_| parse_err("seed"))?;

        let mut rows = Vec::with_capacity(k);
        for t in 0..k {
            let line = next_line(&format!("topic row {t}"))?;
            let row: Vec<f64> = line
                .split(' ')
                .map(|x| {
                    x.parse()
                        .map_err(|_| Error::ModelFormat(format!("bad probability `{x}` in row {t}")))
                })
                .collect::<Result<_>>()?;
            if row.len() != v {
                return Err(Error::ModelFormat(format!(
                    "row {t} has {} values, expected {v}",
                    row.len()
                )));
            }
            rows.push(row);
        }

        let mut words = Vec::with_capacity(v);
        for id in 0..v {
            let line = next_line(&format!("vocabulary entry {id}"))?;
            let (num, word) = line
                .split_once(' ')
                .ok_or_else(|| Error::ModelFormat(format!("bad vocabulary line `{line}`")))?;
            if num.parse::<usize>().ok() != Some(id) {
                return Err(Error::ModelFormat(format!("vocabulary ids out of order at `{line}`")));
            }
            words.push(word.to_string());
        }
        TopicModel::from_phi(rows, Vocabulary::from_words(words)?, alpha, beta, seed)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(rows: Vec<Vec<f64>>) -> TopicModel {
        let v = rows[0].len();
        let vocab = Vocabulary::from_words((0..v).map(|i| format!("mot{i}")).collect()).unwrap();
        TopicModel::from_phi(rows, vocab, 0.25, 0.01, 42).unwrap()
    }

    #[test]
    fn layout() {
        let m = model(vec![vec![0.25, 0.75], vec![0.5, 0.5]]);
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "topiclite-model v1 K=2 V=2 alpha=0.25 beta=0.01 seed=42\n0.25 0.75\n0.5 0.5\n0 mot0\n1 mot1\n"
        );
    }

    #[test]
    fn rejects_malformed_files() {
        for text in [
            "",
            "other-model v1 K=1 V=1 alpha=1 beta=1 seed=0\n1\n0 a\n",
            "topiclite-model v1 K=1 V=2 alpha=1 beta=1 seed=0\n1\n0 a\n1 b\n",
            "topiclite-model v1 K=1 V=1 alpha=1 beta=1 seed=0\n1\n",
            "topiclite-model v1 K=1 V=1 alpha=x beta=1 seed=0\n1\n0 a\n",
            "topiclite-model v1 K=1 V=1 alpha=1 beta=1 seed=0\n1\n3 a\n",
        ] {
            assert!(TopicModel::read_from(text.as_bytes()).is_err(), "{text:?}");
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(raw in proptest::collection::vec(proptest::collection::vec(1e-6f64..1.0, 5), 1..4)) {
            let rows: Vec<Vec<f64>> = raw
                .into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|x| x / s).collect()
                })
                .collect();
            let m = model(rows);
            let mut buf = Vec::new();
            m.write_to(&mut buf).unwrap();
            let back = TopicModel::read_from(buf.as_slice()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
