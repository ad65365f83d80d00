//! Document ingestion: sentence segmentation, tokenization, vocabulary and
//! train/test splits.

mod io;
mod segment;
mod tokenize;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, WordId};

pub use io::{read_jsonl, read_text_dir, write_stats_csv, StatsRow};
pub use segment::segment_sentences;
pub use tokenize::{default_stopwords, Tokenizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Es,
    Fr,
    #[serde(other)]
    Other,
}

impl Language {
    pub fn as_str(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Es => "es",
            Language::Fr => "fr",
            Language::Other => "other",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "en" => Language::En,
            "es" => Language::Es,
            "fr" => Language::Fr,
            "other" => Language::Other,
            _ => return Err(Error::Config(format!("unknown language `{s}`"))),
        })
    }
}

/// One input record, before segmentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    #[serde(rename = "lang")]
    pub language: Language,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub index: usize,
    pub raw: String,
    pub tokens: Vec<WordId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub id: String,
    pub language: Language,
    pub sentences: Vec<Sentence>,
    /// Retained sentences joined by a single space.
    pub raw_text: String,
}

impl Document {
    pub fn n_sentences(&self) -> usize {
        self.sentences.len()
    }

    pub fn n_tokens(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    pub fn tokens(&self) -> impl Iterator<Item = WordId> + '_ {
        self.sentences.iter().flat_map(|s| s.tokens.iter().copied())
    }

    /// Copy of the document restricted to `selected` sentences, reindexed
    /// from zero. Indices out of range are ignored.
    pub fn select(&self, selected: &[usize]) -> Document {
        let sentences: Vec<Sentence> = selected
            .iter()
            .filter_map(|&i| self.sentences.get(i))
            .enumerate()
            .map(|(index, s)| Sentence {
                index,
                raw: s.raw.clone(),
                tokens: s.tokens.clone(),
            })
            .collect();
        Document {
            id: self.id.clone(),
            language: self.language,
            raw_text: join_raw(&sentences),
            sentences,
        }
    }
}

fn join_raw(sentences: &[Sentence]) -> String {
    sentences.iter().map(|s| s.raw.as_str()).collect::<Vec<_>>().join(" ")
}

/// Word/id bijection with collection and document frequencies.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, WordId>,
    collection_frequency: Vec<u64>,
    document_frequency: Vec<u64>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn lookup(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> Option<&str> {
        self.words.get(id).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn collection_frequency(&self, id: WordId) -> u64 {
        self.collection_frequency[id]
    }

    pub fn document_frequency(&self, id: WordId) -> u64 {
        self.document_frequency[id]
    }

    /// Vocabulary from an ordered word list, with unit frequencies. Used for
    /// vocabularies loaded from model files.
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (id, w) in words.iter().enumerate() {
            if index.insert(w.clone(), id).is_some() {
                return Err(Error::ModelFormat(format!("duplicate vocabulary word `{w}`")));
            }
        }
        let n = words.len();
        Ok(Self {
            words,
            index,
            collection_frequency: vec![1; n],
            document_frequency: vec![1; n],
        })
    }

    fn intern(&mut self, word: &str) -> WordId {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len();
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        self.collection_frequency.push(0);
        self.document_frequency.push(0);
        id
    }
}

/// Documents plus the vocabulary their token ids refer to. Immutable once built.
#[derive(Debug, Clone)]
pub struct Corpus {
    documents: Vec<Document>,
    vocabulary: Vocabulary,
}

struct DraftSentence {
    raw: String,
    tokens: Vec<String>,
}

struct DraftDocument {
    id: String,
    language: Language,
    sentences: Vec<DraftSentence>,
}

fn draft(raw: &RawDocument, tokenizer: &Tokenizer) -> Option<DraftDocument> {
    let sentences: Vec<DraftSentence> = segment_sentences(&raw.text, raw.language)
        .ok()?
        .into_iter()
        .filter_map(|s| {
            let tokens = tokenizer.tokenize(&s);
            (!tokens.is_empty()).then_some(DraftSentence { raw: s, tokens })
        })
        .collect();
    if sentences.is_empty() {
        return None;
    }
    Some(DraftDocument {
        id: raw.id.clone(),
        language: raw.language,
        sentences,
    })
}

impl Corpus {
    /// Segments and tokenizes every document (in parallel), then assigns
    /// word ids in first-occurrence order. Documents left without tokens
    /// are skipped with a warning.
    pub fn build(raw: &[RawDocument], tokenizer: &Tokenizer) -> Result<Self> {
        let drafts: Vec<Option<DraftDocument>> = raw.par_iter().map(|doc| draft(doc, tokenizer)).collect();

        let mut vocabulary = Vocabulary::default();
        let mut documents = Vec::with_capacity(drafts.len());
        for (raw_doc, d) in raw.iter().zip(drafts) {
            let Some(d) = d else {
                log::warn!("document `{}` has no retained tokens; skipped", raw_doc.id);
                continue;
            };
            let sentences: Vec<Sentence> = d
                .sentences
                .into_iter()
                .enumerate()
                .map(|(index, s)| Sentence {
                    index,
                    tokens: s.tokens.iter().map(|w| vocabulary.intern(w)).collect(),
                    raw: s.raw,
                })
                .collect();
            documents.push(Document {
                id: d.id,
                language: d.language,
                raw_text: join_raw(&sentences),
                sentences,
            });
        }
        Self::with_frequencies(documents, vocabulary)
    }

    /// Rebuilds a corpus over `documents`, whose ids refer to `source`,
    /// with a fresh dense vocabulary covering only the words they use.
    pub fn compact(documents: Vec<Document>, source: &Vocabulary) -> Result<Self> {
        let mut vocabulary = Vocabulary::default();
        let documents = documents
            .into_iter()
            .map(|mut doc| {
                for s in &mut doc.sentences {
                    for t in &mut s.tokens {
                        *t = vocabulary.intern(&source.words[*t]);
                    }
                }
                doc
            })
            .collect();
        Self::with_frequencies(documents, vocabulary)
    }

    fn with_frequencies(documents: Vec<Document>, mut vocabulary: Vocabulary) -> Result<Self> {
        if documents.is_empty() || vocabulary.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        vocabulary.collection_frequency.iter_mut().for_each(|f| *f = 0);
        vocabulary.document_frequency.iter_mut().for_each(|f| *f = 0);
        for doc in &documents {
            let mut seen = HashSet::new();
            for t in doc.tokens() {
                vocabulary.collection_frequency[t] += 1;
                if seen.insert(t) {
                    vocabulary.document_frequency[t] += 1;
                }
            }
        }
        Ok(Self { documents, vocabulary })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn n_tokens(&self) -> usize {
        self.documents.iter().map(Document::n_tokens).sum()
    }

    /// Each document flattened to its token-id sequence.
    pub fn token_docs(&self) -> Vec<Vec<WordId>> {
        self.documents.iter().map(|d| d.tokens().collect()).collect()
    }

    /// Documents at the given positions, cloned.
    pub fn subset(&self, indices: &[usize]) -> Vec<Document> {
        indices.iter().map(|&i| self.documents[i].clone()).collect()
    }
}

/// Shorthand for [`Corpus::build`].
pub fn build_corpus(raw: &[RawDocument], tokenizer: &Tokenizer) -> Result<Corpus> {
    Corpus::build(raw, tokenizer)
}

/// Size statistics of a set of documents.
///
/// `mean_unique` averages the per-document distinct-word counts;
/// `n_unique_words` is the number of distinct words over the whole set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub n_docs: usize,
    pub n_words: usize,
    pub n_unique_words: usize,
    pub n_sentences: usize,
    /// Sum over documents of their distinct-word counts.
    pub doc_unique_total: usize,
    pub mean_words: f64,
    pub mean_unique: f64,
    pub mean_sentences: f64,
}

impl CorpusStats {
    pub fn from_documents<'a>(docs: impl IntoIterator<Item = &'a Document>) -> Self {
        let mut all = HashSet::new();
        let (mut n_docs, mut n_words, mut n_sentences, mut doc_unique_total) = (0, 0, 0, 0);
        for doc in docs {
            let mut local = HashSet::new();
            for t in doc.tokens() {
                local.insert(t);
                all.insert(t);
                n_words += 1;
            }
            n_docs += 1;
            n_sentences += doc.n_sentences();
            doc_unique_total += local.len();
        }
        let mean = |total: usize| if n_docs == 0 { 0.0 } else { total as f64 / n_docs as f64 };
        Self {
            n_docs,
            n_words,
            n_unique_words: all.len(),
            n_sentences,
            doc_unique_total,
            mean_words: mean(n_words),
            mean_unique: mean(doc_unique_total),
            mean_sentences: mean(n_sentences),
        }
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    CorpusStats::from_documents(corpus.documents())
}

/// One [`CorpusStats`] per language present, in language order.
pub fn corpus_stats_by_language(corpus: &Corpus) -> Vec<(Language, CorpusStats)> {
    let mut langs: Vec<Language> = corpus.documents().iter().map(|d| d.language).collect();
    langs.sort();
    langs.dedup();
    langs
        .into_iter()
        .map(|lang| {
            let docs = corpus.documents().iter().filter(|d| d.language == lang);
            (lang, CorpusStats::from_documents(docs))
        })
        .collect()
}

/// Train/test partition of a corpus, as document positions in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub ratio: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn train_ids<'a>(&'a self, corpus: &'a Corpus) -> impl Iterator<Item = &'a str> + 'a {
        self.train.iter().map(|&i| corpus.documents()[i].id.as_str())
    }

    pub fn test_ids<'a>(&'a self, corpus: &'a Corpus) -> impl Iterator<Item = &'a str> + 'a {
        self.test.iter().map(|&i| corpus.documents()[i].id.as_str())
    }
}

/// Seeded shuffle, then the first `round(ratio * M)` documents go to training.
pub fn split_corpus(corpus: &Corpus, ratio: f64, seed: u64) -> Result<SplitSpec> {
    split_indices(corpus.len(), ratio, seed)
}

pub(crate) fn split_indices(m: usize, ratio: f64, seed: u64) -> Result<SplitSpec> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidRatio(ratio));
    }
    if m < 2 {
        return Err(Error::CorpusTooSmall(m));
    }
    let n_train = (ratio * m as f64).round() as usize;
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SplitSpec {
        train,
        test,
        ratio,
        seed,
    })
}
