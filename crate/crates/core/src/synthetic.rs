//! Corpora drawn from a known LDA model, for recovery and timing checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::corpus::{Language, RawDocument, Vocabulary};
use crate::WordId;

/// Symmetric Dirichlet draw, computed in log space so that very small
/// concentrations (e.g. 0.01) do not underflow to an all-zero vector.
pub fn sample_dirichlet<R: Rng + ?Sized>(rng: &mut R, concentration: f64, dim: usize) -> Vec<f64> {
    assert!(concentration > 0.0 && dim > 0);
    // For a < 1: Gamma(a) = Gamma(a + 1) * U^(1/a).
    let boosted = concentration < 1.0;
    let shape = if boosted { concentration + 1.0 } else { concentration };
    let gamma = Gamma::new(shape, 1.0).expect("positive shape");
    let logs: Vec<f64> = (0..dim)
        .map(|_| {
            let mut x = gamma.sample(rng).ln();
            if boosted {
                let u: f64 = 1.0 - rng.random::<f64>();
                x += u.ln() / concentration;
            }
            x
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

pub fn sample_categorical<R: Rng + ?Sized>(rng: &mut R, probs: &[f64]) -> usize {
    let u = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaSpec {
    pub k: usize,
    pub v: usize,
    pub n_docs: usize,
    pub doc_len: usize,
    pub alpha: f64,
    pub beta: f64,
}

/// Generating model and the token documents drawn from it.
#[derive(Debug, Clone)]
pub struct SyntheticLda {
    pub phi: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub docs: Vec<Vec<WordId>>,
}

impl SyntheticLda {
    pub fn vocabulary(&self) -> Vocabulary {
        let v = self.phi.first().map_or(0, Vec::len);
        Vocabulary::from_words((0..v).map(synthetic_word).collect()).expect("distinct words")
    }
}

/// Standard LDA generative process with symmetric priors.
pub fn generate_lda(spec: &LdaSpec, seed: u64) -> SyntheticLda {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi: Vec<Vec<f64>> = (0..spec.k)
        .map(|_| sample_dirichlet(&mut rng, spec.beta, spec.v))
        .collect();
    let mut theta = Vec::with_capacity(spec.n_docs);
    let mut docs = Vec::with_capacity(spec.n_docs);
    for _ in 0..spec.n_docs {
        let th = sample_dirichlet(&mut rng, spec.alpha, spec.k);
        let doc = (0..spec.doc_len)
            .map(|_| {
                let z = sample_categorical(&mut rng, &th);
                sample_categorical(&mut rng, &phi[z])
            })
            .collect();
        theta.push(th);
        docs.push(doc);
    }
    SyntheticLda { phi, theta, docs }
}

const CONSONANTS: &[u8; 20] = b"bcdfghjklmnprstvwxyz";
const VOWELS: &[u8; 5] = b"aeiou";

/// Letters-only, at least two consonant-vowel syllables, distinct per id.
pub fn synthetic_word(id: usize) -> String {
    let mut n = id + 100;
    let mut word = String::new();
    while n > 0 {
        let digit = n % 100;
        word.push(CONSONANTS[digit % 20] as char);
        word.push(VOWELS[digit / 20] as char);
        n /= 100;
    }
    word
}

/// Shape of a generated plain-text corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextCorpusSpec {
    pub n_docs: usize,
    pub sentences: (usize, usize),
    pub sentence_len: (usize, usize),
    pub k: usize,
    pub v: usize,
    pub alpha: f64,
    pub beta: f64,
    pub language: Language,
}

impl Default for TextCorpusSpec {
    fn default() -> Self {
        Self {
            n_docs: 2000,
            sentences: (60, 100),
            sentence_len: (4, 10),
            k: 30,
            v: 3000,
            alpha: 0.1,
            beta: 0.05,
            language: Language::En,
        }
    }
}

/// Documents of capitalized, period-terminated sentences whose words come
/// from an LDA model. Sentence and word counts are uniform over the
/// inclusive ranges of `spec`.
pub fn generate_text_corpus(spec: &TextCorpusSpec, seed: u64) -> Vec<RawDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi: Vec<Vec<f64>> = (0..spec.k)
        .map(|_| sample_dirichlet(&mut rng, spec.beta, spec.v))
        .collect();
    let words: Vec<String> = (0..spec.v).map(synthetic_word).collect();
    (0..spec.n_docs)
        .map(|d| {
            let theta = sample_dirichlet(&mut rng, spec.alpha, spec.k);
            let n_sent = rng.random_range(spec.sentences.0..=spec.sentences.1);
            let sentences: Vec<String> = (0..n_sent)
                .map(|_| {
                    let len = rng.random_range(spec.sentence_len.0..=spec.sentence_len.1);
                    let mut s = String::new();
                    for i in 0..len {
                        let z = sample_categorical(&mut rng, &theta);
                        let w = &words[sample_categorical(&mut rng, &phi[z])];
                        if i == 0 {
                            let mut chars = w.chars();
                            let first = chars.next().expect("nonempty word");
                            s.extend(first.to_uppercase());
                            s.push_str(chars.as_str());
                        } else {
                            s.push(' ');
                            s.push_str(w);
                        }
                    }
                    s.push('.');
                    s
                })
                .collect();
            RawDocument {
                id: format!("doc{d:05}"),
                language: spec.language,
                text: sentences.join(" "),
            }
        })
        .collect()
}

/// Total-variation distance `0.5 * sum |p - q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Greedy one-to-one matching of rows by smallest total-variation distance.
/// Returns `(recovered, truth, distance)` triples in the order picked.
pub fn greedy_alignment(recovered: &[Vec<f64>], truth: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let mut candidates: Vec<(usize, usize, f64)> = recovered
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            truth
                .iter()
                .enumerate()
                .map(move |(j, t)| (i, j, total_variation(r, t)))
        })
        .collect();
    candidates.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let mut used_r = vec![false; recovered.len()];
    let mut used_t = vec![false; truth.len()];
    let mut out = Vec::new();
    for (i, j, d) in candidates {
        if !used_r[i] && !used_t[j] {
            used_r[i] = true;
            used_t[j] = true;
            out.push((i, j, d));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, Tokenizer};

    #[test]
    fn dirichlet_is_a_distribution_even_for_tiny_concentration() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for a in [0.001, 0.01, 0.5, 1.0, 20.0] {
            let p = sample_dirichlet(&mut rng, a, 20);
            approx::assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
            assert!(p.iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }

    #[test]
    fn words_are_distinct_and_tokenizable() {
        let words: Vec<String> = (0..5000).map(synthetic_word).collect();
        let unique: std::collections::HashSet<_> = words.iter().collect();
        assert_eq!(unique.len(), words.len());
        assert!(words
            .iter()
            .all(|w| w.len() >= 4 && w.chars().all(|c| c.is_ascii_lowercase())));
    }

    #[test]
    fn lda_corpus_shape() {
        let spec = LdaSpec {
            k: 3,
            v: 20,
            n_docs: 10,
            doc_len: 50,
            alpha: 0.5,
            beta: 0.01,
        };
        let s = generate_lda(&spec, 4);
        assert_eq!(s.docs.len(), 10);
        assert!(s.docs.iter().all(|d| d.len() == 50 && d.iter().all(|&w| w < 20)));
        assert_eq!(s.vocabulary().len(), 20);
    }

    #[test]
    fn text_corpus_segments_as_generated() {
        let spec = TextCorpusSpec {
            n_docs: 5,
            sentences: (3, 6),
            sentence_len: (2, 5),
            v: 300,
            ..Default::default()
        };
        let raw = generate_text_corpus(&spec, 2);
        let corpus = build_corpus(&raw, &Tokenizer::new()).unwrap();
        for (r, d) in raw.iter().zip(corpus.documents()) {
            assert_eq!(d.n_sentences(), r.text.matches('.').count());
            assert!((3..=6).contains(&d.n_sentences()));
        }
    }

    #[test]
    fn alignment_matches_permuted_rows() {
        let truth = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let rec = vec![vec![0.0, 0.1, 0.9], vec![0.8, 0.2, 0.0], vec![0.0, 1.0, 0.0]];
        let mut pairs: Vec<(usize, usize)> = greedy_alignment(&rec, &truth).iter().map(|p| (p.0, p.1)).collect();
        pairs.sort();
        assert_eq!(pairs, [(0, 2), (1, 0), (2, 1)]);
    }
}
