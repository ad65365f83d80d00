//! Topic-space scores: held-out perplexity and divergence between topics.
//!
//! The topic divergence follows the symmetrized Kullback-Leibler form
//! `JS(p, q) = (KL(p, q) + KL(q, p)) / 2`, not the mixture-based
//! Jensen-Shannon divergence. All logarithms are natural.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Document, Vocabulary};
use crate::lda::{fold_in, TopicModel};
use crate::{derive_seed, fnv1a, Error, Result, WordId};

/// A test document encoded against a model vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldOutDoc {
    pub id: String,
    pub tokens: Vec<WordId>,
    /// Tokens absent from the model vocabulary.
    pub n_unknown: usize,
}

impl HeldOutDoc {
    pub fn from_words<S: AsRef<str>>(id: impl Into<String>, words: &[S], model_vocab: &Vocabulary) -> Self {
        let mut tokens = Vec::with_capacity(words.len());
        let mut n_unknown = 0;
        for w in words {
            match model_vocab.lookup(w.as_ref()) {
                Some(id) => tokens.push(id),
                None => n_unknown += 1,
            }
        }
        Self {
            id: id.into(),
            tokens,
            n_unknown,
        }
    }

    /// Re-encodes a document whose ids refer to `source` into the ids of `model_vocab`.
    pub fn from_document(doc: &Document, source: &Vocabulary, model_vocab: &Vocabulary) -> Self {
        let words: Vec<&str> = doc.tokens().map(|t| source.words()[t].as_str()).collect();
        Self::from_words(doc.id.clone(), &words, model_vocab)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerplexityReport {
    pub perplexity: f64,
    pub entropy_nats: f64,
    pub entropy_bits: f64,
    pub n_tokens_scored: usize,
    /// Unknown-word tokens, including every token of a degenerate document.
    pub n_tokens_skipped: usize,
    /// Documents with no token known to the model.
    pub n_degenerate_docs: usize,
}

/// Fold-in topic proportions of a held-out document, seeded from `seed` and
/// the document id exactly as [`perplexity`] does.
pub fn held_out_theta(model: &TopicModel, doc: &HeldOutDoc, fold_sweeps: usize, seed: u64) -> Result<Vec<f64>> {
    fold_in(
        model,
        &doc.tokens,
        fold_sweeps,
        derive_seed(seed, fnv1a(doc.id.as_bytes())),
    )
}

/// `exp(-(1/N) sum_w log P(w))` over every known test token, where
/// `P(w) = sum_k theta_d[k] phi[k][w]` and `theta_d` comes from [`fold_in`].
///
/// Each document's fold-in seed is derived from `seed` and its id, and the
/// per-document sums are reduced in id order, so the result does not depend
/// on the order of `docs`.
pub fn perplexity(model: &TopicModel, docs: &[HeldOutDoc], fold_sweeps: usize, seed: u64) -> Result<PerplexityReport> {
    let mut parts: Vec<(&str, Option<f64>, usize, usize)> = docs
        .par_iter()
        .map(|doc| match held_out_theta(model, doc, fold_sweeps, seed) {
            Ok(theta) => {
                let ll: f64 = doc.tokens.iter().map(|&w| word_log_prob(model, &theta, w)).sum();
                Ok((doc.id.as_str(), Some(ll), doc.tokens.len(), doc.n_unknown))
            }
            Err(Error::DegenerateDocument) => Ok((doc.id.as_str(), None, 0, doc.n_unknown + doc.tokens.len())),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    parts.sort_by(|a, b| {
        a.0.cmp(b.0).then_with(|| {
            a.1.unwrap_or(f64::NEG_INFINITY)
                .total_cmp(&b.1.unwrap_or(f64::NEG_INFINITY))
        })
    });

    let mut log_lik = 0.0;
    let (mut scored, mut skipped, mut degenerate) = (0, 0, 0);
    for (_, ll, n, unknown) in parts {
        match ll {
            Some(ll) => log_lik += ll,
            None => degenerate += 1,
        }
        scored += n;
        skipped += unknown;
    }
    if degenerate > 0 {
        log::warn!("{degenerate} test document(s) had no known token and were skipped");
    }
    if scored == 0 {
        return Err(Error::NoScoreableTokens);
    }
    let entropy_nats = -log_lik / scored as f64;
    Ok(PerplexityReport {
        perplexity: entropy_nats.exp(),
        entropy_nats,
        entropy_bits: entropy_nats / std::f64::consts::LN_2,
        n_tokens_scored: scored,
        n_tokens_skipped: skipped,
        n_degenerate_docs: degenerate,
    })
}

fn word_log_prob(model: &TopicModel, theta: &[f64], w: WordId) -> f64 {
    theta
        .iter()
        .zip(model.word_topics(w))
        .map(|(t, p)| t * p)
        .sum::<f64>()
        .ln()
}

/// `sum_w p[w] ln(p[w] / q[w])`. Terms with `p[w] = 0` contribute nothing.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    let mut kl = 0.0;
    for (w, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Err(Error::NonAbsolutelyContinuous(w));
        }
        kl += pi * (pi / qi).ln();
    }
    Ok(kl)
}

/// `(KL(p, q) + KL(q, p)) / 2`.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    Ok(0.5 * (kl_divergence(p, q)? + kl_divergence(q, p)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    pub k: usize,
    /// `K x K`, row-major; symmetric with a zero diagonal.
    pub pairwise: Vec<f64>,
    /// Sum over all ordered pairs, so each unordered pair counts twice.
    pub total: f64,
}

impl DivergenceReport {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pairwise[i * self.k + j]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["topic".to_string()];
        header.extend((0..self.k).map(|j| j.to_string()));
        w.write_record(&header)?;
        for i in 0..self.k {
            let mut row = vec![i.to_string()];
            row.extend((0..self.k).map(|j| self.get(i, j).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Divergence between every pair of topics of a model.
pub fn js_model(model: &TopicModel) -> Result<DivergenceReport> {
    let k = model.n_topics();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| js_divergence(model.topic(i), model.topic(j)))
        .collect::<Result<_>>()?;
    let mut pairwise = vec![0.0; k * k];
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        pairwise[i * k + j] = v;
        pairwise[j * k + i] = v;
    }
    let total = pairwise.iter().sum();
    Ok(DivergenceReport { k, pairwise, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn vocab(n: usize) -> Vocabulary {
        Vocabulary::from_words((0..n).map(|i| format!("w{i}")).collect()).unwrap()
    }

    fn doc(id: &str, tokens: Vec<WordId>) -> HeldOutDoc {
        HeldOutDoc {
            id: id.into(),
            tokens,
            n_unknown: 0,
        }
    }

    #[test]
    fn uniform_model_scores_vocabulary_size() {
        let v = 50;
        let m = TopicModel::from_phi(vec![vec![1.0 / v as f64; v]], vocab(v), 1.0, 0.01, 0).unwrap();
        let r = perplexity(&m, &[doc("a", vec![0, 3, 3, 49]), doc("b", vec![7])], 5, 0).unwrap();
        approx::assert_abs_diff_eq!(r.perplexity, 50.0, epsilon = 1e-9);
        approx::assert_abs_diff_eq!(r.entropy_bits, 50f64.log2(), epsilon = 1e-12);
        assert_eq!(r.n_tokens_scored, 5);
    }

    #[test]
    fn certain_model_scores_one() {
        let m = TopicModel::from_phi(vec![vec![1.0]], vocab(1), 1.0, 0.01, 0).unwrap();
        let r = perplexity(&m, &[doc("a", vec![0, 0, 0])], 5, 0).unwrap();
        assert_eq!(r.perplexity, 1.0);
    }

    #[test]
    fn unknown_and_degenerate_documents_are_counted() {
        let v = vocab(3);
        let m = TopicModel::from_phi(vec![vec![0.2, 0.3, 0.5]], v.clone(), 1.0, 0.01, 0).unwrap();
        let a = HeldOutDoc::from_words("a", &["w0", "zzz", "w2"], &v);
        assert_eq!((a.tokens.clone(), a.n_unknown), (vec![0, 2], 1));
        let b = HeldOutDoc::from_words("b", &["nope", "nada"], &v);
        let r = perplexity(&m, &[a, b.clone()], 5, 0).unwrap();
        assert_eq!((r.n_tokens_scored, r.n_tokens_skipped, r.n_degenerate_docs), (2, 3, 1));
        approx::assert_relative_eq!(r.perplexity, (0.2f64 * 0.5).powf(-0.5), max_relative = 1e-12);
        assert!(matches!(perplexity(&m, &[b], 5, 0), Err(Error::NoScoreableTokens)));
        assert!(matches!(perplexity(&m, &[], 5, 0), Err(Error::NoScoreableTokens)));
    }

    #[test]
    fn kl_examples() {
        let p = [0.9, 0.1];
        let q = [0.1, 0.9];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let closed = 0.8 * 9f64.ln();
        approx::assert_abs_diff_eq!(kl_divergence(&p, &q).unwrap(), closed, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(closed, 1.7578, epsilon = 1e-4);
        approx::assert_abs_diff_eq!(js_divergence(&p, &q).unwrap(), closed, epsilon = 1e-12);
        let u = vec![0.01; 100];
        assert_eq!(kl_divergence(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn kl_guards() {
        assert!(matches!(
            kl_divergence(&[0.5, 0.5], &[1.0, 0.0]),
            Err(Error::NonAbsolutelyContinuous(1))
        ));
        assert_eq!(kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 2f64.ln());
        assert!(matches!(
            kl_divergence(&[1.0], &[0.5, 0.5]),
            Err(Error::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn js_model_small_cases() {
        let one = TopicModel::from_phi(vec![vec![0.3, 0.7]], vocab(2), 1.0, 0.1, 0).unwrap();
        assert_eq!(js_model(&one).unwrap().total, 0.0);
        let two = TopicModel::from_phi(vec![vec![0.3, 0.7], vec![0.6, 0.4]], vocab(2), 1.0, 0.1, 0).unwrap();
        let r = js_model(&two).unwrap();
        let js = js_divergence(two.topic(0), two.topic(1)).unwrap();
        assert_eq!(r.total, 2.0 * js);
        assert_eq!((r.get(0, 0), r.get(0, 1), r.get(1, 0)), (0.0, js, js));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().next(), Some("topic,0,1"));
    }

    fn distribution(raw: Vec<f64>) -> Vec<f64> {
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    proptest! {
        #[test]
        fn js_is_symmetric(a in proptest::collection::vec(1e-3f64..1.0, 8), b in proptest::collection::vec(1e-3f64..1.0, 8)) {
            let (p, q) = (distribution(a), distribution(b));
            prop_assert_eq!(js_divergence(&p, &q).unwrap(), js_divergence(&q, &p).unwrap());
            prop_assert!(js_divergence(&p, &q).unwrap() >= 0.0);
            prop_assert_eq!(js_divergence(&p, &p).unwrap(), 0.0);
        }

        #[test]
        fn perplexity_ignores_document_order(seed in any::<u64>(), rot in 0usize..4) {
            let rows = vec![distribution(vec![5.0, 1.0, 1.0, 2.0]), distribution(vec![1.0, 4.0, 3.0, 1.0])];
            let m = TopicModel::from_phi(rows, vocab(4), 0.5, 0.01, 0).unwrap();
            let mut docs = vec![
                doc("a", vec![0, 0, 3, 1]),
                doc("b", vec![1, 2, 2]),
                doc("c", vec![3, 0]),
                doc("d", vec![2, 1, 1, 0, 3]),
            ];
            let before = perplexity(&m, &docs, 6, seed).unwrap();
            docs.rotate_left(rot);
            docs.swap(0, 3);
            prop_assert_eq!(before, perplexity(&m, &docs, 6, seed).unwrap());
        }
    }
}
