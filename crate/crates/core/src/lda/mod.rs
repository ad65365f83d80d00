//! LDA topic spaces trained by collapsed Gibbs sampling, plus fold-in
//! inference for held-out documents.

mod gibbs;
mod model_file;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Vocabulary};
use crate::{Error, Result, WordId};

pub use gibbs::{GibbsSampler, GibbsState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub sample_lag: usize,
    pub seed: u64,
}

impl Hyperparameters {
    /// Defaults: `alpha = 50 / K`, `beta = 0.01`, 1000 sweeps with 500 of
    /// burn-in and a sample every 50 sweeps after that.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            burn_in: 500,
            sample_lag: 50,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidHyperparameters(m));
        if self.k == 0 {
            return bad("K must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if self.burn_in >= self.iterations {
            return bad(format!(
                "burn-in {} must be below iterations {}",
                self.burn_in, self.iterations
            ));
        }
        if self.sample_lag == 0 {
            return bad("sample lag must be at least 1".into());
        }
        Ok(())
    }
}

/// Bookkeeping from a training run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingInfo {
    pub sweeps: usize,
    pub burn_in: usize,
    pub sample_lag: usize,
    /// Number of post-burn-in states averaged into `phi`.
    pub samples: usize,
    pub wall_time_s: f64,
    /// Per-sweep training log-likelihood, when tracing was requested.
    pub log_likelihood: Vec<f64>,
}

/// K topic-word distributions over a vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    /// `K x V`, row-major.
    phi: Vec<f64>,
    /// Transposed copy, `V x K`, for per-word topic lookups.
    phi_by_word: Vec<f64>,
    vocabulary: Vocabulary,
    info: Option<TrainingInfo>,
}

impl TopicModel {
    /// Wraps explicit topic rows. Each row must be a distribution over the
    /// vocabulary (nonnegative, summing to one within `1e-9`).
    pub fn from_phi(rows: Vec<Vec<f64>>, vocabulary: Vocabulary, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidDistribution("model needs at least one topic".into()));
        }
        let v = vocabulary.len();
        for (t, row) in rows.iter().enumerate() {
            if row.len() != v {
                return Err(Error::DimensionMismatch(row.len(), v));
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&p| p.is_nan() || p < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidDistribution(format!("topic {t} sums to {sum}")));
            }
        }
        Ok(Self::from_flat(k, rows.concat(), vocabulary, alpha, beta, seed, None))
    }

    fn from_flat(
        k: usize,
        phi: Vec<f64>,
        vocabulary: Vocabulary,
        alpha: f64,
        beta: f64,
        seed: u64,
        info: Option<TrainingInfo>,
    ) -> Self {
        let v = vocabulary.len();
        let mut phi_by_word = vec![0.0; k * v];
        for t in 0..k {
            for w in 0..v {
                phi_by_word[w * k + t] = phi[t * v + w];
            }
        }
        Self {
            k,
            v,
            alpha,
            beta,
            seed,
            phi,
            phi_by_word,
            vocabulary,
            info,
        }
    }

    /// Point estimate from the sampler's current assignments (no averaging).
    pub fn from_sampler(sampler: &GibbsSampler<'_>, vocabulary: Vocabulary) -> Self {
        let h = sampler.hyper();
        let phi = sampler.state().phi(h.beta);
        Self::from_flat(h.k, phi, vocabulary, h.alpha, h.beta, h.seed, None)
    }

    pub fn n_topics(&self) -> usize {
        self.k
    }

    pub fn vocabulary_size(&self) -> usize {
        self.v
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn info(&self) -> Option<&TrainingInfo> {
        self.info.as_ref()
    }

    /// Word distribution of `topic`.
    pub fn topic(&self, topic: usize) -> &[f64] {
        &self.phi[topic * self.v..(topic + 1) * self.v]
    }

    pub fn topics(&self) -> impl Iterator<Item = &[f64]> {
        self.phi.chunks(self.v)
    }

    /// `phi[k][word]` for every topic k.
    pub fn word_topics(&self, word: WordId) -> &[f64] {
        &self.phi_by_word[word * self.k..(word + 1) * self.k]
    }

    /// Topic distributions relabeled by `order` (new topic i is old `order[i]`).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.k {
            return Err(Error::DimensionMismatch(order.len(), self.k));
        }
        let phi: Vec<f64> = order.iter().flat_map(|&t| self.topic(t).iter().copied()).collect();
        Ok(Self::from_flat(
            self.k,
            phi,
            self.vocabulary.clone(),
            self.alpha,
            self.beta,
            self.seed,
            self.info.clone(),
        ))
    }
}

/// Trains on every document of `corpus`.
pub fn train(corpus: &Corpus, hyper: &Hyperparameters) -> Result<TopicModel> {
    train_tokens(&corpus.token_docs(), corpus.vocabulary().clone(), hyper, false)
}

/// Runs `iterations` sweeps and averages `(n_kw + beta)/(n_k + V beta)` over
/// the states after sweeps `burn_in + lag`, `burn_in + 2 lag`, ... When no
/// sweep falls on that schedule the final state is used. With `trace`, the
/// training log-likelihood is recorded after every sweep.
pub fn train_tokens(
    docs: &[Vec<WordId>],
    vocabulary: Vocabulary,
    hyper: &Hyperparameters,
    trace: bool,
) -> Result<TopicModel> {
    let start = Instant::now();
    let mut sampler = GibbsSampler::new(docs, vocabulary.len(), *hyper)?;
    let (k, v) = (hyper.k, vocabulary.len());
    let mut sum = vec![0.0; k * v];
    let mut samples = 0;
    let mut trace_ll = Vec::new();
    for sweep in 1..=hyper.iterations {
        sampler.sweep();
        if trace {
            trace_ll.push(sampler.log_likelihood());
        }
        if sweep > hyper.burn_in && (sweep - hyper.burn_in).is_multiple_of(hyper.sample_lag) {
            for (acc, p) in sum.iter_mut().zip(sampler.state().phi(hyper.beta)) {
                *acc += p;
            }
            samples += 1;
        }
    }
    let phi = if samples == 0 {
        samples = 1;
        sampler.state().phi(hyper.beta)
    } else {
        sum.into_iter().map(|s| s / samples as f64).collect()
    };
    let info = TrainingInfo {
        sweeps: hyper.iterations,
        burn_in: hyper.burn_in,
        sample_lag: hyper.sample_lag,
        samples,
        wall_time_s: start.elapsed().as_secs_f64(),
        log_likelihood: trace_ll,
    };
    Ok(TopicModel::from_flat(
        k,
        phi,
        vocabulary,
        hyper.alpha,
        hyper.beta,
        hyper.seed,
        Some(info),
    ))
}

/// Topic mixture of an unseen document with `phi` held fixed.
///
/// Runs `fold_sweeps` Gibbs sweeps over the document's own assignments,
/// drawing `z ∝ phi[k][w] (n_dk + alpha)`, and averages
/// `(n_dk + alpha)/(n_d + K alpha)` over the second half of the sweeps.
/// Ids outside the model vocabulary are skipped.
pub fn fold_in(model: &TopicModel, doc: &[WordId], fold_sweeps: usize, seed: u64) -> Result<Vec<f64>> {
    let words: Vec<WordId> = doc.iter().copied().filter(|&w| w < model.v).collect();
    if words.is_empty() {
        return Err(Error::DegenerateDocument);
    }
    let k = model.k;
    let alpha = model.alpha;
    let k_alpha = k as f64 * alpha;
    let n = words.len() as f64;
    if k == 1 {
        return Ok(vec![1.0]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n_dk = vec![0u32; k];
    let mut z: Vec<usize> = words
        .iter()
        .map(|_| {
            let t = rng.random_range(0..k);
            n_dk[t] += 1;
            t
        })
        .collect();

    let theta_now =
        |n_dk: &[u32]| -> Vec<f64> { n_dk.iter().map(|&c| (f64::from(c) + alpha) / (n + k_alpha)).collect() };

    let burn_in = fold_sweeps / 2;
    let mut acc = vec![0.0; k];
    let mut samples = 0usize;
    let mut weights = vec![0.0; k];
    for sweep in 1..=fold_sweeps {
        for (i, &w) in words.iter().enumerate() {
            n_dk[z[i]] -= 1;
            let phi_w = model.word_topics(w);
            let mut total = 0.0;
            for t in 0..k {
                total += phi_w[t] * (f64::from(n_dk[t]) + alpha);
                weights[t] = total;
            }
            let u = rng.random::<f64>() * total;
            let t = weights.iter().position(|&c| u < c).unwrap_or(k - 1);
            n_dk[t] += 1;
            z[i] = t;
        }
        if sweep > burn_in {
            for (a, th) in acc.iter_mut().zip(theta_now(&n_dk)) {
                *a += th;
            }
            samples += 1;
        }
    }
    if samples == 0 {
        return Ok(theta_now(&n_dk));
    }
    Ok(acc.into_iter().map(|a| a / samples as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(n: usize) -> Vocabulary {
        Vocabulary::from_words((0..n).map(|i| format!("w{i}")).collect()).unwrap()
    }

    fn quick(k: usize, seed: u64) -> Hyperparameters {
        Hyperparameters {
            iterations: 60,
            burn_in: 30,
            sample_lag: 10,
            seed,
            ..Hyperparameters::new(k)
        }
    }

    #[test]
    fn defaults() {
        let h = Hyperparameters::new(10);
        assert_eq!(
            (h.alpha, h.beta, h.iterations, h.burn_in, h.sample_lag),
            (5.0, 0.01, 1000, 500, 50)
        );
        h.validate().unwrap();
    }

    #[test]
    fn invalid_hyperparameters() {
        for h in [
            Hyperparameters {
                k: 0,
                ..Hyperparameters::new(1)
            },
            Hyperparameters {
                alpha: 0.0,
                ..Hyperparameters::new(2)
            },
            Hyperparameters {
                beta: -1.0,
                ..Hyperparameters::new(2)
            },
            Hyperparameters {
                burn_in: 10,
                iterations: 10,
                ..Hyperparameters::new(2)
            },
            Hyperparameters {
                sample_lag: 0,
                ..Hyperparameters::new(2)
            },
        ] {
            assert!(matches!(h.validate(), Err(Error::InvalidHyperparameters(_))), "{h:?}");
        }
    }

    #[test]
    fn single_topic_phi_is_smoothed_unigram() {
        let docs = vec![vec![0, 0, 1, 2], vec![0, 2]];
        let h = Hyperparameters {
            beta: 0.5,
            ..quick(1, 3)
        };
        let m = train_tokens(&docs, vocab(4), &h, false).unwrap();
        // T = 6, V = 4: (count + 0.5) / (6 + 2)
        let expect = [3.5 / 8.0, 1.5 / 8.0, 2.5 / 8.0, 0.5 / 8.0];
        for (got, want) in m.topic(0).iter().zip(expect) {
            approx::assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn training_is_deterministic() {
        let docs: Vec<Vec<WordId>> = (0..30)
            .map(|d| (0..20).map(|i| (d * 5 + i * i) % 17).collect())
            .collect();
        let a = train_tokens(&docs, vocab(17), &quick(3, 9), false).unwrap();
        let b = train_tokens(&docs, vocab(17), &quick(3, 9), false).unwrap();
        assert_eq!(a.phi, b.phi);
        let c = train_tokens(&docs, vocab(17), &quick(3, 10), false).unwrap();
        assert_ne!(a.phi, c.phi);
        for row in a.topics() {
            approx::assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
            assert!(row.iter().all(|&p| p > 0.0));
        }
        assert_eq!(a.info().unwrap().samples, 3);
    }

    #[test]
    fn fold_in_edge_cases() {
        let m1 = TopicModel::from_phi(vec![vec![0.5, 0.5]], vocab(2), 1.0, 0.01, 0).unwrap();
        assert_eq!(fold_in(&m1, &[0, 1], 10, 0).unwrap(), [1.0]);
        assert!(matches!(fold_in(&m1, &[], 10, 0), Err(Error::DegenerateDocument)));
        assert!(matches!(fold_in(&m1, &[7, 9], 10, 0), Err(Error::DegenerateDocument)));
    }

    #[test]
    fn fold_in_finds_exclusive_topic() {
        // Topic 2 owns words 4 and 5 exclusively (up to smoothing).
        let (e, h) = (1e-6, 0.5 - 2e-6);
        let rows = vec![vec![h, h, e, e, e, e], vec![e, e, h, h, e, e], vec![e, e, e, e, h, h]];
        let m = TopicModel::from_phi(rows, vocab(6), 0.1, 0.01, 0).unwrap();
        let theta = fold_in(&m, &[4, 5, 5, 4, 4, 5, 4, 5], 40, 1).unwrap();
        approx::assert_abs_diff_eq!(theta.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
        let argmax = (0..3).max_by(|&a, &b| theta[a].total_cmp(&theta[b])).unwrap();
        assert_eq!(argmax, 2);
    }

    #[test]
    fn from_phi_validation() {
        assert!(TopicModel::from_phi(vec![vec![0.5, 0.6]], vocab(2), 1.0, 0.1, 0).is_err());
        assert!(TopicModel::from_phi(vec![vec![1.0]], vocab(2), 1.0, 0.1, 0).is_err());
        assert!(TopicModel::from_phi(vec![], vocab(2), 1.0, 0.1, 0).is_err());
    }

    #[test]
    fn permutation_relabels_topics() {
        let m = TopicModel::from_phi(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vocab(2), 1.0, 0.1, 0).unwrap();
        let p = m.permuted(&[1, 0]).unwrap();
        assert_eq!(p.topic(0), [0.0, 1.0]);
        assert_eq!(p.word_topics(0), [0.0, 1.0]);
    }
}
