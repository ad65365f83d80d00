use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Hyperparameters;
use crate::{Error, Result, WordId};

/// Topic assignments and the count tables they induce.
///
/// Word-topic counts are stored word-major (`V x K`) so the inner sampling
/// loop reads contiguous memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GibbsState {
    k: usize,
    v: usize,
    z: Vec<Vec<u32>>,
    n_wk: Vec<u32>,
    n_dk: Vec<u32>,
    n_k: Vec<u64>,
    n_d: Vec<u64>,
}

impl GibbsState {
    /// Builds all tables from explicit assignments.
    pub fn from_assignments(docs: &[Vec<WordId>], v: usize, k: usize, z: Vec<Vec<u32>>) -> Result<Self> {
        if z.len() != docs.len() {
            return Err(Error::DimensionMismatch(z.len(), docs.len()));
        }
        let mut state = Self {
            k,
            v,
            n_wk: vec![0; v * k],
            n_dk: vec![0; docs.len() * k],
            n_k: vec![0; k],
            n_d: vec![0; docs.len()],
            z: Vec::new(),
        };
        for (d, (doc, zd)) in docs.iter().zip(&z).enumerate() {
            if doc.len() != zd.len() {
                return Err(Error::DimensionMismatch(zd.len(), doc.len()));
            }
            for (&w, &t) in doc.iter().zip(zd) {
                let t = t as usize;
                if w >= v {
                    return Err(Error::DimensionMismatch(w, v));
                }
                if t >= k {
                    return Err(Error::DimensionMismatch(t, k));
                }
                state.n_wk[w * k + t] += 1;
                state.n_dk[d * k + t] += 1;
                state.n_k[t] += 1;
                state.n_d[d] += 1;
            }
        }
        state.z = z;
        Ok(state)
    }

    /// Recomputes every table from the current assignments.
    pub fn recount(&self, docs: &[Vec<WordId>]) -> Result<Self> {
        Self::from_assignments(docs, self.v, self.k, self.z.clone())
    }

    pub fn n_topics(&self) -> usize {
        self.k
    }

    pub fn vocabulary_size(&self) -> usize {
        self.v
    }

    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.z
    }

    pub fn n_kw(&self, topic: usize, word: WordId) -> u32 {
        self.n_wk[word * self.k + topic]
    }

    pub fn n_dk(&self, doc: usize, topic: usize) -> u32 {
        self.n_dk[doc * self.k + topic]
    }

    pub fn n_k(&self, topic: usize) -> u64 {
        self.n_k[topic]
    }

    pub fn n_d(&self, doc: usize) -> u64 {
        self.n_d[doc]
    }

    pub fn n_tokens(&self) -> u64 {
        self.n_d.iter().sum()
    }

    /// Checks the marginal identities between the tables.
    pub fn is_consistent(&self) -> bool {
        let k = self.k;
        let by_topic = (0..k).all(|t| (0..self.v).map(|w| u64::from(self.n_wk[w * k + t])).sum::<u64>() == self.n_k[t]);
        let by_doc = self
            .n_d
            .iter()
            .enumerate()
            .all(|(d, &n)| self.n_dk[d * k..(d + 1) * k].iter().map(|&c| u64::from(c)).sum::<u64>() == n);
        by_topic && by_doc && self.n_k.iter().sum::<u64>() == self.n_tokens()
    }

    fn remove(&mut self, d: usize, w: WordId, t: usize) {
        self.n_wk[w * self.k + t] -= 1;
        self.n_dk[d * self.k + t] -= 1;
        self.n_k[t] -= 1;
        self.n_d[d] -= 1;
    }

    fn add(&mut self, d: usize, w: WordId, t: usize) {
        self.n_wk[w * self.k + t] += 1;
        self.n_dk[d * self.k + t] += 1;
        self.n_k[t] += 1;
        self.n_d[d] += 1;
    }

    /// Smoothed topic-word estimate `(n_kw + beta) / (n_k + V beta)`, `K x V` row-major.
    pub fn phi(&self, beta: f64) -> Vec<f64> {
        let (k, v) = (self.k, self.v);
        let mut phi = vec![0.0; k * v];
        for t in 0..k {
            let denom = self.n_k[t] as f64 + v as f64 * beta;
            for w in 0..v {
                phi[t * v + w] = (f64::from(self.n_wk[w * k + t]) + beta) / denom;
            }
        }
        phi
    }
}

/// Collapsed Gibbs sampler over a fixed set of token sequences.
///
/// Each token's topic is drawn from
/// `p(z = k | rest) ∝ (n_kw + beta) / (n_k + V beta) * (n_dk + alpha)`
/// with the token's own assignment removed from the counts.
pub struct GibbsSampler<'a> {
    docs: &'a [Vec<WordId>],
    hyper: Hyperparameters,
    state: GibbsState,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
    sweeps: usize,
}

impl<'a> GibbsSampler<'a> {
    /// Uniform random initial assignment drawn from the seeded stream.
    pub fn new(docs: &'a [Vec<WordId>], v: usize, hyper: Hyperparameters) -> Result<Self> {
        hyper.validate()?;
        let k = hyper.k;
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let z: Vec<Vec<u32>> = docs
            .iter()
            .map(|doc| doc.iter().map(|_| rng.random_range(0..k as u32)).collect())
            .collect();
        let state = GibbsState::from_assignments(docs, v, k, z)?;
        if state.n_tokens() < k as u64 {
            log::warn!("{} topics for only {} tokens", k, state.n_tokens());
        }
        Ok(Self {
            docs,
            hyper,
            state,
            rng,
            weights: vec![0.0; k],
            sweeps: 0,
        })
    }

    pub fn state(&self) -> &GibbsState {
        &self.state
    }

    pub fn hyper(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn docs(&self) -> &[Vec<WordId>] {
        self.docs
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweeps
    }

    /// Resamples every token once, documents and positions in order.
    pub fn sweep(&mut self) {
        let k = self.hyper.k;
        if k == 1 {
            self.sweeps += 1;
            return;
        }
        let (alpha, beta) = (self.hyper.alpha, self.hyper.beta);
        let v_beta = self.state.v as f64 * beta;
        for (d, doc) in self.docs.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = self.state.z[d][i] as usize;
                self.state.remove(d, w, old);

                let n_w = &self.state.n_wk[w * k..(w + 1) * k];
                let n_d = &self.state.n_dk[d * k..(d + 1) * k];
                let mut total = 0.0;
                for t in 0..k {
                    total +=
                        (f64::from(n_w[t]) + beta) / (self.state.n_k[t] as f64 + v_beta) * (f64::from(n_d[t]) + alpha);
                    self.weights[t] = total;
                }
                let u = self.rng.random::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.state.add(d, w, new);
                self.state.z[d][i] = new as u32;
            }
        }
        self.sweeps += 1;
    }

    /// Normalized full conditional for token `i` of document `d`, with that
    /// token excluded from the counts. Does not change the state.
    pub fn conditional(&self, d: usize, i: usize) -> Vec<f64> {
        let k = self.hyper.k;
        let (alpha, beta) = (self.hyper.alpha, self.hyper.beta);
        let v_beta = self.state.v as f64 * beta;
        let w = self.docs[d][i];
        let own = self.state.z[d][i] as usize;
        let minus = |t: usize| u64::from(t == own);
        let raw: Vec<f64> = (0..k)
            .map(|t| {
                let n_kw = (u64::from(self.state.n_kw(t, w)) - minus(t)) as f64;
                let n_k = (self.state.n_k[t] - minus(t)) as f64;
                let n_dk = (u64::from(self.state.n_dk(d, t)) - minus(t)) as f64;
                (n_kw + beta) / (n_k + v_beta) * (n_dk + alpha)
            })
            .collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / sum).collect()
    }

    /// `sum_i log[(n_kw + beta)/(n_k + V beta) * (n_dk + alpha)/(n_d + K alpha)]`
    /// under the current assignments.
    pub fn log_likelihood(&self) -> f64 {
        let k = self.hyper.k;
        let (alpha, beta) = (self.hyper.alpha, self.hyper.beta);
        let v_beta = self.state.v as f64 * beta;
        let k_alpha = k as f64 * alpha;
        let mut ll = 0.0;
        for (d, doc) in self.docs.iter().enumerate() {
            let n_d = self.state.n_d[d] as f64 + k_alpha;
            for (&w, &t) in doc.iter().zip(&self.state.z[d]) {
                let t = t as usize;
                let word = (f64::from(self.state.n_kw(t, w)) + beta) / (self.state.n_k[t] as f64 + v_beta);
                let topic = (f64::from(self.state.n_dk(d, t)) + alpha) / n_d;
                ll += (word * topic).ln();
            }
        }
        ll
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyper(k: usize) -> Hyperparameters {
        Hyperparameters {
            alpha: 0.5,
            beta: 0.1,
            iterations: 10,
            burn_in: 5,
            ..Hyperparameters::new(k)
        }
    }

    #[test]
    fn single_topic_init_and_sweep() {
        let docs = vec![vec![0, 1, 1], vec![2]];
        let mut s = GibbsSampler::new(&docs, 3, hyper(1)).unwrap();
        assert!(s.state().assignments().iter().flatten().all(|&z| z == 0));
        assert_eq!(s.state().n_k(0), 4);
        let before = s.state().clone();
        s.sweep();
        assert_eq!(s.state(), &before);
    }

    #[test]
    fn seeded_init_is_reproducible() {
        let docs = vec![vec![0, 1, 2, 3, 0, 1], vec![2, 3, 3]];
        let a = GibbsSampler::new(&docs, 4, hyper(3)).unwrap();
        let b = GibbsSampler::new(&docs, 4, hyper(3)).unwrap();
        assert_eq!(a.state(), b.state());
        assert!(a.state().is_consistent());
        assert_eq!(a.state(), &a.state().recount(&docs).unwrap());
    }

    #[test]
    fn symmetric_counts_give_even_conditional() {
        // Token 0 of doc 0 removed leaves: word 0 once in each topic, doc
        // counts one per topic.
        let docs = vec![vec![0, 0, 0]];
        let z = vec![vec![0, 0, 1]];
        let mut s = GibbsSampler::new(&docs, 1, hyper(2)).unwrap();
        s.state = GibbsState::from_assignments(&docs, 1, 2, z).unwrap();
        let c = s.conditional(0, 0);
        assert_eq!(c, [0.5, 0.5]);
    }

    #[test]
    fn three_token_conditionals_by_hand() {
        // docs: d0 = [w0, w1], d1 = [w0]; z = [[0, 1], [1]]; V = 2, K = 2,
        // alpha = 0.5, beta = 0.1, V beta = 0.2.
        let docs = vec![vec![0, 1], vec![0]];
        let mut s = GibbsSampler::new(&docs, 2, hyper(2)).unwrap();
        s.state = GibbsState::from_assignments(&docs, 2, 2, vec![vec![0, 1], vec![1]]).unwrap();
        let norm = |x: [f64; 2]| [x[0] / (x[0] + x[1]), x[1] / (x[0] + x[1])];

        // d0 pos0 (w0, z=0) removed: n_kw(.,w0) = [0,1], n_k = [0,2], n_dk(d0) = [0,1]
        let e = norm([(0.1 / 0.2) * 0.5, (1.1 / 2.2) * 1.5]);
        // d0 pos1 (w1, z=1) removed: n_kw(.,w1) = [0,0], n_k = [1,1], n_dk(d0) = [1,0]
        let f = norm([(0.1 / 1.2) * 1.5, (0.1 / 1.2) * 0.5]);
        // d1 pos0 (w0, z=1) removed: n_kw(.,w0) = [1,0], n_k = [1,1], n_dk(d1) = [0,0]
        let g = norm([(1.1 / 1.2) * 0.5, (0.1 / 1.2) * 0.5]);
        for (got, want) in [
            (s.conditional(0, 0), e),
            (s.conditional(0, 1), f),
            (s.conditional(1, 0), g),
        ] {
            approx::assert_relative_eq!(got[0], want[0], max_relative = 1e-12);
            approx::assert_relative_eq!(got[1], want[1], max_relative = 1e-12);
        }
        approx::assert_relative_eq!(g[0], 11.0 / 12.0, max_relative = 1e-12);
    }

    #[test]
    fn sweeps_conserve_counts() {
        let docs: Vec<Vec<WordId>> = (0..20)
            .map(|d| (0..15).map(|i| (d * 7 + i * 3) % 11).collect())
            .collect();
        let mut s = GibbsSampler::new(&docs, 11, hyper(4)).unwrap();
        for _ in 0..25 {
            s.sweep();
        }
        assert!(s.state().is_consistent());
        assert_eq!(s.state(), &s.state().recount(&docs).unwrap());
        assert_eq!(s.state().n_tokens(), 300);
        assert_eq!(s.sweeps_done(), 25);
    }

    #[test]
    fn phi_rows_sum_to_one() {
        let docs = vec![vec![0, 1, 2, 2], vec![1, 1]];
        let s = GibbsSampler::new(&docs, 3, hyper(2)).unwrap();
        let phi = s.state().phi(0.1);
        for row in phi.chunks(3) {
            approx::assert_abs_diff_eq!(row.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn out_of_range_assignment_rejected() {
        let docs = vec![vec![0]];
        assert!(GibbsState::from_assignments(&docs, 1, 2, vec![vec![2]]).is_err());
        assert!(GibbsState::from_assignments(&docs, 1, 2, vec![vec![0, 1]]).is_err());
    }
}
