//! Independent reference implementations shared by the integration tests.
//! They deliberately avoid the library's own helpers.
#![allow(dead_code, clippy::needless_range_loop)]

use topiclite::corpus::Document;

/// Raw ARTEX weight of every sentence, computed with plain loops over a
/// freshly built sentence-by-word matrix.
pub fn naive_artex_weights(doc: &Document) -> Vec<f64> {
    let mut word_ids: Vec<usize> = Vec::new();
    for s in &doc.sentences {
        for &t in &s.tokens {
            if !word_ids.contains(&t) {
                word_ids.push(t);
            }
        }
    }
    let p = doc.sentences.len();
    let n_words = word_ids.len();
    let mut s = vec![vec![0.0f64; n_words]; p];
    for (mu, sent) in doc.sentences.iter().enumerate() {
        for &t in &sent.tokens {
            let j = word_ids.iter().position(|&w| w == t).unwrap();
            s[mu][j] += 1.0;
        }
    }
    let mut a = vec![0.0; p];
    for mu in 0..p {
        for j in 0..n_words {
            a[mu] += s[mu][j];
        }
        a[mu] /= n_words as f64;
    }
    let mut b = vec![0.0; n_words];
    for j in 0..n_words {
        for mu in 0..p {
            b[j] += s[mu][j];
        }
        b[j] /= p as f64;
    }
    let mut w = vec![0.0; p];
    for mu in 0..p {
        let mut dot = 0.0;
        for j in 0..n_words {
            dot += s[mu][j] * b[j];
        }
        w[mu] = dot * a[mu] / (n_words as f64 * p as f64);
    }
    w
}

/// Picks the `n` largest weights one at a time; a candidate only displaces
/// the current best if it is larger by more than a relative 1e-12, so ties
/// go to the lower index. Returned in increasing index order.
pub fn naive_top_n(w: &[f64], n: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..n {
        let mut best: Option<usize> = None;
        for i in 0..w.len() {
            if chosen.contains(&i) {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(bi) if w[i] > w[bi] + 1e-12 * w[i].abs().max(w[bi].abs()) => best = Some(i),
                _ => {}
            }
        }
        chosen.push(best.unwrap());
    }
    chosen.sort_unstable();
    chosen
}

pub fn brute_force_artex(doc: &Document, rate: f64) -> Vec<usize> {
    let p = doc.sentences.len();
    let n = ((rate * p as f64 + 0.5 + 1e-9).floor() as usize).clamp(1, p);
    naive_top_n(&naive_artex_weights(doc), n)
}

/// Sum over all ordered topic pairs of the symmetrized KL divergence.
pub fn naive_js_total(rows: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for pi in rows {
        for pj in rows {
            for w in 0..pi.len() {
                total += 0.5 * (pi[w] * (pi[w] / pj[w]).ln() + pj[w] * (pj[w] / pi[w]).ln());
            }
        }
    }
    total
}
