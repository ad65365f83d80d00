//! Topic spaces from compressed corpora.
//!
//! The pipeline ingests a document collection ([`corpus`]), compresses the
//! training part with an extractive summarizer ([`summarize`]), trains an
//! LDA topic space with collapsed Gibbs sampling ([`lda`]) and scores it
//! with held-out perplexity and topic divergence ([`eval`]). [`bench`] runs
//! the whole grid of systems, topic counts and compression rates and
//! writes CSV tables and SVG charts.

pub mod bench;
pub mod corpus;
mod error;
pub mod eval;
pub mod lda;
pub mod summarize;
pub mod synthetic;

pub use error::{Error, Result};

/// Dense vocabulary index.
pub type WordId = usize;

/// Seed for a sub-stream (document, cell, ...) derived from a base seed.
pub(crate) fn derive_seed(base: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a, used where a seed must follow a string key rather than a position.
pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}
