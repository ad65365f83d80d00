//! End-to-end behaviour of training and the experiment grid on small corpora.

use topiclite::bench::{run_grid, ExperimentGrid};
use topiclite::corpus::{build_corpus, Tokenizer};
use topiclite::lda::{self, Hyperparameters};
use topiclite::summarize::System;
use topiclite::synthetic::{generate_lda, generate_text_corpus, LdaSpec, TextCorpusSpec};

#[test]
fn training_log_likelihood_improves() {
    let spec = LdaSpec {
        k: 4,
        v: 40,
        n_docs: 100,
        doc_len: 40,
        alpha: 0.3,
        beta: 0.01,
    };
    let data = generate_lda(&spec, 21);
    let hyper = Hyperparameters {
        iterations: 200,
        burn_in: 100,
        sample_lag: 20,
        seed: 21,
        ..Hyperparameters::new(4)
    };
    let model = lda::train_tokens(&data.docs, data.vocabulary(), &hyper, true).unwrap();
    let trace = &model.info().unwrap().log_likelihood;
    assert_eq!(trace.len(), 200);
    let first: f64 = trace[..10].iter().sum::<f64>() / 10.0;
    let last: f64 = trace[trace.len() - 10..].iter().sum::<f64>() / 10.0;
    assert!(last >= first, "first {first} last {last}");
    assert_eq!(model.info().unwrap().samples, 5);
}

#[test]
fn toy_grid_compresses_training_data() {
    let spec = TextCorpusSpec {
        n_docs: 40,
        sentences: (6, 10),
        sentence_len: (4, 8),
        k: 4,
        v: 200,
        ..Default::default()
    };
    let corpus = build_corpus(&generate_text_corpus(&spec, 5), &Tokenizer::new()).unwrap();
    let grid = ExperimentGrid {
        topic_counts: vec![3],
        rates: vec![0.2, 0.5],
        seeds: vec![7],
        iterations: 20,
        burn_in: 10,
        sample_lag: 5,
        fold_sweeps: 5,
        ..ExperimentGrid::default()
    };
    let records = run_grid(&corpus, &grid).unwrap();
    assert_eq!(records.len(), 1 + 3 * 2);
    assert!(records
        .iter()
        .all(|r| r.error.is_none() && r.perplexity.unwrap() >= 1.0));
    let full = records.iter().find(|r| r.system == System::Full).unwrap();
    assert_eq!((full.rate, full.summarize_time_s), (1.0, 0.0));
    let test_scored: Vec<usize> = records.iter().map(|r| r.n_test_scored + r.n_test_skipped).collect();
    assert!(
        test_scored.windows(2).all(|w| w[0] == w[1]),
        "every cell scores the same test split"
    );
    for system in [System::Bf, System::Br, System::Artex] {
        let small = records.iter().find(|r| r.system == system && r.rate == 0.2).unwrap();
        let large = records.iter().find(|r| r.system == system && r.rate == 0.5).unwrap();
        assert!(small.n_train_tokens < large.n_train_tokens, "{system}");
        assert!(large.n_train_tokens < full.n_train_tokens, "{system}");
    }
}
