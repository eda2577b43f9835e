//! Property tests for the alignment/extraction pipeline: oracle equality of
//! the DP cost against brute-force enumeration, reconstruction through
//! `apply_edits`, idempotence, and determinism.

mod common;

use common::{all_sequences, oracle_cost_memo, oracle_cost_naive};
use gecstrat_core::{align, apply_edits, extract_edits, CostConfig, Lexicon};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

fn random_tokens(rng: &mut StdRng, vocab: &[&str], max_len: usize) -> Vec<String> {
    let len = rng.random_range(0..=max_len);
    (0..len)
        .map(|_| vocab[rng.random_range(0..vocab.len())].to_string())
        .collect()
}

// vocab of 20 word forms including case variants of the same word
const VOCAB: [&str; 20] = [
    "the", "The", "cat", "cats", "sat", "on", "a", "mat", "in", "In", "very", "good", "go",
    "went", ",", ".", "word", "Word", "order", "b",
];

#[test]
fn dp_cost_equals_naive_oracle_exhaustively() {
    let cfg: CostConfig = CostConfig::default();
    let sequences = all_sequences(&["a", "b", "A"], 4);
    assert_eq!(sequences.len(), 121);
    let mut checked = 0usize;
    for src in &sequences {
        for tgt in &sequences {
            let got = align(src, tgt, &cfg).total_cost;
            let want = oracle_cost_naive(src, tgt, &cfg);
            assert_eq!(got, want, "src={src:?} tgt={tgt:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 121 * 121);
}

#[test]
fn dp_cost_equals_memo_oracle_on_seeded_pairs() {
    let cfg: CostConfig = CostConfig::default();
    let mut rng = StdRng::seed_from_u64(0x06ec_57a7);
    for _ in 0..2_000 {
        let src = random_tokens(&mut rng, &VOCAB, 8);
        let tgt = random_tokens(&mut rng, &VOCAB, 8);
        let got = align(&src, &tgt, &cfg).total_cost;
        let want = oracle_cost_memo(&src, &tgt, &cfg);
        assert_eq!(got, want, "src={src:?} tgt={tgt:?}");
    }
}

#[test]
fn extraction_reconstructs_random_pairs() {
    let cfg: CostConfig = CostConfig::default();
    let lexicon = Lexicon::bundled();
    let mut rng = StdRng::seed_from_u64(0x06ec_57a8);
    for _ in 0..1_000 {
        let src = random_tokens(&mut rng, &VOCAB, 15);
        let tgt = random_tokens(&mut rng, &VOCAB, 15);
        let edits = extract_edits(&src, &tgt, &cfg, &lexicon);
        let rebuilt = apply_edits(&src, &edits).unwrap();
        assert_eq!(rebuilt, tgt, "src={src:?} edits={edits:?}");
    }
}

#[test]
fn extraction_is_idempotent_and_deterministic() {
    let cfg: CostConfig = CostConfig::default();
    let lexicon = Lexicon::bundled();
    let mut rng = StdRng::seed_from_u64(0x06ec_57a9);
    for _ in 0..300 {
        let src = random_tokens(&mut rng, &VOCAB, 12);
        assert!(extract_edits(&src, &src, &cfg, &lexicon).is_empty());
        let tgt = random_tokens(&mut rng, &VOCAB, 12);
        let first = align(&src, &tgt, &cfg);
        let second = align(&src, &tgt, &cfg);
        assert_eq!(first, second);
        assert_eq!(
            extract_edits(&src, &tgt, &cfg, &lexicon),
            extract_edits(&src, &tgt, &cfg, &lexicon)
        );
    }
}
