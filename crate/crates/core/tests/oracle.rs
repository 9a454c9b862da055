mod common;

use common::*;
use quotree::parser::{enumerate_derivations, parse};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn chart_matches_oracle_on_every_short_string() {
    let g = tiny_grammar();
    let bad: Vec<String> = all_strings(TINY_VOCABULARY, 2)
        .iter()
        .filter_map(|u| compare(u, &g))
        .collect();
    assert!(bad.is_empty(), "{:#?}", bad);
}

#[test]
fn chart_finds_every_generated_derivation() {
    let g = tiny_grammar();
    for len in 1..=4 {
        for d in enumerate_derivations(TINY_VOCABULARY, len, &g).unwrap() {
            let words = d.yield_words(&g).unwrap();
            let forest = parse(&words, &g).unwrap();
            assert!(forest.iter().any(|x| *x == d), "missing {}", d.render(&g));
        }
    }
}

#[test]
fn chart_matches_oracle_on_random_inputs() {
    let g = tiny_grammar();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..40 {
        let u = random_input(&mut rng, 6);
        assert_eq!(compare(&u, &g), None);
    }
}

#[test]
fn quoted_sentence_parses() {
    let g = tiny_grammar();
    let u = units(&["``", "Alice", "sleeps", "''", ",", "said", "Bob"]);
    assert_eq!(parse(&u, &g).unwrap().len(), 1);
}
