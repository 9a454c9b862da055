mod common;

use common::*;
use proptest::prelude::*;
use quotree::grammar::Grammar;
use quotree::parser::{parse, parse_text};
use quotree::tokenizer::{
    canonical_words, detokenize, normalize_transposition, pair_quotes, tokenize,
};

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec![
            "he", "said", "Dr.", "it's", ",", ".", "?", "!", ":", "--", "``", "''", "`", "'", "\"",
            "\u{201C}", "\u{201D}", "\u{2018}", "\u{2019}", " ",
        ]),
        0..14,
    )
    .prop_map(|parts| parts.concat())
}

fn tiny_units() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(TINY_VOCABULARY.to_vec()), 1..=5)
        .prop_map(|v| v.into_iter().map(str::to_string).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn tokens_cover_disjoint_ordered_spans(s in text()) {
        let toks = tokenize(&s);
        let chars = s.chars().count();
        for w in toks.windows(2) {
            prop_assert!(w[0].span.end <= w[1].span.start);
        }
        for t in &toks {
            prop_assert!(t.span.start < t.span.end && t.span.end <= chars);
            prop_assert!(!t.surface.is_empty());
        }
    }

    #[test]
    fn normalizing_twice_changes_nothing(s in text()) {
        let once = normalize_transposition(&tokenize(&s));
        prop_assert_eq!(normalize_transposition(&once), once);
    }

    #[test]
    fn detokenized_text_tokenizes_to_same_words(s in text()) {
        let toks = normalize_transposition(&tokenize(&s));
        if pair_quotes(&toks).is_ok() {
            prop_assert_eq!(canonical_words(&tokenize(&detokenize(&toks))), canonical_words(&toks));
        }
    }

    #[test]
    fn quote_pairs_nest(s in text()) {
        if let Ok(p) = pair_quotes(&tokenize(&s)) {
            for a in &p.pairs {
                prop_assert!(a.open < a.close);
                for b in &p.pairs {
                    let crossing = a.open < b.open && b.open < a.close && a.close < b.close;
                    prop_assert!(!crossing);
                }
            }
        }
    }

    #[test]
    fn chart_agrees_with_oracle(u in tiny_units()) {
        let g = tiny_grammar();
        prop_assert_eq!(compare(&u, &g), None);
    }

    #[test]
    fn every_derivation_validates_and_spells_the_input(u in tiny_units()) {
        let g = tiny_grammar();
        for d in parse(&u, &g).unwrap().iter() {
            prop_assert!(d.validate(&g).is_ok());
            prop_assert_eq!(&d.yield_words(&g).unwrap(), &u);
        }
    }
}

#[test]
fn parse_never_panics_on_shipped_vocabulary_noise() {
    let g = Grammar::shipped();
    let words = [
        "He", "said", ",", "``", "I", "can't", "use", "you", "''", ".", ":", "--", "that",
    ];
    let mut runner = proptest::test_runner::TestRunner::default();
    runner
        .run(
            &prop::collection::vec(prop::sample::select(words.to_vec()), 1..8),
            |ws| {
                let _ = parse_text(&ws.join(" "), &g);
                Ok(())
            },
        )
        .unwrap();
}
