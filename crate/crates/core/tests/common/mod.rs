#![allow(dead_code)]

use std::collections::BTreeSet;

use quotree::grammar::Grammar;
use quotree::parser::{brute_force_parse, parse};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const TINY_LEXICON: &str = include_str!("../../data/tiny.lex");

pub const TINY_VOCABULARY: &[&str] = &[
    "Alice", "Bob", "the", "cat", "big", "sleeps", "sees", "quickly", "said", "``", "''", ",",
];

pub fn tiny_grammar() -> Grammar {
    Grammar::shipped_with_lexicon(TINY_LEXICON).expect("tiny lexicon loads")
}

pub fn units(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.to_string()).collect()
}

/// `None` when chart and oracle agree, else a description of the difference.
pub fn compare(units: &[String], g: &Grammar) -> Option<String> {
    let chart = parse(units, g).expect("chart parse");
    let oracle = brute_force_parse(units, g, units.len()).expect("oracle parse");
    if chart == oracle {
        return None;
    }
    let a: BTreeSet<String> = chart.iter().map(|d| d.render(g)).collect();
    let b: BTreeSet<String> = oracle.iter().map(|d| d.render(g)).collect();
    Some(format!(
        "{:?}: chart only {:?}, oracle only {:?}",
        units.join(" "),
        a.difference(&b).collect::<Vec<_>>(),
        b.difference(&a).collect::<Vec<_>>()
    ))
}

/// All strings over `vocab` of length 1..=max.
pub fn all_strings(vocab: &[&str], max: usize) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for w in vocab {
                let mut t = s.clone();
                t.push(w.to_string());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn noun_phrase(rng: &mut StdRng, out: &mut Vec<String>) {
    match rng.gen_range(0..3) {
        0 => out.push("Alice".into()),
        1 => out.push("Bob".into()),
        _ => {
            out.push("the".into());
            for _ in 0..rng.gen_range(0..2) {
                out.push("big".into());
            }
            out.push("cat".into());
        }
    }
}

fn clause(rng: &mut StdRng, out: &mut Vec<String>) {
    noun_phrase(rng, out);
    if rng.gen_bool(0.5) {
        out.push("sleeps".into());
    } else {
        out.push("sees".into());
        noun_phrase(rng, out);
    }
    if rng.gen_bool(0.3) {
        out.push("quickly".into());
    }
}

/// A random input of at most `max` units: half built from phrase shapes the
/// tiny lexicon accepts (possibly with one word swapped), half uniform noise.
pub fn random_input(rng: &mut StdRng, max: usize) -> Vec<String> {
    loop {
        let mut out = Vec::new();
        if rng.gen_bool(0.5) {
            let quoted = rng.gen_bool(0.6);
            if quoted {
                out.push("``".into());
            }
            clause(rng, &mut out);
            if quoted {
                out.push("''".into());
                if rng.gen_bool(0.5) {
                    out.push(",".into());
                    out.push("said".into());
                    noun_phrase(rng, &mut out);
                }
            }
            if rng.gen_bool(0.25) {
                let i = rng.gen_range(0..out.len());
                out[i] = TINY_VOCABULARY.choose(rng).unwrap().to_string();
            }
        } else {
            for _ in 0..rng.gen_range(1..=max) {
                out.push(TINY_VOCABULARY.choose(rng).unwrap().to_string());
            }
        }
        if out.len() <= max {
            return out;
        }
    }
}

pub mod quotes {
    use std::sync::Arc;

    use quotree::derivation::{
        percolate_contains, AnchorFill, Attachment, DerivationError, DerivationRecord, Op,
    };
    use quotree::grammar::Grammar;
    use quotree::tree::GornAddress;

    fn record(
        g: &Grammar,
        tree: &str,
        words: &[&str],
        attachments: Vec<Attachment>,
    ) -> DerivationRecord {
        let t = g.tree_id(tree).unwrap();
        let anchors = words
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let entry = *g
                    .entries_for(w)
                    .unwrap()
                    .iter()
                    .find(|&&e| {
                        g.selections(e)
                            .iter()
                            .any(|s| s.tree == t && s.anchor == i + 1)
                    })
                    .unwrap();
                AnchorFill {
                    pos: 0,
                    entry,
                    word: w.to_string(),
                }
            })
            .collect();
        DerivationRecord::new(t, anchors, attachments)
    }

    fn at_root(child: DerivationRecord) -> Attachment {
        Attachment {
            site: GornAddress::root(),
            op: Op::Adjoin,
            child: Arc::new(child),
        }
    }

    /// Quotes around one node, outermost first. The record attached to the
    /// host is the innermost.
    fn chain(g: &Grammar, label: &str, kinds: &[&str]) -> Vec<Attachment> {
        let mut wrap: Option<DerivationRecord> = None;
        for kind in kinds {
            let (open, close) = if *kind == "dquote" {
                ("``", "''")
            } else {
                ("`", "'")
            };
            let atts = wrap.take().map(at_root).into_iter().collect();
            wrap = Some(record(
                g,
                &format!("betaQuote[{},{}]", label, kind),
                &[open, close],
                atts,
            ));
        }
        wrap.map(at_root).into_iter().collect()
    }

    /// Builds "Alice sleeps" with `kinds[0]` quoting the clause and the rest
    /// quoting the subject, replays it and runs the percolation check.
    pub fn percolate(g: &Grammar, kinds: &[&str]) -> Result<(), DerivationError> {
        let subject = record(g, "alphaNXN", &["Alice"], chain(g, "NP", &kinds[1..]));
        let subject = Attachment {
            site: GornAddress(vec![0]),
            op: Op::Substitute,
            child: Arc::new(subject),
        };
        let mut atts = chain(g, "S", &kinds[..1]);
        atts.push(subject);
        let d = record(g, "alphanx0V", &["sleeps"], atts).replay(g)?;
        let b = d.close_all()?;
        percolate_contains(&d, &b)
    }
}
