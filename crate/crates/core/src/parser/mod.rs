//! Chart parsing over lexical units, and an exhaustive generator used to
//! cross-check it on short inputs.

mod brute;
mod chart;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::derivation::DerivationRecord;
use crate::grammar::Grammar;
use crate::tokenizer::{
    canonical_words, normalize_transposition, pair_quotes, tokenize, QuoteError,
};

pub use brute::MAX_BRUTE_FORCE_TOKENS;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown word `{word}` at position {pos}")]
    UnknownWord { word: String, pos: usize },
    #[error(transparent)]
    Quotes(#[from] QuoteError),
    #[error("input of {len} tokens exceeds the bound of {bound}")]
    TooLong { len: usize, bound: usize },
}

/// Every complete, feature-valid derivation of one input, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseForest {
    pub units: Vec<String>,
    pub derivations: Vec<DerivationRecord>,
}

impl ParseForest {
    pub fn is_empty(&self) -> bool {
        self.derivations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.derivations.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DerivationRecord> {
        self.derivations.iter()
    }
}

/// Lexicon entries for each unit.
fn lookup(units: &[String], g: &Grammar) -> Result<Vec<Vec<usize>>, ParseError> {
    units
        .iter()
        .enumerate()
        .map(|(pos, w)| {
            g.entries_for(w)
                .map(<[usize]>::to_vec)
                .map_err(|_| ParseError::UnknownWord {
                    word: w.clone(),
                    pos,
                })
        })
        .collect()
}

fn finish(
    units: &[String],
    g: &Grammar,
    candidates: impl IntoIterator<Item = DerivationRecord>,
) -> ParseForest {
    let valid: BTreeSet<DerivationRecord> = candidates
        .into_iter()
        .filter(|d| d.validate(g).is_ok())
        .collect();
    ParseForest {
        units: units.to_vec(),
        derivations: valid.into_iter().collect(),
    }
}

/// Parses a sequence of lexical units (see [`Grammar::segment`]).
pub fn parse(units: &[String], g: &Grammar) -> Result<ParseForest, ParseError> {
    let entries = lookup(units, g)?;
    let candidates = chart::Chart::run(g, units, &entries);
    Ok(finish(units, g, candidates))
}

/// Exhaustive search over derivations whose yield has the input's length.
/// Refuses inputs longer than `bound`, and any bound above
/// [`MAX_BRUTE_FORCE_TOKENS`].
pub fn brute_force_parse(
    units: &[String],
    g: &Grammar,
    bound: usize,
) -> Result<ParseForest, ParseError> {
    let bound = bound.min(MAX_BRUTE_FORCE_TOKENS);
    if units.len() > bound {
        return Err(ParseError::TooLong {
            len: units.len(),
            bound,
        });
    }
    let entries = lookup(units, g)?;
    let candidates = brute::generate(g, units, &entries);
    Ok(finish(units, g, candidates))
}

/// Every feature-valid derivation whose yield has exactly `len` units, all
/// drawn from `vocabulary`. Words may repeat. `len` is capped like
/// [`brute_force_parse`].
pub fn enumerate_derivations<S: AsRef<str>>(
    vocabulary: &[S],
    len: usize,
    g: &Grammar,
) -> Result<Vec<DerivationRecord>, ParseError> {
    if len > MAX_BRUTE_FORCE_TOKENS {
        return Err(ParseError::TooLong {
            len,
            bound: MAX_BRUTE_FORCE_TOKENS,
        });
    }
    let units: Vec<String> = vocabulary.iter().map(|w| w.as_ref().to_string()).collect();
    let entries = lookup(&units, g)?;
    let valid: BTreeSet<DerivationRecord> = brute::generate_all(g, &entries, len)
        .into_iter()
        .filter(|d| d.validate(g).is_ok())
        .collect();
    Ok(valid.into_iter().collect())
}

/// Tokenizes raw text, checks quote pairing, normalizes punctuation order and
/// groups multiword names.
pub fn prepare(text: &str, g: &Grammar) -> Result<Vec<String>, ParseError> {
    let tokens = tokenize(text);
    pair_quotes(&tokens)?;
    let tokens = normalize_transposition(&tokens);
    Ok(g.segment(&canonical_words(&tokens)))
}

pub fn parse_text(text: &str, g: &Grammar) -> Result<ParseForest, ParseError> {
    parse(&prepare(text, g)?, g)
}
