//! Tokenization, quote pairing and transposition of sentence punctuation
//! out of closing quotes.

use std::fmt;
use std::ops::Range;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Word,
    Punct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PunctKind {
    Comma,
    Period,
    Colon,
    Dash,
    Question,
    Exclam,
    OpenDquote,
    CloseDquote,
    OpenSquote,
    CloseSquote,
}

impl PunctKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PunctKind::Comma => "comma",
            PunctKind::Period => "period",
            PunctKind::Colon => "colon",
            PunctKind::Dash => "dash",
            PunctKind::Question => "question",
            PunctKind::Exclam => "exclam",
            PunctKind::OpenDquote => "open-dquote",
            PunctKind::CloseDquote => "close-dquote",
            PunctKind::OpenSquote => "open-squote",
            PunctKind::CloseSquote => "close-squote",
        }
    }

    /// The form used in the lexicon.
    pub fn canonical(self) -> &'static str {
        match self {
            PunctKind::Comma => ",",
            PunctKind::Period => ".",
            PunctKind::Colon => ":",
            PunctKind::Dash => "--",
            PunctKind::Question => "?",
            PunctKind::Exclam => "!",
            PunctKind::OpenDquote => "``",
            PunctKind::CloseDquote => "''",
            PunctKind::OpenSquote => "`",
            PunctKind::CloseSquote => "'",
        }
    }

    pub fn is_open_quote(self) -> bool {
        matches!(self, PunctKind::OpenDquote | PunctKind::OpenSquote)
    }

    pub fn is_close_quote(self) -> bool {
        matches!(self, PunctKind::CloseDquote | PunctKind::CloseSquote)
    }

    pub fn is_quote(self) -> bool {
        self.is_open_quote() || self.is_close_quote()
    }

    fn arity(self) -> Option<Arity> {
        match self {
            PunctKind::OpenDquote | PunctKind::CloseDquote => Some(Arity::Double),
            PunctKind::OpenSquote | PunctKind::CloseSquote => Some(Arity::Single),
            _ => None,
        }
    }
}

impl fmt::Display for PunctKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
    pub punct: Option<PunctKind>,
    /// Character offsets into the source text.
    pub span: Range<usize>,
}

impl Token {
    pub fn word(surface: &str, span: Range<usize>) -> Token {
        Token {
            surface: surface.to_string(),
            kind: TokenKind::Word,
            punct: None,
            span,
        }
    }

    pub fn punct(surface: &str, p: PunctKind, span: Range<usize>) -> Token {
        Token {
            surface: surface.to_string(),
            kind: TokenKind::Punct,
            punct: Some(p),
            span,
        }
    }

    pub fn canonical(&self) -> &str {
        match self.punct {
            Some(p) => p.canonical(),
            None => &self.surface,
        }
    }

    pub fn is_close_quote(&self) -> bool {
        self.punct.is_some_and(PunctKind::is_close_quote)
    }
}

const ABBREVIATIONS: &[&str] = &[
    "Mr", "Mrs", "Ms", "Dr", "Sen", "St", "Jr", "Sr", "Prof", "Gov", "Rep",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum QuoteDir {
    Open,
    Close,
    Unknown,
}

/// Splits text into words and punctuation. Never fails; quote problems are
/// reported by [`pair_quotes`].
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    // indices into `out` of straight quotes whose direction is unclear
    let mut straight: Vec<(usize, Arity, QuoteDir)> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let run = |ch: char| chars[i..].iter().take_while(|&&x| x == ch).count();
        match c {
            '`' => {
                let n = run('`');
                let mut k = i;
                for _ in 0..n / 2 {
                    out.push(Token::punct("``", PunctKind::OpenDquote, k..k + 2));
                    k += 2;
                }
                if n % 2 == 1 {
                    out.push(Token::punct("`", PunctKind::OpenSquote, k..k + 1));
                }
                i += n;
            }
            '\'' if in_word(&chars, i) => {
                let (w, end) = scan_word(&chars, i);
                out.push(Token::word(&w, i..end));
                i = end;
            }
            '\'' => {
                let n = run('\'');
                if n == 1 {
                    let dir = straight_dir(&chars, i, 1);
                    straight.push((out.len(), Arity::Single, dir));
                    out.push(Token::punct("'", PunctKind::CloseSquote, i..i + 1));
                } else {
                    let mut k = i;
                    if n % 2 == 1 {
                        out.push(Token::punct("'", PunctKind::CloseSquote, k..k + 1));
                        k += 1;
                    }
                    for _ in 0..n / 2 {
                        out.push(Token::punct("''", PunctKind::CloseDquote, k..k + 2));
                        k += 2;
                    }
                }
                i += n;
            }
            '"' => {
                let dir = straight_dir(&chars, i, 1);
                straight.push((out.len(), Arity::Double, dir));
                out.push(Token::punct("\"", PunctKind::CloseDquote, i..i + 1));
                i += 1;
            }
            '\u{201C}' => {
                out.push(Token::punct("\u{201C}", PunctKind::OpenDquote, i..i + 1));
                i += 1;
            }
            '\u{201D}' => {
                out.push(Token::punct("\u{201D}", PunctKind::CloseDquote, i..i + 1));
                i += 1;
            }
            '\u{2018}' => {
                out.push(Token::punct("\u{2018}", PunctKind::OpenSquote, i..i + 1));
                i += 1;
            }
            '\u{2019}' if in_word(&chars, i) => {
                let (w, end) = scan_word(&chars, i);
                out.push(Token::word(&w, i..end));
                i = end;
            }
            '\u{2019}' => {
                out.push(Token::punct("\u{2019}", PunctKind::CloseSquote, i..i + 1));
                i += 1;
            }
            '\u{2014}' | '\u{2013}' => {
                out.push(Token::punct(&c.to_string(), PunctKind::Dash, i..i + 1));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                let n = run('-');
                out.push(Token::punct(&"-".repeat(n), PunctKind::Dash, i..i + n));
                i += n;
            }
            ',' | '.' | ':' | '?' | '!' => {
                let p = match c {
                    ',' => PunctKind::Comma,
                    '.' => PunctKind::Period,
                    ':' => PunctKind::Colon,
                    '?' => PunctKind::Question,
                    _ => PunctKind::Exclam,
                };
                out.push(Token::punct(&c.to_string(), p, i..i + 1));
                i += 1;
            }
            c if c.is_alphanumeric() => {
                let (w, end) = scan_word(&chars, i);
                out.push(Token::word(&w, i..end));
                i = end;
            }
            _ => {
                out.push(Token::word(&c.to_string(), i..i + 1));
                i += 1;
            }
        }
    }
    resolve_straight(&mut out, &straight);
    out
}

fn in_word(chars: &[char], i: usize) -> bool {
    let prev = i.checked_sub(1).and_then(|j| chars.get(j));
    prev.is_some_and(|c| c.is_alphanumeric())
        && chars.get(i + 1).is_some_and(|c| c.is_alphanumeric())
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Scans a word starting at `i`, which may begin mid-word at an apostrophe
/// when called for a contraction tail.
fn scan_word(chars: &[char], start: usize) -> (String, usize) {
    let mut i = start;
    let mut w = String::new();
    while i < chars.len() {
        let c = chars[i];
        let next_alnum = chars.get(i + 1).is_some_and(|c| c.is_alphanumeric());
        let inner = (is_apostrophe(c) || c == '-') && !w.is_empty() && next_alnum;
        let leading = is_apostrophe(c) && i == start && next_alnum;
        let period = c == '.' && !w.is_empty() && keeps_period(&w, chars, i);
        if !(c.is_alphanumeric() || c == '%' || c == '$' || inner || leading || period) {
            break;
        }
        w.push(c);
        i += 1;
    }
    // a contraction tail like "'s" belongs to the word before it
    (w, i)
}

fn keeps_period(w: &str, chars: &[char], i: usize) -> bool {
    let next = chars.get(i + 1).copied();
    if next.is_some_and(|c| c.is_alphanumeric()) {
        // initials and decimals: T.S., 3.5
        let last = w.chars().last().unwrap_or(' ');
        return last.is_uppercase()
            || last.is_ascii_digit() && next.is_some_and(|c| c.is_ascii_digit());
    }
    let bare = w.trim_end_matches('.');
    ABBREVIATIONS.contains(&bare)
        || bare.chars().count() == 1 && bare != "I" && bare.chars().all(char::is_uppercase)
        || w.contains('.') && w.chars().last().is_some_and(char::is_uppercase)
}

fn straight_dir(chars: &[char], i: usize, len: usize) -> QuoteDir {
    let before = i.checked_sub(1).map(|j| chars[j]);
    let after = chars.get(i + len).copied();
    let left_open = before.is_none_or(|c| c.is_whitespace() || "([{".contains(c));
    let right_open = after.is_none_or(|c| c.is_whitespace() || ")]}".contains(c));
    match (left_open, right_open) {
        (true, false) => QuoteDir::Open,
        (false, true) => QuoteDir::Close,
        _ => QuoteDir::Unknown,
    }
}

fn set_dir(t: &mut Token, arity: Arity, open: bool) {
    t.punct = Some(match (arity, open) {
        (Arity::Double, true) => PunctKind::OpenDquote,
        (Arity::Double, false) => PunctKind::CloseDquote,
        (Arity::Single, true) => PunctKind::OpenSquote,
        (Arity::Single, false) => PunctKind::CloseSquote,
    });
}

/// Fixes the direction of straight quotes: adjacency decides where it can,
/// and the remaining ones take the first reading (open before close) that
/// nests legally. With no legal reading, unclear quotes default to open.
fn resolve_straight(tokens: &mut [Token], straight: &[(usize, Arity, QuoteDir)]) {
    for &(idx, arity, dir) in straight {
        set_dir(&mut tokens[idx], arity, dir != QuoteDir::Close);
    }
    if straight.iter().all(|s| s.2 != QuoteDir::Unknown) {
        return;
    }
    let unknown: Vec<usize> = straight
        .iter()
        .filter(|s| s.2 == QuoteDir::Unknown)
        .map(|s| s.0)
        .collect();
    let quotes: Vec<usize> = (0..tokens.len())
        .filter(|&i| tokens[i].punct.is_some_and(PunctKind::is_quote))
        .collect();
    let mut choice = vec![true; tokens.len()];
    let mut stack = Vec::new();
    if search(tokens, &quotes, 0, &unknown, &mut choice, &mut stack) {
        for &i in &unknown {
            let arity = tokens[i].punct.and_then(PunctKind::arity).expect("quote");
            set_dir(&mut tokens[i], arity, choice[i]);
        }
    }
}

fn search(
    tokens: &[Token],
    quotes: &[usize],
    k: usize,
    unknown: &[usize],
    choice: &mut [bool],
    stack: &mut Vec<Arity>,
) -> bool {
    let Some(&i) = quotes.get(k) else {
        return stack.is_empty();
    };
    let p = tokens[i].punct.expect("quote");
    let arity = p.arity().expect("quote");
    let options: &[bool] = if unknown.contains(&i) {
        &[true, false]
    } else if p.is_open_quote() {
        &[true]
    } else {
        &[false]
    };
    for &open in options {
        choice[i] = open;
        if open {
            stack.push(arity);
            if search(tokens, quotes, k + 1, unknown, choice, stack) {
                return true;
            }
            stack.pop();
        } else if stack.last() == Some(&arity) {
            stack.pop();
            if search(tokens, quotes, k + 1, unknown, choice, stack) {
                return true;
            }
            stack.push(arity);
        }
    }
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arity {
    Single,
    Double,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuotePair {
    pub open: usize,
    pub close: usize,
    pub arity: Arity,
}

/// Properly nested quote pairs, ordered by opening index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuotePairing {
    pub pairs: Vec<QuotePair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum QuoteError {
    #[error("unbalanced quotation mark at offset {offset}")]
    Unbalanced { offset: usize },
    #[error("crossing quotation marks at offset {offset}")]
    Crossing { offset: usize },
}

pub fn pair_quotes(tokens: &[Token]) -> Result<QuotePairing, QuoteError> {
    let mut stack: Vec<(usize, Arity)> = Vec::new();
    let mut pairs = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        let Some(p) = t.punct else { continue };
        let Some(arity) = p.arity() else { continue };
        if p.is_open_quote() {
            stack.push((i, arity));
            continue;
        }
        match stack.last() {
            Some(&(open, a)) if a == arity => {
                stack.pop();
                pairs.push(QuotePair {
                    open,
                    close: i,
                    arity,
                });
            }
            _ if stack.iter().any(|&(_, a)| a == arity) => {
                return Err(QuoteError::Crossing {
                    offset: t.span.start,
                })
            }
            _ => {
                return Err(QuoteError::Unbalanced {
                    offset: t.span.start,
                })
            }
        }
    }
    if let Some(&(i, _)) = stack.last() {
        return Err(QuoteError::Unbalanced {
            offset: tokens[i].span.start,
        });
    }
    pairs.sort();
    Ok(QuotePairing { pairs })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TranspositionReport {
    pub commas: usize,
    pub periods: usize,
}

impl TranspositionReport {
    pub fn total(&self) -> usize {
        self.commas + self.periods
    }
}

/// Moves every comma and period that sits inside closing quotes to after
/// them, so the result has no comma or period directly before a closing
/// quote. Other tokens keep their relative order.
pub fn normalize_transposition(tokens: &[Token]) -> Vec<Token> {
    normalize_with_report(tokens).0
}

pub fn normalize_with_report(tokens: &[Token]) -> (Vec<Token>, TranspositionReport) {
    let movable = |t: &Token| matches!(t.punct, Some(PunctKind::Comma | PunctKind::Period));
    let mut report = TranspositionReport::default();
    for (i, t) in tokens.iter().enumerate() {
        // a mark moves exactly when the next other token is a closing quote
        let moves = movable(t)
            && tokens[i + 1..]
                .iter()
                .find(|u| !movable(u))
                .is_some_and(Token::is_close_quote);
        if moves && t.punct == Some(PunctKind::Comma) {
            report.commas += 1;
        } else if moves {
            report.periods += 1;
        }
    }
    let mut out = tokens.to_vec();
    let mut i = 0;
    while i < out.len() {
        if !movable(&out[i]) {
            i += 1;
            continue;
        }
        let run_end = i + out[i..].iter().take_while(|t| movable(t)).count();
        let quotes_end = run_end
            + out[run_end..]
                .iter()
                .take_while(|t| t.is_close_quote())
                .count();
        if quotes_end > run_end {
            out[i..quotes_end].rotate_left(run_end - i);
            // the moved run may now join another run that precedes quotes
            i = quotes_end - (run_end - i);
        } else {
            i = quotes_end;
        }
    }
    (out, report)
}

/// Joins the canonical forms of the tokens with single spaces.
pub fn detokenize(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(Token::canonical)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical surfaces, the form the grammar's lexicon uses.
pub fn canonical_words(tokens: &[Token]) -> Vec<String> {
    tokens.iter().map(|t| t.canonical().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canon(s: &str) -> Vec<String> {
        canonical_words(&tokenize(s))
    }

    #[test]
    fn latex_quote_convention() {
        let t = tokenize("she said, ``Yes.''");
        let kinds: Vec<_> = t.iter().map(|t| t.punct).collect();
        assert_eq!(
            canonical_words(&t),
            ["she", "said", ",", "``", "Yes", ".", "''"]
        );
        assert_eq!(kinds[3], Some(PunctKind::OpenDquote));
        assert_eq!(kinds[6], Some(PunctKind::CloseDquote));
    }

    #[test]
    fn straight_quotes_by_adjacency() {
        let t = tokenize("\"participation\" and \"direct\"");
        let p = pair_quotes(&t).unwrap();
        assert_eq!(p.pairs.len(), 2);
        assert_eq!(
            canon("\"participation\" and \"direct\""),
            ["``", "participation", "''", "and", "``", "direct", "''"]
        );
    }

    #[test]
    fn apostrophes_inside_words() {
        assert_eq!(canon("don't"), ["don't"]);
        assert_eq!(canon("Today's action"), ["Today's", "action"]);
        assert_eq!(canon("couldn\u{2019}t"), ["couldn\u{2019}t"]);
    }

    #[test]
    fn abbreviations_keep_period() {
        assert_eq!(canon("said Dr. Talcott."), ["said", "Dr.", "Talcott", "."]);
        assert_eq!(canon("T.S. Skinner"), ["T.S.", "Skinner"]);
    }

    #[test]
    fn dashes_and_typographic_quotes() {
        assert_eq!(canon("a -- b \u{2014} c"), ["a", "--", "b", "--", "c"]);
        assert_eq!(
            canon("\u{201C}hi\u{201D} \u{2018}yo\u{2019}"),
            ["``", "hi", "''", "`", "yo", "'"]
        );
    }

    #[test]
    fn triple_close_run_is_single_then_double() {
        assert_eq!(canon("``a `b'''"), ["``", "a", "`", "b", "'", "''"]);
        assert_eq!(canon("```b' a''"), ["``", "`", "b", "'", "a", "''"]);
    }

    #[test]
    fn free_standing_straight_quotes_resolved_by_nesting() {
        let t = tokenize("\" a ' b ' \"");
        assert!(pair_quotes(&t).is_ok());
        assert_eq!(canonical_words(&t), ["``", "a", "`", "b", "'", "''"]);
    }

    #[test]
    fn nested_pairs() {
        let t = tokenize("`` a ` b ' c ''");
        let p = pair_quotes(&t).unwrap();
        assert_eq!(
            p.pairs,
            vec![
                QuotePair {
                    open: 0,
                    close: 6,
                    arity: Arity::Double
                },
                QuotePair {
                    open: 2,
                    close: 4,
                    arity: Arity::Single
                },
            ]
        );
    }

    #[test]
    fn unbalanced_and_crossing() {
        let t = tokenize("`` a `` b ''");
        assert_eq!(pair_quotes(&t), Err(QuoteError::Unbalanced { offset: 0 }));
        let t = tokenize("`` a ` b '' c '");
        assert_eq!(pair_quotes(&t), Err(QuoteError::Crossing { offset: 9 }));
        assert!(matches!(
            pair_quotes(&tokenize("a ''")),
            Err(QuoteError::Unbalanced { offset: 2 })
        ));
    }

    #[test]
    fn full_spokeswoman_sentence_has_one_pair() {
        let s = "A Lorillard spokeswoman said, ``This is an old story. We're talking about \
                 years ago before anyone heard of asbestos having any questionable properties. \
                 There is no asbestos in our products now.''";
        let p = pair_quotes(&tokenize(s)).unwrap();
        assert_eq!(p.pairs.len(), 1);
    }

    #[test]
    fn transposition_examples() {
        let t = tokenize("``in the past few months,'' he said");
        let (n, r) = normalize_with_report(&t);
        assert_eq!(detokenize(&n), "`` in the past few months '' , he said");
        assert_eq!(
            r,
            TranspositionReport {
                commas: 1,
                periods: 0
            }
        );
        let t = tokenize("``no asbestos in our products now.''");
        assert_eq!(
            detokenize(&normalize_transposition(&t)),
            "`` no asbestos in our products now '' ."
        );
        let t = tokenize("``British'', he said");
        assert_eq!(normalize_transposition(&t), t);
    }

    #[test]
    fn other_marks_stay_inside() {
        let t = tokenize("`Has anyone seen it?' -- ``no!''");
        assert_eq!(normalize_transposition(&t), t);
    }

    #[test]
    fn nested_closing_quotes_all_crossed() {
        let t = tokenize("``a `b.'''");
        assert_eq!(detokenize(&normalize_transposition(&t)), "`` a ` b ' '' .");
    }

    #[test]
    fn runs_of_commas_and_periods_move_together() {
        let t = tokenize("``yes ,.''");
        let (n, r) = normalize_with_report(&t);
        assert_eq!(detokenize(&n), "`` yes '' , .");
        assert_eq!(
            r,
            TranspositionReport {
                commas: 1,
                periods: 1
            }
        );
    }

    #[test]
    fn detokenize_round_trip() {
        let t = normalize_transposition(&tokenize(
            "\u{201C}Yes,\u{201D} said Dr. Talcott, \"it's 3.5% -- no.\"",
        ));
        let again = tokenize(&detokenize(&t));
        assert_eq!(canonical_words(&again), canonical_words(&t));
        let kinds = |v: &[Token]| v.iter().map(|t| t.punct).collect::<Vec<_>>();
        assert_eq!(kinds(&again), kinds(&t));
    }
}
