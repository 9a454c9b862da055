//! Regression corpus: sentences with expected analyses or expected rejection.
//!
//! File format, one block per case, blocks separated by blank lines:
//!
//! ```text
//! id: final-inverted
//! input: ``It is a striking finding,'' said Dr. Talcott.
//! expect: ok construction=parenthetical position=final inverted=true
//! note: free text
//! ```
//!
//! `expect: reject` demands an empty forest. Lines starting with `#` are
//! comments.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::classify;
use crate::grammar::Grammar;
use crate::parser::parse_text;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// At least one derivation whose analysis has all these fields.
    Accept(Vec<(String, String)>),
    Reject,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusCase {
    pub id: String,
    pub input: String,
    pub expect: Expectation,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("case {id}: {msg}")]
    Case { id: String, msg: String },
}

pub fn load_corpus(text: &str) -> Result<Vec<CorpusCase>, CorpusError> {
    let mut cases = Vec::new();
    let mut ids = HashSet::new();
    let mut cur: Vec<(usize, &str, &str)> = Vec::new();
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .chain([(0, "")]);
    for (lineno, raw) in lines {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !cur.is_empty() {
                let case = build_case(&cur)?;
                if !ids.insert(case.id.clone()) {
                    return Err(CorpusError::Case {
                        id: case.id,
                        msg: "duplicate id".into(),
                    });
                }
                cases.push(case);
                cur.clear();
            }
            continue;
        }
        let (k, v) = line.split_once(':').ok_or_else(|| CorpusError::Syntax {
            line: lineno,
            msg: format!("expected `key: value`, got `{}`", line),
        })?;
        cur.push((lineno, k.trim(), v.trim()));
    }
    Ok(cases)
}

fn build_case(fields: &[(usize, &str, &str)]) -> Result<CorpusCase, CorpusError> {
    let get = |key: &str| {
        fields
            .iter()
            .find(|(_, k, _)| *k == key)
            .map(|(_, _, v)| *v)
    };
    let Some(id) = get("id") else {
        return Err(CorpusError::Syntax {
            line: fields[0].0,
            msg: "case without id".into(),
        });
    };
    let err = |msg: &str| CorpusError::Case {
        id: id.to_string(),
        msg: msg.to_string(),
    };
    if let Some((_, k, _)) = fields
        .iter()
        .find(|(_, k, _)| !["id", "input", "expect", "note"].contains(k))
    {
        return Err(err(&format!("unknown key `{}`", k)));
    }
    let input = get("input").ok_or_else(|| err("missing input"))?;
    let expect = get("expect").ok_or_else(|| err("missing expect"))?;
    let mut words = expect.split_whitespace();
    let expect = match words.next() {
        Some("reject") if words.next().is_none() => Expectation::Reject,
        Some("ok") => {
            let pairs = words
                .map(|w| {
                    w.split_once('=')
                        .map(|(k, v)| (k.to_string(), v.to_string()))
                        .ok_or_else(|| err(&format!("expected key=value, got `{}`", w)))
                })
                .collect::<Result<_, _>>()?;
            Expectation::Accept(pairs)
        }
        _ => return Err(err("expect must be `ok [key=value…]` or `reject`")),
    };
    Ok(CorpusCase {
        id: id.to_string(),
        input: input.to_string(),
        expect,
        note: get("note").unwrap_or("").to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseResult {
    pub id: String,
    pub passed: bool,
    pub derivations: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusReport {
    pub results: Vec<CaseResult>,
}

impl CorpusReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed).count()
    }

    pub fn total(&self) -> usize {
        self.results.len()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.passed { "ok  " } else { "FAIL" };
            writeln!(
                f,
                "{} {} ({} derivations) {}",
                status, r.id, r.derivations, r.detail
            )?;
        }
        let word = if self.all_passed() { "PASS" } else { "FAIL" };
        write!(f, "{} {}/{}", word, self.passed(), self.total())
    }
}

pub fn run_case(case: &CorpusCase, g: &Grammar) -> CaseResult {
    let result = |passed: bool, derivations: usize, detail: String| CaseResult {
        id: case.id.clone(),
        passed,
        derivations,
        detail,
    };
    let forest = match parse_text(&case.input, g) {
        Ok(f) => f,
        Err(e) => return result(false, 0, e.to_string()),
    };
    let n = forest.len();
    match &case.expect {
        Expectation::Reject if n == 0 => result(true, 0, String::new()),
        Expectation::Reject => result(false, n, "expected no parse".into()),
        Expectation::Accept(_) if n == 0 => result(false, 0, "no parse".into()),
        Expectation::Accept(want) if want.is_empty() => result(true, n, String::new()),
        Expectation::Accept(want) => {
            let analyses: Vec<_> = forest.iter().filter_map(|d| classify(d, g)).collect();
            let hit = analyses.iter().any(|a| {
                want.iter()
                    .all(|(k, v)| a.field(k).as_deref() == Some(v.as_str()))
            });
            if hit {
                result(true, n, String::new())
            } else {
                let seen: Vec<String> = analyses.iter().map(|a| format!("[{}]", a)).collect();
                result(
                    false,
                    n,
                    format!("no matching analysis; got {}", seen.join(" ")),
                )
            }
        }
    }
}

/// Runs every case in parallel; results keep the corpus order.
pub fn run_corpus(cases: &[CorpusCase], g: &Grammar) -> CorpusReport {
    CorpusReport {
        results: cases.par_iter().map(|c| run_case(c, g)).collect(),
    }
}
