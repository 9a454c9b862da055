//! Reading the quoted-speech construction off a derivation.

use std::fmt;

use crate::derivation::{DerivationRecord, Op};
use crate::grammar::Grammar;
use crate::tree::Role;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    Complement,
    Parenthetical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Position {
    Initial,
    MedialPreVp,
    MedialPostV,
    Final,
}

impl Construction {
    pub fn as_str(self) -> &'static str {
        match self {
            Construction::Complement => "complement",
            Construction::Parenthetical => "parenthetical",
        }
    }
}

impl Position {
    pub fn as_str(self) -> &'static str {
        match self {
            Position::Initial => "initial",
            Position::MedialPreVp => "medial-preVP",
            Position::MedialPostV => "medial-postV",
            Position::Final => "final",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuoteAnalysis {
    pub construction: Construction,
    pub position: Position,
    pub inverted: bool,
    /// Punctuation subtypes the quoting clause uses, left to right.
    pub delimiters: Vec<String>,
    pub complementizer: bool,
    pub verb: String,
    pub verb_class: String,
    /// Token ranges enclosed by quotation marks, outer marks included.
    pub quoted_spans: Vec<(usize, usize)>,
}

impl QuoteAnalysis {
    pub fn quotes_present(&self) -> bool {
        !self.quoted_spans.is_empty()
    }

    /// Key/value pairs in output order.
    pub fn fields(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[String]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.join(",")
            }
        };
        let spans: Vec<String> = self
            .quoted_spans
            .iter()
            .map(|(a, b)| format!("{}-{}", a, b))
            .collect();
        vec![
            ("construction", self.construction.as_str().to_string()),
            ("position", self.position.as_str().to_string()),
            ("inverted", self.inverted.to_string()),
            ("delimiters", list(&self.delimiters)),
            (
                "comp",
                if self.complementizer {
                    "present"
                } else {
                    "absent"
                }
                .to_string(),
            ),
            ("verb", self.verb.clone()),
            ("class", self.verb_class.clone()),
            (
                "quotes",
                if self.quotes_present() {
                    "present"
                } else {
                    "absent"
                }
                .to_string(),
            ),
            ("spans", list(&spans)),
        ]
    }

    pub fn field(&self, key: &str) -> Option<String> {
        self.fields()
            .into_iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v)
    }
}

/// One line of space-separated `key=value` pairs.
impl fmt::Display for QuoteAnalysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .fields()
            .into_iter()
            .map(|(k, v)| format!("{}={}", k, v))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Analysis of the outermost quoting clause, or `None` when the derivation
/// has no quoting clause.
pub fn classify(d: &DerivationRecord, g: &Grammar) -> Option<QuoteAnalysis> {
    let quoting = |r: &DerivationRecord| {
        let role = g.trees[r.tree].role;
        role.is_quoting() && role != Role::QuoteWrap
    };
    // Trees adjoined at the root stack upwards, so the last quoting tree on
    // that chain is the highest in the derived tree.
    let mut top = None;
    let mut cur = d;
    loop {
        if quoting(cur) {
            top = Some(cur);
        }
        match cur
            .attachments
            .iter()
            .find(|a| a.op == Op::Adjoin && a.site.is_root())
        {
            Some(a) => cur = &a.child,
            None => break,
        }
    }
    let rec = match top {
        Some(r) => r,
        None => d.breadth_first().into_iter().find(|r| quoting(r))?,
    };
    let t = &g.trees[rec.tree];
    let (construction, position) = match t.role {
        Role::ComplementClause => (Construction::Complement, Position::Initial),
        Role::InitialParen => (Construction::Parenthetical, Position::Initial),
        Role::MedialPreVp => (Construction::Parenthetical, Position::MedialPreVp),
        Role::MedialPostV => (Construction::Parenthetical, Position::MedialPostV),
        Role::Final => (Construction::Parenthetical, Position::Final),
        _ => unreachable!("quoting role"),
    };
    let mut delimiters: Vec<String> = rec
        .attachments
        .iter()
        .filter(|a| a.op == Op::Substitute)
        .filter_map(|a| a.child.anchors.first())
        .filter_map(|f| g.lexicon[f.entry].attr("punct"))
        .map(str::to_string)
        .collect();
    let colon_foot = t
        .foot()
        .is_some_and(|(_, f)| f.features.top.atom("punct-colon") == Some("+"));
    if colon_foot {
        delimiters.push("colon".to_string());
    }
    let complementizer = rec
        .attachments
        .iter()
        .any(|a| a.op == Op::Substitute && g.trees[a.child.tree].root.label.as_str() == "Comp");
    let verb_entry = &g.lexicon[rec.anchors[0].entry];
    let mut quoted_spans = Vec::new();
    d.walk(&mut |r| {
        if g.trees[r.tree].role == Role::QuoteWrap && r.anchors.len() == 2 {
            quoted_spans.push((r.anchors[0].pos, r.anchors[1].pos));
        }
    });
    quoted_spans.sort_unstable();
    Some(QuoteAnalysis {
        construction,
        position,
        inverted: t.inverted,
        delimiters,
        complementizer,
        verb: verb_entry.lemma().to_string(),
        verb_class: verb_entry.verb_class().unwrap_or("none").to_string(),
        quoted_spans,
    })
}
