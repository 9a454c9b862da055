//! Derivation records: which elementary trees were combined where.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::features::{Bindings, FeatureValue};
use crate::grammar::Grammar;
use crate::tree::{DerivedKind, DerivedNode, DerivedTree, GornAddress, TreeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Substitute,
    Adjoin,
}

/// A lexical item filling one anchor slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnchorFill {
    /// Index of the lexical unit in the input.
    pub pos: usize,
    /// Index into the grammar's lexicon.
    pub entry: usize,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Attachment {
    pub site: GornAddress,
    pub op: Op,
    pub child: Arc<DerivationRecord>,
}

/// An elementary tree with its anchors filled, plus what was attached to it.
/// Attachments are kept sorted by site.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DerivationRecord {
    /// Index into the grammar's tree list.
    pub tree: usize,
    /// One fill per anchor, in anchor order.
    pub anchors: Vec<AnchorFill>,
    pub attachments: Vec<Attachment>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("two operations at site {0}")]
    DuplicateSite(GornAddress),
    #[error("quotation of kind {kind} nested directly inside the same kind at {site}")]
    ContainsViolation { site: GornAddress, kind: String },
}

impl DerivationRecord {
    pub fn new(tree: usize, anchors: Vec<AnchorFill>, mut attachments: Vec<Attachment>) -> Self {
        attachments.sort();
        DerivationRecord {
            tree,
            anchors,
            attachments,
        }
    }

    /// Rebuilds the derived tree. Attachments are applied deepest and
    /// rightmost first so that every site address still refers to the
    /// elementary tree's own node when it is used.
    pub fn replay(&self, g: &Grammar) -> Result<DerivedTree, DerivationError> {
        let t = &g.trees[self.tree];
        let words: Vec<&str> = self.anchors.iter().map(|a| a.word.as_str()).collect();
        let feats: Vec<_> = self
            .anchors
            .iter()
            .map(|a| g.lexicon[a.entry].node_features())
            .collect();
        let mut d = DerivedTree::instantiate(t, &words, &feats)?;
        for w in self.attachments.windows(2) {
            if w[0].site == w[1].site {
                return Err(DerivationError::DuplicateSite(w[0].site.clone()));
            }
        }
        for a in self.attachments.iter().rev() {
            let child = a.child.replay(g)?;
            d = match a.op {
                Op::Substitute => d.substitute(&a.site, &child)?,
                Op::Adjoin => d.adjoin(&a.site, &child)?,
            };
        }
        Ok(d)
    }

    /// Replays, closes every node and checks quote alternation. Returns the
    /// derived tree and its final variable environment.
    pub fn validate(&self, g: &Grammar) -> Result<(DerivedTree, Bindings), DerivationError> {
        let d = self.replay(g)?;
        let b = d.close_all()?;
        percolate_contains(&d, &b)?;
        Ok((d, b))
    }

    pub fn yield_words(&self, g: &Grammar) -> Result<Vec<String>, DerivationError> {
        Ok(self.replay(g)?.yield_words()?)
    }

    /// Pre-order walk over this record and all records below it.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a DerivationRecord)) {
        f(self);
        for a in &self.attachments {
            a.child.walk(f);
        }
    }

    /// Records in breadth-first order, outermost first.
    pub fn breadth_first(&self) -> Vec<&DerivationRecord> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let r = out[i];
            out.extend(r.attachments.iter().map(|a| &*a.child));
            i += 1;
        }
        out
    }

    pub fn size(&self) -> usize {
        1 + self
            .attachments
            .iter()
            .map(|a| a.child.size())
            .sum::<usize>()
    }

    /// Lexicon entries anchoring this record and its descendants.
    pub fn entries(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.walk(&mut |r| out.extend(r.anchors.iter().map(|a| a.entry)));
        out
    }

    /// Text form such as `alphanx0V<sleeps@1>[0=alphaNXN<Alice@0>]`; `=` marks
    /// substitution and `+` adjunction.
    pub fn render(&self, g: &Grammar) -> String {
        let mut s = String::new();
        self.render_into(g, &mut s);
        s
    }

    fn render_into(&self, g: &Grammar, s: &mut String) {
        s.push_str(&g.trees[self.tree].name);
        s.push('<');
        for (i, a) in self.anchors.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}@{}", a.word, a.pos);
        }
        s.push('>');
        if self.attachments.is_empty() {
            return;
        }
        s.push('[');
        for (i, a) in self.attachments.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let op = if a.op == Op::Substitute { '=' } else { '+' };
            let _ = write!(s, "{}{}", a.site, op);
            a.child.render_into(g, s);
        }
        s.push(']');
    }
}

const CONTAINS: &str = "contains-";

/// Bottom-up check that no quotation directly contains another of the same
/// kind. A node whose bottom carries `contains-K:+` reports only its own
/// kinds; every other node reports the union of its children. A node whose top
/// demands `contains-K:-` fails if `K` is reported from below.
pub fn percolate_contains(d: &DerivedTree, b: &Bindings) -> Result<(), DerivationError> {
    go(&d.root, GornAddress::root(), b).map(|_| ())
}

fn go(
    n: &DerivedNode,
    addr: GornAddress,
    b: &Bindings,
) -> Result<BTreeSet<String>, DerivationError> {
    let plus = FeatureValue::atom("+");
    let minus = FeatureValue::atom("-");
    let emitted: BTreeSet<String> = n
        .bottom
        .iter()
        .filter_map(|(k, v)| k.strip_prefix(CONTAINS).filter(|_| b.resolve(v) == plus))
        .map(str::to_string)
        .collect();
    let mut below = BTreeSet::new();
    for (i, c) in n.children.iter().enumerate() {
        below.extend(go(c, addr.child(i), b)?);
    }
    let here = if emitted.is_empty() || n.kind != DerivedKind::Internal {
        below
    } else {
        emitted
    };
    for (k, v) in n.top.iter() {
        if let Some(kind) = k.strip_prefix(CONTAINS) {
            if b.resolve(v) == minus && here.contains(kind) {
                return Err(DerivationError::ContainsViolation {
                    site: addr,
                    kind: kind.to_string(),
                });
            }
        }
    }
    Ok(here)
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn adjoin_root(child: DerivationRecord) -> Attachment {
        Attachment {
            site: GornAddress::root(),
            op: Op::Adjoin,
            child: Arc::new(child),
        }
    }

    /// Quotes around one node, outermost first. A tree adjoined at the root
    /// of another lands above it, so the record attached to the host is the
    /// innermost.
    fn quote_chain(g: &Grammar, label: &str, kinds: &[&str]) -> Option<DerivationRecord> {
        let mut wrap: Option<DerivationRecord> = None;
        for kind in kinds {
            let (open, close) = if *kind == "dquote" {
                ("``", "''")
            } else {
                ("`", "'")
            };
            let atts = wrap.take().map(adjoin_root).into_iter().collect();
            wrap = Some(record(
                g,
                &format!("betaQuote[{},{}]", label, kind),
                &[open, close],
                atts,
            ));
        }
        wrap
    }

    /// "Alice sleeps" with the first kind quoting the clause and the rest
    /// quoting the subject, outermost first.
    fn nested(g: &Grammar, kinds: &[&str]) -> Result<(), DerivationError> {
        let subject = record(
            g,
            "alphaNXN",
            &["Alice"],
            quote_chain(g, "NP", &kinds[1..])
                .map(adjoin_root)
                .into_iter()
                .collect(),
        );
        let subject = Attachment {
            site: GornAddress(vec![0]),
            op: Op::Substitute,
            child: Arc::new(subject),
        };
        let atts = quote_chain(g, "S", &kinds[..1])
            .map(adjoin_root)
            .into_iter()
            .chain([subject])
            .collect();
        let s = record(g, "alphanx0V", &["sleeps"], atts);
        let d = s.replay(g)?;
        let b = d.close_all()?;
        percolate_contains(&d, &b)
    }

    #[test]
    fn directly_stacked_same_kind_clashes_on_closing() {
        let g = Grammar::shipped();
        let inner = record(
            &g,
            "alphaNXN",
            &["Alice"],
            quote_chain(&g, "NP", &["squote", "squote"])
                .map(adjoin_root)
                .into_iter()
                .collect(),
        );
        let d = inner.replay(&g).unwrap();
        assert!(d.close_all().is_err());
    }

    #[test]
    fn alternating_quotes_percolate() {
        let g = Grammar::shipped();
        assert_eq!(nested(&g, &["dquote"]), Ok(()));
        assert_eq!(nested(&g, &["dquote", "squote"]), Ok(()));
        assert_eq!(nested(&g, &["dquote", "squote", "dquote"]), Ok(()));
    }

    #[test]
    fn same_kind_nesting_is_caught() {
        let g = Grammar::shipped();
        for (kinds, kind) in [
            (&["dquote", "dquote"][..], "dquote"),
            (&["squote", "squote"][..], "squote"),
        ] {
            match nested(&g, kinds) {
                Err(DerivationError::ContainsViolation { kind: k, .. }) => assert_eq!(k, kind),
                other => panic!("{:?}: {:?}", kinds, other),
            }
        }
    }

    #[test]
    fn render_shows_sites() {
        let g = Grammar::shipped();
        let np = Attachment {
            site: GornAddress(vec![0]),
            op: Op::Substitute,
            child: Arc::new(record(&g, "alphaNXN", &["Alice"], vec![])),
        };
        let s = record(&g, "alphanx0V", &["sleeps"], vec![np]);
        assert_eq!(s.render(&g), "alphanx0V<sleeps@0>[0=alphaNXN<Alice@0>]");
        assert_eq!(s.yield_words(&g).unwrap(), ["Alice", "sleeps"]);
        assert_eq!(s.size(), 2);
    }
}
