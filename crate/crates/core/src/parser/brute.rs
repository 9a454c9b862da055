//! Exhaustive derivation generator. Builds every derivation whose yield has
//! exactly the input's length, using only entries of the input's words, then
//! keeps those that spell the input.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::derivation::{AnchorFill, Attachment, DerivationRecord, Op};
use crate::grammar::Grammar;
use crate::tree::{NodeKind, TreeType};

/// Longest input the generator accepts.
pub const MAX_BRUTE_FORCE_TOKENS: usize = 8;

#[derive(Clone)]
struct Partial {
    rec: Arc<DerivationRecord>,
    counts: Vec<u8>,
}

struct Hole {
    site: crate::tree::GornAddress,
    label: String,
    op: Op,
}

struct Gen<'g> {
    g: &'g Grammar,
    /// Input-derived candidates for each (tree, anchor number).
    cand: HashMap<(usize, usize), Vec<usize>>,
    /// Word class of each candidate entry, for multiset pruning.
    class: HashMap<usize, usize>,
    limit: Vec<u8>,
    memo: HashMap<(String, bool, usize), Rc<Vec<Partial>>>,
}

pub(super) fn generate(
    g: &Grammar,
    units: &[String],
    entries: &[Vec<usize>],
) -> Vec<DerivationRecord> {
    if units.is_empty() {
        return Vec::new();
    }
    let mut gen = Gen::new(g, entries.iter().map(|es| (es.as_slice(), 1)));
    let mut out = Vec::new();
    for p in gen.complete("S", false, units.len()).iter() {
        if let Some(r) = place(g, &p.rec, units, entries) {
            out.push(r);
        }
    }
    out
}

/// Every derivation of `len` anchors drawn from `vocabulary`, each word
/// usable any number of times, placed by its own yield.
pub(super) fn generate_all(
    g: &Grammar,
    vocabulary: &[Vec<usize>],
    len: usize,
) -> Vec<DerivationRecord> {
    if len == 0 {
        return Vec::new();
    }
    let mut gen = Gen::new(g, vocabulary.iter().map(|es| (es.as_slice(), len as u8)));
    let mut out = Vec::new();
    for p in gen.complete("S", false, len).iter() {
        let Ok(words) = p.rec.yield_words(g) else {
            continue;
        };
        let entries: Vec<Vec<usize>> = words
            .iter()
            .map(|w| g.entries_for(w).map(<[usize]>::to_vec).unwrap_or_default())
            .collect();
        if let Some(r) = place(g, &p.rec, &words, &entries) {
            out.push(r);
        }
    }
    out
}

impl<'g> Gen<'g> {
    /// `words` yields each input word's entries with how often it may occur.
    fn new<'a>(g: &'g Grammar, words: impl Iterator<Item = (&'a [usize], u8)>) -> Self {
        let mut seen: Vec<&str> = Vec::new();
        let mut class = HashMap::new();
        let mut limit = Vec::new();
        for (es, times) in words {
            let w = g.lexicon[es[0]].word.as_str();
            let c = match seen.iter().position(|x| *x == w) {
                Some(c) => c,
                None => {
                    seen.push(w);
                    limit.push(0);
                    seen.len() - 1
                }
            };
            limit[c] += times;
            for &e in es {
                class.insert(e, c);
            }
        }
        let mut cand: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for &e in class.keys() {
            for s in g.selections(e) {
                cand.entry((s.tree, s.anchor)).or_default().push(e);
            }
        }
        for v in cand.values_mut() {
            v.sort_unstable();
        }
        Gen {
            g,
            cand,
            class,
            limit,
            memo: HashMap::new(),
        }
    }

    fn complete(&mut self, label: &str, aux: bool, budget: usize) -> Rc<Vec<Partial>> {
        let key = (label.to_string(), aux, budget);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        for (ti, t) in self.g.trees.iter().enumerate() {
            let is_aux = t.tree_type == TreeType::Auxiliary;
            if is_aux != aux || t.root.label.as_str() != label || t.anchors.len() > budget {
                continue;
            }
            let k = t.anchors.len();
            let Some(choices) = (1..=k)
                .map(|a| self.cand.get(&(ti, a)).cloned())
                .collect::<Option<Vec<Vec<usize>>>>()
            else {
                continue;
            };
            let holes: Vec<Hole> = t
                .root
                .nodes()
                .into_iter()
                .filter_map(|(addr, n)| match n.kind {
                    NodeKind::Substitution => Some(Hole {
                        site: addr,
                        label: n.label.0.clone(),
                        op: Op::Substitute,
                    }),
                    NodeKind::Internal if !n.null_adjunction => Some(Hole {
                        site: addr,
                        label: n.label.0.clone(),
                        op: Op::Adjoin,
                    }),
                    _ => None,
                })
                .collect();
            let mut picks = Vec::new();
            self.anchor_choices(&choices, &mut picks, &mut |gen, fills, counts| {
                let mut atts = Vec::new();
                gen.fill(
                    ti,
                    &holes,
                    0,
                    budget - k,
                    counts,
                    fills,
                    &mut atts,
                    &mut out,
                );
            });
        }
        let out = Rc::new(out);
        self.memo.insert(key, out.clone());
        out
    }

    fn anchor_choices(
        &mut self,
        choices: &[Vec<usize>],
        picks: &mut Vec<usize>,
        f: &mut impl FnMut(&mut Self, &[AnchorFill], Vec<u8>),
    ) {
        if picks.len() == choices.len() {
            let mut counts = vec![0u8; self.limit.len()];
            for &e in picks.iter() {
                let c = self.class[&e];
                counts[c] += 1;
                if counts[c] > self.limit[c] {
                    return;
                }
            }
            let fills: Vec<AnchorFill> = picks
                .iter()
                .map(|&e| AnchorFill {
                    pos: 0,
                    entry: e,
                    word: self.g.lexicon[e].word.clone(),
                })
                .collect();
            f(self, &fills, counts);
            return;
        }
        for &e in &choices[picks.len()] {
            picks.push(e);
            self.anchor_choices(choices, picks, f);
            picks.pop();
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &mut self,
        tree: usize,
        holes: &[Hole],
        idx: usize,
        remaining: usize,
        counts: Vec<u8>,
        fills: &[AnchorFill],
        atts: &mut Vec<Attachment>,
        out: &mut Vec<Partial>,
    ) {
        if idx == holes.len() {
            if remaining == 0 {
                let rec = DerivationRecord::new(tree, fills.to_vec(), atts.clone());
                out.push(Partial {
                    rec: Arc::new(rec),
                    counts,
                });
            }
            return;
        }
        let mandatory_left = holes[idx..]
            .iter()
            .filter(|h| h.op == Op::Substitute)
            .count();
        if remaining < mandatory_left {
            return;
        }
        let h = &holes[idx];
        if h.op == Op::Adjoin {
            self.fill(
                tree,
                holes,
                idx + 1,
                remaining,
                counts.clone(),
                fills,
                atts,
                out,
            );
        }
        for b in 1..=remaining {
            let subs = self.complete(&h.label, h.op == Op::Adjoin, b);
            for p in subs.iter() {
                let mut c = counts.clone();
                let fits = c
                    .iter_mut()
                    .zip(&p.counts)
                    .zip(&self.limit)
                    .all(|((x, y), l)| {
                        *x += y;
                        *x <= *l
                    });
                if !fits {
                    continue;
                }
                atts.push(Attachment {
                    site: h.site.clone(),
                    op: h.op,
                    child: p.rec.clone(),
                });
                self.fill(tree, holes, idx + 1, remaining - b, c, fills, atts, out);
                atts.pop();
            }
        }
    }
}

fn relabel(
    r: &DerivationRecord,
    f: &mut impl FnMut(&AnchorFill) -> AnchorFill,
) -> DerivationRecord {
    let anchors = r.anchors.iter().map(&mut *f).collect();
    let atts = r
        .attachments
        .iter()
        .map(|a| Attachment {
            site: a.site.clone(),
            op: a.op,
            child: Arc::new(relabel(&a.child, f)),
        })
        .collect();
    DerivationRecord::new(r.tree, anchors, atts)
}

/// Assigns input positions by yield order; `None` when the yield does not
/// spell the input or the derivation does not replay.
fn place(
    g: &Grammar,
    r: &DerivationRecord,
    units: &[String],
    entries: &[Vec<usize>],
) -> Option<DerivationRecord> {
    let mut next = 0;
    let marked = relabel(r, &mut |a| {
        next += 1;
        AnchorFill {
            pos: next - 1,
            entry: a.entry,
            word: format!("\u{1}{}", next - 1),
        }
    });
    let order = marked.yield_words(g).ok()?;
    let mut pos_of = vec![usize::MAX; order.len()];
    for (p, w) in order.iter().enumerate() {
        let id: usize = w.trim_start_matches('\u{1}').parse().ok()?;
        pos_of[id] = p;
    }
    let mut ok = true;
    let placed = relabel(&marked, &mut |a| {
        let p = pos_of[a.pos];
        ok &= entries[p].contains(&a.entry);
        AnchorFill {
            pos: p,
            entry: a.entry,
            word: units[p].clone(),
        }
    });
    ok.then_some(placed)
}
