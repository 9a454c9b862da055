//! Bottom-up dotted-tree chart with foot gaps.
//!
//! Items name a node of an elementary tree, how much of it is recognized and
//! the span it covers. `Dot(k)` means children `0..k` are recognized; `Dot(len)`
//! is the node's bottom, before any adjunction. `Top` is the finished node.
//! Items inside an auxiliary tree whose foot has been passed carry the span of
//! the foot as a gap.
//!
//! Feature checks made here only compare atoms that are fixed by the trees and
//! lexical entries involved, so they never reject a derivation that full
//! unification would accept. Complete derivations are checked again by replay.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;
use std::sync::Arc;

use crate::derivation::{AnchorFill, Attachment, DerivationRecord, Op};
use crate::features::{unify, FeatureStructure};
use crate::grammar::Grammar;
use crate::tree::{GornAddress, NodeKind, TreeType};

struct Node {
    label: u32,
    kind: NodeKind,
    na: bool,
    children: Vec<u32>,
    /// Parent node and this node's index among its children.
    parent: Option<(u32, u16)>,
    addr: GornAddress,
    top: FeatureStructure,
    bottom: FeatureStructure,
    /// True for the parent of anchor 1, whose bottom takes entry features.
    takes_entry: bool,
}

struct TreeInfo {
    nodes: Vec<Node>,
    aux: bool,
    anchor_nodes: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Phase {
    Dot(u16),
    Top { adj: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Item {
    tree: u32,
    node: u32,
    phase: Phase,
    i: u16,
    j: u16,
    gap: Option<(u16, u16)>,
    /// Lexical entry at anchor 1 of this tree instance, once known.
    entry: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Back {
    Leaf { entry: u32, pos: u16 },
    Foot,
    Subst(usize),
    Dot(Option<usize>, usize),
    NoAdj(usize),
    Adj { bottom: usize, aux: usize },
}

#[derive(Clone, Default)]
struct Frag {
    anchors: Vec<(usize, AnchorFill)>,
    atts: Vec<Attachment>,
}

pub(super) struct Chart<'g> {
    g: &'g Grammar,
    trees: Vec<TreeInfo>,
    s_label: Option<u32>,
    slots: HashMap<u32, Vec<(u32, u32)>>,
    feet: HashMap<u32, Vec<(u32, u32)>>,
    items: Vec<Item>,
    backs: Vec<Vec<Back>>,
    index: HashMap<Item, usize>,
    agenda: Vec<usize>,
    dots_ending: HashMap<(u32, u32, u16, u16), Vec<usize>>,
    tops_starting: HashMap<(u32, u32, u16), Vec<usize>>,
    bottoms: HashMap<(u32, u16, u16), Vec<usize>>,
    aux_tops: HashMap<(u32, u16, u16), Vec<usize>>,
    feet_done: HashSet<(u32, u16, u16)>,
    frag_memo: HashMap<usize, Rc<Vec<Frag>>>,
    record_memo: HashMap<usize, Rc<Vec<Arc<DerivationRecord>>>>,
    in_progress: HashSet<usize>,
}

impl<'g> Chart<'g> {
    fn new(g: &'g Grammar) -> Self {
        let mut labels: HashMap<String, u32> = HashMap::new();
        let mut intern = |s: &str| {
            let n = labels.len() as u32;
            *labels.entry(s.to_string()).or_insert(n)
        };
        let mut trees = Vec::new();
        let mut slots: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        let mut feet: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for (ti, t) in g.trees.iter().enumerate() {
            let flat = t.root.nodes();
            let pos: HashMap<&GornAddress, u32> = flat
                .iter()
                .enumerate()
                .map(|(i, (a, _))| (a, i as u32))
                .collect();
            let mut nodes = Vec::new();
            let mut anchor_nodes = vec![0; t.anchors.len()];
            for (i, (addr, n)) in flat.iter().enumerate() {
                let parent = addr
                    .0
                    .split_last()
                    .map(|(last, rest)| (pos[&GornAddress(rest.to_vec())], *last as u16));
                let children = (0..n.children.len()).map(|c| pos[&addr.child(c)]).collect();
                let label = intern(n.label.as_str());
                match n.kind {
                    NodeKind::Anchor(k) => anchor_nodes[k - 1] = i as u32,
                    NodeKind::Substitution => {
                        slots.entry(label).or_default().push((ti as u32, i as u32))
                    }
                    NodeKind::Foot => feet.entry(label).or_default().push((ti as u32, i as u32)),
                    NodeKind::Internal => {}
                }
                let takes_entry = n.children.iter().any(|c| c.kind == NodeKind::Anchor(1));
                nodes.push(Node {
                    label,
                    kind: n.kind,
                    na: n.null_adjunction,
                    children,
                    parent,
                    addr: addr.clone(),
                    top: n.features.top.clone(),
                    bottom: n.features.bottom.clone(),
                    takes_entry,
                });
            }
            trees.push(TreeInfo {
                nodes,
                aux: t.tree_type == TreeType::Auxiliary,
                anchor_nodes,
            });
        }
        Chart {
            g,
            trees,
            s_label: labels.get("S").copied(),
            slots,
            feet,
            items: Vec::new(),
            backs: Vec::new(),
            index: HashMap::new(),
            agenda: Vec::new(),
            dots_ending: HashMap::new(),
            tops_starting: HashMap::new(),
            bottoms: HashMap::new(),
            aux_tops: HashMap::new(),
            feet_done: HashSet::new(),
            frag_memo: HashMap::new(),
            record_memo: HashMap::new(),
            in_progress: HashSet::new(),
        }
    }

    /// Candidate derivations of the whole input; the caller validates them.
    pub(super) fn run(
        g: &'g Grammar,
        units: &[String],
        entries: &[Vec<usize>],
    ) -> Vec<DerivationRecord> {
        let mut c = Chart::new(g);
        for (pos, es) in entries.iter().enumerate() {
            for &e in es {
                for sel in g.selections(e) {
                    let item = Item {
                        tree: sel.tree as u32,
                        node: c.trees[sel.tree].anchor_nodes[sel.anchor - 1],
                        phase: Phase::Top { adj: false },
                        i: pos as u16,
                        j: pos as u16 + 1,
                        gap: None,
                        entry: (sel.anchor == 1).then_some(e as u32),
                    };
                    c.add(
                        item,
                        Back::Leaf {
                            entry: e as u32,
                            pos: pos as u16,
                        },
                    );
                }
            }
        }
        while let Some(x) = c.agenda.pop() {
            c.process(x);
        }
        let n = units.len() as u16;
        let goals: Vec<usize> = (0..c.items.len())
            .filter(|&x| {
                let it = c.items[x];
                let node = &c.trees[it.tree as usize].nodes[it.node as usize];
                matches!(it.phase, Phase::Top { .. })
                    && node.parent.is_none()
                    && !c.trees[it.tree as usize].aux
                    && Some(node.label) == c.s_label
                    && it.i == 0
                    && it.j == n
                    && it.gap.is_none()
            })
            .collect();
        let mut out = Vec::new();
        for x in goals {
            for r in c.records(x, units).iter() {
                out.push((**r).clone());
            }
        }
        out
    }

    fn add(&mut self, item: Item, back: Back) {
        if let Some(&x) = self.index.get(&item) {
            if !self.backs[x].contains(&back) {
                self.backs[x].push(back);
            }
            return;
        }
        let x = self.items.len();
        self.items.push(item);
        self.backs.push(vec![back]);
        self.index.insert(item, x);
        self.agenda.push(x);
    }

    fn node(&self, tree: u32, node: u32) -> &Node {
        &self.trees[tree as usize].nodes[node as usize]
    }

    fn bottom_fs(&self, tree: u32, node: u32, entry: Option<u32>) -> FeatureStructure {
        let n = self.node(tree, node);
        match entry {
            Some(e) if n.takes_entry => {
                let ef = self.g.lexicon[e as usize].node_features();
                unify(&n.bottom, &ef).unwrap_or_else(|| n.bottom.clone())
            }
            _ => n.bottom.clone(),
        }
    }

    /// Atoms visible on a finished node from above.
    fn top_view(&self, it: &Item) -> Vec<FeatureStructure> {
        let n = self.node(it.tree, it.node);
        match it.phase {
            Phase::Top { adj: false } => {
                vec![n.top.clone(), self.bottom_fs(it.tree, it.node, it.entry)]
            }
            _ => vec![n.top.clone()],
        }
    }

    fn clash(a: &FeatureStructure, bs: &[FeatureStructure]) -> bool {
        bs.iter().any(|b| a.atoms_clash(b))
    }

    fn process(&mut self, x: usize) {
        let it = self.items[x];
        let (label, kind, na, parent, nchildren) = {
            let n = self.node(it.tree, it.node);
            (n.label, n.kind, n.na, n.parent, n.children.len() as u16)
        };
        match it.phase {
            Phase::Top { .. } => match parent {
                Some((p, k)) => {
                    self.tops_starting
                        .entry((it.tree, it.node, it.i))
                        .or_default()
                        .push(x);
                    if k == 0 {
                        let d = Item {
                            node: p,
                            phase: Phase::Dot(1),
                            ..it
                        };
                        self.add(d, Back::Dot(None, x));
                    } else {
                        let ds = self
                            .dots_ending
                            .get(&(it.tree, p, k, it.i))
                            .cloned()
                            .unwrap_or_default();
                        for d in ds {
                            self.combine(d, x);
                        }
                    }
                }
                None if self.trees[it.tree as usize].aux => {
                    let (p, q) = it.gap.expect("auxiliary root carries its foot span");
                    self.aux_tops.entry((label, p, q)).or_default().push(x);
                    let bs = self
                        .bottoms
                        .get(&(label, p, q))
                        .cloned()
                        .unwrap_or_default();
                    for b in bs {
                        self.adjoin(b, x);
                    }
                }
                None => {
                    let view = self.top_view(&it);
                    let slots = self.slots.get(&label).cloned().unwrap_or_default();
                    for (st, sn) in slots {
                        if Self::clash(&self.node(st, sn).top, &view) {
                            continue;
                        }
                        let s = Item {
                            tree: st,
                            node: sn,
                            phase: Phase::Top { adj: false },
                            i: it.i,
                            j: it.j,
                            gap: None,
                            entry: None,
                        };
                        self.add(s, Back::Subst(x));
                    }
                }
            },
            Phase::Dot(k) if k < nchildren => {
                self.dots_ending
                    .entry((it.tree, it.node, k, it.j))
                    .or_default()
                    .push(x);
                let child = self.node(it.tree, it.node).children[k as usize];
                let cs = self
                    .tops_starting
                    .get(&(it.tree, child, it.j))
                    .cloned()
                    .unwrap_or_default();
                for c in cs {
                    self.combine(x, c);
                }
            }
            Phase::Dot(_) => {
                let n = self.node(it.tree, it.node);
                if !n
                    .top
                    .atoms_clash(&self.bottom_fs(it.tree, it.node, it.entry))
                {
                    self.add(
                        Item {
                            phase: Phase::Top { adj: false },
                            ..it
                        },
                        Back::NoAdj(x),
                    );
                }
                if kind != NodeKind::Internal || na {
                    return;
                }
                self.bottoms.entry((label, it.i, it.j)).or_default().push(x);
                if self.feet_done.insert((label, it.i, it.j)) {
                    let feet = self.feet.get(&label).cloned().unwrap_or_default();
                    for (ft, fnode) in feet {
                        let f = Item {
                            tree: ft,
                            node: fnode,
                            phase: Phase::Top { adj: false },
                            i: it.i,
                            j: it.j,
                            gap: Some((it.i, it.j)),
                            entry: None,
                        };
                        self.add(f, Back::Foot);
                    }
                }
                let auxes = self
                    .aux_tops
                    .get(&(label, it.i, it.j))
                    .cloned()
                    .unwrap_or_default();
                for a in auxes {
                    self.adjoin(x, a);
                }
            }
        }
    }

    fn combine(&mut self, d: usize, c: usize) {
        let (di, ci) = (self.items[d], self.items[c]);
        let gap = match (di.gap, ci.gap) {
            (Some(_), Some(_)) => return,
            (g, None) | (None, g) => g,
        };
        let entry = match (di.entry, ci.entry) {
            (Some(a), Some(b)) if a != b => return,
            (a, b) => a.or(b),
        };
        let Phase::Dot(k) = di.phase else {
            unreachable!("left item is dotted")
        };
        let item = Item {
            phase: Phase::Dot(k + 1),
            j: ci.j,
            gap,
            entry,
            ..di
        };
        self.add(item, Back::Dot(Some(d), c));
    }

    fn adjoin(&mut self, b: usize, a: usize) {
        let (bi, ai) = (self.items[b], self.items[a]);
        let site_bottom = self.bottom_fs(bi.tree, bi.node, bi.entry);
        let site_top = &self.node(bi.tree, bi.node).top;
        let aux = &self.trees[ai.tree as usize];
        let foot = aux
            .nodes
            .iter()
            .find(|n| n.kind == NodeKind::Foot)
            .expect("auxiliary tree has a foot");
        if Self::clash(site_top, &self.top_view(&ai))
            || site_bottom.atoms_clash(&foot.bottom)
            || site_bottom.atoms_clash(&foot.top)
        {
            return;
        }
        let item = Item {
            phase: Phase::Top { adj: true },
            i: ai.i,
            j: ai.j,
            ..bi
        };
        self.add(item, Back::Adj { bottom: b, aux: a });
    }

    fn frags(&mut self, x: usize, units: &[String]) -> Rc<Vec<Frag>> {
        if let Some(f) = self.frag_memo.get(&x) {
            return f.clone();
        }
        if !self.in_progress.insert(x) {
            return Rc::new(Vec::new());
        }
        let it = self.items[x];
        let mut out = Vec::new();
        for back in self.backs[x].clone() {
            match back {
                Back::Leaf { entry, pos } => {
                    let tree = &self.trees[it.tree as usize];
                    let k = tree
                        .anchor_nodes
                        .iter()
                        .position(|&n| n == it.node)
                        .expect("anchor node");
                    let fill = AnchorFill {
                        pos: pos as usize,
                        entry: entry as usize,
                        word: units[pos as usize].clone(),
                    };
                    out.push(Frag {
                        anchors: vec![(k, fill)],
                        atts: Vec::new(),
                    });
                }
                Back::Foot => out.push(Frag::default()),
                Back::Subst(arg) => {
                    let site = self.node(it.tree, it.node).addr.clone();
                    for r in self.records(arg, units).iter() {
                        out.push(Frag {
                            anchors: Vec::new(),
                            atts: vec![Attachment {
                                site: site.clone(),
                                op: Op::Substitute,
                                child: r.clone(),
                            }],
                        });
                    }
                }
                Back::Dot(left, right) => {
                    let ls = match left {
                        Some(l) => self.frags(l, units),
                        None => Rc::new(vec![Frag::default()]),
                    };
                    let rs = self.frags(right, units);
                    for l in ls.iter() {
                        for r in rs.iter() {
                            let mut f = l.clone();
                            f.anchors.extend(r.anchors.iter().cloned());
                            f.atts.extend(r.atts.iter().cloned());
                            out.push(f);
                        }
                    }
                }
                Back::NoAdj(b) => out.extend(self.frags(b, units).iter().cloned()),
                Back::Adj { bottom, aux } => {
                    let site = self.node(it.tree, it.node).addr.clone();
                    let bs = self.frags(bottom, units);
                    let rs = self.records(aux, units);
                    for f in bs.iter() {
                        for r in rs.iter() {
                            let mut f = f.clone();
                            f.atts.push(Attachment {
                                site: site.clone(),
                                op: Op::Adjoin,
                                child: r.clone(),
                            });
                            out.push(f);
                        }
                    }
                }
            }
        }
        self.in_progress.remove(&x);
        let out = Rc::new(out);
        self.frag_memo.insert(x, out.clone());
        out
    }

    /// Complete records for the tree whose root item is `x`.
    fn records(&mut self, x: usize, units: &[String]) -> Rc<Vec<Arc<DerivationRecord>>> {
        if let Some(r) = self.record_memo.get(&x) {
            return r.clone();
        }
        let tree = self.items[x].tree as usize;
        let nanchors = self.trees[tree].anchor_nodes.len();
        let mut out = Vec::new();
        for f in self.frags(x, units).iter() {
            let mut anchors = f.anchors.clone();
            anchors.sort_by_key(|(k, _)| *k);
            if anchors.len() != nanchors {
                continue;
            }
            let fills = anchors.into_iter().map(|(_, a)| a).collect();
            out.push(Arc::new(DerivationRecord::new(tree, fills, f.atts.clone())));
        }
        let out = Rc::new(out);
        self.record_memo.insert(x, out.clone());
        out
    }
}
