//! Load-time checks on templates, lexicon entries and the assembled catalog.

use std::collections::{BTreeSet, HashSet};

use super::{invariant, Grammar, GrammarError, GrammarSource, LexicalEntry, ENTRY_METADATA};
use crate::features::{unify, FeatureStructure, FeatureValue};
use crate::tree::{ElementaryTree, NodeKind, Role, TreeType};

const VERB_CLASSES: &[&str] = &["saying", "attitude", "punctual"];

/// A complement-clause tree that does not demand a colon on its foot.
pub(crate) fn is_plain_complement(t: &ElementaryTree) -> bool {
    t.role == Role::ComplementClause
        && t.foot()
            .map(|(_, f)| f.features.top.atom("punct-colon") != Some("+"))
            .unwrap_or(false)
}

pub(crate) fn check_source(src: &GrammarSource) -> Result<(), GrammarError> {
    let mut seen = HashSet::new();
    for (name, vals) in &src.features {
        if !seen.insert(name.as_str()) {
            return Err(invariant(name, "feature declared twice"));
        }
        let distinct: HashSet<_> = vals.iter().collect();
        if distinct.len() != vals.len() {
            return Err(invariant(name, "repeated value in alphabet"));
        }
    }
    let templates: HashSet<&str> = src.templates.iter().map(|t| t.name.as_str()).collect();
    let mut fams = HashSet::new();
    for f in &src.families {
        if !fams.insert(f.name.as_str()) || templates.contains(f.name.as_str()) {
            return Err(invariant(&f.name, "family name already in use"));
        }
        if f.signature.is_empty() || f.signature.iter().any(String::is_empty) {
            return Err(invariant(&f.name, "empty signature"));
        }
        for m in &f.members {
            if !templates.contains(m.as_str()) {
                return Err(invariant(&f.name, format!("unknown member tree `{}`", m)));
            }
        }
    }
    Ok(())
}

fn check_fs(item: &str, fs: &FeatureStructure, src: &GrammarSource) -> Result<(), GrammarError> {
    for (k, v) in fs.iter() {
        let alphabet = src
            .features
            .iter()
            .find(|(n, _)| n == k)
            .map(|(_, a)| a)
            .ok_or_else(|| invariant(item, format!("undeclared feature `{}`", k)))?;
        if let FeatureValue::Atom(a) = v {
            if !alphabet.contains(a) {
                return Err(invariant(
                    item,
                    format!("`{}` is not a value of `{}`", a, k),
                ));
            }
        }
    }
    Ok(())
}

pub(crate) fn check_tree(t: &ElementaryTree, src: &GrammarSource) -> Result<(), GrammarError> {
    let nodes = t.root.nodes();
    let mut anchors = Vec::new();
    let mut feet = Vec::new();
    for (addr, n) in &nodes {
        match n.kind {
            NodeKind::Internal => {
                if n.children.is_empty() {
                    return Err(invariant(
                        &t.name,
                        format!("internal node {} has no children", addr),
                    ));
                }
            }
            NodeKind::Anchor(i) => anchors.push(i),
            NodeKind::Foot => feet.push(*n),
            NodeKind::Substitution => {}
        }
        check_fs(&t.name, &n.features.top, src)?;
        check_fs(&t.name, &n.features.bottom, src)?;
    }
    anchors.sort_unstable();
    if anchors.is_empty() {
        return Err(invariant(&t.name, "tree has no lexical anchor"));
    }
    if anchors != (1..=anchors.len()).collect::<Vec<_>>() {
        return Err(invariant(
            &t.name,
            "anchors must be numbered 1..k without gaps",
        ));
    }
    match t.tree_type {
        TreeType::Initial if !feet.is_empty() => {
            return Err(invariant(&t.name, "initial tree contains a foot"));
        }
        TreeType::Auxiliary if feet.len() != 1 => {
            return Err(invariant(&t.name, "auxiliary tree needs exactly one foot"));
        }
        TreeType::Auxiliary if feet[0].label != t.root.label => {
            return Err(invariant(
                &t.name,
                format!(
                    "foot label {} differs from root label {}",
                    feet[0].label, t.root.label
                ),
            ));
        }
        _ => {}
    }
    if t.role.is_quoting() && t.role != Role::ComplementClause && t.has_label("Comp") {
        return Err(invariant(
            &t.name,
            "among quoting trees only complement-clause trees may contain Comp",
        ));
    }
    if t.role.is_quoting() && t.tree_type != TreeType::Auxiliary {
        return Err(invariant(&t.name, "quoting trees are auxiliary"));
    }
    if t.role.is_parenthetical() {
        for (addr, n) in &nodes {
            if !addr.is_root() && n.kind == NodeKind::Internal && !n.null_adjunction {
                return Err(invariant(
                    &t.name,
                    format!("parenthetical spine node {} must carry [na]", addr),
                ));
            }
        }
    }
    Ok(())
}

pub(crate) fn check_entry(g: &Grammar, e: &LexicalEntry) -> Result<(), GrammarError> {
    for (k, v) in &e.attrs {
        if ENTRY_METADATA.contains(&k.as_str()) {
            continue;
        }
        match g.feature_alphabet(k) {
            None => return Err(invariant(&e.word, format!("undeclared feature `{}`", k))),
            Some(a) if !a.contains(v) => {
                return Err(invariant(
                    &e.word,
                    format!("`{}` is not a value of `{}`", v, k),
                ))
            }
            _ => {}
        }
    }
    if let Some(c) = e.verb_class() {
        if !VERB_CLASSES.contains(&c) {
            return Err(invariant(&e.word, format!("unknown verb class `{}`", c)));
        }
        if !e.selects.iter().any(|s| g.family(s).is_some()) {
            return Err(invariant(
                &e.word,
                "clausal verbs select at least one tree family",
            ));
        }
    }
    if let Some(i) = e.attr("invert") {
        if i != "+" && i != "-" {
            return Err(invariant(&e.word, "invert must be + or -"));
        }
    }
    if e.inversion_capable()
        && !e
            .selects
            .iter()
            .filter_map(|s| g.family(s))
            .any(|f| f.signature == ["NP", "S"])
    {
        return Err(invariant(
            &e.word,
            "inversion is only for intransitive clausal-complement (NP×S) verbs",
        ));
    }
    for s in &e.selects {
        if g.family(s).is_some() {
            continue;
        }
        for &id in g.template_trees(s) {
            let t = &g.trees[id];
            if t.role.is_parenthetical() {
                return Err(invariant(
                    &e.word,
                    format!(
                        "parenthetical tree {} is selected only through a family",
                        t.template
                    ),
                ));
            }
            if e.verb_class() == Some("punctual") && is_plain_complement(t) {
                return Err(invariant(
                    &e.word,
                    format!(
                        "punctual verb cannot select plain complement tree {}",
                        t.template
                    ),
                ));
            }
        }
    }
    Ok(())
}

fn punct_fillers(g: &Grammar) -> Vec<(String, FeatureStructure)> {
    let mut out = Vec::new();
    for (i, e) in g.lexicon.iter().enumerate() {
        let Some(sub) = e.attr("punct") else { continue };
        for sel in g.selections(i) {
            let t = &g.trees[sel.tree];
            if t.tree_type != TreeType::Initial || t.root.label.as_str() != "Punct" {
                continue;
            }
            let root = &t.root.features;
            let fs = unify(&root.bottom, &e.node_features()).and_then(|b| unify(&root.top, &b));
            if let Some(fs) = fs {
                out.push((sub.to_string(), fs));
            }
        }
    }
    out
}

pub(crate) fn check_catalog(g: &Grammar) -> Result<(), GrammarError> {
    let fillers = punct_fillers(g);
    for t in &g.trees {
        let allowed: Option<&[&str]> = match t.role {
            Role::MedialPreVp | Role::MedialPostV => Some(&["comma", "dash"]),
            Role::Final | Role::InitialParen => Some(&["comma"]),
            Role::ComplementClause => Some(&[]),
            _ => None,
        };
        let Some(allowed) = allowed else { continue };
        for (addr, n) in t.root.nodes() {
            if n.kind != NodeKind::Substitution || n.label.as_str() != "Punct" {
                continue;
            }
            let accepted: BTreeSet<&str> = fillers
                .iter()
                .filter(|(_, fs)| unify(&n.features.top, fs).is_some())
                .map(|(s, _)| s.as_str())
                .collect();
            if let Some(bad) = accepted.iter().find(|s| !allowed.contains(s)) {
                return Err(invariant(
                    &t.name,
                    format!("Punct slot {} accepts `{}`", addr, bad),
                ));
            }
            if allowed.is_empty() {
                return Err(invariant(
                    &t.name,
                    "complement-clause trees take no Punct argument",
                ));
            }
        }
    }
    for tmpl in &g.source.templates {
        if !tmpl.role.is_parenthetical() && tmpl.role != Role::ComplementClause {
            continue;
        }
        let clausal = g
            .families()
            .iter()
            .any(|f| f.signature.iter().any(|s| s == "S") && f.members.contains(&tmpl.name));
        if !clausal {
            return Err(invariant(
                &tmpl.name,
                "quoting trees belong to a clausal-complement family",
            ));
        }
    }
    for f in g.families() {
        let nps = f.signature.iter().filter(|s| *s == "NP").count();
        for m in &f.members {
            for &id in g.template_trees(m) {
                let t = &g.trees[id];
                let slots = t
                    .root
                    .nodes()
                    .iter()
                    .filter(|(_, n)| n.kind == NodeKind::Substitution && n.label.as_str() == "NP")
                    .count();
                if slots != nps {
                    return Err(invariant(
                        &t.name,
                        format!(
                            "has {} NP arguments but family {} is {}",
                            slots,
                            f.name,
                            f.signature.join("×")
                        ),
                    ));
                }
            }
        }
    }
    Ok(())
}
