//! Reader and writer for the grammar and lexicon text formats.
//!
//! Grammar file, one declaration per line (`#` starts a comment):
//!
//! ```text
//! feature inv: + -
//! family Tnx0Vs1 sig=NP*S: betaCOMPs betaFinal
//! tree betaFinal type=aux role=final
//!   S[bot={quoting:+}]
//!     S[foot][top={quoting:-}]
//!     Punct[subst][top={punct:comma}]
//!     NP[subst]
//!     VP[na]
//!       V
//!         @1
//! ```
//!
//! Node lines are indented two spaces per depth level, starting at two.
//! Bracket groups are `[subst]`, `[foot]`, `[na]`, `[top={..}]`, `[bot={..}]`;
//! a node without a kind group is internal. `@N` is anchor slot N and takes
//! its parent's label. Values are atoms from the declared alphabet or `$N`
//! variables local to the tree. Tree headers may also carry `inverted`,
//! `labels=A,B` (instantiate once per label, replacing the placeholder label
//! `X`) and `quotes=dquote,squote` (instantiate once per kind, replacing the
//! feature name `contains-Q` by `contains-<kind>`).
//!
//! Lexicon file, one entry per line:
//!
//! ```text
//! said | V | Tnx0Vs1 | class=saying,invert=+,lemma=say
//! ```

use std::collections::BTreeMap;

use super::{GrammarError, LexicalEntry, TreeFamily, TreeTemplate};
use crate::features::{FeatureStructure, FeatureValue};
use crate::tree::{NodeKind, Role, TreeNode, TreeType};

/// Declarations read from a grammar file, before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrammarSource {
    pub features: Vec<(String, Vec<String>)>,
    pub families: Vec<TreeFamily>,
    pub templates: Vec<TreeTemplate>,
}

fn perr(file: &'static str, line: usize, msg: impl Into<String>) -> GrammarError {
    GrammarError::Parse {
        file,
        line,
        msg: msg.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_grammar(text: &str) -> Result<GrammarSource, GrammarError> {
    const F: &str = "grammar";
    let mut src = GrammarSource::default();
    // (template under construction, stack of open node paths by depth)
    let mut current: Option<(TreeTemplate, usize)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let body = line.trim();

        if indent == 0 {
            if let Some((t, _)) = current.take() {
                finish_template(t, &mut src, lineno)?;
            }
            let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
            match kw {
                "feature" => {
                    let (name, vals) = rest
                        .split_once(':')
                        .ok_or_else(|| perr(F, lineno, "expected `feature NAME: values`"))?;
                    let vals: Vec<String> = vals.split_whitespace().map(str::to_string).collect();
                    if vals.is_empty() {
                        return Err(perr(F, lineno, "feature with empty alphabet"));
                    }
                    src.features.push((name.trim().to_string(), vals));
                }
                "family" => {
                    let (head, members) = rest
                        .split_once(':')
                        .ok_or_else(|| perr(F, lineno, "expected `family NAME sig=..: trees`"))?;
                    let mut parts = head.split_whitespace();
                    let name = parts
                        .next()
                        .ok_or_else(|| perr(F, lineno, "family without a name"))?;
                    let sig = parts
                        .next()
                        .and_then(|s| s.strip_prefix("sig="))
                        .ok_or_else(|| perr(F, lineno, "family without sig="))?;
                    src.families.push(TreeFamily {
                        name: name.to_string(),
                        signature: sig.split('*').map(str::to_string).collect(),
                        members: members.split_whitespace().map(str::to_string).collect(),
                    });
                }
                "tree" => {
                    current = Some((parse_tree_header(rest, lineno)?, lineno));
                }
                other => return Err(perr(F, lineno, format!("unknown declaration `{}`", other))),
            }
            continue;
        }

        let (tmpl, _) = current
            .as_mut()
            .ok_or_else(|| perr(F, lineno, "node line outside a tree block"))?;
        if !indent.is_multiple_of(2) || indent < 2 {
            return Err(perr(
                F,
                lineno,
                "node lines are indented by multiples of two",
            ));
        }
        let depth = indent / 2 - 1;
        let node = parse_node(body, lineno)?;
        insert_node(tmpl, depth, node, lineno)?;
    }
    if let Some((t, l)) = current.take() {
        finish_template(t, &mut src, l)?;
    }
    Ok(src)
}

fn finish_template(
    t: TreeTemplate,
    src: &mut GrammarSource,
    lineno: usize,
) -> Result<(), GrammarError> {
    if t.root.is_none() {
        return Err(perr(
            "grammar",
            lineno,
            format!("tree {} has no nodes", t.name),
        ));
    }
    src.templates.push(t);
    Ok(())
}

fn parse_tree_header(rest: &str, lineno: usize) -> Result<TreeTemplate, GrammarError> {
    const F: &str = "grammar";
    let mut parts = rest.split_whitespace();
    let name = parts
        .next()
        .ok_or_else(|| perr(F, lineno, "tree without a name"))?;
    let mut t = TreeTemplate {
        name: name.to_string(),
        tree_type: TreeType::Initial,
        role: Role::Basic,
        inverted: false,
        labels: Vec::new(),
        quotes: Vec::new(),
        root: None,
    };
    let mut saw_type = false;
    for p in parts {
        match p.split_once('=') {
            Some(("type", "initial")) => {
                t.tree_type = TreeType::Initial;
                saw_type = true;
            }
            Some(("type", "aux")) => {
                t.tree_type = TreeType::Auxiliary;
                saw_type = true;
            }
            Some(("role", r)) => {
                t.role = Role::parse(r)
                    .ok_or_else(|| perr(F, lineno, format!("unknown role `{}`", r)))?;
            }
            Some(("labels", l)) => t.labels = l.split(',').map(str::to_string).collect(),
            Some(("quotes", q)) => t.quotes = q.split(',').map(str::to_string).collect(),
            None if p == "inverted" => t.inverted = true,
            _ => return Err(perr(F, lineno, format!("unknown tree attribute `{}`", p))),
        }
    }
    if !saw_type {
        return Err(perr(F, lineno, "tree header needs type=initial|aux"));
    }
    Ok(t)
}

fn parse_node(body: &str, lineno: usize) -> Result<TreeNode, GrammarError> {
    const F: &str = "grammar";
    if let Some(n) = body.strip_prefix('@') {
        let i: usize = n
            .trim()
            .parse()
            .map_err(|_| perr(F, lineno, format!("bad anchor `{}`", body)))?;
        if i == 0 {
            return Err(perr(F, lineno, "anchors are numbered from 1"));
        }
        // label is filled from the parent on insertion
        return Ok(TreeNode::new("", NodeKind::Anchor(i)));
    }
    let label_end = body.find('[').unwrap_or(body.len());
    let label = body[..label_end].trim();
    if label.is_empty() || label.contains(char::is_whitespace) {
        return Err(perr(F, lineno, format!("bad node label in `{}`", body)));
    }
    let mut node = TreeNode::new(label, NodeKind::Internal);
    let mut rest = &body[label_end..];
    while !rest.is_empty() {
        let inner_end = rest
            .find(']')
            .ok_or_else(|| perr(F, lineno, "unclosed `[`"))?;
        if !rest.starts_with('[') {
            return Err(perr(F, lineno, format!("unexpected text `{}`", rest)));
        }
        let group = &rest[1..inner_end];
        match group {
            "subst" => node.kind = NodeKind::Substitution,
            "foot" => node.kind = NodeKind::Foot,
            "na" => node.null_adjunction = true,
            g if g.starts_with("top=") => node.features.top = parse_fs(&g[4..], lineno)?,
            g if g.starts_with("bot=") => node.features.bottom = parse_fs(&g[4..], lineno)?,
            g => return Err(perr(F, lineno, format!("unknown node attribute `[{}]`", g))),
        }
        rest = rest[inner_end + 1..].trim_start();
    }
    Ok(node)
}

pub fn parse_fs(text: &str, lineno: usize) -> Result<FeatureStructure, GrammarError> {
    const F: &str = "grammar";
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| {
            perr(
                F,
                lineno,
                format!("feature structure `{}` needs braces", text),
            )
        })?;
    let mut fs = FeatureStructure::new();
    for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once(':')
            .ok_or_else(|| perr(F, lineno, format!("expected name:value, got `{}`", item)))?;
        let (k, v) = (k.trim(), v.trim());
        let value = match v.strip_prefix('$') {
            Some(n) => FeatureValue::Var(
                n.parse()
                    .map_err(|_| perr(F, lineno, format!("bad variable `{}`", v)))?,
            ),
            None => FeatureValue::atom(v),
        };
        if fs.insert(k, value).is_some() {
            return Err(perr(F, lineno, format!("feature `{}` given twice", k)));
        }
    }
    Ok(fs)
}

fn insert_node(
    t: &mut TreeTemplate,
    depth: usize,
    mut node: TreeNode,
    lineno: usize,
) -> Result<(), GrammarError> {
    const F: &str = "grammar";
    if depth == 0 {
        if t.root.is_some() {
            return Err(perr(F, lineno, format!("tree {} has two roots", t.name)));
        }
        if matches!(node.kind, NodeKind::Anchor(_)) {
            return Err(perr(F, lineno, "anchor cannot be a root"));
        }
        t.root = Some(node);
        return Ok(());
    }
    let mut parent = t
        .root
        .as_mut()
        .ok_or_else(|| perr(F, lineno, "indented node before root"))?;
    for _ in 1..depth {
        parent = parent
            .children
            .last_mut()
            .ok_or_else(|| perr(F, lineno, "node indented too deep"))?;
    }
    if parent.kind != NodeKind::Internal {
        return Err(perr(F, lineno, "only internal nodes have children"));
    }
    if matches!(node.kind, NodeKind::Anchor(_)) {
        node.label = parent.label.clone();
    }
    parent.children.push(node);
    Ok(())
}

pub fn parse_lexicon(text: &str) -> Result<Vec<LexicalEntry>, GrammarError> {
    const F: &str = "lexicon";
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        // `#` is not a comment inside the word column of a punctuation entry
        let line = if raw.trim_start().starts_with('#') {
            ""
        } else {
            raw
        };
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(" | ").map(str::trim).collect();
        if cols.len() < 3 || cols.len() > 4 {
            return Err(perr(
                F,
                lineno,
                "expected `word | category | trees | features`",
            ));
        }
        let mut attrs = BTreeMap::new();
        if let Some(feats) = cols.get(3) {
            for kv in feats.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| perr(F, lineno, format!("expected key=value, got `{}`", kv)))?;
                attrs.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let selects: Vec<String> = cols[2]
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if cols[0].is_empty() || selects.is_empty() {
            return Err(perr(F, lineno, "entry needs a word and at least one tree"));
        }
        out.push(LexicalEntry {
            word: cols[0].to_string(),
            category: cols[1].to_string(),
            selects,
            attrs,
        });
    }
    Ok(out)
}

fn dump_node(node: &TreeNode, depth: usize, out: &mut String) {
    for _ in 0..=depth {
        out.push_str("  ");
    }
    match node.kind {
        NodeKind::Anchor(i) => {
            out.push_str(&format!("@{}\n", i));
            return;
        }
        _ => out.push_str(node.label.as_str()),
    }
    match node.kind {
        NodeKind::Substitution => out.push_str("[subst]"),
        NodeKind::Foot => out.push_str("[foot]"),
        _ => {}
    }
    if node.null_adjunction {
        out.push_str("[na]");
    }
    if !node.features.top.is_empty() {
        out.push_str(&format!("[top={}]", node.features.top));
    }
    if !node.features.bottom.is_empty() {
        out.push_str(&format!("[bot={}]", node.features.bottom));
    }
    out.push('\n');
    for c in &node.children {
        dump_node(c, depth + 1, out);
    }
}

pub fn dump_grammar(src: &GrammarSource) -> String {
    let mut out = String::new();
    for (name, vals) in &src.features {
        out.push_str(&format!("feature {}: {}\n", name, vals.join(" ")));
    }
    out.push('\n');
    for f in &src.families {
        out.push_str(&format!(
            "family {} sig={}: {}\n",
            f.name,
            f.signature.join("*"),
            f.members.join(" ")
        ));
    }
    for t in &src.templates {
        out.push('\n');
        out.push_str(&format!("tree {} type={}", t.name, t.tree_type.as_str()));
        if t.role != Role::Basic {
            out.push_str(&format!(" role={}", t.role.as_str()));
        }
        if t.inverted {
            out.push_str(" inverted");
        }
        if !t.labels.is_empty() {
            out.push_str(&format!(" labels={}", t.labels.join(",")));
        }
        if !t.quotes.is_empty() {
            out.push_str(&format!(" quotes={}", t.quotes.join(",")));
        }
        out.push('\n');
        if let Some(root) = &t.root {
            dump_node(root, 0, &mut out);
        }
    }
    out
}

pub fn dump_lexicon(entries: &[LexicalEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let attrs: Vec<String> = e
            .attrs
            .iter()
            .map(|(k, v)| format!("{}={}", k, v))
            .collect();
        out.push_str(&format!(
            "{} | {} | {} | {}\n",
            e.word,
            e.category,
            e.selects.join(","),
            attrs.join(",")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
feature inv: + -
family T sig=NP*S: b
tree b type=aux role=final inverted   # trailing comment
  S[bot={inv:$1}]
    S[foot][top={inv:$1}]
    Punct[subst]
    VP[na]
      V
        @1
";

    #[test]
    fn parses_tree_block() {
        let src = parse_grammar(SMALL).unwrap();
        assert_eq!(
            src.features,
            vec![("inv".to_string(), vec!["+".into(), "-".into()])]
        );
        let t = &src.templates[0];
        assert!(t.inverted);
        assert_eq!(t.role, Role::Final);
        let root = t.root.as_ref().unwrap();
        assert_eq!(root.children.len(), 3);
        assert_eq!(root.children[0].kind, NodeKind::Foot);
        assert!(root.children[2].null_adjunction);
        let anchor = &root.children[2].children[0].children[0];
        assert_eq!(anchor.kind, NodeKind::Anchor(1));
        assert_eq!(anchor.label.as_str(), "V");
    }

    #[test]
    fn dump_then_parse_is_identity() {
        let src = parse_grammar(SMALL).unwrap();
        let again = parse_grammar(&dump_grammar(&src)).unwrap();
        assert_eq!(src, again);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_grammar("feature inv: + -\ntree t type=aux\n  S[bogus]\n").unwrap_err();
        assert!(
            matches!(err, GrammarError::Parse { line: 3, .. }),
            "{:?}",
            err
        );
        let err = parse_grammar("tree t type=initial\n      S\n").unwrap_err();
        assert!(matches!(err, GrammarError::Parse { line: 2, .. }));
    }

    #[test]
    fn lexicon_line() {
        let e = parse_lexicon(
            "# c\nDr. Talcott | NP | alphaNXN\n, | Punct | alphaPunct | punct=comma,delim=+\n",
        )
        .unwrap();
        assert_eq!(e[0].word, "Dr. Talcott");
        assert_eq!(e[1].attrs["punct"], "comma");
        assert_eq!(parse_lexicon(&dump_lexicon(&e)).unwrap().len(), 2);
    }
}
