//! Grammar catalog and lexicon: loading, validation and lexical selection.

mod format;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

pub use format::{
    dump_grammar, dump_lexicon, parse_fs, parse_grammar, parse_lexicon, GrammarSource,
};

use crate::features::{FeatureStructure, FeatureValue};
use crate::tree::{ElementaryTree, GornAddress, NodeKind, NodeLabel, Role, TreeNode, TreeType};

/// The grammar fragment shipped with the crate.
pub const SHIPPED_GRAMMAR: &str = include_str!("../../data/quoted-speech.grammar");
pub const SHIPPED_LEXICON: &str = include_str!("../../data/quoted-speech.lex");

/// Lexicon attributes that steer selection rather than becoming node features.
pub const ENTRY_METADATA: &[&str] = &["class", "invert", "lemma", "anchor", "quote"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: &'static str,
        line: usize,
        msg: String,
    },
    #[error("{item}: {msg}")]
    Invariant { item: String, msg: String },
    #[error("out of vocabulary: {0}")]
    UnknownWord(String),
}

pub(crate) fn invariant(item: impl Into<String>, msg: impl Into<String>) -> GrammarError {
    GrammarError::Invariant {
        item: item.into(),
        msg: msg.into(),
    }
}

/// Argument-type signature of a tree family, e.g. `NP×S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(pub Vec<String>);

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("×"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeFamily {
    pub name: String,
    pub signature: Vec<String>,
    pub members: Vec<String>,
}

pub fn family_signature(f: &TreeFamily) -> Signature {
    Signature(f.signature.clone())
}

/// A tree block as written in the grammar file, possibly parametrized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeTemplate {
    pub name: String,
    pub tree_type: TreeType,
    pub role: Role,
    pub inverted: bool,
    pub labels: Vec<String>,
    pub quotes: Vec<String>,
    pub root: Option<TreeNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexicalEntry {
    pub word: String,
    pub category: String,
    /// Tree template or family names.
    pub selects: Vec<String>,
    pub attrs: BTreeMap<String, String>,
}

impl LexicalEntry {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }

    pub fn verb_class(&self) -> Option<&str> {
        self.attr("class")
    }

    pub fn inversion_capable(&self) -> bool {
        self.attr("invert") == Some("+")
    }

    pub fn lemma(&self) -> &str {
        self.attr("lemma").unwrap_or(&self.word)
    }

    /// Attributes that are grammar features, merged into the anchor's parent.
    pub fn node_features(&self) -> FeatureStructure {
        self.attrs
            .iter()
            .filter(|(k, _)| !ENTRY_METADATA.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), FeatureValue::Atom(v.clone())))
            .collect()
    }
}

/// One elementary tree a lexical entry anchors, and at which anchor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Selection {
    pub tree: usize,
    pub anchor: usize,
}

#[derive(Clone, Debug)]
pub struct Grammar {
    pub source: GrammarSource,
    pub trees: Vec<ElementaryTree>,
    pub lexicon: Vec<LexicalEntry>,
    tree_index: HashMap<String, usize>,
    template_trees: HashMap<String, Vec<usize>>,
    word_index: HashMap<String, Vec<usize>>,
    selections: Vec<Vec<Selection>>,
    max_entry_words: usize,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.trees == other.trees && self.lexicon == other.lexicon
    }
}

impl Eq for Grammar {}

/// Loads and validates a grammar file plus lexicon.
pub fn load_grammar(grammar_text: &str, lexicon_text: &str) -> Result<Grammar, GrammarError> {
    let source = parse_grammar(grammar_text)?;
    let lexicon = parse_lexicon(lexicon_text)?;
    Grammar::build(source, lexicon)
}

impl Grammar {
    pub fn shipped() -> Grammar {
        load_grammar(SHIPPED_GRAMMAR, SHIPPED_LEXICON).expect("shipped grammar is valid")
    }

    /// The shipped grammar with a different lexicon.
    pub fn shipped_with_lexicon(lexicon_text: &str) -> Result<Grammar, GrammarError> {
        load_grammar(SHIPPED_GRAMMAR, lexicon_text)
    }

    pub fn build(
        source: GrammarSource,
        lexicon: Vec<LexicalEntry>,
    ) -> Result<Grammar, GrammarError> {
        validate::check_source(&source)?;
        let mut trees = Vec::new();
        let mut tree_index = HashMap::new();
        let mut template_trees: HashMap<String, Vec<usize>> = HashMap::new();
        for t in &source.templates {
            if template_trees.contains_key(&t.name) {
                return Err(invariant(&t.name, "duplicate tree name"));
            }
            let ids = template_trees.entry(t.name.clone()).or_default();
            for tree in expand_template(t) {
                validate::check_tree(&tree, &source)?;
                tree_index.insert(tree.name.clone(), trees.len());
                ids.push(trees.len());
                trees.push(tree);
            }
        }
        let mut word_index: HashMap<String, Vec<usize>> = HashMap::new();
        let mut max_entry_words = 1;
        for (i, e) in lexicon.iter().enumerate() {
            word_index.entry(e.word.clone()).or_default().push(i);
            max_entry_words = max_entry_words.max(e.word.split(' ').count());
        }
        let mut g = Grammar {
            source,
            trees,
            lexicon,
            tree_index,
            template_trees,
            word_index,
            selections: Vec::new(),
            max_entry_words,
        };
        let mut selections = Vec::with_capacity(g.lexicon.len());
        for e in &g.lexicon {
            validate::check_entry(&g, e)?;
            selections.push(g.compute_selections(e)?);
        }
        g.selections = selections;
        validate::check_catalog(&g)?;
        Ok(g)
    }

    pub fn families(&self) -> &[TreeFamily] {
        &self.source.families
    }

    pub fn family(&self, name: &str) -> Option<&TreeFamily> {
        self.source.families.iter().find(|f| f.name == name)
    }

    pub fn tree_id(&self, name: &str) -> Option<usize> {
        self.tree_index.get(name).copied()
    }

    pub fn template_trees(&self, template: &str) -> &[usize] {
        self.template_trees
            .get(template)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn feature_alphabet(&self, name: &str) -> Option<&[String]> {
        self.source
            .features
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn selections(&self, entry: usize) -> &[Selection] {
        &self.selections[entry]
    }

    /// Lexicon entries for a word, falling back to lowercase.
    pub fn entries_for(&self, word: &str) -> Result<&[usize], GrammarError> {
        if let Some(v) = self.word_index.get(word) {
            return Ok(v);
        }
        self.word_index
            .get(&word.to_lowercase())
            .map(Vec::as_slice)
            .ok_or_else(|| GrammarError::UnknownWord(word.to_string()))
    }

    /// Groups words into lexical units, preferring the longest multiword entry.
    pub fn segment<S: AsRef<str>>(&self, words: &[S]) -> Vec<String> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let mut taken = 1;
            for len in (2..=self.max_entry_words.min(words.len() - i)).rev() {
                let joined = words[i..i + len]
                    .iter()
                    .map(|w| w.as_ref())
                    .collect::<Vec<_>>()
                    .join(" ");
                if self.entries_for(&joined).is_ok() {
                    taken = len;
                    break;
                }
            }
            let unit = words[i..i + taken]
                .iter()
                .map(|w| w.as_ref())
                .collect::<Vec<_>>()
                .join(" ");
            out.push(unit);
            i += taken;
        }
        out
    }

    /// All instantiated trees an entry anchors.
    pub fn select_trees(&self, entry: &LexicalEntry) -> Result<Vec<Selection>, GrammarError> {
        self.compute_selections(entry)
    }

    fn compute_selections(&self, entry: &LexicalEntry) -> Result<Vec<Selection>, GrammarError> {
        let anchor: usize = match entry.attr("anchor") {
            Some(a) => a
                .parse()
                .map_err(|_| invariant(&entry.word, format!("bad anchor number `{}`", a)))?,
            None => 1,
        };
        let mut out = Vec::new();
        for name in &entry.selects {
            let (templates, via_family): (Vec<&str>, bool) = if let Some(f) = self.family(name) {
                (f.members.iter().map(String::as_str).collect(), true)
            } else if self.template_trees.contains_key(name) {
                (vec![name.as_str()], false)
            } else {
                return Err(invariant(
                    &entry.word,
                    format!("selects unknown tree or family `{}`", name),
                ));
            };
            for tname in templates {
                for &id in self.template_trees(tname) {
                    let t = &self.trees[id];
                    if via_family && t.inverted && !entry.inversion_capable() {
                        continue;
                    }
                    if via_family
                        && entry.verb_class() == Some("punctual")
                        && validate::is_plain_complement(t)
                    {
                        continue;
                    }
                    if let Some(q) = &t.quote {
                        if entry.attr("quote") != Some(q.as_str()) {
                            continue;
                        }
                    }
                    if anchor > t.anchors.len() {
                        return Err(invariant(
                            &entry.word,
                            format!("tree {} has no anchor {}", t.name, anchor),
                        ));
                    }
                    out.push(Selection { tree: id, anchor });
                }
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Text of the grammar in canonical form.
    pub fn dump(&self) -> String {
        dump_grammar(&self.source)
    }

    pub fn dump_lexicon(&self) -> String {
        dump_lexicon(&self.lexicon)
    }
}

fn relabel(node: &TreeNode, label: &str, quote: Option<&str>) -> TreeNode {
    let map_fs = |fs: &FeatureStructure| -> FeatureStructure {
        fs.iter()
            .map(|(k, v)| {
                let k = match (k, quote) {
                    ("contains-Q", Some(q)) => format!("contains-{}", q),
                    _ => k.to_string(),
                };
                (k, v.clone())
            })
            .collect()
    };
    let mut n = node.clone();
    if n.label.as_str() == "X" {
        n.label = NodeLabel::new(label);
    }
    n.features.top = map_fs(&node.features.top);
    n.features.bottom = map_fs(&node.features.bottom);
    n.children = node
        .children
        .iter()
        .map(|c| relabel(c, label, quote))
        .collect();
    n
}

/// Instantiates a template once per label and quote parameter.
pub fn expand_template(t: &TreeTemplate) -> Vec<ElementaryTree> {
    let root = t.root.as_ref().expect("templates have a root");
    let labels: Vec<Option<&str>> = if t.labels.is_empty() {
        vec![None]
    } else {
        t.labels.iter().map(|l| Some(l.as_str())).collect()
    };
    let quotes: Vec<Option<&str>> = if t.quotes.is_empty() {
        vec![None]
    } else {
        t.quotes.iter().map(|q| Some(q.as_str())).collect()
    };
    let mut out = Vec::new();
    for l in &labels {
        for q in &quotes {
            let node = match l {
                Some(l) => relabel(root, l, *q),
                None => relabel(root, root.label.as_str(), *q),
            };
            let params: Vec<&str> = l.iter().chain(q.iter()).copied().collect();
            let name = if params.is_empty() {
                t.name.clone()
            } else {
                format!("{}[{}]", t.name, params.join(","))
            };
            let mut anchors: Vec<(usize, GornAddress)> = node
                .nodes()
                .into_iter()
                .filter_map(|(a, n)| match n.kind {
                    NodeKind::Anchor(i) => Some((i, a)),
                    _ => None,
                })
                .collect();
            anchors.sort();
            out.push(ElementaryTree {
                name,
                tree_type: t.tree_type,
                root: node,
                anchors: anchors.into_iter().map(|(_, a)| a).collect(),
                role: t.role,
                inverted: t.inverted,
                quote: q.map(str::to_string),
                template: t.name.clone(),
            });
        }
    }
    out
}
