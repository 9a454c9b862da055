//! Elementary and derived trees, and the two combination operations.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::features::{Bindings, FeatureStructure, TopBottomPair};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeLabel(pub String);

impl NodeLabel {
    pub fn new(s: &str) -> Self {
        NodeLabel(s.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Path of child indices from the root.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GornAddress(pub Vec<usize>);

impl GornAddress {
    pub fn root() -> Self {
        GornAddress(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        GornAddress(p)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GornAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Internal,
    Substitution,
    Foot,
    /// Anchor slot, numbered from 1.
    Anchor(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeNode {
    pub label: NodeLabel,
    pub kind: NodeKind,
    pub features: TopBottomPair,
    pub null_adjunction: bool,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn new(label: &str, kind: NodeKind) -> Self {
        TreeNode {
            label: NodeLabel::new(label),
            kind,
            features: TopBottomPair::default(),
            null_adjunction: false,
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<TreeNode>) -> Self {
        self.children = children;
        self
    }

    pub fn get(&self, addr: &GornAddress) -> Option<&TreeNode> {
        let mut n = self;
        for &i in &addr.0 {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    /// Preorder walk with addresses.
    pub fn walk<'a>(&'a self, addr: GornAddress, out: &mut Vec<(GornAddress, &'a TreeNode)>) {
        let children = self.children.iter().enumerate();
        let child_addrs: Vec<GornAddress> =
            (0..self.children.len()).map(|i| addr.child(i)).collect();
        out.push((addr, self));
        for ((_, c), a) in children.zip(child_addrs) {
            c.walk(a, out);
        }
    }

    pub fn nodes(&self) -> Vec<(GornAddress, &TreeNode)> {
        let mut out = Vec::new();
        self.walk(GornAddress::root(), &mut out);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeType {
    Initial,
    Auxiliary,
}

impl TreeType {
    pub fn as_str(self) -> &'static str {
        match self {
            TreeType::Initial => "initial",
            TreeType::Auxiliary => "aux",
        }
    }
}

/// What a template contributes to the quoted-speech analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Basic,
    QuoteWrap,
    ComplementClause,
    MedialPreVp,
    MedialPostV,
    Final,
    InitialParen,
}

impl Role {
    pub fn parse(s: &str) -> Option<Role> {
        Some(match s {
            "basic" => Role::Basic,
            "quote-wrap" => Role::QuoteWrap,
            "comp-s" => Role::ComplementClause,
            "medial-prevp" => Role::MedialPreVp,
            "medial-postv" => Role::MedialPostV,
            "final" => Role::Final,
            "initial-paren" => Role::InitialParen,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Basic => "basic",
            Role::QuoteWrap => "quote-wrap",
            Role::ComplementClause => "comp-s",
            Role::MedialPreVp => "medial-prevp",
            Role::MedialPostV => "medial-postv",
            Role::Final => "final",
            Role::InitialParen => "initial-paren",
        }
    }

    pub fn is_parenthetical(self) -> bool {
        matches!(
            self,
            Role::MedialPreVp | Role::MedialPostV | Role::Final | Role::InitialParen
        )
    }

    pub fn is_quoting(self) -> bool {
        self.is_parenthetical() || self == Role::ComplementClause
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementaryTree {
    pub name: String,
    pub tree_type: TreeType,
    pub root: TreeNode,
    /// Anchor addresses, index i holds anchor number i + 1.
    pub anchors: Vec<GornAddress>,
    pub role: Role,
    pub inverted: bool,
    /// Quote kind for instantiated quote wrappers (`dquote` / `squote`).
    pub quote: Option<String>,
    /// Name of the template this tree was instantiated from.
    pub template: String,
}

impl ElementaryTree {
    pub fn node(&self, addr: &GornAddress) -> Option<&TreeNode> {
        self.root.get(addr)
    }

    pub fn foot(&self) -> Option<(GornAddress, &TreeNode)> {
        self.root
            .nodes()
            .into_iter()
            .find(|(_, n)| n.kind == NodeKind::Foot)
    }

    pub fn has_label(&self, label: &str) -> bool {
        self.root
            .nodes()
            .iter()
            .any(|(_, n)| n.label.as_str() == label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivedKind {
    Internal,
    Substitution,
    Foot,
    Word(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedNode {
    pub label: NodeLabel,
    pub kind: DerivedKind,
    pub top: FeatureStructure,
    pub bottom: FeatureStructure,
    pub null_adjunction: bool,
    /// Set once an auxiliary tree has been adjoined at this node.
    pub adjoined: bool,
    pub children: Vec<Arc<DerivedNode>>,
}

impl DerivedNode {
    fn get(&self, addr: &[usize]) -> Option<&DerivedNode> {
        let mut n = self;
        for &i in addr {
            n = n.children.get(i)?;
        }
        Some(n)
    }

    fn find_foot(&self, path: &mut Vec<usize>) -> bool {
        if self.kind == DerivedKind::Foot {
            return true;
        }
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            if c.find_foot(path) {
                return true;
            }
            path.pop();
        }
        false
    }

    fn collect_yield(&self, out: &mut Vec<String>) -> Result<(), TreeError> {
        match &self.kind {
            DerivedKind::Word(w) => out.push(w.clone()),
            DerivedKind::Substitution | DerivedKind::Foot => {
                return Err(TreeError::Incomplete(self.label.clone()))
            }
            DerivedKind::Internal => {
                for c in &self.children {
                    c.collect_yield(out)?;
                }
            }
        }
        Ok(())
    }

    pub fn visit<'a>(
        &'a self,
        addr: GornAddress,
        f: &mut impl FnMut(&GornAddress, &'a DerivedNode),
    ) {
        f(&addr, self);
        for (i, c) in self.children.iter().enumerate() {
            c.visit(addr.child(i), f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("no node at address {0}")]
    InvalidAddress(GornAddress),
    #[error("node at {0} is not a substitution slot")]
    NotSubstitutionSlot(GornAddress),
    #[error("node at {0} does not accept adjunction")]
    NotAdjoinable(GornAddress),
    #[error("label mismatch: site {site}, tree {tree}")]
    LabelMismatch { site: NodeLabel, tree: NodeLabel },
    #[error("expected an {0} tree")]
    WrongTreeType(&'static str),
    #[error("feature clash at {0}")]
    FeatureClash(GornAddress),
    #[error("incomplete derivation: unfilled {0} node")]
    Incomplete(NodeLabel),
}

/// A derived tree: a persistent node structure plus the variable environment
/// shared by all instances combined into it.
#[derive(Clone, Debug)]
pub struct DerivedTree {
    pub root: Arc<DerivedNode>,
    pub tree_type: TreeType,
    pub bindings: Bindings,
    /// Variables in use are `0..var_count`.
    pub var_count: u32,
}

impl DerivedTree {
    /// Instantiates an elementary tree. `words[i]` fills anchor `i + 1`;
    /// `anchor_features[i]` is merged into the bottom of that anchor's parent.
    pub fn instantiate(
        tree: &ElementaryTree,
        words: &[&str],
        anchor_features: &[FeatureStructure],
    ) -> Result<DerivedTree, TreeError> {
        let mut var_count = 0;
        for (_, n) in tree.root.nodes() {
            for v in n.features.top.vars().chain(n.features.bottom.vars()) {
                var_count = var_count.max(v + 1);
            }
        }
        let mut bindings = Bindings::new();
        let root = build_instance(&tree.root, words, anchor_features, &mut bindings)?;
        Ok(DerivedTree {
            root: Arc::new(root),
            tree_type: tree.tree_type,
            bindings,
            var_count,
        })
    }

    pub fn node_at(&self, addr: &GornAddress) -> Result<&DerivedNode, TreeError> {
        self.root
            .get(&addr.0)
            .ok_or_else(|| TreeError::InvalidAddress(addr.clone()))
    }

    pub fn yield_words(&self) -> Result<Vec<String>, TreeError> {
        let mut out = Vec::new();
        self.root.collect_yield(&mut out)?;
        Ok(out)
    }

    /// Merges `other`'s variables into this tree's space and returns the offset
    /// applied to them.
    fn absorb(&self, other: &DerivedTree) -> (Bindings, u32) {
        let offset = self.var_count;
        let mut b = self.bindings.clone();
        b.extend(&other.bindings, offset);
        (b, offset)
    }

    pub fn substitute(
        &self,
        site: &GornAddress,
        arg: &DerivedTree,
    ) -> Result<DerivedTree, TreeError> {
        if arg.tree_type != TreeType::Initial {
            return Err(TreeError::WrongTreeType("initial"));
        }
        let slot = self.node_at(site)?;
        if slot.kind != DerivedKind::Substitution {
            return Err(TreeError::NotSubstitutionSlot(site.clone()));
        }
        if slot.label != arg.root.label {
            return Err(TreeError::LabelMismatch {
                site: slot.label.clone(),
                tree: arg.root.label.clone(),
            });
        }
        let (mut bindings, offset) = self.absorb(arg);
        let arg_root = rename_node(&arg.root, offset);
        let top = bindings
            .unify(&slot.top, &arg_root.top)
            .ok_or_else(|| TreeError::FeatureClash(site.clone()))?;
        let new_node = DerivedNode {
            top,
            ..(*arg_root).clone()
        };
        let root = replace_at(&self.root, &site.0, Arc::new(new_node));
        Ok(DerivedTree {
            root,
            tree_type: self.tree_type,
            bindings,
            var_count: self.var_count + arg.var_count,
        })
    }

    pub fn adjoin(&self, site: &GornAddress, aux: &DerivedTree) -> Result<DerivedTree, TreeError> {
        if aux.tree_type != TreeType::Auxiliary {
            return Err(TreeError::WrongTreeType("auxiliary"));
        }
        let target = self.node_at(site)?;
        if target.kind != DerivedKind::Internal || target.null_adjunction || target.adjoined {
            return Err(TreeError::NotAdjoinable(site.clone()));
        }
        if target.label != aux.root.label {
            return Err(TreeError::LabelMismatch {
                site: target.label.clone(),
                tree: aux.root.label.clone(),
            });
        }
        let (mut bindings, offset) = self.absorb(aux);
        let aux_root = rename_node(&aux.root, offset);
        let mut foot_path = Vec::new();
        if !aux_root.find_foot(&mut foot_path) {
            return Err(TreeError::WrongTreeType("auxiliary"));
        }
        let foot = aux_root.get(&foot_path).expect("foot path");
        let clash = || TreeError::FeatureClash(site.clone());
        let root_top = bindings
            .unify(&target.top, &aux_root.top)
            .ok_or_else(clash)?;
        let foot_bottom = bindings
            .unify(&target.bottom, &foot.bottom)
            .ok_or_else(clash)?;
        let lowered = DerivedNode {
            label: target.label.clone(),
            kind: DerivedKind::Internal,
            top: foot.top.clone(),
            bottom: foot_bottom,
            null_adjunction: target.null_adjunction,
            adjoined: true,
            children: target.children.clone(),
        };
        let with_foot = replace_at(&aux_root, &foot_path, Arc::new(lowered));
        let planted = DerivedNode {
            top: root_top,
            ..(*with_foot).clone()
        };
        let root = replace_at(&self.root, &site.0, Arc::new(planted));
        Ok(DerivedTree {
            root,
            tree_type: self.tree_type,
            bindings,
            var_count: self.var_count + aux.var_count,
        })
    }

    /// Unifies top and bottom at every node. Returns the final environment.
    pub fn close_all(&self) -> Result<Bindings, TreeError> {
        let mut bindings = self.bindings.clone();
        let mut failed = None;
        self.root.visit(GornAddress::root(), &mut |addr, n| {
            if failed.is_some() {
                return;
            }
            match n.kind {
                DerivedKind::Substitution | DerivedKind::Foot => {
                    failed = Some(TreeError::Incomplete(n.label.clone()))
                }
                _ => {
                    if bindings.unify(&n.top, &n.bottom).is_none() {
                        failed = Some(TreeError::FeatureClash(addr.clone()));
                    }
                }
            }
        });
        match failed {
            Some(e) => Err(e),
            None => Ok(bindings),
        }
    }

    /// Bracketed rendering, e.g. `(S (NP Alice) (VP (V sleeps)))`.
    pub fn bracketed(&self) -> String {
        fn go(n: &DerivedNode, out: &mut String) {
            match &n.kind {
                DerivedKind::Word(w) => out.push_str(w),
                DerivedKind::Substitution => {
                    out.push_str(n.label.as_str());
                    out.push('!');
                }
                DerivedKind::Foot => {
                    out.push_str(n.label.as_str());
                    out.push('*');
                }
                DerivedKind::Internal => {
                    out.push('(');
                    out.push_str(n.label.as_str());
                    for c in &n.children {
                        out.push(' ');
                        go(c, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        go(&self.root, &mut s);
        s
    }
}

fn build_instance(
    node: &TreeNode,
    words: &[&str],
    anchor_features: &[FeatureStructure],
    bindings: &mut Bindings,
) -> Result<DerivedNode, TreeError> {
    let (kind, children) = match node.kind {
        NodeKind::Internal => {
            let mut children = Vec::with_capacity(node.children.len());
            for c in &node.children {
                children.push(Arc::new(build_instance(
                    c,
                    words,
                    anchor_features,
                    bindings,
                )?));
            }
            (DerivedKind::Internal, children)
        }
        NodeKind::Substitution => (DerivedKind::Substitution, Vec::new()),
        NodeKind::Foot => (DerivedKind::Foot, Vec::new()),
        NodeKind::Anchor(i) => {
            let w = words
                .get(i - 1)
                .ok_or_else(|| TreeError::Incomplete(node.label.clone()))?;
            (DerivedKind::Word(w.to_string()), Vec::new())
        }
    };
    let mut bottom = node.features.bottom.clone();
    for c in &node.children {
        if let NodeKind::Anchor(i) = c.kind {
            if let Some(extra) = anchor_features.get(i - 1) {
                bottom = bindings
                    .unify(&bottom, extra)
                    .ok_or_else(|| TreeError::FeatureClash(GornAddress::root()))?;
            }
        }
    }
    Ok(DerivedNode {
        label: node.label.clone(),
        kind,
        top: node.features.top.clone(),
        bottom,
        null_adjunction: node.null_adjunction,
        adjoined: false,
        children,
    })
}

fn rename_node(n: &Arc<DerivedNode>, offset: u32) -> Arc<DerivedNode> {
    if offset == 0 {
        return n.clone();
    }
    Arc::new(DerivedNode {
        label: n.label.clone(),
        kind: n.kind.clone(),
        top: n.top.rename_vars(offset),
        bottom: n.bottom.rename_vars(offset),
        null_adjunction: n.null_adjunction,
        adjoined: n.adjoined,
        children: n.children.iter().map(|c| rename_node(c, offset)).collect(),
    })
}

/// Path-copying replacement; untouched siblings are shared.
fn replace_at(node: &Arc<DerivedNode>, path: &[usize], new: Arc<DerivedNode>) -> Arc<DerivedNode> {
    match path.split_first() {
        None => new,
        Some((&i, rest)) => {
            let mut copy = (**node).clone();
            copy.children[i] = replace_at(&node.children[i], rest, new);
            Arc::new(copy)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureValue;

    fn anchored(label: &str, child_label: &str) -> TreeNode {
        TreeNode::new(label, NodeKind::Internal)
            .with_children(vec![TreeNode::new(child_label, NodeKind::Anchor(1))])
    }

    fn np_tree() -> ElementaryTree {
        ElementaryTree {
            name: "alphaNP".into(),
            tree_type: TreeType::Initial,
            root: anchored("NP", "N"),
            anchors: vec![GornAddress(vec![0])],
            role: Role::Basic,
            inverted: false,
            quote: None,
            template: "alphaNP".into(),
        }
    }

    fn intransitive() -> ElementaryTree {
        let vp = TreeNode::new("VP", NodeKind::Internal).with_children(vec![anchored("V", "V")]);
        let root = TreeNode::new("S", NodeKind::Internal)
            .with_children(vec![TreeNode::new("NP", NodeKind::Substitution), vp]);
        ElementaryTree {
            name: "alphanx0V".into(),
            tree_type: TreeType::Initial,
            root,
            anchors: vec![GornAddress(vec![1, 0, 0])],
            role: Role::Basic,
            inverted: false,
            quote: None,
            template: "alphanx0V".into(),
        }
    }

    fn adverb() -> ElementaryTree {
        let root = TreeNode::new("VP", NodeKind::Internal).with_children(vec![
            TreeNode::new("VP", NodeKind::Foot),
            anchored("Adv", "Adv"),
        ]);
        ElementaryTree {
            name: "betaVPadv".into(),
            tree_type: TreeType::Auxiliary,
            root,
            anchors: vec![GornAddress(vec![1, 0])],
            role: Role::Basic,
            inverted: false,
            quote: None,
            template: "betaVPadv".into(),
        }
    }

    fn inst(t: &ElementaryTree, w: &[&str]) -> DerivedTree {
        DerivedTree::instantiate(t, w, &[]).unwrap()
    }

    #[test]
    fn substitution_then_adjunction() {
        let s = inst(&intransitive(), &["sleeps"]);
        let np = inst(&np_tree(), &["Alice"]);
        let adv = inst(&adverb(), &["soundly"]);
        let s = s.substitute(&GornAddress(vec![0]), &np).unwrap();
        assert_eq!(s.yield_words().unwrap(), vec!["Alice", "sleeps"]);
        let s = s.adjoin(&GornAddress(vec![1]), &adv).unwrap();
        assert_eq!(s.yield_words().unwrap(), vec!["Alice", "sleeps", "soundly"]);
        // host node is now under the foot and takes no second adjunction
        assert!(s.adjoin(&GornAddress(vec![1, 0]), &adv).is_err());
        assert!(s.adjoin(&GornAddress(vec![1]), &adv).is_ok());
    }

    #[test]
    fn yield_of_single_np() {
        assert_eq!(
            inst(&np_tree(), &["Alice"]).yield_words().unwrap(),
            vec!["Alice"]
        );
    }

    #[test]
    fn incomplete_yield_is_error() {
        let s = inst(&intransitive(), &["sleeps"]);
        assert!(matches!(s.yield_words(), Err(TreeError::Incomplete(_))));
    }

    #[test]
    fn substitute_into_non_slot_is_inapplicable() {
        let s = inst(&intransitive(), &["sleeps"]);
        let np = inst(&np_tree(), &["Alice"]);
        assert_eq!(
            s.substitute(&GornAddress(vec![1]), &np).unwrap_err(),
            TreeError::NotSubstitutionSlot(GornAddress(vec![1]))
        );
    }

    #[test]
    fn node_at_addresses() {
        let s = inst(&intransitive(), &["sleeps"]);
        assert_eq!(s.node_at(&GornAddress::root()).unwrap().label.as_str(), "S");
        let subj = s.node_at(&GornAddress(vec![0])).unwrap();
        assert_eq!(subj.kind, DerivedKind::Substitution);
        assert!(s.node_at(&GornAddress(vec![7])).is_err());
    }

    #[test]
    fn feature_clash_blocks_substitution() {
        let mut t = intransitive();
        t.root.children[0].features.top = FeatureStructure::from_atoms([("case", "nom")]);
        let mut n = np_tree();
        n.root.features.top = FeatureStructure::from_atoms([("case", "acc")]);
        let s = inst(&t, &["sleeps"]);
        assert!(matches!(
            s.substitute(&GornAddress(vec![0]), &inst(&n, &["her"])),
            Err(TreeError::FeatureClash(_))
        ));
    }

    #[test]
    fn variables_are_kept_apart_between_instances() {
        let mut a = adverb();
        a.root.features.bottom.insert("x", FeatureValue::Var(0));
        a.root.children[0]
            .features
            .top
            .insert("x", FeatureValue::Var(0));
        let s = inst(&intransitive(), &["sleeps"])
            .substitute(&GornAddress(vec![0]), &inst(&np_tree(), &["Alice"]))
            .unwrap();
        let s = s
            .adjoin(&GornAddress(vec![1]), &inst(&a, &["well"]))
            .unwrap();
        let s = s
            .adjoin(&GornAddress(vec![1]), &inst(&a, &["often"]))
            .unwrap();
        assert_eq!(s.var_count, 2);
        assert!(s.close_all().is_ok());
    }

    #[test]
    fn preorder_nodes() {
        let t = intransitive();
        let addrs: Vec<String> = t.root.nodes().iter().map(|(a, _)| a.to_string()).collect();
        assert_eq!(addrs, vec!["e", "0", "1", "1.0", "1.0.0"]);
    }
}
