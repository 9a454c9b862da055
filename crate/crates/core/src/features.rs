//! Flat feature structures and unification.
//!
//! Values are atomic symbols or variables. Variables are coindexation handles
//! scoped to one elementary-tree instance; they are resolved through a
//! [`Bindings`] environment when trees are combined.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    Atom(String),
    Var(u32),
}

impl FeatureValue {
    pub fn atom(s: &str) -> Self {
        FeatureValue::Atom(s.to_string())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            FeatureValue::Atom(a) => Some(a),
            FeatureValue::Var(_) => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Atom(a) => f.write_str(a),
            FeatureValue::Var(v) => write!(f, "${}", v),
        }
    }
}

/// A flat attribute/value map. An absent feature is unconstrained.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureStructure {
    entries: BTreeMap<String, FeatureValue>,
}

impl FeatureStructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a structure from `(name, atom)` pairs.
    pub fn from_atoms<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let mut fs = Self::new();
        for (k, v) in pairs {
            fs.insert(k, FeatureValue::atom(v));
        }
        fs
    }

    pub fn insert(&mut self, name: &str, value: FeatureValue) -> Option<FeatureValue> {
        self.entries.insert(name.to_string(), value)
    }

    pub fn get(&self, name: &str) -> Option<&FeatureValue> {
        self.entries.get(name)
    }

    pub fn atom(&self, name: &str) -> Option<&str> {
        self.get(name).and_then(FeatureValue::as_atom)
    }

    pub fn remove(&mut self, name: &str) -> Option<FeatureValue> {
        self.entries.remove(name)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FeatureValue)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.entries.values().filter_map(|v| match v {
            FeatureValue::Var(n) => Some(*n),
            FeatureValue::Atom(_) => None,
        })
    }

    /// Shifts every variable by `offset`; used to keep instances apart.
    pub fn rename_vars(&self, offset: u32) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| {
                let v = match v {
                    FeatureValue::Var(n) => FeatureValue::Var(n + offset),
                    a => a.clone(),
                };
                (k.clone(), v)
            })
            .collect();
        FeatureStructure { entries }
    }

    /// Replaces bound variables with their values.
    pub fn resolved(&self, bindings: &Bindings) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), bindings.resolve(v)))
            .collect();
        FeatureStructure { entries }
    }

    /// True when some feature holds two different atoms in `self` and `other`.
    /// Variables are ignored, so this is a sound but incomplete clash test.
    pub fn atoms_clash(&self, other: &FeatureStructure) -> bool {
        self.entries
            .iter()
            .any(|(k, v)| match (v, other.entries.get(k)) {
                (FeatureValue::Atom(a), Some(FeatureValue::Atom(b))) => a != b,
                _ => false,
            })
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", k, v)?;
        }
        f.write_str("}")
    }
}

impl FromIterator<(String, FeatureValue)> for FeatureStructure {
    fn from_iter<I: IntoIterator<Item = (String, FeatureValue)>>(iter: I) -> Self {
        FeatureStructure {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Top and bottom structures of one tree node.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TopBottomPair {
    pub top: FeatureStructure,
    pub bottom: FeatureStructure,
}

/// Unifies two structures without an environment. Equal atoms are kept, a
/// variable facing an atom yields the atom, two variables keep the left one.
/// `None` is unification failure.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Option<FeatureStructure> {
    let mut out = a.clone();
    for (k, bv) in &b.entries {
        match out.entries.get(k) {
            None => {
                out.entries.insert(k.clone(), bv.clone());
            }
            Some(av) => match (av, bv) {
                (FeatureValue::Atom(x), FeatureValue::Atom(y)) => {
                    if x != y {
                        return None;
                    }
                }
                (FeatureValue::Var(_), FeatureValue::Atom(_)) => {
                    out.entries.insert(k.clone(), bv.clone());
                }
                _ => {}
            },
        }
    }
    Some(out)
}

/// Collapses a node's top and bottom at the end of a derivation.
pub fn close_node(pair: &TopBottomPair) -> Option<FeatureStructure> {
    unify(&pair.top, &pair.bottom)
}

/// Variable environment shared by all instances inside one derived tree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    map: HashMap<u32, FeatureValue>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn resolve(&self, v: &FeatureValue) -> FeatureValue {
        let mut cur = v.clone();
        while let FeatureValue::Var(n) = cur {
            match self.map.get(&n) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    pub fn extend(&mut self, other: &Bindings, offset: u32) {
        for (k, v) in &other.map {
            let v = match v {
                FeatureValue::Var(n) => FeatureValue::Var(n + offset),
                a => a.clone(),
            };
            self.map.insert(k + offset, v);
        }
    }

    /// Unifies two values, recording any new binding. Returns false on clash.
    pub fn unify_values(&mut self, a: &FeatureValue, b: &FeatureValue) -> bool {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (a, b) {
            (FeatureValue::Atom(x), FeatureValue::Atom(y)) => x == y,
            (FeatureValue::Var(x), FeatureValue::Var(y)) => {
                if x != y {
                    self.map.insert(x, FeatureValue::Var(y));
                }
                true
            }
            (FeatureValue::Var(x), atom) | (atom, FeatureValue::Var(x)) => {
                self.map.insert(x, atom);
                true
            }
        }
    }

    /// Unification under this environment. On failure the environment may hold
    /// partial bindings; callers discard it along with the derivation.
    pub fn unify(
        &mut self,
        a: &FeatureStructure,
        b: &FeatureStructure,
    ) -> Option<FeatureStructure> {
        let mut out = a.clone();
        for (k, bv) in &b.entries {
            match out.entries.get(k).cloned() {
                None => {
                    out.entries.insert(k.clone(), bv.clone());
                }
                Some(av) => {
                    if !self.unify_values(&av, bv) {
                        return None;
                    }
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(pairs: &[(&str, &str)]) -> FeatureStructure {
        FeatureStructure::from_atoms(pairs.iter().copied())
    }

    #[test]
    fn contradictory_atoms_fail() {
        assert_eq!(unify(&fs(&[("inv", "+")]), &fs(&[("inv", "-")])), None);
    }

    #[test]
    fn empty_is_identity() {
        let b = fs(&[("contains-dquote", "+")]);
        assert_eq!(unify(&FeatureStructure::new(), &b), Some(b.clone()));
    }

    #[test]
    fn agreeing_atom_plus_extension() {
        let a = fs(&[("mode", "ind")]);
        let b = fs(&[("mode", "ind"), ("comp", "nil")]);
        assert_eq!(unify(&a, &b), Some(b.clone()));
    }

    #[test]
    fn variable_binds_to_atom() {
        let mut a = FeatureStructure::new();
        a.insert("inv", FeatureValue::Var(0));
        assert_eq!(unify(&a, &fs(&[("inv", "+")])), Some(fs(&[("inv", "+")])));
    }

    #[test]
    fn close_node_cases() {
        let clash = TopBottomPair {
            top: fs(&[("punct-colon", "+")]),
            bottom: fs(&[("punct-colon", "-")]),
        };
        assert_eq!(close_node(&clash), None);
        let ok = TopBottomPair {
            top: FeatureStructure::new(),
            bottom: fs(&[("inv", "+")]),
        };
        assert_eq!(close_node(&ok), Some(fs(&[("inv", "+")])));
        let quote = TopBottomPair {
            top: fs(&[("contains-dquote", "-")]),
            bottom: fs(&[("contains-dquote", "+")]),
        };
        assert_eq!(close_node(&quote), None);
    }

    #[test]
    fn bindings_propagate_through_shared_variable() {
        let mut b = Bindings::new();
        let mut root = FeatureStructure::new();
        root.insert("inv", FeatureValue::Var(1));
        let mut foot = FeatureStructure::new();
        foot.insert("inv", FeatureValue::Var(1));
        assert!(b.unify(&foot, &fs(&[("inv", "-")])).is_some());
        assert_eq!(root.resolved(&b), fs(&[("inv", "-")]));
        assert!(b.unify(&root, &fs(&[("inv", "+")])).is_none());
    }
}
