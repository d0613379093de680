use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Name of an argument. Names are non-empty identifiers
/// (`[A-Za-z_][A-Za-z0-9_]*`) and order lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Argument(String);

impl Argument {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Argument(name))
        } else {
            Err(Error::InvalidName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Argument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A bipolar argumentation framework: arguments with attack and support edges.
///
/// Arguments are kept in canonical (name-sorted) order; every index handed out
/// by this type refers to that order. Edges are sets of `(source, target)`
/// index pairs, so duplicates collapse. Self-loops and an attack parallel to a
/// support are both allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Baf {
    args: Vec<Argument>,
    attacks: BTreeSet<(usize, usize)>,
    supports: BTreeSet<(usize, usize)>,
}

impl Baf {
    /// Builds a framework from argument names and edges given by name.
    pub fn new<S: AsRef<str>>(
        args: impl IntoIterator<Item = S>,
        attacks: impl IntoIterator<Item = (S, S)>,
        supports: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self> {
        let mut names = Vec::new();
        for a in args {
            names.push(Argument::new(a.as_ref())?);
        }
        names.sort();
        for pair in names.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateArgument(pair[0].to_string()));
            }
        }
        let mut baf = Baf {
            args: names,
            attacks: BTreeSet::new(),
            supports: BTreeSet::new(),
        };
        for (s, t) in attacks {
            let e = (baf.index_of(s.as_ref())?, baf.index_of(t.as_ref())?);
            baf.attacks.insert(e);
        }
        for (s, t) in supports {
            let e = (baf.index_of(s.as_ref())?, baf.index_of(t.as_ref())?);
            baf.supports.insert(e);
        }
        Ok(baf)
    }

    /// Builds a framework from already-resolved indices. `args` must be sorted
    /// and duplicate-free.
    pub(crate) fn from_parts(
        args: Vec<Argument>,
        attacks: BTreeSet<(usize, usize)>,
        supports: BTreeSet<(usize, usize)>,
    ) -> Self {
        debug_assert!(args.windows(2).all(|w| w[0] < w[1]));
        Baf {
            args,
            attacks,
            supports,
        }
    }

    pub fn len(&self) -> usize {
        self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.args.is_empty()
    }

    pub fn args(&self) -> &[Argument] {
        &self.args
    }

    pub fn name(&self, index: usize) -> &str {
        self.args[index].as_str()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.args
            .binary_search_by(|a| a.as_str().cmp(name))
            .map_err(|_| Error::UnknownArgument(name.to_string()))
    }

    pub fn attacks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.attacks.iter().copied()
    }

    pub fn supports(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.supports.iter().copied()
    }

    pub fn num_attacks(&self) -> usize {
        self.attacks.len()
    }

    pub fn num_supports(&self) -> usize {
        self.supports.len()
    }

    /// Att(a): the attackers of `a`, in index order.
    pub fn attackers(&self, a: usize) -> Vec<usize> {
        self.attacks
            .iter()
            .filter(|&&(_, t)| t == a)
            .map(|&(s, _)| s)
            .collect()
    }

    /// Sup(a): the supporters of `a`, in index order.
    pub fn supporters(&self, a: usize) -> Vec<usize> {
        self.supports
            .iter()
            .filter(|&&(_, t)| t == a)
            .map(|&(s, _)| s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixed_four() -> Baf {
        Baf::new(
            ["D", "C", "B", "A"],
            [("A", "B"), ("B", "A"), ("D", "B")],
            [("C", "A"), ("D", "C")],
        )
        .unwrap()
    }

    #[test]
    fn canonical_order_is_by_name() {
        let baf = mixed_four();
        let names: Vec<_> = baf.args().iter().map(|a| a.as_str()).collect();
        assert_eq!(names, ["A", "B", "C", "D"]);
        assert_eq!(baf.index_of("C").unwrap(), 2);
    }

    #[test]
    fn attackers_and_supporters() {
        let baf = mixed_four();
        assert_eq!(baf.attackers(1), vec![0, 3]);
        assert!(baf.attackers(2).is_empty());
        assert_eq!(baf.supporters(0), vec![2]);
        assert!(baf.supporters(3).is_empty());
    }

    #[test]
    fn duplicate_edges_collapse() {
        let baf = Baf::new(["A", "B"], [("A", "B"), ("A", "B")], [("A", "B")]).unwrap();
        assert_eq!(baf.num_attacks(), 1);
        assert_eq!(baf.num_supports(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Baf::new(["A", "A"], [], []),
            Err(Error::DuplicateArgument(_))
        ));
        assert!(matches!(
            Baf::new(["A"], [("A", "X")], []),
            Err(Error::UnknownArgument(n)) if n == "X"
        ));
        assert!(matches!(
            Baf::new(["1A"], Vec::<(&str, &str)>::new(), []),
            Err(Error::InvalidName(_))
        ));
    }

    #[test]
    fn self_loops_are_permitted() {
        let baf = Baf::new(["A"], [("A", "A")], [("A", "A")]).unwrap();
        assert_eq!(baf.attackers(0), vec![0]);
    }
}
