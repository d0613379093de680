//! Linear atomic constraints `sum_i c_i * pi(A_i) <= c_0` and the semantic
//! postulates that compile into them.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{Baf, Labelling};

/// Default slack allowed by [`satisfies`].
pub const SATISFACTION_TOLERANCE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

impl FromStr for Relation {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "<=" => Ok(Relation::Le),
            "=" => Ok(Relation::Eq),
            ">=" => Ok(Relation::Ge),
            _ => Err(()),
        }
    }
}

/// Sorts terms by argument, sums repeated arguments and drops zero coefficients.
fn merge_terms(terms: &[(usize, f64)]) -> Vec<(usize, f64)> {
    let mut sorted = terms.to_vec();
    sorted.sort_by_key(|&(a, _)| a);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(sorted.len());
    for (a, c) in sorted {
        match out.last_mut() {
            Some((b, acc)) if *b == a => *acc += c,
            _ => out.push((a, c)),
        }
    }
    out.retain(|&(_, c)| c != 0.0);
    out
}

/// A user-level constraint with an arbitrary relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RawConstraint {
    terms: Vec<(usize, f64)>,
    relation: Relation,
    bound: f64,
}

impl RawConstraint {
    /// Terms are given by argument index and merged on construction.
    pub fn new(n: usize, terms: &[(usize, f64)], relation: Relation, bound: f64) -> Result<Self> {
        if let Some(&(a, _)) = terms.iter().find(|&&(a, _)| a >= n) {
            return Err(Error::IndexOutOfRange { index: a, len: n });
        }
        Ok(RawConstraint {
            terms: merge_terms(terms),
            relation,
            bound,
        })
    }

    pub fn from_names<S: AsRef<str>>(
        baf: &Baf,
        terms: &[(S, f64)],
        relation: Relation,
        bound: f64,
    ) -> Result<Self> {
        let resolved = terms
            .iter()
            .map(|(name, c)| Ok((baf.index_of(name.as_ref())?, *c)))
            .collect::<Result<Vec<_>>>()?;
        RawConstraint::new(baf.len(), &resolved, relation, bound)
    }

    /// `pi(a) = value`.
    pub fn assign(n: usize, a: usize, value: f64) -> Result<Self> {
        RawConstraint::new(n, &[(a, 1.0)], Relation::Eq, value)
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn display<'a>(&'a self, baf: &'a Baf) -> impl fmt::Display + 'a {
        TermsDisplay {
            terms: &self.terms,
            relation: self.relation,
            bound: self.bound,
            baf,
        }
    }
}

/// `sum_i c_i * pi(A_i) <= bound`, with merged, non-zero, index-sorted terms.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearAtomicConstraint {
    terms: Vec<(usize, f64)>,
    bound: f64,
}

impl LinearAtomicConstraint {
    pub fn new(n: usize, terms: &[(usize, f64)], bound: f64) -> Result<Self> {
        if let Some(&(a, _)) = terms.iter().find(|&&(a, _)| a >= n) {
            return Err(Error::IndexOutOfRange { index: a, len: n });
        }
        Ok(Self::from_merged(merge_terms(terms), bound))
    }

    fn from_merged(terms: Vec<(usize, f64)>, bound: f64) -> Self {
        // `+ 0.0` turns a negated zero bound into a plain zero.
        LinearAtomicConstraint {
            terms,
            bound: bound + 0.0,
        }
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// `sum_i c_i * x_i` for a dense point.
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(a, c)| c * x[a]).sum()
    }

    fn key(&self) -> (Vec<(usize, u64)>, u64) {
        (
            self.terms.iter().map(|&(a, c)| (a, c.to_bits())).collect(),
            self.bound.to_bits(),
        )
    }

    pub fn display<'a>(&'a self, baf: &'a Baf) -> impl fmt::Display + 'a {
        TermsDisplay {
            terms: &self.terms,
            relation: Relation::Le,
            bound: self.bound,
            baf,
        }
    }
}

/// Rewrites a raw constraint into `<=` form. `>=` flips every sign; `=`
/// becomes the pair (`>=` as `<=`, then `<=`).
pub fn normalize(raw: &RawConstraint) -> Vec<LinearAtomicConstraint> {
    let le = || LinearAtomicConstraint::from_merged(raw.terms.clone(), raw.bound);
    let ge = || {
        LinearAtomicConstraint::from_merged(
            raw.terms.iter().map(|&(a, c)| (a, -c)).collect(),
            -raw.bound,
        )
    };
    match raw.relation {
        Relation::Le => vec![le()],
        Relation::Ge => vec![ge()],
        Relation::Eq => vec![ge(), le()],
    }
}

/// True iff `sum_i c_i * L(A_i) <= c_0 + tol`.
pub fn satisfies(l: &Labelling, c: &LinearAtomicConstraint, tol: f64) -> bool {
    c.lhs(l.values()) <= c.bound + tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemanticsFlag {
    Coh,
    Sfou,
    Fou,
    Sopt,
    Opt,
    Jus,
    Scoh,
    Ssce,
    Sce,
    Spes,
    Pes,
}

impl SemanticsFlag {
    pub const ALL: [SemanticsFlag; 11] = [
        SemanticsFlag::Coh,
        SemanticsFlag::Sfou,
        SemanticsFlag::Fou,
        SemanticsFlag::Sopt,
        SemanticsFlag::Opt,
        SemanticsFlag::Jus,
        SemanticsFlag::Scoh,
        SemanticsFlag::Ssce,
        SemanticsFlag::Sce,
        SemanticsFlag::Spes,
        SemanticsFlag::Pes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemanticsFlag::Coh => "COH",
            SemanticsFlag::Sfou => "SFOU",
            SemanticsFlag::Fou => "FOU",
            SemanticsFlag::Sopt => "SOPT",
            SemanticsFlag::Opt => "OPT",
            SemanticsFlag::Jus => "JUS",
            SemanticsFlag::Scoh => "SCOH",
            SemanticsFlag::Ssce => "SSCE",
            SemanticsFlag::Sce => "SCE",
            SemanticsFlag::Spes => "SPES",
            SemanticsFlag::Pes => "PES",
        }
    }
}

impl fmt::Display for SemanticsFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SemanticsFlag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        SemanticsFlag::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Semantics(SemanticsFlag),
    User,
}

/// An ordered, duplicate-free list of normalized constraints over a framework
/// with a fixed number of arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    num_args: usize,
    constraints: Vec<(LinearAtomicConstraint, Provenance)>,
    seen: HashSet<(Vec<(usize, u64)>, u64)>,
}

impl ConstraintSet {
    pub fn new(num_args: usize) -> Self {
        ConstraintSet {
            num_args,
            constraints: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn num_args(&self) -> usize {
        self.num_args
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Appends `c` unless an identical constraint is already present.
    pub fn push(&mut self, c: LinearAtomicConstraint, provenance: Provenance) -> Result<bool> {
        if let Some(&(a, _)) = c.terms.iter().find(|&&(a, _)| a >= self.num_args) {
            return Err(Error::IndexOutOfRange {
                index: a,
                len: self.num_args,
            });
        }
        if !self.seen.insert(c.key()) {
            return Ok(false);
        }
        self.constraints.push((c, provenance));
        Ok(true)
    }

    /// Normalizes and appends a user constraint.
    pub fn add_raw(&mut self, raw: &RawConstraint) -> Result<()> {
        for c in normalize(raw) {
            self.push(c, Provenance::User)?;
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinearAtomicConstraint> + '_ {
        self.constraints.iter().map(|(c, _)| c)
    }

    pub fn with_provenance(&self) -> &[(LinearAtomicConstraint, Provenance)] {
        &self.constraints
    }

    pub fn get(&self, i: usize) -> &LinearAtomicConstraint {
        &self.constraints[i].0
    }

    pub(crate) fn check_baf(&self, baf: &Baf) -> Result<()> {
        if self.num_args == baf.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: baf.len(),
                found: self.num_args,
            })
        }
    }

    /// True iff `l` satisfies every constraint within `tol`.
    pub fn satisfied_by(&self, l: &Labelling, tol: f64) -> bool {
        self.iter().all(|c| satisfies(l, c, tol))
    }

    /// Largest violation `max(0, lhs - bound)` over all constraints.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        self.iter()
            .map(|c| (c.lhs(x) - c.bound).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// Expands JUS into COH and OPT and orders the flags canonically.
pub fn expand_flags(flags: impl IntoIterator<Item = SemanticsFlag>) -> BTreeSet<SemanticsFlag> {
    let mut out = BTreeSet::new();
    for f in flags {
        if f == SemanticsFlag::Jus {
            out.insert(SemanticsFlag::Coh);
            out.insert(SemanticsFlag::Opt);
        } else {
            out.insert(f);
        }
    }
    out
}

/// Emits the constraints demanded by each semantic postulate over `baf`.
///
/// Incompatible flags (such as FOU with SCE) are accepted; they surface later
/// as unsatisfiability.
pub fn compile_semantics(
    baf: &Baf,
    flags: impl IntoIterator<Item = SemanticsFlag>,
) -> ConstraintSet {
    let n = baf.len();
    let mut set = ConstraintSet::new(n);
    for flag in expand_flags(flags) {
        let mut emit = |terms: Vec<(usize, f64)>, rel: Relation, bound: f64| {
            let raw = RawConstraint {
                terms: merge_terms(&terms),
                relation: rel,
                bound,
            };
            for c in normalize(&raw) {
                set.push(c, Provenance::Semantics(flag))
                    .expect("semantic constraints only use framework arguments");
            }
        };
        match flag {
            SemanticsFlag::Coh => {
                for (a, b) in baf.attacks() {
                    emit(vec![(a, 1.0), (b, 1.0)], Relation::Le, 1.0);
                }
            }
            SemanticsFlag::Scoh => {
                for (a, b) in baf.supports() {
                    emit(vec![(b, 1.0), (a, -1.0)], Relation::Ge, 0.0);
                }
            }
            SemanticsFlag::Sfou | SemanticsFlag::Fou => {
                for a in (0..n).filter(|&a| baf.attackers(a).is_empty()) {
                    if flag == SemanticsFlag::Sfou {
                        emit(vec![(a, 1.0)], Relation::Ge, 0.5);
                    } else {
                        emit(vec![(a, 1.0)], Relation::Eq, 1.0);
                    }
                }
            }
            SemanticsFlag::Ssce | SemanticsFlag::Sce => {
                for a in (0..n).filter(|&a| baf.supporters(a).is_empty()) {
                    if flag == SemanticsFlag::Ssce {
                        emit(vec![(a, 1.0)], Relation::Le, 0.5);
                    } else {
                        emit(vec![(a, 1.0)], Relation::Eq, 0.0);
                    }
                }
            }
            SemanticsFlag::Sopt | SemanticsFlag::Opt => {
                for a in 0..n {
                    let attackers = baf.attackers(a);
                    if flag == SemanticsFlag::Sopt && attackers.is_empty() {
                        continue;
                    }
                    let mut terms = vec![(a, 1.0)];
                    terms.extend(attackers.into_iter().map(|b| (b, 1.0)));
                    emit(terms, Relation::Ge, 1.0);
                }
            }
            SemanticsFlag::Spes | SemanticsFlag::Pes => {
                for a in 0..n {
                    let supporters = baf.supporters(a);
                    if flag == SemanticsFlag::Spes && supporters.is_empty() {
                        continue;
                    }
                    let mut terms = vec![(a, 1.0)];
                    terms.extend(supporters.into_iter().map(|b| (b, -1.0)));
                    emit(terms, Relation::Le, 0.0);
                }
            }
            SemanticsFlag::Jus => unreachable!("expanded above"),
        }
    }
    set
}

struct TermsDisplay<'a> {
    terms: &'a [(usize, f64)],
    relation: Relation,
    bound: f64,
    baf: &'a Baf,
}

impl fmt::Display for TermsDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, &(a, c)) in self.terms.iter().enumerate() {
            match (i, c < 0.0) {
                (0, _) => write!(f, "{c}*{}", self.baf.name(a))?,
                (_, false) => write!(f, " + {c}*{}", self.baf.name(a))?,
                (_, true) => write!(f, " - {}*{}", -c, self.baf.name(a))?,
            }
        }
        write!(f, " {} {}", self.relation.symbol(), self.bound)
    }
}
