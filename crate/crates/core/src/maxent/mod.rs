//! Maximum-entropy labellings and the queries they answer.
//!
//! The entropy of a labelling equals the entropy of its factorized world
//! distribution, so maximizing over labellings subject to atomic constraints
//! picks out the maximum-entropy probability function as well.

pub(crate) mod dual;
mod frank_wolfe;

use std::fmt;

use crate::constraints::{ConstraintSet, RawConstraint};
use crate::error::{Error, Result};
use crate::model::info::entropy_labelling;
use crate::model::{Baf, Formula, Labelling, World};
use crate::reasoner::{entail_indexed, feasible_region, solve_sat};
use crate::lp::LpProblem;
use dual::{dual_newton, Softplus};
use frank_wolfe::{maximize, BinaryEntropy};

/// Entailment intervals narrower than this pin their coordinate.
pub const FIXED_WIDTH: f64 = 1e-9;

/// Default cap on distinct arguments in [`exclusive_dnf_query`].
pub const DEFAULT_DNF_LIMIT: usize = 20;

/// Constraint slack tolerated in a caller-supplied starting labelling.
const START_TOLERANCE: f64 = 1e-6;

const NEWTON_TOLERANCE: f64 = 1e-12;
const NEWTON_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntConfig {
    /// Stop once the Frank-Wolfe gap is at most this.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Feasible labelling to start Frank-Wolfe from instead of the dual
    /// Newton estimate.
    pub initial: Option<Labelling>,
}

impl Default for MaxEntConfig {
    fn default() -> Self {
        MaxEntConfig {
            tolerance: 1e-8,
            max_iterations: 10_000,
            initial: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntResult {
    pub labelling: Labelling,
    pub entropy: f64,
    pub iterations: usize,
    /// Frank-Wolfe gap at `labelling`; an upper bound on the entropy shortfall.
    pub gap: f64,
    pub converged: bool,
}

/// The maximum-entropy labelling under `cs`, with default settings.
pub fn maxent_labelling(cs: &ConstraintSet, baf: &Baf) -> Result<MaxEntResult> {
    maxent_labelling_with(cs, baf, &MaxEntConfig::default())
}

/// The maximum-entropy labelling under `cs`.
///
/// Coordinates pinned by entailment are fixed first. A dual Newton solve
/// estimates the rest, and pairwise Frank-Wolfe certifies the estimate by its
/// gap, continuing from it when the gap is still above the tolerance.
///
/// Fails with [`Error::Unsatisfiable`] if no labelling satisfies `cs`, and with
/// [`Error::NotConverged`] (carrying the best iterate) when the iteration cap
/// is reached first.
pub fn maxent_labelling_with(
    cs: &ConstraintSet,
    baf: &Baf,
    config: &MaxEntConfig,
) -> Result<MaxEntResult> {
    cs.check_baf(baf)?;
    let n = cs.num_args();
    let e = entail_indexed(cs)?;
    let mut region = feasible_region(cs, &e.slacks);

    let mut fixed = Vec::new();
    for (k, b) in e.bounds.iter().enumerate() {
        if b.width() <= FIXED_WIDTH {
            let mut v = 0.5 * (b.lower + b.upper);
            if v <= FIXED_WIDTH {
                v = 0.0;
            } else if v >= 1.0 - FIXED_WIDTH {
                v = 1.0;
            }
            region.set_bounds(k, v, v);
            fixed.push((k, v));
        }
    }
    let pin = |mut x: Vec<f64>| {
        for &(k, v) in &fixed {
            x[k] = v;
        }
        x
    };

    let (start, newton_iterations) = match &config.initial {
        Some(l) => {
            l.check_len(n)?;
            if cs.max_violation(l.values()) > START_TOLERANCE {
                return Err(Error::InvalidLabelling(
                    "starting labelling violates the constraints".into(),
                ));
            }
            (vec![pin(l.values().to_vec())], 0)
        }
        None => {
            let (x, iterations) = newton_start(&region, &fixed);
            (vec![x], iterations)
        }
    };

    let out = maximize(
        &BinaryEntropy,
        &region,
        start,
        config.tolerance,
        config.max_iterations,
    )?;
    let labelling = Labelling::from_noisy(out.x);
    let result = MaxEntResult {
        entropy: entropy_labelling(&labelling),
        labelling,
        iterations: newton_iterations + out.iterations,
        gap: out.gap,
        converged: out.converged,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NotConverged(Box::new(result)))
    }
}

/// Dual Newton estimate of the maximizer over `region`, with the `fixed`
/// coordinates held at their values.
fn newton_start(region: &LpProblem, fixed: &[(usize, f64)]) -> (Vec<f64>, usize) {
    let n = region.num_vars();
    let mut slot = vec![None; n];
    let mut free = Vec::new();
    for (k, s) in slot.iter_mut().enumerate() {
        if !fixed.iter().any(|&(j, _)| j == k) {
            *s = Some(free.len());
            free.push(k);
        }
    }
    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    for row in &region.rows {
        let mut a = vec![0.0; free.len()];
        let mut bound = row.bound;
        for &(k, c) in &row.terms {
            match slot[k] {
                Some(i) => a[i] += c,
                None => bound -= c * region.lower[k],
            }
        }
        if a.iter().any(|c| *c != 0.0) {
            rows.push(a);
            bounds.push(bound);
        }
    }
    // Presolve may have moved row information into the box.
    for (i, &k) in free.iter().enumerate() {
        let mut unit = vec![0.0; free.len()];
        if region.lower[k] > 0.0 {
            unit[i] = -1.0;
            rows.push(unit.clone());
            bounds.push(-region.lower[k]);
        }
        if region.upper[k] < 1.0 {
            unit[i] = 1.0;
            rows.push(unit);
            bounds.push(region.upper[k]);
        }
    }
    let out = dual_newton(
        &Softplus,
        &rows,
        &bounds,
        free.len(),
        NEWTON_TOLERANCE,
        NEWTON_ITERATIONS,
    );
    let mut x: Vec<f64> = region.lower.clone();
    for (&k, &v) in free.iter().zip(&out.y) {
        x[k] = v.clamp(region.lower[k], region.upper[k]);
    }
    (x, out.iterations)
}

/// A conjunction of literals `A` or `!A`, each argument at most once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConjunctiveQuery {
    literals: Vec<(usize, bool)>,
}

impl ConjunctiveQuery {
    pub fn empty() -> Self {
        ConjunctiveQuery::default()
    }

    /// Literals as `(argument index, polarity)`; `true` means the argument is
    /// accepted.
    pub fn new(baf: &Baf, literals: impl IntoIterator<Item = (usize, bool)>) -> Result<Self> {
        let mut lits: Vec<(usize, bool)> = Vec::new();
        for (a, b) in literals {
            if a >= baf.len() {
                return Err(Error::IndexOutOfRange {
                    index: a,
                    len: baf.len(),
                });
            }
            if lits.iter().any(|&(x, _)| x == a) {
                return Err(Error::DuplicateLiteral(baf.name(a).to_string()));
            }
            lits.push((a, b));
        }
        lits.sort_unstable();
        Ok(ConjunctiveQuery { literals: lits })
    }

    pub fn from_names<S: AsRef<str>>(
        baf: &Baf,
        literals: impl IntoIterator<Item = (S, bool)>,
    ) -> Result<Self> {
        let lits = literals
            .into_iter()
            .map(|(s, b)| Ok((baf.index_of(s.as_ref())?, b)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(baf, lits)
    }

    /// Parses `A & !B & C`; `~` also negates. Blank text is the empty
    /// conjunction.
    pub fn parse(baf: &Baf, text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(Self::empty());
        }
        let mut lits = Vec::new();
        for part in text.split('&') {
            let part = part.trim();
            let (name, positive) = match part.strip_prefix(['!', '~']) {
                Some(rest) => (rest.trim_start(), false),
                None => (part, true),
            };
            if name.is_empty() {
                return Err(Error::InvalidQuery(format!("empty literal in `{text}`")));
            }
            if !crate::model::is_identifier(name) {
                return Err(Error::InvalidQuery(format!("`{part}` is not a literal")));
            }
            lits.push((baf.index_of(name)?, positive));
        }
        Self::new(baf, lits)
    }

    pub fn literals(&self) -> &[(usize, bool)] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// True when every literal is positive.
    pub fn is_positive(&self) -> bool {
        self.literals.iter().all(|&(_, b)| b)
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.literals.iter().map(|&(a, b)| {
            if b {
                Formula::Atom(a)
            } else {
                Formula::not(Formula::Atom(a))
            }
        }))
    }

    pub fn display<'a>(&'a self, baf: &'a Baf) -> impl fmt::Display + 'a {
        QueryDisplay { q: self, baf }
    }
}

struct QueryDisplay<'a> {
    q: &'a ConjunctiveQuery,
    baf: &'a Baf,
}

impl fmt::Display for QueryDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(a, b)) in self.q.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            if !b {
                f.write_str("!")?;
            }
            f.write_str(self.baf.name(a))?;
        }
        Ok(())
    }
}

/// Probability of `q` under the factorized distribution of `l`.
pub fn conjunctive_query(l: &Labelling, q: &ConjunctiveQuery) -> Result<f64> {
    let mut p = 1.0;
    for &(a, b) in q.literals() {
        if a >= l.len() {
            return Err(Error::IndexOutOfRange {
                index: a,
                len: l.len(),
            });
        }
        p *= if b { l.get(a) } else { 1.0 - l.get(a) };
    }
    Ok(p)
}

/// Probability of `f` under the factorized distribution of `l`, by summing
/// the complete sign patterns over the arguments of `f` that satisfy it.
/// Refuses formulas over more than `limit` distinct arguments.
pub fn exclusive_dnf_query(l: &Labelling, f: &Formula, limit: usize) -> Result<f64> {
    f.check_arity(l.len())?;
    let atoms: Vec<usize> = f.atoms().into_iter().collect();
    let k = atoms.len();
    if k > limit.min(crate::model::MAX_WORLD_ARGS) {
        return Err(Error::TooManyArguments {
            what: "exclusive DNF expansion",
            n: k,
            limit,
        });
    }
    let mut total = 0.0;
    for pattern in 0u32..(1u32 << k) {
        let mut world = 0u32;
        let mut p = 1.0;
        for (bit, &a) in atoms.iter().enumerate() {
            if (pattern >> bit) & 1 == 1 {
                world |= 1 << a;
                p *= l.get(a);
            } else {
                p *= 1.0 - l.get(a);
            }
        }
        if p > 0.0 && f.eval(World(world)) {
            total += p;
        }
    }
    Ok(total.min(1.0))
}

/// `P*(target | condition)` computed by adding `π(A) = 1` for every argument
/// of the (all-positive) condition and re-solving for the maximum-entropy
/// labelling.
pub fn conditional_query(
    cs: &ConstraintSet,
    baf: &Baf,
    condition: &ConjunctiveQuery,
    target: &ConjunctiveQuery,
) -> Result<f64> {
    conditional_query_with(cs, baf, condition, target, &MaxEntConfig::default())
}

pub fn conditional_query_with(
    cs: &ConstraintSet,
    baf: &Baf,
    condition: &ConjunctiveQuery,
    target: &ConjunctiveQuery,
    config: &MaxEntConfig,
) -> Result<f64> {
    cs.check_baf(baf)?;
    if !condition.is_positive() {
        return Err(Error::InvalidQuery(
            "conditions may only contain positive literals".into(),
        ));
    }
    let base = solve_sat(cs)?.result;
    if !base.satisfiable {
        return Err(Error::Unsatisfiable {
            value: base.inconsistency_value,
        });
    }
    let n = cs.num_args();
    let mut augmented = cs.clone();
    for &(a, _) in condition.literals() {
        augmented.add_raw(&RawConstraint::assign(n, a, 1.0)?)?;
    }
    let sat = solve_sat(&augmented)?.result;
    if !sat.satisfiable {
        return Err(Error::ConditionInconsistent {
            value: sat.inconsistency_value,
        });
    }
    let m = maxent_labelling_with(&augmented, baf, config)?;
    conjunctive_query(&m.labelling, target)
}
