//! Satisfiability and entailment for linear atomic constraints, solved as
//! linear programs over labellings (one variable per argument).

use std::collections::BTreeMap;

use crate::constraints::ConstraintSet;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpProblem, LpStatus, Sense};
use crate::model::{Argument, Baf, Labelling};

/// Inconsistency values at or below this count as satisfiable.
pub const SAT_TOLERANCE: f64 = 1e-7;

/// A coordinate within this of a box bound counts as touching it.
const HIT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SatResult {
    pub satisfiable: bool,
    /// Minimum total slack needed to satisfy every constraint.
    pub inconsistency_value: f64,
    /// A satisfying labelling, present iff `satisfiable`.
    pub witness: Option<Labelling>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntailmentBounds {
    pub lower: f64,
    pub upper: f64,
}

impl EntailmentBounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        let lower = lower.clamp(0.0, 1.0);
        let upper = upper.clamp(0.0, 1.0);
        if lower > upper {
            // Only reachable through rounding noise.
            let mid = 0.5 * (lower + upper);
            EntailmentBounds {
                lower: mid,
                upper: mid,
            }
        } else {
            EntailmentBounds { lower, upper }
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Outcome of the slack-minimizing program.
pub(crate) struct SatSolve {
    pub result: SatResult,
    /// Optimal slack per constraint.
    pub slacks: Vec<f64>,
    /// Labelling part of the optimum (always present, even when unsatisfiable).
    pub point: Vec<f64>,
}

/// `min sum_j s_j` s.t. `sum_i c_ij x_i <= c_0j + s_j`, `x in [0,1]^n`, `s >= 0`.
pub(crate) fn solve_sat(cs: &ConstraintSet) -> Result<SatSolve> {
    let n = cs.num_args();
    let m = cs.len();
    let mut p = LpProblem::new(n + m, Sense::Minimize);
    for i in 0..n {
        p.set_bounds(i, 0.0, 1.0);
    }
    for (j, c) in cs.iter().enumerate() {
        p.objective[n + j] = 1.0;
        let mut terms = c.terms().to_vec();
        terms.push((n + j, -1.0));
        p.add_row(terms, c.bound());
    }
    let sol = solve_lp(&p)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(sol.status));
    }
    let value = sol.objective_value.max(0.0);
    let satisfiable = value <= SAT_TOLERANCE;
    let point = sol.x[..n].to_vec();
    let witness = satisfiable.then(|| Labelling::from_noisy(point.clone()));
    Ok(SatSolve {
        result: SatResult {
            satisfiable,
            inconsistency_value: value,
            witness,
        },
        slacks: sol.x[n..].to_vec(),
        point,
    })
}

/// Decides whether some labelling satisfies `cs` and reports the
/// inconsistency value (zero iff satisfiable).
pub fn check_sat(cs: &ConstraintSet, baf: &Baf) -> Result<SatResult> {
    cs.check_baf(baf)?;
    Ok(solve_sat(cs)?.result)
}

/// The feasible labelling polytope, with each constraint loosened by its
/// optimal slack so that tiny residual inconsistencies never make it empty.
/// The box is tightened to the bounds the rows imply.
pub(crate) fn feasible_region(cs: &ConstraintSet, slacks: &[f64]) -> LpProblem {
    let n = cs.num_args();
    let mut p = LpProblem::new(n, Sense::Minimize);
    for i in 0..n {
        p.set_bounds(i, 0.0, 1.0);
    }
    for (c, s) in cs.iter().zip(slacks) {
        p.add_row(c.terms().to_vec(), c.bound() + s);
    }
    p.presolve();
    p
}

fn optimize(region: &mut LpProblem, weights: &[(usize, f64)], sense: Sense) -> Result<Vec<f64>> {
    region.objective.iter_mut().for_each(|c| *c = 0.0);
    for &(k, w) in weights {
        region.objective[k] = w;
    }
    region.sense = sense;
    let sol = solve_lp(region)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(sol.status));
    }
    Ok(sol.x)
}

/// Bounds for every coordinate of `region`, given one feasible point.
///
/// The box of `region` holds valid outer bounds, so a feasible point touching
/// one of them proves it tight. Every solved program is harvested for such
/// contacts, and aggregate programs over all unresolved coordinates run
/// before falling back to one program per coordinate.
pub(crate) fn bound_all(
    region: &LpProblem,
    seed: &[f64],
) -> Result<Vec<EntailmentBounds>> {
    let n = region.num_vars();
    let mut region = region.clone();
    let lo = region.lower.clone();
    let hi = region.upper.clone();
    // settled[0] for lower bounds, settled[1] for upper bounds.
    let mut settled: [Vec<Option<f64>>; 2] = [vec![None; n], vec![None; n]];

    let harvest = |x: &[f64], settled: &mut [Vec<Option<f64>>; 2]| {
        for (k, &v) in x.iter().enumerate() {
            if v <= lo[k] + HIT_TOLERANCE {
                settled[0][k].get_or_insert(lo[k]);
            }
            if v >= hi[k] - HIT_TOLERANCE {
                settled[1][k].get_or_insert(hi[k]);
            }
        }
    };

    harvest(seed, &mut settled);

    for (side, sense) in [Sense::Minimize, Sense::Maximize].into_iter().enumerate() {
        let open = |settled: &[Vec<Option<f64>>; 2]| -> Vec<usize> {
            (0..n).filter(|&k| settled[side][k].is_none()).collect()
        };
        loop {
            let pending = open(&settled);
            if pending.len() < 2 {
                break;
            }
            let weights: Vec<_> = pending.iter().map(|&k| (k, 1.0)).collect();
            let x = optimize(&mut region, &weights, sense)?;
            harvest(&x, &mut settled);
            if open(&settled).len() == pending.len() {
                break;
            }
        }
        for k in open(&settled) {
            if settled[side][k].is_some() {
                continue;
            }
            let x = optimize(&mut region, &[(k, 1.0)], sense)?;
            let v = x[k];
            harvest(&x, &mut settled);
            settled[side][k].get_or_insert(v);
        }
    }

    let bounds = (0..n)
        .map(|k| EntailmentBounds::new(settled[0][k].unwrap(), settled[1][k].unwrap()))
        .collect();
    Ok(bounds)
}

/// Everything the maximum-entropy solver needs from a satisfiable set.
pub(crate) struct Entailment {
    pub slacks: Vec<f64>,
    pub bounds: Vec<EntailmentBounds>,
}

pub(crate) fn entail_indexed(cs: &ConstraintSet) -> Result<Entailment> {
    let sat = solve_sat(cs)?;
    if !sat.result.satisfiable {
        return Err(Error::Unsatisfiable {
            value: sat.result.inconsistency_value,
        });
    }
    let region = feasible_region(cs, &sat.slacks);
    let bounds = bound_all(&region, &sat.point)?;
    Ok(Entailment {
        slacks: sat.slacks,
        bounds,
    })
}

/// Lower and upper bounds on the probability of argument `a` over all
/// labellings satisfying `cs`. Fails with [`Error::Unsatisfiable`] when there
/// are none.
pub fn entail(cs: &ConstraintSet, baf: &Baf, a: &str) -> Result<EntailmentBounds> {
    cs.check_baf(baf)?;
    let k = baf.index_of(a)?;
    let sat = solve_sat(cs)?;
    if !sat.result.satisfiable {
        return Err(Error::Unsatisfiable {
            value: sat.result.inconsistency_value,
        });
    }
    let mut region = feasible_region(cs, &sat.slacks);
    let lo = optimize(&mut region, &[(k, 1.0)], Sense::Minimize)?[k];
    let hi = optimize(&mut region, &[(k, 1.0)], Sense::Maximize)?[k];
    Ok(EntailmentBounds::new(lo, hi))
}

/// [`entail`] for every argument, keyed by argument.
pub fn entail_all(cs: &ConstraintSet, baf: &Baf) -> Result<BTreeMap<Argument, EntailmentBounds>> {
    cs.check_baf(baf)?;
    let e = entail_indexed(cs)?;
    Ok(baf.args().iter().cloned().zip(e.bounds).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{compile_semantics, RawConstraint, SemanticsFlag::*};

    fn mixed_four() -> Baf {
        Baf::new(
            ["A", "B", "C", "D"],
            [("A", "B"), ("B", "A"), ("D", "B")],
            [("C", "A"), ("D", "C")],
        )
        .unwrap()
    }

    fn close(b: EntailmentBounds, lo: f64, hi: f64) -> bool {
        (b.lower - lo).abs() < 1e-9 && (b.upper - hi).abs() < 1e-9
    }

    #[test]
    fn support_pins_attacked() {
        let baf = mixed_four();
        let cs = compile_semantics(&baf, [Coh, Fou]);
        let sat = check_sat(&cs, &baf).unwrap();
        assert!(sat.satisfiable);
        assert!(sat.inconsistency_value.abs() < 1e-12);
        let w = sat.witness.unwrap();
        assert!((w.get(2) - 1.0).abs() < 1e-9 && (w.get(3) - 1.0).abs() < 1e-9);
        assert!(w.get(1).abs() < 1e-9);
        assert!(close(entail(&cs, &baf, "B").unwrap(), 0.0, 0.0));
        let all = entail_all(&cs, &baf).unwrap();
        let get = |s: &str| all[&Argument::new(s).unwrap()];
        assert!(close(get("A"), 0.0, 1.0));
        assert!(close(get("B"), 0.0, 0.0));
        assert!(close(get("C"), 1.0, 1.0));
        assert!(close(get("D"), 1.0, 1.0));
    }

    #[test]
    fn support_coherence_pins_a() {
        let baf = mixed_four();
        let cs = compile_semantics(&baf, [Coh, Fou, Scoh]);
        assert!(close(entail(&cs, &baf, "A").unwrap(), 1.0, 1.0));
        let all = entail_all(&cs, &baf).unwrap();
        for (a, b) in &all {
            let v = if a.as_str() == "B" { 0.0 } else { 1.0 };
            assert!(close(*b, v, v), "{a}: {b:?}");
        }
    }

    #[test]
    fn contradictory_assignment_has_unit_inconsistency() {
        let baf = Baf::new(["A"], [], []).unwrap();
        let mut cs = ConstraintSet::new(1);
        cs.add_raw(&RawConstraint::assign(1, 0, 1.0).unwrap()).unwrap();
        cs.add_raw(&RawConstraint::assign(1, 0, 0.0).unwrap()).unwrap();
        let sat = check_sat(&cs, &baf).unwrap();
        assert!(!sat.satisfiable);
        assert!((sat.inconsistency_value - 1.0).abs() < 1e-12);
        assert!(sat.witness.is_none());
        assert!(matches!(
            entail(&cs, &baf, "A"),
            Err(Error::Unsatisfiable { .. })
        ));
    }

    #[test]
    fn coherence_with_assignment_bounds_b() {
        let baf = Baf::new(["A", "B"], [("A", "B")], []).unwrap();
        let mut cs = compile_semantics(&baf, [Coh]);
        cs.add_raw(&RawConstraint::assign(2, 0, 0.8).unwrap()).unwrap();
        assert!(close(entail(&cs, &baf, "B").unwrap(), 0.0, 0.2));
    }

    #[test]
    fn unconstrained_is_unit_interval() {
        let baf = mixed_four();
        let cs = ConstraintSet::new(4);
        let sat = check_sat(&cs, &baf).unwrap();
        assert!(sat.satisfiable && sat.inconsistency_value == 0.0);
        for b in entail_all(&cs, &baf).unwrap().values() {
            assert!(close(*b, 0.0, 1.0));
        }
    }

    #[test]
    fn mismatched_framework() {
        let baf = mixed_four();
        let cs = ConstraintSet::new(3);
        assert!(matches!(
            check_sat(&cs, &baf),
            Err(Error::DimensionMismatch { .. })
        ));
        let ok = ConstraintSet::new(4);
        assert!(matches!(
            entail(&ok, &baf, "Z"),
            Err(Error::UnknownArgument(_))
        ));
    }
}
