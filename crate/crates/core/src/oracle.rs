//! Brute-force reference implementations over all `2^n` possible worlds, plus
//! seeded random instance generators for cross-checking.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{compile_semantics, ConstraintSet, RawConstraint, Relation, SemanticsFlag};
use crate::error::{Error, Result};
use crate::info::entropy_distribution;
use crate::lp::{solve_lp, LpProblem, LpStatus, Sense};
use crate::maxent::dual::{dual_newton, LogSumExp};
use crate::maxent::MaxEntResult;
use crate::model::{check_world_limit, Argument, Baf, Formula, Labelling, World, WorldDistribution};
use crate::reasoner::{EntailmentBounds, SatResult, SAT_TOLERANCE};

/// World probabilities at or below this count as zero.
const ZERO_MASS: f64 = 1e-9;

/// Dual solutions only reach a zero mass in the limit. Masses below the float
/// spacing near 1 cannot show up in any marginal and are flushed to zero.
const NEGLIGIBLE_MASS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Argument limit for the world LPs.
    pub lp_limit: usize,
    /// Argument limit for world-space maximum entropy.
    pub maxent_limit: usize,
    /// Newton iteration cap for world maximum entropy.
    pub max_iterations: usize,
    /// Constraint violation and duality gap at which world maximum entropy stops.
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            lp_limit: 16,
            maxent_limit: 8,
            max_iterations: 500,
            tolerance: 1e-10,
        }
    }
}

/// Row `sum_w (sum_{A in w} c_A) P(w)` for each constraint, plus the
/// normalization pair, over `2^n` variables boxed in `[0, 1]`.
fn world_region(cs: &ConstraintSet, extra_vars: usize) -> LpProblem {
    let n = cs.num_args();
    let worlds = 1usize << n;
    let mut p = LpProblem::new(worlds + extra_vars, Sense::Minimize);
    for w in 0..worlds {
        p.set_bounds(w, 0.0, 1.0);
    }
    p.add_row((0..worlds).map(|w| (w, 1.0)).collect(), 1.0);
    p.add_row((0..worlds).map(|w| (w, -1.0)).collect(), -1.0);
    for c in cs.iter() {
        let terms = (0..worlds)
            .filter_map(|w| {
                let v: f64 = c
                    .terms()
                    .iter()
                    .filter(|&&(a, _)| World(w as u32).contains(a))
                    .map(|&(_, k)| k)
                    .sum();
                (v != 0.0).then_some((w, v))
            })
            .collect();
        p.add_row(terms, c.bound());
    }
    p
}

struct WorldSat {
    result: SatResult,
    slacks: Vec<f64>,
    point: Vec<f64>,
}

fn solve_world_sat(cs: &ConstraintSet) -> Result<WorldSat> {
    let n = cs.num_args();
    let worlds = 1usize << n;
    let m = cs.len();
    let mut p = world_region(cs, m);
    for j in 0..m {
        p.objective[worlds + j] = 1.0;
        p.rows[2 + j].terms.push((worlds + j, -1.0));
    }
    let sol = solve_lp(&p)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::SolverFailure(sol.status));
    }
    let value = sol.objective_value.max(0.0);
    let satisfiable = value <= SAT_TOLERANCE;
    let point = sol.x[..worlds].to_vec();
    let witness = satisfiable.then(|| WorldDistribution::from_noisy(n, point.clone()).labelling());
    Ok(WorldSat {
        result: SatResult {
            satisfiable,
            inconsistency_value: value,
            witness,
        },
        slacks: sol.x[worlds..].to_vec(),
        point,
    })
}

fn relaxed_world_region(cs: &ConstraintSet, slacks: &[f64]) -> LpProblem {
    let mut p = world_region(cs, 0);
    for (row, s) in p.rows[2..].iter_mut().zip(slacks) {
        row.bound += s;
    }
    p
}

fn satisfiable_region(cs: &ConstraintSet) -> Result<(LpProblem, Vec<f64>)> {
    let sat = solve_world_sat(cs)?;
    if !sat.result.satisfiable {
        return Err(Error::Unsatisfiable {
            value: sat.result.inconsistency_value,
        });
    }
    Ok((relaxed_world_region(cs, &sat.slacks), sat.point))
}

/// Satisfiability by slack minimization over world probabilities. The
/// witness is the marginal labelling of the optimal distribution.
pub fn world_lp_sat(cs: &ConstraintSet, baf: &Baf) -> Result<SatResult> {
    world_lp_sat_with(cs, baf, &OracleConfig::default())
}

pub fn world_lp_sat_with(cs: &ConstraintSet, baf: &Baf, cfg: &OracleConfig) -> Result<SatResult> {
    cs.check_baf(baf)?;
    check_world_limit("the world LP", cs.num_args(), cfg.lp_limit)?;
    Ok(solve_world_sat(cs)?.result)
}

/// Bounds on the probability of `f` over every world distribution that
/// satisfies `cs`.
pub fn world_lp_entail(cs: &ConstraintSet, baf: &Baf, f: &Formula) -> Result<EntailmentBounds> {
    world_lp_entail_with(cs, baf, f, &OracleConfig::default())
}

pub fn world_lp_entail_with(
    cs: &ConstraintSet,
    baf: &Baf,
    f: &Formula,
    cfg: &OracleConfig,
) -> Result<EntailmentBounds> {
    cs.check_baf(baf)?;
    let n = cs.num_args();
    check_world_limit("the world LP", n, cfg.lp_limit)?;
    f.check_arity(n)?;
    let (mut region, _) = satisfiable_region(cs)?;
    for (w, c) in region.objective.iter_mut().enumerate() {
        *c = if f.eval(World(w as u32)) { 1.0 } else { 0.0 };
    }
    let mut extreme = |sense| -> Result<f64> {
        region.sense = sense;
        let sol = solve_lp(&region)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::SolverFailure(sol.status));
        }
        Ok(sol.objective_value)
    };
    let lo = extreme(Sense::Minimize)?;
    let hi = extreme(Sense::Maximize)?;
    Ok(EntailmentBounds::new(lo, hi))
}

/// The maximum-entropy distribution over worlds subject to `cs`.
pub fn world_maxent(cs: &ConstraintSet, baf: &Baf) -> Result<WorldDistribution> {
    world_maxent_with(cs, baf, &OracleConfig::default())
}

pub fn world_maxent_with(
    cs: &ConstraintSet,
    baf: &Baf,
    cfg: &OracleConfig,
) -> Result<WorldDistribution> {
    cs.check_baf(baf)?;
    let n = cs.num_args();
    check_world_limit("world maximum entropy", n, cfg.maxent_limit)?;
    let worlds = 1usize << n;
    let (mut region, sat_point) = satisfiable_region(cs)?;

    // A world is free once some feasible distribution gives it mass; the
    // rest are forced to zero.
    let mut free = vec![false; worlds];
    let mark = |x: &[f64], free: &mut [bool]| {
        for (w, &p) in x.iter().enumerate() {
            if p > ZERO_MASS {
                free[w] = true;
            }
        }
    };
    mark(&sat_point, &mut free);
    region.sense = Sense::Maximize;
    loop {
        if free.iter().all(|&f| f) {
            break;
        }
        for (w, c) in region.objective.iter_mut().enumerate() {
            *c = if free[w] { 0.0 } else { 1.0 };
        }
        let sol = solve_lp(&region)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::SolverFailure(sol.status));
        }
        if sol.objective_value <= ZERO_MASS {
            break;
        }
        mark(&sol.x, &mut free);
    }
    let free_worlds: Vec<usize> = (0..worlds).filter(|&w| free[w]).collect();
    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    for row in &region.rows[2..] {
        let mut dense = vec![0.0; worlds];
        for &(w, c) in &row.terms {
            dense[w] += c;
        }
        let a: Vec<f64> = free_worlds.iter().map(|&w| dense[w]).collect();
        // Rows without support on the free worlds are constants, already
        // satisfied by feasibility.
        if a.iter().any(|c| c.abs() > 1e-15) {
            rows.push(a);
            bounds.push(row.bound);
        }
    }

    let out = dual_newton(
        &LogSumExp,
        &rows,
        &bounds,
        free_worlds.len(),
        cfg.tolerance,
        cfg.max_iterations,
    );
    let mut probs = vec![0.0; worlds];
    for (&w, &p) in free_worlds.iter().zip(&out.y) {
        if p > NEGLIGIBLE_MASS {
            probs[w] = p;
        }
    }
    let dist = WorldDistribution::from_noisy(n, probs);
    if out.converged {
        Ok(dist)
    } else {
        Err(Error::NotConverged(Box::new(MaxEntResult {
            labelling: dist.labelling(),
            entropy: entropy_distribution(&dist),
            iterations: out.iterations,
            gap: out.gap,
            converged: false,
        })))
    }
}

/// Canonical argument names `A0`, `A1`, ... zero-padded so that name order
/// matches numeric order.
pub fn argument_names(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("A{i:0width$}")).collect()
}

fn framework(n: usize, attacks: Vec<(usize, usize)>, supports: Vec<(usize, usize)>) -> Baf {
    let args = argument_names(n)
        .into_iter()
        .map(|s| Argument::new(s).expect("generated names are identifiers"))
        .collect();
    Baf::from_parts(args, attacks.into_iter().collect(), supports.into_iter().collect())
}

/// A seeded random framework and constraint set.
///
/// Each ordered pair of distinct arguments independently carries an attack
/// with probability `edge_density`, and likewise a support. Each constraint
/// has one to three terms with coefficients in `[-2, 2]`, a bound in
/// `[-2, 2]` and a relation drawn from `<=`, `=`, `>=`.
pub fn random_instance(
    n: usize,
    edge_density: f64,
    constraint_count: usize,
    seed: u64,
) -> (Baf, ConstraintSet) {
    random_instance_with_semantics(n, edge_density, constraint_count, &[], seed)
}

/// [`random_instance`] with the constraints of `flags` added first.
pub fn random_instance_with_semantics(
    n: usize,
    edge_density: f64,
    constraint_count: usize,
    flags: &[SemanticsFlag],
    seed: u64,
) -> (Baf, ConstraintSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = edge_density.clamp(0.0, 1.0);
    let mut attacks = Vec::new();
    let mut supports = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if rng.gen_bool(density) {
                attacks.push((i, j));
            }
            if rng.gen_bool(density) {
                supports.push((i, j));
            }
        }
    }
    let baf = framework(n, attacks, supports);
    let mut cs = compile_semantics(&baf, flags.iter().copied());
    let indices: Vec<usize> = (0..n).collect();
    for _ in 0..constraint_count {
        if n == 0 {
            break;
        }
        let k = rng.gen_range(1..=n.min(3));
        let terms: Vec<(usize, f64)> = indices
            .choose_multiple(&mut rng, k)
            .map(|&a| (a, rng.gen_range(-2.0..=2.0)))
            .collect();
        let relation = [Relation::Le, Relation::Eq, Relation::Ge][rng.gen_range(0..3)];
        let bound = rng.gen_range(-2.0..=2.0);
        let raw = RawConstraint::new(n, &terms, relation, bound).expect("indices are in range");
        cs.add_raw(&raw).expect("constraint matches the framework");
    }
    (baf, cs)
}

/// A seeded random tree: argument `i > 0` has a single edge to a parent drawn
/// from `0..i`, an attack with probability `attack_share` and a support
/// otherwise. Edges point from child to parent.
pub fn random_tree_baf(n: usize, attack_share: f64, seed: u64) -> Baf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attacks = Vec::new();
    let mut supports = Vec::new();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        if rng.gen_bool(attack_share.clamp(0.0, 1.0)) {
            attacks.push((i, parent));
        } else {
            supports.push((i, parent));
        }
    }
    framework(n, attacks, supports)
}

/// A labelling with independent uniform values, for property checks.
pub fn random_labelling(n: usize, seed: u64) -> Labelling {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Labelling::from_noisy((0..n).map(|_| rng.gen::<f64>()).collect())
}

/// A world distribution with some zero entries, for property checks.
pub fn random_distribution(n: usize, seed: u64) -> WorldDistribution {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs: Vec<f64> = (0..1usize << n)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen::<f64>() })
        .collect();
    if probs.iter().all(|&p| p == 0.0) {
        return WorldDistribution::point_mass(n, World(0)).expect("within limits");
    }
    WorldDistribution::from_noisy(n, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::SemanticsFlag::*;
    use crate::info::kl_divergence;
    use crate::reasoner::check_sat;

    fn mixed_four() -> Baf {
        Baf::new(
            ["A", "B", "C", "D"],
            [("A", "B"), ("B", "A"), ("D", "B")],
            [("C", "A"), ("D", "C")],
        )
        .unwrap()
    }

    #[test]
    fn mixed_four_bounds() {
        let baf = mixed_four();
        let cs = compile_semantics(&baf, [Coh, Fou]);
        assert!(world_lp_sat(&cs, &baf).unwrap().satisfiable);
        let b = world_lp_entail(&cs, &baf, &Formula::parse(&baf, "B").unwrap()).unwrap();
        assert!(b.lower.abs() < 1e-9 && b.upper.abs() < 1e-9);
    }

    #[test]
    fn assignments_with_foundedness() {
        let baf = mixed_four();
        let mut cs = compile_semantics(&baf, [Coh, Fou]);
        cs.add_raw(&RawConstraint::assign(4, 1, 1.0).unwrap()).unwrap();
        cs.add_raw(&RawConstraint::assign(4, 2, 0.0).unwrap()).unwrap();
        let r = world_lp_sat(&cs, &baf).unwrap();
        assert!(!r.satisfiable && r.inconsistency_value > 0.0);
    }

    #[test]
    fn contradiction() {
        let baf = Baf::new(["A"], [], []).unwrap();
        let mut cs = ConstraintSet::new(1);
        cs.add_raw(&RawConstraint::assign(1, 0, 1.0).unwrap()).unwrap();
        cs.add_raw(&RawConstraint::assign(1, 0, 0.0).unwrap()).unwrap();
        let r = world_lp_sat(&cs, &baf).unwrap();
        assert!(!r.satisfiable);
        assert!((r.inconsistency_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn formula_bounds() {
        let baf = Baf::new(["A", "B"], [], []).unwrap();
        let ab = Formula::parse(&baf, "A & B").unwrap();
        let free = world_lp_entail(&ConstraintSet::new(2), &baf, &ab).unwrap();
        assert!(free.lower.abs() < 1e-9 && (free.upper - 1.0).abs() < 1e-9);
        let mut cs = ConstraintSet::new(2);
        cs.add_raw(&RawConstraint::assign(2, 0, 0.5).unwrap()).unwrap();
        cs.add_raw(&RawConstraint::assign(2, 1, 0.5).unwrap()).unwrap();
        let b = world_lp_entail(&cs, &baf, &ab).unwrap();
        assert!(b.lower.abs() < 1e-9 && (b.upper - 0.5).abs() < 1e-9);
    }

    #[test]
    fn maxent_tables() {
        let baf = Baf::new(["A", "B"], [], []).unwrap();
        let u = world_maxent(&ConstraintSet::new(2), &baf).unwrap();
        for &p in u.probs() {
            assert!((p - 0.25).abs() < 1e-6);
        }
        let baf = Baf::new(["A", "B"], [("A", "B")], []).unwrap();
        let mut cs = compile_semantics(&baf, [Coh]);
        cs.add_raw(&RawConstraint::assign(2, 0, 0.8).unwrap()).unwrap();
        let d = world_maxent(&cs, &baf).unwrap();
        for (p, e) in d.probs().iter().zip([0.16, 0.64, 0.04, 0.16]) {
            assert!((p - e).abs() < 1e-5, "{:?}", d.probs());
        }
        let f = WorldDistribution::factorized(&Labelling::new(vec![0.8, 0.2]).unwrap()).unwrap();
        assert!(kl_divergence(&d, &f).unwrap() < 1e-8);
    }

    #[test]
    fn forced_zero_worlds() {
        let baf = Baf::new(["A", "B"], [("A", "B")], []).unwrap();
        let mut cs = compile_semantics(&baf, [Coh]);
        cs.add_raw(&RawConstraint::assign(2, 0, 1.0).unwrap()).unwrap();
        let d = world_maxent(&cs, &baf).unwrap();
        assert!((d.prob(World(0b01)) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn limits() {
        let (baf, cs) = random_instance(9, 0.1, 2, 1);
        assert!(matches!(
            world_maxent(&cs, &baf),
            Err(Error::TooManyArguments { .. })
        ));
        let cfg = OracleConfig {
            lp_limit: 3,
            ..OracleConfig::default()
        };
        let (baf, cs) = random_instance(4, 0.1, 2, 1);
        assert!(matches!(
            world_lp_sat_with(&cs, &baf, &cfg),
            Err(Error::TooManyArguments { .. })
        ));
    }

    #[test]
    fn generator() {
        let a = random_instance(5, 0.3, 4, 99);
        let b = random_instance(5, 0.3, 4, 99);
        assert_eq!(a.0, b.0);
        assert_eq!(a.1.with_provenance(), b.1.with_provenance());
        let (baf, _) = random_instance(4, 0.0, 3, 7);
        assert_eq!(baf.num_attacks() + baf.num_supports(), 0);
        let (baf, cs) = random_instance(5, 0.5, 0, 3);
        let r = check_sat(&cs, &baf).unwrap();
        assert!(r.satisfiable && r.inconsistency_value == 0.0);
        let names = argument_names(12);
        assert_eq!(names[2], "A02");
        let tree = random_tree_baf(50, 0.7, 5);
        assert_eq!(tree.num_attacks() + tree.num_supports(), 49);
    }
}
