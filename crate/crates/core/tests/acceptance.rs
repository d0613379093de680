//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use probarg::info::{entropy_distribution, entropy_labelling, kl_divergence};
use probarg::oracle::{random_distribution, random_labelling, random_tree_baf};
use probarg::{
    check_sat, compile_semantics, conjunctive_query, entail_all, maxent_labelling, world_lp_entail,
    world_lp_sat, world_maxent, Baf, ConjunctiveQuery, ConstraintSet, EntailmentBounds, Error,
    Formula, SemanticsFlag, WorldDistribution,
};

use SemanticsFlag::{Coh, Fou, Scoh};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn expect_bounds(baf: &Baf, cs: &ConstraintSet, expected: &[(&str, f64, f64)]) -> Result<(), String> {
    let all = entail_all(cs, baf).map_err(|e| e.to_string())?;
    for &(name, lo, hi) in expected {
        let b: EntailmentBounds = all[&probarg::Argument::new(name).unwrap()];
        ensure(close(b.lower, lo, 1e-6) && close(b.upper, hi, 1e-6), || {
            format!("{name}: [{:.6}, {:.6}], expected [{lo}, {hi}]", b.lower, b.upper)
        })?;
    }
    Ok(())
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.3?}, limit {limit:?}"))
}

fn support_pins_attacked() -> Outcome {
    let start = Instant::now();
    let baf = common::mixed_four();
    let cs = compile_semantics(&baf, [Coh, Fou]);
    let sat = check_sat(&cs, &baf).map_err(|e| e.to_string())?;
    ensure(sat.satisfiable, || "unsatisfiable".into())?;
    expect_bounds(&baf, &cs, &[("B", 0.0, 0.0), ("C", 1.0, 1.0), ("D", 1.0, 1.0)])?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_millis(100))?;
    Ok(format!("B [0,0], C [1,1], D [1,1] in {elapsed:.2?}"))
}

fn assignments_propagate() -> Outcome {
    let start = Instant::now();
    let (baf, cs) = common::assigned_four(&[Coh]);
    expect_bounds(&baf, &cs, &[("A", 0.0, 0.0), ("D", 0.0, 0.0)])?;
    let (baf, cs) = common::assigned_four(&[Coh, Fou]);
    let sat = check_sat(&cs, &baf).map_err(|e| e.to_string())?;
    ensure(!sat.satisfiable, || "still satisfiable with FOU".into())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_millis(100))?;
    Ok(format!("A [0,0], D [0,0]; UNSAT with FOU in {elapsed:.2?}"))
}

fn support_coherence() -> Outcome {
    let baf = common::mixed_four();
    let cs = compile_semantics(&baf, [Coh, Fou, Scoh]);
    expect_bounds(
        &baf,
        &cs,
        &[("A", 1.0, 1.0), ("B", 0.0, 0.0), ("C", 1.0, 1.0), ("D", 1.0, 1.0)],
    )?;
    Ok("A, C, D [1,1], B [0,0]".into())
}

fn maxent_example() -> Outcome {
    let (baf, cs) = common::attack_pair(0.8);
    let l = maxent_labelling(&cs, &baf).map_err(|e| e.to_string())?.labelling;
    ensure(close(l.get(0), 0.8, 1e-4) && close(l.get(1), 0.2, 1e-4), || {
        format!("labelling {:?}", l.values())
    })?;
    // Worlds in bitmask order: {}, {A}, {B}, {A, B}.
    let table = WorldDistribution::factorized(&l).map_err(|e| e.to_string())?;
    for (p, e) in table.probs().iter().zip([0.16, 0.64, 0.04, 0.16]) {
        ensure(close(*p, e, 1e-4), || format!("table {:?}", table.probs()))?;
    }
    let q = ConjunctiveQuery::parse(&baf, "A & B").map_err(|e| e.to_string())?;
    let ab = conjunctive_query(&l, &q).map_err(|e| e.to_string())?;
    ensure(close(ab, 0.16, 1e-4), || format!("P(A & B) = {ab}"))?;
    Ok(format!("L* = ({:.4}, {:.4}), P(A & B) = {ab:.4}", l.get(0), l.get(1)))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut sat, mut unsat) = (0, 0);
    for seed in 0..240u64 {
        let (baf, cs) = common::corpus_instance(seed);
        let fast = check_sat(&cs, &baf).map_err(|e| format!("seed {seed}: {e}"))?;
        let slow = world_lp_sat(&cs, &baf).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(fast.satisfiable == slow.satisfiable, || format!("seed {seed}: SAT mismatch"))?;
        if !fast.satisfiable {
            unsat += 1;
            continue;
        }
        sat += 1;
        let all = entail_all(&cs, &baf).map_err(|e| format!("seed {seed}: {e}"))?;
        for (i, arg) in baf.args().iter().enumerate() {
            let w = world_lp_entail(&cs, &baf, &Formula::Atom(i)).map_err(|e| e.to_string())?;
            let b = all[arg];
            ensure(close(b.lower, w.lower, 1e-6) && close(b.upper, w.upper, 1e-6), || {
                format!("seed {seed} {arg}: {b:?} vs {w:?}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("{} instances ({sat} sat, {unsat} unsat) in {elapsed:.2?}", sat + unsat))
}

fn maxent_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut checked, mut worst) = (0, 0.0f64);
    for seed in 0u64.. {
        if checked == 60 {
            break;
        }
        let (baf, cs) = common::corpus_instance(seed);
        if !check_sat(&cs, &baf).map_err(|e| e.to_string())?.satisfiable {
            continue;
        }
        let l = maxent_labelling(&cs, &baf).map_err(|e| format!("seed {seed}: {e}"))?;
        let world = world_maxent(&cs, &baf).map_err(|e| format!("seed {seed}: {e}"))?;
        let product = WorldDistribution::factorized(&l.labelling).map_err(|e| e.to_string())?;
        let kl = kl_divergence(&world, &product).map_err(|e| e.to_string())?;
        ensure(kl <= 1e-5, || format!("seed {seed}: KL {kl:e}"))?;
        worst = worst.max(kl);
        checked += 1;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!("{checked} instances, worst KL {worst:.2e} in {elapsed:.2?}"))
}

fn entropy_identities() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..500u64 {
        let n = 1 + (seed % 10) as usize;
        let l = random_labelling(n, seed);
        let p = WorldDistribution::factorized(&l).map_err(|e| e.to_string())?;
        let gap = (entropy_distribution(&p) - entropy_labelling(&l)).abs();
        ensure(gap <= 1e-9, || format!("seed {seed}: H(P_L) - H(L) = {gap:e}"))?;
        worst = worst.max(gap);

        let p = random_distribution(n, seed);
        let lp = p.labelling();
        let q = WorldDistribution::factorized(&lp).map_err(|e| e.to_string())?;
        let kl = kl_divergence(&p, &q).map_err(|e| e.to_string())?;
        let deficit = entropy_labelling(&lp) - entropy_distribution(&p);
        ensure(kl >= -1e-9 && close(deficit, kl, 1e-9), || {
            format!("seed {seed}: deficit {deficit} vs KL {kl}")
        })?;
        worst = worst.max((deficit - kl).abs());
    }
    Ok(format!("500 labellings and 500 distributions, worst error {worst:.1e}"))
}

fn guarantees() -> Outcome {
    let bound = |pa: f64| 0.25f64.min(1.0 - pa) + 1e-6;
    let query = |baf: &Baf, l: &probarg::Labelling, lits: Vec<(usize, bool)>| {
        ConjunctiveQuery::new(baf, lits)
            .and_then(|q| conjunctive_query(l, &q))
            .map_err(|e| e.to_string())
    };
    let mut counts = [0usize; 3];
    for seed in 0..400u64 {
        for (kind, count) in counts.iter_mut().enumerate() {
            let (flags, attack, combined): (&[SemanticsFlag], bool, bool) = match kind {
                0 => (&[Coh], true, false),
                1 => (&[Scoh], false, false),
                _ => (&[Coh, Scoh], false, true),
            };
            let (baf, cs) = common::planted(seed, flags, attack, combined);
            let l = match maxent_labelling(&cs, &baf) {
                Ok(m) => m.labelling,
                Err(Error::Unsatisfiable { .. }) => continue,
                Err(e) => return Err(format!("seed {seed}: {e}")),
            };
            match kind {
                0 | 1 => {
                    let mut lits = vec![(0, true), (1, kind == 0)];
                    lits.extend(common::chi(&baf, &[0, 1], seed));
                    let p = query(&baf, &l, lits)?;
                    ensure(p <= bound(l.get(0)), || format!("seed {seed}: {p} > bound"))?;
                }
                _ => {
                    ensure(l.get(0) + l.get(1) <= 1.0 + 1e-6, || {
                        format!("seed {seed}: P(A) + P(B) = {}", l.get(0) + l.get(1))
                    })?;
                    let x = common::chi(&baf, &[0, 1, 2], seed);
                    let mut first = vec![(0, true), (1, false), (2, true)];
                    first.extend(x.iter().copied());
                    let mut second = vec![(0, false), (1, true), (2, false)];
                    second.extend(x);
                    let p1 = query(&baf, &l, first)?;
                    let p2 = query(&baf, &l, second)?;
                    ensure(p1 <= bound(l.get(0)) && p2 <= bound(l.get(1)), || {
                        format!("seed {seed}: {p1}, {p2}")
                    })?;
                }
            }
            *count += 1;
        }
    }
    ensure(counts.iter().all(|&c| c >= 100), || format!("too few instances: {counts:?}"))?;
    Ok(format!("COH {}, S-COH {}, combined {} instances", counts[0], counts[1], counts[2]))
}

fn scaling() -> Outcome {
    let baf = random_tree_baf(1000, 0.5, 7);
    let cs = compile_semantics(&baf, [Coh, Fou]);
    let start = Instant::now();
    let sat = check_sat(&cs, &baf).map_err(|e| e.to_string())?;
    ensure(sat.satisfiable, || "1000-argument tree unsatisfiable".into())?;
    let all = entail_all(&cs, &baf).map_err(|e| e.to_string())?;
    let large = start.elapsed();
    ensure(all.len() == 1000, || "missing bounds".into())?;
    within(large, Duration::from_secs(10))?;

    let small = random_tree_baf(16, 0.5, 7);
    let cs = compile_semantics(&small, [Coh, Fou]);
    let start = Instant::now();
    let fast = check_sat(&cs, &small).map_err(|e| e.to_string())?;
    let labelling = start.elapsed();
    let start = Instant::now();
    let slow = world_lp_sat(&cs, &small).map_err(|e| e.to_string())?;
    let world = start.elapsed();
    ensure(fast.satisfiable == slow.satisfiable, || "n=16 SAT mismatch".into())?;
    ensure(world > labelling, || format!("world {world:.2?} vs labelling {labelling:.2?}"))?;
    Ok(format!(
        "n=1000 sat + entail-all in {large:.2?}; n=16 labelling {labelling:.2?} vs world {world:.2?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("four-argument entailment", support_pins_attacked),
        ("assignment propagation", assignments_propagate),
        ("support coherence", support_coherence),
        ("maxent attack pair", maxent_example),
        ("oracle equivalence", oracle_equivalence),
        ("maxent equivalence", maxent_equivalence),
        ("entropy identities", entropy_identities),
        ("coherence guarantees", guarantees),
        ("scaling", scaling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} ({name}): PASS {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
