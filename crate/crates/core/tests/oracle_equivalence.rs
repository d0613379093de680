//! The labelling LPs against the world-space LPs over a seeded corpus.

mod common;

use probarg::{check_sat, entail, entail_all, world_lp_entail, world_lp_sat, Error, Formula};

#[test]
fn sat_and_entailment_agree_with_world_lps() {
    let (mut sat, mut unsat) = (0, 0);
    for seed in 0..300u64 {
        let (baf, cs) = common::corpus_instance(seed);
        let fast = check_sat(&cs, &baf).unwrap();
        let slow = world_lp_sat(&cs, &baf).unwrap();
        assert_eq!(fast.satisfiable, slow.satisfiable, "seed {seed}");
        assert!(
            (fast.inconsistency_value - slow.inconsistency_value).abs() < 1e-6,
            "seed {seed}: {} vs {}",
            fast.inconsistency_value,
            slow.inconsistency_value
        );
        if !fast.satisfiable {
            unsat += 1;
            assert!(matches!(entail_all(&cs, &baf), Err(Error::Unsatisfiable { .. })));
            continue;
        }
        sat += 1;
        let witness = fast.witness.unwrap();
        assert!(cs.satisfied_by(&witness, 1e-7), "seed {seed}");
        let all = entail_all(&cs, &baf).unwrap();
        for (i, arg) in baf.args().iter().enumerate() {
            let world = world_lp_entail(&cs, &baf, &Formula::Atom(i)).unwrap();
            let single = entail(&cs, &baf, arg.as_str()).unwrap();
            let batch = all[arg];
            for b in [single, batch] {
                assert!(
                    (b.lower - world.lower).abs() < 1e-6 && (b.upper - world.upper).abs() < 1e-6,
                    "seed {seed} {arg}: {b:?} vs {world:?}"
                );
            }
        }
    }
    eprintln!("corpus: {sat} satisfiable, {unsat} unsatisfiable");
    assert!(sat >= 50 && unsat >= 20, "corpus balance: {sat} sat, {unsat} unsat");
}
