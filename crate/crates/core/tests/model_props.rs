//! Properties of worlds, formulas, labellings and the information measures.

use probarg::info::{entropy_distribution, entropy_labelling, kl_divergence};
use probarg::oracle::{argument_names, random_distribution, random_labelling};
use probarg::{conjunctive_query, Baf, ConjunctiveQuery, Formula, Labelling, World, WorldDistribution};
use proptest::prelude::*;

fn edgeless(n: usize) -> Baf {
    Baf::new(argument_names(n), [], []).unwrap()
}

fn formula(n: usize) -> impl Strategy<Value = Formula> {
    let leaf = (0..n).prop_map(Formula::Atom);
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            proptest::collection::vec(inner, 2..4).prop_map(Formula::Or),
        ]
    })
}

fn distribution(n: usize) -> impl Strategy<Value = WorldDistribution> {
    proptest::collection::vec(0.0f64..1.0, 1 << n).prop_map(move |mut w| {
        w[0] += 1e-3;
        let total: f64 = w.iter().sum();
        WorldDistribution::new(n, w.into_iter().map(|p| p / total).collect::<Vec<_>>())
            .or_else(|_| WorldDistribution::uniform(n))
            .unwrap()
    })
}

fn normalized(f: &Formula) -> Formula {
    // Display never emits single-child And/Or, so compare modulo that.
    match f {
        Formula::Atom(a) => Formula::Atom(*a),
        Formula::Not(g) => Formula::not(normalized(g)),
        Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => normalized(&fs[0]),
        Formula::And(fs) => Formula::And(fs.iter().map(normalized).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(normalized).collect()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn additivity(p in distribution(3), f in formula(3), g in formula(3)) {
        let both = p.prob_of_formula(&Formula::and([f.clone(), g.clone()])).unwrap();
        let not_g = p.prob_of_formula(&Formula::and([f.clone(), Formula::not(g)])).unwrap();
        let pf = p.prob_of_formula(&f).unwrap();
        prop_assert!((both + not_g - pf).abs() < 1e-12);
    }

    #[test]
    fn monotone_under_entailment(p in distribution(3), f in formula(3), g in formula(3)) {
        // F and G entails F, and F entails F or G.
        let fg = p.prob_of_formula(&Formula::and([f.clone(), g.clone()])).unwrap();
        let pf = p.prob_of_formula(&f).unwrap();
        let f_or_g = p.prob_of_formula(&Formula::or([f, g])).unwrap();
        prop_assert!(fg <= pf + 1e-12);
        prop_assert!(pf <= f_or_g + 1e-12);
    }

    #[test]
    fn complement(p in distribution(4), f in formula(4)) {
        let pf = p.prob_of_formula(&f).unwrap();
        let pn = p.prob_of_formula(&Formula::not(f)).unwrap();
        prop_assert!((pf + pn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn formula_round_trip(f in formula(5)) {
        let baf = edgeless(5);
        let text = f.display(&baf).to_string();
        let back = Formula::parse(&baf, &text).unwrap();
        prop_assert_eq!(normalized(&back), normalized(&f));
        for w in 0..32u32 {
            prop_assert_eq!(back.eval(World(w)), f.eval(World(w)));
        }
    }

    #[test]
    fn factorized_marginals(values in proptest::collection::vec(0.0f64..=1.0, 1..8)) {
        let l = Labelling::new(values).unwrap();
        let p = WorldDistribution::factorized(&l).unwrap();
        let back = p.labelling();
        for (a, b) in back.values().iter().zip(l.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjunctive_query_matches_world_sum(
        values in proptest::collection::vec(0.0f64..=1.0, 10),
        lits in proptest::collection::btree_map(0usize..10, any::<bool>(), 0..6),
    ) {
        let baf = edgeless(10);
        let l = Labelling::new(values).unwrap();
        let q = ConjunctiveQuery::new(&baf, lits).unwrap();
        let direct = conjunctive_query(&l, &q).unwrap();
        let brute = WorldDistribution::factorized(&l).unwrap().prob_of_formula(&q.to_formula()).unwrap();
        prop_assert!((direct - brute).abs() < 1e-9);
    }
}

#[test]
fn entropy_of_factorized_equals_labelling_entropy() {
    for seed in 0..500u64 {
        let n = 1 + (seed % 10) as usize;
        let l = random_labelling(n, seed);
        let p = WorldDistribution::factorized(&l).unwrap();
        let gap = (entropy_distribution(&p) - entropy_labelling(&l)).abs();
        assert!(gap < 1e-9, "seed {seed}: {gap}");
    }
}

#[test]
fn entropy_deficit_is_kl_to_factorization() {
    for seed in 0..500u64 {
        let n = 1 + (seed % 10) as usize;
        let p = random_distribution(n, seed);
        let l = p.labelling();
        let q = WorldDistribution::factorized(&l).unwrap();
        let kl = kl_divergence(&p, &q).unwrap();
        let deficit = entropy_labelling(&l) - entropy_distribution(&p);
        assert!(kl >= 0.0);
        assert!((deficit - kl).abs() < 1e-9, "seed {seed}: {deficit} vs {kl}");
    }
}

#[test]
fn factorization_dominates_its_class() {
    // Same marginals, different correlation: the product table has the
    // larger entropy.
    let l = Labelling::new(vec![0.5, 0.5]).unwrap();
    let product = WorldDistribution::factorized(&l).unwrap();
    for p in [
        WorldDistribution::new(2, vec![0.5, 0.0, 0.0, 0.5]).unwrap(),
        WorldDistribution::new(2, vec![0.0, 0.5, 0.5, 0.0]).unwrap(),
        WorldDistribution::new(2, vec![0.3, 0.2, 0.2, 0.3]).unwrap(),
    ] {
        assert_eq!(p.labelling(), l);
        assert!(entropy_distribution(&p) < entropy_distribution(&product));
    }
}
