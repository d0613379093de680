#![allow(dead_code)]

use probarg::{compile_semantics, Baf, ConstraintSet, RawConstraint, SemanticsFlag};

pub fn mixed_four() -> Baf {
    Baf::new(
        ["A", "B", "C", "D"],
        [("A", "B"), ("B", "A"), ("D", "B")],
        [("C", "A"), ("D", "C")],
    )
    .unwrap()
}

/// The four-argument framework with `flags` plus `π(B) = 1` and `π(C) = 0`.
pub fn assigned_four(flags: &[SemanticsFlag]) -> (Baf, ConstraintSet) {
    let baf = mixed_four();
    let mut cs = compile_semantics(&baf, flags.iter().copied());
    cs.add_raw(&RawConstraint::assign(4, 1, 1.0).unwrap()).unwrap();
    cs.add_raw(&RawConstraint::assign(4, 2, 0.0).unwrap()).unwrap();
    (baf, cs)
}

/// `({A, B}, {(A, B)}, {})` under coherence with `π(A) = pa`.
pub fn attack_pair(pa: f64) -> (Baf, ConstraintSet) {
    let baf = Baf::new(["A", "B"], [("A", "B")], []).unwrap();
    let mut cs = compile_semantics(&baf, [SemanticsFlag::Coh]);
    cs.add_raw(&RawConstraint::assign(2, 0, pa).unwrap()).unwrap();
    (baf, cs)
}

/// Seeded corpus instance with at most six arguments, mixing semantics
/// flags, graph densities and user constraints.
pub fn corpus_instance(seed: u64) -> (Baf, ConstraintSet) {
    use SemanticsFlag::*;
    const FLAG_SETS: [&[SemanticsFlag]; 8] = [
        &[],
        &[Coh],
        &[Coh, Fou],
        &[Coh, Scoh],
        &[Jus],
        &[Sfou, Ssce],
        &[Scoh, Pes],
        &[Coh, Sopt, Spes],
    ];
    let n = 2 + (seed % 5) as usize;
    let density = [0.15, 0.3, 0.45][(seed / 5 % 3) as usize];
    let flags = FLAG_SETS[(seed / 15 % 8) as usize];
    let count = (seed / 3 % 4) as usize;
    probarg::oracle::random_instance_with_semantics(n, density, count, flags, seed)
}

/// Instances with a planted edge `A0 -> A1` (attack or support) and for the
/// combined case `A0 -> A2` attack and `A1 -> A2` support.
pub fn planted(seed: u64, flags: &[SemanticsFlag], attack: bool, combined: bool) -> (Baf, probarg::ConstraintSet) {
    let n = 3 + (seed % 4) as usize;
    let (random, _) = probarg::oracle::random_instance_with_semantics(n, 0.25, 0, &[], seed);
    let names: Vec<String> = random.args().iter().map(|a| a.to_string()).collect();
    let mut attacks: Vec<(String, String)> = random
        .attacks()
        .map(|(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    let mut supports: Vec<(String, String)> = random
        .supports()
        .map(|(a, b)| (names[a].clone(), names[b].clone()))
        .collect();
    if combined {
        attacks.push((names[0].clone(), names[2].clone()));
        supports.push((names[1].clone(), names[2].clone()));
    } else if attack {
        attacks.push((names[0].clone(), names[1].clone()));
    } else {
        supports.push((names[0].clone(), names[1].clone()));
    }
    attacks.sort();
    attacks.dedup();
    supports.sort();
    supports.dedup();
    let baf = Baf::new(
        names.iter().map(String::as_str),
        attacks.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        supports.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )
    .unwrap();
    let (_, extra) = probarg::oracle::random_instance_with_semantics(n, 0.0, 1 + (seed % 2) as usize, &[], seed ^ 0xA5A5);
    let mut cs = probarg::compile_semantics(&baf, flags.iter().copied());
    for c in extra.iter() {
        cs.push(c.clone(), probarg::Provenance::User).unwrap();
    }
    (baf, cs)
}

pub fn chi(baf: &Baf, skip: &[usize], seed: u64) -> Vec<(usize, bool)> {
    (0..baf.len())
        .filter(|a| !skip.contains(a) && (seed >> a) & 1 == 1)
        .map(|a| (a, true))
        .collect()
}
