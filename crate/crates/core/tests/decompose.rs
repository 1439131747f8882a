use proptest::prelude::*;
use quantclass_core::decompose::*;
use quantclass_core::invariants::{lambda0_prime, lambda1, nu_ge};
use quantclass_core::relation::{approx_eq, for_each_tuple, EquivalenceRelation, PartialInjection};
use quantclass_core::{Budget, ElemSet, Permutation, Relation, Universe};

fn relation(n: u32, arity: usize, bits: &[bool]) -> Relation {
    let u = Universe::new(n).unwrap();
    let mut i = 0;
    Relation::from_predicate(u, arity, |_| {
        i += 1;
        bits[(i - 1) % bits.len()]
    })
    .unwrap()
}

fn perm(n: u32, keys: &[u32]) -> Permutation {
    let mut v: Vec<u32> = (0..n).collect();
    v.sort_by_key(|&x| (keys[x as usize % keys.len()], x));
    Permutation::from_images(v).unwrap()
}

/// `R(t)` iff some `t' ∈ R₁` has `t ≈_A t'` and every coordinate of `t'`
/// outside `A` among `d̄`.
fn core_oracle(core: &MonadicCore, t: &[u32]) -> bool {
    if core.whole {
        return core.r1.contains(t);
    }
    core.r1.tuples().any(|s| {
        approx_eq(t, s, &core.support).unwrap() && s.iter().all(|x| core.support.contains(*x) || core.d.contains(x))
    })
}

fn small_relation() -> impl Strategy<Value = (u32, usize, Vec<bool>)> {
    (1usize..=3)
        .prop_flat_map(|arity| {
            let max_n = [0, 8, 7, 5][arity];
            (2u32..=max_n, Just(arity), prop::collection::vec(prop::bool::weighted(0.3), 1..64))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monadic_core_matches_the_definition((n, arity, bits) in small_relation(), keys in prop::collection::vec(0u32..100, 8)) {
        let r = relation(n, arity, &bits);
        let b = Budget::default();
        for r in [r.clone(), r.permute(&perm(n, &keys))] {
            let core = monadic_core(&r, &b).unwrap();
            let l0 = lambda0_prime(&r, &b).unwrap().value;
            prop_assert!(core.r1.domain().len() <= l0 + arity);
            for_each_tuple(n, arity, |t| {
                assert_eq!(core_oracle(&core, t), r.contains(t), "{t:?}");
                false
            });
        }
    }

    #[test]
    fn nary_round_trip(n in 2u32..9, arity in 1usize..=3, a_size in 1u32..5, bits in prop::collection::vec(prop::bool::weighted(0.2), 1..40)) {
        let a_size = a_size.min(n - 1);
        let u = Universe::new(n).unwrap();
        let a: ElemSet = (0..a_size).collect();
        let mut i = 0;
        let mut r = Relation::from_predicate(u, arity, |t| {
            i += 1;
            t.iter().all(|&x| x < a_size) && bits[(i - 1) % bits.len()]
        }).unwrap();
        while r.len() > (n - a_size) as usize {
            let keep: Vec<Vec<u32>> = r.tuples().skip(1).map(|t| t.to_vec()).collect();
            r = Relation::new(u, arity, keep).unwrap();
        }
        let enc = encode_nary(&r, &a).unwrap();
        let back = Relation::from_predicate(u, arity, |t| decode_nary(&enc, t)).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn injections_from_equivalences(sizes in prop::collection::vec(1usize..4, 1..5)) {
        let mut blocks = Vec::new();
        let mut next = 0u32;
        for s in &sizes {
            blocks.push((next..next + *s as u32).rev().collect::<Vec<_>>());
            next += *s as u32;
        }
        let u = Universe::new(next + 1).unwrap();
        let e = EquivalenceRelation::new(u, blocks).unwrap();
        match inj_from_equiv(&e, &Budget::default()) {
            Ok(got) => {
                prop_assert_eq!(got.injection.len(), nu_ge(&e, 2));
                for &(x, y) in got.injection.pairs() {
                    prop_assert!(e.class_of(x).contains(y) && x != y);
                }
            }
            Err(_) => prop_assert_eq!(nu_ge(&e, 2), 0),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distinguishing_systems_survive_relabelling(bits in prop::collection::vec(prop::bool::weighted(0.35), 1..100), keys in prop::collection::vec(0u32..100, 10)) {
        let r = relation(9, 2, &bits);
        let b = Budget::default();
        for r in [r.clone(), r.permute(&perm(9, &keys))] {
            let s = distinguishing_system(&r, &b).unwrap();
            prop_assert!(verify_system(&r, &s.a, &s.triples).is_none());
            prop_assert!(s.triples.len() >= s.proved_bound);
        }
    }

    #[test]
    fn support_clauses_hold_after_relabelling(pairs in prop::collection::vec((0u32..14, 0u32..14), 0..3), keys in prop::collection::vec(0u32..100, 14)) {
        let u = Universe::new(14).unwrap();
        let r = Relation::new(u, 2, pairs.iter().map(|&(a, b)| vec![a, b])).unwrap();
        let b = Budget::default();
        for r in [r.clone(), r.permute(&perm(14, &keys))] {
            let Ok(core) = inj_decompose(&r, &b) else {
                prop_assert!(lambda1(&r, &b).unwrap().value * 4 + 2 >= 14);
                continue;
            };
            prop_assert!(verify_ac_support(&r, &core.support, &b).unwrap().ok());
            for_each_tuple(14, 2, |t| {
                assert_eq!(inj_reconstruct(&core, t), r.contains(t));
                false
            });
        }
    }

    #[test]
    fn injections_defined_from_copies(bits in prop::collection::vec(prop::bool::weighted(0.2), 1..60), h in prop::collection::vec((0u32..12, 0u32..12), 0..4)) {
        let r = relation(12, 2, &bits);
        let b = Budget::default();
        let l1 = lambda1(&r, &b).unwrap().value;
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (x, y) in h {
            if pairs.len() < l1.min(4) && pairs.iter().all(|&(s, t)| s != x && t != y) {
                pairs.push((x, y));
            }
        }
        let h = PartialInjection::new(Universe::new(12).unwrap(), pairs).unwrap();
        let got = interpret_injection(&r, &h, &b).unwrap();
        prop_assert_eq!(got.defined(&b).unwrap(), h.to_relation());
    }
}

#[test]
fn factor_clause_by_pairs() {
    // Clause (B) checked over all pairs of tuples, not by class keys.
    let u = Universe::new(11).unwrap();
    let b = Budget::default();
    for r in [
        Relation::new(u, 2, [[0, 1]]).unwrap(),
        Relation::new(u, 2, [[0, 0], [1, 1], [0, 1]]).unwrap(),
        Relation::full(u, 2).unwrap(),
    ] {
        let l = ac_support(&r, &b).unwrap();
        let cls = |x: u32| l.e_ac.class_of(x);
        for_each_tuple(11, 2, |s| {
            for_each_tuple(11, 2, |t| {
                let related = (0..2).all(|i| cls(s[i]).contains(t[i])) && ((s[0] == s[1]) == (t[0] == t[1]));
                assert!(!related || r.contains(s) == r.contains(t), "{s:?} {t:?}");
                false
            });
            false
        });
    }
}

#[test]
fn extraction_sizes_on_a_sample() {
    let u = Universe::new(20).unwrap();
    let b = Budget::default();
    for d in [3u32, 6, 10] {
        let r = Relation::from_predicate(u, 2, |t| t[0] < d && t[1] < d && (t[0] * 7 + t[1] * 3) % 5 < 2).unwrap();
        let x = monadic_extraction(&r, &b).unwrap();
        assert_eq!(x.definition.evaluate(&b).unwrap(), x.set);
        assert_eq!(x.set.len(), x.target);
    }
}

#[test]
fn constructions_are_deterministic() {
    let r = relation(10, 2, &[true, false, false, true, false, false, false]);
    let b = Budget::default();
    assert_eq!(distinguishing_system(&r, &b).unwrap(), distinguishing_system(&r, &b).unwrap());
    assert_eq!(monadic_core(&r, &b).unwrap(), monadic_core(&r, &b).unwrap());
    let r20 = relation(20, 2, &[true, false, false, false, false, false, false, false, false, false, false, true]);
    assert_eq!(monadic_extraction(&r20, &b).unwrap(), monadic_extraction(&r20, &b).unwrap());
}

#[test]
fn theta_reading_on_tiny_universes() {
    let b = Budget::default();
    for n in 2u32..=4 {
        let u = Universe::new(n).unwrap();
        let a: ElemSet = (0..n / 2).collect();
        let half = n / 2;
        for mask in 0u32..(1 << (half * half)) {
            let r = Relation::from_predicate(u, 2, |t| t[0] < half && t[1] < half && mask >> (t[0] * half + t[1]) & 1 == 1).unwrap();
            if r.len() > (n - half) as usize {
                continue;
            }
            let enc = encode_nary(&r, &a).unwrap();
            let got = quantclass_core::logic::defined_relation(&decoding_formula(2), &enc.model().unwrap(), &decoding_vars(2), &b).unwrap();
            assert_eq!(got, r);
        }
    }
}
