use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gmpa_core::datum::{construct_gamma, verify_datum};
use gmpa_core::examples::{permutation_table, random_datums, symmetry_rings, FamilySampler};
use gmpa_core::galois::{galois_search, invariants, separability_witness, SearchOutcome, UnitalView};
use gmpa_core::genmatrix::{is_symmetric, matrix_ring, symmetric_ideal};
use gmpa_core::group::FiniteGroup;
use gmpa_core::grouptype::{group_type_instance, iso_chain_check};
use gmpa_core::io::{block_codec, datum_document, Document, Workspace};
use gmpa_core::partial_action::{verify_partial_action, PartialGroupAction, PartialMap};
use gmpa_core::ring::{is_ideal, zn, DirectProduct};
use gmpa_core::suite::{run_suite, Input};
use gmpa_core::{Budget, Elem, FiniteRing};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A permutation of `0..m` built from cycles whose lengths divide `k`, so its
/// `k`-th power is the identity. Returns it with the cycle lengths.
fn cycle_perm(k: usize, lens: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let divs: Vec<usize> = (1..=k).filter(|d| k % d == 0).collect();
    let lens: Vec<usize> = lens.iter().map(|&l| divs[l % divs.len()]).collect();
    let m: usize = lens.iter().sum();
    let mut perm = vec![0; m];
    let mut start = 0;
    for &l in &lens {
        for t in 0..l {
            perm[start + t] = start + (t + 1) % l;
        }
        start += l;
    }
    (perm, lens)
}

fn power(perm: &[usize], i: usize) -> Vec<usize> {
    (0..perm.len()).map(|c| (0..i).fold(c, |x, _| perm[x])).collect()
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn permutation_actions_follow_orbit_counts(
        q in prop::sample::select(vec![2u32, 3, 4]),
        k in 1usize..=4,
        raw in prop::collection::vec(0usize..4, 1..=3),
    ) {
        let b = Budget::default();
        let (perm, lens) = cycle_perm(k, &raw);
        let m = perm.len();
        prop_assume!((q as usize).pow(m as u32) <= 64);
        let p = DirectProduct::power(zn(q).unwrap(), m, &b).unwrap();
        let autos = (0..k).map(|i| permutation_table(&p, &power(&perm, i))).collect();
        let a = PartialGroupAction::global(Arc::new(FiniteGroup::cyclic(k)), p.ring(), autos).unwrap();
        prop_assert!(verify_partial_action(&a, &b).is_ok());
        let v = UnitalView::new(a).unwrap();

        let inv = invariants(&v).unwrap();
        prop_assert_eq!(inv.len(), (q as usize).pow(lens.len() as u32));

        // A coordinate in a cycle of length l has stabilizer of order k / l.
        let separable = lens.iter().all(|&l| gcd(k / l, q as usize) == 1);
        prop_assert_eq!(separability_witness(&v).is_some(), separable);

        let free = lens.iter().all(|&l| l == k);
        let found = matches!(galois_search(&v, m * k, &b).unwrap(), SearchOutcome::Found(_));
        prop_assert_eq!(found, free);
    }

    #[test]
    fn matrix_multiplication_is_naive_matmul(n in 2u32..=4, x in any::<u64>(), y in any::<u64>()) {
        let b = Budget::default();
        let m = matrix_ring(zn(n).unwrap(), 2, &b).unwrap();
        let pick = |s: u64| (s % m.order() as u64) as Elem;
        let (x, y) = (pick(x), pick(y));
        let xy = m.mul(x, y);
        for i in 0..2 {
            for j in 0..2 {
                let want = (0..2).map(|t| m.entry(x, i, t) * m.entry(y, t, j)).sum::<Elem>() % n;
                prop_assert_eq!(m.entry(xy, i, j), want);
            }
        }
    }

    #[test]
    fn partial_maps_round_trip(pairs in prop::collection::btree_map(0u32..20, 0u32..20, 0..12)) {
        let pairs: Vec<(Elem, Elem)> = pairs.into_iter().collect();
        let f = PartialMap::from_pairs(20, pairs.clone()).unwrap();
        prop_assert_eq!(f.pairs(), pairs.clone());
        prop_assert_eq!(f.domain().len(), pairs.len());
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn random_datums_give_partial_actions(seed in any::<u64>()) {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for item in random_datums(&mut rng, 2, &b).unwrap() {
            prop_assert!(verify_datum(&item.datum, &b).is_ok(), "{}", item.label);
            let g = construct_gamma(&item.datum, &b).unwrap();
            prop_assert_eq!(&g.maps, &item.gamma.maps);
            prop_assert!(verify_partial_action(&g, &b).is_ok(), "{}", item.label);
        }
    }

    #[test]
    fn exported_datums_read_back(seed in any::<u64>()) {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let item = random_datums(&mut rng, 1, &b).unwrap().remove(0);
        let doc = datum_document(&item.datum, &b).unwrap();
        let ws = Workspace::new(Document::from_json(&doc.to_json()).unwrap(), b).unwrap();
        let d = ws.datum().unwrap();
        prop_assert_eq!(d.actions.len(), item.datum.actions.len());
        for (x, y) in d.actions.iter().zip(&item.datum.actions) {
            prop_assert_eq!(&x.maps, &y.maps);
        }
        prop_assert_eq!(&construct_gamma(&d, &b).unwrap().maps, &item.gamma.maps);
        let codec = block_codec(&d.parent);
        for x in 0..d.parent.order() as Elem {
            prop_assert_eq!(codec.read(&codec.write(x)).unwrap(), x);
        }
    }

    #[test]
    fn symmetric_families_give_ideals(seed in any::<u64>()) {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in symmetry_rings(&b).unwrap() {
            let s = FamilySampler::new(r.clone(), &b).unwrap();
            for _ in 0..4 {
                let fam = s.sample(&mut rng);
                if is_symmetric(&r, &fam) {
                    let set = symmetric_ideal(&r, &fam, &b).unwrap();
                    prop_assert!(is_ideal(r.as_ref(), &set));
                }
            }
        }
    }

    #[test]
    fn group_type_chains_preserve_order(seed in any::<u64>(), n in 1usize..=2, k in 1usize..=3) {
        prop_assume!(n * n * k <= 6);
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = group_type_instance(&mut rng, n, k, 1, &b).unwrap();
        let rep = iso_chain_check(&inst.action, &inst.data, &b).unwrap();
        prop_assert_eq!(rep.orders[0], rep.orders[1]);
        prop_assert_eq!(rep.orders[1], rep.orders[2]);
    }
}

proptest! {
    #![proptest_config(config(3))]

    #[test]
    fn suite_is_a_function_of_its_seed(seed in any::<u64>()) {
        let b = Budget::default();
        let inputs = [Input::Builtin("smoke".into())];
        let a = run_suite(&inputs, seed, None, &b);
        let c = run_suite(&inputs, seed, None, &b);
        prop_assert_eq!(a.to_jsonl(false), c.to_jsonl(false));
        prop_assert_eq!(a.exit_code(), 0);
    }
}
