//! Values known independently of the library: counts from elementary algebra
//! and the hand-computed data of the worked examples.

use std::sync::Arc;

use gmpa_core::datum::{construct_gamma, unitality_check, verify_datum};
use gmpa_core::examples::{gen_sec62, gen_sec63, permutation_table, sec62_standard, support_element};
use gmpa_core::genmatrix::{matrix_ring, upper_triangular};
use gmpa_core::group::FiniteGroup;
use gmpa_core::partial_action::{enumerate_partial_actions, verify_partial_action};
use gmpa_core::ring::{all_ideals, automorphisms, center, zn, DirectProduct};
use gmpa_core::{Budget, Elem, FiniteRing};

fn divisors(n: u32) -> usize {
    (1..=n).filter(|d| n % d == 0).count()
}

#[test]
fn ideals_of_zn_match_divisors() {
    let b = Budget::default();
    for n in 1..=30 {
        let r = zn(n).unwrap();
        assert_eq!(all_ideals(r.as_ref(), &b).unwrap().len(), divisors(n), "Z_{n}");
    }
}

#[test]
fn boolean_rings() {
    let b = Budget::default();
    let fact = [1, 1, 2, 6, 24];
    for k in 1..=4 {
        let p = DirectProduct::power(zn(2).unwrap(), k, &b).unwrap();
        let r = p.ring();
        assert_eq!(all_ideals(r.as_ref(), &b).unwrap().len(), 1 << k);
        assert_eq!(automorphisms(r.as_ref()).len(), fact[k]);
    }
}

#[test]
fn matrix_rings_over_zn() {
    let b = Budget::default();
    for n in [2, 3, 4] {
        let m = matrix_ring(zn(n).unwrap(), 2, &b).unwrap();
        assert_eq!(m.order(), (n as usize).pow(4));
        // The center is the scalar matrices and ideals are M_2(I) for ideals I of Z_n.
        assert_eq!(center(&m).len(), n as usize);
        assert_eq!(all_ideals(&m, &b).unwrap().len(), divisors(n));
    }
    let m = matrix_ring(zn(2).unwrap(), 2, &b).unwrap();
    let units = (0..16).filter(|&x| (0..16).any(|y| m.mul(x, y) == m.one() && m.mul(y, x) == m.one())).count();
    assert_eq!(units, 6);
}

#[test]
fn upper_triangular_over_z2() {
    let b = Budget::default();
    let t = upper_triangular(zn(2).unwrap(), 2, &b).unwrap();
    assert_eq!(t.order(), 8);
    assert_eq!(center(&t).len(), 2);
    // 0, the strictly upper part, the two maximal ideals and the ring.
    assert_eq!(all_ideals(&t, &b).unwrap().len(), 5);
}

#[test]
fn partial_actions_of_c2_on_z2_squared() {
    let b = Budget::default();
    let r = DirectProduct::power(zn(2).unwrap(), 2, &b).unwrap().ring();
    // D_g is one of the four ideals with an involution on it: 1 + 1 + 1 + 2.
    assert_eq!(enumerate_partial_actions(Arc::new(FiniteGroup::cyclic(2)), r, &b).unwrap().len(), 5);
}

#[test]
fn sec62_domain_is_b_e2() {
    let b = Budget::default();
    let bun = sec62_standard(&b).unwrap();
    let d = bun.datum();
    assert!(verify_datum(d, &b).is_ok());
    // 1_g = e2 theta_g(e2) = e~2, so the (1,1) block of J_g is B e~2 = {0, e~2}.
    assert_eq!(d.actions[0].domains[1].len(), 2);
    assert_eq!(d.actions[0].domains[0].len(), 4);
    let u = unitality_check(d, &b).unwrap();
    let corner = &bun.induced.j.corners[0];
    let p = DirectProduct::power(zn(2).unwrap(), 4, &b).unwrap();
    assert_eq!(corner.to_parent(u.units[1][0]), support_element(&p, &[1]));
    assert_eq!(corner.to_parent(u.units[0][0]), support_element(&p, &[1, 2]));
}

#[test]
fn sec62_trivial_group_is_global() {
    let b = Budget::default();
    let p = DirectProduct::power(zn(2).unwrap(), 4, &b).unwrap();
    let id: Vec<Elem> = (0..16).collect();
    let (e1, e2) = (support_element(&p, &[0, 1]), support_element(&p, &[1, 2]));
    let bun = gen_sec62(p.ring(), e1, e2, Arc::new(FiniteGroup::trivial()), vec![id], &b).unwrap();
    let g = bun.gamma();
    assert_eq!(g.domains[0].len(), g.ring.order());
}

#[test]
fn sec62_with_unit_e2_gives_the_whole_ring() {
    let b = Budget::default();
    let p = DirectProduct::power(zn(2).unwrap(), 4, &b).unwrap();
    let id: Vec<Elem> = (0..16).collect();
    let swap = permutation_table(&p, &[0, 1, 3, 2]);
    let (e1, one) = (support_element(&p, &[0, 1]), support_element(&p, &[0, 1, 2, 3]));
    let bun = gen_sec62(p.ring(), e1, one, Arc::new(FiniteGroup::cyclic(2)), vec![id, swap], &b).unwrap();
    // J = R and gamma = beta, which is global.
    assert_eq!(bun.induced.j.ring.order(), bun.global.parent.order());
    assert!(bun.gamma().domains.iter().all(|d| d.len() == bun.gamma().ring.order()));
}

#[test]
fn sec63_smallest_cases() {
    let b = Budget::default();
    // n = 2, r = 1: C_1, nothing moves.
    let s = gen_sec63(zn(2).unwrap(), 2, 1, &b).unwrap();
    assert_eq!(s.bundle.datum().group.order(), 1);
    // n = 4, r = 2 over Z_2: C_2 and 1_g = e~2 in both corners.
    let s = gen_sec63(zn(2).unwrap(), 4, 2, &b).unwrap();
    let d = s.bundle.datum();
    assert_eq!(d.group.order(), 2);
    let u = unitality_check(d, &b).unwrap();
    for i in 0..2 {
        assert_eq!(s.bundle.induced.j.corners[i].to_parent(u.units[1][i]), support_element(&s.base, &[1]));
    }
    let gamma = construct_gamma(d, &b).unwrap();
    assert!(verify_partial_action(&gamma, &b).is_ok());
    // Z_3, n = 5, r = 2: C_3 with 1_g = e~2 + e~4 and 1_{g^2} = e~2 + e~3.
    let s = gen_sec63(zn(3).unwrap(), 5, 2, &b).unwrap();
    let u = unitality_check(s.bundle.datum(), &b).unwrap();
    let up = |g: usize| s.bundle.induced.j.corners[0].to_parent(u.units[g][0]);
    assert_eq!(up(1), support_element(&s.base, &[1, 3]));
    assert_eq!(up(2), support_element(&s.base, &[1, 2]));
}

#[test]
fn sec63_rejects_bad_parameters() {
    let b = Budget::default();
    assert!(gen_sec63(zn(2).unwrap(), 3, 3, &b).is_err());
    assert!(gen_sec63(zn(2).unwrap(), 3, 0, &b).is_err());
    assert!(matches!(gen_sec63(zn(3).unwrap(), 8, 2, &b), Err(gmpa_core::Error::BudgetExceeded { .. })));
}
