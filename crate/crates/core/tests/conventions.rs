//! Cross-checks of normalization constants against independently built tensors.

use itertools::Itertools;

use genpoisson::liealg::{build_cocycle, build_cocycle_permsum, catalog_load, invariant_symmetric_tensor};
use genpoisson::oracle::{self, four_commutator};
use genpoisson::tensor::signed_permutations;
use genpoisson::{ExactScalar, ExactTensor};

/// `½ ε^{j2 j3 j4}_{i2 i3 i4} d_{k1 k2 σ} C^{k1}_{ρ j2} C^{k2}_{j3 j4}` by brute force.
fn epsilon_dcc_tensor() -> ExactTensor {
    let g = catalog_load("su3").unwrap();
    let rep = oracle::load_rep("su3").unwrap();
    let d = oracle::d_tensor_from_traces(&rep).unwrap();
    let c = &g.structure;
    let half = ExactScalar::from_frac(1, 2);
    let perms = signed_permutations(3);
    ExactTensor::from_fn(5, 8, |idx| {
        let (rho, i, sigma) = (idx[0], &idx[1..4], idx[4]);
        let mut total = ExactScalar::zero();
        for (perm, sign) in &perms {
            let j: Vec<usize> = perm.iter().map(|&q| i[q]).collect();
            for (k1, k2) in (0..8).cartesian_product(0..8) {
                let a = c.get(&[rho, j[0], k1]);
                if a.is_zero() {
                    continue;
                }
                let b = c.get(&[j[1], j[2], k2]);
                if b.is_zero() {
                    continue;
                }
                let v = &(a * b) * d.get(&[k1, k2, sigma]);
                if *sign > 0 {
                    total += &v;
                } else {
                    total -= &v;
                }
            }
        }
        &total * &half
    })
}

#[test]
fn epsilon_dcc_convention_is_twelve_times_ours() {
    let g = catalog_load("su3").unwrap();
    let k = invariant_symmetric_tensor(&g, 3).unwrap();
    let ours = build_cocycle(&g, &k).unwrap();
    let ex = epsilon_dcc_tensor();
    assert!(ex.is_fully_antisymmetric());
    assert_eq!(ex.proportionality(&ours.omega), Some(ExactScalar::from_int(12)));
    // ½ · 3! · (1 / normalization of k against d)
    let predicted = ExactScalar::from_int(3) * k.normalization.inv().unwrap();
    assert_eq!(predicted, ExactScalar::from_int(12));
}

#[test]
fn four_commutator_is_minus_epsilon_dcc() {
    let rep = oracle::load_rep("su3").unwrap();
    let ex = epsilon_dcc_tensor();
    for j in (0..8).combinations(4) {
        let fc = four_commutator(&rep, [j[0], j[1], j[2], j[3]]).unwrap();
        assert!(fc.in_algebra());
        for sigma in 0..8 {
            let mut idx = j.clone();
            idx.push(sigma);
            assert_eq!(fc.components[sigma], -ex.get(&idx), "{idx:?}");
        }
    }
}

#[test]
fn permsum_constants() {
    let g = catalog_load("su3").unwrap();
    for (m, want) in [(2, 6), (3, 120)] {
        let k = invariant_symmetric_tensor(&g, m).unwrap();
        let a = build_cocycle(&g, &k).unwrap();
        let b = build_cocycle_permsum(&g, &k).unwrap();
        assert_eq!(b.omega.proportionality(&a.omega), Some(ExactScalar::from_int(want)), "m={m}");
    }
}

#[test]
fn cocycles_are_annihilated_by_symmetric_pairs() {
    let g = catalog_load("su3").unwrap();
    let k = invariant_symmetric_tensor(&g, 3).unwrap();
    let w = build_cocycle(&g, &k).unwrap();
    let sym = ExactTensor::from_fn(2, 8, |i| ExactScalar::from_int((i[0] * i[1] + i[0] + i[1]) as i64 % 5 - 2));
    assert!(sym.is_fully_symmetric());
    for (a, b) in (0..5).tuple_combinations() {
        let r = ExactTensor::contract(&w.omega, &sym, &[(a, 0), (b, 1)]).unwrap();
        assert!(r.is_zero(), "pair ({a},{b})");
    }
}

#[test]
fn d_and_killing_are_ad_invariant() {
    use genpoisson::liealg::ad_invariance_check;
    for name in oracle::CATALOG {
        let g = catalog_load(name).unwrap();
        for m in g.supported_orders() {
            let k = invariant_symmetric_tensor(&g, m).unwrap();
            assert!(ad_invariance_check(&g, &k).is_zero(), "{name} m={m}");
        }
    }
}

#[test]
fn tensor_json_round_trip_of_cocycle() {
    let g = catalog_load("su3").unwrap();
    let k = invariant_symmetric_tensor(&g, 3).unwrap();
    let w = build_cocycle(&g, &k).unwrap();
    let back = ExactTensor::from_json(&w.omega.to_json()).unwrap();
    assert_eq!(back, w.omega);
}
