mod common;

use common::{
    all_ordered_clauses, arb_clause, arb_formula, exhaustive_conditional_means, naive_count,
    planted_pmf, ratio,
};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use psl::{
    cond_expected_count, count_models, count_report, expected_count, likelihood_ratio, Assignment,
    Clause, Formula, Literal, RngStream,
};
use rand::seq::SliceRandom;
use rand::Rng;
use std::cmp::Ordering;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn count_matches_brute_force(phi in arb_formula(vec![1, 2, 3, 4], 12, 30)) {
        prop_assert_eq!(count_models(&phi, 32).unwrap(), BigUint::from(naive_count(&phi)));
    }

    #[test]
    fn adding_a_clause_never_increases_z(
        (phi, extra) in arb_formula(vec![2, 3], 12, 20)
            .prop_flat_map(|phi| { let c = arb_clause(phi.num_vars(), phi.width()); (Just(phi), c) })
    ) {
        let before = count_models(&phi, 32).unwrap();
        let after = count_models(&phi.with_clause(extra).unwrap(), 32).unwrap();
        prop_assert!(after <= before);
    }

    #[test]
    fn z_is_invariant_under_flips_and_renaming(phi in arb_formula(vec![2, 3], 12, 25), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0).rng();
        let n = phi.num_vars();
        let mask = Assignment::new((0..n).map(|_| rng.gen()).collect());
        let mut perm: Vec<u32> = (1..=n as u32).collect();
        perm.shuffle(&mut rng);
        let z = count_models(&phi, 32).unwrap();
        prop_assert_eq!(count_models(&phi.flipped(&mask).unwrap(), 32).unwrap(), z.clone());
        prop_assert_eq!(count_models(&phi.renamed(&perm).unwrap(), 32).unwrap(), z);
    }

    #[test]
    fn report_is_consistent(phi in arb_formula(vec![2, 3], 12, 30)) {
        let r = count_report(&phi, 32).unwrap();
        let (n, k, m) = (phi.num_vars(), phi.width(), phi.num_clauses());
        // independent E[Z]: 2^n (1 - 2^-k)^m
        let e = BigRational::from_integer(BigInt::from(1u64 << n))
            * num_traits::pow(ratio((1 << k) - 1, 1 << k), m);
        prop_assert_eq!(&r.expected, &e);
        let z = BigRational::from_integer(BigInt::from(r.z.clone()));
        prop_assert_eq!(r.comparison, z.cmp(&e));
        prop_assert_eq!(likelihood_ratio(&phi, 32).unwrap(), z / e);
    }
}

#[test]
fn expected_count_small_values() {
    assert_eq!(expected_count(2, 2, 4).unwrap(), ratio(81, 64));
    assert_eq!(expected_count(3, 2, 2).unwrap(), ratio(9, 2));
    assert_eq!(expected_count(10, 3, 0).unwrap(), ratio(1024, 1));
}

#[test]
fn likelihood_ratio_identity_exhaustive() {
    let slots = all_ordered_clauses(2, 2);
    assert_eq!(slots.len(), 8);
    let mut checked = 0;
    for m in 1..=2usize {
        let mut idx = vec![0usize; m];
        loop {
            let phi = Formula::new(2, 2, idx.iter().map(|&i| slots[i].clone()).collect()).unwrap();
            let unif = num_traits::pow(ratio(1, 8), m);
            let lr_pmf = planted_pmf(&phi, 8) / unif;
            assert_eq!(lr_pmf, likelihood_ratio(&phi, 32).unwrap(), "{phi:?}");
            checked += 1;
            let mut j = 0;
            while j < m && idx[j] == 7 {
                idx[j] = 0;
                j += 1;
            }
            if j == m {
                break;
            }
            idx[j] += 1;
        }
    }
    assert_eq!(checked, 8 + 64);
}

#[test]
fn disjoint_formulas_have_closed_form_count() {
    let mut rng = RngStream::new(2024, 0).rng();
    for _ in 0..100 {
        let k = rng.gen_range(1..=4);
        let n = rng.gen_range(k..=40);
        let m = rng.gen_range(0..=n / k);
        let mut vars: Vec<u32> = (1..=n as u32).collect();
        vars.shuffle(&mut rng);
        let clauses = vars
            .chunks(k)
            .take(m)
            .map(|vs| {
                Clause::new(
                    vs.iter()
                        .map(|&v| Literal::new(v, rng.gen()).unwrap())
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let phi = Formula::new(n, k, clauses).unwrap();
        let z = BigUint::from(2u32).pow((n - k * m) as u32)
            * BigUint::from((1u32 << k) - 1).pow(m as u32);
        assert_eq!(count_models(&phi, 32).unwrap(), z);
        assert_eq!(likelihood_ratio(&phi, 32).unwrap(), BigRational::one());
    }
}

#[test]
fn conditional_expectation_matches_exhaustive_average() {
    let (same, diff) = exhaustive_conditional_means();
    assert_eq!(same, ratio(5, 1));
    assert_eq!(diff, ratio(4, 1));
    assert_eq!(cond_expected_count(3, 2, 2, 1, 0).unwrap(), same);
    assert_eq!(cond_expected_count(3, 2, 2, 0, 1).unwrap(), diff);
    assert_eq!(
        cond_expected_count(3, 2, 2, 0, 0).unwrap(),
        expected_count(3, 2, 2).unwrap()
    );
    assert!(cond_expected_count(3, 2, 2, 2, 1).is_err());
}

#[test]
fn budget_is_enforced() {
    let phi = common::formula(4, &[&[1, 2], &[2, 3], &[3, 4]]);
    assert!(matches!(
        count_models(&phi, 3),
        Err(psl::Error::Budget {
            component: 4,
            limit: 3
        })
    ));
    assert_eq!(
        count_models(&phi, 4).unwrap(),
        BigUint::from(naive_count(&phi))
    );
    assert_eq!(naive_count(&phi), 8);
    assert_eq!(count_report(&phi, 4).unwrap().comparison, Ordering::Greater);
}
