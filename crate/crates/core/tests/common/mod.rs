#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use psl::{Assignment, Clause, Formula, Literal, PslRng, RngStream};

pub fn rng(seed: u64, stream: u64) -> PslRng {
    RngStream::new(seed, stream).rng()
}

/// Brute-force model count over all `2^n` bit masks; bit `v - 1` is variable `v`.
pub fn naive_count(phi: &Formula) -> u64 {
    let n = phi.num_vars();
    assert!(n <= 24, "naive oracle is for small n");
    let clauses: Vec<Vec<(usize, bool)>> = phi
        .clauses()
        .iter()
        .map(|c| {
            c.literals()
                .iter()
                .map(|l| (l.var() as usize - 1, l.is_positive()))
                .collect()
        })
        .collect();
    (0u64..1 << n)
        .filter(|&mask| {
            clauses
                .iter()
                .all(|c| c.iter().any(|&(v, pos)| (mask >> v & 1 == 1) == pos))
        })
        .count() as u64
}

pub fn clause(lits: &[i64]) -> Clause {
    Clause::from_dimacs(lits).unwrap()
}

pub fn formula(n: usize, clauses: &[&[i64]]) -> Formula {
    let k = clauses.first().map_or(1, |c| c.len());
    Formula::new(n, k, clauses.iter().map(|c| clause(c)).collect()).unwrap()
}

/// One clause on `k` distinct variables of `1..=n`, literal order and signs arbitrary.
pub fn arb_clause(n: usize, k: usize) -> impl Strategy<Value = Clause> {
    let vars: Vec<u32> = (1..=n as u32).collect();
    (
        Just(vars).prop_shuffle(),
        proptest::collection::vec(any::<bool>(), k),
    )
        .prop_map(move |(vars, signs)| {
            let lits = vars[..k]
                .iter()
                .zip(signs)
                .map(|(&v, s)| Literal::new(v, s).unwrap())
                .collect();
            Clause::new(lits).unwrap()
        })
}

/// Formulas with `k` in `ks`, `k <= n <= max_n` and `m <= max_m`.
pub fn arb_formula(ks: Vec<usize>, max_n: usize, max_m: usize) -> impl Strategy<Value = Formula> {
    proptest::sample::select(ks)
        .prop_flat_map(move |k| (Just(k), k..=max_n, 0..=max_m))
        .prop_flat_map(|(k, n, m)| {
            proptest::collection::vec(arb_clause(n, k), m)
                .prop_map(move |cs| Formula::new(n, k, cs).unwrap())
        })
}

pub fn ratio(a: u64, b: u64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// All ordered clauses of width `k` over `1..=n`.
pub fn all_ordered_clauses(n: u32, k: usize) -> Vec<Clause> {
    fn extend(n: u32, k: usize, prefix: &mut Vec<Literal>, out: &mut Vec<Clause>) {
        if prefix.len() == k {
            out.push(Clause::new(prefix.clone()).unwrap());
            return;
        }
        for v in 1..=n {
            if prefix.iter().any(|l| l.var() == v) {
                continue;
            }
            for pos in [true, false] {
                prefix.push(Literal::new(v, pos).unwrap());
                extend(n, k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, k, &mut Vec::new(), &mut out);
    out
}

/// Planted pmf of an ordered-clause formula from first principles: average
/// over the planted assignment of `∏ 1[x ⊨ c_i] / ((2^k − 1) · #orderings)`.
pub fn planted_pmf(phi: &Formula, slot_size: u64) -> BigRational {
    let n = phi.num_vars();
    let k = phi.width();
    let satisfied_slots = slot_size * ((1 << k) - 1) / (1 << k);
    let mut total = BigRational::zero();
    for mask in 0u64..1 << n {
        let x = Assignment::from_mask(n, mask);
        let mut p = BigRational::one();
        for c in phi.clauses() {
            if c.literals()
                .iter()
                .any(|l| l.holds_with(x.get(l.var()).unwrap()))
            {
                p *= ratio(1, satisfied_slots);
            } else {
                p = BigRational::zero();
            }
        }
        total += p;
    }
    total / BigRational::from_integer(BigInt::from(1u64 << n))
}

/// Exhaustive average of `Z` over ordered two-clause formulas on 3 variables
/// whose clauses share their first variable, split by sign agreement.
pub fn exhaustive_conditional_means() -> (BigRational, BigRational) {
    let slots = all_ordered_clauses(3, 2);
    assert_eq!(slots.len(), 24);
    let (mut same, mut diff) = ((BigUint::zero(), 0u64), (BigUint::zero(), 0u64));
    for a in &slots {
        for b in &slots {
            if a.first().var() != b.first().var() {
                continue;
            }
            let phi = Formula::new(3, 2, vec![a.clone(), b.clone()]).unwrap();
            let z = BigUint::from(naive_count(&phi));
            let bucket = if a.first().is_positive() == b.first().is_positive() {
                &mut same
            } else {
                &mut diff
            };
            bucket.0 += z;
            bucket.1 += 1;
        }
    }
    let mean = |(s, c): (BigUint, u64)| BigRational::new(BigInt::from(s), BigInt::from(c));
    (mean(same), mean(diff))
}
