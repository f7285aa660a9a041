//! Exact model counting and the closed-form moments of `Z`.
//!
//! `Z(φ)` is computed per connected component of the variable-interaction
//! graph: variables that occur in no clause contribute a factor of two each,
//! and every component is enumerated exhaustively, least-index variable
//! first, cutting a branch as soon as some clause has all of its literals
//! false. A branch in which every clause is already satisfied contributes
//! `2^(unassigned)` without further descent.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::components::{decompose, Component};
use crate::error::{Error, Result};
use crate::formula::Formula;

/// Largest component budget accepted by the exact routines.
pub const MAX_LIMIT: usize = 120;

/// Default component budget.
pub const DEFAULT_LIMIT: usize = 32;

/// Exact count, exact expectation, and their comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub z: BigUint,
    pub expected: BigRational,
    pub comparison: Ordering,
}

impl CountReport {
    pub fn expected_num(&self) -> &BigInt {
        self.expected.numer()
    }

    pub fn expected_den(&self) -> &BigInt {
        self.expected.denom()
    }

    /// `Z / E[Z]`.
    pub fn ratio(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.z.clone())) / &self.expected
    }
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > 63 {
        return Err(Error::input(format!("unsupported clause width k = {k}")));
    }
    Ok(())
}

/// `E[Z] = 2^n (2^k − 1)^m / 2^(km)` under the uniform law, in lowest terms.
pub fn expected_count(n: usize, k: usize, m: usize) -> Result<BigRational> {
    check_k(k)?;
    let base = BigInt::from((1u64 << k) - 1);
    let num = pow2(n) * num_traits::pow(base, m);
    Ok(BigRational::new(num, pow2(k * m)))
}

fn check_limit(limit: usize) -> Result<()> {
    if limit > MAX_LIMIT {
        return Err(Error::input(format!(
            "limit {limit} exceeds maximum {MAX_LIMIT}"
        )));
    }
    Ok(())
}

/// Fails when any component is larger than `limit` variables.
pub(crate) fn components_within(phi: &Formula, limit: usize) -> Result<(Vec<Component>, usize)> {
    check_limit(limit)?;
    let (comps, untouched) = decompose(phi);
    if let Some(big) = comps.iter().map(Component::size).max() {
        if big > limit {
            return Err(Error::Budget {
                component: big,
                limit,
            });
        }
    }
    Ok((comps, untouched))
}

struct Enumerator<'a> {
    comp: &'a Component,
    occ: Vec<Vec<(usize, usize)>>,
    false_count: Vec<usize>,
    true_count: Vec<usize>,
    open: usize,
}

impl<'a> Enumerator<'a> {
    fn new(comp: &'a Component) -> Self {
        Enumerator {
            occ: comp.occurrences(),
            false_count: vec![0; comp.clauses.len()],
            true_count: vec![0; comp.clauses.len()],
            open: comp.clauses.len(),
            comp,
        }
    }

    /// Returns false when some clause becomes fully falsified.
    fn assign(&mut self, var: usize, value: bool) -> bool {
        let mut ok = true;
        for &(c, pos) in &self.occ[var] {
            let (_, positive) = self.comp.clauses[c][pos];
            if positive == value {
                self.true_count[c] += 1;
                if self.true_count[c] == 1 {
                    self.open -= 1;
                }
            } else {
                self.false_count[c] += 1;
                if self.true_count[c] == 0 && self.false_count[c] == self.comp.clauses[c].len() {
                    ok = false;
                }
            }
        }
        ok
    }

    fn unassign(&mut self, var: usize, value: bool) {
        for &(c, pos) in &self.occ[var] {
            let (_, positive) = self.comp.clauses[c][pos];
            if positive == value {
                self.true_count[c] -= 1;
                if self.true_count[c] == 0 {
                    self.open += 1;
                }
            } else {
                self.false_count[c] -= 1;
            }
        }
    }

    fn count(&mut self, depth: usize) -> u128 {
        let size = self.comp.size();
        if self.open == 0 {
            return 1u128 << (size - depth);
        }
        // an open clause always has an unassigned literal here, so depth < size
        let mut total = 0;
        for value in [false, true] {
            if self.assign(depth, value) {
                total += self.count(depth + 1);
            }
            self.unassign(depth, value);
        }
        total
    }
}

pub(crate) fn count_component(comp: &Component) -> u128 {
    Enumerator::new(comp).count(0)
}

/// Exact number of satisfying assignments of `phi`.
///
/// Refuses with [`Error::Budget`] when a component has more than `limit`
/// variables.
pub fn count_models(phi: &Formula, limit: usize) -> Result<BigUint> {
    let (comps, untouched) = components_within(phi, limit)?;
    let mut z = BigUint::one() << untouched;
    for comp in &comps {
        let c = count_component(comp);
        if c == 0 {
            return Ok(BigUint::zero());
        }
        z *= BigUint::from(c);
    }
    Ok(z)
}

/// Exact `Z`, `E[Z]`, and how they compare.
pub fn count_report(phi: &Formula, limit: usize) -> Result<CountReport> {
    let z = count_models(phi, limit)?;
    let expected = expected_count(phi.num_vars(), phi.width(), phi.num_clauses())?;
    let comparison = compare_to_expected(&z, phi.num_vars(), phi.width(), phi.num_clauses());
    Ok(CountReport {
        z,
        expected,
        comparison,
    })
}

/// Compares `z` with `E[Z]` as `z · 2^(km)` against `2^n (2^k − 1)^m`.
pub fn compare_to_expected(z: &BigUint, n: usize, k: usize, m: usize) -> Ordering {
    let lhs = z << (k * m);
    let rhs = num_traits::pow(BigUint::from((1u64 << k) - 1), m) << n;
    lhs.cmp(&rhs)
}

/// The likelihood ratio `P_planted(φ) / P_unif(φ) = Z(φ) / E[Z]`, exactly.
pub fn likelihood_ratio(phi: &Formula, limit: usize) -> Result<BigRational> {
    Ok(count_report(phi, limit)?.ratio())
}

/// `E[Z | (G, σ)] = E[Z] (1 + β)^P (1 − β)^D` with `β = 1 / (2^k − 1)^2`.
///
/// `same` and `different` are the numbers of first-literal groups whose first
/// two occurrences agree or disagree in sign.
pub fn cond_expected_count(
    n: usize,
    k: usize,
    m: usize,
    same: usize,
    different: usize,
) -> Result<BigRational> {
    if same + different > m {
        return Err(Error::input("P + D cannot exceed m"));
    }
    let base = expected_count(n, k, m)?;
    let q = BigInt::from((1u64 << k) - 1);
    let q2 = &q * &q;
    let up = BigRational::new(&q2 + 1, q2.clone());
    let down = BigRational::new(&q2 - 1, q2);
    Ok(base * num_traits::pow(up, same) * num_traits::pow(down, different))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn formula(n: usize, clauses: &[&[i64]]) -> Formula {
        let k = clauses.first().map_or(2, |c| c.len());
        Formula::new(
            n,
            k,
            clauses
                .iter()
                .map(|c| Clause::from_dimacs(c).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn expected_count_values() {
        assert_eq!(expected_count(2, 2, 1).unwrap(), int(3));
        assert_eq!(expected_count(4, 2, 2).unwrap(), int(9));
        assert_eq!(expected_count(3, 3, 1).unwrap(), int(7));
        assert_eq!(expected_count(2, 2, 4).unwrap(), ratio(81, 64));
    }

    #[test]
    fn count_values() {
        assert_eq!(
            count_models(&Formula::empty(5, 3).unwrap(), 10).unwrap(),
            BigUint::from(32u32)
        );
        assert_eq!(
            count_models(&formula(2, &[&[1, 2]]), 10).unwrap(),
            BigUint::from(3u32)
        );
        let contradiction = formula(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert_eq!(count_models(&contradiction, 10).unwrap(), BigUint::zero());
        assert_eq!(
            count_models(&formula(4, &[&[1, 2], &[3, 4]]), 10).unwrap(),
            BigUint::from(9u32)
        );
    }

    #[test]
    fn budget_is_enforced() {
        let f = formula(4, &[&[1, 2], &[2, 3], &[3, 4]]);
        assert_eq!(
            count_models(&f, 3),
            Err(Error::Budget {
                component: 4,
                limit: 3
            })
        );
        assert!(count_models(&f, 4).is_ok());
        assert!(count_models(&f, MAX_LIMIT + 1).is_err());
    }

    #[test]
    fn likelihood_ratio_values() {
        assert_eq!(
            likelihood_ratio(&formula(4, &[&[1, 2], &[-3, 4]]), 10).unwrap(),
            int(1)
        );
        let contradiction = formula(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert_eq!(likelihood_ratio(&contradiction, 10).unwrap(), int(0));
        // Z = 3 by hand; E[Z] = 4 * 9/16 = 9/4
        let twice = formula(2, &[&[1, 2], &[1, 2]]);
        let report = count_report(&twice, 10).unwrap();
        assert_eq!(report.z, BigUint::from(3u32));
        assert_eq!(report.expected, ratio(9, 4));
        assert_eq!(report.comparison, Ordering::Greater);
        assert_eq!(likelihood_ratio(&twice, 10).unwrap(), ratio(4, 3));
    }

    #[test]
    fn report_exposes_lowest_terms() {
        let contradiction = formula(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        let r = count_report(&contradiction, 10).unwrap();
        assert_eq!(r.expected_num(), &BigInt::from(81));
        assert_eq!(r.expected_den(), &BigInt::from(64));
        assert_eq!(r.comparison, Ordering::Less);
    }

    #[test]
    fn conditional_expectation_reduces_to_mean() {
        for (n, k, m) in [(3, 2, 2), (10, 3, 7), (1, 1, 0), (20, 4, 13)] {
            assert_eq!(
                cond_expected_count(n, k, m, 0, 0).unwrap(),
                expected_count(n, k, m).unwrap()
            );
        }
        assert_eq!(cond_expected_count(3, 2, 2, 1, 0).unwrap(), int(5));
        assert_eq!(cond_expected_count(3, 2, 2, 0, 1).unwrap(), int(4));
        assert!(cond_expected_count(3, 2, 2, 2, 1).is_err());
    }
}
