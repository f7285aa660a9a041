//! Random formula generation under the uniform, planted, uniform-on-SAT and
//! NAE-planted laws.
//!
//! Every sampler draws an ordered tuple of `k` distinct variables by a sparse
//! partial Fisher–Yates shuffle. The tuple is uniform over ordered k-subsets,
//! which gives a uniform variable set and a uniformly random literal order in
//! one pass. Signs are then drawn as a k-bit pattern.

use rand::Rng;

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, Formula, Literal};
use crate::solver;

/// A formula together with the assignment it was planted at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedInstance {
    pub formula: Formula,
    pub planted: Assignment,
}

/// A uniform-on-SAT draw and the number of uniform formulas it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatDraw {
    pub formula: Formula,
    pub attempts: u64,
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    if k > n {
        return Err(Error::input(format!("k = {k} exceeds n = {n}")));
    }
    if k > 63 {
        return Err(Error::input("k above 63 is not supported"));
    }
    if n > u32::MAX as usize {
        return Err(Error::input("n too large"));
    }
    Ok(())
}

/// First `k` entries of a uniform random permutation of `1..=n`.
pub(crate) fn ordered_vars<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<u32> {
    // positions of the virtual array 0..n that have been swapped away
    let mut moved: Vec<(u32, u32)> = Vec::with_capacity(k);
    let lookup = |moved: &[(u32, u32)], pos: u32| {
        moved
            .iter()
            .rev()
            .find(|(p, _)| *p == pos)
            .map_or(pos, |&(_, v)| v)
    };
    let mut out = Vec::with_capacity(k);
    for i in 0..k as u32 {
        let j = rng.gen_range(i..n as u32);
        let at_j = lookup(&moved, j);
        let at_i = lookup(&moved, i);
        moved.push((j, at_i));
        out.push(at_j + 1);
    }
    out
}

/// Builds a clause where bit `i` of `agree` says whether literal `i` is true under `x`.
fn clause_from_pattern(vars: &[u32], agree: u64, x: &Assignment) -> Clause {
    let lits = vars
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let value = x.get(v).expect("planted assignment covers all variables");
            let truth = agree >> i & 1 == 1;
            Literal::new(v, value == truth).unwrap()
        })
        .collect();
    Clause::new(lits).expect("sampled variables are distinct")
}

/// One clause uniform over the `2^k·C(n,k)` signed clauses, literals in uniform order.
pub fn sample_uniform_clause<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Clause> {
    check_dims(n, k)?;
    Ok(uniform_clause(n, k, rng))
}

fn uniform_clause<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Clause {
    let vars = ordered_vars(n, k, rng);
    let lits = vars
        .into_iter()
        .map(|v| Literal::new(v, rng.gen()).unwrap())
        .collect();
    Clause::new(lits).expect("sampled variables are distinct")
}

/// `m` independent uniform clauses in draw order.
pub fn sample_uniform_formula<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<Formula> {
    check_dims(n, k)?;
    let clauses = (0..m).map(|_| uniform_clause(n, k, rng)).collect();
    Ok(Formula::from_parts_unchecked(n, k, clauses))
}

/// One clause uniform over the `(2^k − 1)·C(n,k)` clauses satisfied by `xstar`.
///
/// The only excluded sign pattern is the one where every literal disagrees
/// with `xstar`.
pub fn sample_planted_clause<R: Rng + ?Sized>(
    xstar: &Assignment,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<Clause> {
    check_dims(n, k)?;
    if xstar.len() != n {
        return Err(Error::input(format!(
            "xstar has length {}, expected {n}",
            xstar.len()
        )));
    }
    Ok(planted_clause(xstar, n, k, rng))
}

fn planted_clause<R: Rng + ?Sized>(xstar: &Assignment, n: usize, k: usize, rng: &mut R) -> Clause {
    let vars = ordered_vars(n, k, rng);
    let agree = rng.gen_range(1..1u64 << k);
    clause_from_pattern(&vars, agree, xstar)
}

/// `m` independent clauses planted at a fixed `xstar`.
pub fn sample_planted_formula<R: Rng + ?Sized>(
    xstar: &Assignment,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<Formula> {
    let n = xstar.len();
    check_dims(n, k)?;
    let clauses = (0..m).map(|_| planted_clause(xstar, n, k, rng)).collect();
    Ok(Formula::from_parts_unchecked(n, k, clauses))
}

fn uniform_assignment<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Assignment {
    Assignment::new((0..n).map(|_| rng.gen()).collect())
}

/// Draws `xstar` uniformly, then `m` clauses planted at it.
pub fn sample_planted_mixture<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<PlantedInstance> {
    check_dims(n, k)?;
    let planted = uniform_assignment(n, rng);
    let formula = sample_planted_formula(&planted, k, m, rng)?;
    Ok(PlantedInstance { formula, planted })
}

/// Rejection sampling of the uniform law conditioned on satisfiability.
///
/// `limit` is the exact-search budget handed to the SAT check.
pub fn sample_uniform_sat<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    rng: &mut R,
    max_attempts: u64,
    limit: usize,
) -> Result<SatDraw> {
    check_dims(n, k)?;
    if max_attempts == 0 {
        return Err(Error::input("max_attempts must be at least 1"));
    }
    for attempt in 1..=max_attempts {
        let formula = sample_uniform_formula(n, k, m, rng)?;
        if solver::solve(&formula, limit)?.is_some() {
            return Ok(SatDraw {
                formula,
                attempts: attempt,
            });
        }
    }
    Err(Error::Exhausted {
        attempts: max_attempts,
    })
}

/// Draws `xstar` uniformly, then `m` clauses that are neither all-true nor
/// all-false under it, so both `xstar` and its complement satisfy the result.
pub fn sample_nae_planted<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<PlantedInstance> {
    if k < 2 {
        return Err(Error::input("NAE planting needs k >= 2"));
    }
    check_dims(n, k)?;
    let planted = uniform_assignment(n, rng);
    let all_true = (1u64 << k) - 1;
    let clauses = (0..m)
        .map(|_| {
            let vars = ordered_vars(n, k, rng);
            let agree = rng.gen_range(1..all_true);
            clause_from_pattern(&vars, agree, &planted)
        })
        .collect();
    Ok(PlantedInstance {
        formula: Formula::from_parts_unchecked(n, k, clauses),
        planted,
    })
}
