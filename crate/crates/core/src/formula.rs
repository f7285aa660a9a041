//! Literals, clauses, formulas and assignments.
//!
//! A [`Formula`] is an ordered sequence of width-`k` clauses over variables
//! `1..=n`. Clause order and literal order inside each clause are data: the
//! coupling statistics read the first literal of every clause, so nothing here
//! ever sorts or normalizes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A signed occurrence of a variable. Variables are 1-indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Result<Self> {
        if var == 0 {
            return Err(Error::input("variable index must be at least 1"));
        }
        Ok(Literal { var, positive })
    }

    pub fn pos(var: u32) -> Self {
        Literal::new(var, true).expect("variable index must be at least 1")
    }

    pub fn neg(var: u32) -> Self {
        Literal::new(var, false).expect("variable index must be at least 1")
    }

    /// Builds a literal from its signed DIMACS integer.
    pub fn from_dimacs(value: i64) -> Result<Self> {
        if value == 0 || value.unsigned_abs() > u64::from(u32::MAX) {
            return Err(Error::input(format!("invalid literal {value}")));
        }
        Literal::new(value.unsigned_abs() as u32, value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var);
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    /// The truth value of the literal when its variable takes `value`.
    #[inline]
    pub fn holds_with(self, value: bool) -> bool {
        self.positive == value
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals on pairwise distinct variables, in stored order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        if literals.is_empty() {
            return Err(Error::input("clause must contain at least one literal"));
        }
        for (i, a) in literals.iter().enumerate() {
            if literals[..i].iter().any(|b| b.var == a.var) {
                return Err(Error::input(format!(
                    "variable {} repeated within a clause",
                    a.var
                )));
            }
        }
        Ok(Clause { literals })
    }

    /// Convenience constructor from signed DIMACS integers.
    pub fn from_dimacs(values: &[i64]) -> Result<Self> {
        let literals = values
            .iter()
            .map(|&v| Literal::from_dimacs(v))
            .collect::<Result<Vec<_>>>()?;
        Clause::new(literals)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    /// The literal in position 1 of the stored order.
    pub fn first(&self) -> Literal {
        self.literals[0]
    }

    pub fn max_var(&self) -> u32 {
        self.literals.iter().map(|l| l.var).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &Assignment) -> Result<bool> {
        let mut sat = false;
        for lit in &self.literals {
            let value = x.get(lit.var).ok_or_else(|| {
                Error::input(format!(
                    "variable {} outside assignment of length {}",
                    lit.var,
                    x.len()
                ))
            })?;
            sat |= lit.holds_with(value);
        }
        Ok(sat)
    }
}

/// Evaluates one clause under an assignment.
pub fn eval_clause(clause: &Clause, x: &Assignment) -> Result<bool> {
    clause.eval(x)
}

/// A k-CNF formula `C_1 ∧ … ∧ C_m` over variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    k: usize,
    clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(n: usize, k: usize, clauses: Vec<Clause>) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("clause width k must be at least 1"));
        }
        if n > u32::MAX as usize {
            return Err(Error::input("too many variables"));
        }
        for (i, c) in clauses.iter().enumerate() {
            if c.width() != k {
                return Err(Error::input(format!(
                    "clause {} has width {}, expected {k}",
                    i + 1,
                    c.width()
                )));
            }
            if c.max_var() as usize > n {
                return Err(Error::input(format!(
                    "clause {} uses variable {} > n = {n}",
                    i + 1,
                    c.max_var()
                )));
            }
        }
        Ok(Formula { n, k, clauses })
    }

    /// The formula with no clauses.
    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Formula::new(n, k, Vec::new())
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(n: usize, k: usize, clauses: Vec<Clause>) -> Self {
        debug_assert!(Formula::new(n, k, clauses.clone()).is_ok());
        Formula { n, k, clauses }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> usize {
        self.k
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn eval(&self, x: &Assignment) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::input(format!(
                "assignment has length {}, formula has {} variables",
                x.len(),
                self.n
            )));
        }
        for c in &self.clauses {
            if !c.eval(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A new formula with `clause` appended.
    pub fn with_clause(&self, clause: Clause) -> Result<Formula> {
        let mut clauses = self.clauses.clone();
        clauses.push(clause);
        Formula::new(self.n, self.k, clauses)
    }

    /// Flips the sign of every literal on a variable set to 1 in `x`.
    ///
    /// `y` satisfies the result iff `y ⊕ x` satisfies `self`.
    pub fn flipped(&self, x: &Assignment) -> Result<Formula> {
        if x.len() != self.n {
            return Err(Error::input("flip mask length differs from n"));
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| Clause {
                literals: c
                    .literals
                    .iter()
                    .map(|&l| {
                        if x.bits[l.var as usize - 1] {
                            l.negated()
                        } else {
                            l
                        }
                    })
                    .collect(),
            })
            .collect();
        Ok(Formula::from_parts_unchecked(self.n, self.k, clauses))
    }

    /// Renames variable `v` to `perm[v - 1]`. `perm` must be a permutation of `1..=n`.
    pub fn renamed(&self, perm: &[u32]) -> Result<Formula> {
        if perm.len() != self.n {
            return Err(Error::input("permutation length differs from n"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            let idx = (p as usize).wrapping_sub(1);
            if idx >= self.n || std::mem::replace(&mut seen[idx], true) {
                return Err(Error::input("not a permutation of 1..=n"));
            }
        }
        let clauses = self
            .clauses
            .iter()
            .map(|c| Clause {
                literals: c
                    .literals
                    .iter()
                    .map(|l| Literal {
                        var: perm[l.var as usize - 1],
                        positive: l.positive,
                    })
                    .collect(),
            })
            .collect();
        Ok(Formula::from_parts_unchecked(self.n, self.k, clauses))
    }
}

/// Evaluates the conjunction of all clauses; the empty formula is true.
pub fn eval_formula(phi: &Formula, x: &Assignment) -> Result<bool> {
    phi.eval(x)
}

/// A point of `{0,1}^n`. Bit `v - 1` holds the value of variable `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Assignment {
            bits: vec![false; n],
        }
    }

    /// The assignment whose bits are the low `n` bits of `mask`, variable 1 in bit 0.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64);
        Assignment {
            bits: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Value of variable `var` (1-indexed).
    #[inline]
    pub fn get(&self, var: u32) -> Option<bool> {
        (var as usize)
            .checked_sub(1)
            .and_then(|i| self.bits.get(i).copied())
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn complement(&self) -> Assignment {
        Assignment {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// Bitstring with variable 1 first.
impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::input(format!("invalid bit {other:?} in assignment"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Assignment::new)
    }
}
