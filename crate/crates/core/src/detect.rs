//! The satisfiability, likelihood-ratio and variable-coupling tests.
//!
//! Each test maps a formula to a decision: 1 for "planted", 0 for "uniform".
//! All thresholds are compared in exact integer arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::counting::{count_report, CountReport};
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};
use crate::solver;

/// Clauses whose first literal is on one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    /// Zero-based clause positions, ascending.
    pub clauses: Vec<usize>,
    /// +1 if the first two occurrences share a sign, −1 if not, 0 with fewer than two.
    pub sigma: i8,
}

/// First-literal repetition statistics and the group signature `(G, σ)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CouplingStats {
    /// Variables appearing at least twice as a first literal.
    pub t: u64,
    /// Of those, first two occurrences with the same sign.
    pub p: u64,
    /// Of those, first two occurrences with different signs.
    pub d: u64,
    /// Groups keyed by variable; variables never in first position are absent.
    pub groups: BTreeMap<u32, Group>,
}

pub fn coupling_stats(phi: &Formula) -> CouplingStats {
    let mut groups: BTreeMap<u32, (Group, bool)> = BTreeMap::new();
    for (i, c) in phi.clauses().iter().enumerate() {
        let first = c.first();
        let entry = groups.entry(first.var()).or_insert_with(|| {
            (
                Group {
                    clauses: Vec::new(),
                    sigma: 0,
                },
                first.is_positive(),
            )
        });
        let (group, first_sign) = entry;
        if group.clauses.len() == 1 {
            group.sigma = if first.is_positive() == *first_sign {
                1
            } else {
                -1
            };
        }
        group.clauses.push(i);
    }
    let mut stats = CouplingStats::default();
    for (var, (group, _)) in groups {
        match group.sigma {
            1 => stats.p += 1,
            -1 => stats.d += 1,
            _ => {}
        }
        stats.groups.insert(var, group);
    }
    stats.t = stats.p + stats.d;
    stats
}

/// Value carried alongside a decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// Exact model count and its uniform expectation.
    Count(Box<CountReport>),
    /// A satisfying assignment, if one was found.
    Witness(Option<Assignment>),
    /// `P` out of `T` coupled variables.
    Coupling { p: u64, t: u64, d: u64 },
    /// The detector could not run within its budget.
    None,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestOutcome {
    /// Meaningful only when `feasible`.
    pub decision: bool,
    pub statistic: Statistic,
    pub feasible: bool,
}

impl TestOutcome {
    pub fn decided(decision: bool, statistic: Statistic) -> Self {
        TestOutcome {
            decision,
            statistic,
            feasible: true,
        }
    }

    pub fn infeasible() -> Self {
        TestOutcome {
            decision: false,
            statistic: Statistic::None,
            feasible: false,
        }
    }

    pub fn decision_bit(&self) -> u8 {
        u8::from(self.decision)
    }
}

/// The coupling threshold `1/2 + 1/(4 (2^k − 1)^2)` as `(numerator, denominator)`.
pub fn coupling_threshold_parts(k: usize) -> (u128, u128) {
    let q = ((1u128 << k.min(63)) - 1).pow(2);
    (2 * q + 1, 4 * q)
}

pub fn coupling_threshold(k: usize) -> BigRational {
    let (num, den) = coupling_threshold_parts(k);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rejects iff `P/T` exceeds the coupling threshold; `T = 0` never rejects.
pub fn test_coupling(phi: &Formula) -> TestOutcome {
    let stats = coupling_stats(phi);
    let decision = coupling_decision(stats.p, stats.t, phi.width());
    TestOutcome::decided(
        decision,
        Statistic::Coupling {
            p: stats.p,
            t: stats.t,
            d: stats.d,
        },
    )
}

pub(crate) fn coupling_decision(p: u64, t: u64, k: usize) -> bool {
    let (num, den) = coupling_threshold_parts(k);
    t > 0 && u128::from(p) * den > u128::from(t) * num
}

/// `(2(2^k − 1))^2 √(2 ln(2/δ)) ∨ √(1024/δ)`: the square-root-regime constant
/// above which the coupling test has risk at most `δ`.
pub fn coupling_sample_bound(k: usize, delta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::input("coupling bound needs k >= 2"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let q = 2.0 * ((2f64).powi(k as i32) - 1.0);
    let hoeffding = q * q * (2.0 * (2.0 / delta).ln()).sqrt();
    let chebyshev = (1024.0 / delta).sqrt();
    Ok(hoeffding.max(chebyshev))
}

/// Rejects iff `Z(φ) > E[Z]` strictly. Infeasible when counting exceeds `limit`.
pub fn test_lr(phi: &Formula, limit: usize) -> Result<TestOutcome> {
    match count_report(phi, limit) {
        Ok(report) => {
            let decision = report.comparison == std::cmp::Ordering::Greater;
            Ok(TestOutcome::decided(
                decision,
                Statistic::Count(Box::new(report)),
            ))
        }
        Err(Error::Budget { .. }) => Ok(TestOutcome::infeasible()),
        Err(e) => Err(e),
    }
}

/// Rejects iff `φ` is satisfiable.
pub fn test_sat(phi: &Formula, limit: usize) -> Result<TestOutcome> {
    match solver::solve(phi, limit) {
        Ok(witness) => Ok(TestOutcome::decided(
            witness.is_some(),
            Statistic::Witness(witness),
        )),
        Err(Error::Budget { .. }) => Ok(TestOutcome::infeasible()),
        Err(e) => Err(e),
    }
}

/// `2√(νn)/k`: at or below this many clauses no test beats risk `1/2 − ν`.
pub fn lower_bound_m(nu: f64, n: usize, k: usize) -> Result<f64> {
    if !(nu > 0.0 && nu < 0.5) {
        return Err(Error::input(format!("nu must lie in (0, 1/2), got {nu}")));
    }
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    Ok(2.0 * (nu * n as f64).sqrt() / k as f64)
}

/// Which of the three tests to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Test {
    Sat,
    Lr,
    Coupling,
}

impl Test {
    pub fn as_str(self) -> &'static str {
        match self {
            Test::Sat => "sat",
            Test::Lr => "lr",
            Test::Coupling => "coupling",
        }
    }

    pub fn run(self, phi: &Formula, limit: usize) -> Result<TestOutcome> {
        match self {
            Test::Sat => test_sat(phi, limit),
            Test::Lr => test_lr(phi, limit),
            Test::Coupling => Ok(test_coupling(phi)),
        }
    }
}

impl fmt::Display for Test {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Test {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sat" => Ok(Test::Sat),
            "lr" => Ok(Test::Lr),
            "coupling" | "cou" => Ok(Test::Coupling),
            _ => Err(Error::input(format!("unknown test {s:?}"))),
        }
    }
}

/// `Z` as carried by an LR outcome.
pub fn outcome_count(outcome: &TestOutcome) -> Option<&BigUint> {
    match &outcome.statistic {
        Statistic::Count(r) => Some(&r.z),
        _ => None,
    }
}
