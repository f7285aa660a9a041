//! Empirical checks of the pair-repetition bounds, the disjointness bound,
//! the conditional expectation of `Z`, and the direction of `Z / E[Z]`.
//!
//! Each verifier returns a report whose [`Check`]s serialize to
//! `{claim, bound, observed, ci, pass}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::risk::estimate_risk;
use super::stats::{binomial_sigma, mean_and_se, median, wilson, Interval, Z95};
use super::{ExperimentConfig, Regime};
use crate::counting::{compare_to_expected, cond_expected_count, count_models};
use crate::detect::{coupling_stats, lower_bound_m, Test};
use crate::error::{Error, Result};
use crate::formula::{Clause, Formula, Literal};
use crate::rng::{stream_id, RngStream};
use crate::sampler::{ordered_vars, sample_uniform_formula};

const PAIR_TAG: u64 = 0x7061_6972;
const CONC_TAG: u64 = 0x636f_6e63;
const COND_TAG: u64 = 0x636f_6e64;
const DISJ_TAG: u64 = 0x6469_736a;

/// One verified claim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub claim: String,
    pub bound: Option<f64>,
    pub observed: f64,
    pub ci: Option<[f64; 2]>,
    pub pass: bool,
}

impl Check {
    fn new(
        claim: impl Into<String>,
        bound: Option<f64>,
        observed: f64,
        ci: Option<Interval>,
        pass: bool,
    ) -> Self {
        Check {
            claim: claim.into(),
            bound,
            observed,
            ci: ci.map(|iv| [iv.lo, iv.hi]),
            pass,
        }
    }
}

/// Frequency check `observed ≤ bound` with a 3σ binomial allowance at `bound`.
fn frequency_check(claim: String, bound: f64, hits: u64, trials: u64) -> Check {
    let freq = hits as f64 / trials as f64;
    let allowance = 3.0 * binomial_sigma(bound, trials);
    let pass = bound >= 1.0 || freq <= bound + allowance;
    Check::new(
        claim,
        Some(bound),
        freq,
        Some(wilson(hits, trials, Z95)),
        pass,
    )
}

/// Regime for the pair-repetition check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairRegime {
    /// `m = round(Δ n)`; `epsilon` defaults to [`default_epsilon`].
    Linear { delta: f64, epsilon: Option<f64> },
    /// `m = round(C √n)`.
    Sqrt { c: f64 },
}

/// `ε_Δ` defined by `1 − (1 + Δ) e^(−Δ) = 2 ε_Δ`.
pub fn default_epsilon(delta: f64) -> f64 {
    (1.0 - (1.0 + delta) * (-delta).exp()) / 2.0
}

/// Exact probability that a fixed variable is first literal of at least two
/// of `m` uniform clauses over `n` variables.
fn repeat_probability(n: usize, m: usize) -> f64 {
    let q = 1.0 - 1.0 / n as f64;
    let m_f = m as f64;
    let none = q.powf(m_f);
    let one = if m == 0 {
        0.0
    } else {
        m_f * q.powf(m_f - 1.0) / n as f64
    };
    1.0 - none - one
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairLemmaReport {
    pub n: usize,
    pub m: usize,
    pub t: Vec<u64>,
    pub mean_t: f64,
    /// `n` times the exact per-variable repeat probability.
    pub exact_mean_t: f64,
    pub checks: Vec<Check>,
}

/// Samples `trials` uniform formulas and checks the lower-deviation bound on
/// `T`, the number of variables repeated as a first literal.
pub fn verify_pair_lemma(
    regime: PairRegime,
    n: usize,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<PairLemmaReport> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let m = match regime {
        PairRegime::Linear { delta, .. } if delta > 0.0 => Regime::Linear(delta).clauses(n)?,
        PairRegime::Sqrt { c } if c > 0.0 => Regime::Sqrt(c).clauses(n)?,
        _ => return Err(Error::input("regime parameter must be positive")),
    };
    let t: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(
                seed,
                stream_id(&[PAIR_TAG, i, k as u64, n as u64, m as u64]),
            )
            .rng();
            let phi = sample_uniform_formula(n, k, m, &mut rng)?;
            Ok(coupling_stats(&phi).t)
        })
        .collect::<Result<_>>()?;
    let tf: Vec<f64> = t.iter().map(|&x| x as f64).collect();
    let (mean_t, se) = mean_and_se(&tf);
    let ci = (trials > 1).then_some(Interval {
        lo: mean_t - Z95 * se,
        hi: mean_t + Z95 * se,
    });
    let p1 = repeat_probability(n, m);
    let exact_mean_t = n as f64 * p1;

    let mut checks = Vec::new();
    match regime {
        PairRegime::Sqrt { c } => {
            let cut = c * c / 4.0;
            let hits = t.iter().filter(|&&x| (x as f64) < cut).count() as u64;
            checks.push(frequency_check(
                format!("P(T < C^2/4 = {cut}) <= 576/C^2"),
                (576.0 / (c * c)).min(1.0),
                hits,
                trials,
            ));
            let target = c * c / 2.0;
            checks.push(Check::new(
                "E[T] within 10% of C^2/2",
                Some(target),
                mean_t,
                ci,
                (mean_t - target).abs() <= 0.1 * target,
            ));
        }
        PairRegime::Linear { delta, epsilon } => {
            let eps = epsilon.unwrap_or_else(|| default_epsilon(delta));
            let cut = eps * n as f64;
            let hits = t.iter().filter(|&&x| (x as f64) < cut).count() as u64;
            // Chebyshev with Var[T] <= (4 + 3Δ) n; vacuous unless E[T_1] > ε
            let gap = p1 - eps;
            let bound = if gap > 0.0 {
                ((4.0 + 3.0 * delta) / (gap * gap * n as f64)).min(1.0)
            } else {
                1.0
            };
            checks.push(frequency_check(
                format!("P(T < eps*n) <= (4+3*delta)/((E[T_1]-eps)^2 n), eps = {eps} (eps_delta has no closed form beyond its defining limit)"),
                bound,
                hits,
                trials,
            ));
        }
    }
    Ok(PairLemmaReport {
        n,
        m,
        t,
        mean_t,
        exact_mean_t,
        checks,
    })
}

/// `ln(Z / E[Z])`, exactly 0 when `Z = E[Z]` and `-inf` when `Z = 0`.
pub fn log_ratio(z: &BigUint, n: usize, k: usize, m: usize) -> f64 {
    if compare_to_expected(z, n, k, m) == Ordering::Equal {
        return 0.0;
    }
    let ln_expected =
        n as f64 * std::f64::consts::LN_2 + m as f64 * (1.0 - 0.5f64.powi(k as i32)).ln();
    ln_big(z) - ln_expected
}

/// Natural log of a big integer; `-inf` at zero.
fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub n: usize,
    pub m: usize,
    pub feasible: u64,
    pub infeasible: u64,
    /// Fraction of feasible trials with `Z < E[Z]`.
    pub frac_below: f64,
    pub median_log_ratio: f64,
    pub mean_log_ratio: f64,
    pub log_ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub rows: Vec<ConcentrationRow>,
    pub checks: Vec<Check>,
    pub note: &'static str,
}

/// Exact-count Monte Carlo of `log(Z / E[Z])` under the uniform law for each
/// `n` in `n_list`. Checks only directions: the median is negative, it
/// decreases strictly with `n`, and at the largest `n` at least
/// `min_fraction_below` of the draws have `Z < E[Z]`.
pub fn verify_concentration(
    k: usize,
    regime: Regime,
    n_list: &[usize],
    trials: u64,
    seed: u64,
    limit: usize,
    min_fraction_below: f64,
) -> Result<ConcentrationReport> {
    if n_list.is_empty() || trials == 0 {
        return Err(Error::input("need at least one n and one trial"));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let m = regime.clauses(n)?;
        let samples = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngStream::new(
                    seed,
                    stream_id(&[CONC_TAG, i, k as u64, n as u64, m as u64]),
                )
                .rng();
                let phi = sample_uniform_formula(n, k, m, &mut rng)?;
                match count_models(&phi, limit) {
                    Ok(z) => Ok(Some((
                        log_ratio(&z, n, k, m),
                        compare_to_expected(&z, n, k, m) == Ordering::Less,
                    ))),
                    Err(Error::Budget { .. }) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let log_ratios: Vec<f64> = samples.iter().flatten().map(|s| s.0).collect();
        let below = samples.iter().flatten().filter(|s| s.1).count();
        let feasible = log_ratios.len() as u64;
        let finite: Vec<f64> = log_ratios
            .iter()
            .copied()
            .filter(|r| r.is_finite())
            .collect();
        rows.push(ConcentrationRow {
            n,
            m,
            feasible,
            infeasible: trials - feasible,
            frac_below: if feasible == 0 {
                f64::NAN
            } else {
                below as f64 / feasible as f64
            },
            median_log_ratio: median(&log_ratios),
            mean_log_ratio: mean_and_se(&finite).0,
            log_ratios,
        });
    }

    let mut checks = Vec::new();
    for r in &rows {
        checks.push(Check::new(
            format!("median log(Z/E[Z]) < 0 at n = {}", r.n),
            Some(0.0),
            r.median_log_ratio,
            None,
            r.feasible > 0 && r.median_log_ratio < 0.0,
        ));
    }
    if rows.len() > 1 {
        let decreasing = rows
            .windows(2)
            .all(|w| w[1].median_log_ratio < w[0].median_log_ratio);
        let last = rows.last().unwrap();
        checks.push(Check::new(
            "median log(Z/E[Z]) strictly decreasing in n",
            None,
            last.median_log_ratio,
            None,
            decreasing,
        ));
    }
    let last = rows.last().unwrap();
    checks.push(Check::new(
        format!(
            "fraction Z < E[Z] >= {min_fraction_below} at n = {}",
            last.n
        ),
        Some(min_fraction_below),
        last.frac_below,
        Some(wilson(
            (last.frac_below * last.feasible as f64).round() as u64,
            last.feasible,
            Z95,
        )),
        last.feasible > 0 && last.frac_below >= min_fraction_below,
    ));
    Ok(ConcentrationReport {
        rows,
        checks,
        note: "exponential rate constants are existential; only directions are checked",
    })
}

/// A first-literal signature `(G, σ)`: the first variable of every clause,
/// and for each variable heading two or more clauses whether its first two
/// occurrences agree in sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPattern {
    first_vars: Vec<u32>,
    sigma: BTreeMap<u32, i8>,
}

impl GroupPattern {
    /// `sigma` must give ±1 for exactly the variables heading two or more clauses.
    pub fn new(first_vars: Vec<u32>, sigma: BTreeMap<u32, i8>) -> Result<Self> {
        let mut sizes: BTreeMap<u32, usize> = BTreeMap::new();
        for &v in &first_vars {
            if v == 0 {
                return Err(Error::input("variables are 1-indexed"));
            }
            *sizes.entry(v).or_default() += 1;
        }
        for (&v, &s) in &sigma {
            if s != 1 && s != -1 {
                return Err(Error::input(format!(
                    "sigma for variable {v} must be +1 or -1"
                )));
            }
            if sizes.get(&v).copied().unwrap_or(0) < 2 {
                return Err(Error::input(format!(
                    "variable {v} heads fewer than two clauses"
                )));
            }
        }
        if let Some((&v, _)) = sizes
            .iter()
            .find(|(v, &g)| g >= 2 && !sigma.contains_key(v))
        {
            return Err(Error::input(format!("missing sigma for variable {v}")));
        }
        Ok(GroupPattern { first_vars, sigma })
    }

    /// Clauses 1 and 2 headed by variable 1 with sign agreement `sigma`; every
    /// other clause headed by its own fresh variable.
    pub fn single_pair(m: usize, sigma: i8) -> Result<Self> {
        if m < 2 {
            return Err(Error::input("a pair needs m >= 2"));
        }
        let mut first_vars = vec![1, 1];
        first_vars.extend(2..m as u32);
        GroupPattern::new(first_vars, BTreeMap::from([(1, sigma)]))
    }

    pub fn m(&self) -> usize {
        self.first_vars.len()
    }

    /// `(P, D)`: groups with agreeing and disagreeing first pairs.
    pub fn same_different(&self) -> (usize, usize) {
        let p = self.sigma.values().filter(|&&s| s == 1).count();
        (p, self.sigma.len() - p)
    }

    fn max_var(&self) -> u32 {
        self.first_vars.iter().copied().max().unwrap_or(0)
    }

    /// A uniform formula conditioned on this signature.
    fn sample<R: Rng + ?Sized>(&self, n: usize, k: usize, rng: &mut R) -> Formula {
        let mut first_sign: BTreeMap<u32, (bool, usize)> = BTreeMap::new();
        let clauses = self
            .first_vars
            .iter()
            .map(|&v| {
                let seen = first_sign.entry(v).or_insert((false, 0));
                let sign = match (seen.1, self.sigma.get(&v)) {
                    (1, Some(&s)) => (s == 1) == seen.0,
                    _ => rng.gen(),
                };
                if seen.1 == 0 {
                    seen.0 = sign;
                }
                seen.1 += 1;
                let mut lits = Vec::with_capacity(k);
                lits.push(Literal::new(v, sign).unwrap());
                for u in ordered_vars(n - 1, k - 1, rng) {
                    let u = if u >= v { u + 1 } else { u };
                    lits.push(Literal::new(u, rng.gen()).unwrap());
                }
                Clause::new(lits).expect("distinct variables")
            })
            .collect();
        Formula::from_parts_unchecked(n, k, clauses)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalReport {
    pub mean: f64,
    pub std_err: f64,
    pub expected: f64,
    pub expected_exact: String,
    pub relative_error: f64,
    pub checks: Vec<Check>,
}

/// Averages exact `Z` over uniform formulas conditioned on `pattern` and
/// compares with the closed-form conditional expectation.
pub fn verify_conditional_expectation(
    n: usize,
    k: usize,
    pattern: &GroupPattern,
    trials: u64,
    seed: u64,
    limit: usize,
) -> Result<ConditionalReport> {
    if k == 0 || k > n {
        return Err(Error::input("need 1 <= k <= n"));
    }
    if pattern.max_var() as usize > n {
        return Err(Error::input("pattern uses a variable above n"));
    }
    if trials < 2 {
        return Err(Error::input("need at least two trials"));
    }
    let m = pattern.m();
    let (same, different) = pattern.same_different();
    let exact = cond_expected_count(n, k, m, same, different)?;
    let expected = exact.numer().to_f64().unwrap() / exact.denom().to_f64().unwrap();
    let zs = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(
                seed,
                stream_id(&[COND_TAG, i, k as u64, n as u64, m as u64]),
            )
            .rng();
            let phi = pattern.sample(n, k, &mut rng);
            Ok(count_models(&phi, limit)?.to_f64().unwrap())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std_err) = mean_and_se(&zs);
    let ci = Interval {
        lo: mean - Z95 * std_err,
        hi: mean + Z95 * std_err,
    };
    let checks = vec![Check::new(
        format!("mean Z = E[Z | G, sigma] = {exact} (P = {same}, D = {different}) within 3 s.e."),
        Some(expected),
        mean,
        Some(ci),
        (mean - expected).abs() <= 3.0 * std_err,
    )];
    Ok(ConditionalReport {
        mean,
        std_err,
        expected,
        expected_exact: exact.to_string(),
        relative_error: (mean - expected).abs() / expected,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DisjointnessReport {
    pub m: usize,
    pub repeats: u64,
    pub trials: u64,
    pub frequency: f64,
    pub bound: f64,
    pub checks: Vec<Check>,
}

/// At `m = ⌊2√(νn)/k⌋`, measures how often some variable occurs in two
/// clauses and compares with `k²m²/n`.
pub fn verify_disjointness(
    nu: f64,
    n: usize,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<DisjointnessReport> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let m = lower_bound_m(nu, n, k)?.floor() as usize;
    let repeats = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(
                seed,
                stream_id(&[DISJ_TAG, i, k as u64, n as u64, m as u64]),
            )
            .rng();
            let phi = sample_uniform_formula(n, k, m, &mut rng)?;
            let mut vars: Vec<u32> = phi
                .clauses()
                .iter()
                .flat_map(|c| c.literals().iter().map(|l| l.var()))
                .collect();
            vars.sort_unstable();
            Ok(vars.windows(2).any(|w| w[0] == w[1]))
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&r| r)
        .count() as u64;
    let bound = (k * k * m * m) as f64 / n as f64;
    let checks = vec![frequency_check(
        format!("P(some variable in two clauses) <= k^2 m^2 / n at m = {m}"),
        bound,
        repeats,
        trials,
    )];
    Ok(DisjointnessReport {
        m,
        repeats,
        trials,
        frequency: repeats as f64 / trials as f64,
        bound,
        checks,
    })
}

/// At `m = ⌊2√(νn)/k⌋`, estimates the risk of each built-in test and checks it
/// stays above `1/2 − ν` up to the Wilson radius.
pub fn verify_risk_floor(
    nu: f64,
    n: usize,
    k: usize,
    trials: u64,
    seed: u64,
    limit: usize,
) -> Result<Vec<Check>> {
    let m = lower_bound_m(nu, n, k)?.floor() as usize;
    let floor = 0.5 - nu;
    [Test::Sat, Test::Lr, Test::Coupling]
        .into_iter()
        .map(|test| {
            let r = estimate_risk(&ExperimentConfig {
                k,
                n,
                regime: Regime::Explicit(m),
                detector: test,
                trials,
                seed,
                limit,
            })?;
            let slack = r.ci1.radius().max(r.ci2.radius());
            Ok(Check::new(
                format!("risk of {test} >= 1/2 - nu at m = {m}"),
                Some(floor),
                r.risk,
                None,
                r.risk >= floor - slack,
            ))
        })
        .collect()
}
