//! Monte Carlo estimation of detection risk and empirical checks of the
//! counting and pair-repetition results.
//!
//! Every trial runs on its own [`RngStream`](crate::rng::RngStream) whose id
//! is derived from the trial index, the hypothesis and the instance shape, so
//! results do not depend on thread count or scheduling.

mod risk;
pub mod stats;
mod verify;

use serde::{Deserialize, Serialize};

use crate::counting::DEFAULT_LIMIT;
use crate::detect::Test;
use crate::error::{Error, Result};

pub use risk::{
    estimate_risk, estimate_risk_with, estimate_sat_probability, sweep, write_csv_header,
    BuiltinDetector, Detector, HypothesisCounts, RateEstimate, RiskEstimate, SweepRow, CSV_HEADER,
};
pub use verify::{
    default_epsilon, log_ratio, verify_concentration, verify_conditional_expectation,
    verify_disjointness, verify_pair_lemma, verify_risk_floor, Check, ConcentrationReport,
    ConcentrationRow, ConditionalReport, DisjointnessReport, GroupPattern, PairLemmaReport,
    PairRegime,
};

/// How the clause count is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Regime {
    /// `m` given directly.
    #[serde(rename = "m")]
    Explicit(usize),
    /// `m = round(Δ n)`.
    #[serde(rename = "delta")]
    Linear(f64),
    /// `m = round(C √n)`.
    #[serde(rename = "csqrt")]
    Sqrt(f64),
}

impl Regime {
    pub fn clauses(&self, n: usize) -> Result<usize> {
        let m = match *self {
            Regime::Explicit(m) => return Ok(m),
            Regime::Linear(delta) => delta * n as f64,
            Regime::Sqrt(c) => c * (n as f64).sqrt(),
        };
        if !m.is_finite() || m < 0.0 || m > u32::MAX as f64 {
            return Err(Error::input(format!(
                "regime parameter yields invalid m = {m}"
            )));
        }
        Ok(m.round() as usize)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Explicit(_) => "explicit",
            Regime::Linear(_) => "linear",
            Regime::Sqrt(_) => "sqrt",
        }
    }

    pub fn param(&self) -> f64 {
        match *self {
            Regime::Explicit(m) => m as f64,
            Regime::Linear(x) | Regime::Sqrt(x) => x,
        }
    }
}

fn default_limit() -> usize {
    DEFAULT_LIMIT
}

/// One cell of a risk experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub n: usize,
    #[serde(flatten)]
    pub regime: Regime,
    pub detector: Test,
    /// Trials per hypothesis.
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

impl ExperimentConfig {
    pub fn m(&self) -> Result<usize> {
        self.regime.clauses(self.n)
    }

    pub fn validate(&self) -> Result<usize> {
        if self.trials == 0 {
            return Err(Error::input("trials must be at least 1"));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::input(format!(
                "need 1 <= k <= n, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        self.m()
    }
}
