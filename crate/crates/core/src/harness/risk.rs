use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{wilson, Interval, Z95};
use super::ExperimentConfig;
use crate::detect::{Test, TestOutcome};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::rng::{stream_id, PslRng, RngStream, GENERATOR};
use crate::sampler::{sample_planted_mixture, sample_uniform_formula};

/// Exact CSV header written by [`sweep`] and the `risk` subcommand.
pub const CSV_HEADER: [&str; 14] = [
    "detector",
    "k",
    "n",
    "m",
    "regime",
    "regime_param",
    "trials",
    "seed",
    "type1",
    "type2",
    "risk",
    "ci1",
    "ci2",
    "infeasible",
];

const RISK_TAG: u64 = 0x7269_736b;
const SATP_TAG: u64 = 0x7361_7470;

/// A test applied to one formula. The generator is the trial's own stream,
/// positioned just after the formula was drawn.
pub trait Detector: Sync {
    fn detect(&self, phi: &Formula, rng: &mut PslRng) -> Result<TestOutcome>;
}

impl<F> Detector for F
where
    F: Fn(&Formula, &mut PslRng) -> Result<TestOutcome> + Sync,
{
    fn detect(&self, phi: &Formula, rng: &mut PslRng) -> Result<TestOutcome> {
        self(phi, rng)
    }
}

/// One of the three built-in tests with its search budget.
#[derive(Clone, Copy, Debug)]
pub struct BuiltinDetector {
    pub test: Test,
    pub limit: usize,
}

impl Detector for BuiltinDetector {
    fn detect(&self, phi: &Formula, _rng: &mut PslRng) -> Result<TestOutcome> {
        self.test.run(phi, self.limit)
    }
}

/// Decisions under one hypothesis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HypothesisCounts {
    /// Trials with decision 1.
    pub rejections: u64,
    pub feasible: u64,
    pub infeasible: u64,
}

impl HypothesisCounts {
    fn from_decisions(decisions: &[Option<bool>]) -> Self {
        let mut c = HypothesisCounts::default();
        for d in decisions {
            match d {
                Some(true) => {
                    c.rejections += 1;
                    c.feasible += 1;
                }
                Some(false) => c.feasible += 1,
                None => c.infeasible += 1,
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RiskEstimate {
    pub config: ExperimentConfig,
    /// Resolved clause count.
    pub m: usize,
    /// Empirical `P_unif(Ψ = 1)` over feasible trials.
    pub type1: f64,
    /// Empirical `P_planted(Ψ = 0)` over feasible trials.
    pub type2: f64,
    pub risk: f64,
    /// 95% Wilson intervals for the two error rates.
    pub ci1: Interval,
    pub ci2: Interval,
    pub uniform: HypothesisCounts,
    pub planted: HypothesisCounts,
    pub infeasible: u64,
    pub generator: &'static str,
}

#[derive(Clone, Copy)]
enum Hypothesis {
    Uniform = 0,
    Planted = 1,
}

fn run_trials(
    cfg: &ExperimentConfig,
    m: usize,
    hyp: Hypothesis,
    detector: &dyn Detector,
) -> Result<HypothesisCounts> {
    let decisions = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let id = stream_id(&[
                RISK_TAG,
                hyp as u64,
                i,
                cfg.k as u64,
                cfg.n as u64,
                m as u64,
            ]);
            let mut rng = RngStream::new(cfg.seed, id).rng();
            let phi = match hyp {
                Hypothesis::Uniform => sample_uniform_formula(cfg.n, cfg.k, m, &mut rng)?,
                Hypothesis::Planted => sample_planted_mixture(cfg.n, cfg.k, m, &mut rng)?.formula,
            };
            let out = detector.detect(&phi, &mut rng)?;
            Ok(out.feasible.then_some(out.decision))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HypothesisCounts::from_decisions(&decisions))
}

/// Runs `trials` uniform and `trials` planted draws through `detector`.
pub fn estimate_risk_with(cfg: &ExperimentConfig, detector: &dyn Detector) -> Result<RiskEstimate> {
    let m = cfg.validate()?;
    let uniform = run_trials(cfg, m, Hypothesis::Uniform, detector)?;
    let planted = run_trials(cfg, m, Hypothesis::Planted, detector)?;
    if uniform.feasible == 0 || planted.feasible == 0 {
        return Err(Error::AllInfeasible {
            trials: uniform.infeasible.max(planted.infeasible),
        });
    }
    let type1 = uniform.rejections as f64 / uniform.feasible as f64;
    let accepted = planted.feasible - planted.rejections;
    let type2 = accepted as f64 / planted.feasible as f64;
    Ok(RiskEstimate {
        config: cfg.clone(),
        m,
        type1,
        type2,
        risk: type1.max(type2),
        ci1: wilson(uniform.rejections, uniform.feasible, Z95),
        ci2: wilson(accepted, planted.feasible, Z95),
        infeasible: uniform.infeasible + planted.infeasible,
        uniform,
        planted,
        generator: GENERATOR,
    })
}

/// [`estimate_risk_with`] using the configured built-in test.
pub fn estimate_risk(cfg: &ExperimentConfig) -> Result<RiskEstimate> {
    estimate_risk_with(
        cfg,
        &BuiltinDetector {
            test: cfg.detector,
            limit: cfg.limit,
        },
    )
}

/// One row of a sweep; failed rows keep their error and the sweep moves on.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub result: Result<RiskEstimate>,
}

pub fn write_csv_header<W: Write>(out: &mut csv::Writer<W>) -> Result<()> {
    out.write_record(CSV_HEADER).map_err(io_err)?;
    out.flush().map_err(|e| Error::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_row<W: Write>(out: &mut csv::Writer<W>, row: &SweepRow) -> Result<()> {
    let c = &row.config;
    let m = c.m().map(|m| m.to_string()).unwrap_or_default();
    let mut rec = vec![
        c.detector.to_string(),
        c.k.to_string(),
        c.n.to_string(),
        m,
        c.regime.name().to_string(),
        c.regime.param().to_string(),
        c.trials.to_string(),
        c.seed.to_string(),
    ];
    match &row.result {
        Ok(r) => rec.extend([
            r.type1.to_string(),
            r.type2.to_string(),
            r.risk.to_string(),
            r.ci1.radius().to_string(),
            r.ci2.radius().to_string(),
            r.infeasible.to_string(),
        ]),
        Err(e) => {
            let infeasible = match e {
                Error::AllInfeasible { .. } => (2 * c.trials).to_string(),
                _ => String::new(),
            };
            rec.extend(["NA", "NA", "NA", "NA", "NA"].map(String::from));
            rec.push(infeasible);
        }
    }
    out.write_record(&rec).map_err(io_err)?;
    out.flush().map_err(|e| Error::Io(e.to_string()))
}

/// Estimates every config in order, writing and flushing one CSV row per
/// config as soon as it completes.
pub fn sweep<W: Write>(grid: &[ExperimentConfig], out: W) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::input("sweep grid is empty"));
    }
    let mut w = csv::Writer::from_writer(out);
    write_csv_header(&mut w)?;
    let mut rows = Vec::with_capacity(grid.len());
    for cfg in grid {
        let row = SweepRow {
            config: cfg.clone(),
            result: estimate_risk(cfg),
        };
        write_row(&mut w, &row)?;
        rows.push(row);
    }
    Ok(rows)
}

/// Empirical probability that a uniform formula is satisfiable.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub successes: u64,
    pub feasible: u64,
    pub infeasible: u64,
    pub rate: f64,
    pub ci: Interval,
}

/// Estimates `P_unif(φ ∈ SAT)`, which equals `1 − d_TV(P_unif, P_SAT)`.
pub fn estimate_sat_probability(
    k: usize,
    n: usize,
    m: usize,
    trials: u64,
    seed: u64,
    limit: usize,
) -> Result<RateEstimate> {
    if trials == 0 {
        return Err(Error::input("trials must be at least 1"));
    }
    let decisions = (0..trials)
        .into_par_iter()
        .map(|i| {
            let id = stream_id(&[SATP_TAG, i, k as u64, n as u64, m as u64]);
            let mut rng = RngStream::new(seed, id).rng();
            let phi = sample_uniform_formula(n, k, m, &mut rng)?;
            let out = crate::detect::test_sat(&phi, limit)?;
            Ok(out.feasible.then_some(out.decision))
        })
        .collect::<Result<Vec<_>>>()?;
    let c = HypothesisCounts::from_decisions(&decisions);
    if c.feasible == 0 {
        return Err(Error::AllInfeasible { trials });
    }
    Ok(RateEstimate {
        successes: c.rejections,
        feasible: c.feasible,
        infeasible: c.infeasible,
        rate: c.rejections as f64 / c.feasible as f64,
        ci: wilson(c.rejections, c.feasible, Z95),
    })
}
