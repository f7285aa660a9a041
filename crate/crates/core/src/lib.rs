//! Detecting planted satisfying assignments in random k-SAT formulas.
//!
//! The crate provides samplers for the uniform and planted formula laws,
//! exact model counting with component decomposition, the satisfiability,
//! likelihood-ratio and variable-coupling tests, and a Monte Carlo harness
//! that estimates their type I and type II errors.

pub mod cli;
mod components;
pub mod counting;
pub mod detect;
pub mod dimacs;
pub mod error;
pub mod formula;
pub mod harness;
pub mod rng;
pub mod sampler;
pub mod solver;

pub use counting::{
    cond_expected_count, count_models, count_report, expected_count, likelihood_ratio, CountReport,
    DEFAULT_LIMIT, MAX_LIMIT,
};
pub use detect::{
    coupling_sample_bound, coupling_stats, coupling_threshold, lower_bound_m, test_coupling,
    test_lr, test_sat, CouplingStats, Group, Statistic, Test, TestOutcome,
};
pub use dimacs::{emit_dimacs, parse_dimacs, Dimacs, Distribution, Provenance};
pub use error::{Error, Result};
pub use formula::{eval_clause, eval_formula, Assignment, Clause, Formula, Literal};
pub use rng::{PslRng, RngStream};
pub use sampler::{
    sample_nae_planted, sample_planted_clause, sample_planted_formula, sample_planted_mixture,
    sample_uniform_clause, sample_uniform_formula, sample_uniform_sat, PlantedInstance, SatDraw,
};
