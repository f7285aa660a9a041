//! Command-line front end.
//!
//! ```text
//! psl gen    --dist <law> --k K --n N (--m M | --delta D | --csqrt C) [--seed S] [--out FILE]
//! psl count  [--in FILE] [--limit L]
//! psl detect --test <sat|lr|coupling> [--in FILE] [--limit L]
//! psl risk   --test T --k K --n N (--m | --delta | --csqrt) --trials R [--seed S] [--jobs J]
//! psl sweep  --grid FILE [--seed S] [--jobs J] [--out FILE]
//! psl verify <pair|concentration|conditional|disjoint|satprob|risk-floor> ...
//! ```
//!
//! `count` and `detect` print one `key=value` line. `risk` and `sweep` print
//! CSV, `verify` prints a JSON report. The effective seed and the resolved
//! clause count go to stderr. Exit codes: 0 success, 1 bad input, 2 budget
//! exceeded or infeasible, 3 a verification check failed.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::counting::{count_report, DEFAULT_LIMIT};
use crate::detect::{coupling_threshold, Statistic, Test};
use crate::dimacs::{emit_dimacs, parse_dimacs, Distribution, Provenance};
use crate::error::{Error, Result};
use crate::harness::{
    estimate_sat_probability, sweep, verify_concentration, verify_conditional_expectation,
    verify_disjointness, verify_pair_lemma, verify_risk_floor, Check, ExperimentConfig,
    GroupPattern, PairRegime, Regime, SweepRow,
};
use crate::rng::{stream_id, RngStream};
use crate::sampler::{
    sample_nae_planted, sample_planted_mixture, sample_uniform_formula, sample_uniform_sat,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

const GEN_TAG: u64 = 0x0067_656e;

#[derive(Parser, Debug)]
#[command(
    name = "psl",
    version,
    about = "Planted-solution laboratory for random k-SAT"
)]
struct Cli {
    /// Worker threads for Monte Carlo subcommands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a formula and write it as DIMACS.
    Gen(GenArgs),
    /// Count models exactly and compare with E[Z].
    Count(CountArgs),
    /// Run one test on a formula.
    Detect(DetectArgs),
    /// Estimate type I, type II and maximum risk of one test.
    Risk(RiskArgs),
    /// Run risk estimates for every config in a JSON grid.
    Sweep(SweepArgs),
    /// Empirical checks, reported as JSON.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
struct RegimeArgs {
    /// Number of clauses.
    #[arg(long)]
    m: Option<usize>,
    /// Linear regime: m = round(delta * n).
    #[arg(long)]
    delta: Option<f64>,
    /// Square-root regime: m = round(csqrt * sqrt(n)).
    #[arg(long)]
    csqrt: Option<f64>,
}

impl RegimeArgs {
    fn regime(self) -> Regime {
        match (self.m, self.delta, self.csqrt) {
            (Some(m), _, _) => Regime::Explicit(m),
            (_, Some(d), _) => Regime::Linear(d),
            (_, _, Some(c)) => Regime::Sqrt(c),
            _ => unreachable!("clap enforces exactly one regime flag"),
        }
    }
}

#[derive(Args, Debug)]
struct SeedArg {
    /// Master seed; falls back to $PSL_SEED, then to the clock.
    #[arg(long, env = "PSL_SEED")]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value = "uniform")]
    dist: Distribution,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    regime: RegimeArgs,
    #[command(flatten)]
    seed: SeedArg,
    /// Search budget for the satisfiability check of unif-sat.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    /// Rejection attempts for unif-sat.
    #[arg(long, default_value_t = 100_000)]
    max_attempts: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CountArgs {
    /// DIMACS input; stdin when absent.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Largest component size, in variables, that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long)]
    test: Test,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Args, Debug)]
struct RiskArgs {
    #[arg(long)]
    test: Test,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    regime: RegimeArgs,
    /// Trials per hypothesis.
    #[arg(long)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// JSON array of experiment configs; configs without a seed get --seed.
    #[arg(long)]
    grid: PathBuf,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Lower deviation of T, the count of variables repeated as a first literal.
    Pair(PairArgs),
    /// Direction of log(Z / E[Z]) under the uniform law as n grows.
    Concentration(ConcentrationArgs),
    /// Mean of Z given a single two-clause first-literal group.
    Conditional(ConditionalArgs),
    /// Frequency of a repeated variable at the lower-bound clause count.
    Disjoint(DisjointArgs),
    /// Probability that a uniform formula is satisfiable.
    Satprob(SatprobArgs),
    /// Risk of every built-in test at the lower-bound clause count.
    RiskFloor(RiskFloorArgs),
}

#[derive(Args, Debug, Clone, Copy)]
#[group(required = true, multiple = false)]
struct PairRegimeArgs {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    csqrt: Option<f64>,
}

#[derive(Args, Debug)]
struct PairArgs {
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    regime: PairRegimeArgs,
    /// Deviation for the linear regime; defaults to the value derived from delta.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Args, Debug)]
struct ConcentrationArgs {
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    regime: RegimeArgs,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    /// Required fraction of draws with Z < E[Z] at the largest n.
    #[arg(long, default_value_t = 0.9)]
    min_fraction: f64,
}

#[derive(Args, Debug)]
struct ConditionalArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    /// +1 when the paired first literals agree in sign, -1 otherwise.
    #[arg(long, allow_negative_numbers = true)]
    sigma: i8,
    #[arg(long)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Args, Debug)]
struct DisjointArgs {
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Args, Debug)]
struct SatprobArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    regime: RegimeArgs,
    #[arg(long)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    /// Check that the rate exceeds this value.
    #[arg(long)]
    above: Option<f64>,
    /// Check that the rate is below this value.
    #[arg(long)]
    below: Option<f64>,
}

#[derive(Args, Debug)]
struct RiskFloorArgs {
    #[arg(long)]
    nu: f64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

/// Failure of a subcommand, carrying its exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            msg: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            msg: format!("i/o: {e}"),
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Parse { .. } | Error::Io(_) => EXIT_INPUT,
        Error::Budget { .. } | Error::Exhausted { .. } | Error::AllInfeasible { .. } => EXIT_BUDGET,
    }
}

type Outcome<T = i32> = std::result::Result<T, Failure>;

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    pool: Option<rayon::ThreadPool>,
}

impl Io<'_> {
    /// Runs `f` on the `--jobs` pool when one was requested.
    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(pool) => pool.install(f),
            None => f(),
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(
    argv: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
        pool: None,
    };
    let result = match cli.jobs {
        Some(0) => Err(Failure {
            code: EXIT_INPUT,
            msg: "--jobs must be at least 1".into(),
        }),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => {
                io.pool = Some(pool);
                dispatch(cli.command, &mut io)
            }
            Err(e) => Err(Failure {
                code: EXIT_INPUT,
                msg: e.to_string(),
            }),
        },
        None => dispatch(cli.command, &mut io),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.stderr, "psl: {}", f.msg);
            f.code
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> Outcome {
    match cmd {
        Command::Gen(a) => gen(a, io),
        Command::Count(a) => count(a, io),
        Command::Detect(a) => detect(a, io),
        Command::Risk(a) => risk(a, io),
        Command::Sweep(a) => run_sweep(a, io),
        Command::Verify(v) => verify(v, io),
    }
}

fn resolve_seed(arg: &SeedArg, io: &mut Io<'_>) -> io::Result<u64> {
    let seed = arg.seed.unwrap_or_else(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0)
    });
    writeln!(io.stderr, "seed={seed}")?;
    Ok(seed)
}

fn read_input(path: &Option<PathBuf>, io: &mut Io<'_>) -> Outcome<String> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure {
            code: EXIT_INPUT,
            msg: format!("{}: {e}", p.display()),
        }),
        None => {
            let mut s = String::new();
            io.stdin.read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_output(path: &Option<PathBuf>, bytes: &[u8], io: &mut Io<'_>) -> Outcome {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure {
            code: EXIT_INPUT,
            msg: format!("{}: {e}", p.display()),
        })?,
        None => io.stdout.write_all(bytes)?,
    }
    Ok(EXIT_OK)
}

fn gen(a: GenArgs, io: &mut Io<'_>) -> Outcome {
    let seed = resolve_seed(&a.seed, io)?;
    let m = a.regime.regime().clauses(a.n)?;
    writeln!(io.stderr, "m={m}")?;
    let dist_index = Distribution::ALL.iter().position(|&d| d == a.dist).unwrap() as u64;
    let id = stream_id(&[GEN_TAG, dist_index, a.k as u64, a.n as u64, m as u64]);
    let mut rng = RngStream::new(seed, id).rng();
    let (formula, xstar) = match a.dist {
        Distribution::Uniform => (sample_uniform_formula(a.n, a.k, m, &mut rng)?, None),
        Distribution::Planted => {
            let inst = sample_planted_mixture(a.n, a.k, m, &mut rng)?;
            (inst.formula, Some(inst.planted))
        }
        Distribution::PlantedMix => (sample_planted_mixture(a.n, a.k, m, &mut rng)?.formula, None),
        Distribution::UnifSat => {
            let draw = sample_uniform_sat(a.n, a.k, m, &mut rng, a.max_attempts, a.limit)?;
            writeln!(io.stderr, "attempts={}", draw.attempts)?;
            (draw.formula, None)
        }
        Distribution::NaePlanted => {
            let inst = sample_nae_planted(a.n, a.k, m, &mut rng)?;
            (inst.formula, Some(inst.planted))
        }
    };
    let prov = Provenance {
        dist: a.dist,
        k: a.k,
        seed,
        xstar,
    };
    write_output(&a.out, emit_dimacs(&formula, Some(&prov)).as_bytes(), io)
}

fn cmp_word(o: std::cmp::Ordering) -> &'static str {
    match o {
        std::cmp::Ordering::Less => "less",
        std::cmp::Ordering::Equal => "equal",
        std::cmp::Ordering::Greater => "greater",
    }
}

fn count(a: CountArgs, io: &mut Io<'_>) -> Outcome {
    let text = read_input(&a.input, io)?;
    let phi = parse_dimacs(&text, None)?.formula;
    let r = count_report(&phi, a.limit)?;
    writeln!(
        io.stdout,
        "Z={} E[Z]={} cmp={}",
        r.z,
        r.expected,
        cmp_word(r.comparison)
    )?;
    Ok(EXIT_OK)
}

fn detect(a: DetectArgs, io: &mut Io<'_>) -> Outcome {
    let text = read_input(&a.input, io)?;
    let phi = parse_dimacs(&text, None)?.formula;
    let out = a.test.run(&phi, a.limit)?;
    if !out.feasible {
        writeln!(io.stdout, "decision=NA feasible=0")?;
        return Ok(EXIT_BUDGET);
    }
    let d = out.decision_bit();
    match &out.statistic {
        Statistic::Coupling { p, t, d: diff } => writeln!(
            io.stdout,
            "decision={d} T={t} P={p} D={diff} threshold={}",
            coupling_threshold(phi.width())
        )?,
        Statistic::Count(r) => writeln!(
            io.stdout,
            "decision={d} Z={} E[Z]={} cmp={}",
            r.z,
            r.expected,
            cmp_word(r.comparison)
        )?,
        Statistic::Witness(Some(x)) => writeln!(io.stdout, "decision={d} witness={x}")?,
        Statistic::Witness(None) | Statistic::None => writeln!(io.stdout, "decision={d}")?,
    }
    Ok(EXIT_OK)
}

fn sweep_bytes(grid: &[ExperimentConfig]) -> Outcome<(Vec<u8>, Vec<SweepRow>)> {
    let mut buf = Vec::new();
    let rows = sweep(grid, &mut buf)?;
    Ok((buf, rows))
}

fn rows_code(rows: &[SweepRow], io: &mut Io<'_>) -> io::Result<i32> {
    let mut code = EXIT_OK;
    for row in rows {
        if let Err(e) = &row.result {
            writeln!(
                io.stderr,
                "psl: {} n={}: {e}",
                row.config.detector, row.config.n
            )?;
            code = code.max(exit_code(e));
        }
    }
    Ok(code)
}

fn risk(a: RiskArgs, io: &mut Io<'_>) -> Outcome {
    let seed = resolve_seed(&a.seed, io)?;
    let cfg = ExperimentConfig {
        k: a.k,
        n: a.n,
        regime: a.regime.regime(),
        detector: a.test,
        trials: a.trials,
        seed,
        limit: a.limit,
    };
    let m = cfg.validate()?;
    writeln!(io.stderr, "m={m}")?;
    let (bytes, rows) = io.install(|| sweep_bytes(std::slice::from_ref(&cfg)))?;
    write_output(&a.out, &bytes, io)?;
    Ok(rows_code(&rows, io)?)
}

fn parse_grid(text: &str, seed: u64) -> Result<Vec<ExperimentConfig>> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("grid: {e}")))?;
    let Value::Array(items) = value else {
        return Err(Error::Input("grid must be a JSON array".into()));
    };
    items
        .into_iter()
        .enumerate()
        .map(|(i, mut item)| {
            if let Value::Object(map) = &mut item {
                map.entry("seed").or_insert(json!(seed));
            }
            serde_json::from_value(item).map_err(|e| Error::Input(format!("grid entry {i}: {e}")))
        })
        .collect()
}

fn run_sweep(a: SweepArgs, io: &mut Io<'_>) -> Outcome {
    let seed = resolve_seed(&a.seed, io)?;
    let text = fs::read_to_string(&a.grid).map_err(|e| Failure {
        code: EXIT_INPUT,
        msg: format!("{}: {e}", a.grid.display()),
    })?;
    let grid = parse_grid(&text, seed)?;
    for cfg in &grid {
        cfg.validate()?;
    }
    let (bytes, rows) = io.install(|| sweep_bytes(&grid))?;
    write_output(&a.out, &bytes, io)?;
    Ok(rows_code(&rows, io)?)
}

fn report<T: Serialize>(
    name: &str,
    seed: u64,
    checks: &[Check],
    details: &T,
    io: &mut Io<'_>,
) -> Outcome {
    let pass = checks.iter().all(|c| c.pass);
    let mut details = serde_json::to_value(details).map_err(|e| Error::Io(e.to_string()))?;
    if let Value::Object(map) = &mut details {
        map.remove("checks");
    }
    let doc = json!({
        "verifier": name,
        "seed": seed,
        "pass": pass,
        "checks": checks,
        "details": details,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(io.stdout, "{text}")?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK })
}

fn verify(cmd: VerifyCommand, io: &mut Io<'_>) -> Outcome {
    match cmd {
        VerifyCommand::Pair(a) => {
            let seed = resolve_seed(&a.seed, io)?;
            let regime = match (a.regime.delta, a.regime.csqrt) {
                (Some(delta), _) => PairRegime::Linear {
                    delta,
                    epsilon: a.epsilon,
                },
                (_, Some(c)) => PairRegime::Sqrt { c },
                _ => unreachable!("clap enforces exactly one regime flag"),
            };
            let r = io.install(|| verify_pair_lemma(regime, a.n, a.k, a.trials, seed))?;
            writeln!(io.stderr, "m={}", r.m)?;
            report("pair", seed, &r.checks, &r, io)
        }
        VerifyCommand::Concentration(a) => {
            let seed = resolve_seed(&a.seed, io)?;
            let r = io.install(|| {
                verify_concentration(
                    a.k,
                    a.regime.regime(),
                    &a.n_list,
                    a.trials,
                    seed,
                    a.limit,
                    a.min_fraction,
                )
            })?;
            report("concentration", seed, &r.checks, &r, io)
        }
        VerifyCommand::Conditional(a) => {
            let seed = resolve_seed(&a.seed, io)?;
            let pattern = GroupPattern::single_pair(a.m, a.sigma)?;
            let r = io.install(|| {
                verify_conditional_expectation(a.n, a.k, &pattern, a.trials, seed, a.limit)
            })?;
            report("conditional", seed, &r.checks, &r, io)
        }
        VerifyCommand::Disjoint(a) => {
            let seed = resolve_seed(&a.seed, io)?;
            let r = io.install(|| verify_disjointness(a.nu, a.n, a.k, a.trials, seed))?;
            writeln!(io.stderr, "m={}", r.m)?;
            report("disjoint", seed, &r.checks, &r, io)
        }
        VerifyCommand::Satprob(a) => {
            let seed = resolve_seed(&a.seed, io)?;
            let m = a.regime.regime().clauses(a.n)?;
            writeln!(io.stderr, "m={m}")?;
            let r =
                io.install(|| estimate_sat_probability(a.k, a.n, m, a.trials, seed, a.limit))?;
            let ci = Some([r.ci.lo, r.ci.hi]);
            let mut checks = Vec::new();
            if let Some(b) = a.above {
                checks.push(Check {
                    claim: format!("P(SAT) > {b} at m = {m}"),
                    bound: Some(b),
                    observed: r.rate,
                    ci,
                    pass: r.rate > b,
                });
            }
            if let Some(b) = a.below {
                checks.push(Check {
                    claim: format!("P(SAT) < {b} at m = {m}"),
                    bound: Some(b),
                    observed: r.rate,
                    ci,
                    pass: r.rate < b,
                });
            }
            report(
                "satprob",
                seed,
                &checks,
                &json!({ "m": m, "estimate": r }),
                io,
            )
        }
        VerifyCommand::RiskFloor(a) => {
            let seed = resolve_seed(&a.seed, io)?;
            let checks =
                io.install(|| verify_risk_floor(a.nu, a.n, a.k, a.trials, seed, a.limit))?;
            report("risk-floor", seed, &checks, &json!({}), io)
        }
    }
}
