//! DIMACS CNF reading and writing.
//!
//! Clause and literal order are preserved exactly in both directions. Sampled
//! formulas carry one provenance comment of the form
//!
//! ```text
//! c psl dist=<uniform|planted|planted-mix|unif-sat|nae-planted> k=<int> seed=<u64> [xstar=<bits>]
//! ```
//!
//! where `xstar` lists variable 1 first. Other comment lines are ignored.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula::{Assignment, Clause, Formula, Literal};

/// Which sampler produced a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Distribution {
    Uniform,
    Planted,
    PlantedMix,
    UnifSat,
    NaePlanted,
}

impl Distribution {
    pub const ALL: [Distribution; 5] = [
        Distribution::Uniform,
        Distribution::Planted,
        Distribution::PlantedMix,
        Distribution::UnifSat,
        Distribution::NaePlanted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Distribution::Uniform => "uniform",
            Distribution::Planted => "planted",
            Distribution::PlantedMix => "planted-mix",
            Distribution::UnifSat => "unif-sat",
            Distribution::NaePlanted => "nae-planted",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::input(format!("unknown distribution {s:?}")))
    }
}

/// Sampling metadata stored alongside a formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub dist: Distribution,
    pub k: usize,
    pub seed: u64,
    pub xstar: Option<Assignment>,
}

impl Provenance {
    fn comment_line(&self) -> String {
        let mut line = format!("c psl dist={} k={} seed={}", self.dist, self.k, self.seed);
        if let Some(x) = &self.xstar {
            write!(line, " xstar={x}").unwrap();
        }
        line
    }
}

/// Result of [`parse_dimacs`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dimacs {
    pub formula: Formula,
    pub provenance: Option<Provenance>,
}

enum PslComment {
    Provenance(Provenance),
    Width(usize),
}

fn parse_psl_comment(body: &str, line: usize) -> Result<PslComment> {
    let mut dist = None;
    let mut k = None;
    let mut seed = None;
    let mut xstar = None;
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("malformed provenance field {field:?}")))?;
        let bad = |what: &str| Error::parse(line, format!("invalid {what} {value:?}"));
        match key {
            "dist" => dist = Some(value.parse::<Distribution>().map_err(|_| bad("dist"))?),
            "k" => k = Some(value.parse::<usize>().map_err(|_| bad("k"))?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("seed"))?),
            "xstar" => xstar = Some(value.parse::<Assignment>().map_err(|_| bad("xstar"))?),
            _ => {
                return Err(Error::parse(
                    line,
                    format!("unknown provenance key {key:?}"),
                ))
            }
        }
    }
    match (dist, k, seed) {
        (Some(dist), Some(k), Some(seed)) => Ok(PslComment::Provenance(Provenance {
            dist,
            k,
            seed,
            xstar,
        })),
        // bare width hint written for clause-free formulas
        (None, Some(k), None) if xstar.is_none() => Ok(PslComment::Width(k)),
        _ => Err(Error::parse(line, "provenance needs dist, k and seed")),
    }
}

/// Parses DIMACS CNF text.
///
/// With `strict_k`, every clause must have exactly that width. Without it,
/// the width is taken from the first clause (or from metadata when the
/// formula has no clauses) and all clauses must agree.
pub fn parse_dimacs(text: &str, strict_k: Option<usize>) -> Result<Dimacs> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut provenance = None;
    let mut width_hint = None;
    let mut clauses = Vec::new();
    let mut pending: Vec<Literal> = Vec::new();
    let mut pending_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('c') {
            if let Some(body) = comment.strip_prefix(" psl ") {
                match parse_psl_comment(body, lineno)? {
                    PslComment::Provenance(p) => {
                        if provenance.replace(p).is_some() {
                            return Err(Error::parse(lineno, "duplicate provenance line"));
                        }
                    }
                    PslComment::Width(k) => width_hint = Some(k),
                }
            }
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(lineno, "duplicate header"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(Error::parse(lineno, "expected `p cnf <n> <m>`"));
            }
            let n = fields[2]
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, "invalid variable count"))?;
            let m = fields[3]
                .parse::<usize>()
                .map_err(|_| Error::parse(lineno, "invalid clause count"))?;
            header = Some((n, m, lineno));
            continue;
        }
        let Some((n, _, _)) = header else {
            return Err(Error::parse(lineno, "clause before header"));
        };
        for token in line.split_whitespace() {
            let value: i64 = token
                .parse()
                .map_err(|_| Error::parse(lineno, format!("invalid literal {token:?}")))?;
            if value == 0 {
                let clause = Clause::new(std::mem::take(&mut pending))
                    .map_err(|e| Error::parse(pending_line.max(lineno), strip_input(e)))?;
                clauses.push((clause, lineno));
                continue;
            }
            if pending.is_empty() {
                pending_line = lineno;
            }
            if value.unsigned_abs() as usize > n {
                return Err(Error::parse(
                    lineno,
                    format!("variable {} exceeds n = {n}", value.unsigned_abs()),
                ));
            }
            pending.push(
                Literal::from_dimacs(value).map_err(|e| Error::parse(lineno, strip_input(e)))?,
            );
        }
    }

    let Some((n, m, header_line)) = header else {
        return Err(Error::parse(0, "missing `p cnf` header"));
    };
    if !pending.is_empty() {
        return Err(Error::parse(pending_line, "clause not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(Error::parse(
            header_line,
            format!("header declares {m} clauses, found {}", clauses.len()),
        ));
    }

    let k = match (strict_k, clauses.first()) {
        (Some(k), _) => k,
        (None, Some((c, _))) => c.width(),
        (None, None) => provenance
            .as_ref()
            .map(|p| p.k)
            .or(width_hint)
            .ok_or_else(|| {
                Error::parse(header_line, "cannot infer clause width of an empty formula")
            })?,
    };
    for (c, line) in &clauses {
        if c.width() != k {
            return Err(Error::parse(
                *line,
                format!("clause width {} differs from k = {k}", c.width()),
            ));
        }
    }
    if let Some(p) = &provenance {
        if p.k != k {
            return Err(Error::parse(
                0,
                format!("provenance k = {} but clauses have width {k}", p.k),
            ));
        }
        if let Some(x) = &p.xstar {
            if x.len() != n {
                return Err(Error::parse(
                    0,
                    format!("xstar has length {}, expected {n}", x.len()),
                ));
            }
        }
    }

    let formula = Formula::new(n, k, clauses.into_iter().map(|(c, _)| c).collect())
        .map_err(|e| Error::parse(0, strip_input(e)))?;
    Ok(Dimacs {
        formula,
        provenance,
    })
}

fn strip_input(e: Error) -> String {
    match e {
        Error::Input(msg) => msg,
        other => other.to_string(),
    }
}

/// Writes DIMACS text with clause and literal order exactly as stored.
pub fn emit_dimacs(phi: &Formula, provenance: Option<&Provenance>) -> String {
    let mut out = String::with_capacity(16 + phi.num_clauses() * (phi.width() * 4 + 2));
    match provenance {
        Some(p) => {
            out.push_str(&p.comment_line());
            out.push('\n');
        }
        None if phi.num_clauses() == 0 => {
            writeln!(out, "c psl k={}", phi.width()).unwrap();
        }
        None => {}
    }
    writeln!(out, "p cnf {} {}", phi.num_vars(), phi.num_clauses()).unwrap();
    for c in phi.clauses() {
        for lit in c.literals() {
            write!(out, "{lit} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}
