//! DPLL satisfiability search with unit propagation, run per component.
//!
//! The search budget for a component is `2^limit` decisions, the same
//! exponential budget that exhaustive counting would spend on a component of
//! `limit` variables.

use crate::components::{decompose, Component};
use crate::counting::MAX_LIMIT;
use crate::error::{Error, Result};
use crate::formula::{Assignment, Formula};

struct Dpll<'a> {
    comp: &'a Component,
    occ: Vec<Vec<(usize, usize)>>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
    head: usize,
}

enum Status {
    Sat,
    Unsat,
    OutOfBudget,
}

impl<'a> Dpll<'a> {
    fn new(comp: &'a Component) -> Self {
        Dpll {
            occ: comp.occurrences(),
            value: vec![None; comp.size()],
            trail: Vec::with_capacity(comp.size()),
            head: 0,
            comp,
        }
    }

    fn set(&mut self, var: usize, v: bool) {
        self.value[var] = Some(v);
        self.trail.push(var);
    }

    fn undo_to(&mut self, len: usize) {
        for var in self.trail.drain(len..) {
            self.value[var] = None;
        }
        self.head = self.head.min(len);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let var = self.trail[self.head];
            self.head += 1;
            let val = self.value[var].unwrap();
            for i in 0..self.occ[var].len() {
                let (c, pos) = self.occ[var][i];
                if self.comp.clauses[c][pos].1 == val {
                    continue;
                }
                let mut unassigned = None;
                let mut free = 0;
                let mut satisfied = false;
                for &(u, positive) in &self.comp.clauses[c] {
                    match self.value[u] {
                        Some(x) if x == positive => {
                            satisfied = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            free += 1;
                            unassigned = Some((u, positive));
                        }
                    }
                }
                if satisfied {
                    continue;
                }
                match (free, unassigned) {
                    (0, _) => return false,
                    (1, Some((u, positive))) => self.set(u, positive),
                    _ => {}
                }
            }
        }
        true
    }

    /// First unassigned literal of the first clause not yet satisfied.
    fn pick(&self) -> Option<(usize, bool)> {
        for c in &self.comp.clauses {
            let mut candidate = None;
            let mut satisfied = false;
            for &(u, positive) in c {
                match self.value[u] {
                    Some(x) if x == positive => {
                        satisfied = true;
                        break;
                    }
                    None if candidate.is_none() => candidate = Some((u, positive)),
                    _ => {}
                }
            }
            if !satisfied {
                if let Some(lit) = candidate {
                    return Some(lit);
                }
            }
        }
        None
    }

    fn run(&mut self, budget: u64) -> Status {
        // (trail length before the decision, var, value, already flipped)
        let mut decisions: Vec<(usize, usize, bool, bool)> = Vec::new();
        let mut nodes = 0u64;
        loop {
            if !self.propagate() {
                loop {
                    let Some((len, var, v, flipped)) = decisions.pop() else {
                        return Status::Unsat;
                    };
                    self.undo_to(len);
                    if !flipped {
                        decisions.push((len, var, !v, true));
                        self.set(var, !v);
                        break;
                    }
                }
                continue;
            }
            let Some((var, v)) = self.pick() else {
                return Status::Sat;
            };
            nodes += 1;
            if nodes > budget {
                return Status::OutOfBudget;
            }
            decisions.push((self.trail.len(), var, v, false));
            self.set(var, v);
        }
    }
}

/// Searches for a satisfying assignment of `phi`.
///
/// Returns `Ok(None)` when `phi` is unsatisfiable. Variables left free by the
/// search, and variables in no clause, are set to 0 in the witness.
pub fn solve(phi: &Formula, limit: usize) -> Result<Option<Assignment>> {
    if limit > MAX_LIMIT {
        return Err(Error::input(format!(
            "limit {limit} exceeds maximum {MAX_LIMIT}"
        )));
    }
    let (comps, _) = decompose(phi);
    let budget = if limit >= 63 { u64::MAX } else { 1u64 << limit };
    let mut bits = vec![false; phi.num_vars()];
    for comp in &comps {
        let mut search = Dpll::new(comp);
        match search.run(budget) {
            Status::Sat => {
                for (local, value) in search.value.iter().enumerate() {
                    bits[comp.vars[local] as usize - 1] = value.unwrap_or(false);
                }
            }
            Status::Unsat => return Ok(None),
            Status::OutOfBudget => {
                return Err(Error::Budget {
                    component: comp.size(),
                    limit,
                })
            }
        }
    }
    Ok(Some(Assignment::new(bits)))
}
