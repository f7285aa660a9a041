//! Connected components of the variable-interaction graph.

use crate::formula::Formula;

/// One component, relabelled to local variables `0..vars.len()`.
#[derive(Debug)]
pub(crate) struct Component {
    /// Global variable indices, ascending.
    pub vars: Vec<u32>,
    /// Clauses as `(local var, positive)` pairs, in original literal order.
    pub clauses: Vec<Vec<(usize, bool)>>,
}

impl Component {
    pub fn size(&self) -> usize {
        self.vars.len()
    }

    /// For each local variable, the `(clause, position)` pairs where it occurs.
    pub fn occurrences(&self) -> Vec<Vec<(usize, usize)>> {
        let mut occ = vec![Vec::new(); self.vars.len()];
        for (ci, c) in self.clauses.iter().enumerate() {
            for (pos, &(v, _)) in c.iter().enumerate() {
                occ[v].push((ci, pos));
            }
        }
        occ
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Splits `phi` into components; also returns the number of variables that
/// occur in no clause.
pub(crate) fn decompose(phi: &Formula) -> (Vec<Component>, usize) {
    let n = phi.num_vars();
    let mut parent: Vec<u32> = (0..=n as u32).collect();
    let mut touched = vec![false; n + 1];
    for c in phi.clauses() {
        let first = c.first().var();
        touched[first as usize] = true;
        for l in &c.literals()[1..] {
            touched[l.var() as usize] = true;
            let (a, b) = (find(&mut parent, first), find(&mut parent, l.var()));
            if a != b {
                // smaller root wins so roots stay deterministic
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }

    let mut comp_of_root = vec![usize::MAX; n + 1];
    let mut local = vec![usize::MAX; n + 1];
    let mut comps: Vec<Component> = Vec::new();
    let mut untouched = 0;
    for v in 1..=n as u32 {
        if !touched[v as usize] {
            untouched += 1;
            continue;
        }
        let r = find(&mut parent, v) as usize;
        if comp_of_root[r] == usize::MAX {
            comp_of_root[r] = comps.len();
            comps.push(Component {
                vars: Vec::new(),
                clauses: Vec::new(),
            });
        }
        let comp = &mut comps[comp_of_root[r]];
        local[v as usize] = comp.vars.len();
        comp.vars.push(v);
    }
    for c in phi.clauses() {
        let r = find(&mut parent, c.first().var()) as usize;
        let lits = c
            .literals()
            .iter()
            .map(|l| (local[l.var() as usize], l.is_positive()))
            .collect();
        comps[comp_of_root[r]].clauses.push(lits);
    }
    (comps, untouched)
}
