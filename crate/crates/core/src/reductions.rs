//! 3-SAT to cycling `3|C|`-machines, and the maps between satisfying
//! assignments and compatible orders.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::machine::{Machine, StatePosition};
use crate::order::{verify_compatible_order, CompatibleOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn negated(self) -> Literal {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// State index in [`sat_to_machine`]: `x` is `2x`, `~x` is `2x + 1`.
    pub fn state(self) -> usize {
        2 * self.var + usize::from(!self.positive)
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    pub variables: Vec<String>,
    pub clauses: Vec<[Literal; 3]>,
}

/// Native format: `{"variables": ["x", "y"], "clauses": [["x", "-y", "y"]]}`,
/// a leading `-` negating a literal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnfFile {
    pub variables: Vec<String>,
    pub clauses: Vec<Vec<String>>,
}

impl CnfInstance {
    pub fn new(variables: Vec<String>, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for c in &clauses {
            for l in c {
                if l.var >= variables.len() {
                    return Err(Error::input(format!(
                        "literal references variable {} of {}",
                        l.var,
                        variables.len()
                    )));
                }
            }
        }
        Ok(CnfInstance { variables, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars()
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    /// DIMACS `p cnf` text; every clause must have exactly three literals.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(Error::Parse(format!("bad problem line `{line}`")));
                }
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad number `{s}`")))
                };
                header = Some((num(parts[2])?, num(parts[3])?));
                continue;
            }
            let (vars, _) =
                header.ok_or_else(|| Error::Parse("clause before problem line".into()))?;
            for tok in line.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad literal `{tok}`")))?;
                if lit == 0 {
                    clauses.push(three(&current, vars)?);
                    current.clear();
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(three(&current, header.map_or(0, |h| h.0))?);
        }
        let (vars, count) = header.ok_or_else(|| Error::Parse("missing problem line".into()))?;
        if clauses.len() != count {
            return Err(Error::Parse(format!(
                "header declares {count} clauses, found {}",
                clauses.len()
            )));
        }
        CnfInstance::new((1..=vars).map(|v| v.to_string()).collect(), clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars(), self.clauses.len());
        for c in &self.clauses {
            let lits: Vec<String> = c
                .iter()
                .map(|l| {
                    if l.positive {
                        format!("{}", l.var + 1)
                    } else {
                        format!("-{}", l.var + 1)
                    }
                })
                .collect();
            out.push_str(&lits.join(" "));
            out.push_str(" 0\n");
        }
        out
    }

    pub fn from_file(file: &CnfFile) -> Result<Self> {
        let index: HashMap<&str, usize> = file
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        if index.len() != file.variables.len() {
            return Err(Error::input("duplicate variable name"));
        }
        let mut clauses = Vec::new();
        for c in &file.clauses {
            if c.len() != 3 {
                return Err(Error::input(format!(
                    "clause has {} literals, expected 3",
                    c.len()
                )));
            }
            let mut lits = [Literal {
                var: 0,
                positive: true,
            }; 3];
            for (slot, text) in lits.iter_mut().zip(c) {
                let (positive, name) = match text.strip_prefix('-') {
                    Some(rest) => (false, rest),
                    None => (true, text.as_str()),
                };
                let var = *index
                    .get(name)
                    .ok_or_else(|| Error::input(format!("unknown variable `{name}`")))?;
                *slot = Literal { var, positive };
            }
            clauses.push(lits);
        }
        CnfInstance::new(file.variables.clone(), clauses)
    }

    pub fn to_file(&self) -> CnfFile {
        CnfFile {
            variables: self.variables.clone(),
            clauses: self
                .clauses
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|l| {
                            let name = &self.variables[l.var];
                            if l.positive {
                                name.clone()
                            } else {
                                format!("-{name}")
                            }
                        })
                        .collect()
                })
                .collect(),
        }
    }

    /// Accepts DIMACS or the native JSON form.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            CnfInstance::from_file(&serde_json::from_str(text)?)
        } else {
            CnfInstance::from_dimacs(text)
        }
    }
}

fn three(lits: &[i64], vars: usize) -> Result<[Literal; 3]> {
    if lits.len() != 3 {
        return Err(Error::Parse(format!(
            "clause has {} literals, expected 3",
            lits.len()
        )));
    }
    let mut out = [Literal {
        var: 0,
        positive: true,
    }; 3];
    for (slot, &l) in out.iter_mut().zip(lits) {
        let var = l.unsigned_abs() as usize;
        if var > vars {
            return Err(Error::Parse(format!(
                "literal {l} exceeds {vars} variables"
            )));
        }
        *slot = Literal {
            var: var - 1,
            positive: l > 0,
        };
    }
    Ok(out)
}

/// States are the literals `x, ~x` of every variable, `k = 3|C|`, and clause
/// `i` (1-based) over literals `a, b, c` contributes
/// `f(a,(3i-2,3i-1)) = ~b`, `f(b,(3i-1,3i)) = ~c`, `f(c,(3i,3i-2)) = ~a`.
pub fn sat_to_machine(phi: &CnfInstance) -> Result<Machine> {
    if phi.clauses.is_empty() {
        return Err(Error::input("no clauses: the machine would have k = 0"));
    }
    let mut states = Vec::with_capacity(2 * phi.num_vars());
    for v in &phi.variables {
        states.push(v.clone());
        states.push(format!("~{v}"));
    }
    let mut transitions = Vec::new();
    for (idx, &[a, b, c]) in phi.clauses.iter().enumerate() {
        let i = idx + 1;
        transitions.push((a.state(), 3 * i - 2, 3 * i - 1, b.negated().state()));
        transitions.push((b.state(), 3 * i - 1, 3 * i, c.negated().state()));
        transitions.push((c.state(), 3 * i, 3 * i - 2, a.negated().state()));
    }
    let n = states.len();
    Machine::new(
        3 * phi.clauses.len(),
        states,
        transitions,
        (0..n).map(|s| (s, s)),
    )
}

/// Variable `x` is true iff `x` precedes `~x`.
pub fn order_to_assignment(order: &CompatibleOrder, phi: &CnfInstance) -> Result<Vec<bool>> {
    let m = sat_to_machine(phi)?;
    if !verify_compatible_order(&m, order)?.is_compatible() {
        return Err(Error::input("order is not compatible with the machine"));
    }
    let chain = order.copy_order(1);
    let mut rank = vec![0; chain.len()];
    for (r, &s) in chain.iter().enumerate() {
        rank[s] = r;
    }
    Ok((0..phi.num_vars())
        .map(|v| rank[2 * v] < rank[2 * v + 1])
        .collect())
}

/// Orders `S` with true literals first. For each clause, with its first true
/// literal in copy `p` (`q`, `r` the next copies cyclically), the block is
/// copy `p` up to that literal, all of `q`, all of `r`, then the rest of `p`.
pub fn assignment_to_order(assignment: &[bool], phi: &CnfInstance) -> Result<CompatibleOrder> {
    if !phi.satisfied_by(assignment) {
        return Err(Error::input("assignment does not satisfy the instance"));
    }
    let m = sat_to_machine(phi)?;
    let n = m.num_states();
    let lit = |v: usize, positive: bool| Literal { var: v, positive };
    let mut chain: Vec<usize> = (0..phi.num_vars())
        .map(|v| lit(v, assignment[v]).state())
        .collect();
    chain.extend((0..phi.num_vars()).map(|v| lit(v, !assignment[v]).state()));
    let mut sequence = Vec::with_capacity(n * m.k());
    for (idx, clause) in phi.clauses.iter().enumerate() {
        let t = clause
            .iter()
            .position(|l| l.eval(assignment))
            .expect("satisfied clause");
        let copy = |offset: usize| 3 * idx + 1 + (t + offset) % 3;
        let cut = chain.iter().position(|&s| s == clause[t].state()).unwrap() + 1;
        let (p, q, r) = (copy(0), copy(1), copy(2));
        sequence.extend(chain[..cut].iter().map(|&s| StatePosition::new(s, p)));
        sequence.extend(chain.iter().map(|&s| StatePosition::new(s, q)));
        sequence.extend(chain.iter().map(|&s| StatePosition::new(s, r)));
        sequence.extend(chain[cut..].iter().map(|&s| StatePosition::new(s, p)));
    }
    let order = CompatibleOrder { sequence };
    debug_assert!(verify_compatible_order(&m, &order)?.is_compatible());
    Ok(order)
}

/// First satisfying assignment in binary counting order, variable 0 lowest.
pub fn truth_table_solve(phi: &CnfInstance) -> Result<Option<Vec<bool>>> {
    let n = phi.num_vars();
    if n > 24 {
        return Err(Error::Precondition(
            "truth tables are limited to 24 variables".into(),
        ));
    }
    for mask in 0u32..(1 << n) {
        let assignment: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        if phi.satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

/// All eight sign patterns over three variables.
pub fn canonical_unsat_instance() -> CnfInstance {
    let clauses = (0..8)
        .map(|mask| {
            [0, 1, 2].map(|v| Literal {
                var: v,
                positive: mask >> v & 1 == 1,
            })
        })
        .collect();
    CnfInstance::new(vec!["x".into(), "y".into(), "z".into()], clauses).expect("well formed")
}
