//! k-machines: finite state devices that read, for every step of a hypergraph
//! cycle, the pair of edge positions the step enters and leaves through.
//!
//! States carry string names but are addressed by their index in the order
//! they were declared. Positions are 1-based (`1..=k`). Transitions are
//! stored sparsely; a missing `(state, i, j)` key means the empty set.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which notion of "bad cycle" a machine is read under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Semantics {
    /// `B` is the diagonal and only cycles of positive length count.
    Cycling,
    /// Arbitrary `B`, which must avoid the diagonal.
    General,
}

/// An element of `S x [k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StatePosition {
    pub state: usize,
    pub position: usize,
}

impl StatePosition {
    pub fn new(state: usize, position: usize) -> Self {
        StatePosition { state, position }
    }

    /// Index into the carrier `S x [k]`; each copy `S x {i}` is contiguous.
    pub fn index(self, num_states: usize) -> usize {
        (self.position - 1) * num_states + self.state
    }

    pub fn from_index(index: usize, num_states: usize) -> Self {
        StatePosition {
            state: index % num_states,
            position: index / num_states + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    k: usize,
    states: Vec<String>,
    index: HashMap<String, usize>,
    transitions: BTreeMap<(usize, usize, usize), Vec<usize>>,
    bad: BTreeSet<(usize, usize)>,
}

impl Machine {
    /// Builds a machine from indexed transitions `(from, i, j, to)` and bad pairs.
    pub fn new(
        k: usize,
        states: Vec<String>,
        transitions: impl IntoIterator<Item = (usize, usize, usize, usize)>,
        bad: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidMachine(format!(
                "uniformity k = {k}, need k >= 2"
            )));
        }
        let mut index = HashMap::with_capacity(states.len());
        for (i, name) in states.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidMachine(format!("duplicate state `{name}`")));
            }
        }
        let n = states.len();
        let mut table: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();
        for (s, i, j, t) in transitions {
            if s >= n || t >= n {
                return Err(Error::InvalidMachine(format!(
                    "transition references state index out of range ({s} -> {t})"
                )));
            }
            for p in [i, j] {
                if p == 0 || p > k {
                    return Err(Error::Position { position: p, k });
                }
            }
            table.entry((s, i, j)).or_default().push(t);
        }
        for targets in table.values_mut() {
            targets.sort_unstable();
            targets.dedup();
        }
        let bad: BTreeSet<(usize, usize)> = bad.into_iter().collect();
        if let Some(&(s, t)) = bad.iter().find(|&&(s, t)| s >= n || t >= n) {
            return Err(Error::InvalidMachine(format!(
                "bad pair ({s}, {t}) out of range"
            )));
        }
        Ok(Machine {
            k,
            states,
            index,
            transitions: table,
            bad,
        })
    }

    /// Same transitions, different bad set.
    pub fn with_bad(&self, bad: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Machine::new(self.k, self.states.clone(), self.transitions(), bad)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// `f(s, (i, j))`.
    pub fn step(&self, s: usize, i: usize, j: usize) -> Result<Vec<usize>> {
        if s >= self.states.len() {
            return Err(Error::UnknownState(s.to_string()));
        }
        for p in [i, j] {
            if p == 0 || p > self.k {
                return Err(Error::Position {
                    position: p,
                    k: self.k,
                });
            }
        }
        Ok(self.targets(s, i, j).to_vec())
    }

    /// Unchecked `f(s, (i, j))` for callers that already validated indices.
    pub fn targets(&self, s: usize, i: usize, j: usize) -> &[usize] {
        self.transitions
            .get(&(s, i, j))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// All `(from, i, j, to)` in canonical order.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        self.transitions
            .iter()
            .flat_map(|(&(s, i, j), ts)| ts.iter().map(move |&t| (s, i, j, t)))
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.values().map(Vec::len).sum()
    }

    pub fn bad(&self) -> &BTreeSet<(usize, usize)> {
        &self.bad
    }

    pub fn is_bad(&self, s: usize, t: usize) -> bool {
        self.bad.contains(&(s, t))
    }

    pub fn is_deterministic(&self) -> bool {
        self.transitions
            .iter()
            .all(|(&(_, i, j), ts)| ts.len() <= 1 && (i != j || ts.is_empty()))
    }

    /// `B` equals the diagonal of a nonempty state set.
    pub fn is_cycling(&self) -> bool {
        let n = self.states.len();
        n > 0 && self.bad.len() == n && (0..n).all(|s| self.bad.contains(&(s, s)))
    }

    /// The semantics a machine is read under by default.
    pub fn semantics(&self) -> Semantics {
        if self.is_cycling() {
            Semantics::Cycling
        } else {
            Semantics::General
        }
    }

    pub fn validate(&self, semantics: Semantics) -> ValidationReport {
        validate_machine(&self.to_file(), semantics)
    }

    /// Fails with the report's violations unless the machine is valid for `semantics`.
    pub fn require(&self, semantics: Semantics) -> Result<()> {
        let report = self.validate(semantics);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidMachine(report.to_string()))
        }
    }

    pub fn to_file(&self) -> MachineFile {
        let mut transitions: Vec<TransitionEntry> = Vec::new();
        for (&(s, i, j), ts) in &self.transitions {
            transitions.push(TransitionEntry {
                from: self.states[s].clone(),
                i,
                j,
                to: ts.iter().map(|&t| self.states[t].clone()).collect(),
            });
        }
        MachineFile {
            k: self.k,
            states: self.states.clone(),
            transitions,
            bad: self
                .bad
                .iter()
                .map(|&(s, t)| [self.states[s].clone(), self.states[t].clone()])
                .collect(),
            deterministic: None,
        }
    }

    pub fn from_file(file: &MachineFile) -> Result<Self> {
        let report = validate_machine(file, Semantics::General);
        let structural: Vec<&Violation> = report
            .violations
            .iter()
            .filter(|v| v.is_structural())
            .collect();
        if !structural.is_empty() {
            let msg = structural
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::InvalidMachine(msg));
        }
        let states = file.states.clone();
        let index: HashMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut transitions = Vec::new();
        for entry in &file.transitions {
            let s = index[entry.from.as_str()];
            for t in &entry.to {
                transitions.push((s, entry.i, entry.j, index[t.as_str()]));
            }
        }
        let bad: Vec<(usize, usize)> = file
            .bad
            .iter()
            .map(|[s, t]| (index[s.as_str()], index[t.as_str()]))
            .collect();
        Machine::new(file.k, states, transitions, bad)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("machine serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MachineFile = serde_json::from_str(text)?;
        Machine::from_file(&file)
    }
}

/// On-disk form of a machine. Every name refers to an entry of `states`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub k: usize,
    pub states: Vec<String>,
    pub transitions: Vec<TransitionEntry>,
    pub bad: Vec<[String; 2]>,
    /// Optional claim that the machine is deterministic; checked on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deterministic: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionEntry {
    pub from: String,
    pub i: usize,
    pub j: usize,
    pub to: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UniformityTooSmall(usize),
    DuplicateState(String),
    UnknownState { context: &'static str, name: String },
    PositionOutOfRange { from: String, i: usize, j: usize },
    DiagonalBadPair(String),
    NotCycling,
    DiagonalPositionPair { from: String, i: usize },
    MultipleTargets { from: String, i: usize, j: usize },
}

impl Violation {
    /// Structural violations make the file unloadable; the rest depend on semantics.
    pub fn is_structural(&self) -> bool {
        !matches!(self, Violation::DiagonalBadPair(_) | Violation::NotCycling)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UniformityTooSmall(k) => write!(f, "uniformity k = {k} is below 2"),
            Violation::DuplicateState(s) => write!(f, "duplicate state `{s}`"),
            Violation::UnknownState { context, name } => {
                write!(f, "unknown state `{name}` in {context}")
            }
            Violation::PositionOutOfRange { from, i, j } => {
                write!(
                    f,
                    "position pair ({i},{j}) out of range in transition from `{from}`"
                )
            }
            Violation::DiagonalBadPair(s) => write!(f, "diagonal bad pair ({s},{s})"),
            Violation::NotCycling => write!(f, "bad set is not the diagonal"),
            Violation::DiagonalPositionPair { from, i } => {
                write!(
                    f,
                    "diagonal position pair ({i},{i}) from `{from}` in deterministic machine"
                )
            }
            Violation::MultipleTargets { from, i, j } => {
                write!(
                    f,
                    "more than one target for `{from}` on ({i},{j}) in deterministic machine"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub deterministic: bool,
    pub cycling: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")?;
        } else {
            let parts: Vec<String> = self.violations.iter().map(Violation::to_string).collect();
            write!(f, "{}", parts.join("; "))?;
        }
        write!(
            f,
            " (deterministic: {}, cycling: {})",
            self.deterministic, self.cycling
        )
    }
}

/// Reports every problem with a machine description; never fails.
pub fn validate_machine(file: &MachineFile, semantics: Semantics) -> ValidationReport {
    let mut violations = Vec::new();
    if file.k < 2 {
        violations.push(Violation::UniformityTooSmall(file.k));
    }
    let mut known: HashMap<&str, usize> = HashMap::new();
    for (i, s) in file.states.iter().enumerate() {
        if known.insert(s.as_str(), i).is_some() {
            violations.push(Violation::DuplicateState(s.clone()));
        }
    }
    let check = |context: &'static str, name: &str, out: &mut Vec<Violation>| {
        if !known.contains_key(name) {
            out.push(Violation::UnknownState {
                context,
                name: name.to_string(),
            });
        }
    };

    let mut deterministic = true;
    let mut multi: BTreeMap<(&str, usize, usize), BTreeSet<&str>> = BTreeMap::new();
    for entry in &file.transitions {
        check("transition source", &entry.from, &mut violations);
        for t in &entry.to {
            check("transition target", t, &mut violations);
        }
        if entry.i == 0 || entry.j == 0 || entry.i > file.k || entry.j > file.k {
            violations.push(Violation::PositionOutOfRange {
                from: entry.from.clone(),
                i: entry.i,
                j: entry.j,
            });
        }
        multi
            .entry((entry.from.as_str(), entry.i, entry.j))
            .or_default()
            .extend(entry.to.iter().map(String::as_str));
    }
    let mut det_violations = Vec::new();
    for (&(from, i, j), targets) in &multi {
        if targets.is_empty() {
            continue;
        }
        if i == j {
            deterministic = false;
            det_violations.push(Violation::DiagonalPositionPair {
                from: from.to_string(),
                i,
            });
        } else if targets.len() > 1 {
            deterministic = false;
            det_violations.push(Violation::MultipleTargets {
                from: from.to_string(),
                i,
                j,
            });
        }
    }
    if file.deterministic == Some(true) {
        violations.extend(det_violations);
    }

    let mut bad: BTreeSet<(&str, &str)> = BTreeSet::new();
    for [s, t] in &file.bad {
        check("bad pair", s, &mut violations);
        check("bad pair", t, &mut violations);
        bad.insert((s.as_str(), t.as_str()));
    }
    let cycling = !file.states.is_empty()
        && bad.iter().all(|(s, t)| s == t)
        && file
            .states
            .iter()
            .all(|s| bad.contains(&(s.as_str(), s.as_str())));

    match semantics {
        Semantics::Cycling => {
            if !cycling {
                violations.push(Violation::NotCycling);
            }
        }
        Semantics::General => {
            for (s, t) in &bad {
                if s == t {
                    violations.push(Violation::DiagonalBadPair(s.to_string()));
                }
            }
        }
    }
    ValidationReport {
        violations,
        deterministic,
        cycling,
    }
}
