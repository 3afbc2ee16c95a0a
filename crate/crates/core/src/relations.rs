//! Binary relations on small sets, their composition semigroups, and the
//! deterministic machines whose states are relations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{HyperCycle, Hypergraph};
use crate::machine::Machine;

pub const MAX_DOMAIN: usize = 8;

/// A relation on `{0, ..., n-1}`, pair `(a, b)` stored at bit `8a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n: usize,
    bits: u64,
}

/// `{"n": 3, "pairs": [[1, 2], [2, 3]]}` with 1-based entries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub n: usize,
    pub pairs: Vec<[usize; 2]>,
}

impl Relation {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 || n > MAX_DOMAIN {
            return Err(Error::input(format!(
                "domain size {n} outside 1..={MAX_DOMAIN}"
            )));
        }
        let mut bits = 0u64;
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::input(format!(
                    "pair ({a}, {b}) outside domain of size {n}"
                )));
            }
            bits |= 1 << (8 * a + b);
        }
        Ok(Relation { n, bits })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Relation::new(n, [])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Relation::new(n, (0..n).map(|a| (a, a)))
    }

    pub fn full(n: usize) -> Result<Self> {
        Relation::new(n, (0..n).flat_map(|a| (0..n).map(move |b| (a, b))))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.bits >> (8 * a + b) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| (0..self.n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.contains(a, b))
            .collect()
    }

    fn row(&self, a: usize) -> u64 {
        self.bits >> (8 * a) & 0xff
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.n == other.n && self.bits & !other.bits == 0
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        same_size(self, other)?;
        Ok(Relation {
            n: self.n,
            bits: self.bits | other.bits,
        })
    }

    /// `{(a, c) | exists b: (a, b) in self, (b, c) in other}`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        same_size(self, other)?;
        let mut bits = 0u64;
        for a in 0..self.n {
            let row = self.row(a);
            let mut out = 0u64;
            for b in 0..self.n {
                if row >> b & 1 == 1 {
                    out |= other.row(b);
                }
            }
            bits |= out << (8 * a);
        }
        Ok(Relation { n: self.n, bits })
    }

    pub fn reverse(&self) -> Relation {
        let mut bits = 0u64;
        for (a, b) in self.pairs() {
            bits |= 1 << (8 * b + a);
        }
        Relation { n: self.n, bits }
    }

    /// `self^p`, with `self^0` the identity.
    pub fn power(&self, p: usize) -> Relation {
        let mut acc = Relation::identity(self.n).expect("valid size");
        for _ in 0..p {
            acc = acc.compose(self).expect("same size");
        }
        acc
    }

    /// Both coordinate projections are onto.
    pub fn is_subdirect(&self) -> bool {
        let mut first = 0u64;
        let mut second = 0u64;
        for (a, b) in self.pairs() {
            first |= 1 << a;
            second |= 1 << b;
        }
        let all = (1u64 << self.n) - 1;
        first == all && second == all
    }

    pub fn to_file(&self) -> RelationFile {
        RelationFile {
            n: self.n,
            pairs: self
                .pairs()
                .into_iter()
                .map(|(a, b)| [a + 1, b + 1])
                .collect(),
        }
    }

    pub fn from_file(file: &RelationFile) -> Result<Self> {
        let mut pairs = Vec::with_capacity(file.pairs.len());
        for &[a, b] in &file.pairs {
            if a == 0 || b == 0 {
                return Err(Error::input("relation entries are 1-based"));
            }
            pairs.push((a - 1, b - 1));
        }
        Relation::new(file.n, pairs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Relation::from_file(&serde_json::from_str(text)?)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs()
            .into_iter()
            .map(|(a, b)| format!("({},{})", a + 1, b + 1))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn same_size(a: &Relation, b: &Relation) -> Result<()> {
    if a.n != b.n {
        return Err(Error::input(format!(
            "relations on {} and {} elements",
            a.n, b.n
        )));
    }
    Ok(())
}

/// Least set containing `generators` closed under composition and reversal.
pub fn semigroup_closure(generators: &[Relation]) -> Result<BTreeSet<Relation>> {
    let mut set: BTreeSet<Relation> = BTreeSet::new();
    let mut members: Vec<Relation> = Vec::new();
    let mut queue: VecDeque<Relation> = VecDeque::new();
    for &g in generators {
        if let Some(first) = generators.first() {
            same_size(first, &g)?;
        }
        if set.insert(g) {
            queue.push_back(g);
        }
    }
    while let Some(r) = queue.pop_front() {
        members.push(r);
        let mut found = vec![r.reverse()];
        for &other in &members {
            found.push(r.compose(&other)?);
            found.push(other.compose(&r)?);
        }
        for x in found {
            if set.insert(x) {
                queue.push_back(x);
            }
        }
    }
    Ok(set)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ClosureViolation {
    NotSubdirect(String),
    CompositionEscapes {
        left: String,
        right: String,
        result: String,
    },
    ReverseEscapes {
        relation: String,
        result: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqWitness {
    pub p: String,
    pub q: String,
    /// Least `j` with the identity inside `P (Q P)^j`; `None` if no `j` works.
    pub j: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqReport {
    pub violations: Vec<ClosureViolation>,
    pub witnesses: Vec<PqWitness>,
}

impl PqReport {
    pub fn is_compatible(&self) -> bool {
        self.violations.is_empty() && self.witnesses.iter().all(|w| w.j.is_some())
    }
}

/// Least `j` with `id ⊆ P (Q P)^j`, scanning until the sequence repeats.
pub fn pq_exponent(p: &Relation, q: &Relation) -> Result<Option<usize>> {
    let id = Relation::identity(p.n)?;
    let qp = q.compose(p)?;
    let mut seen = BTreeSet::new();
    let mut x = *p;
    for j in 0.. {
        if id.is_subset(&x) {
            return Ok(Some(j));
        }
        if !seen.insert(x) {
            return Ok(None);
        }
        x = x.compose(&qp)?;
    }
    unreachable!()
}

pub fn is_pq_compatible(set: &BTreeSet<Relation>) -> Result<PqReport> {
    let mut violations = Vec::new();
    for r in set {
        if !r.is_subdirect() {
            violations.push(ClosureViolation::NotSubdirect(r.to_string()));
        }
        let rev = r.reverse();
        if !set.contains(&rev) {
            violations.push(ClosureViolation::ReverseEscapes {
                relation: r.to_string(),
                result: rev.to_string(),
            });
        }
        for s in set {
            let c = r.compose(s)?;
            if !set.contains(&c) {
                violations.push(ClosureViolation::CompositionEscapes {
                    left: r.to_string(),
                    right: s.to_string(),
                    result: c.to_string(),
                });
            }
        }
    }
    let mut witnesses = Vec::new();
    for p in set {
        for q in set {
            witnesses.push(PqWitness {
                p: p.to_string(),
                q: q.to_string(),
                j: pq_exponent(p, q)?,
            });
        }
    }
    Ok(PqReport {
        violations,
        witnesses,
    })
}

/// `pi_{i,j}(R)` for a relation given as `k`-tuples over `{0, ..., n-1}`; positions are 1-based.
pub fn projection(n: usize, tuples: &[Vec<usize>], i: usize, j: usize) -> Result<Relation> {
    let mut pairs = Vec::with_capacity(tuples.len());
    for t in tuples {
        if i == 0 || j == 0 || i > t.len() || j > t.len() {
            return Err(Error::Position {
                position: i.max(j),
                k: t.len(),
            });
        }
        pairs.push((t[i - 1], t[j - 1]));
    }
    Relation::new(n, pairs)
}

/// `pi(i, j) = pi_{i,j}(R)` for all `i != j` in `[k]`.
pub fn projection_map(
    n: usize,
    k: usize,
    tuples: &[Vec<usize>],
) -> Result<BTreeMap<(usize, usize), Relation>> {
    if tuples.iter().any(|t| t.len() != k) {
        return Err(Error::input(format!("every tuple must have {k} entries")));
    }
    let mut out = BTreeMap::new();
    for i in 1..=k {
        for j in 1..=k {
            if i != j {
                out.insert((i, j), projection(n, tuples, i, j)?);
            }
        }
    }
    Ok(out)
}

/// The machine with relation states reachable from the identity,
/// `f(R, (i, j)) = R ∘ pi(i, j)` and bad pairs `{id} × (reachable \ S)`.
#[derive(Debug, Clone)]
pub struct RelationMachine {
    pub machine: Machine,
    /// Relation held by each state, state 0 being the identity.
    pub relations: Vec<Relation>,
}

pub fn build_relation_machine(
    s_set: &BTreeSet<Relation>,
    k: usize,
    pi: &BTreeMap<(usize, usize), Relation>,
) -> Result<RelationMachine> {
    let n = pi
        .values()
        .next()
        .map(Relation::n)
        .or_else(|| s_set.iter().next().map(Relation::n));
    let n = n.ok_or_else(|| Error::input("cannot infer domain size from an empty map and set"))?;
    for i in 1..=k {
        for j in 1..=k {
            if i != j && !pi.contains_key(&(i, j)) {
                return Err(Error::input(format!("pi({i}, {j}) is undefined")));
            }
        }
    }
    for (&(i, j), r) in pi {
        if i == j || i == 0 || j == 0 || i > k || j > k {
            return Err(Error::input(format!(
                "pi is defined at ({i}, {j}) outside [k]^2 minus the diagonal"
            )));
        }
        same_size(r, &Relation::identity(n)?)?;
    }
    let id = Relation::identity(n)?;
    if !s_set.contains(&id) {
        return Err(Error::InvalidMachine(
            "the identity is not in S, so (id, id) would be a bad pair".into(),
        ));
    }
    let mut index: HashMap<Relation, usize> = HashMap::from([(id, 0)]);
    let mut relations = vec![id];
    let mut transitions = Vec::new();
    let mut next = 0;
    while next < relations.len() {
        let r = relations[next];
        for (&(i, j), p) in pi {
            let t = r.compose(p)?;
            let target = *index.entry(t).or_insert_with(|| {
                relations.push(t);
                relations.len() - 1
            });
            transitions.push((next, i, j, target));
        }
        next += 1;
    }
    let bad: Vec<(usize, usize)> = relations
        .iter()
        .enumerate()
        .filter(|(_, r)| !s_set.contains(r))
        .map(|(t, _)| (0, t))
        .collect();
    let names = relations.iter().map(Relation::to_string).collect();
    let machine = Machine::new(k, names, transitions, bad)?;
    Ok(RelationMachine { machine, relations })
}

/// `R = {xy, xz, yz, zx}` on `x = 0, y = 1, z = 2`.
pub fn alternating_relation() -> Relation {
    Relation::new(3, [(0, 1), (0, 2), (1, 2), (2, 0)]).expect("well formed")
}

/// Word states over the letters `R` (0) and `R^-` (1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum WordState {
    Empty,
    /// Alternating word with its last letter and whether its length is odd.
    Alternating {
        last: u8,
        odd: bool,
    },
    /// Contains two equal adjacent letters.
    Repeated,
}

impl WordState {
    fn read(self, letter: u8) -> WordState {
        match self {
            WordState::Empty => WordState::Alternating {
                last: letter,
                odd: true,
            },
            WordState::Alternating { last, odd } if last != letter => WordState::Alternating {
                last: letter,
                odd: !odd,
            },
            _ => WordState::Repeated,
        }
    }

    fn accepting(self) -> bool {
        !matches!(self, WordState::Alternating { odd: true, .. })
    }
}

/// Relations of the words in `R, R^-` that contain a repeated letter or are
/// alternating of even length (the empty word giving the identity).
pub fn alternating_s_set(r: &Relation) -> BTreeSet<Relation> {
    let letters = [*r, r.reverse()];
    let start = (
        WordState::Empty,
        Relation::identity(r.n).expect("valid size"),
    );
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((w, rel)) = queue.pop_front() {
        for (c, l) in letters.iter().enumerate() {
            let next = (w.read(c as u8), rel.compose(l).expect("same size"));
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter()
        .filter(|(w, _)| w.accepting())
        .map(|(_, rel)| rel)
        .collect()
}

/// `pi(1, 2) = R`, `pi(2, 1) = R^-`.
pub fn binary_pi(r: &Relation) -> BTreeMap<(usize, usize), Relation> {
    BTreeMap::from([((1, 2), *r), ((2, 1), r.reverse())])
}

pub fn alternating_machine() -> Result<RelationMachine> {
    let r = alternating_relation();
    build_relation_machine(&alternating_s_set(&r), 2, &binary_pi(&r))
}

/// A closed walk alternating forward and backward steps except where it closes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlternatingWitness {
    pub cycle: HyperCycle,
    pub forward: Vec<bool>,
}

/// Odd closed walk whose steps alternate in direction, found by search over
/// (vertex, last direction, parity) from each root. `g` must be 2-uniform.
pub fn detect_odd_alternating_cycle(g: &Hypergraph) -> Result<Option<AlternatingWitness>> {
    if g.k() != 2 {
        return Err(Error::UniformityMismatch {
            hypergraph: g.k(),
            machine: 2,
        });
    }
    // (edge, next vertex, forward)
    let mut steps: Vec<Vec<(usize, usize, bool)>> = vec![Vec::new(); g.num_vertices()];
    for (e, edge) in g.edges().iter().enumerate() {
        steps[edge[0]].push((e, edge[1], true));
        steps[edge[1]].push((e, edge[0], false));
    }
    let key =
        |v: usize, forward: bool, odd: bool| (v * 2 + usize::from(forward)) * 2 + usize::from(odd);
    for root in 0..g.num_vertices() {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; 4 * g.num_vertices()];
        let mut queue = VecDeque::new();
        for &(e, w, fwd) in &steps[root] {
            let x = key(w, fwd, true);
            if parent[x].is_none() {
                parent[x] = Some((usize::MAX, e));
                queue.push_back((w, fwd, true));
            }
        }
        while let Some((v, last, odd)) = queue.pop_front() {
            if v == root && odd {
                let mut cur = key(v, last, odd);
                let mut vertices = vec![v];
                let mut edges = Vec::new();
                let mut forward = Vec::new();
                while let Some((prev, e)) = parent[cur] {
                    edges.push(e);
                    forward.push(cur / 2 % 2 == 1);
                    if prev == usize::MAX {
                        vertices.push(root);
                        break;
                    }
                    vertices.push(prev / 4);
                    cur = prev;
                }
                vertices.reverse();
                edges.reverse();
                forward.reverse();
                return Ok(Some(AlternatingWitness {
                    cycle: HyperCycle { vertices, edges },
                    forward,
                }));
            }
            for &(e, w, fwd) in &steps[v] {
                if fwd == last {
                    continue;
                }
                let x = key(w, fwd, !odd);
                if parent[x].is_none() {
                    parent[x] = Some((key(v, last, odd), e));
                    queue.push_back((w, fwd, !odd));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopPreconditions {
    pub smooth: bool,
    pub weakly_connected: bool,
    /// gcd of the imbalances of closed walks; 0 when every closed walk is balanced.
    pub algebraic_length: u64,
}

impl LoopPreconditions {
    pub fn hold(&self) -> bool {
        self.smooth && self.weakly_connected && self.algebraic_length == 1
    }
}

pub fn loop_preconditions(r: &Relation) -> LoopPreconditions {
    let n = r.n;
    let pairs = r.pairs();
    let mut level: Vec<Option<i64>> = vec![None; n];
    level[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let lv = level[v].unwrap();
        for &(a, b) in &pairs {
            let next = if a == v {
                Some((b, lv + 1))
            } else if b == v {
                Some((a, lv - 1))
            } else {
                None
            };
            if let Some((w, lw)) = next {
                if level[w].is_none() {
                    level[w] = Some(lw);
                    queue.push_back(w);
                }
            }
        }
    }
    let weakly_connected = level.iter().all(Option::is_some);
    let mut gcd = 0u64;
    for &(a, b) in &pairs {
        if let (Some(la), Some(lb)) = (level[a], level[b]) {
            gcd = gcd.gcd(&(la + 1 - lb).unsigned_abs());
        }
    }
    LoopPreconditions {
        smooth: r.is_subdirect(),
        weakly_connected,
        algebraic_length: gcd,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopExponent {
    /// Least `k` such that `(R^l ∘ R^-m)^k` is full for all `k <= l, m <= k_max`.
    pub k: Option<usize>,
    pub k_max: usize,
    /// Powers of `R` repeat from `R^preperiod` with this period.
    pub preperiod: usize,
    pub period: usize,
    /// The window covers every residue of `l` and `m`, so the answer holds for all `l, m >= k`.
    pub conclusive: bool,
}

pub fn power_period(r: &Relation) -> (usize, usize) {
    let mut first_seen: HashMap<Relation, usize> = HashMap::new();
    let mut x = Relation::identity(r.n).expect("valid size");
    for p in 0.. {
        if let Some(&q) = first_seen.get(&x) {
            return (q, p - q);
        }
        first_seen.insert(x, p);
        x = x.compose(r).expect("same size");
    }
    unreachable!()
}

pub fn loop_lemma_exponent(r: &Relation, k_max: usize) -> Result<LoopExponent> {
    let pre = loop_preconditions(r);
    if !pre.smooth {
        return Err(Error::Precondition("relation is not smooth".into()));
    }
    if !pre.weakly_connected {
        return Err(Error::Precondition(
            "relation is not weakly connected".into(),
        ));
    }
    if pre.algebraic_length != 1 {
        return Err(Error::Precondition(format!(
            "algebraic length is {}, not 1",
            pre.algebraic_length
        )));
    }
    let (preperiod, period) = power_period(r);
    let full = Relation::full(r.n)?;
    let powers: Vec<Relation> = (0..=k_max).map(|p| r.power(p)).collect();
    let reversed: Vec<Relation> = powers.iter().map(Relation::reverse).collect();
    let mut found = None;
    for k in 1..=k_max {
        let ok = (k..=k_max).all(|l| {
            (k..=k_max).all(|m| {
                powers[l]
                    .compose(&reversed[m])
                    .map(|x| x.power(k) == full)
                    .unwrap_or(false)
            })
        });
        if ok {
            found = Some(k);
            break;
        }
    }
    let conclusive = found.is_some_and(|k| k_max + 1 >= k.max(preperiod) + period);
    Ok(LoopExponent {
        k: found,
        k_max,
        preperiod,
        period,
        conclusive,
    })
}


#[cfg(test)]
mod machine_vs_detector {
    use super::*;
    use crate::goodness::is_good;

    #[test]
    fn agree_on_all_small_digraphs() {
        let rm = alternating_machine().unwrap();
        for n in 1..=4usize {
            let arcs: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|(a, b)| a != b)
                .collect();
            for mask in 0u32..(1 << arcs.len()) {
                let g = Hypergraph::digraph_on(
                    n,
                    arcs.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &a)| a),
                )
                .unwrap();
                let good = is_good(&g, &rm.machine).unwrap().is_good();
                let none = detect_odd_alternating_cycle(&g).unwrap().is_none();
                assert_eq!(good, none, "n={n} mask={mask}");
            }
        }
    }
}
