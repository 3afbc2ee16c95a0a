//! Compatible orders for cycling machines: total orders on `S x [k]` whose
//! restrictions to the copies `S x {i}` agree and along which every
//! transition strictly increases.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::machine::{Machine, Semantics, StatePosition};
use crate::order::system::OrderSystem;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompatibleOrder {
    /// `S x [k]` from least to greatest.
    pub sequence: Vec<StatePosition>,
}

impl CompatibleOrder {
    /// The order restricted to copy `position`, as state indices ascending.
    pub fn copy_order(&self, position: usize) -> Vec<usize> {
        self.sequence
            .iter()
            .filter(|sp| sp.position == position)
            .map(|sp| sp.state)
            .collect()
    }

    /// Rank of every carrier element, indexed by [`StatePosition::index`].
    pub fn ranks(&self, num_states: usize) -> Vec<usize> {
        let mut rank = vec![usize::MAX; self.sequence.len()];
        for (r, sp) in self.sequence.iter().enumerate() {
            rank[sp.index(num_states)] = r;
        }
        rank
    }

    /// Singleton classes with the partial order equal to the total order.
    pub fn to_order_system(&self, num_states: usize) -> OrderSystem {
        let ranks = self.ranks(num_states);
        OrderSystem::from_keys(&ranks, |a, b| a < b).expect("a total order is an order system")
    }

    pub fn to_file(&self, m: &Machine) -> Vec<(String, usize)> {
        self.sequence
            .iter()
            .map(|sp| (m.state_name(sp.state).to_string(), sp.position))
            .collect()
    }

    pub fn from_file(m: &Machine, pairs: &[(String, usize)]) -> Result<Self> {
        let mut sequence = Vec::with_capacity(pairs.len());
        for (name, pos) in pairs {
            let s = m
                .state_index(name)
                .ok_or_else(|| Error::UnknownState(name.clone()))?;
            if *pos == 0 || *pos > m.k() {
                return Err(Error::Position {
                    position: *pos,
                    k: m.k(),
                });
            }
            sequence.push(StatePosition::new(s, *pos));
        }
        Ok(CompatibleOrder { sequence })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderViolation {
    /// Copies `first` and `second` order `S` differently.
    RestrictionsDisagree { first: usize, second: usize },
    /// `to ∈ f(from.state, (from.position, to.position))` but `to` is not above `from`.
    TransitionNotIncreasing {
        from: (usize, usize),
        to: (usize, usize),
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderCheck {
    pub violations: Vec<OrderViolation>,
}

impl OrderCheck {
    pub fn is_compatible(&self) -> bool {
        self.violations.is_empty()
    }
}

fn require_cycling(m: &Machine) -> Result<()> {
    m.require(Semantics::Cycling)
}

pub fn verify_compatible_order(m: &Machine, order: &CompatibleOrder) -> Result<OrderCheck> {
    require_cycling(m)?;
    let n = m.num_states();
    let total = n * m.k();
    let ranks = order.ranks(n);
    if order.sequence.len() != total || ranks.contains(&usize::MAX) {
        return Err(Error::input("order is not a total order on S x [k]"));
    }
    let mut violations = Vec::new();
    let base = order.copy_order(1);
    for i in 2..=m.k() {
        if order.copy_order(i) != base {
            violations.push(OrderViolation::RestrictionsDisagree {
                first: 1,
                second: i,
            });
        }
    }
    for (s, i, j, t) in m.transitions() {
        let from = StatePosition::new(s, i);
        let to = StatePosition::new(t, j);
        if ranks[from.index(n)] >= ranks[to.index(n)] {
            violations.push(OrderViolation::TransitionNotIncreasing {
                from: (s, i),
                to: (t, j),
            });
        }
    }
    Ok(OrderCheck { violations })
}

/// Arcs of the precedence graph on `S x [k]` that a state order `prefix`
/// forces: consecutive placed states in every copy, the last placed state
/// below every unplaced one, and every transition.
struct Precedence<'a> {
    m: &'a Machine,
    n: usize,
    k: usize,
    transitions: Vec<(usize, usize)>,
}

impl<'a> Precedence<'a> {
    fn new(m: &'a Machine) -> Self {
        let n = m.num_states();
        let transitions = m
            .transitions()
            .map(|(s, i, j, t)| {
                (
                    StatePosition::new(s, i).index(n),
                    StatePosition::new(t, j).index(n),
                )
            })
            .collect();
        Precedence {
            m,
            n,
            k: m.k(),
            transitions,
        }
    }

    fn successors(&self, prefix: &[usize]) -> Vec<Vec<usize>> {
        let (n, k) = (self.n, self.k);
        let mut succ = vec![Vec::new(); n * k];
        let mut placed = vec![false; n];
        for &s in prefix {
            placed[s] = true;
        }
        for i in 1..=k {
            let at = |s: usize| StatePosition::new(s, i).index(n);
            for w in prefix.windows(2) {
                succ[at(w[0])].push(at(w[1]));
            }
            if let Some(&last) = prefix.last() {
                for u in (0..n).filter(|&u| !placed[u]) {
                    succ[at(last)].push(at(u));
                }
            }
        }
        for &(a, b) in &self.transitions {
            succ[a].push(b);
        }
        succ
    }

    /// Least-index-first topological order, or `None` on a cycle.
    fn topo(&self, prefix: &[usize]) -> Option<Vec<usize>> {
        let succ = self.successors(prefix);
        let total = succ.len();
        let mut indeg = vec![0usize; total];
        for list in &succ {
            for &b in list {
                indeg[b] += 1;
            }
        }
        let mut heap: BinaryHeap<Reverse<usize>> =
            (0..total).filter(|&x| indeg[x] == 0).map(Reverse).collect();
        let mut out = Vec::with_capacity(total);
        while let Some(Reverse(x)) = heap.pop() {
            out.push(x);
            for &b in &succ[x] {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    heap.push(Reverse(b));
                }
            }
        }
        (out.len() == total).then_some(out)
    }

    fn order_for(&self, perm: &[usize]) -> Option<CompatibleOrder> {
        let _ = self.m;
        self.topo(perm).map(|idx| CompatibleOrder {
            sequence: idx
                .into_iter()
                .map(|x| StatePosition::from_index(x, self.n))
                .collect(),
        })
    }
}

/// Compatible order for a state permutation, if the precedence graph it
/// induces is acyclic (least-index topological order).
pub fn order_from_state_permutation(m: &Machine, perm: &[usize]) -> Option<CompatibleOrder> {
    Precedence::new(m).order_for(perm)
}

/// Exhaustive search over orders of `S` in lexicographic order, pruning a
/// prefix as soon as the precedence graph it forces has a cycle. States
/// without transitions are placed last. Returns the least-index topological
/// order for the first feasible permutation.
pub fn find_compatible_order(m: &Machine, budget: &mut Budget) -> Result<Option<CompatibleOrder>> {
    require_cycling(m)?;
    let prec = Precedence::new(m);
    let n = m.num_states();
    let mut used = vec![true; n];
    for (s, _, _, t) in m.transitions() {
        used[s] = false;
        used[t] = false;
    }
    let free: Vec<usize> = (0..n).filter(|&s| used[s]).collect();
    let mut prefix = Vec::with_capacity(n);
    if search(&prec, &mut prefix, &mut used, n - free.len(), budget)? {
        prefix.extend(free);
        let found = prec
            .order_for(&prefix)
            .expect("search only accepts feasible permutations");
        debug_assert!(verify_compatible_order(m, &found)?.is_compatible());
        Ok(Some(found))
    } else {
        Ok(None)
    }
}

fn search(
    prec: &Precedence<'_>,
    prefix: &mut Vec<usize>,
    used: &mut [bool],
    target: usize,
    budget: &mut Budget,
) -> Result<bool> {
    budget.tick()?;
    if prec.topo(prefix).is_none() {
        return Ok(false);
    }
    if prefix.len() == target {
        return Ok(true);
    }
    for s in 0..used.len() {
        if used[s] {
            continue;
        }
        used[s] = true;
        prefix.push(s);
        if search(prec, prefix, used, target, budget)? {
            return Ok(true);
        }
        prefix.pop();
        used[s] = false;
    }
    Ok(false)
}
