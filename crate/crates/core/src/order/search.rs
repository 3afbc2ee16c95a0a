//! Compatibility of order systems on `S x [k]` with a machine, and the
//! exhaustive search for compatible systems.

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::machine::{Machine, Semantics, StatePosition};
use crate::order::system::{enumerate_order_systems, enumerate_suborders, OrderSystem};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemViolation {
    /// Condition 1: a transition goes down (or sideways) in `⪯`.
    TransitionNotMonotone {
        from: (usize, usize),
        to: (usize, usize),
    },
    /// Condition 2: the systems induced on two copies differ.
    CopiesDiffer { first: usize, second: usize },
    /// Condition 3: `s ⪯ t` in the induced system although `(s, t)` is bad.
    BadPairComparable { s: usize, t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemCheck {
    pub violations: Vec<SystemViolation>,
}

impl SystemCheck {
    pub fn is_compatible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Elements of the copy `S x {position}`, in state order.
pub fn copy_elements(num_states: usize, position: usize) -> Vec<usize> {
    (0..num_states)
        .map(|s| StatePosition::new(s, position).index(num_states))
        .collect()
}

pub fn verify_order_system(m: &Machine, os: &OrderSystem) -> Result<SystemCheck> {
    let n = m.num_states();
    if os.carrier_size() != n * m.k() {
        return Err(Error::input(format!(
            "order system has {} elements, S x [k] has {}",
            os.carrier_size(),
            n * m.k()
        )));
    }
    let mut violations = Vec::new();
    for (s, i, j, t) in m.transitions() {
        let a = StatePosition::new(s, i).index(n);
        let b = StatePosition::new(t, j).index(n);
        if !os.precedes(a, b) {
            violations.push(SystemViolation::TransitionNotMonotone {
                from: (s, i),
                to: (t, j),
            });
        }
    }
    let induced = os.restrict(&copy_elements(n, 1));
    for i in 2..=m.k() {
        if os.restrict(&copy_elements(n, i)) != induced {
            violations.push(SystemViolation::CopiesDiffer {
                first: 1,
                second: i,
            });
        }
    }
    for &(s, t) in m.bad() {
        if induced.precedes(s, t) {
            violations.push(SystemViolation::BadPairComparable { s, t });
        }
    }
    Ok(SystemCheck { violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    First,
    All,
}

/// Searches compatible order systems in canonical order.
///
/// The system `A` induced on `S` is enumerated first (already filtered by
/// condition 3). Condition 2 then says the linear order on `S x [k]` is a
/// sequence of blocks, each block merging at most one class of `A` per copy,
/// with every copy walking through `A`'s classes in `A`'s linear order. Block
/// sequences are enumerated by choosing, at each step, the nonempty set of
/// advancing copies in ascending bitmask order. Finally the partial order on
/// blocks is enumerated subject to the pairs forced or forbidden by `A` and
/// by the transitions.
pub fn find_order_system(
    m: &Machine,
    mode: SearchMode,
    budget: &mut Budget,
) -> Result<Vec<OrderSystem>> {
    m.require(Semantics::General)?;
    let n = m.num_states();
    let k = m.k();
    if k > 16 {
        return Err(Error::Precondition(
            "order system search supports k <= 16".into(),
        ));
    }
    let mut found = Vec::new();
    let mut stop = false;
    let transitions: Vec<_> = m.transitions().collect();
    let mut on_induced = |a: OrderSystem| -> Result<bool> {
        budget.tick()?;
        let c = a.num_classes();
        if c * k > 64 {
            return Err(Error::Precondition("too many blocks for the search".into()));
        }
        // rank of each state's class in A's chain
        let level: Vec<usize> = (0..n).map(|s| a.level(s)).collect();
        let chain: Vec<usize> = a.linear().to_vec();
        let mut blocks: Vec<u32> = Vec::new();
        let mut progress = vec![0usize; k];
        let mut result = Ok(());
        interleavings(k, c, &mut progress, &mut blocks, &mut |blocks: &[u32]| {
            if result.is_err() || stop {
                return false;
            }
            if let Err(e) = budget.tick() {
                result = Err(e);
                return false;
            }
            // block_of[copy][level]
            let mut block_of = vec![vec![0usize; c]; k];
            let mut seen = vec![0usize; k];
            for (b, &mask) in blocks.iter().enumerate() {
                for (i, row) in block_of.iter_mut().enumerate() {
                    if mask >> i & 1 == 1 {
                        row[seen[i]] = b;
                        seen[i] += 1;
                    }
                }
            }
            let mut forced = Vec::new();
            let mut forbidden = Vec::new();
            for row in &block_of {
                for p in 0..c {
                    for q in p + 1..c {
                        let pair = (row[p], row[q]);
                        if a.class_below(chain[p], chain[q]) {
                            forced.push(pair);
                        } else {
                            forbidden.push(pair);
                        }
                    }
                }
            }
            for &(s, i, j, t) in &transitions {
                let (x, y) = (block_of[i - 1][level[s]], block_of[j - 1][level[t]]);
                if x > y {
                    return true;
                }
                if x < y {
                    forced.push((x, y));
                }
            }
            let carrier_classes: Vec<Vec<usize>> = (0..blocks.len())
                .map(|b| {
                    let mut members = Vec::new();
                    for (i, row) in block_of.iter().enumerate() {
                        if let Some(lv) = row.iter().position(|&x| x == b) {
                            members.extend(
                                a.classes()[chain[lv]]
                                    .iter()
                                    .map(|&s| StatePosition::new(s, i + 1).index(n)),
                            );
                        }
                    }
                    members.sort_unstable();
                    members
                })
                .collect();
            let linear: Vec<usize> = (0..blocks.len()).collect();
            let outcome = enumerate_suborders(blocks.len(), &forced, &forbidden, &mut |rel| {
                budget.tick()?;
                let partial: Vec<(usize, usize)> = (0..blocks.len())
                    .flat_map(|p| (p + 1..blocks.len()).map(move |q| (p, q)))
                    .filter(|&(p, q)| rel.has(p, q))
                    .collect();
                let os = OrderSystem::new(n * k, carrier_classes.clone(), &partial, &linear)?;
                debug_assert!(verify_order_system(m, &os)?.is_compatible());
                found.push(os);
                Ok(mode == SearchMode::All)
            });
            match outcome {
                Ok(true) => true,
                Ok(false) => {
                    stop = true;
                    false
                }
                Err(e) => {
                    result = Err(e);
                    false
                }
            }
        });
        result?;
        Ok(!stop)
    };
    enumerate_order_systems(n, &|s, t| m.is_bad(s, t), &mut on_induced)?;
    Ok(found)
}

/// Calls `visit` with every sequence of nonempty copy masks in which each of
/// the `k` copies appears exactly `c` times. Returns `false` if stopped.
fn interleavings(
    k: usize,
    c: usize,
    progress: &mut [usize],
    blocks: &mut Vec<u32>,
    visit: &mut dyn FnMut(&[u32]) -> bool,
) -> bool {
    let open: u32 = (0..k)
        .filter(|&i| progress[i] < c)
        .fold(0, |acc, i| acc | 1 << i);
    if open == 0 {
        return visit(blocks);
    }
    for mask in 1..=open {
        if mask & !open != 0 {
            continue;
        }
        for i in 0..k {
            if mask >> i & 1 == 1 {
                progress[i] += 1;
            }
        }
        blocks.push(mask);
        let go_on = interleavings(k, c, progress, blocks, visit);
        blocks.pop();
        for i in 0..k {
            if mask >> i & 1 == 1 {
                progress[i] -= 1;
            }
        }
        if !go_on {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        gen_example3_machine, gen_hasse_machine, gen_unbalanced_machine, unbalanced_order_system,
    };

    /// `(0,1) < (1,1) ~ (0,2) < (1,2)` with `(0,1) ≺ (1,2)` only.
    fn example3_system() -> OrderSystem {
        // carrier: 0 = (0,1), 1 = (1,1), 2 = (0,2), 3 = (1,2)
        OrderSystem::new(4, vec![vec![0], vec![1, 2], vec![3]], &[(0, 2)], &[0, 1, 2]).unwrap()
    }

    #[test]
    fn example3_system_is_compatible() {
        let m = gen_example3_machine();
        assert!(verify_order_system(&m, &example3_system())
            .unwrap()
            .is_compatible());
    }

    #[test]
    fn reflexive_bad_pair_breaks_condition_three() {
        let m = gen_example3_machine();
        let mut bad: Vec<_> = m.bad().iter().copied().collect();
        bad.push((0, 0));
        let m = m.with_bad(bad).unwrap();
        let check = verify_order_system(&m, &example3_system()).unwrap();
        assert!(check
            .violations
            .contains(&SystemViolation::BadPairComparable { s: 0, t: 0 }));
    }

    #[test]
    fn carrier_mismatch_is_an_error() {
        let m = gen_example3_machine();
        let os = OrderSystem::new(2, vec![vec![0, 1]], &[], &[0]).unwrap();
        assert!(verify_order_system(&m, &os).is_err());
    }

    #[test]
    fn example3_has_exactly_one_system() {
        let m = gen_example3_machine();
        let all = find_order_system(&m, SearchMode::All, &mut Budget::default()).unwrap();
        assert_eq!(all, vec![example3_system()]);
    }

    #[test]
    fn cycling_machines_are_not_searched() {
        let m = crate::generators::gen_counter_machine(2);
        assert!(matches!(
            find_order_system(&m, SearchMode::First, &mut Budget::default()),
            Err(Error::InvalidMachine(_))
        ));
    }

    #[test]
    fn hasse_machine_has_a_system() {
        let m = gen_hasse_machine();
        let found = find_order_system(&m, SearchMode::First, &mut Budget::default()).unwrap();
        assert_eq!(found.len(), 1);
        assert!(verify_order_system(&m, &found[0]).unwrap().is_compatible());
    }

    #[test]
    fn unbalanced_systems_verify() {
        for k in 1..=3 {
            let m = gen_unbalanced_machine(k);
            let os = unbalanced_order_system(k);
            let check = verify_order_system(&m, &os).unwrap();
            assert!(check.is_compatible(), "k = {k}: {:?}", check.violations);
        }
    }

    #[test]
    fn interleavings_of_two_chains() {
        // weak interleavings of two chains of length c: Delannoy numbers
        for (c, expect) in [(0, 1), (1, 3), (2, 13), (3, 63)] {
            let mut count = 0;
            interleavings(2, c, &mut [0, 0], &mut Vec::new(), &mut |_| {
                count += 1;
                true
            });
            assert_eq!(count, expect, "c = {c}");
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let m = gen_hasse_machine();
        assert!(matches!(
            find_order_system(&m, SearchMode::All, &mut Budget::new(5)),
            Err(Error::BudgetExhausted { .. })
        ));
    }
}
