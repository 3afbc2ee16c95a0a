//! Seeded random instances and exhaustive small families for cross-checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypergraph::Hypergraph;
use crate::machine::Machine;
use crate::reductions::{CnfInstance, Literal};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|s| format!("q{s}")).collect()
}

/// Loopless digraph, each ordered pair present with probability `p`.
pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Hypergraph {
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(p) {
                arcs.push((a, b));
            }
        }
    }
    Hypergraph::digraph_on(n, arcs).expect("valid arcs")
}

/// `edges` random `k`-tuples of distinct vertices; needs `n >= k`.
pub fn random_hypergraph<R: Rng>(rng: &mut R, n: usize, k: usize, edges: usize) -> Hypergraph {
    let vertices: Vec<usize> = (0..n).collect();
    let list = (0..edges)
        .map(|_| vertices.choose_multiple(rng, k).copied().collect())
        .collect();
    Hypergraph::new(k, (1..=n).map(|v| v.to_string()).collect(), list)
        .expect("distinct coordinates")
}

/// Each `(s, i, j, t)` is a transition with probability `density`.
fn random_transitions<R: Rng>(
    rng: &mut R,
    k: usize,
    n: usize,
    density: f64,
) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for s in 0..n {
        for i in 1..=k {
            for j in 1..=k {
                for t in 0..n {
                    if rng.gen_bool(density) {
                        out.push((s, i, j, t));
                    }
                }
            }
        }
    }
    out
}

/// General machine: every off-diagonal pair is bad with probability `bad_p`.
pub fn random_general_machine<R: Rng>(
    rng: &mut R,
    k: usize,
    n: usize,
    density: f64,
    bad_p: f64,
) -> Machine {
    let transitions = random_transitions(rng, k, n, density);
    let mut bad = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen_bool(bad_p) {
                bad.push((s, t));
            }
        }
    }
    Machine::new(k, state_names(n), transitions, bad).expect("valid machine")
}

pub fn random_cycling_machine<R: Rng>(rng: &mut R, k: usize, n: usize, density: f64) -> Machine {
    let transitions = random_transitions(rng, k, n, density);
    Machine::new(k, state_names(n), transitions, (0..n).map(|s| (s, s))).expect("valid machine")
}

/// Either semantics with equal probability.
pub fn random_machine<R: Rng>(rng: &mut R, k: usize, n: usize, density: f64) -> Machine {
    if rng.gen_bool(0.5) {
        random_cycling_machine(rng, k, n, density)
    } else {
        random_general_machine(rng, k, n, density, 0.4)
    }
}

/// Every cycling 2-machine on `n` states whose transition sets have at most
/// two targets, over all four position pairs. `n` is 1 or 2.
pub fn all_cycling_2machines(n: usize) -> impl Iterator<Item = Machine> {
    assert!(
        (1..=2).contains(&n),
        "exhaustive family is defined for one or two states"
    );
    // target sets of size <= 2 as bitmasks over the states
    let options: Vec<u32> = (0u32..(1 << n)).filter(|m| m.count_ones() <= 2).collect();
    let keys: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|s| [(1, 1), (1, 2), (2, 1), (2, 2)].map(|(i, j)| (s, i, j)))
        .collect();
    let total = options.len().pow(keys.len() as u32);
    (0..total).map(move |mut code| {
        let mut transitions = Vec::new();
        for &(s, i, j) in &keys {
            let mask = options[code % options.len()];
            code /= options.len();
            transitions.extend((0..n).filter(|t| mask >> t & 1 == 1).map(|t| (s, i, j, t)));
        }
        Machine::new(2, state_names(n), transitions, (0..n).map(|s| (s, s))).expect("valid machine")
    })
}

/// Clauses over three distinct variables with random signs; needs `vars >= 3`.
pub fn random_3cnf<R: Rng>(rng: &mut R, vars: usize, clauses: usize) -> CnfInstance {
    let all: Vec<usize> = (0..vars).collect();
    let list = (0..clauses)
        .map(|_| {
            let picked: Vec<usize> = all.choose_multiple(rng, 3).copied().collect();
            [0, 1, 2].map(|t| Literal {
                var: picked[t],
                positive: rng.gen_bool(0.5),
            })
        })
        .collect();
    CnfInstance::new((1..=vars).map(|v| format!("x{v}")).collect(), list).expect("valid literals")
}
