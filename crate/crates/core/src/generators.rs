//! Explicit machines and hypergraphs.
//!
//! Vertex naming: an `r`-subset of `[m]` is written `{a,b,c}` with ascending
//! elements, an increasing pair as `(a,b)`, and a pair of subsets as
//! `{..}|{..}`. Vertices are listed in lexicographic order of these encodings'
//! underlying integers (subsets by their sorted element lists, pairs of
//! subsets by their bitmasks).

use crate::error::{Error, Result};
use crate::hypergraph::{path_digraph, Hypergraph};
use crate::machine::{Machine, StatePosition};
use crate::order::{verify_compatible_order, CompatibleOrder, OrderSystem};

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// The 4-state machine whose good digraphs are exactly Hasse diagrams.
pub fn gen_hasse_machine() -> Machine {
    let (s, t, u, v) = (0, 1, 2, 3);
    Machine::new(
        2,
        names(&["s", "t", "u", "v"]),
        [(s, 1, 2, t), (t, 1, 2, t), (t, 2, 1, u), (u, 1, 2, v)],
        [(s, t), (s, v)],
    )
    .expect("well formed")
}

/// Cycling 2-machine on `{0..n}`: `f(i,(1,2)) = min(i+1, n)`, `f(i,(2,1)) = i-2` for `i >= 2`.
pub fn gen_counter_machine(n: usize) -> Machine {
    let states = (0..=n).map(|i| i.to_string()).collect();
    let mut transitions = Vec::new();
    for i in 0..=n {
        transitions.push((i, 1, 2, (i + 1).min(n)));
        if i >= 2 {
            transitions.push((i, 2, 1, i - 2));
        }
    }
    Machine::new(2, states, transitions, (0..=n).map(|i| (i, i))).expect("well formed")
}

/// Each copy reversed; `(i,1) ≺ (j,2)` iff `i > j - shift`. The compatible
/// order for the counter machine uses `shift = 2`.
pub fn counter_machine_order(n: usize, shift: i64) -> CompatibleOrder {
    let states = n + 1;
    let key = |sp: StatePosition| -> i64 {
        let i = sp.state as i64;
        if sp.position == 1 {
            -2 * i
        } else {
            -2 * i + 2 * shift - 1
        }
    };
    let mut sequence: Vec<StatePosition> = (0..2 * states)
        .map(|x| StatePosition::from_index(x, states))
        .collect();
    sequence.sort_by_key(|&sp| key(sp));
    CompatibleOrder { sequence }
}

/// The machine on `{0, 1}` with `B = {(0, 1)}`.
pub fn gen_example3_machine() -> Machine {
    Machine::new(
        2,
        names(&["0", "1"]),
        [(0, 1, 2, 1), (0, 2, 1, 1), (1, 1, 2, 0)],
        [(0, 1)],
    )
    .expect("well formed")
}

/// Index of `a_i` (`-k <= i <= k`) in [`gen_unbalanced_machine`].
pub fn unbalanced_a(k: usize, i: i64) -> usize {
    (i + k as i64) as usize
}

/// Index of `b_j` (`0 <= j <= k`) in [`gen_unbalanced_machine`].
pub fn unbalanced_b(k: usize, j: usize) -> usize {
    2 * k + 1 + j
}

/// States `a_{-k} .. a_k, b_0 .. b_k`, bad pairs `{a_0} x (S \ {a_0})`.
pub fn gen_unbalanced_machine(k: usize) -> Machine {
    assert!(k >= 1, "k >= 1");
    let ki = k as i64;
    let a = |i: i64| unbalanced_a(k, i);
    let b = |j: usize| unbalanced_b(k, j);
    let mut states: Vec<String> = (-ki..=ki).map(|i| format!("a{i}")).collect();
    states.extend((0..=k).map(|j| format!("b{j}")));
    let mut transitions = Vec::new();
    for i in -ki..ki {
        transitions.push((a(i), 1, 2, a(i + 1)));
    }
    for i in -ki + 1..=ki {
        transitions.push((a(i), 2, 1, a(i - 1)));
    }
    transitions.push((a(ki), 1, 2, b(0)));
    for j in 0..k {
        transitions.push((b(j), 2, 1, b(j + 1)));
    }
    for j in 1..=k {
        transitions.push((b(j), 1, 2, b(j - 1)));
    }
    transitions.push((b(0), 1, 2, b(0)));
    let n = states.len();
    let bad: Vec<(usize, usize)> = (0..n).filter(|&t| t != a(0)).map(|t| (a(0), t)).collect();
    Machine::new(2, states, transitions, bad).expect("well formed")
}

/// The compatible order system for [`gen_unbalanced_machine`].
pub fn unbalanced_order_system(k: usize) -> OrderSystem {
    let ki = k as i64;
    let n = 3 * k + 2;
    let at = |s: usize, pos: usize| StatePosition::new(s, pos).index(n);
    let a = |i: i64| unbalanced_a(k, i);
    let b = |j: usize| unbalanced_b(k, j);

    // classes in linear order; a-classes carry the value i + u - ... via a
    // representative (state index i, position u) and likewise for b
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut a_rep: Vec<(i64, i64)> = Vec::new();
    let mut b_rep: Vec<(i64, i64)> = Vec::new();
    classes.push(vec![at(a(-ki), 2)]);
    a_rep.push((-ki, 2));
    for i in -ki..ki {
        classes.push(vec![at(a(i), 1), at(a(i + 1), 2)]);
        a_rep.push((i, 1));
    }
    classes.push(vec![at(a(ki), 1)]);
    a_rep.push((ki, 1));
    let first_b = classes.len();
    classes.push(vec![at(b(0), 1)]);
    b_rep.push((0, 1));
    for j in 0..k {
        classes.push(vec![at(b(j), 2), at(b(j + 1), 1)]);
        b_rep.push((j as i64, 2));
    }
    classes.push(vec![at(b(k), 2)]);
    b_rep.push((ki, 2));

    let mut partial = Vec::new();
    for x in 0..b_rep.len() {
        for y in x + 1..b_rep.len() {
            partial.push((first_b + x, first_b + y));
        }
    }
    for (x, &(i, u)) in a_rep.iter().enumerate() {
        for (y, &(j, v)) in b_rep.iter().enumerate() {
            if i + j > ki + u - v {
                partial.push((x, first_b + y));
            }
        }
    }
    let linear: Vec<usize> = (0..classes.len()).collect();
    OrderSystem::new(2 * n, classes, &partial, &linear).expect("well formed")
}

fn subset_name(elements: &[usize]) -> String {
    let inner: Vec<String> = elements.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

fn mask_name(mask: u32) -> String {
    let elements: Vec<usize> = (0..32)
        .filter(|&i| mask >> i & 1 == 1)
        .map(|i| i + 1)
        .collect();
    subset_name(&elements)
}

/// `r`-subsets of `1..=m` in lexicographic order.
pub fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for x in start..=m {
            if m - x + 1 < r - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, m, r, cur, out);
            cur.pop();
        }
    }
    rec(1, m, r, &mut cur, &mut out);
    out
}

/// Hasse diagram of the pairs `{a,b} ⊂ [2^n]` ordered by `max(a,b) <= min(c,d)`.
pub fn gen_explicit_hasse_digraph(n: usize) -> Hypergraph {
    assert!((1..=5).contains(&n), "1 <= n <= 5");
    let pairs = subsets(1 << n, 2);
    let below = |p: &[usize], q: &[usize]| p != q && p[1] <= q[0];
    let mut arcs = Vec::new();
    for (x, p) in pairs.iter().enumerate() {
        for (y, q) in pairs.iter().enumerate() {
            if below(p, q) && !pairs.iter().any(|r| below(p, r) && below(r, q)) {
                arcs.push((x, y));
            }
        }
    }
    Hypergraph::digraph(pairs.iter().map(|p| subset_name(p)).collect(), arcs).expect("well formed")
}

/// Vertices are the `|S|`-subsets of `[m]`; the edges are all `k`-tuples
/// whose union, listed in increasing order, is labelled along `order`.
pub fn gen_cycling_construction(
    machine: &Machine,
    order: &CompatibleOrder,
    m: usize,
) -> Result<Hypergraph> {
    if !verify_compatible_order(machine, order)?.is_compatible() {
        return Err(Error::input("order is not compatible with the machine"));
    }
    let ns = machine.num_states();
    let k = machine.k();
    if m < k * ns {
        return Err(Error::Precondition(format!("need m >= k |S| = {}", k * ns)));
    }
    let vertices = subsets(m, ns);
    let index_of = |set: &[usize]| {
        vertices
            .binary_search_by(|v| v.as_slice().cmp(set))
            .unwrap()
    };
    let mut edges = Vec::new();
    for union in subsets(m, k * ns) {
        let mut parts = vec![Vec::with_capacity(ns); k];
        for (x, sp) in union.iter().zip(&order.sequence) {
            parts[sp.position - 1].push(*x);
        }
        edges.push(parts.iter().map(|p| index_of(p)).collect());
    }
    Hypergraph::new(k, vertices.iter().map(|v| subset_name(v)).collect(), edges)
}

/// Ordered pairs `(A,B)` of subsets of `[m]` with neither contained in the
/// other; arcs `((A,B),(B,C))` with `A ⊂ C` strictly.
pub fn gen_incomparable_pairs_digraph(m: usize) -> Hypergraph {
    assert!(m <= 8, "m <= 8");
    let full = 1u32 << m;
    let sub = |x: u32, y: u32| x & !y == 0;
    let mut vertices = Vec::new();
    for a in 0..full {
        for b in 0..full {
            if !sub(a, b) && !sub(b, a) {
                vertices.push((a, b));
            }
        }
    }
    let mut arcs = Vec::new();
    for (x, &(a, b)) in vertices.iter().enumerate() {
        for (y, &(b2, c)) in vertices.iter().enumerate() {
            if b2 == b && sub(a, c) && a != c {
                arcs.push((x, y));
            }
        }
    }
    let names = vertices
        .iter()
        .map(|&(a, b)| format!("{}|{}", mask_name(a), mask_name(b)))
        .collect();
    Hypergraph::digraph(names, arcs).expect("well formed")
}

/// Increasing pairs `(a,b)` of `[m]` with arcs `((a,b),(b,c))`.
pub fn gen_shift_digraph(m: usize) -> Hypergraph {
    let pairs = subsets(m, 2);
    let index = |a: usize, b: usize| pairs.binary_search(&vec![a, b]).unwrap();
    let mut arcs = Vec::new();
    for p in &pairs {
        for c in p[1] + 1..=m {
            arcs.push((index(p[0], p[1]), index(p[1], c)));
        }
    }
    Hypergraph::digraph(
        pairs
            .iter()
            .map(|p| format!("({},{})", p[0], p[1]))
            .collect(),
        arcs,
    )
    .expect("well formed")
}

/// A named construction with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    HasseMachine,
    CounterMachine {
        n: usize,
    },
    Example3Machine,
    UnbalancedMachine {
        k: usize,
    },
    Path {
        n: usize,
    },
    ExplicitHasse {
        n: usize,
    },
    IncomparablePairs {
        m: usize,
    },
    Shift {
        m: usize,
    },
    /// Counter machine `M_n` with its explicit order, subsets of `[m]`.
    CounterConstruction {
        n: usize,
        m: usize,
    },
}

#[derive(Debug, Clone)]
pub enum Generated {
    Machine(Machine),
    Hypergraph(Hypergraph),
}

#[derive(Debug, Clone)]
pub struct GeneratorOutput {
    pub value: Generated,
    /// Sizes beyond what the exact checks handle comfortably.
    pub warnings: Vec<String>,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<GeneratorOutput> {
        let mut warnings = Vec::new();
        let value = match *self {
            GeneratorSpec::HasseMachine => Generated::Machine(gen_hasse_machine()),
            GeneratorSpec::CounterMachine { n } => Generated::Machine(gen_counter_machine(n)),
            GeneratorSpec::Example3Machine => Generated::Machine(gen_example3_machine()),
            GeneratorSpec::UnbalancedMachine { k } => {
                if k == 0 {
                    return Err(Error::input("unbalanced machine needs k >= 1"));
                }
                Generated::Machine(gen_unbalanced_machine(k))
            }
            GeneratorSpec::Path { n } => Generated::Hypergraph(path_digraph(n)),
            GeneratorSpec::ExplicitHasse { n } => {
                if !(1..=5).contains(&n) {
                    return Err(Error::input("explicit Hasse digraph needs 1 <= n <= 5"));
                }
                if n > 4 {
                    warnings.push(format!(
                        "n = {n} is too large for the exact chromatic solver"
                    ));
                }
                Generated::Hypergraph(gen_explicit_hasse_digraph(n))
            }
            GeneratorSpec::IncomparablePairs { m } => {
                if !(2..=6).contains(&m) {
                    return Err(Error::input("incomparable pairs digraph needs 2 <= m <= 6"));
                }
                if m > 4 {
                    warnings.push(format!("m = {m} is too large for exact downstream checks"));
                }
                Generated::Hypergraph(gen_incomparable_pairs_digraph(m))
            }
            GeneratorSpec::Shift { m } => {
                if m < 2 {
                    return Err(Error::input("shift digraph needs m >= 2"));
                }
                if m > 16 {
                    warnings.push(format!(
                        "m = {m} is too large for the exact chromatic solver"
                    ));
                }
                Generated::Hypergraph(gen_shift_digraph(m))
            }
            GeneratorSpec::CounterConstruction { n, m } => {
                if m > 12 {
                    warnings.push(format!("m = {m} gives a very large hypergraph"));
                }
                let machine = gen_counter_machine(n);
                let order = counter_machine_order(n, 2);
                Generated::Hypergraph(gen_cycling_construction(&machine, &order, m)?)
            }
        };
        Ok(GeneratorOutput { value, warnings })
    }
}
