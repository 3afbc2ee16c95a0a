//! α-balanced digraphs: recognition, the potential-based coloring with
//! `⌈α⌉ + 1` colors, and the comparison with goodness under counter machines.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::generators::gen_counter_machine;
use crate::goodness::is_good;
use crate::hypergraph::Hypergraph;
use crate::kernels::{longest_walk_potentials, min_cycle_mean, Potentials, WeightedDigraph};

/// One step of a traversal: `edge` walked forward (tail to head) or backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedStep {
    pub edge: usize,
    pub forward: bool,
}

/// A closed traversal with `backward >= α forward`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceWitness {
    pub steps: Vec<OrientedStep>,
    pub forward: usize,
    pub backward: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceVerdict {
    pub balanced: bool,
    pub witness: Option<BalanceWitness>,
}

fn require_digraph(g: &Hypergraph) -> Result<()> {
    if g.k() != 2 {
        return Err(Error::Precondition(format!(
            "expected a digraph, got uniformity {}",
            g.k()
        )));
    }
    Ok(())
}

fn require_alpha(alpha: Rational64) -> Result<()> {
    if alpha <= Rational64::one() {
        return Err(Error::Precondition(format!(
            "alpha must exceed 1, got {alpha}"
        )));
    }
    Ok(())
}

/// Each edge `(a, b)` becomes `a -> b` with weight `forward` and `b -> a`
/// with weight `backward`. Arc `2e` is edge `e` forward, `2e + 1` backward.
fn doubled(g: &Hypergraph, forward: Rational64, backward: Rational64) -> WeightedDigraph {
    let mut d = WeightedDigraph::new(g.num_vertices());
    for e in g.edges() {
        d.add_arc(e[0], e[1], forward);
        d.add_arc(e[1], e[0], backward);
    }
    d
}

/// Balanced iff every closed traversal has positive weight when forward
/// steps weigh `p` and backward steps `-q`, with `α = p / q`.
pub fn is_alpha_balanced(g: &Hypergraph, alpha: Rational64) -> Result<BalanceVerdict> {
    require_digraph(g)?;
    require_alpha(alpha)?;
    let d = doubled(
        g,
        Rational64::from_integer(*alpha.numer()),
        Rational64::from_integer(-*alpha.denom()),
    );
    match min_cycle_mean(&d) {
        Some(c) if c.mean <= Rational64::zero() => {
            let steps: Vec<OrientedStep> = c
                .arcs
                .iter()
                .map(|&a| OrientedStep {
                    edge: a / 2,
                    forward: a % 2 == 0,
                })
                .collect();
            let forward = steps.iter().filter(|s| s.forward).count();
            let backward = steps.len() - forward;
            Ok(BalanceVerdict {
                balanced: false,
                witness: Some(BalanceWitness {
                    steps,
                    forward,
                    backward,
                }),
            })
        }
        _ => Ok(BalanceVerdict {
            balanced: true,
            witness: None,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedColoring {
    /// `⌈α⌉`.
    pub alpha_ceil: i64,
    /// Longest-walk value of every vertex from its component's least vertex.
    pub potentials: Vec<i64>,
    pub coloring: Coloring,
}

/// Weak components, each listed ascending, ordered by least vertex.
pub fn weak_components(g: &Hypergraph) -> Vec<Vec<usize>> {
    let n = g.num_vertices();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e[0]].push(e[1]);
        adj[e[1]].push(e[0]);
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let mut comp = vec![v];
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                    stack.push(y);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Colors by `ℓ(v) mod (⌈α⌉ + 1)` where `ℓ` counts forward steps minus
/// `⌈α⌉` times backward steps along the best walk from the component's
/// least vertex.
pub fn balanced_coloring(g: &Hypergraph, alpha: Rational64) -> Result<BalancedColoring> {
    let verdict = is_alpha_balanced(g, alpha)?;
    if let Some(w) = verdict.witness {
        return Err(Error::Unbalanced(Box::new(w)));
    }
    let a = alpha.ceil().to_integer();
    let n = g.num_vertices();
    let mut potentials = vec![0i64; n];
    for comp in weak_components(g) {
        let mut local = vec![usize::MAX; n];
        for (i, &v) in comp.iter().enumerate() {
            local[v] = i;
        }
        let mut d = WeightedDigraph::new(comp.len());
        for e in g.edges() {
            if local[e[0]] != usize::MAX {
                d.add_arc(local[e[0]], local[e[1]], Rational64::one());
                d.add_arc(local[e[1]], local[e[0]], Rational64::from_integer(-a));
            }
        }
        match longest_walk_potentials(&d, 0)? {
            Potentials::Finite(values) => {
                for (i, &v) in comp.iter().enumerate() {
                    potentials[v] = values[i].to_integer();
                }
            }
            Potentials::Unbounded(_) => {
                return Err(Error::Precondition(
                    "potentials unbounded on a balanced digraph".into(),
                ));
            }
        }
    }
    let colors = potentials
        .iter()
        .map(|&l| l.rem_euclid(a + 1) as usize)
        .collect();
    Ok(BalancedColoring {
        alpha_ceil: a,
        potentials,
        coloring: Coloring { colors },
    })
}

/// Edges violating `ℓ(a) + 1 <= ℓ(b) <= ℓ(a) + ⌈α⌉`.
pub fn potential_violations(g: &Hypergraph, bc: &BalancedColoring) -> Vec<usize> {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let (la, lb) = (bc.potentials[e[0]], bc.potentials[e[1]]);
            !(la + 1 <= lb && lb <= la + bc.alpha_ceil)
        })
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub two_balanced: bool,
    /// Good for every counter machine `M_0 .. M_{n_max}`.
    pub all_good: bool,
    pub first_bad_n: Option<usize>,
    pub n_max: usize,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.two_balanced == self.all_good
    }
}

/// Default counter bound `2 |E| + 2`.
pub fn default_counter_cap(g: &Hypergraph) -> usize {
    2 * g.num_edges() + 2
}

pub fn check_two_balanced_equivalence(g: &Hypergraph, n_max: usize) -> Result<EquivalenceReport> {
    let two_balanced = is_alpha_balanced(g, Rational64::from_integer(2))?.balanced;
    let mut first_bad_n = None;
    for n in 0..=n_max {
        if !is_good(g, &gen_counter_machine(n))?.is_good() {
            first_bad_n = Some(n);
            break;
        }
    }
    Ok(EquivalenceReport {
        two_balanced,
        all_good: first_bad_n.is_none(),
        first_bad_n,
        n_max,
    })
}

/// `p/q` or an integer, e.g. `3/2`, `2`.
pub fn parse_alpha(text: &str) -> Result<Rational64> {
    let parse = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad rational `{text}`")))
    };
    let value = match text.split_once('/') {
        Some((p, q)) => {
            let q = parse(q)?;
            if q == 0 {
                return Err(Error::Parse(format!("zero denominator in `{text}`")));
            }
            Rational64::new(parse(p)?, q)
        }
        None => Rational64::from_integer(parse(text)?),
    };
    Ok(value)
}
