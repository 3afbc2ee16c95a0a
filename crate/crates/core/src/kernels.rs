//! Directed graph kernels shared by the decision procedures: strong
//! components, reachability, cycle means and longest-walk potentials.
//! All weights are exact rationals.

use std::collections::VecDeque;

use num_rational::Rational64;
use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

pub type Weight = Rational64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub source: usize,
    pub target: usize,
    pub weight: Weight,
}

/// Multigraph on `0..n`; parallel arcs and self-loops allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightedDigraph {
    n: usize,
    arcs: Vec<Arc>,
}

impl WeightedDigraph {
    pub fn new(n: usize) -> Self {
        WeightedDigraph {
            n,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, source: usize, target: usize, weight: Weight) -> usize {
        assert!(
            source < self.n && target < self.n,
            "arc endpoint out of range"
        );
        self.arcs.push(Arc {
            source,
            target,
            weight,
        });
        self.arcs.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: usize) -> Arc {
        self.arcs[a]
    }

    pub fn negated(&self) -> Self {
        WeightedDigraph {
            n: self.n,
            arcs: self
                .arcs
                .iter()
                .map(|a| Arc {
                    weight: -a.weight,
                    ..*a
                })
                .collect(),
        }
    }

    /// Out-arc indices per vertex.
    pub fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n];
        for (i, a) in self.arcs.iter().enumerate() {
            out[a.source].push(i);
        }
        out
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component id of each vertex. Ids follow a topological order of the
    /// condensation: every arc goes from a lower or equal id to a higher or equal one.
    pub component: Vec<usize>,
    /// Members of each component, ascending.
    pub members: Vec<Vec<usize>>,
    /// Deduplicated condensation arcs, sorted.
    pub dag: Vec<(usize, usize)>,
    /// Whether a component contains at least one arc (and so a closed walk of positive length).
    pub cyclic: Vec<bool>,
}

impl Components {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Reflexive reachability between components as bit rows.
    pub fn reachability(&self) -> Vec<Vec<u64>> {
        let c = self.len();
        let words = c.div_ceil(64).max(1);
        let mut reach = vec![vec![0u64; words]; c];
        let mut succ = vec![Vec::new(); c];
        for &(a, b) in &self.dag {
            succ[a].push(b);
        }
        for a in (0..c).rev() {
            reach[a][a / 64] |= 1 << (a % 64);
            for &b in &succ[a] {
                let (lo, hi) = reach.split_at_mut(b);
                for (x, y) in lo[a].iter_mut().zip(hi[0].iter()) {
                    *x |= *y;
                }
            }
        }
        reach
    }
}

pub fn bit(row: &[u64], i: usize) -> bool {
    row[i / 64] >> (i % 64) & 1 == 1
}

/// Strong components of the arc structure (weights ignored), numbered in
/// topological order of the condensation with ties broken by least member.
pub fn strong_components(g: &WeightedDigraph) -> Components {
    let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(g.n, g.arcs.len());
    let nodes: Vec<_> = (0..g.n).map(|_| pg.add_node(())).collect();
    for a in &g.arcs {
        pg.add_edge(nodes[a.source], nodes[a.target], ());
    }
    let raw = tarjan_scc(&pg);
    let mut raw_id = vec![0; g.n];
    for (i, comp) in raw.iter().enumerate() {
        for v in comp {
            raw_id[v.index()] = i;
        }
    }
    let c = raw.len();
    let min_member: Vec<usize> = raw
        .iter()
        .map(|comp| comp.iter().map(|v| v.index()).min().unwrap())
        .collect();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); c];
    let mut indeg = vec![0usize; c];
    for a in &g.arcs {
        let (x, y) = (raw_id[a.source], raw_id[a.target]);
        if x != y {
            succ[x].push(y);
        }
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
        s.dedup();
        for &y in s.iter() {
            indeg[y] += 1;
        }
    }
    // Kahn's algorithm, smallest least-member first.
    let mut ready: std::collections::BTreeSet<(usize, usize)> = (0..c)
        .filter(|&x| indeg[x] == 0)
        .map(|x| (min_member[x], x))
        .collect();
    let mut order = Vec::with_capacity(c);
    while let Some((_, x)) = ready.pop_first() {
        order.push(x);
        for &y in &succ[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                ready.insert((min_member[y], y));
            }
        }
    }
    let mut rank = vec![0; c];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }
    let component: Vec<usize> = (0..g.n).map(|v| rank[raw_id[v]]).collect();
    let mut members = vec![Vec::new(); c];
    for v in 0..g.n {
        members[component[v]].push(v);
    }
    let mut dag: Vec<(usize, usize)> = g
        .arcs
        .iter()
        .map(|a| (component[a.source], component[a.target]))
        .filter(|(x, y)| x != y)
        .collect();
    dag.sort_unstable();
    dag.dedup();
    let mut cyclic = vec![false; c];
    for a in &g.arcs {
        if component[a.source] == component[a.target] {
            cyclic[component[a.source]] = true;
        }
    }
    Components {
        component,
        members,
        dag,
        cyclic,
    }
}

/// Whether a (possibly empty) directed walk leads from `u` to `v`.
pub fn reachable(g: &WeightedDigraph, u: usize, v: usize) -> Result<bool> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    Ok(bfs_path(g, &g.out_arcs(), u, |x| x == v, |_| true).is_some())
}

/// Shortest arc path from `start` to the first vertex satisfying `goal`,
/// only following arcs accepted by `allow`. An empty path if `start` is a goal.
pub(crate) fn bfs_path(
    g: &WeightedDigraph,
    out: &[Vec<usize>],
    start: usize,
    goal: impl Fn(usize) -> bool,
    allow: impl Fn(&Arc) -> bool,
) -> Option<Vec<usize>> {
    if goal(start) {
        return Some(Vec::new());
    }
    let mut via: Vec<Option<usize>> = vec![None; g.n];
    let mut seen = vec![false; g.n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &ai in &out[x] {
            let a = g.arcs[ai];
            if seen[a.target] || !allow(&a) {
                continue;
            }
            seen[a.target] = true;
            via[a.target] = Some(ai);
            if goal(a.target) {
                let mut path = vec![ai];
                let mut cur = a.source;
                while cur != start {
                    let p = via[cur].unwrap();
                    path.push(p);
                    cur = g.arcs[p].source;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(a.target);
        }
    }
    None
}

/// A cycle given as consecutive arc indices, with its mean weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanCycle {
    pub mean: Weight,
    pub arcs: Vec<usize>,
}

pub fn cycle_weight(g: &WeightedDigraph, arcs: &[usize]) -> Weight {
    arcs.iter().map(|&a| g.arcs[a].weight).sum()
}

/// Minimum mean over all directed cycles, or `None` when the graph is acyclic.
pub fn min_cycle_mean(g: &WeightedDigraph) -> Option<MeanCycle> {
    let comps = strong_components(g);
    component_cycle_means(g, &comps)
        .into_iter()
        .flatten()
        .map(|(lo, _)| lo)
        .min_by(|a, b| a.mean.cmp(&b.mean))
}

pub fn max_cycle_mean(g: &WeightedDigraph) -> Option<MeanCycle> {
    min_cycle_mean(&g.negated()).map(|c| MeanCycle {
        mean: -c.mean,
        arcs: c.arcs,
    })
}

/// Per component: `(min-mean cycle, max-mean cycle)` over cycles inside it,
/// `None` for components without arcs.
pub fn component_cycle_means(
    g: &WeightedDigraph,
    comps: &Components,
) -> Vec<Option<(MeanCycle, MeanCycle)>> {
    let neg = g.negated();
    (0..comps.len())
        .map(|c| {
            if !comps.cyclic[c] {
                return None;
            }
            let lo = karp_in_component(g, comps, c);
            let hi = karp_in_component(&neg, comps, c);
            Some((
                lo,
                MeanCycle {
                    mean: -hi.mean,
                    arcs: hi.arcs,
                },
            ))
        })
        .collect()
}

/// Karp's minimum mean cycle restricted to one strongly connected component.
fn karp_in_component(g: &WeightedDigraph, comps: &Components, c: usize) -> MeanCycle {
    let members = &comps.members[c];
    let m = members.len();
    let mut local = vec![usize::MAX; g.n];
    for (i, &v) in members.iter().enumerate() {
        local[v] = i;
    }
    let inner: Vec<usize> = (0..g.arcs.len())
        .filter(|&i| {
            comps.component[g.arcs[i].source] == c && comps.component[g.arcs[i].target] == c
        })
        .collect();

    // best[len][v]: minimum weight of a walk with exactly `len` arcs from the
    // first member to v.
    let mut best: Vec<Vec<Option<Weight>>> = vec![vec![None; m]; m + 1];
    best[0][0] = Some(Weight::zero());
    for len in 1..=m {
        for &ai in &inner {
            let a = g.arcs[ai];
            if let Some(w) = best[len - 1][local[a.source]] {
                let cand = w + a.weight;
                let slot = &mut best[len][local[a.target]];
                if slot.is_none_or(|cur| cand < cur) {
                    *slot = Some(cand);
                }
            }
        }
    }

    let mut argmin: Option<(Weight, usize)> = None;
    for v in 0..m {
        let Some(full) = best[m][v] else { continue };
        let worst = (0..m)
            .filter_map(|len| {
                best[len][v].map(|w| (full - w) / Weight::from_integer((m - len) as i64))
            })
            .max();
        if let Some(val) = worst {
            if argmin.is_none_or(|(cur, _)| val < cur) {
                argmin = Some((val, v));
            }
        }
    }
    let (mean, _) = argmin.expect("a component with an arc has a closed walk");

    let cycle = tight_cycle(g, members, &local, &inner, mean);
    debug_assert_eq!(cycle.mean, mean);
    cycle
}

/// Finds a cycle of mean exactly `mean` (the component minimum): with weights
/// shifted by `-mean` there is no negative cycle, and the arcs that are tight
/// for shortest-path distances contain every minimum-mean cycle.
fn tight_cycle(
    g: &WeightedDigraph,
    members: &[usize],
    local: &[usize],
    inner: &[usize],
    mean: Weight,
) -> MeanCycle {
    let m = members.len();
    let mut dist: Vec<Option<Weight>> = vec![None; m];
    dist[0] = Some(Weight::zero());
    for _ in 0..m {
        let mut changed = false;
        for &ai in inner {
            let a = g.arcs[ai];
            if let Some(ds) = dist[local[a.source]] {
                let cand = ds + a.weight - mean;
                let slot = &mut dist[local[a.target]];
                if slot.is_none_or(|dt| cand < dt) {
                    *slot = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut tight: Vec<Vec<usize>> = vec![Vec::new(); m];
    for &ai in inner {
        let a = g.arcs[ai];
        let (s, t) = (local[a.source], local[a.target]);
        if dist[s].unwrap() + a.weight - mean == dist[t].unwrap() {
            tight[s].push(ai);
        }
    }
    // Iterative DFS for a cycle in the tight subgraph.
    let mut state = vec![0u8; m];
    for root in 0..m {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        let mut path: Vec<usize> = Vec::new();
        state[root] = 1;
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if next < tight[v].len() {
                top.1 += 1;
                let ai = tight[v][next];
                let t = local[g.arcs[ai].target];
                match state[t] {
                    0 => {
                        state[t] = 1;
                        path.push(ai);
                        stack.push((t, 0));
                    }
                    1 => {
                        let start = path
                            .iter()
                            .position(|&p| local[g.arcs[p].source] == t)
                            .unwrap_or(path.len());
                        let mut arcs = path[start..].to_vec();
                        arcs.push(ai);
                        let mean = cycle_weight(g, &arcs) / Weight::from_integer(arcs.len() as i64);
                        return MeanCycle { mean, arcs };
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
                path.pop();
            }
        }
    }
    unreachable!("tight subgraph of a cyclic component has a cycle")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Potentials {
    /// Supremum of walk weights from the source, per vertex.
    Finite(Vec<Weight>),
    /// A reachable cycle of positive weight, as arc indices.
    Unbounded(Vec<usize>),
}

/// Longest-walk values from `source` by Bellman-Ford relaxation.
///
/// Every vertex must be reachable. A relaxation that still succeeds in
/// round `n` proves a positive cycle, which is returned as the witness.
pub fn longest_walk_potentials(g: &WeightedDigraph, source: usize) -> Result<Potentials> {
    g.check_vertex(source)?;
    let n = g.n;
    let mut dist: Vec<Option<Weight>> = vec![None; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    dist[source] = Some(Weight::zero());
    let mut last_relaxed = None;
    for _round in 0..n {
        last_relaxed = None;
        for (ai, a) in g.arcs.iter().enumerate() {
            if let Some(ds) = dist[a.source] {
                let cand = ds + a.weight;
                if dist[a.target].is_none_or(|dt| cand > dt) {
                    dist[a.target] = Some(cand);
                    pred[a.target] = Some(ai);
                    last_relaxed = Some(a.target);
                }
            }
        }
        if last_relaxed.is_none() {
            break;
        }
    }
    if let Some(unreached) = dist.iter().position(Option::is_none) {
        return Err(Error::input(format!(
            "vertex {unreached} is not reachable from {source}"
        )));
    }
    if let Some(mut v) = last_relaxed {
        // n steps back along predecessors lands on the positive cycle.
        for _ in 0..n {
            v = g.arcs[pred[v].unwrap()].source;
        }
        let mut cycle = Vec::new();
        let mut cur = v;
        loop {
            let ai = pred[cur].unwrap();
            cycle.push(ai);
            cur = g.arcs[ai].source;
            if cur == v {
                break;
            }
        }
        cycle.reverse();
        return Ok(Potentials::Unbounded(cycle));
    }
    Ok(Potentials::Finite(
        dist.into_iter().map(Option::unwrap).collect(),
    ))
}
