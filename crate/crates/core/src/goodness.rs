//! Deciding whether a hypergraph is M-good through the product digraph on
//! `V x S`, with replayable witnesses for bad cycles.

use std::collections::VecDeque;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::hypergraph::{HyperCycle, Hypergraph};
use crate::kernels::{bfs_path, bit, strong_components, Components, WeightedDigraph};
use crate::machine::{Machine, Semantics};
use crate::order::OrderSystem;

/// Where an auxiliary arc comes from: edge `edge` read from position `i` to
/// position `j`, moving the machine from `from_state` to `to_state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxArc {
    pub edge: usize,
    pub i: usize,
    pub j: usize,
    pub from_state: usize,
    pub to_state: usize,
}

/// Product digraph; vertex `(v, s)` has index `v * |S| + s`.
#[derive(Debug, Clone)]
pub struct AuxiliaryDigraph {
    pub num_states: usize,
    pub graph: WeightedDigraph,
    pub provenance: Vec<AuxArc>,
}

impl AuxiliaryDigraph {
    pub fn index(&self, v: usize, s: usize) -> usize {
        v * self.num_states + s
    }

    /// `(vertex, state)` of a product vertex.
    pub fn split(&self, x: usize) -> (usize, usize) {
        (x / self.num_states, x % self.num_states)
    }

    pub fn num_arcs(&self) -> usize {
        self.provenance.len()
    }
}

fn check_uniformity(h: &Hypergraph, m: &Machine) -> Result<()> {
    if h.k() != m.k() {
        return Err(Error::UniformityMismatch {
            hypergraph: h.k(),
            machine: m.k(),
        });
    }
    Ok(())
}

pub fn build_auxiliary(h: &Hypergraph, m: &Machine) -> Result<AuxiliaryDigraph> {
    check_uniformity(h, m)?;
    let ns = m.num_states();
    let mut graph = WeightedDigraph::new(h.num_vertices() * ns);
    let mut provenance = Vec::new();
    let transitions: Vec<_> = m.transitions().collect();
    for (e, edge) in h.edges().iter().enumerate() {
        for &(s, i, j, t) in &transitions {
            let (a, b) = (edge[i - 1], edge[j - 1]);
            graph.add_arc(a * ns + s, b * ns + t, Rational64::from_integer(0));
            provenance.push(AuxArc {
                edge: e,
                i,
                j,
                from_state: s,
                to_state: t,
            });
        }
    }
    Ok(AuxiliaryDigraph {
        num_states: ns,
        graph,
        provenance,
    })
}

/// A cycle together with an accepting run `s_0, ..., s_n` of the machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadCycleWitness {
    pub cycle: HyperCycle,
    pub states: Vec<usize>,
}

impl BadCycleWitness {
    pub fn bad_pair(&self) -> (usize, usize) {
        (self.states[0], *self.states.last().unwrap())
    }

    /// Re-checks the witness against the definition of a bad cycle.
    pub fn replay(&self, h: &Hypergraph, m: &Machine) -> Result<()> {
        self.cycle.validate(h)?;
        if self.states.len() != self.cycle.len() + 1 {
            return Err(Error::input(
                "run needs one more state than the cycle has steps",
            ));
        }
        for i in 1..=self.cycle.len() {
            let (a, b) = self.cycle.trace(h, i)?;
            if !m.step(self.states[i - 1], a, b)?.contains(&self.states[i]) {
                return Err(Error::input(format!(
                    "step {i} is not a transition of the machine"
                )));
            }
        }
        let (s0, sn) = self.bad_pair();
        if !m.is_bad(s0, sn) {
            return Err(Error::input("end states are not a bad pair"));
        }
        if m.semantics() == Semantics::Cycling && self.cycle.is_empty() {
            return Err(Error::input("cycling machines ignore cycles of length 0"));
        }
        Ok(())
    }

    fn from_arcs(aux: &AuxiliaryDigraph, start: usize, arcs: &[usize]) -> Self {
        let (v0, s0) = aux.split(start);
        let mut cycle = HyperCycle {
            vertices: vec![v0],
            edges: Vec::new(),
        };
        let mut states = vec![s0];
        for &a in arcs {
            let (v, s) = aux.split(aux.graph.arc(a).target);
            cycle.vertices.push(v);
            cycle.edges.push(aux.provenance[a].edge);
            states.push(s);
        }
        BadCycleWitness { cycle, states }
    }

    pub fn to_file(&self, h: &Hypergraph, m: &Machine) -> WitnessFile {
        WitnessFile {
            vertices: self
                .cycle
                .vertices
                .iter()
                .map(|&v| h.vertex_name(v).to_string())
                .collect(),
            edges: self.cycle.edges.clone(),
            states: self
                .states
                .iter()
                .map(|&s| m.state_name(s).to_string())
                .collect(),
        }
    }

    pub fn from_file(file: &WitnessFile, h: &Hypergraph, m: &Machine) -> Result<Self> {
        let vertices = file
            .vertices
            .iter()
            .map(|n| {
                h.vertex_index(n)
                    .ok_or_else(|| Error::UnknownVertex(n.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let states = file
            .states
            .iter()
            .map(|n| {
                m.state_index(n)
                    .ok_or_else(|| Error::UnknownState(n.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BadCycleWitness {
            cycle: HyperCycle {
                vertices,
                edges: file.edges.clone(),
            },
            states,
        })
    }
}

/// Named form of a witness: `vertices` are `v_0 ... v_n`, `edges` are
/// 0-based edge indices `e_1 ... e_n`, `states` are `s_0 ... s_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub vertices: Vec<String>,
    pub edges: Vec<usize>,
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Good,
    Bad(Box<BadCycleWitness>),
}

impl Verdict {
    pub fn is_good(&self) -> bool {
        matches!(self, Verdict::Good)
    }
}

/// Shortest closed walk of positive length through `u` using arcs accepted by `allow`.
fn shortest_closed_walk(
    g: &WeightedDigraph,
    out: &[Vec<usize>],
    u: usize,
    allow: impl Fn(usize) -> bool + Copy,
) -> Option<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    for &a in &out[u] {
        let arc = g.arc(a);
        if !allow(arc.target) {
            continue;
        }
        if let Some(rest) = bfs_path(
            g,
            out,
            arc.target,
            |x| x == u,
            |x| allow(x.source) && allow(x.target),
        ) {
            if best.as_ref().is_none_or(|b| rest.len() + 1 < b.len()) {
                let mut walk = vec![a];
                walk.extend(rest);
                best = Some(walk);
            }
        }
    }
    best
}

fn decide(h: &Hypergraph, m: &Machine) -> Result<(AuxiliaryDigraph, Components, Verdict)> {
    check_uniformity(h, m)?;
    let semantics = m.semantics();
    m.require(semantics)?;
    let aux = build_auxiliary(h, m)?;
    let comps = strong_components(&aux.graph);
    let out = aux.graph.out_arcs();
    let verdict = match semantics {
        Semantics::Cycling => match (0..comps.len()).find(|&c| comps.cyclic[c]) {
            None => Verdict::Good,
            Some(c) => {
                let inside = |x: usize| comps.component[x] == c;
                let (start, walk) = comps.members[c]
                    .iter()
                    .filter_map(|&u| {
                        shortest_closed_walk(&aux.graph, &out, u, inside).map(|w| (u, w))
                    })
                    .min_by_key(|(u, w)| (w.len(), *u))
                    .expect("a cyclic component has a closed walk");
                Verdict::Bad(Box::new(BadCycleWitness::from_arcs(&aux, start, &walk)))
            }
        },
        Semantics::General => {
            let reach = comps.reachability();
            let mut found = None;
            'outer: for v in 0..h.num_vertices() {
                for &(s, t) in m.bad() {
                    let (x, y) = (aux.index(v, s), aux.index(v, t));
                    if bit(&reach[comps.component[x]], comps.component[y]) {
                        let path =
                            bfs_path(&aux.graph, &out, x, |z| z == y, |_| true).expect("reachable");
                        found = Some(BadCycleWitness::from_arcs(&aux, x, &path));
                        break 'outer;
                    }
                }
            }
            found.map_or(Verdict::Good, |w| Verdict::Bad(Box::new(w)))
        }
    };
    Ok((aux, comps, verdict))
}

/// Decides goodness under the machine's own semantics (cycling when `B` is
/// the diagonal, general otherwise).
pub fn is_good(h: &Hypergraph, m: &Machine) -> Result<Verdict> {
    decide(h, m).map(|(_, _, v)| v)
}

/// Oracle: breadth-first search over runs `(vertex, state)` stepping through
/// edges directly, from every root vertex and start state, up to `max_len`
/// steps.
pub fn brute_force_is_good(
    h: &Hypergraph,
    m: &Machine,
    max_len: usize,
    budget: &mut Budget,
) -> Result<Verdict> {
    check_uniformity(h, m)?;
    let semantics = m.semantics();
    m.require(semantics)?;
    let ns = m.num_states();
    let nv = h.num_vertices();
    let inc = h.incidence();
    for root in 0..nv {
        for s0 in 0..ns {
            if semantics == Semantics::General && m.is_bad(s0, s0) {
                return Ok(Verdict::Bad(Box::new(BadCycleWitness {
                    cycle: HyperCycle::trivial(root),
                    states: vec![s0],
                })));
            }
            // parent[(v, s)] = (previous node, edge)
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; nv * ns];
            let mut depth = vec![usize::MAX; nv * ns];
            let start = root * ns + s0;
            depth[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                if depth[x] == max_len {
                    continue;
                }
                budget.tick()?;
                let (u, s) = (x / ns, x % ns);
                for &(e, a) in &inc[u] {
                    let edge = h.edge(e);
                    for b in 1..=h.k() {
                        let w = edge[b - 1];
                        for &t in m.targets(s, a, b) {
                            let y = w * ns + t;
                            if w == root && m.is_bad(s0, t) {
                                let mut vertices = vec![w];
                                let mut edges = vec![e];
                                let mut states = vec![t];
                                let mut cur = x;
                                loop {
                                    vertices.push(cur / ns);
                                    states.push(cur % ns);
                                    match parent[cur] {
                                        Some((p, pe)) => {
                                            edges.push(pe);
                                            cur = p;
                                        }
                                        None => break,
                                    }
                                }
                                vertices.reverse();
                                edges.reverse();
                                states.reverse();
                                return Ok(Verdict::Bad(Box::new(BadCycleWitness {
                                    cycle: HyperCycle { vertices, edges },
                                    states,
                                })));
                            }
                            if depth[y] == usize::MAX {
                                depth[y] = depth[x] + 1;
                                parent[y] = Some((x, e));
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::Good)
}

/// Default oracle length `2 |V| |S|`.
pub fn default_oracle_len(h: &Hypergraph, m: &Machine) -> usize {
    2 * h.num_vertices() * m.num_states()
}

/// Colors every vertex `v` by the order system that the strong components,
/// their reachability and their topological numbering induce on `{v} x S`.
pub fn induced_order_system_coloring(h: &Hypergraph, m: &Machine) -> Result<Vec<OrderSystem>> {
    let (aux, comps, verdict) = decide(h, m)?;
    if let Verdict::Bad(w) = verdict {
        return Err(Error::NotGood(w));
    }
    let reach = comps.reachability();
    (0..h.num_vertices())
        .map(|v| {
            let keys: Vec<usize> = (0..m.num_states())
                .map(|s| comps.component[aux.index(v, s)])
                .collect();
            OrderSystem::from_keys(&keys, |a, b| bit(&reach[a], b))
        })
        .collect()
}

/// The order system on `S x [k]` read off the product digraph along edge
/// `e`: `(s, i)` is placed where `(e_i, s)` sits.
pub fn edge_order_system(h: &Hypergraph, m: &Machine, e: usize) -> Result<OrderSystem> {
    if e >= h.num_edges() {
        return Err(Error::input(format!("edge {e} out of range")));
    }
    let (aux, comps, verdict) = decide(h, m)?;
    if let Verdict::Bad(w) = verdict {
        return Err(Error::NotGood(w));
    }
    let reach = comps.reachability();
    let ns = m.num_states();
    let keys: Vec<usize> = (0..ns * m.k())
        .map(|x| {
            let sp = crate::machine::StatePosition::from_index(x, ns);
            comps.component[aux.index(h.edge(e)[sp.position - 1], sp.state)]
        })
        .collect();
    OrderSystem::from_keys(&keys, |a, b| bit(&reach[a], b))
}
