//! Directed k-uniform hypergraphs and their cycles.
//!
//! A cycle is a closed alternating sequence `v0, e1, v1, ..., en, vn = v0`
//! where each step's endpoints both occur among the coordinates of its edge.
//! Vertices and edges may repeat, and a step may stay on the same vertex.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    k: usize,
    vertices: Vec<String>,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(k: usize, vertices: Vec<String>, edges: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("uniformity must be positive"));
        }
        let mut seen = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if seen.insert(v.as_str(), i).is_some() {
                return Err(Error::input(format!("duplicate vertex `{v}`")));
            }
        }
        for (idx, e) in edges.iter().enumerate() {
            if e.len() != k {
                return Err(Error::input(format!(
                    "edge {idx} has {} coordinates, expected {k}",
                    e.len()
                )));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::input(format!(
                    "edge {idx} references vertex index {v}"
                )));
            }
            for a in 0..k {
                for b in a + 1..k {
                    if e[a] == e[b] {
                        return Err(Error::input(format!(
                            "edge {idx} repeats vertex `{}`",
                            vertices[e[a]]
                        )));
                    }
                }
            }
        }
        Ok(Hypergraph { k, vertices, edges })
    }

    /// A digraph on vertices named by `names` with the given arcs.
    pub fn digraph(
        names: Vec<String>,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        Hypergraph::new(
            2,
            names,
            arcs.into_iter().map(|(a, b)| vec![a, b]).collect(),
        )
    }

    /// A digraph on `0..n` named by decimal index.
    pub fn digraph_on(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Hypergraph::digraph((0..n).map(|i| i.to_string()).collect(), arcs)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        &self.edges[e]
    }

    /// 1-based position of `v` in edge `e`.
    pub fn position_in(&self, e: usize, v: usize) -> Option<usize> {
        self.edges[e].iter().position(|&x| x == v).map(|p| p + 1)
    }

    /// For each vertex, the `(edge, 1-based position)` pairs it occurs at.
    pub fn incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (e, edge) in self.edges.iter().enumerate() {
            for (p, &v) in edge.iter().enumerate() {
                inc[v].push((e, p + 1));
            }
        }
        inc
    }

    pub fn to_file(&self) -> HypergraphFile {
        HypergraphFile {
            k: self.k,
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| e.iter().map(|&v| self.vertices[v].clone()).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &HypergraphFile) -> Result<Self> {
        let index: HashMap<&str, usize> = file
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut edges = Vec::with_capacity(file.edges.len());
        for e in &file.edges {
            let mut edge = Vec::with_capacity(e.len());
            for name in e {
                edge.push(
                    *index
                        .get(name.as_str())
                        .ok_or_else(|| Error::UnknownVertex(name.clone()))?,
                );
            }
            edges.push(edge);
        }
        Hypergraph::new(file.k, file.vertices.clone(), edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("hypergraph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: HypergraphFile = serde_json::from_str(text)?;
        Hypergraph::from_file(&file)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypergraphFile {
    pub k: usize,
    pub vertices: Vec<String>,
    pub edges: Vec<Vec<String>>,
}

/// The directed path `P_n` on vertices `1..=n+1`.
pub fn path_digraph(n: usize) -> Hypergraph {
    Hypergraph::digraph(
        (1..=n + 1).map(|i| i.to_string()).collect(),
        (0..n).map(|i| (i, i + 1)),
    )
    .expect("path is well formed")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HyperCycle {
    /// `v0, ..., vn` with `vn == v0`.
    pub vertices: Vec<usize>,
    /// `e1, ..., en`.
    pub edges: Vec<usize>,
}

impl HyperCycle {
    /// The length-0 cycle at `v`.
    pub fn trivial(v: usize) -> Self {
        HyperCycle {
            vertices: vec![v],
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn validate(&self, h: &Hypergraph) -> Result<()> {
        if self.vertices.len() != self.edges.len() + 1 {
            return Err(Error::input("cycle needs one more vertex than edges"));
        }
        if self.vertices.first() != self.vertices.last() {
            return Err(Error::input("cycle does not close"));
        }
        for (i, &e) in self.edges.iter().enumerate() {
            if e >= h.num_edges() {
                return Err(Error::input(format!(
                    "cycle step {} uses unknown edge {e}",
                    i + 1
                )));
            }
            for v in [self.vertices[i], self.vertices[i + 1]] {
                if h.position_in(e, v).is_none() {
                    return Err(Error::input(format!(
                        "cycle step {} leaves edge {e}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// `tr(c, i) = (a, b)` with `(e_i)_a = v_{i-1}` and `(e_i)_b = v_i`, for `1 <= i <= |c|`.
    pub fn trace(&self, h: &Hypergraph, i: usize) -> Result<(usize, usize)> {
        if i == 0 || i > self.len() {
            return Err(Error::input(format!(
                "trace index {i} outside 1..={}",
                self.len()
            )));
        }
        let e = self.edges[i - 1];
        let a = h
            .position_in(e, self.vertices[i - 1])
            .ok_or_else(|| Error::input("vertex not in edge"))?;
        let b = h
            .position_in(e, self.vertices[i])
            .ok_or_else(|| Error::input("vertex not in edge"))?;
        Ok((a, b))
    }

    /// The cycle started at step `r` instead of step 0.
    pub fn rotate(&self, r: usize) -> HyperCycle {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let r = r % n;
        let mut vertices: Vec<usize> = (0..n).map(|t| self.vertices[(r + t) % n]).collect();
        vertices.push(vertices[0]);
        let edges = (0..n).map(|t| self.edges[(r + t) % n]).collect();
        HyperCycle { vertices, edges }
    }

    /// Interleaved `v0, e1, v1, ...` encoding used for canonical comparison.
    fn encoding(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.len() + 1);
        out.push(self.vertices[0]);
        for (e, v) in self.edges.iter().zip(&self.vertices[1..]) {
            out.push(*e);
            out.push(*v);
        }
        out
    }

    /// Lexicographically least rotation of the encoding.
    pub fn canonical_rotation(&self) -> HyperCycle {
        (0..self.len().max(1))
            .map(|r| self.rotate(r))
            .min_by_key(HyperCycle::encoding)
            .unwrap()
    }

    pub fn is_canonical(&self) -> bool {
        let enc = self.encoding();
        (1..self.len()).all(|r| self.rotate(r).encoding() >= enc)
    }
}

/// Which rooted cycles [`enumerate_cycles`] yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleFilter {
    /// Every rooted cycle, i.e. rotations count as different cycles.
    AllRooted,
    /// One representative (the least rotation) per rotation class.
    CanonicalRotations,
}

/// Lazily enumerates cycles of length `<= max_len` in depth-first order,
/// grouped by starting vertex.
pub fn enumerate_cycles(h: &Hypergraph, max_len: usize, filter: CycleFilter) -> CycleIter<'_> {
    CycleIter::new(h, max_len, filter)
}

pub struct CycleIter<'a> {
    h: &'a Hypergraph,
    max_len: usize,
    filter: CycleFilter,
    /// Every legal step `(edge, next vertex)` out of each vertex.
    steps: Vec<Vec<(usize, usize)>>,
    root: usize,
    vertices: Vec<usize>,
    edges: Vec<usize>,
    /// Next step index to try at each depth.
    cursor: Vec<usize>,
    emitted_root: bool,
}

impl<'a> CycleIter<'a> {
    fn new(h: &'a Hypergraph, max_len: usize, filter: CycleFilter) -> Self {
        let mut steps = vec![Vec::new(); h.num_vertices()];
        for (v, inc) in h.incidence().into_iter().enumerate() {
            for (e, _) in inc {
                for &w in h.edge(e) {
                    steps[v].push((e, w));
                }
            }
        }
        let mut it = CycleIter {
            h,
            max_len,
            filter,
            steps,
            root: 0,
            vertices: Vec::new(),
            edges: Vec::new(),
            cursor: Vec::new(),
            emitted_root: false,
        };
        it.reset_root();
        it
    }

    fn reset_root(&mut self) {
        self.vertices = vec![self.root];
        self.edges.clear();
        self.cursor = vec![0];
        self.emitted_root = false;
    }

    fn current(&self) -> HyperCycle {
        HyperCycle {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
        }
    }

    fn accept(&self, c: &HyperCycle) -> bool {
        match self.filter {
            CycleFilter::AllRooted => true,
            CycleFilter::CanonicalRotations => c.is_canonical(),
        }
    }
}

impl Iterator for CycleIter<'_> {
    type Item = HyperCycle;

    fn next(&mut self) -> Option<HyperCycle> {
        loop {
            if self.root >= self.h.num_vertices() {
                return None;
            }
            if !self.emitted_root {
                self.emitted_root = true;
                return Some(HyperCycle::trivial(self.root));
            }
            let depth = self.edges.len();
            let v = *self.vertices.last().unwrap();
            let cur = self.cursor[depth];
            if depth < self.max_len && cur < self.steps[v].len() {
                self.cursor[depth] += 1;
                let (e, w) = self.steps[v][cur];
                self.edges.push(e);
                self.vertices.push(w);
                self.cursor.push(0);
                if w == self.root {
                    let c = self.current();
                    if self.accept(&c) {
                        return Some(c);
                    }
                }
            } else if depth == 0 {
                self.root += 1;
                if self.root < self.h.num_vertices() {
                    self.reset_root();
                }
            } else {
                self.edges.pop();
                self.vertices.pop();
                self.cursor.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn trace_of_digraph_cycles() {
        let h = Hypergraph::digraph_on(2, [(0, 1)]).unwrap();
        let c = HyperCycle {
            vertices: vec![0, 1, 0],
            edges: vec![0, 0],
        };
        c.validate(&h).unwrap();
        assert_eq!(c.trace(&h, 1).unwrap(), (1, 2));
        assert_eq!(c.trace(&h, 2).unwrap(), (2, 1));
        let stay = HyperCycle {
            vertices: vec![0, 0],
            edges: vec![0],
        };
        assert_eq!(stay.trace(&h, 1).unwrap(), (1, 1));
        assert!(c.trace(&h, 0).is_err());
        assert!(c.trace(&h, 3).is_err());
    }

    #[test]
    fn trace_in_three_uniform_edge() {
        let h = Hypergraph::new(
            3,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let c = HyperCycle {
            vertices: vec![0, 2, 0],
            edges: vec![0, 0],
        };
        assert_eq!(c.trace(&h, 1).unwrap(), (1, 3));
    }

    #[test]
    fn rejects_repeated_coordinates() {
        assert!(Hypergraph::digraph_on(2, [(1, 1)]).is_err());
        assert!(Hypergraph::new(2, vec!["a".into()], vec![vec![0, 3]]).is_err());
    }

    #[test]
    fn paths() {
        let p0 = path_digraph(0);
        assert_eq!((p0.num_vertices(), p0.num_edges()), (1, 0));
        let p1 = path_digraph(1);
        assert_eq!(p1.edges(), &[vec![0, 1]]);
        assert_eq!(p1.vertices(), &["1".to_string(), "2".to_string()]);
        let p3 = path_digraph(3);
        assert_eq!((p3.num_vertices(), p3.num_edges()), (4, 3));
    }

    #[test]
    fn single_edge_cycles() {
        let h = Hypergraph::digraph_on(2, [(0, 1)]).unwrap();
        let all: Vec<HyperCycle> = enumerate_cycles(&h, 2, CycleFilter::AllRooted).collect();
        let expect = [
            HyperCycle::trivial(0),
            HyperCycle {
                vertices: vec![0, 0],
                edges: vec![0],
            },
            HyperCycle {
                vertices: vec![0, 1, 0],
                edges: vec![0, 0],
            },
            HyperCycle {
                vertices: vec![1, 1],
                edges: vec![0],
            },
            HyperCycle {
                vertices: vec![1, 0, 1],
                edges: vec![0, 0],
            },
        ];
        for c in &expect {
            assert!(all.contains(c), "missing {c:?}");
        }
        // rooted cycles of length <= 2: 2 trivial, 2 stays, 2 there-and-back, 2 double stays
        assert_eq!(all.len(), 8);
        let canon: Vec<HyperCycle> =
            enumerate_cycles(&h, 2, CycleFilter::CanonicalRotations).collect();
        assert!(canon.contains(&HyperCycle {
            vertices: vec![0, 1, 0],
            edges: vec![0, 0]
        }));
        assert!(!canon.contains(&HyperCycle {
            vertices: vec![1, 0, 1],
            edges: vec![0, 0]
        }));
    }

    #[test]
    fn edgeless_graph_has_only_trivial_cycles() {
        let h = Hypergraph::digraph_on(3, []).unwrap();
        let all: Vec<HyperCycle> = enumerate_cycles(&h, 5, CycleFilter::AllRooted).collect();
        assert_eq!(all, (0..3).map(HyperCycle::trivial).collect::<Vec<_>>());
    }

    /// Closed walks counted by powers of the step-multiplicity matrix.
    fn closed_walk_count(h: &Hypergraph, max_len: usize) -> u64 {
        let n = h.num_vertices();
        let mut a = vec![vec![0u64; n]; n];
        for e in h.edges() {
            for &u in e {
                for &v in e {
                    a[u][v] += 1;
                }
            }
        }
        let mut power: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        let mut total = 0;
        for len in 0..=max_len {
            if len > 0 {
                let mut next = vec![vec![0u64; n]; n];
                for i in 0..n {
                    for l in 0..n {
                        if power[i][l] == 0 {
                            continue;
                        }
                        for j in 0..n {
                            next[i][j] += power[i][l] * a[l][j];
                        }
                    }
                }
                power = next;
            }
            total += (0..n).map(|i| power[i][i]).sum::<u64>();
        }
        total
    }

    #[test]
    fn transitive_triangle_count_matches_matrix_oracle() {
        let h = Hypergraph::digraph_on(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        for max_len in 0..=5 {
            let all: Vec<HyperCycle> =
                enumerate_cycles(&h, max_len, CycleFilter::AllRooted).collect();
            assert_eq!(
                all.len() as u64,
                closed_walk_count(&h, max_len),
                "max_len {max_len}"
            );
            let distinct: HashSet<&HyperCycle> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            for c in &all {
                c.validate(&h).unwrap();
            }
        }
    }

    #[test]
    fn canonical_classes_partition_rooted_cycles() {
        let h = Hypergraph::new(
            3,
            (0..4).map(|i| i.to_string()).collect(),
            vec![vec![0, 1, 2], vec![2, 3, 0]],
        )
        .unwrap();
        let all: Vec<HyperCycle> = enumerate_cycles(&h, 3, CycleFilter::AllRooted).collect();
        let canon: HashSet<HyperCycle> =
            enumerate_cycles(&h, 3, CycleFilter::CanonicalRotations).collect();
        let classes: HashSet<HyperCycle> = all.iter().map(HyperCycle::canonical_rotation).collect();
        assert_eq!(canon, classes);
    }

    #[test]
    fn file_roundtrip() {
        let h = Hypergraph::new(
            3,
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![2, 0, 1]],
        )
        .unwrap();
        assert_eq!(Hypergraph::from_json(&h.to_json()).unwrap(), h);
        assert!(Hypergraph::from_json(r#"{"k":2,"vertices":["a"],"edges":[["a","q"]]}"#).is_err());
    }
}
