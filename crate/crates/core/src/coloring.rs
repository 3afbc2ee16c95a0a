//! Proper colorings of hypergraphs: an edge is monochromatic when all of its
//! coordinates share a color. Colors are 0-based indices.

use crate::error::{Budget, Error, Result};
use crate::hypergraph::Hypergraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<usize>,
}

impl Coloring {
    pub fn num_colors(&self) -> usize {
        let mut seen: Vec<usize> = self.colors.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    pub fn is_proper(&self, h: &Hypergraph) -> bool {
        self.colors.len() == h.num_vertices() && monochromatic_edges(h, &self.colors).is_empty()
    }
}

/// Indices of edges whose coordinates all share one color.
pub fn monochromatic_edges(h: &Hypergraph, colors: &[usize]) -> Vec<usize> {
    h.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| e.iter().all(|&v| colors[v] == colors[e[0]]))
        .map(|(i, _)| i)
        .collect()
}

/// First-fit coloring in the given vertex order.
pub fn chromatic_upper_greedy(h: &Hypergraph, order: &[usize]) -> Coloring {
    let n = h.num_vertices();
    let inc = h.incidence();
    let mut colors: Vec<Option<usize>> = vec![None; n];
    // vertices missing from `order` go last
    for v in order.iter().copied().chain(0..n) {
        if colors[v].is_some() {
            continue;
        }
        let mut c = 0;
        'next: loop {
            for &(e, _) in &inc[v] {
                let closes = h.edge(e).iter().all(|&u| u == v || colors[u] == Some(c));
                if closes {
                    c += 1;
                    continue 'next;
                }
            }
            break;
        }
        colors[v] = Some(c);
    }
    Coloring {
        colors: colors.into_iter().map(|c| c.unwrap_or(0)).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChromaticResult {
    pub chromatic_number: usize,
    pub coloring: Coloring,
}

/// Exact chromatic number by iterative deepening on the color count.
///
/// Each round is a backtracking search that branches on the vertex with the
/// fewest remaining colors, prunes with forward checking on edges that have a
/// single uncolored coordinate, and only ever opens the lowest unused color.
pub fn chromatic_number_exact(h: &Hypergraph, budget: &mut Budget) -> Result<ChromaticResult> {
    let n = h.num_vertices();
    if n == 0 {
        return Ok(ChromaticResult {
            chromatic_number: 0,
            coloring: Coloring { colors: Vec::new() },
        });
    }
    if h.num_edges() == 0 {
        return Ok(ChromaticResult {
            chromatic_number: 1,
            coloring: Coloring { colors: vec![0; n] },
        });
    }
    if h.k() < 2 {
        return Err(Error::Precondition(
            "a 1-uniform edge can never be properly colored".into(),
        ));
    }

    let inc = h.incidence();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| std::cmp::Reverse(inc[v].len()));
    let mut best = chromatic_upper_greedy(h, &by_degree);
    let upper = best.num_colors();

    let mut solver = Solver::new(h, &inc);
    for colors in 2..upper {
        if colors > 64 {
            return Err(Error::Precondition("more than 64 colors needed".into()));
        }
        match solver.solve(colors, budget) {
            Ok(Some(c)) => {
                best = Coloring { colors: c };
                break;
            }
            Ok(None) => {}
            Err(Error::BudgetExhausted { budget, .. }) => {
                return Err(Error::BudgetExhausted {
                    budget,
                    bounds: Some((colors, upper)),
                });
            }
            Err(e) => return Err(e),
        }
    }
    debug_assert!(best.is_proper(h));
    Ok(ChromaticResult {
        chromatic_number: best.num_colors(),
        coloring: best,
    })
}

struct Solver<'a> {
    h: &'a Hypergraph,
    inc: &'a [Vec<(usize, usize)>],
    degree: Vec<usize>,
    color: Vec<Option<usize>>,
    domain: Vec<u64>,
    /// `(vertex, removed color bit)` for undo.
    trail: Vec<(usize, u64)>,
}

impl<'a> Solver<'a> {
    fn new(h: &'a Hypergraph, inc: &'a [Vec<(usize, usize)>]) -> Self {
        let n = h.num_vertices();
        Solver {
            h,
            inc,
            degree: inc.iter().map(Vec::len).collect(),
            color: vec![None; n],
            domain: vec![0; n],
            trail: Vec::new(),
        }
    }

    fn solve(&mut self, colors: usize, budget: &mut Budget) -> Result<Option<Vec<usize>>> {
        let full = if colors == 64 {
            u64::MAX
        } else {
            (1u64 << colors) - 1
        };
        self.color.iter_mut().for_each(|c| *c = None);
        self.domain.iter_mut().for_each(|d| *d = full);
        self.trail.clear();
        if self.search(colors, 0, budget)? {
            Ok(Some(self.color.iter().map(|c| c.unwrap()).collect()))
        } else {
            Ok(None)
        }
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<(u32, std::cmp::Reverse<usize>, usize)> = None;
        for v in 0..self.color.len() {
            if self.color[v].is_some() {
                continue;
            }
            let key = (
                self.domain[v].count_ones(),
                std::cmp::Reverse(self.degree[v]),
                v,
            );
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        best.map(|b| b.2)
    }

    /// Colors `v` and forward-checks its edges; false on a wipe-out.
    fn assign(&mut self, v: usize, c: usize) -> bool {
        self.color[v] = Some(c);
        let bit = 1u64 << c;
        let inc = self.inc;
        for &(e, _) in &inc[v] {
            let mut open = None;
            let mut open_count = 0;
            let mut uniform = true;
            for &u in self.h.edge(e) {
                match self.color[u] {
                    None => {
                        open_count += 1;
                        open = Some(u);
                    }
                    Some(cu) if cu != c => {
                        uniform = false;
                        break;
                    }
                    _ => {}
                }
            }
            if !uniform {
                continue;
            }
            match open_count {
                0 => return false,
                1 => {
                    let u = open.unwrap();
                    if self.domain[u] & bit != 0 {
                        self.domain[u] &= !bit;
                        self.trail.push((u, bit));
                        if self.domain[u] == 0 {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }

    fn undo(&mut self, v: usize, mark: usize) {
        while self.trail.len() > mark {
            let (u, bit) = self.trail.pop().unwrap();
            self.domain[u] |= bit;
        }
        self.color[v] = None;
    }

    fn search(&mut self, colors: usize, used: usize, budget: &mut Budget) -> Result<bool> {
        let Some(v) = self.pick() else {
            return Ok(true);
        };
        budget.tick()?;
        let open = used.min(colors - 1) + 1;
        let allowed = self.domain[v] & ((1u64 << open) - 1);
        let mut bits = allowed;
        while bits != 0 {
            let c = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let mark = self.trail.len();
            if self.assign(v, c) && self.search(colors, used.max(c + 1), budget)? {
                return Ok(true);
            }
            self.undo(v, mark);
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::path_digraph;

    fn complete(n: usize) -> Hypergraph {
        let arcs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Hypergraph::digraph_on(n, arcs).unwrap()
    }

    #[test]
    fn small_graphs() {
        let mut b = Budget::default();
        assert_eq!(
            chromatic_number_exact(&path_digraph(3), &mut b)
                .unwrap()
                .chromatic_number,
            2
        );
        assert_eq!(
            chromatic_number_exact(&complete(4), &mut b)
                .unwrap()
                .chromatic_number,
            4
        );
        let c5 = Hypergraph::digraph_on(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        let r = chromatic_number_exact(&c5, &mut b).unwrap();
        assert_eq!(r.chromatic_number, 3);
        assert!(r.coloring.is_proper(&c5));
    }

    #[test]
    fn greedy_bounds() {
        let empty = Hypergraph::digraph_on(4, []).unwrap();
        assert_eq!(
            chromatic_upper_greedy(&empty, &[3, 2, 1, 0]).num_colors(),
            1
        );
        let k4 = complete(4);
        assert_eq!(chromatic_upper_greedy(&k4, &[2, 0, 3, 1]).num_colors(), 4);
    }

    #[test]
    fn hypergraph_edges_need_all_coordinates_equal() {
        // Fano-free: a single 3-edge is 2-colorable, the complete 3-graph on 5 vertices needs 3.
        let h = Hypergraph::new(
            3,
            (0..3).map(|i| i.to_string()).collect(),
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        let mut b = Budget::default();
        assert_eq!(
            chromatic_number_exact(&h, &mut b).unwrap().chromatic_number,
            2
        );
        let mut edges = Vec::new();
        for a in 0..5 {
            for c in a + 1..5 {
                for d in c + 1..5 {
                    edges.push(vec![a, c, d]);
                }
            }
        }
        let k5_3 = Hypergraph::new(3, (0..5).map(|i| i.to_string()).collect(), edges).unwrap();
        let r = chromatic_number_exact(&k5_3, &mut b).unwrap();
        assert_eq!(r.chromatic_number, 3);
        assert!(r.coloring.is_proper(&k5_3));
    }

    #[test]
    fn budget_exhaustion_reports_bounds() {
        let mut b = Budget::new(1);
        let c7 = Hypergraph::digraph_on(7, (0..7).map(|i| (i, (i + 1) % 7))).unwrap();
        match chromatic_number_exact(&c7, &mut b) {
            Err(Error::BudgetExhausted {
                bounds: Some((lo, hi)),
                ..
            }) => assert!(lo <= hi),
            other => panic!("unexpected {other:?}"),
        }
    }
}
