//! Order systems: an equivalence relation, a partial order on its classes and
//! a linear extension of that partial order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical form: classes are numbered by their least member, `below` is the
/// strict part of the partial order on classes, `linear` lists classes from
/// bottom to top.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderSystem {
    n: usize,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
    below: Vec<Vec<bool>>,
    linear: Vec<usize>,
}

impl OrderSystem {
    /// Validates and canonicalizes. `partial` holds strict pairs of indices
    /// into `classes`; `linear` is a permutation of those indices.
    pub fn new(
        n: usize,
        classes: Vec<Vec<usize>>,
        partial: &[(usize, usize)],
        linear: &[usize],
    ) -> Result<Self> {
        let c = classes.len();
        let mut owner = vec![usize::MAX; n];
        for (ci, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::input("empty class"));
            }
            for &x in class {
                if x >= n {
                    return Err(Error::input(format!(
                        "element {x} outside carrier of size {n}"
                    )));
                }
                if owner[x] != usize::MAX {
                    return Err(Error::input(format!("element {x} in two classes")));
                }
                owner[x] = ci;
            }
        }
        if owner.contains(&usize::MAX) {
            return Err(Error::input("classes do not cover the carrier"));
        }
        let mut below = vec![vec![false; c]; c];
        for &(a, b) in partial {
            if a >= c || b >= c {
                return Err(Error::input("partial order references unknown class"));
            }
            if a == b {
                return Err(Error::input("partial order is not irreflexive"));
            }
            below[a][b] = true;
        }
        for a in 0..c {
            for b in 0..c {
                if below[a][b] && below[b][a] {
                    return Err(Error::input("partial order is not antisymmetric"));
                }
                if !below[a][b] {
                    continue;
                }
                for d in 0..c {
                    if below[b][d] && !below[a][d] {
                        return Err(Error::input("partial order is not transitive"));
                    }
                }
            }
        }
        let mut sorted = linear.to_vec();
        sorted.sort_unstable();
        if sorted != (0..c).collect::<Vec<_>>() {
            return Err(Error::input(
                "linear order is not a permutation of the classes",
            ));
        }
        let mut rank = vec![0; c];
        for (r, &ci) in linear.iter().enumerate() {
            rank[ci] = r;
        }
        for a in 0..c {
            for b in 0..c {
                if below[a][b] && rank[a] > rank[b] {
                    return Err(Error::input(
                        "linear order does not extend the partial order",
                    ));
                }
            }
        }
        Ok(Self::canonical(n, &owner, |a, b| below[a][b], |a| rank[a]))
    }

    /// Builds from per-element class keys; the linear order is ascending key.
    /// `less(a, b)` decides the strict partial order between keys.
    pub fn from_keys(keys: &[usize], less: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut distinct: Vec<usize> = keys.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let pos = |key: usize| distinct.binary_search(&key).unwrap();
        let classes: Vec<Vec<usize>> = {
            let mut cl = vec![Vec::new(); distinct.len()];
            for (x, &key) in keys.iter().enumerate() {
                cl[pos(key)].push(x);
            }
            cl
        };
        let mut partial = Vec::new();
        for (a, &ka) in distinct.iter().enumerate() {
            for (b, &kb) in distinct.iter().enumerate() {
                if a != b && less(ka, kb) {
                    partial.push((a, b));
                }
            }
        }
        let linear: Vec<usize> = (0..distinct.len()).collect();
        OrderSystem::new(keys.len(), classes, &partial, &linear)
    }

    fn canonical(
        n: usize,
        owner: &[usize],
        below: impl Fn(usize, usize) -> bool,
        rank: impl Fn(usize) -> usize,
    ) -> Self {
        // renumber classes by first appearance along the carrier
        let mut renum: Vec<Option<usize>> = vec![None; owner.iter().max().map_or(0, |m| m + 1)];
        let mut old_of = Vec::new();
        let mut class_of = Vec::with_capacity(n);
        for &o in owner {
            let id = *renum[o].get_or_insert_with(|| {
                old_of.push(o);
                old_of.len() - 1
            });
            class_of.push(id);
        }
        let c = old_of.len();
        let mut classes = vec![Vec::new(); c];
        for (x, &ci) in class_of.iter().enumerate() {
            classes[ci].push(x);
        }
        let below: Vec<Vec<bool>> = (0..c)
            .map(|a| (0..c).map(|b| below(old_of[a], old_of[b])).collect())
            .collect();
        let mut linear: Vec<usize> = (0..c).collect();
        linear.sort_by_key(|&ci| rank(old_of[ci]));
        OrderSystem {
            n,
            class_of,
            classes,
            below,
            linear,
        }
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn linear(&self) -> &[usize] {
        &self.linear
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// Strict pairs `(a, b)` of class indices with `a` below `b`.
    pub fn partial_pairs(&self) -> Vec<(usize, usize)> {
        let c = self.classes.len();
        (0..c)
            .flat_map(|a| (0..c).map(move |b| (a, b)))
            .filter(|&(a, b)| self.below[a][b])
            .collect()
    }

    pub fn class_below(&self, a: usize, b: usize) -> bool {
        self.below[a][b]
    }

    pub fn equivalent(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    /// Reflexive: `class(x) ⪯ class(y)`.
    pub fn precedes(&self, x: usize, y: usize) -> bool {
        let (a, b) = (self.class_of[x], self.class_of[y]);
        a == b || self.below[a][b]
    }

    /// Position of `x`'s class in the linear order.
    pub fn level(&self, x: usize) -> usize {
        let ci = self.class_of[x];
        self.linear.iter().position(|&c| c == ci).unwrap()
    }

    /// The order system induced on `elements`, renumbered `0..elements.len()`.
    pub fn restrict(&self, elements: &[usize]) -> OrderSystem {
        let owner: Vec<usize> = elements.iter().map(|&x| self.class_of[x]).collect();
        let rank: Vec<usize> = {
            let mut r = vec![0; self.classes.len()];
            for (i, &ci) in self.linear.iter().enumerate() {
                r[ci] = i;
            }
            r
        };
        OrderSystem::canonical(elements.len(), &owner, |a, b| self.below[a][b], |a| rank[a])
    }

    pub fn to_file<E: Clone>(&self, name: impl Fn(usize) -> E) -> OrderSystemFile<E> {
        OrderSystemFile {
            classes: self
                .classes
                .iter()
                .map(|cl| cl.iter().map(|&x| name(x)).collect())
                .collect(),
            partial: self
                .partial_pairs()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
            linear: self.linear.clone(),
        }
    }

    pub fn from_file<E: PartialEq>(file: &OrderSystemFile<E>, carrier: &[E]) -> Result<Self> {
        let mut classes = Vec::with_capacity(file.classes.len());
        for cl in &file.classes {
            let mut members = Vec::with_capacity(cl.len());
            for e in cl {
                members.push(
                    carrier
                        .iter()
                        .position(|c| c == e)
                        .ok_or_else(|| Error::input("class names an unknown element"))?,
                );
            }
            classes.push(members);
        }
        let partial: Vec<(usize, usize)> = file.partial.iter().map(|&[a, b]| (a, b)).collect();
        OrderSystem::new(carrier.len(), classes, &partial, &file.linear)
    }
}

/// On-disk form: `classes` as arrays of element names, `partial` as strict
/// class-index pairs, `linear` as class indices from bottom to top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSystemFile<E> {
    pub classes: Vec<Vec<E>>,
    pub partial: Vec<[usize; 2]>,
    pub linear: Vec<usize>,
}

/// A strict relation on positions `0..c` stored as bit rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Relation {
    rows: Vec<u64>,
}

impl Relation {
    pub(crate) fn empty(c: usize) -> Self {
        assert!(c <= 64, "at most 64 positions");
        Relation { rows: vec![0; c] }
    }

    pub(crate) fn has(&self, a: usize, b: usize) -> bool {
        self.rows[a] >> b & 1 == 1
    }

    /// Adds `(a, b)` and everything transitivity then forces; fails if a
    /// forbidden pair would be added.
    fn add_closed(&self, a: usize, b: usize, forbidden: &[u64]) -> Option<Relation> {
        let c = self.rows.len();
        let mut next = self.clone();
        let up = (1u64 << b) | self.rows[b];
        for x in 0..c {
            if x == a || self.has(x, a) {
                if up & forbidden[x] != 0 {
                    return None;
                }
                next.rows[x] |= up;
            }
        }
        Some(next)
    }
}

/// Enumerates every transitive relation `T` on positions `0..c` with
/// `forced ⊆ T ⊆ {(p, q) | p < q}` and `T ∩ forbidden = ∅`.
///
/// Pairs are decided in lexicographic order, excluding before including, so
/// the first relation visited is the transitive closure of `forced`.
/// `visit` returns `false` to stop; the function returns `false` if stopped.
pub(crate) fn enumerate_suborders(
    c: usize,
    forced: &[(usize, usize)],
    forbidden: &[(usize, usize)],
    visit: &mut dyn FnMut(&Relation) -> Result<bool>,
) -> Result<bool> {
    let mut forb = vec![0u64; c];
    for &(a, b) in forbidden {
        forb[a] |= 1 << b;
    }
    let mut rel = Relation::empty(c);
    for &(a, b) in forced {
        if a >= b {
            return Ok(true);
        }
        if rel.has(a, b) {
            continue;
        }
        match rel.add_closed(a, b, &forb) {
            Some(r) => rel = r,
            None => return Ok(true),
        }
    }
    let pairs: Vec<(usize, usize)> = (0..c)
        .flat_map(|p| (p + 1..c).map(move |q| (p, q)))
        .collect();
    decide(&pairs, 0, rel, &mut forb, visit)
}

fn decide(
    pairs: &[(usize, usize)],
    mut idx: usize,
    rel: Relation,
    forb: &mut [u64],
    visit: &mut dyn FnMut(&Relation) -> Result<bool>,
) -> Result<bool> {
    while idx < pairs.len() {
        let (a, b) = pairs[idx];
        if !rel.has(a, b) && forb[a] >> b & 1 == 0 {
            break;
        }
        idx += 1;
    }
    if idx == pairs.len() {
        return visit(&rel);
    }
    let (a, b) = pairs[idx];
    forb[a] |= 1 << b;
    let go_on = decide(pairs, idx + 1, rel.clone(), forb, visit)?;
    forb[a] &= !(1 << b);
    if !go_on {
        return Ok(false);
    }
    match rel.add_closed(a, b, forb) {
        Some(next) => decide(pairs, idx + 1, next, forb, visit),
        None => Ok(true),
    }
}

/// Set partitions of `0..n` as restricted growth strings, in lexicographic order.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let limit = if cur.is_empty() { 0 } else { max + 1 };
        for b in 0..=limit {
            cur.push(b);
            rec(n, cur, max.max(b), out);
            cur.pop();
        }
    }
    rec(n, &mut cur, 0, &mut out);
    out
}

/// Permutations of `0..c` in lexicographic order.
pub(crate) fn permutations(c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..c).collect();
    loop {
        out.push(perm.clone());
        // next lexicographic permutation
        let Some(i) = (1..c).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..c).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

/// Visits every order system on `0..n` in canonical order: set partitions by
/// restricted growth string, then linear orders of the classes
/// lexicographically, then partial orders as in [`enumerate_suborders`].
///
/// `bad(s, t)` pairs must never satisfy `s ⪯ t`; pass `|_, _| false` for none.
pub fn enumerate_order_systems(
    n: usize,
    bad: &dyn Fn(usize, usize) -> bool,
    visit: &mut dyn FnMut(OrderSystem) -> Result<bool>,
) -> Result<bool> {
    for partition in set_partitions(n) {
        let c = partition.iter().max().map_or(0, |m| m + 1);
        if (0..n).any(|s| (0..n).any(|t| partition[s] == partition[t] && bad(s, t))) {
            continue;
        }
        let classes: Vec<Vec<usize>> = (0..c)
            .map(|ci| (0..n).filter(|&x| partition[x] == ci).collect())
            .collect();
        for linear in permutations(c) {
            // position p in the chain holds class linear[p]
            let mut pos_of = vec![0; c];
            for (p, &ci) in linear.iter().enumerate() {
                pos_of[ci] = p;
            }
            let mut forbidden = Vec::new();
            for s in 0..n {
                for t in 0..n {
                    if bad(s, t) {
                        let (p, q) = (pos_of[partition[s]], pos_of[partition[t]]);
                        if p < q {
                            forbidden.push((p, q));
                        }
                    }
                }
            }
            let go_on = enumerate_suborders(c, &[], &forbidden, &mut |rel| {
                let partial: Vec<(usize, usize)> = (0..c)
                    .flat_map(|p| (0..c).map(move |q| (p, q)))
                    .filter(|&(p, q)| rel.has(p, q))
                    .map(|(p, q)| (linear[p], linear[q]))
                    .collect();
                let os = OrderSystem::new(n, classes.clone(), &partial, &linear)?;
                visit(os)
            })?;
            if !go_on {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Number of order systems on an `n`-element set.
pub fn count_order_systems(n: usize) -> Result<usize> {
    let mut count = 0;
    enumerate_order_systems(n, &|_, _| false, &mut |_| {
        count += 1;
        Ok(true)
    })?;
    Ok(count)
}
