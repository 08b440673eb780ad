//! Exhaustive enumeration of spanning out-forests with exact rational
//! weights. This is the ground truth every matrix identity is checked
//! against on small digraphs; it is exponential by nature.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::digraph::{reverse, source_knots, Digraph};
use crate::error::{Error, Result};
use crate::exact::RationalMatrix;

pub const DEFAULT_VERTEX_LIMIT: usize = 8;

/// Upper bound on the number of candidate parent assignments inspected.
pub const CANDIDATE_LIMIT: u64 = 1 << 24;

/// A spanning out-forest: each vertex has at most one parent and there are
/// no circuits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningForest {
    /// Arcs `(tail, head)`, sorted.
    pub arcs: Vec<(usize, usize)>,
    pub parent: Vec<Option<usize>>,
    /// Root of the tree containing each vertex.
    pub root_of: Vec<usize>,
    pub weight: BigRational,
}

impl SpanningForest {
    fn from_parents(parent: Vec<Option<usize>>, weight: BigRational) -> Option<Self> {
        let n = parent.len();
        let mut root_of = vec![usize::MAX; n];
        for v in 0..n {
            let mut u = v;
            let mut steps = 0;
            while let Some(p) = parent[u] {
                u = p;
                steps += 1;
                if steps > n {
                    return None;
                }
            }
            root_of[v] = u;
        }
        let mut arcs: Vec<(usize, usize)> = parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (p, v)))
            .collect();
        arcs.sort_unstable();
        Some(Self {
            arcs,
            parent,
            root_of,
            weight,
        })
    }

    /// Builds a forest from an arc list, computing its weight from `g`.
    pub fn from_arcs(g: &Digraph, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut parent = vec![None; g.n()];
        let mut weight = BigRational::one();
        for &(t, h) in arcs {
            let arc = g
                .arc(t, h)
                .ok_or_else(|| Error::Precondition(format!("({}, {}) is not an arc", t + 1, h + 1)))?;
            if parent[h].replace(t).is_some() {
                return Err(Error::Precondition(format!(
                    "vertex {} has two incoming forest arcs",
                    h + 1
                )));
            }
            weight *= &arc.exact;
        }
        Self::from_parents(parent, weight)
            .ok_or_else(|| Error::Precondition("arc set contains a circuit".into()))
    }

    pub fn roots(&self) -> Vec<usize> {
        (0..self.parent.len())
            .filter(|&v| self.parent[v].is_none())
            .collect()
    }

    pub fn tree_count(&self) -> usize {
        self.roots().len()
    }

    pub fn contains_arc(&self, tail: usize, head: usize) -> bool {
        self.arcs.binary_search(&(tail, head)).is_ok()
    }
}

/// Independent forest predicate: every indegree is at most one and the
/// number of weak components equals `n - |arcs|` (no circuits).
pub fn is_out_forest(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    for &(_, h) in arcs {
        indeg[h] += 1;
    }
    if indeg.iter().any(|&d| d > 1) {
        return false;
    }
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut components = n;
    for &(t, h) in arcs {
        let (a, b) = (find(&mut uf, t), find(&mut uf, h));
        if a != b {
            uf[a] = b;
            components -= 1;
        }
    }
    components == n - arcs.len()
}

/// All spanning out-forests of a digraph grouped by arc count.
#[derive(Debug, Clone)]
pub struct ForestSet {
    pub n: usize,
    pub by_arc_count: BTreeMap<usize, Vec<SpanningForest>>,
}

impl ForestSet {
    pub fn max_arc_count(&self) -> usize {
        *self.by_arc_count.keys().next_back().expect("empty forest always present")
    }

    /// `sigma_k`: total weight of `k`-arc forests (zero for an empty class).
    pub fn sigma(&self, k: usize) -> BigRational {
        self.by_arc_count
            .get(&k)
            .map(|fs| fs.iter().map(|f| f.weight.clone()).sum())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.by_arc_count.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &SpanningForest> {
        self.by_arc_count.values().flatten()
    }
}

fn enumerate_on(
    n: usize,
    arcs: &[(usize, usize, BigRational)],
) -> Result<BTreeMap<usize, Vec<SpanningForest>>> {
    let mut incoming: Vec<Vec<(usize, &BigRational)>> = vec![Vec::new(); n];
    for (t, h, w) in arcs {
        incoming[*h].push((*t, w));
    }
    let candidates = incoming
        .iter()
        .try_fold(1u64, |acc, inc| acc.checked_mul(inc.len() as u64 + 1))
        .unwrap_or(u64::MAX);
    if candidates > CANDIDATE_LIMIT {
        return Err(Error::EnumerationLimit(format!(
            "{candidates} candidate parent assignments exceed {CANDIDATE_LIMIT}"
        )));
    }

    // Mixed-radix counter over parent choices; digit 0 means "root".
    let mut digits = vec![0usize; n];
    let mut out: BTreeMap<usize, Vec<SpanningForest>> = BTreeMap::new();
    loop {
        let mut weight = BigRational::one();
        let parent: Vec<Option<usize>> = (0..n)
            .map(|v| match digits[v] {
                0 => None,
                d => {
                    let (t, w) = incoming[v][d - 1];
                    weight *= w;
                    Some(t)
                }
            })
            .collect();
        if let Some(forest) = SpanningForest::from_parents(parent, weight) {
            out.entry(forest.arcs.len()).or_default().push(forest);
        }
        let mut v = 0;
        loop {
            if v == n {
                return Ok(out);
            }
            digits[v] += 1;
            if digits[v] <= incoming[v].len() {
                break;
            }
            digits[v] = 0;
            v += 1;
        }
    }
}

pub fn enumerate_out_forests(g: &Digraph) -> Result<ForestSet> {
    enumerate_out_forests_with_limit(g, DEFAULT_VERTEX_LIMIT)
}

pub fn enumerate_out_forests_with_limit(g: &Digraph, vertex_limit: usize) -> Result<ForestSet> {
    if g.n() > vertex_limit {
        return Err(Error::EnumerationLimit(format!(
            "n = {} exceeds the oracle limit {vertex_limit}",
            g.n()
        )));
    }
    let arcs: Vec<_> = g
        .arcs()
        .iter()
        .map(|a| (a.tail, a.head, a.exact.clone()))
        .collect();
    Ok(ForestSet {
        n: g.n(),
        by_arc_count: enumerate_on(g.n(), &arcs)?,
    })
}

/// In-forests of `g` are the out-forests of the reversed digraph, with the
/// same arcs read backwards; roots become the vertices of outdegree zero.
pub fn enumerate_in_forests(g: &Digraph) -> Result<ForestSet> {
    enumerate_out_forests(&reverse(g))
}

/// `q^k_ij`: weight of `k`-arc forests in which `j` belongs to the tree rooted at `i`.
pub fn oracle_qk(fs: &ForestSet, k: usize) -> RationalMatrix {
    let mut q = RationalMatrix::zeros(fs.n);
    for f in fs.by_arc_count.get(&k).into_iter().flatten() {
        for j in 0..fs.n {
            q[(f.root_of[j], j)] += &f.weight;
        }
    }
    q
}

/// Matrix of all out-forests `Q` and the total weight `sigma`.
pub fn oracle_total(fs: &ForestSet) -> (RationalMatrix, BigRational) {
    let mut q = RationalMatrix::zeros(fs.n);
    let mut sigma = BigRational::zero();
    for f in fs.iter() {
        sigma += &f.weight;
        for j in 0..fs.n {
            q[(f.root_of[j], j)] += &f.weight;
        }
    }
    (q, sigma)
}

/// Weights `w(T^k)` of spanning trees diverging from each vertex `k` of the
/// subdigraph induced by `vertices` (in the order given).
pub fn out_tree_weights(g: &Digraph, vertices: &[usize]) -> Result<Vec<BigRational>> {
    let arcs = g.induced(vertices);
    let size = vertices.len();
    if size > DEFAULT_VERTEX_LIMIT {
        return Err(Error::EnumerationLimit(format!(
            "{size} vertices exceed the oracle limit {DEFAULT_VERTEX_LIMIT}"
        )));
    }
    let forests = enumerate_on(size, &arcs)?;
    let mut weights = vec![BigRational::zero(); size];
    if size == 0 {
        return Ok(weights);
    }
    for f in forests.get(&(size - 1)).into_iter().flatten() {
        weights[f.root_of[0]] += &f.weight;
    }
    Ok(weights)
}

/// Joins a path with a maximum out-forest and drops the forest arcs that
/// enter path vertices without belonging to the path. The result is an
/// out-forest containing the path, rooted so the path start heads its tree,
/// with at least `n - d' - 1` arcs.
pub fn extend_path_to_forest(
    g: &Digraph,
    path: &[usize],
    f_max: &SpanningForest,
) -> Result<SpanningForest> {
    let n = g.n();
    if path.is_empty() {
        return Err(Error::Precondition("empty path".into()));
    }
    let mut on_path = vec![false; n];
    for &v in path {
        if v >= n || std::mem::replace(&mut on_path[v], true) {
            return Err(Error::Precondition("path vertices must be distinct and in range".into()));
        }
    }
    let path_arcs: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0], w[1])).collect();
    if let Some(&(t, h)) = path_arcs.iter().find(|&&(t, h)| !g.has_arc(t, h)) {
        return Err(Error::Precondition(format!("({}, {}) is not an arc", t + 1, h + 1)));
    }
    let max_arcs = n - source_knots(g).d_prime();
    if f_max.arcs.len() != max_arcs || !is_out_forest(n, &f_max.arcs) {
        return Err(Error::Precondition(
            "f_max is not a maximum out-forest".into(),
        ));
    }
    if let Some(&(t, h)) = f_max.arcs.iter().find(|&&(t, h)| !g.has_arc(t, h)) {
        return Err(Error::Precondition(format!(
            "f_max arc ({}, {}) is not in the digraph",
            t + 1,
            h + 1
        )));
    }
    let mut arcs = path_arcs;
    arcs.extend(f_max.arcs.iter().copied().filter(|&(_, h)| !on_path[h]));
    arcs.sort_unstable();
    SpanningForest::from_arcs(g, &arcs)
}

/// Every simple path from `from` to `to` (a single vertex when they coincide).
pub fn simple_paths(g: &Digraph, from: usize, to: usize) -> Vec<Vec<usize>> {
    fn extend(
        adj: &[Vec<usize>],
        to: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let v = *path.last().expect("nonempty");
        if v == to {
            out.push(path.clone());
            return;
        }
        for &w in &adj[v] {
            if !on_path[w] {
                on_path[w] = true;
                path.push(w);
                extend(adj, to, path, on_path, out);
                path.pop();
                on_path[w] = false;
            }
        }
    }
    let adj = g.adjacency();
    let mut on_path = vec![false; g.n()];
    on_path[from] = true;
    let mut out = Vec::new();
    extend(&adj, to, &mut vec![from], &mut on_path, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::load_digraph;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn path_forests() {
        let g = load_digraph("3\n1 2\n2 3").unwrap();
        let fs = enumerate_out_forests(&g).unwrap();
        let counts: Vec<_> = fs.by_arc_count.iter().map(|(k, v)| (*k, v.len())).collect();
        assert_eq!(counts, vec![(0, 1), (1, 2), (2, 1)]);
        assert_eq!(fs.by_arc_count[&2][0].arcs, vec![(0, 1), (1, 2)]);
        for f in fs.iter() {
            assert!(is_out_forest(3, &f.arcs));
            assert_eq!(f.tree_count(), 3 - f.arcs.len());
        }
    }

    #[test]
    fn cycle_and_edgeless_forests() {
        let c = load_digraph("2\n1 2\n2 1").unwrap();
        let fs = enumerate_out_forests(&c).unwrap();
        assert_eq!(fs.by_arc_count[&1].len(), 2);
        assert!(!fs.by_arc_count.contains_key(&2));

        let e = Digraph::edgeless(4).unwrap();
        let fs = enumerate_out_forests(&e).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs.sigma(0), int(1));
        assert_eq!(fs.sigma(1), int(0));
    }

    #[test]
    fn qk_values() {
        let g = load_digraph("3\n1 2\n2 3").unwrap();
        let fs = enumerate_out_forests(&g).unwrap();
        let q1 = oracle_qk(&fs, 1);
        let expect1 = [[2, 1, 0], [0, 1, 1], [0, 0, 1]];
        let q2 = oracle_qk(&fs, 2);
        let expect2 = [[1, 1, 1], [0, 0, 0], [0, 0, 0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(q1[(i, j)], int(expect1[i][j]));
                assert_eq!(q2[(i, j)], int(expect2[i][j]));
            }
        }
        assert_eq!(oracle_qk(&fs, 0), RationalMatrix::identity(3));
    }

    #[test]
    fn exact_weights_multiply() {
        let g = load_digraph("3\n1 2 0.5\n2 3 0.1").unwrap();
        let fs = enumerate_out_forests(&g).unwrap();
        assert_eq!(fs.sigma(2), BigRational::new(1.into(), 20.into()));
        assert_eq!(fs.sigma(1), BigRational::new(3.into(), 5.into()));
    }

    #[test]
    fn size_limits() {
        let g = Digraph::edgeless(9).unwrap();
        assert!(matches!(enumerate_out_forests(&g), Err(Error::EnumerationLimit(_))));
        let arcs: Vec<_> = (0..9)
            .flat_map(|i| (0..9).filter(move |&j| j != i).map(move |j| (i, j, 1.0)))
            .collect();
        let k9 = Digraph::new(9, arcs).unwrap();
        assert!(matches!(
            enumerate_out_forests_with_limit(&k9, 20),
            Err(Error::EnumerationLimit(_))
        ));
    }

    #[test]
    fn path_extension_examples() {
        let p3 = load_digraph("3\n1 2\n2 3").unwrap();
        let fmax = SpanningForest::from_arcs(&p3, &[(0, 1), (1, 2)]).unwrap();
        let f = extend_path_to_forest(&p3, &[0, 1, 2], &fmax).unwrap();
        assert_eq!(f, fmax);

        let ts = load_digraph("3\n1 3\n2 3").unwrap();
        let fmax = SpanningForest::from_arcs(&ts, &[(1, 2)]).unwrap();
        let f = extend_path_to_forest(&ts, &[0, 2], &fmax).unwrap();
        assert_eq!(f.arcs, vec![(0, 2)]);
        assert_eq!(f.root_of[2], 0);

        let fmax = SpanningForest::from_arcs(&p3, &[(0, 1), (1, 2)]).unwrap();
        let f = extend_path_to_forest(&p3, &[0], &fmax).unwrap();
        assert_eq!(f, fmax);
    }

    #[test]
    fn path_extension_rejects_bad_input() {
        let p3 = load_digraph("3\n1 2\n2 3").unwrap();
        let fmax = SpanningForest::from_arcs(&p3, &[(0, 1), (1, 2)]).unwrap();
        assert!(extend_path_to_forest(&p3, &[0, 2], &fmax).is_err());
        assert!(extend_path_to_forest(&p3, &[0, 1, 0], &fmax).is_err());
        let small = SpanningForest::from_arcs(&p3, &[(0, 1)]).unwrap();
        assert!(extend_path_to_forest(&p3, &[0, 1], &small).is_err());
    }

    #[test]
    fn tree_weights_of_cycle() {
        let g = load_digraph("3\n1 2 2\n2 3\n3 1 0.5").unwrap();
        let w = out_tree_weights(&g, &[0, 1, 2]).unwrap();
        // Tree from 1: (1,2),(2,3) = 2; from 2: (2,3),(3,1) = 0.5; from 3: (3,1),(1,2) = 1.
        assert_eq!(w, vec![int(2), BigRational::new(1.into(), 2.into()), int(1)]);
        assert_eq!(out_tree_weights(&g, &[1]).unwrap(), vec![int(1)]);
    }

    #[test]
    fn simple_path_listing() {
        let g = load_digraph("3\n1 2\n2 3\n1 3").unwrap();
        let mut paths = simple_paths(&g, 0, 2);
        paths.sort();
        assert_eq!(paths, vec![vec![0, 1, 2], vec![0, 2]]);
        assert_eq!(simple_paths(&g, 2, 0), Vec::<Vec<usize>>::new());
        assert_eq!(simple_paths(&g, 1, 1), vec![vec![1]]);
    }
}
