//! Weighted loop-free digraphs, edge-list parsing, and traversal-based
//! structure: reachability, strong components, condensation, source knots.
//!
//! Vertices are 0-based indices internally. The edge-list format and every
//! JSON document use 1-based labels.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, Matrix};

/// One weighted arc. `exact` carries the weight as an exact rational so the
/// enumeration oracle never sees rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub weight: f64,
    pub exact: BigRational,
}

/// Weighted digraph without loops or parallel arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    n: usize,
    /// Sorted by `(tail, head)`.
    arcs: Vec<Arc>,
    weights: Matrix,
}

impl Digraph {
    /// Builds a digraph from 0-based `(tail, head, weight)` triples.
    pub fn new<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut exact_arcs = Vec::new();
        for (tail, head, weight) in arcs {
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(Error::NonPositiveWeight {
                    tail: tail + 1,
                    head: head + 1,
                    weight,
                });
            }
            let exact = BigRational::from_float(weight).expect("finite weight");
            exact_arcs.push((tail, head, exact));
        }
        Self::with_exact_weights(n, exact_arcs)
    }

    /// Builds a digraph whose weights are given as exact rationals.
    pub fn with_exact_weights<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, BigRational)>,
    {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let mut map: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (tail, head, exact) in arcs {
            for v in [tail, head] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v + 1, n });
                }
            }
            if tail == head {
                return Err(Error::LoopArc(tail + 1));
            }
            if !exact.is_positive() {
                return Err(Error::NonPositiveWeight {
                    tail: tail + 1,
                    head: head + 1,
                    weight: rational_to_f64(&exact),
                });
            }
            if map.insert((tail, head), exact).is_some() {
                return Err(Error::DuplicateArc(tail + 1, head + 1));
            }
        }
        let mut weights = Matrix::zeros(n, n);
        let arcs = map
            .into_iter()
            .map(|((tail, head), exact)| {
                let weight = rational_to_f64(&exact);
                weights[(tail, head)] = weight;
                Arc {
                    tail,
                    head,
                    weight,
                    exact,
                }
            })
            .collect();
        Ok(Self { n, arcs, weights })
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Weight matrix `W`; zero where there is no arc.
    pub fn weight_matrix(&self) -> &Matrix {
        &self.weights
    }

    pub fn weight(&self, tail: usize, head: usize) -> f64 {
        self.weights[(tail, head)]
    }

    pub fn has_arc(&self, tail: usize, head: usize) -> bool {
        self.weights[(tail, head)] > 0.0
    }

    pub fn arc(&self, tail: usize, head: usize) -> Option<&Arc> {
        self.arcs
            .binary_search_by(|a| (a.tail, a.head).cmp(&(tail, head)))
            .ok()
            .map(|i| &self.arcs[i])
    }

    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().filter(move |a| a.tail == v).map(|a| a.head)
    }

    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.iter().filter(move |a| a.head == v).map(|a| a.tail)
    }

    /// True when every arc has weight exactly 1.
    pub fn is_unit_weighted(&self) -> bool {
        self.arcs.iter().all(|a| a.exact.is_one())
    }

    /// True when every weight lies in `(0, 1]`.
    pub fn has_probability_weights(&self) -> bool {
        self.arcs.iter().all(|a| a.exact <= BigRational::one())
    }

    /// Adjacency lists, successors sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for a in &self.arcs {
            adj[a.tail].push(a.head);
        }
        adj
    }

    /// Same digraph with `(tail, head)` replaced (or added) with the given weight.
    pub fn with_arc_weight(&self, tail: usize, head: usize, weight: f64) -> Result<Self> {
        let mut arcs: Vec<(usize, usize, BigRational)> = self
            .arcs
            .iter()
            .filter(|a| (a.tail, a.head) != (tail, head))
            .map(|a| (a.tail, a.head, a.exact.clone()))
            .collect();
        let exact = BigRational::from_float(weight).ok_or(Error::NonPositiveWeight {
            tail: tail + 1,
            head: head + 1,
            weight,
        })?;
        arcs.push((tail, head, exact));
        Self::with_exact_weights(self.n, arcs)
    }

    /// Relabels vertices: new vertex `p` is old vertex `order[p]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        assert_eq!(order.len(), self.n, "permutation length");
        let mut position = vec![usize::MAX; self.n];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        assert!(position.iter().all(|&p| p != usize::MAX), "not a permutation");
        Self::with_exact_weights(
            self.n,
            self.arcs
                .iter()
                .map(|a| (position[a.tail], position[a.head], a.exact.clone())),
        )
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a decimal literal such as `0.1`, `2`, `1.5e-3`.
pub fn parse_decimal_exact(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}

/// Parses the edge-list format: first non-comment line is `n`, each further
/// nonempty line is `tail head [weight]` with 1-based ids; `#` starts a
/// comment line. Weight defaults to 1.
pub fn load_digraph(text: &str) -> Result<Digraph> {
    let mut n: Option<usize> = None;
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut arcs = Vec::new();
    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(n) = n else {
            if fields.len() != 1 {
                return Err(parse_err(line_no, "expected vertex count".into()));
            }
            let count: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid vertex count '{}'", fields[0])))?;
            if count < 2 {
                return Err(parse_err(line_no, Error::TooFewVertices(count).to_string()));
            }
            n = Some(count);
            continue;
        };
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(
                line_no,
                format!("expected 'tail head [weight]', got {} fields", fields.len()),
            ));
        }
        let vertex = |s: &str| -> Result<usize> {
            let v: usize = s
                .parse()
                .map_err(|_| parse_err(line_no, format!("invalid vertex id '{s}'")))?;
            if v == 0 || v > n {
                return Err(parse_err(
                    line_no,
                    Error::VertexOutOfRange { vertex: v, n }.to_string(),
                ));
            }
            Ok(v - 1)
        };
        let tail = vertex(fields[0])?;
        let head = vertex(fields[1])?;
        let exact = match fields.get(2) {
            Some(w) => parse_decimal_exact(w)
                .ok_or_else(|| parse_err(line_no, format!("invalid weight '{w}'")))?,
            None => BigRational::one(),
        };
        if tail == head {
            return Err(parse_err(line_no, Error::LoopArc(tail + 1).to_string()));
        }
        if !exact.is_positive() {
            let weight = rational_to_f64(&exact);
            return Err(parse_err(
                line_no,
                Error::NonPositiveWeight {
                    tail: tail + 1,
                    head: head + 1,
                    weight,
                }
                .to_string(),
            ));
        }
        if !seen.insert((tail, head)) {
            return Err(parse_err(
                line_no,
                Error::DuplicateArc(tail + 1, head + 1).to_string(),
            ));
        }
        arcs.push((tail, head, exact));
    }
    let n = n.ok_or_else(|| parse_err(0, "missing vertex count".into()))?;
    Digraph::with_exact_weights(n, arcs)
}

/// Reverses every arc, preserving weights.
pub fn reverse(g: &Digraph) -> Digraph {
    Digraph::with_exact_weights(
        g.n,
        g.arcs.iter().map(|a| (a.head, a.tail, a.exact.clone())),
    )
    .expect("reversal preserves validity")
}

/// Strong components and the acyclic digraph between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Condensation {
    /// Each component sorted ascending; components ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    pub arcs: BTreeSet<(usize, usize)>,
}

impl Condensation {
    pub fn indegree(&self, component: usize) -> usize {
        self.arcs.iter().filter(|&&(_, h)| h == component).count()
    }

    /// Components with no incoming condensation arc.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&c| self.indegree(c) == 0)
            .collect()
    }
}

/// Tarjan's algorithm, iterative.
pub fn strong_components(g: &Digraph) -> Condensation {
    let n = g.n;
    let adj = g.adjacency();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut raw_components: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    raw_components.push(comp);
                }
            }
        }
    }

    raw_components.sort_by_key(|c| c[0]);
    let mut component_of = vec![0; n];
    for (c, comp) in raw_components.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    let arcs = g
        .arcs
        .iter()
        .map(|a| (component_of[a.tail], component_of[a.head]))
        .filter(|(a, b)| a != b)
        .collect();
    Condensation {
        components: raw_components,
        component_of,
        arcs,
    }
}

/// Source knots `K_1..K_d'`, their exclusive reach `K_i^+`, and the union.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceKnotSet {
    /// Knots ordered by smallest member; each sorted ascending.
    pub knots: Vec<Vec<usize>>,
    /// Vertices reachable from knot `i` and from no other knot.
    pub exclusive_reach: Vec<Vec<usize>>,
    /// Sorted union of all knots.
    pub union: Vec<usize>,
}

impl SourceKnotSet {
    pub fn d_prime(&self) -> usize {
        self.knots.len()
    }

    pub fn knot_of(&self, v: usize) -> Option<usize> {
        self.knots.iter().position(|k| k.binary_search(&v).is_ok())
    }

    pub fn contains(&self, v: usize) -> bool {
        self.union.binary_search(&v).is_ok()
    }
}

pub fn source_knots(g: &Digraph) -> SourceKnotSet {
    let cond = strong_components(g);
    let knots: Vec<Vec<usize>> = cond
        .sources()
        .into_iter()
        .map(|c| cond.components[c].clone())
        .collect();
    let reach = reachability_bfs(g);
    let reached_by: Vec<Vec<bool>> = knots
        .iter()
        .map(|k| (0..g.n).map(|v| reach[(k[0], v)] == 1).collect())
        .collect();
    let exclusive_reach = (0..knots.len())
        .map(|i| {
            (0..g.n)
                .filter(|&v| {
                    reached_by[i][v]
                        && (0..knots.len()).all(|j| j == i || !reached_by[j][v])
                })
                .collect()
        })
        .collect();
    let mut union: Vec<usize> = knots.iter().flatten().copied().collect();
    union.sort_unstable();
    SourceKnotSet {
        knots,
        exclusive_reach,
        union,
    }
}

fn bfs_from(adj: &[Vec<usize>], start: usize, skip: Option<usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    if Some(start) == skip {
        return seen;
    }
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] && Some(w) != skip {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// `r_ij = 1` iff `j` is reachable from `i`; the diagonal is always 1.
pub fn reachability_bfs(g: &Digraph) -> BinaryMatrix {
    let adj = g.adjacency();
    let mut r = BinaryMatrix::zeros(g.n, g.n);
    for i in 0..g.n {
        for (j, reached) in bfs_from(&adj, i, None).into_iter().enumerate() {
            r[(i, j)] = u8::from(reached);
        }
    }
    r
}

/// Reachability in `g` with vertex `removed` deleted (its row and column are 0).
pub fn reachability_without(g: &Digraph, removed: usize) -> BinaryMatrix {
    let adj = g.adjacency();
    let mut r = BinaryMatrix::zeros(g.n, g.n);
    for i in (0..g.n).filter(|&i| i != removed) {
        for (j, reached) in bfs_from(&adj, i, Some(removed)).into_iter().enumerate() {
            r[(i, j)] = u8::from(reached);
        }
    }
    r
}

/// `k` mediates between `i` and `t`: some path `i -> t` exists, `i != k != t`,
/// and every such path passes through `k`.
pub fn mediates(g: &Digraph, k: usize, i: usize, t: usize) -> bool {
    if i == k || k == t {
        return false;
    }
    let adj = g.adjacency();
    bfs_from(&adj, i, None)[t] && !bfs_from(&adj, i, Some(k))[t]
}

/// Precomputed mediation relation, `table[k][i][t]`.
#[derive(Debug, Clone)]
pub struct MediationTable {
    table: Vec<Vec<Vec<bool>>>,
}

impl MediationTable {
    pub fn new(g: &Digraph) -> Self {
        let n = g.n;
        let reach = reachability_bfs(g);
        let table = (0..n)
            .map(|k| {
                let without = reachability_without(g, k);
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|t| {
                                i != k && k != t && reach[(i, t)] == 1 && without[(i, t)] == 0
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self { table }
    }

    pub fn mediates(&self, k: usize, i: usize, t: usize) -> bool {
        self.table[k][i][t]
    }
}

/// Vertex order placing `K_1`, then `K_2`, ..., then the remaining vertices;
/// input order is kept within blocks. `order[p]` is the original vertex at
/// new position `p`.
pub fn standard_numeration(g: &Digraph) -> Vec<usize> {
    let knots = source_knots(g);
    let mut order: Vec<usize> = knots.knots.iter().flatten().copied().collect();
    order.extend((0..g.n).filter(|&v| !knots.contains(v)));
    order
}

impl Digraph {
    /// Vertex-induced subdigraph on `vertices` (relabelled `0..len` in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Vec<(usize, usize, BigRational)> {
        let mut position = vec![usize::MAX; self.n];
        for (p, &v) in vertices.iter().enumerate() {
            position[v] = p;
        }
        self.arcs
            .iter()
            .filter(|a| position[a.tail] != usize::MAX && position[a.head] != usize::MAX)
            .map(|a| (position[a.tail], position[a.head], a.exact.clone()))
            .collect()
    }
}
