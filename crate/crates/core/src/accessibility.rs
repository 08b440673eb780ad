//! Out/in accessibility measures and checkers for the accessibility conditions.
//!
//! `P^out_tau = J(tau)` gives the accessibility of `j` from `i` as the
//! relative weight of forests in which `j` hangs on a tree rooted at `i`.
//! `P^in_tau` is its dual, computed on the reversed digraph and transposed.
//! `tau = inf` selects the limiting measures built from `J_bar`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::digraph::{reachability_bfs, reverse, Digraph, MediationTable};
use crate::error::{Error, Result};
use crate::forest::{forest_stack, normalized_mixture};
use crate::matrix::{max_abs, Matrix, SIGN_REL_TOL};
use crate::structure::jtau_sign_threshold;

/// Relative tolerance of strict and nonstrict comparisons.
pub const COMPARE_TOL: f64 = 1e-10;

/// Parameter of the small-tau experimental check.
pub const SMALL_TAU: f64 = 1e-3;

/// Weight increments and new-arc weights of the monotonicity schedule.
pub const PERTURBATION_STEPS: [f64; 2] = [0.1, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Out => "out",
            Direction::In => "in",
        }
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out" => Ok(Direction::Out),
            "in" => Ok(Direction::In),
            other => Err(Error::Precondition(format!(
                "direction must be 'out' or 'in', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Finite(f64),
    Infinite,
}

impl Tau {
    pub fn validate(self) -> Result<Self> {
        match self {
            Tau::Finite(t) if !(t > 0.0) || !t.is_finite() => Err(Error::ParameterOutOfRange {
                name: "tau",
                value: t,
                range: "(0, inf]".into(),
            }),
            other => Ok(other),
        }
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{t}"),
            Tau::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Tau {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Tau::Infinite),
            other => {
                let t: f64 = other.parse().map_err(|_| {
                    Error::Precondition(format!("tau must be a positive number or 'inf', got '{s}'"))
                })?;
                Tau::Finite(t).validate()
            }
        }
    }
}

/// A vertex accessibility measure evaluated on one digraph.
#[derive(Debug, Clone, PartialEq)]
pub struct ProximityMatrix {
    pub entries: Matrix,
    pub direction: Direction,
    pub tau: Tau,
    /// Entries at or below this value are structural zeros.
    pub zero_threshold: f64,
}

impl ProximityMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        self.entries[(i, j)] <= self.zero_threshold
    }
}

/// `P^out_tau = J(tau)`; `tau = inf` gives `J_bar`.
pub fn out_accessibility(g: &Digraph, tau: Tau) -> Result<ProximityMatrix> {
    let tau = tau.validate()?;
    let stack = forest_stack(g)?;
    let (entries, zero_threshold) = match tau {
        Tau::Finite(t) => {
            let j = normalized_mixture(&stack, t);
            let threshold = jtau_sign_threshold(g, &stack, t, max_abs(&j));
            (j, threshold)
        }
        Tau::Infinite => {
            let j = stack.j_matrix(stack.m()).clone();
            let threshold = SIGN_REL_TOL * max_abs(&j);
            (j, threshold)
        }
    };
    Ok(ProximityMatrix {
        entries,
        direction: Direction::Out,
        tau,
        zero_threshold,
    })
}

/// `p^in_ij(g) = p^out_ji(reverse(g))`.
pub fn in_accessibility(g: &Digraph, tau: Tau) -> Result<ProximityMatrix> {
    let out = out_accessibility(&reverse(g), tau)?;
    Ok(ProximityMatrix {
        entries: out.entries.transpose(),
        direction: Direction::In,
        tau: out.tau,
        zero_threshold: out.zero_threshold,
    })
}

/// Which measure a condition is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec {
    pub direction: Direction,
    pub tau: Tau,
}

impl MeasureSpec {
    pub fn evaluate(&self, g: &Digraph) -> Result<ProximityMatrix> {
        match self.direction {
            Direction::Out => out_accessibility(g, self.tau),
            Direction::In => in_accessibility(g, self.tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    Nonnegativity,
    Reachability,
    SelfAccessibility,
    TriangleInequality,
    TransitProperty,
    Monotonicity,
    Convexity,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::Nonnegativity,
        Condition::Reachability,
        Condition::SelfAccessibility,
        Condition::TriangleInequality,
        Condition::TransitProperty,
        Condition::Monotonicity,
        Condition::Convexity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::Nonnegativity => "nonnegativity",
            Condition::Reachability => "reachability-condition",
            Condition::SelfAccessibility => "self-accessibility",
            Condition::TriangleInequality => "triangle-inequality",
            Condition::TransitProperty => "transit-property",
            Condition::Monotonicity => "monotonicity",
            Condition::Convexity => "convexity",
        }
    }

    /// Variant checked when none is requested.
    pub fn default_variant(self) -> Variant {
        match self {
            Condition::Nonnegativity => Variant::Unpartitioned,
            _ => Variant::Both,
        }
    }

    fn accepts(self, variant: Variant) -> bool {
        match self {
            Condition::Nonnegativity => variant == Variant::Unpartitioned,
            Condition::Reachability => matches!(
                variant,
                Variant::Forward | Variant::Backward | Variant::Both
            ),
            Condition::Monotonicity => matches!(
                variant,
                Variant::A | Variant::B | Variant::Both | Variant::Unpartitioned
            ),
            _ => matches!(variant, Variant::A | Variant::B | Variant::Both),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let found = match key.as_str() {
            "reachability" => Some(Condition::Reachability),
            "triangle" => Some(Condition::TriangleInequality),
            "transit" => Some(Condition::TransitProperty),
            _ => Condition::ALL.into_iter().find(|c| c.name() == key),
        };
        found.ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

/// Part of a condition.
///
/// `A` and `B` are the lettered items. For monotonicity, `Unpartitioned`
/// selects items (1) and (2), and `A`/`B` add item (3A)/(3B). For the
/// reachability condition, `Forward` is "`p_ij = 0` implies `j` unreachable
/// from `i`" and `Backward` is the converse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    A,
    B,
    Both,
    Unpartitioned,
    Forward,
    Backward,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::A => "A",
            Variant::B => "B",
            Variant::Both => "both",
            Variant::Unpartitioned => "unpartitioned",
            Variant::Forward => "forward",
            Variant::Backward => "backward",
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Variant::A),
            "b" => Ok(Variant::B),
            "both" | "ab" => Ok(Variant::Both),
            "unpartitioned" | "none" => Ok(Variant::Unpartitioned),
            "forward" | "=>" | "only-if" => Ok(Variant::Forward),
            "backward" | "<=" | "if" => Ok(Variant::Backward),
            other => Err(Error::Precondition(format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Strict,
    Nonstrict,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Nonstrict => "nonstrict",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(Mode::Strict),
            "nonstrict" => Ok(Mode::Nonstrict),
            other => Err(Error::Precondition(format!(
                "mode must be 'strict' or 'nonstrict', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Arc weight change applied before a monotonicity comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub tail: usize,
    pub head: usize,
    /// `0.0` when the arc is new.
    pub old_weight: f64,
    pub new_weight: f64,
}

/// Offending tuple: vertices (0-based) and the values that were compared.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub vertices: Vec<usize>,
    pub values: Vec<f64>,
    pub perturbation: Option<Perturbation>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: String,
    pub variant: Variant,
    pub mode: Mode,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn from_witness(condition: &str, variant: Variant, mode: Mode, witness: Option<Witness>) -> Self {
        Self {
            condition: condition.to_string(),
            variant,
            mode,
            verdict: if witness.is_some() {
                Verdict::Fail
            } else {
                Verdict::Pass
            },
            witness,
        }
    }
}

/// Comparisons with the strictness tolerance applied.
#[derive(Debug, Clone, Copy)]
struct Compare {
    tol: f64,
    mode: Mode,
}

impl Compare {
    fn new(scale: f64, mode: Mode) -> Self {
        Self {
            tol: COMPARE_TOL * scale.max(f64::MIN_POSITIVE),
            mode,
        }
    }

    /// `a > b` in strict mode, `a >= b` in nonstrict mode.
    fn gt(self, a: f64, b: f64) -> bool {
        match self.mode {
            Mode::Strict => a - b > self.tol,
            Mode::Nonstrict => a - b > -self.tol,
        }
    }

    /// `a > b` regardless of mode, for premises.
    fn premise_gt(self, a: f64, b: f64) -> bool {
        a - b > self.tol
    }

    /// `a <= b`, already nonstrict.
    fn le(self, a: f64, b: f64) -> bool {
        b - a > -self.tol
    }
}

fn witness(vertices: &[usize], values: &[f64], description: String) -> Witness {
    Witness {
        vertices: vertices.to_vec(),
        values: values.to_vec(),
        perturbation: None,
        description,
    }
}

fn parts(variant: Variant) -> (bool, bool) {
    match variant {
        Variant::A => (true, false),
        Variant::B => (false, true),
        _ => (true, true),
    }
}

/// Evaluates `condition` exhaustively on the measure `spec` of `g` and
/// returns the first witness in lexicographic tuple order.
pub fn check_condition(
    g: &Digraph,
    spec: MeasureSpec,
    condition: Condition,
    variant: Variant,
    mode: Mode,
) -> Result<ConditionReport> {
    if !condition.accepts(variant) {
        return Err(Error::Precondition(format!(
            "condition {} has no variant {}",
            condition.name(),
            variant.name()
        )));
    }
    let p = spec.evaluate(g)?;
    let found = match condition {
        Condition::Monotonicity => monotonicity_witness(g, spec, &p, variant, mode)?,
        _ => check_matrix(g, &p, condition, variant, mode)?,
    };
    Ok(ConditionReport::from_witness(condition.name(), variant, mode, found))
}

/// Evaluates every condition except monotonicity on a given measure.
pub fn check_matrix_condition(
    g: &Digraph,
    p: &ProximityMatrix,
    condition: Condition,
    variant: Variant,
    mode: Mode,
) -> Result<ConditionReport> {
    if condition == Condition::Monotonicity {
        return Err(Error::Precondition(
            "monotonicity needs a measure specification, not a fixed matrix".into(),
        ));
    }
    if !condition.accepts(variant) {
        return Err(Error::Precondition(format!(
            "condition {} has no variant {}",
            condition.name(),
            variant.name()
        )));
    }
    let found = check_matrix(g, p, condition, variant, mode)?;
    Ok(ConditionReport::from_witness(condition.name(), variant, mode, found))
}

fn check_matrix(
    g: &Digraph,
    p: &ProximityMatrix,
    condition: Condition,
    variant: Variant,
    mode: Mode,
) -> Result<Option<Witness>> {
    let n = p.n();
    let cmp = Compare::new(max_abs(&p.entries), mode);
    let (a, b) = parts(variant);
    let v = |i: usize, j: usize| p.get(i, j);
    Ok(match condition {
        Condition::Nonnegativity => (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| v(i, j) < -cmp.tol)
            .map(|(i, j)| witness(&[i, j], &[v(i, j)], format!("p[{i}][{j}] < 0"))),
        Condition::Reachability => {
            let reach = reachability_bfs(g);
            let forward = matches!(variant, Variant::Forward | Variant::Both);
            let backward = matches!(variant, Variant::Backward | Variant::Both);
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .find_map(|(i, j)| {
                    let reachable = reach[(i, j)] == 1;
                    if forward && p.is_zero(i, j) && reachable {
                        Some(witness(
                            &[i, j],
                            &[v(i, j)],
                            "p_ij = 0 but j is reachable from i".into(),
                        ))
                    } else if backward && !p.is_zero(i, j) && !reachable {
                        Some(witness(
                            &[i, j],
                            &[v(i, j)],
                            "j is unreachable from i but p_ij != 0".into(),
                        ))
                    } else {
                        None
                    }
                })
        }
        Condition::SelfAccessibility => (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .find_map(|(i, j)| {
                if a && !cmp.gt(v(i, i), v(i, j)) {
                    Some(witness(&[i, j], &[v(i, i), v(i, j)], "(A) p_ii > p_ij".into()))
                } else if b && !cmp.gt(v(i, i), v(j, i)) {
                    Some(witness(&[i, j], &[v(i, i), v(j, i)], "(B) p_ii > p_ji".into()))
                } else {
                    None
                }
            }),
        Condition::TriangleInequality => triples(n).find_map(|(i, k, t)| {
            if a && !cmp.le(v(k, i) - v(t, i), v(k, k) - v(t, k)) {
                Some(witness(
                    &[i, k, t],
                    &[v(k, i), v(t, i), v(k, k), v(t, k)],
                    "(A) p_ki - p_ti <= p_kk - p_tk".into(),
                ))
            } else if b && !cmp.le(v(i, k) - v(i, t), v(k, k) - v(k, t)) {
                Some(witness(
                    &[i, k, t],
                    &[v(i, k), v(i, t), v(k, k), v(k, t)],
                    "(B) p_ik - p_it <= p_kk - p_kt".into(),
                ))
            } else {
                None
            }
        }),
        Condition::TransitProperty => {
            let med = MediationTable::new(g);
            triples(n)
                .filter(|&(k, i, t)| i != t && med.mediates(k, i, t))
                .find_map(|(k, i, t)| {
                    if a && !cmp.gt(v(i, k), v(i, t)) {
                        Some(witness(&[k, i, t], &[v(i, k), v(i, t)], "(A) p_ik > p_it".into()))
                    } else if b && !cmp.gt(v(k, t), v(i, t)) {
                        Some(witness(&[k, i, t], &[v(k, t), v(i, t)], "(B) p_kt > p_it".into()))
                    } else {
                        None
                    }
                })
        }
        Condition::Convexity => {
            let mut found = None;
            'outer: for (k, t, i) in triples(n) {
                if i == k {
                    continue;
                }
                for (on, variant, premise) in [
                    (a, Variant::A, (v(k, i), v(t, i))),
                    (b, Variant::B, (v(i, k), v(i, t))),
                ] {
                    if on
                        && cmp.premise_gt(premise.0, premise.1)
                        && monotone_path(g, p, variant, k, t, i, cmp).is_none()
                    {
                        found = Some(witness(
                            &[k, t, i],
                            &[premise.0, premise.1],
                            format!("({}) no monotone path for the premise", variant.name()),
                        ));
                        break 'outer;
                    }
                }
            }
            found
        }
        Condition::Monotonicity => unreachable!("handled by monotonicity_witness"),
    })
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
}

/// Path witnessing convexity.
///
/// (A): a `k -> i` path along which `p_kj - p_tj` strictly decreases, given
/// `p_ki > p_ti` and `i != k`. (B): an `i -> k` path along which
/// `p_jk - p_jt` strictly increases, given `p_ik > p_it` and `i != k`.
/// In nonstrict mode the sequence need only be monotone. Returns the path in
/// traversal order, or `None` when no such path exists.
pub fn convexity_path(
    g: &Digraph,
    p: &ProximityMatrix,
    variant: Variant,
    k: usize,
    t: usize,
    i: usize,
    mode: Mode,
) -> Result<Option<Vec<usize>>> {
    let n = p.n();
    for v in [k, t, i] {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, max: n });
        }
    }
    let cmp = Compare::new(max_abs(&p.entries), mode);
    let premise = match variant {
        Variant::A => (p.get(k, i), p.get(t, i)),
        Variant::B => (p.get(i, k), p.get(i, t)),
        other => {
            return Err(Error::Precondition(format!(
                "convexity path needs variant A or B, got {}",
                other.name()
            )))
        }
    };
    if i == k || !cmp.premise_gt(premise.0, premise.1) {
        return Err(Error::Precondition(
            "convexity premise does not hold (need i != k and a strict inequality)".into(),
        ));
    }
    Ok(monotone_path(g, p, variant, k, t, i, cmp))
}

/// Breadth-first search over arcs that keep the difference sequence monotone.
/// The admissible moves depend only on their endpoints, so plain graph
/// search is exhaustive.
fn monotone_path(
    g: &Digraph,
    p: &ProximityMatrix,
    variant: Variant,
    k: usize,
    t: usize,
    i: usize,
    cmp: Compare,
) -> Option<Vec<usize>> {
    let n = p.n();
    // (A) walks backwards from i towards k; D(j) = p_kj - p_tj must grow.
    // (B) walks forwards from i towards k; E(j) = p_jk - p_jt must grow.
    let value = |j: usize| match variant {
        Variant::A => p.get(k, j) - p.get(t, j),
        _ => p.get(j, k) - p.get(j, t),
    };
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([i]);
    seen[i] = true;
    while let Some(u) = queue.pop_front() {
        if u == k {
            let mut path = vec![k];
            let mut cur = k;
            while cur != i {
                cur = prev[cur];
                path.push(cur);
            }
            if variant == Variant::A {
                // Collected k, ..., i walking back along prev: already k -> i.
                return Some(path);
            }
            path.reverse();
            return Some(path);
        }
        let next: Vec<usize> = match variant {
            Variant::A => g.predecessors(u).collect(),
            _ => g.successors(u).collect(),
        };
        for j in next {
            if !seen[j] && cmp.gt(value(j), value(u)) {
                seen[j] = true;
                prev[j] = u;
                queue.push_back(j);
            }
        }
    }
    None
}

/// The fixed perturbation grid: every existing arc raised by each step, then
/// every absent ordered pair added with each step as its weight.
pub fn perturbation_schedule(g: &Digraph) -> Vec<Perturbation> {
    let n = g.n();
    let mut out = Vec::new();
    for a in g.arcs() {
        for step in PERTURBATION_STEPS {
            out.push(Perturbation {
                tail: a.tail,
                head: a.head,
                old_weight: a.weight,
                new_weight: a.weight + step,
            });
        }
    }
    for tail in 0..n {
        for head in (0..n).filter(|&h| h != tail && !g.has_arc(tail, h)) {
            for step in PERTURBATION_STEPS {
                out.push(Perturbation {
                    tail,
                    head,
                    old_weight: 0.0,
                    new_weight: step,
                });
            }
        }
    }
    out
}

fn monotonicity_witness(
    g: &Digraph,
    spec: MeasureSpec,
    p: &ProximityMatrix,
    variant: Variant,
    mode: Mode,
) -> Result<Option<Witness>> {
    let with_a = matches!(variant, Variant::A | Variant::Both);
    let with_b = matches!(variant, Variant::B | Variant::Both);
    let schedule = perturbation_schedule(g);
    let results: Vec<Result<Option<Witness>>> = schedule
        .par_iter()
        .map(|&pert| {
            let h = g.with_arc_weight(pert.tail, pert.head, pert.new_weight)?;
            let q = spec.evaluate(&h)?;
            let delta = &q.entries - &p.entries;
            let cmp = Compare::new(max_abs(&p.entries).max(max_abs(&q.entries)), mode);
            let med = MediationTable::new(&h);
            let found = monotonicity_items(&delta, &med, pert, cmp, with_a, with_b);
            Ok(found.map(|mut w| {
                w.perturbation = Some(pert);
                w
            }))
        })
        .collect();
    for r in results {
        if let Some(w) = r? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn monotonicity_items(
    delta: &Matrix,
    med: &MediationTable,
    pert: Perturbation,
    cmp: Compare,
    with_a: bool,
    with_b: bool,
) -> Option<Witness> {
    let (k, t) = (pert.tail, pert.head);
    let d = |i: usize, j: usize| delta[(i, j)];
    if !cmp.gt(d(k, t), 0.0) {
        return Some(witness(&[k, t], &[d(k, t)], "(1) dp_kt > 0".into()));
    }
    let n = delta.nrows();
    for i in 0..n {
        if med.mediates(t, k, i) {
            if !cmp.gt(d(k, i), d(t, i)) {
                return Some(witness(
                    &[k, t, i],
                    &[d(k, i), d(t, i)],
                    "(2) t mediates k -> i: dp_ki > dp_ti".into(),
                ));
            }
            if with_a && !cmp.gt(d(k, t), d(k, i)) {
                return Some(witness(
                    &[k, t, i],
                    &[d(k, t), d(k, i)],
                    "(3A) t mediates k -> i: dp_kt > dp_ki".into(),
                ));
            }
        }
        if med.mediates(k, i, t) {
            if !cmp.gt(d(i, t), d(i, k)) {
                return Some(witness(
                    &[k, t, i],
                    &[d(i, t), d(i, k)],
                    "(2) k mediates i -> t: dp_it > dp_ik".into(),
                ));
            }
            if with_b && !cmp.gt(d(k, t), d(i, t)) {
                return Some(witness(
                    &[k, t, i],
                    &[d(k, t), d(i, t)],
                    "(3B) k mediates i -> t: dp_kt > dp_it".into(),
                ));
            }
        }
    }
    None
}

/// Experimental: for small `tau`, every perturbation of `(k, t)` should
/// raise `p_kt` more than any other entry. Reported only.
pub fn check_addition_to_monotonicity(
    g: &Digraph,
    direction: Direction,
    tau: f64,
) -> Result<ConditionReport> {
    let spec = MeasureSpec {
        direction,
        tau: Tau::Finite(tau).validate()?,
    };
    let p = spec.evaluate(g)?;
    let schedule = perturbation_schedule(g);
    let results: Vec<Result<Option<Witness>>> = schedule
        .par_iter()
        .map(|&pert| {
            let h = g.with_arc_weight(pert.tail, pert.head, pert.new_weight)?;
            let q = spec.evaluate(&h)?;
            let delta = &q.entries - &p.entries;
            let cmp = Compare::new(max_abs(&p.entries).max(max_abs(&q.entries)), Mode::Strict);
            let (k, t) = (pert.tail, pert.head);
            let n = delta.nrows();
            let found = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&ij| ij != (k, t))
                .find(|&(i, j)| !cmp.gt(delta[(k, t)], delta[(i, j)]))
                .map(|(i, j)| Witness {
                    vertices: vec![k, t, i, j],
                    values: vec![delta[(k, t)], delta[(i, j)]],
                    perturbation: Some(pert),
                    description: "dp_kt > dp_ij".into(),
                });
            Ok(found)
        })
        .collect();
    let mut first = None;
    for r in results {
        if let Some(w) = r? {
            first = Some(w);
            break;
        }
    }
    Ok(ConditionReport::from_witness(
        "addition-to-monotonicity",
        Variant::Unpartitioned,
        Mode::Strict,
        first,
    ))
}
