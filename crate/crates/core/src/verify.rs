//! Cross-checks of every matrix identity against exhaustive enumeration and
//! structural graph algorithms, one named result per identity.

use num_rational::BigRational;
use num_traits::Zero;

use crate::accessibility::{in_accessibility, out_accessibility, Tau};
use crate::digraph::{
    reachability_bfs, reverse, source_knots, Digraph, SourceKnotSet,
};
use crate::error::{Error, Result};
use crate::exact::{RationalMatrix, EXACT_LIMIT};
use crate::forest::{
    forest_digraph_laplacians, forest_stack, jbar, normalized_mixture, parametric_matrices,
    qk_via_powers, ForestMatrixStack,
};
use crate::laplacian::{column_laplacian, LaplacianMatrix};
use crate::markov::{
    cesaro_limit, default_alpha, inverse_corresponding_chain, uniform_start_distribution,
    verify_tree_theorem, DEFAULT_CESARO_TOL, DEFAULT_T_MAX, TREE_THEOREM_TOL,
};
use crate::matrix::{column_sums, max_abs, max_abs_diff, numeric_rank, Matrix};
use crate::oracle::{
    enumerate_in_forests, enumerate_out_forests, extend_path_to_forest, is_out_forest, oracle_qk,
    out_tree_weights, simple_paths, ForestSet, DEFAULT_VERTEX_LIMIT,
};
use crate::ranking::{daniels_scores_strong, mean_score, score_basis, NULLSPACE_TOL, ORTHOGONALITY_TOL};
use crate::structure::{
    approx_top_reachability, knots_from_jbar, reachability_from_jtau, reachability_from_top_layers,
    top_reachability,
};

/// Relative agreement required between the recurrence and the oracle.
pub const ORACLE_REL_TOL: f64 = 1e-10;
/// Column sums of the normalized matrices.
pub const COLUMN_SUM_TOL: f64 = 1e-9;
/// Matrix identities.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Singular-value cut of numeric ranks.
pub const RANK_TOL: f64 = 1e-8;
/// Distance from `J_bar` required at `tau = 1e6` on unit-weight digraphs.
pub const LIMIT_TOL: f64 = 1e-4;
/// Largest `tau` of the limit check; the sweep runs over powers of ten up to it.
pub const LIMIT_TAU: f64 = 1e6;
/// Knot structure of `J_bar`.
pub const KNOT_TOL: f64 = 1e-9;
/// Uniform-start distribution against the mean score.
pub const MEAN_SCORE_TOL: f64 = 1e-8;
/// Largest vertex count for the path-extension check.
pub const PATH_CHECK_LIMIT: usize = 5;
/// Largest vertex count for the exact-threshold reachability check.
pub const EXACT_THRESHOLD_LIMIT: usize = 6;

pub const PARAMETRIC_TAUS: [f64; 3] = [0.1, 1.0, 10.0];
pub const REACH_TAUS: [f64; 3] = [0.01, 1.0, 100.0];
pub const DUALITY_TAUS: [Tau; 4] = [
    Tau::Finite(0.1),
    Tau::Finite(1.0),
    Tau::Finite(10.0),
    Tau::Infinite,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Preconditions of the check do not hold for this digraph.
    Skipped,
}

impl CheckStatus {
    pub fn name(self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl IdentityCheck {
    fn measured(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            status: if deviation <= tolerance {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            deviation,
            tolerance,
            detail: String::new(),
        }
    }

    fn boolean(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            deviation: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: detail.into(),
        }
    }

    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            name,
            status: CheckStatus::Skipped,
            deviation: 0.0,
            tolerance: 0.0,
            detail: detail.into(),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn failed(name: &'static str, err: &Error) -> Self {
        Self::boolean(name, false, err.to_string())
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub n: usize,
    pub checks: Vec<IdentityCheck>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Everything needed by the individual checks, computed once.
pub struct Context<'a> {
    pub g: &'a Digraph,
    pub l: LaplacianMatrix,
    pub stack: ForestMatrixStack,
    pub jbar: Matrix,
    pub knots: SourceKnotSet,
    pub reach: crate::matrix::BinaryMatrix,
}

impl<'a> Context<'a> {
    pub fn new(g: &'a Digraph) -> Result<Self> {
        let stack = forest_stack(g)?;
        Ok(Self {
            g,
            l: column_laplacian(g),
            jbar: jbar(&stack).jbar,
            stack,
            knots: source_knots(g),
            reach: reachability_bfs(g),
        })
    }
}

fn r2f(x: &BigRational) -> f64 {
    crate::digraph::rational_to_f64(x)
}

/// `max |a - b| / max(|b|, floor)` entrywise.
fn relative_gap(a: &Matrix, b: &RationalMatrix, floor: f64) -> f64 {
    let n = b.n();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let exact = r2f(&b[(i, j)]);
            worst = worst.max((a[(i, j)] - exact).abs() / exact.abs().max(floor));
        }
    }
    worst
}

/// Recurrence `sigma_k` and `Q_k` against the enumerated forests.
pub fn check_oracle(ctx: &Context, forests: &ForestSet) -> Vec<IdentityCheck> {
    let stack = &ctx.stack;
    let m_oracle = forests.max_arc_count();
    let mut sigma_gap = 0.0_f64;
    let mut q_gap = 0.0_f64;
    let mut exact_column_sums = true;
    for k in 0..=m_oracle.max(stack.m()) {
        let exact_sigma = forests.sigma(k);
        let s = if k <= stack.m() { stack.sigma(k) } else { 0.0 };
        let es = r2f(&exact_sigma);
        sigma_gap = sigma_gap.max((s - es).abs() / es.abs().max(f64::MIN_POSITIVE));
        let q_exact = oracle_qk(forests, k);
        for j in 0..forests.n {
            let col: BigRational = (0..forests.n).map(|i| q_exact[(i, j)].clone()).sum();
            exact_column_sums &= col == exact_sigma;
        }
        if k <= stack.m() {
            // Structural zeros are compared against the column total.
            q_gap = q_gap.max(relative_gap(&stack.q_matrix(k), &q_exact, es));
        }
    }
    let d_prime = ctx.knots.d_prime();
    let max_class_ok = m_oracle == ctx.g.n() - d_prime
        && forests
            .by_arc_count
            .get(&m_oracle)
            .is_some_and(|fs| fs.iter().all(|f| f.tree_count() == d_prime));
    let forest_ok = forests.iter().all(|f| is_out_forest(forests.n, &f.arcs));
    vec![
        IdentityCheck::measured("oracle.sigma_k", sigma_gap, ORACLE_REL_TOL)
            .with_detail(format!("m = {}, oracle max arcs = {m_oracle}", stack.m())),
        IdentityCheck::measured("oracle.q_k", q_gap, ORACLE_REL_TOL),
        IdentityCheck::boolean(
            "oracle.column_sums_exact",
            exact_column_sums,
            "every column of oracle Q_k sums to sigma_k",
        ),
        IdentityCheck::boolean(
            "oracle.forest_invariant",
            forest_ok,
            format!("{} forests re-checked", forests.len()),
        ),
        IdentityCheck::boolean(
            "oracle.maximum_forests",
            max_class_ok,
            format!("maximum forests have n - d' arcs and d' = {d_prime} trees"),
        ),
    ]
}

/// Items 1 to 8 of the matrix identities satisfied by the forest matrices.
pub fn check_forest_identities(ctx: &Context) -> Vec<IdentityCheck> {
    let n = ctx.g.n();
    let stack = &ctx.stack;
    let l = &ctx.l.entries;
    let identity = Matrix::identity(n, n);
    let j = &ctx.jbar;
    let scale = 1.0 + ctx.l.max_diagonal();
    let mut out = Vec::new();

    // 1: column stochasticity of J_k, J, J(tau) and J_bar.
    let mut col_gap = 0.0_f64;
    let mut consider = |m: &Matrix| {
        for s in column_sums(m) {
            col_gap = col_gap.max((s - 1.0).abs());
        }
    };
    for k in 0..=stack.m() {
        consider(stack.j_matrix(k));
    }
    let (q_total, sigma_total) = stack.total();
    consider(&(q_total / sigma_total));
    for tau in PARAMETRIC_TAUS {
        consider(&normalized_mixture(stack, tau));
    }
    consider(j);
    let negative = (0..=stack.m()).map(|k| stack.j_matrix(k).min()).fold(0.0_f64, f64::min);
    out.push(
        IdentityCheck::measured("forest.column_stochastic", col_gap, COLUMN_SUM_TOL)
            .with_detail(format!("most negative J_k entry {negative:e}")),
    );

    // 2: J(tau) (I + tau L) = I, sigma(tau) = det(I + tau L), Q(tau) = adj(I + tau L).
    let mut route_gap = 0.0_f64;
    let mut failure = None;
    for tau in PARAMETRIC_TAUS {
        match parametric_matrices(stack, &ctx.l, tau) {
            Ok(p) => {
                let shifted = &identity + l * tau;
                let det = shifted.clone().determinant();
                route_gap = route_gap.max((p.sigma_tau - det).abs() / det.abs());
                if let Some(inv) = shifted.try_inverse() {
                    let adj = inv * det;
                    route_gap = route_gap.max(max_abs_diff(&p.q_tau, &adj) / max_abs(&adj).max(1.0));
                    route_gap = route_gap.max(max_abs_diff(&p.j_tau, &(&adj / det)));
                }
            }
            Err(e) => failure = Some(e),
        }
    }
    out.push(match failure {
        Some(e) => IdentityCheck::failed("forest.matrix_forest_theorem", &e),
        None => IdentityCheck::measured("forest.matrix_forest_theorem", route_gap, IDENTITY_TOL)
            .with_detail("tau in {0.1, 1, 10}"),
    });

    // 3: L J_bar = J_bar L = 0.
    let annihilation = max_abs(&(l * j)).max(max_abs(&(j * l)));
    out.push(IdentityCheck::measured(
        "forest.annihilation",
        annihilation,
        IDENTITY_TOL * scale,
    ));

    // 4: idempotence.
    out.push(IdentityCheck::measured(
        "forest.idempotent",
        max_abs_diff(&(j * j), j),
        IDENTITY_TOL,
    ));

    // 5: (I + tau L)^{-1} approaches J_bar.
    let mut distances = Vec::new();
    for e in 1..=LIMIT_TAU.log10().round() as i32 {
        let tau = 10f64.powi(e);
        let inv = (&identity + l * tau).try_inverse().unwrap_or_else(|| identity.clone());
        distances.push(max_abs_diff(&inv, j));
    }
    let monotone = distances.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let last = *distances.last().expect("six distances");
    let limit = if ctx.g.is_unit_weighted() {
        IdentityCheck::measured("forest.limit", last, LIMIT_TOL)
    } else {
        IdentityCheck::measured("forest.limit", last, f64::INFINITY)
    };
    out.push(if monotone {
        limit.with_detail("distance non-increasing over tau = 1e1..1e6")
    } else {
        IdentityCheck::boolean("forest.limit", false, format!("not monotone: {distances:?}"))
    });

    // 6: ranks.
    let d_prime = stack.forest_dimension();
    let rank_j = numeric_rank(j, RANK_TOL);
    let rank_l = numeric_rank(l, RANK_TOL);
    out.push(IdentityCheck::boolean(
        "forest.ranks",
        rank_j == d_prime && rank_l == n - d_prime,
        format!("rank(J_bar) = {rank_j}, rank(L) = {rank_l}, d' = {d_prime}"),
    ));

    // 7: Q_k = sum sigma_{k-i} (-L)^i.
    let mut power_gap = 0.0_f64;
    for k in 0..=stack.m() {
        match qk_via_powers(stack, &ctx.l, k) {
            Ok(q) => {
                power_gap = power_gap.max(max_abs_diff(&q, &stack.q_matrix(k)) / stack.sigma(k));
            }
            Err(_) => power_gap = f64::INFINITY,
        }
    }
    out.push(IdentityCheck::measured("forest.power_series", power_gap, IDENTITY_TOL));

    // 8: eigenprojection for eigenvalue 0 (index 1): J_bar v = v on its range,
    // L J_bar = 0, and L + J_bar nonsingular.
    let eig_gap = j
        .column_iter()
        .map(|v| (j * v - v).amax())
        .fold(0.0_f64, f64::max);
    let full_rank = numeric_rank(&(l + j), RANK_TOL) == n;
    out.push(
        IdentityCheck::measured("forest.eigenprojection", eig_gap.max(annihilation), IDENTITY_TOL * scale)
            .with_detail(format!("L + J_bar nonsingular: {full_rank}")),
    );
    if !full_rank {
        out.last_mut().expect("pushed").status = CheckStatus::Fail;
    }

    // Forest-digraph Laplacians L_k.
    out.push(match forest_digraph_laplacians(stack, &ctx.l) {
        Ok(layers) => IdentityCheck::boolean(
            "forest.forest_digraph_laplacians",
            layers.len() == stack.m(),
            format!("{} layers", layers.len()),
        ),
        Err(e) => IdentityCheck::failed("forest.forest_digraph_laplacians", &e),
    });
    out
}

/// Source-knot structure of `J_bar`.
pub fn check_knot_structure(ctx: &Context) -> Vec<IdentityCheck> {
    let n = ctx.g.n();
    let j = &ctx.jbar;
    let knots = &ctx.knots;
    let mut out = Vec::new();

    let pattern = top_reachability(&jbar(&ctx.stack)).entries;
    let support_ok = (0..n).all(|i| {
        (0..n).all(|c| pattern[(i, c)] == u8::from(knots.contains(i) && ctx.reach[(i, c)] == 1))
    });
    out.push(IdentityCheck::boolean(
        "knots.support",
        support_ok,
        "J_bar_ij != 0 exactly when i is in a source knot and reaches j",
    ));

    let mut k_plus_gap = 0.0_f64;
    for (s, knot) in knots.knots.iter().enumerate() {
        for &k in knot {
            for &c in &knots.exclusive_reach[s] {
                k_plus_gap = k_plus_gap.max((j[(k, c)] - j[(k, k)]).abs());
            }
        }
    }
    out.push(IdentityCheck::measured("knots.exclusive_reach", k_plus_gap, KNOT_TOL));

    let mut diag_gap = 0.0_f64;
    for knot in &knots.knots {
        let s: f64 = knot.iter().map(|&k| j[(k, k)]).sum();
        diag_gap = diag_gap.max((s - 1.0).abs());
    }
    out.push(IdentityCheck::measured("knots.diagonal_sums", diag_gap, KNOT_TOL));

    let mut ratio_gap = 0.0_f64;
    for knot in &knots.knots {
        for &a in knot {
            for &b in knot {
                for c in 0..n {
                    ratio_gap = ratio_gap.max((j[(b, c)] * j[(a, a)] - j[(a, c)] * j[(b, b)]).abs());
                }
            }
        }
    }
    out.push(IdentityCheck::measured("knots.proportional_rows", ratio_gap, KNOT_TOL));

    let from_jbar = knots_from_jbar(&jbar(&ctx.stack));
    out.push(IdentityCheck::boolean(
        "knots.from_jbar",
        from_jbar.knots == knots.knots && from_jbar.exclusive_reach == knots.exclusive_reach,
        format!("{} knots", knots.d_prime()),
    ));

    // Diagonal inside a knot equals the share of spanning trees of the knot
    // diverging from each vertex.
    if knots.knots.iter().all(|k| k.len() <= DEFAULT_VERTEX_LIMIT) {
        let mut gap = 0.0_f64;
        let mut error = None;
        for knot in &knots.knots {
            match out_tree_weights(ctx.g, knot) {
                Ok(t) => {
                    let total: BigRational = t.iter().cloned().sum();
                    for (idx, &k) in knot.iter().enumerate() {
                        let expected = r2f(&(t[idx].clone() / total.clone()));
                        gap = gap.max((j[(k, k)] - expected).abs());
                    }
                }
                Err(e) => error = Some(e),
            }
        }
        out.push(match error {
            Some(e) => IdentityCheck::failed("knots.tree_weights", &e),
            None => IdentityCheck::measured("knots.tree_weights", gap, KNOT_TOL),
        });
    } else {
        out.push(IdentityCheck::skipped("knots.tree_weights", "knot too large to enumerate"));
    }
    out
}

/// Reachability read off `J(tau)`, the top layers, and the exact threshold test.
pub fn check_reachability(ctx: &Context) -> Vec<IdentityCheck> {
    let g = ctx.g;
    let mut out = Vec::new();
    let mut bad_taus = Vec::new();
    for tau in REACH_TAUS {
        match reachability_from_jtau(g, tau) {
            Ok(r) if r == ctx.reach => {}
            _ => bad_taus.push(tau),
        }
    }
    out.push(IdentityCheck::boolean(
        "reach.jtau",
        bad_taus.is_empty(),
        if bad_taus.is_empty() {
            "sgn J(tau) = R for tau in {0.01, 1, 100}".to_string()
        } else {
            format!("mismatch at tau {bad_taus:?}")
        },
    ));
    out.push(IdentityCheck::boolean(
        "reach.top_layers",
        reachability_from_top_layers(&ctx.stack) == ctx.reach,
        "sgn(J_(d') + J_(d'+1)) = R",
    ));
    let n = g.n();
    let structural_top = crate::matrix::BinaryMatrix::from_fn(n, n, |i, j| {
        u8::from(ctx.knots.contains(i) && ctx.reach[(i, j)] == 1)
    });
    let top = top_reachability(&jbar(&ctx.stack)).entries;
    out.push(IdentityCheck::boolean(
        "reach.top",
        top == structural_top,
        "sgn J_bar = top reachability",
    ));
    out.push(if g.is_unit_weighted() && n <= EXACT_THRESHOLD_LIMIT.min(EXACT_LIMIT) {
        match approx_top_reachability(g) {
            Ok(r) => IdentityCheck::boolean(
                "reach.exact_threshold",
                r.entries == top,
                "exact J(sigma^2) >= 1/sigma pattern = sgn J_bar",
            ),
            Err(e) => IdentityCheck::failed("reach.exact_threshold", &e),
        }
    } else {
        IdentityCheck::skipped(
            "reach.exact_threshold",
            format!("needs unit weights and n <= {EXACT_THRESHOLD_LIMIT}"),
        )
    });
    out
}

/// Every simple path extends, together with each maximum out-forest, to a
/// forest with `n - d'` or `n - d' - 1` arcs containing the path.
pub fn check_path_extension(ctx: &Context, forests: &ForestSet) -> IdentityCheck {
    let g = ctx.g;
    let n = g.n();
    if n > PATH_CHECK_LIMIT {
        return IdentityCheck::skipped("paths.extend_to_forest", format!("n > {PATH_CHECK_LIMIT}"));
    }
    let max_arcs = n - ctx.knots.d_prime();
    let maximum: Vec<_> = forests
        .by_arc_count
        .get(&max_arcs)
        .cloned()
        .unwrap_or_default();
    let mut checked = 0usize;
    for i in 0..n {
        for t in 0..n {
            if ctx.reach[(i, t)] == 0 {
                continue;
            }
            for path in simple_paths(g, i, t) {
                for f_max in &maximum {
                    checked += 1;
                    let ok = match extend_path_to_forest(g, &path, f_max) {
                        Ok(f) => {
                            let count = f.arcs.len();
                            is_out_forest(n, &f.arcs)
                                && (count == max_arcs || count + 1 == max_arcs)
                                && path.windows(2).all(|w| f.contains_arc(w[0], w[1]))
                        }
                        Err(_) => false,
                    };
                    if !ok {
                        return IdentityCheck::boolean(
                            "paths.extend_to_forest",
                            false,
                            format!("path {:?}", path.iter().map(|v| v + 1).collect::<Vec<_>>()),
                        );
                    }
                }
            }
        }
    }
    IdentityCheck::boolean(
        "paths.extend_to_forest",
        true,
        format!("{checked} (path, maximum forest) pairs"),
    )
}

/// Cesàro limits for two admissible `alpha` and the uniform-start distribution.
pub fn check_markov(ctx: &Context) -> Vec<IdentityCheck> {
    let g = ctx.g;
    let mut out = Vec::new();
    let base = default_alpha(g);
    let mut worst = 0.0_f64;
    let mut error = None;
    let mut last_cesaro = None;
    for alpha in [base, 0.5 * base] {
        let run = inverse_corresponding_chain(g, Some(alpha))
            .and_then(|chain| cesaro_limit(&chain, DEFAULT_CESARO_TOL, DEFAULT_T_MAX))
            .and_then(|c| {
                let check = verify_tree_theorem(g, &c)?;
                Ok((c, check))
            });
        match run {
            Ok((c, check)) => {
                worst = worst.max(check.max_deviation);
                last_cesaro = Some(c);
            }
            Err(e) => error = Some(e),
        }
    }
    out.push(match error {
        Some(e) => IdentityCheck::failed("markov.cesaro_equals_jbar_transpose", &e),
        None => IdentityCheck::measured("markov.cesaro_equals_jbar_transpose", worst, TREE_THEOREM_TOL)
            .with_detail("alpha = default and default/2"),
    });
    out.push(match (uniform_start_distribution(g), mean_score(g)) {
        (Ok(x), Ok(s)) => {
            let mut gap = x
                .iter()
                .zip(&s.values)
                .fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()));
            if let Some(c) = &last_cesaro {
                let via_chain = crate::markov::uniform_start_from_cesaro(c);
                gap = gap.max(
                    x.iter()
                        .zip(&via_chain)
                        .fold(0.0_f64, |a, (p, q)| a.max((p - q).abs())),
                );
            }
            IdentityCheck::measured("markov.uniform_start", gap, MEAN_SCORE_TOL)
        }
        (Err(e), _) | (_, Err(e)) => IdentityCheck::failed("markov.uniform_start", &e),
    });
    out
}

/// Score basis and tree-count scores.
pub fn check_ranking(ctx: &Context) -> Vec<IdentityCheck> {
    let g = ctx.g;
    let n = g.n();
    let l = &ctx.l.entries;
    let mut out = Vec::new();
    match score_basis(g) {
        Ok(b) => {
            let mut null = 0.0_f64;
            let mut dots = 0.0_f64;
            for (a, v) in b.columns.iter().enumerate() {
                let x = nalgebra::DVector::from_column_slice(v);
                null = null.max((l * x).amax());
                for w in &b.columns[a + 1..] {
                    dots = dots.max(v.iter().zip(w).map(|(p, q)| p * q).sum::<f64>().abs());
                }
            }
            let dim_ok = b.columns.len() == ctx.knots.d_prime()
                && b.columns.len() == n - numeric_rank(l, RANK_TOL);
            out.push(IdentityCheck::measured("ranking.basis_nullspace", null, NULLSPACE_TOL));
            out.push(IdentityCheck::measured("ranking.basis_orthogonal", dots, ORTHOGONALITY_TOL));
            out.push(IdentityCheck::boolean(
                "ranking.basis_dimension",
                dim_ok,
                format!("{} vectors", b.columns.len()),
            ));
            let mut closed = 0.0_f64;
            let mut error = None;
            for s in 0..b.representatives.len() {
                let knot = &ctx.knots.knots[s];
                match out_tree_weights(g, knot) {
                    Ok(t) => {
                        let total: BigRational = t.iter().cloned().sum();
                        for (row, value) in b.columns[s].iter().enumerate() {
                            let expected = knot
                                .iter()
                                .position(|&v| v == row)
                                .map(|p| r2f(&(t[p].clone() / total.clone())))
                                .unwrap_or(0.0);
                            closed = closed.max((value - expected).abs());
                        }
                    }
                    Err(e) => error = Some(e),
                }
            }
            out.push(match error {
                Some(e) => IdentityCheck::failed("ranking.basis_closed_form", &e),
                None => IdentityCheck::measured("ranking.basis_closed_form", closed, NULLSPACE_TOL),
            });
        }
        Err(e) => out.push(IdentityCheck::failed("ranking.basis_nullspace", &e)),
    }
    out.push(match daniels_scores_strong(g) {
        Err(Error::NotStrong { .. }) => {
            IdentityCheck::skipped("ranking.daniels", "digraph is not strongly connected")
        }
        Err(e) => IdentityCheck::failed("ranking.daniels", &e),
        Ok(t) => {
            let mut gap = 0.0_f64;
            for c in ctx.jbar.column_iter() {
                for (x, y) in c.iter().zip(&t.values) {
                    gap = gap.max((x - y).abs());
                }
            }
            match out_tree_weights(g, &(0..n).collect::<Vec<_>>()) {
                Ok(w) => {
                    let total: BigRational = w.iter().cloned().sum();
                    for (x, y) in w.iter().zip(&t.values) {
                        gap = gap.max((r2f(&(x.clone() / total.clone())) - y).abs());
                    }
                    IdentityCheck::measured("ranking.daniels", gap, KNOT_TOL)
                }
                Err(e) => IdentityCheck::failed("ranking.daniels", &e),
            }
        }
    });
    out
}

/// `p^in_ij(g) = p^out_ji(reverse g)`, and both against in-forest enumeration.
pub fn check_duality(ctx: &Context, in_forests: Option<&ForestSet>) -> IdentityCheck {
    let g = ctx.g;
    let rev = reverse(g);
    let mut gap = 0.0_f64;
    for tau in DUALITY_TAUS {
        let (Ok(pin), Ok(pout_rev)) = (in_accessibility(g, tau), out_accessibility(&rev, tau)) else {
            return IdentityCheck::boolean("accessibility.duality", false, "measure failed");
        };
        gap = gap.max(max_abs_diff(&pin.entries, &pout_rev.entries.transpose()));
        if let Some(fs) = in_forests {
            let expected = oracle_in_measure(fs, tau);
            gap = gap.max(max_abs_diff(&pin.entries, &expected));
        }
    }
    IdentityCheck::measured("accessibility.duality", gap, IDENTITY_TOL).with_detail(
        if in_forests.is_some() {
            "also checked against in-forest enumeration"
        } else {
            "construction only"
        },
    )
}

/// `p^in_ij`: weight share of in-forests, with arc weights scaled by `tau`,
/// in which `i` lies in the tree converging to `j`. `tau = inf` keeps the
/// maximum in-forests only.
pub fn oracle_in_measure(fs: &ForestSet, tau: Tau) -> Matrix {
    let n = fs.n;
    let mut num = vec![BigRational::zero(); n * n];
    let mut den = BigRational::zero();
    let m = fs.max_arc_count();
    let scale = |k: usize| -> Option<BigRational> {
        match tau {
            Tau::Finite(t) => {
                let t = BigRational::from_float(t).expect("finite tau");
                Some(num_traits::pow(t, k))
            }
            Tau::Infinite => (k == m).then(|| BigRational::from_integer(1.into())),
        }
    };
    for (&k, forests) in &fs.by_arc_count {
        let Some(factor) = scale(k) else { continue };
        for f in forests {
            let w = &f.weight * &factor;
            den += &w;
            for i in 0..n {
                num[i * n + f.root_of[i]] += &w;
            }
        }
    }
    Matrix::from_fn(n, n, |i, j| r2f(&(num[i * n + j].clone() / den.clone())))
}

/// Runs every check applicable to `g`. Enumeration-based checks need
/// `n <= 8`.
pub fn verify_digraph(g: &Digraph) -> Result<VerificationReport> {
    let ctx = Context::new(g)?;
    let mut checks = Vec::new();
    let forests = if g.n() <= DEFAULT_VERTEX_LIMIT {
        Some(enumerate_out_forests(g)?)
    } else {
        None
    };
    match &forests {
        Some(fs) => checks.extend(check_oracle(&ctx, fs)),
        None => checks.push(IdentityCheck::skipped(
            "oracle.sigma_k",
            format!("n > {DEFAULT_VERTEX_LIMIT}"),
        )),
    }
    checks.extend(check_forest_identities(&ctx));
    checks.extend(check_knot_structure(&ctx));
    checks.extend(check_reachability(&ctx));
    if let Some(fs) = &forests {
        checks.push(check_path_extension(&ctx, fs));
    }
    checks.extend(check_markov(&ctx));
    checks.extend(check_ranking(&ctx));
    let in_forests = if g.n() <= PATH_CHECK_LIMIT {
        Some(enumerate_in_forests(g)?)
    } else {
        None
    };
    checks.push(check_duality(&ctx, in_forests.as_ref()));
    Ok(VerificationReport { n: g.n(), checks })
}
