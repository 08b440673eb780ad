//! Forest matrices computed by linear algebra.
//!
//! `Q_k` holds the total weights of spanning out-forests with `k` arcs,
//! classified by (root, vertex) pairs: `q^k_ij` is the weight of forests in
//! which `j` lies in the tree diverging from `i`. `sigma_k` is the total
//! weight of all `k`-arc out-forests. The recurrence
//!
//! ```text
//! sigma_{k+1} = tr(L Q_k) / (k + 1)
//! Q_{k+1}     = sigma_{k+1} I - L Q_k
//! ```
//!
//! is run on the column-normalized matrices `J_k = Q_k / sigma_k` and the
//! ratios `rho_k = sigma_k / sigma_{k-1}`, because `sigma_k` grows
//! combinatorially:
//!
//! ```text
//! rho_{k+1} = tr(L J_k) / (k + 1)
//! J_{k+1}   = I - L J_k / rho_{k+1}
//! ```
//!
//! The last index `m` with `sigma_m != 0` gives the out-forest dimension
//! `d' = n - m` and the matrix of maximum out-forests `J_bar = J_m`.

use crate::digraph::{reverse, source_knots, Digraph};
use crate::error::{Error, Result};
use crate::laplacian::{column_laplacian, LaplacianMatrix};
use crate::matrix::{max_abs, max_abs_diff, Matrix};

/// `sigma_{k+1}` counts as zero once `rho_{k+1} <= ZERO_RATIO_TOL * n * scale`.
pub const ZERO_RATIO_TOL: f64 = 1e-12;

/// Rounding grows along the recurrence, so a ratio that is not below the
/// zero threshold still counts as zero when it and `L J_k` are both below
/// this relative bound.
pub const RESIDUAL_ZERO_TOL: f64 = 1e-8;

/// Tolerance for the two-route reconciliation of `J(tau) (I + tau L) = I`.
pub const ROUTE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ForestMatrixStack {
    n: usize,
    /// `ratios[k] = sigma_k / sigma_{k-1}`, `ratios[0] = 1`.
    ratios: Vec<f64>,
    /// `J_k = Q_k / sigma_k`.
    normalized: Vec<Matrix>,
}

impl ForestMatrixStack {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest `k` with `sigma_k != 0`.
    pub fn m(&self) -> usize {
        self.ratios.len() - 1
    }

    /// Algebraic out-forest dimension `n - m`.
    pub fn forest_dimension(&self) -> usize {
        self.n - self.m()
    }

    pub fn ratio(&self, k: usize) -> f64 {
        self.ratios[k]
    }

    pub fn ln_sigma(&self, k: usize) -> f64 {
        self.ratios[1..=k].iter().map(|r| r.ln()).sum()
    }

    pub fn sigma(&self, k: usize) -> f64 {
        self.ratios[1..=k].iter().product()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        (0..=self.m()).map(|k| self.sigma(k)).collect()
    }

    /// Normalized layer `J_k`.
    pub fn j_matrix(&self, k: usize) -> &Matrix {
        &self.normalized[k]
    }

    /// Unnormalized layer `Q_k = sigma_k J_k`.
    pub fn q_matrix(&self, k: usize) -> Matrix {
        &self.normalized[k] * self.sigma(k)
    }

    pub fn q_matrices(&self) -> Vec<Matrix> {
        (0..=self.m()).map(|k| self.q_matrix(k)).collect()
    }

    /// Matrix of all out-forests `Q = sum_k Q_k` and its normalization `J = Q / sigma`.
    pub fn total(&self) -> (Matrix, f64) {
        let q = self
            .q_matrices()
            .into_iter()
            .fold(Matrix::zeros(self.n, self.n), |acc, m| acc + m);
        let sigma = self.sigmas().iter().sum();
        (q, sigma)
    }
}

/// Runs the normalized recurrence on a column Laplacian.
pub fn forest_recurrence(l: &LaplacianMatrix) -> Result<ForestMatrixStack> {
    let n = l.n();
    let lm = &l.entries;
    let scale = l.max_diagonal();
    let threshold = ZERO_RATIO_TOL * n as f64 * scale;
    let identity = Matrix::identity(n, n);
    let mut ratios = vec![1.0];
    let mut normalized = vec![identity.clone()];

    for k in 0..n {
        let lj = lm * &normalized[k];
        let rho = lj.trace() / (k + 1) as f64;
        if rho.is_nan() {
            return Err(Error::NumericalBreakdown { k: k + 1, ratio: rho });
        }
        // sigma_{k+1} = 0 forces Q_{k+1} = -L Q_k = 0, so the residual must vanish too.
        let residual = max_abs(&lj);
        let vanishing = residual <= RESIDUAL_ZERO_TOL * (1.0 + scale);
        if rho <= threshold || (vanishing && rho.abs() <= RESIDUAL_ZERO_TOL * scale) {
            if !vanishing {
                return Err(Error::NumericalBreakdown { k: k + 1, ratio: rho });
            }
            return Ok(ForestMatrixStack {
                n,
                ratios,
                normalized,
            });
        }
        if k + 1 == n {
            // At least one tree always remains, so sigma_n = 0.
            return Err(Error::NumericalBreakdown { k: n, ratio: rho });
        }
        normalized.push(&identity - lj / rho);
        ratios.push(rho);
    }
    unreachable!("loop returns by k = n - 1")
}

/// Out-forest stack of `g`, with the algebraic dimension validated against
/// the structural source-knot count.
pub fn forest_stack(g: &Digraph) -> Result<ForestMatrixStack> {
    let stack = forest_recurrence(&column_laplacian(g))?;
    forest_dimension(&stack, g)?;
    Ok(stack)
}

/// `d' = n - m`, checked against the number of source knots.
pub fn forest_dimension(stack: &ForestMatrixStack, g: &Digraph) -> Result<usize> {
    let structural = source_knots(g).d_prime();
    let algebraic = stack.forest_dimension();
    if structural != algebraic {
        return Err(Error::DimensionMismatch {
            algebraic,
            structural,
        });
    }
    Ok(structural)
}

/// In-forest stack: the out-forest stack of the reversed digraph. Entry
/// `(i, j)` of its `Q_k`, transposed, is the weight of `k`-arc in-forests of
/// `g` in which `i` lies in the tree converging to `j`.
pub fn in_forest_stack(g: &Digraph) -> Result<ForestMatrixStack> {
    forest_stack(&reverse(g))
}

/// `Q(tau) = sum Q_k tau^k`, `sigma(tau) = sum sigma_k tau^k`, `J(tau) = Q(tau) / sigma(tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricForestMatrix {
    pub tau: f64,
    pub q_tau: Matrix,
    pub sigma_tau: f64,
    pub j_tau: Matrix,
}

/// Normalized mixture `sum_k p_k J_k` with `p_k proportional to sigma_k tau^k`,
/// evaluated in log space.
pub(crate) fn normalized_mixture(stack: &ForestMatrixStack, tau: f64) -> Matrix {
    let logs: Vec<f64> = (0..=stack.m())
        .map(|k| stack.ln_sigma(k) + k as f64 * tau.ln())
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|c| (c - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .enumerate()
        .fold(Matrix::zeros(stack.n, stack.n), |acc, (k, w)| {
            acc + stack.j_matrix(k) * (w / total)
        })
}

pub fn parametric_matrices(
    stack: &ForestMatrixStack,
    l: &LaplacianMatrix,
    tau: f64,
) -> Result<ParametricForestMatrix> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "tau",
            value: tau,
            range: "(0, inf)".into(),
        });
    }
    let n = stack.n;
    let j_tau = normalized_mixture(stack, tau);
    let sigma_tau: f64 = (0..=stack.m())
        .map(|k| (stack.ln_sigma(k) + k as f64 * tau.ln()).exp())
        .sum();
    let q_tau = &j_tau * sigma_tau;

    let shifted = Matrix::identity(n, n) + &l.entries * tau;
    let residual = max_abs_diff(&(&j_tau * &shifted), &Matrix::identity(n, n));
    let tolerance = ROUTE_TOL * (1.0 + tau * l.max_diagonal());
    if residual > tolerance {
        return Err(Error::IdentityViolated {
            identity: "J(tau) (I + tau L) = I",
            deviation: residual,
            tolerance,
        });
    }
    Ok(ParametricForestMatrix {
        tau,
        q_tau,
        sigma_tau,
        j_tau,
    })
}

/// Column-stochastic idempotent `J_bar = Q_m / sigma_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxForestMatrix {
    pub jbar: Matrix,
}

pub fn jbar(stack: &ForestMatrixStack) -> MaxForestMatrix {
    MaxForestMatrix {
        jbar: stack.j_matrix(stack.m()).clone(),
    }
}

/// `Q_k = sum_{i=0}^{k} sigma_{k-i} (-L)^i`.
pub fn qk_via_powers(stack: &ForestMatrixStack, l: &LaplacianMatrix, k: usize) -> Result<Matrix> {
    if k > stack.m() {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: stack.m(),
        });
    }
    let n = stack.n;
    let neg_l = -&l.entries;
    let mut power = Matrix::identity(n, n);
    let mut sum = Matrix::zeros(n, n);
    for i in 0..=k {
        sum += &power * stack.sigma(k - i);
        power = &power * &neg_l;
    }
    Ok(sum)
}

/// Laplacians `L_k = sigma_k I - Q_k` of the digraphs of `k`-arc out-forests,
/// `k = 1..=m`, checked against `L_{k+1} = L Q_k`, `tr(L_k) = k sigma_k` and
/// `L_{k+1} = L (tr(L_k)/k I - L_k)`.
pub fn forest_digraph_laplacians(
    stack: &ForestMatrixStack,
    l: &LaplacianMatrix,
) -> Result<Vec<Matrix>> {
    let n = stack.n;
    let identity = Matrix::identity(n, n);
    let layers: Vec<Matrix> = (0..=stack.m())
        .map(|k| &identity * stack.sigma(k) - stack.q_matrix(k))
        .collect();
    for k in 1..=stack.m() {
        let scale = 1.0 + max_abs(&layers[k]) + stack.sigma(k);
        let tolerance = ROUTE_TOL * scale;
        let check = |identity: &'static str, deviation: f64| {
            if deviation > tolerance {
                Err(Error::IdentityViolated {
                    identity,
                    deviation,
                    tolerance,
                })
            } else {
                Ok(())
            }
        };
        let via_q = &l.entries * stack.q_matrix(k - 1);
        check("L_{k+1} = L Q_k", max_abs_diff(&layers[k], &via_q))?;
        check(
            "tr(L_k) = k sigma_k",
            (layers[k].trace() - k as f64 * stack.sigma(k)).abs(),
        )?;
        if k >= 2 {
            let prev = &layers[k - 1];
            let inner = &identity * (prev.trace() / (k - 1) as f64) - prev;
            check(
                "L_{k+1} = L (tr(L_k)/k I - L_k)",
                max_abs_diff(&layers[k], &(&l.entries * inner)),
            )?;
        }
    }
    Ok(layers.into_iter().skip(1).collect())
}

/// `(I + alpha J_bar)^{-1}` for `0 < alpha < sigma_m / sigma_{m-1}`; since
/// `J_bar` is idempotent the result must equal `I - alpha/(1+alpha) J_bar`.
pub fn dense_forest_matrix(
    jbar: &MaxForestMatrix,
    alpha: f64,
    stack: &ForestMatrixStack,
) -> Result<Matrix> {
    let upper = if stack.m() == 0 {
        f64::INFINITY
    } else {
        stack.ratio(stack.m())
    };
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            range: format!("(0, {upper})"),
        });
    }
    let n = stack.n;
    let identity = Matrix::identity(n, n);
    let inverse = (&identity + &jbar.jbar * alpha)
        .try_inverse()
        .ok_or_else(|| Error::Precondition("I + alpha J_bar is singular".into()))?;
    let closed = &identity - &jbar.jbar * (alpha / (1.0 + alpha));
    let deviation = max_abs_diff(&inverse, &closed);
    if deviation > ROUTE_TOL {
        return Err(Error::IdentityViolated {
            identity: "(I + alpha J_bar)^{-1} = I - alpha/(1+alpha) J_bar",
            deviation,
            tolerance: ROUTE_TOL,
        });
    }
    Ok(inverse)
}
