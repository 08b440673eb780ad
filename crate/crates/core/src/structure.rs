//! Reachability and source knots read off forest matrices.

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::digraph::{Digraph, SourceKnotSet};
use crate::error::{Error, Result};
use crate::exact::{RationalMatrix, EXACT_LIMIT};
use crate::forest::{forest_stack, jbar, normalized_mixture, ForestMatrixStack, MaxForestMatrix};
use crate::matrix::{max_abs, sign_pattern, sign_pattern_relative, BinaryMatrix, SIGN_REL_TOL};

/// `r_ij = 1` iff `i` lies in a source knot and `j` is reachable from `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopReachabilityMatrix {
    pub entries: BinaryMatrix,
}

/// Positivity threshold for `J(tau)`.
///
/// A pair `(i, j)` with `j` reachable from `i` has `J_ij(tau) >= w(P) tau^|P| / sigma(tau)`
/// for a path `P`, which is at least `min(1, tau w_min)^(n-1) / sigma(tau)`.
/// Unreachable pairs are exact zeros of the recurrence. The threshold is the
/// smaller of the relative cut `1e-9 * max` and half that lower bound.
pub fn jtau_sign_threshold(g: &Digraph, stack: &ForestMatrixStack, tau: f64, max_entry: f64) -> f64 {
    let w_min = g
        .arcs()
        .iter()
        .map(|a| a.weight)
        .fold(f64::INFINITY, f64::min)
        .min(1.0);
    let ln_sigma_tau = {
        let logs: Vec<f64> = (0..=stack.m())
            .map(|k| stack.ln_sigma(k) + k as f64 * tau.ln())
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        top + logs.iter().map(|c| (c - top).exp()).sum::<f64>().ln()
    };
    let ln_bound = (g.n() - 1) as f64 * (tau * w_min).min(1.0).ln() - ln_sigma_tau;
    (SIGN_REL_TOL * max_entry).min(0.5 * ln_bound.exp())
}

/// `R = sgn(J(tau))`.
pub fn reachability_from_jtau(g: &Digraph, tau: f64) -> Result<BinaryMatrix> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "tau",
            value: tau,
            range: "(0, inf)".into(),
        });
    }
    let stack = forest_stack(g)?;
    let j_tau = normalized_mixture(&stack, tau);
    let threshold = jtau_sign_threshold(g, &stack, tau, max_abs(&j_tau));
    Ok(sign_pattern(&j_tau, threshold))
}

/// `R = sgn(J_(d') + J_(d'+1))`, i.e. the two layers with the most arcs.
pub fn reachability_from_top_layers(stack: &ForestMatrixStack) -> BinaryMatrix {
    let m = stack.m();
    let sum = if m == 0 {
        stack.j_matrix(0).clone()
    } else {
        stack.j_matrix(m) + stack.j_matrix(m - 1)
    };
    sign_pattern_relative(&sum)
}

/// `R_hat = sgn(J_bar)`.
pub fn top_reachability(jbar: &MaxForestMatrix) -> TopReachabilityMatrix {
    TopReachabilityMatrix {
        entries: sign_pattern_relative(&jbar.jbar),
    }
}

/// Source knots as classes of the mutual top reachability relation
/// `J_bar_ij * J_bar_ji != 0`.
pub fn knots_from_jbar(jbar: &MaxForestMatrix) -> SourceKnotSet {
    let r = top_reachability(jbar).entries;
    let n = r.nrows();
    let mut assigned = vec![false; n];
    let mut knots: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if assigned[i] || r[(i, i)] == 0 {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| r[(i, j)] == 1 && r[(j, i)] == 1).collect();
        for &v in &class {
            assigned[v] = true;
        }
        knots.push(class);
    }
    let exclusive_reach = (0..knots.len())
        .map(|a| {
            (0..n)
                .filter(|&j| {
                    r[(knots[a][0], j)] == 1
                        && (0..knots.len()).all(|b| b == a || r[(knots[b][0], j)] == 0)
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

/// Top reachability of a unit-weight digraph from a single exact inverse:
/// with `sigma = det(I + L)` and `tau = sigma^2`, `r_ij = 0` iff
/// `J_ij(tau) < 1 / sigma`.
pub fn approx_top_reachability(g: &Digraph) -> Result<TopReachabilityMatrix> {
    if !g.is_unit_weighted() {
        return Err(Error::Precondition("all arc weights must equal 1".into()));
    }
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(Error::Precondition(format!(
            "exact arithmetic limited to n <= {EXACT_LIMIT}, got {n}"
        )));
    }
    let l = RationalMatrix::column_laplacian(g);
    let identity = RationalMatrix::identity(n);
    let sigma = identity.add(&l).determinant();
    let tau = &sigma * &sigma;
    let shifted = identity.add(&l.scale(&tau));
    let inverse = shifted
        .inverse()
        .ok_or_else(|| Error::Precondition("I + tau L is singular".into()))?;
    let threshold = BigRational::one() / &sigma;
    let entries = BinaryMatrix::from_fn(n, n, |i, j| u8::from(inverse[(i, j)] >= threshold));
    debug_assert!(inverse_is_nonnegative(&inverse));
    Ok(TopReachabilityMatrix { entries })
}

fn inverse_is_nonnegative(m: &RationalMatrix) -> bool {
    (0..m.n()).all(|i| (0..m.n()).all(|j| !m[(i, j)].is_negative()))
}

/// Convenience: top reachability straight from a digraph's forest stack.
pub fn top_reachability_of(stack: &ForestMatrixStack) -> TopReachabilityMatrix {
    top_reachability(&jbar(stack))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{load_digraph, reachability_bfs};

    fn bin(n: usize, vals: &[u8]) -> BinaryMatrix {
        BinaryMatrix::from_row_slice(n, n, vals)
    }

    fn p3() -> Digraph {
        load_digraph("3\n1 2\n2 3").unwrap()
    }

    fn two_sources() -> Digraph {
        load_digraph("3\n1 3\n2 3").unwrap()
    }

    fn cycle2() -> Digraph {
        load_digraph("2\n1 2\n2 1").unwrap()
    }

    #[test]
    fn jtau_reachability_examples() {
        let g = p3();
        assert_eq!(
            reachability_from_jtau(&g, 1.0).unwrap(),
            bin(3, &[1, 1, 1, 0, 1, 1, 0, 0, 1])
        );
        let c = cycle2();
        assert_eq!(reachability_from_jtau(&c, 1.0).unwrap(), bin(2, &[1, 1, 1, 1]));
        let e = Digraph::edgeless(3).unwrap();
        assert_eq!(reachability_from_jtau(&e, 5.0).unwrap(), BinaryMatrix::identity(3, 3));
        assert!(reachability_from_jtau(&g, 0.0).is_err());
    }

    #[test]
    fn small_tau_long_path_still_positive() {
        let g = load_digraph("6\n1 2 0.5\n2 3 0.5\n3 4 0.5\n4 5 0.5\n5 6 0.5").unwrap();
        assert_eq!(reachability_from_jtau(&g, 0.01).unwrap(), reachability_bfs(&g));
    }

    #[test]
    fn top_layer_examples() {
        let s = forest_stack(&p3()).unwrap();
        assert_eq!(reachability_from_top_layers(&s), bin(3, &[1, 1, 1, 0, 1, 1, 0, 0, 1]));
        let s = forest_stack(&two_sources()).unwrap();
        assert_eq!(reachability_from_top_layers(&s), bin(3, &[1, 0, 1, 0, 1, 1, 0, 0, 1]));
        let s = forest_stack(&Digraph::edgeless(3).unwrap()).unwrap();
        assert_eq!(reachability_from_top_layers(&s), BinaryMatrix::identity(3, 3));
    }

    #[test]
    fn top_reachability_examples() {
        let s = forest_stack(&p3()).unwrap();
        assert_eq!(top_reachability_of(&s).entries, bin(3, &[1, 1, 1, 0, 0, 0, 0, 0, 0]));
        let s = forest_stack(&cycle2()).unwrap();
        assert_eq!(top_reachability_of(&s).entries, bin(2, &[1, 1, 1, 1]));
        let s = forest_stack(&two_sources()).unwrap();
        assert_eq!(top_reachability_of(&s).entries, bin(3, &[1, 0, 1, 0, 1, 1, 0, 0, 0]));
    }

    #[test]
    fn knots_from_jbar_examples() {
        let s = forest_stack(&cycle2()).unwrap();
        assert_eq!(knots_from_jbar(&jbar(&s)).knots, vec![vec![0, 1]]);
        let s = forest_stack(&two_sources()).unwrap();
        let k = knots_from_jbar(&jbar(&s));
        assert_eq!(k.knots, vec![vec![0], vec![1]]);
        assert_eq!(k.exclusive_reach, vec![vec![0], vec![1]]);
        let s = forest_stack(&Digraph::edgeless(4).unwrap()).unwrap();
        assert_eq!(knots_from_jbar(&jbar(&s)).knots.len(), 4);
    }

    #[test]
    fn exact_threshold_examples() {
        assert_eq!(
            approx_top_reachability(&p3()).unwrap().entries,
            bin(3, &[1, 1, 1, 0, 0, 0, 0, 0, 0])
        );
        assert_eq!(
            approx_top_reachability(&Digraph::edgeless(3).unwrap()).unwrap().entries,
            BinaryMatrix::identity(3, 3)
        );
        assert_eq!(approx_top_reachability(&cycle2()).unwrap().entries, bin(2, &[1, 1, 1, 1]));
        let weighted = load_digraph("2\n1 2 2").unwrap();
        assert!(approx_top_reachability(&weighted).is_err());
    }
}
