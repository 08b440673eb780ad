//! Markov chains inversely corresponding to digraphs, their Cesàro limits,
//! and the Monte-Carlo model of information dissemination along forests.
//!
//! A chain `P` inversely corresponds to `g` when `I - P = alpha L^T`: the
//! transition `j -> i` has probability `alpha w_ij`, running against the
//! arc `(i, j)`. Its Cesàro limit equals `J_bar^T`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::forest::{forest_stack, jbar, normalized_mixture};
use crate::laplacian::column_laplacian;
use crate::matrix::{max_abs_diff, Matrix};
use crate::oracle::enumerate_out_forests;

/// Default stopping tolerance of [`cesaro_limit`].
pub const DEFAULT_CESARO_TOL: f64 = 1e-8;

/// Default cap on the averaging horizon of [`cesaro_limit`].
pub const DEFAULT_T_MAX: u64 = 1 << 50;

/// Accepted deviation between the Cesàro limit and `J_bar^T`.
pub const TREE_THEOREM_TOL: f64 = 1e-6;

/// Trials simulated per independent generator stream.
pub const TRIALS_PER_BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    /// Row-stochastic transition matrix.
    pub transition: Matrix,
    pub alpha: f64,
}

impl MarkovChain {
    pub fn n(&self) -> usize {
        self.transition.nrows()
    }
}

/// Largest admissible `alpha`, `1 / max_i l_ii` (infinite for an edgeless digraph).
pub fn max_alpha(g: &Digraph) -> f64 {
    1.0 / column_laplacian(g).max_diagonal()
}

pub fn default_alpha(g: &Digraph) -> f64 {
    1.0 / (1.0 + column_laplacian(g).max_diagonal())
}

/// `P = I - alpha L^T`, with each diagonal entry completing its row to 1.
pub fn inverse_corresponding_chain(g: &Digraph, alpha: Option<f64>) -> Result<MarkovChain> {
    let upper = max_alpha(g);
    let alpha = alpha.unwrap_or_else(|| default_alpha(g));
    if !(alpha > 0.0) || alpha > upper || !alpha.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            range: format!("(0, {upper}]"),
        });
    }
    let n = g.n();
    let lt = column_laplacian(g).entries.transpose();
    let mut p = Matrix::identity(n, n) - lt * alpha;
    for j in 0..n {
        let off: f64 = (0..n).filter(|&i| i != j).map(|i| p[(j, i)]).sum();
        p[(j, j)] = 1.0 - off;
    }
    Ok(MarkovChain {
        transition: p,
        alpha,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CesaroLimit {
    pub matrix: Matrix,
    /// Averaging horizon `T` of the returned matrix.
    pub iterations: u64,
    /// `max |A_T - A_{T/2}|`.
    pub residual: f64,
}

/// Cesàro average `A_T = (1/T) sum_{t<T} P^t`, doubling `T` through
/// `A_{2T} = (A_T + P^T A_T) / 2` and `P^{2T} = (P^T)^2` until successive
/// averages differ by less than `tol`.
///
/// The running average converges like `1/T`, so doubling reaches tight
/// tolerances in a few dozen matrix products where step-by-step averaging
/// would need `T ~ 1/tol` of them.
pub fn cesaro_limit(chain: &MarkovChain, tol: f64, t_max: u64) -> Result<CesaroLimit> {
    if !(tol > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)".into(),
        });
    }
    if t_max < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "t_max",
            value: t_max as f64,
            range: "[2, inf)".into(),
        });
    }
    let n = chain.n();
    let mut avg = Matrix::identity(n, n);
    let mut power = chain.transition.clone();
    let mut t: u64 = 1;
    let mut residual = f64::INFINITY;
    while t <= t_max / 2 {
        let next = (&avg + &power * &avg) * 0.5;
        residual = max_abs_diff(&next, &avg);
        avg = next;
        t *= 2;
        if residual < tol {
            return Ok(CesaroLimit {
                matrix: avg,
                iterations: t,
                residual,
            });
        }
        power = &power * &power;
        normalize_rows(&mut power);
    }
    Err(Error::NoConvergence {
        residual,
        iterations: t,
    })
}

/// A row-sum error `e` in `P^T` becomes `2e` in `(P^T)^2`; rescaling keeps
/// repeated squaring from amplifying rounding.
fn normalize_rows(m: &mut Matrix) {
    for mut row in m.row_iter_mut() {
        let s = row.sum();
        row /= s;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeTheoremCheck {
    pub holds: bool,
    pub max_deviation: f64,
}

/// Compares the Cesàro limit with `J_bar^T`.
pub fn verify_tree_theorem(g: &Digraph, cesaro: &CesaroLimit) -> Result<TreeTheoremCheck> {
    let stack = forest_stack(g)?;
    let expected = jbar(&stack).jbar.transpose();
    if expected.shape() != cesaro.matrix.shape() {
        return Err(Error::Precondition("chain and digraph sizes differ".into()));
    }
    let max_deviation = max_abs_diff(&expected, &cesaro.matrix);
    Ok(TreeTheoremCheck {
        holds: max_deviation < TREE_THEOREM_TOL,
        max_deviation,
    })
}

/// Limiting state distribution from the uniform start, `(1/n) J_bar 1`.
pub fn uniform_start_distribution(g: &Digraph) -> Result<Vec<f64>> {
    let stack = forest_stack(g)?;
    let j = jbar(&stack).jbar;
    let n = g.n() as f64;
    Ok(j.row_iter().map(|r| r.sum() / n).collect())
}

/// The same distribution read off a Cesàro matrix, `(1/n) 1^T C`.
pub fn uniform_start_from_cesaro(cesaro: &CesaroLimit) -> Vec<f64> {
    let n = cesaro.matrix.nrows() as f64;
    cesaro.matrix.column_iter().map(|c| c.sum() / n).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisseminationEstimate {
    /// `estimate[(i, j)]`: share of successful trials in which `j` received
    /// the information from root `i`.
    pub estimate: Matrix,
    pub trials: u64,
    pub successes: u64,
    pub seed: u64,
}

impl DisseminationEstimate {
    /// Largest `|estimate - J| / sqrt(J (1 - J) / successes)` over entries
    /// with `0 < J < 1`, and the largest absolute deviation on the others.
    pub fn standardized_deviation(&self, j: &Matrix) -> (f64, f64) {
        let s = self.successes.max(1) as f64;
        let mut z_max = 0.0_f64;
        let mut degenerate = 0.0_f64;
        for (e, &x) in self.estimate.iter().zip(j.iter()) {
            let var = x * (1.0 - x) / s;
            if var > 0.0 {
                z_max = z_max.max((e - x).abs() / var.sqrt());
            } else {
                degenerate = degenerate.max((e - x).abs());
            }
        }
        (z_max, degenerate)
    }
}

/// Plans are spanning out-forests chosen uniformly; a plan succeeds when
/// every arc transmits, which arc `(i, j)` does with probability `w_ij`.
/// On success each vertex records the root of its tree. The conditional
/// frequencies converge to `J = Q / sigma` at `tau = 1`.
///
/// Trials are split into blocks of [`TRIALS_PER_BLOCK`], block `b` drawing
/// from stream `b` of a ChaCha8 generator seeded with `seed`, so the result
/// does not depend on the thread count.
pub fn dissemination_estimate(g: &Digraph, trials: u64, seed: u64) -> Result<DisseminationEstimate> {
    if trials == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "trials",
            value: 0.0,
            range: "[1, inf)".into(),
        });
    }
    if !g.has_probability_weights() {
        return Err(Error::Precondition("arc weights must lie in (0, 1]".into()));
    }
    let forests = enumerate_out_forests(g)?;
    let plans: Vec<(Vec<f64>, Vec<usize>)> = forests
        .iter()
        .map(|f| {
            let probs = f.arcs.iter().map(|&(t, h)| g.weight(t, h)).collect();
            (probs, f.root_of.clone())
        })
        .collect();
    let n = g.n();
    let blocks = trials.div_ceil(TRIALS_PER_BLOCK);
    let (counts, successes) = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let size = TRIALS_PER_BLOCK.min(trials - b * TRIALS_PER_BLOCK);
            let mut counts = vec![0u64; n * n];
            let mut successes = 0u64;
            for _ in 0..size {
                let (probs, roots) = &plans[rng.random_range(0..plans.len())];
                // Draw every arc so the stream position does not depend on outcomes.
                let failed = probs.iter().filter(|&&p| rng.random::<f64>() >= p).count();
                if failed == 0 {
                    successes += 1;
                    for (j, &root) in roots.iter().enumerate() {
                        counts[root * n + j] += 1;
                    }
                }
            }
            (counts, successes)
        })
        .reduce(
            || (vec![0u64; n * n], 0u64),
            |(mut a, sa), (b, sb)| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                (a, sa + sb)
            },
        );
    let denom = successes.max(1) as f64;
    let estimate = Matrix::from_fn(n, n, |i, j| counts[i * n + j] as f64 / denom);
    Ok(DisseminationEstimate {
        estimate,
        trials,
        successes,
        seed,
    })
}

/// `J = J(1)`, the target of [`dissemination_estimate`].
pub fn dissemination_target(g: &Digraph) -> Result<Matrix> {
    Ok(normalized_mixture(&forest_stack(g)?, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::load_digraph;
    use approx::assert_relative_eq;

    fn p3() -> Digraph {
        load_digraph("3\n1 2\n2 3").unwrap()
    }

    fn m(n: usize, v: &[f64]) -> Matrix {
        Matrix::from_row_slice(n, n, v)
    }

    #[test]
    fn chain_examples() {
        let c = inverse_corresponding_chain(&p3(), Some(1.0)).unwrap();
        assert_eq!(c.transition, m(3, &[1., 0., 0., 1., 0., 0., 0., 1., 0.]));
        let e = Digraph::edgeless(3).unwrap();
        assert_eq!(
            inverse_corresponding_chain(&e, Some(3.0)).unwrap().transition,
            Matrix::identity(3, 3)
        );
        let c2 = load_digraph("2\n1 2\n2 1").unwrap();
        let d = inverse_corresponding_chain(&c2, None).unwrap();
        assert_eq!(d.alpha, 0.5);
        assert_eq!(d.transition, m(2, &[0.5, 0.5, 0.5, 0.5]));
        assert!(inverse_corresponding_chain(&p3(), Some(1.5)).is_err());
        assert!(inverse_corresponding_chain(&p3(), Some(0.0)).is_err());
    }

    #[test]
    fn transition_runs_against_arcs() {
        let g = load_digraph("3\n1 2 0.5\n3 2 2\n2 1 1").unwrap();
        let c = inverse_corresponding_chain(&g, None).unwrap();
        let l = column_laplacian(&g).entries;
        for i in 0..3 {
            assert_relative_eq!(c.transition.row(i).sum(), 1.0, epsilon = 1e-15);
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 } - c.alpha * l[(j, i)];
                assert!((c.transition[(i, j)] - target).abs() <= 1e-12);
                if i != j {
                    assert_relative_eq!(c.transition[(j, i)], c.alpha * g.weight(i, j));
                }
            }
        }
    }

    #[test]
    fn cesaro_examples() {
        let c = cesaro_limit(&inverse_corresponding_chain(&p3(), Some(1.0)).unwrap(), 1e-10, DEFAULT_T_MAX)
            .unwrap();
        assert_relative_eq!(c.matrix, m(3, &[1., 0., 0., 1., 0., 0., 1., 0., 0.]), epsilon = 1e-9);
        let c2 = load_digraph("2\n1 2\n2 1").unwrap();
        let c = cesaro_limit(&inverse_corresponding_chain(&c2, None).unwrap(), 1e-10, DEFAULT_T_MAX).unwrap();
        assert_relative_eq!(c.matrix, m(2, &[0.5; 4]), epsilon = 1e-9);
        let id = MarkovChain {
            transition: Matrix::identity(3, 3),
            alpha: 1.0,
        };
        let c = cesaro_limit(&id, 1e-10, DEFAULT_T_MAX).unwrap();
        assert_eq!(c.matrix, Matrix::identity(3, 3));
        assert!(cesaro_limit(&id, 0.0, 10).is_err());
        assert!(cesaro_limit(&id, 1e-3, 1).is_err());
    }

    #[test]
    fn cesaro_reports_non_convergence() {
        let g = load_digraph("3\n1 2\n2 3").unwrap();
        let chain = inverse_corresponding_chain(&g, None).unwrap();
        assert!(matches!(
            cesaro_limit(&chain, 1e-12, 8),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn tree_theorem_examples() {
        for text in ["3\n1 2\n2 3", "2\n1 2\n2 1", "3", "3\n1 3\n2 3", "4\n1 2 0.5\n2 1 2\n3 2\n4 3 0.5"] {
            let g = load_digraph(text).unwrap();
            let chain = inverse_corresponding_chain(&g, None).unwrap();
            let c = cesaro_limit(&chain, DEFAULT_CESARO_TOL, DEFAULT_T_MAX).unwrap();
            let check = verify_tree_theorem(&g, &c).unwrap();
            assert!(check.holds, "{text}: {}", check.max_deviation);
        }
    }

    #[test]
    fn uniform_start_examples() {
        let close = |a: Vec<f64>, b: &[f64]| {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert_relative_eq!(*x, *y, epsilon = 1e-12);
            }
        };
        close(uniform_start_distribution(&p3()).unwrap(), &[1.0, 0.0, 0.0]);
        close(
            uniform_start_distribution(&load_digraph("3\n1 3\n2 3").unwrap()).unwrap(),
            &[0.5, 0.5, 0.0],
        );
        close(uniform_start_distribution(&Digraph::edgeless(4).unwrap()).unwrap(), &[0.25; 4]);
        let chain = inverse_corresponding_chain(&p3(), None).unwrap();
        let c = cesaro_limit(&chain, 1e-10, DEFAULT_T_MAX).unwrap();
        let via_chain = uniform_start_from_cesaro(&c);
        for (a, b) in via_chain.iter().zip(uniform_start_distribution(&p3()).unwrap()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn dissemination_on_unit_path() {
        let est = dissemination_estimate(&p3(), 20_000, 7).unwrap();
        // Unit weights: every plan succeeds.
        assert_eq!(est.successes, 20_000);
        assert_eq!(est.estimate[(0, 0)], 1.0);
        let j = dissemination_target(&p3()).unwrap();
        let (z, degenerate) = est.standardized_deviation(&j);
        assert!(z < 4.0, "z = {z}");
        assert_eq!(degenerate, 0.0);
        assert_eq!(dissemination_estimate(&p3(), 20_000, 7).unwrap(), est);
    }

    #[test]
    fn dissemination_rejects_heavy_weights() {
        let g = load_digraph("2\n1 2 2").unwrap();
        assert!(dissemination_estimate(&g, 10, 1).is_err());
        assert!(dissemination_estimate(&p3(), 0, 1).is_err());
    }
}
