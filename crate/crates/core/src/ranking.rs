//! Scores from preference digraphs: the solution space of `L x = 0`, the
//! mean score, tree-count scores for strong digraphs and the generalized
//! Borda score.

use std::str::FromStr;

use crate::digraph::{source_knots, strong_components, Digraph};
use crate::error::{Error, Result};
use crate::forest::{forest_stack, jbar, normalized_mixture};
use crate::laplacian::{column_laplacian, degrees, DegreeKind};
use crate::matrix::Matrix;

/// `max |L v|` accepted for a solution of `L x = 0`.
pub const NULLSPACE_TOL: f64 = 1e-9;

/// Largest accepted dot product between distinct basis vectors.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Relative gap below which two scores are tied.
pub const TIE_TOL: f64 = 1e-10;

/// One `J_bar` column per source knot: an orthogonal basis of the
/// nonnegative solutions of `L x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreBasis {
    pub columns: Vec<Vec<f64>>,
    /// Knot `s` of column `s`, in the order of [`source_knots`].
    pub knot_index: Vec<usize>,
    /// Vertex `j_s` whose `J_bar` column was taken.
    pub representatives: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMethod {
    MeanJbar,
    GeneralizedBorda,
    Daniels,
}

impl ScoreMethod {
    pub fn name(self) -> &'static str {
        match self {
            ScoreMethod::MeanJbar => "mean-jbar",
            ScoreMethod::GeneralizedBorda => "borda",
            ScoreMethod::Daniels => "daniels",
        }
    }
}

impl FromStr for ScoreMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-jbar" | "mean" => Ok(ScoreMethod::MeanJbar),
            "borda" | "generalized-borda" => Ok(ScoreMethod::GeneralizedBorda),
            "daniels" => Ok(ScoreMethod::Daniels),
            other => Err(Error::Precondition(format!(
                "method must be mean-jbar, borda or daniels, got '{other}'"
            ))),
        }
    }
}

/// Out-minus-in degrees used by the generalized Borda score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BordaDegrees {
    /// Sums of arc weights.
    Weighted,
    /// Arc counts.
    Count,
}

impl BordaDegrees {
    pub fn name(self) -> &'static str {
        match self {
            BordaDegrees::Weighted => "weighted",
            BordaDegrees::Count => "count",
        }
    }
}

impl FromStr for BordaDegrees {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted" => Ok(BordaDegrees::Weighted),
            "count" => Ok(BordaDegrees::Count),
            other => Err(Error::Precondition(format!(
                "degrees must be 'weighted' or 'count', got '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub values: Vec<f64>,
    pub method: ScoreMethod,
    pub tau: Option<f64>,
}

fn l_times(l: &Matrix, v: &[f64]) -> f64 {
    let x = nalgebra::DVector::from_column_slice(v);
    (l * x).amax()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Columns of `J_bar` at the lowest-numbered vertex of each source knot.
/// Each column is checked to solve `L x = 0`, and the columns to be
/// pairwise orthogonal.
pub fn score_basis(g: &Digraph) -> Result<ScoreBasis> {
    let knots = source_knots(g);
    let representatives: Vec<usize> = knots.knots.iter().map(|k| k[0]).collect();
    score_basis_at(g, &representatives)
}

/// [`score_basis`] with a chosen representative per knot.
pub fn score_basis_at(g: &Digraph, representatives: &[usize]) -> Result<ScoreBasis> {
    let knots = source_knots(g);
    if representatives.len() != knots.d_prime() {
        return Err(Error::Precondition(format!(
            "need one representative for each of the {} source knots",
            knots.d_prime()
        )));
    }
    let mut knot_index = Vec::with_capacity(representatives.len());
    for (s, &j) in representatives.iter().enumerate() {
        if knots.knot_of(j) != Some(s) {
            return Err(Error::Precondition(format!(
                "vertex {} is not in source knot {}",
                j + 1,
                s + 1
            )));
        }
        knot_index.push(s);
    }
    let j = jbar(&forest_stack(g)?).jbar;
    let l = column_laplacian(g).entries;
    let columns: Vec<Vec<f64>> = representatives
        .iter()
        .map(|&c| j.column(c).iter().copied().collect())
        .collect();
    let scale = 1.0 + l.amax();
    for v in &columns {
        let r = l_times(&l, v);
        if r > NULLSPACE_TOL * scale {
            return Err(Error::IdentityViolated {
                identity: "L x = 0 for a J_bar column",
                deviation: r,
                tolerance: NULLSPACE_TOL * scale,
            });
        }
    }
    for a in 0..columns.len() {
        for b in a + 1..columns.len() {
            let d = dot(&columns[a], &columns[b]).abs();
            if d > ORTHOGONALITY_TOL {
                return Err(Error::IdentityViolated {
                    identity: "orthogonality of J_bar columns from distinct knots",
                    deviation: d,
                    tolerance: ORTHOGONALITY_TOL,
                });
            }
        }
    }
    Ok(ScoreBasis {
        columns,
        knot_index,
        representatives: representatives.to_vec(),
    })
}

/// `x = (1/n) J_bar 1`: nonnegative, sums to 1, zero outside the source knots.
pub fn mean_score(g: &Digraph) -> Result<ScoreVector> {
    let j = jbar(&forest_stack(g)?).jbar;
    let n = g.n() as f64;
    Ok(ScoreVector {
        values: j.row_iter().map(|r| r.sum() / n).collect(),
        method: ScoreMethod::MeanJbar,
        tau: None,
    })
}

/// For a strong digraph, `t_j` = the `(j, j)` cofactor of `L`, which by the
/// matrix-tree theorem is the weight of spanning trees diverging from `j`;
/// normalized to sum 1.
pub fn daniels_scores_strong(g: &Digraph) -> Result<ScoreVector> {
    let comps = strong_components(g);
    if comps.components.len() != 1 {
        return Err(Error::NotStrong {
            knots: source_knots(g).d_prime(),
            components: comps.components.len(),
        });
    }
    let l = column_laplacian(g).entries;
    let n = g.n();
    let t: Vec<f64> = (0..n)
        .map(|j| l.clone().remove_row(j).remove_column(j).determinant())
        .collect();
    let total: f64 = t.iter().sum();
    Ok(ScoreVector {
        values: t.iter().map(|x| x / total).collect(),
        method: ScoreMethod::Daniels,
        tau: None,
    })
}

/// Undirected counterpart: `w'_ij = w'_ji = w_ij + w_ji`.
pub fn symmetrized(g: &Digraph) -> Result<Digraph> {
    let n = g.n();
    let w = g.weight_matrix();
    let arcs: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && (g.has_arc(i, j) || g.has_arc(j, i)))
        .map(|(i, j)| (i, j, w[(i, j)] + w[(j, i)]))
        .collect();
    Digraph::new(n, arcs)
}

/// `J'(tau) (od - id)` with `J'` the parametric forest matrix of the
/// symmetrized digraph.
pub fn generalized_borda(g: &Digraph, tau: f64, kind: BordaDegrees) -> Result<ScoreVector> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "tau",
            value: tau,
            range: "(0, inf)".into(),
        });
    }
    let (out_kind, in_kind) = match kind {
        BordaDegrees::Weighted => (DegreeKind::WeightedOut, DegreeKind::WeightedIn),
        BordaDegrees::Count => (DegreeKind::CountOut, DegreeKind::CountIn),
    };
    let od = degrees(g, out_kind).values;
    let id = degrees(g, in_kind).values;
    let diff = nalgebra::DVector::from_iterator(g.n(), od.iter().zip(&id).map(|(o, i)| o - i));
    let j = normalized_mixture(&forest_stack(&symmetrized(g)?)?, tau);
    Ok(ScoreVector {
        values: (j * diff).iter().copied().collect(),
        method: ScoreMethod::GeneralizedBorda,
        tau: Some(tau),
    })
}

/// Vertices by descending score, ties (within `1e-10` of the largest
/// magnitude, measured from the group's first member) grouped together and
/// ordered by vertex id.
pub fn rank_order(scores: &[f64]) -> Vec<Vec<usize>> {
    let scale = scores.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let tol = TIE_TOL * scale;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for v in order {
        match groups.last_mut() {
            Some(group) if scores[group[0]] - scores[v] <= tol => group.push(v),
            _ => groups.push(vec![v]),
        }
    }
    for group in &mut groups {
        group.sort_unstable();
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::load_digraph;
    use approx::assert_relative_eq;

    fn close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn basis_examples() {
        let b = score_basis(&load_digraph("3\n1 3\n2 3").unwrap()).unwrap();
        assert_eq!(b.representatives, vec![0, 1]);
        close(&b.columns[0], &[1.0, 0.0, 0.0]);
        close(&b.columns[1], &[0.0, 1.0, 0.0]);
        let b = score_basis(&load_digraph("2\n1 2\n2 1").unwrap()).unwrap();
        assert_eq!(b.columns.len(), 1);
        close(&b.columns[0], &[0.5, 0.5]);
        let b = score_basis(&Digraph::edgeless(3).unwrap()).unwrap();
        assert_eq!(b.columns.len(), 3);
        for (s, c) in b.columns.iter().enumerate() {
            let mut e = vec![0.0; 3];
            e[s] = 1.0;
            close(c, &e);
        }
    }

    #[test]
    fn basis_rejects_foreign_representative() {
        let g = load_digraph("3\n1 3\n2 3").unwrap();
        assert!(score_basis_at(&g, &[2, 1]).is_err());
        assert!(score_basis_at(&g, &[0]).is_err());
    }

    #[test]
    fn mean_score_examples() {
        close(&mean_score(&load_digraph("3\n1 2\n2 3").unwrap()).unwrap().values, &[1., 0., 0.]);
        close(&mean_score(&load_digraph("3\n1 3\n2 3").unwrap()).unwrap().values, &[0.5, 0.5, 0.]);
        close(&mean_score(&load_digraph("2\n1 2\n2 1").unwrap()).unwrap().values, &[0.5, 0.5]);
    }

    #[test]
    fn daniels_examples() {
        close(&daniels_scores_strong(&load_digraph("2\n1 2\n2 1").unwrap()).unwrap().values, &[0.5, 0.5]);
        close(
            &daniels_scores_strong(&load_digraph("3\n1 2\n2 3\n3 1").unwrap()).unwrap().values,
            &[1.0 / 3.0; 3],
        );
        assert!(matches!(
            daniels_scores_strong(&load_digraph("3\n1 2\n2 3").unwrap()),
            Err(Error::NotStrong { knots: 1, components: 3 })
        ));
    }

    #[test]
    fn borda_examples() {
        let c2 = load_digraph("2\n1 2\n2 1").unwrap();
        close(&generalized_borda(&c2, 1.0, BordaDegrees::Weighted).unwrap().values, &[0.0, 0.0]);
        let s = generalized_borda(&load_digraph("3\n1 2\n2 3").unwrap(), 1.0, BordaDegrees::Weighted)
            .unwrap()
            .values;
        assert_relative_eq!(s[0], -s[2], epsilon = 1e-12);
        assert!(s[0] > 0.0);
        let e = Digraph::edgeless(3).unwrap();
        close(&generalized_borda(&e, 2.0, BordaDegrees::Count).unwrap().values, &[0.0; 3]);
        assert!(generalized_borda(&e, 0.0, BordaDegrees::Count).is_err());
    }

    #[test]
    fn symmetrized_sums_both_directions() {
        let g = load_digraph("3\n1 2 2\n2 1 0.5\n2 3").unwrap();
        let s = symmetrized(&g).unwrap();
        assert_eq!(s.weight(0, 1), 2.5);
        assert_eq!(s.weight(1, 0), 2.5);
        assert_eq!(s.weight(2, 1), 1.0);
    }

    #[test]
    fn rank_order_examples() {
        assert_eq!(rank_order(&[0.5, 0.5, 0.0]), vec![vec![0, 1], vec![2]]);
        assert_eq!(rank_order(&[1.0, 0.0, 0.0]), vec![vec![0], vec![1, 2]]);
        assert_eq!(rank_order(&[0.0; 4]), vec![vec![0, 1, 2, 3]]);
        assert_eq!(rank_order(&[0.1, 0.3, 0.2]), vec![vec![1], vec![2], vec![0]]);
    }
}
