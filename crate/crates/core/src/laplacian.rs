//! Column and row Laplacian matrices and degree vectors.

use crate::digraph::Digraph;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Zero column sums; diagonal is the weighted in-degree.
    Column,
    /// Zero row sums; diagonal is the weighted out-degree.
    Row,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    pub entries: Matrix,
    pub orientation: Orientation,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest diagonal entry, the natural scale of the matrix.
    pub fn max_diagonal(&self) -> f64 {
        self.entries.diagonal().iter().cloned().fold(0.0, f64::max)
    }
}

/// `l_ij = -w_ij` off the diagonal; the diagonal is the negated off-diagonal
/// column sum, so every column sums to zero.
pub fn column_laplacian(g: &Digraph) -> LaplacianMatrix {
    let n = g.n();
    let mut entries = -g.weight_matrix().clone();
    for j in 0..n {
        let off: f64 = (0..n).filter(|&i| i != j).map(|i| entries[(i, j)]).sum();
        entries[(j, j)] = -off;
    }
    LaplacianMatrix {
        entries,
        orientation: Orientation::Column,
    }
}

/// Same off-diagonal entries as [`column_laplacian`], diagonal chosen for zero row sums.
pub fn row_laplacian(g: &Digraph) -> LaplacianMatrix {
    let n = g.n();
    let mut entries = -g.weight_matrix().clone();
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| entries[(i, j)]).sum();
        entries[(i, i)] = -off;
    }
    LaplacianMatrix {
        entries,
        orientation: Orientation::Row,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    WeightedIn,
    WeightedOut,
    CountIn,
    CountOut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeVector {
    pub values: Vec<f64>,
    pub kind: DegreeKind,
}

pub fn degrees(g: &Digraph, kind: DegreeKind) -> DegreeVector {
    let mut values = vec![0.0; g.n()];
    for a in g.arcs() {
        match kind {
            DegreeKind::WeightedIn => values[a.head] += a.weight,
            DegreeKind::WeightedOut => values[a.tail] += a.weight,
            DegreeKind::CountIn => values[a.head] += 1.0,
            DegreeKind::CountOut => values[a.tail] += 1.0,
        }
    }
    DegreeVector { values, kind }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::load_digraph;
    use crate::matrix::{column_sums, row_sums};
    use proptest::prelude::*;

    #[test]
    fn column_laplacian_examples() {
        let p3 = load_digraph("3\n1 2\n2 3").unwrap();
        let l = column_laplacian(&p3).entries;
        assert_eq!(
            l,
            Matrix::from_row_slice(3, 3, &[0., -1., 0., 0., 1., -1., 0., 0., 1.])
        );
        let c2 = load_digraph("2\n1 2\n2 1").unwrap();
        assert_eq!(
            column_laplacian(&c2).entries,
            Matrix::from_row_slice(2, 2, &[1., -1., -1., 1.])
        );
        let e = Digraph::edgeless(3).unwrap();
        assert_eq!(column_laplacian(&e).entries, Matrix::zeros(3, 3));
    }

    #[test]
    fn row_laplacian_examples() {
        let p3 = load_digraph("3\n1 2\n2 3").unwrap();
        assert_eq!(
            row_laplacian(&p3).entries,
            Matrix::from_row_slice(3, 3, &[1., -1., 0., 0., 1., -1., 0., 0., 0.])
        );
        let c2 = load_digraph("2\n1 2\n2 1").unwrap();
        assert_eq!(row_laplacian(&c2).entries, column_laplacian(&c2).entries);
        assert_eq!(
            row_laplacian(&Digraph::edgeless(4).unwrap()).entries,
            Matrix::zeros(4, 4)
        );
    }

    #[test]
    fn degree_examples() {
        let p3 = load_digraph("3\n1 2\n2 3").unwrap();
        assert_eq!(degrees(&p3, DegreeKind::WeightedOut).values, vec![1., 1., 0.]);
        assert_eq!(degrees(&p3, DegreeKind::WeightedIn).values, vec![0., 1., 1.]);
        let c2 = load_digraph("2\n1 2 2.5\n2 1 2.5").unwrap();
        let od = degrees(&c2, DegreeKind::WeightedOut).values;
        let id = degrees(&c2, DegreeKind::WeightedIn).values;
        assert_eq!(od.iter().zip(&id).map(|(a, b)| a - b).collect::<Vec<_>>(), vec![0., 0.]);
        assert_eq!(degrees(&c2, DegreeKind::CountOut).values, vec![1., 1.]);
    }

    fn arb_digraph() -> impl Strategy<Value = Digraph> {
        (2usize..7).prop_flat_map(|n| {
            proptest::collection::vec(proptest::option::of(1u32..40), n * n).prop_map(move |ws| {
                let arcs = ws.into_iter().enumerate().filter_map(|(idx, w)| {
                    let (i, j) = (idx / n, idx % n);
                    w.filter(|_| i != j).map(|w| (i, j, f64::from(w) / 8.0))
                });
                Digraph::new(n, arcs.collect::<Vec<_>>()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn zero_sums_and_degree_diagonals(g in arb_digraph()) {
            let col = column_laplacian(&g);
            let row = row_laplacian(&g);
            for s in column_sums(&col.entries) {
                prop_assert!(s.abs() <= 1e-12 * (1.0 + col.max_diagonal()));
            }
            for s in row_sums(&row.entries) {
                prop_assert!(s.abs() <= 1e-12 * (1.0 + row.max_diagonal()));
            }
            let id = degrees(&g, DegreeKind::WeightedIn).values;
            let od = degrees(&g, DegreeKind::WeightedOut).values;
            for i in 0..g.n() {
                prop_assert!((col.entries[(i, i)] - id[i]).abs() < 1e-12);
                prop_assert!((row.entries[(i, i)] - od[i]).abs() < 1e-12);
                for j in 0..g.n() {
                    if i != j {
                        prop_assert!(col.entries[(i, j)] <= 0.0);
                        prop_assert_eq!(col.entries[(i, j)], row.entries[(i, j)]);
                    }
                }
            }
            let det = col.entries.clone().determinant();
            let norm = col.entries.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
            prop_assert!(det.abs() <= 1e-9 * (1.0 + norm.powi(g.n() as i32)));
        }
    }
}
