//! Exact rational matrices: fraction-free determinant and inverse, and the
//! forest recurrence run without rounding.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::digraph::{rational_to_f64, Digraph};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Largest vertex count accepted by exact-arithmetic routines.
pub const EXACT_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![BigRational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Exact column Laplacian of `g`.
    pub fn column_laplacian(g: &Digraph) -> Self {
        let mut m = Self::zeros(g.n());
        for a in g.arcs() {
            m[(a.tail, a.head)] = -a.exact.clone();
            m[(a.head, a.head)] += &a.exact;
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn trace(&self) -> BigRational {
        (0..self.n).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn to_f64(&self) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| rational_to_f64(&self[(i, j)]))
    }

    /// Integer matrix `D * self` with `D` the lcm of all denominators.
    fn to_integer_scaled(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let denom = self
            .data
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let rows = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let x = &self[(i, j)];
                        x.numer() * (&denom / x.denom())
                    })
                    .collect()
            })
            .collect();
        (rows, denom)
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> BigRational {
        let (a, denom) = self.to_integer_scaled();
        let det = bareiss_determinant(a);
        BigRational::new(det, num_traits::pow(denom, self.n))
    }

    /// Inverse by fraction-free Gauss-Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<Self> {
        let (a, denom) = self.to_integer_scaled();
        let (d, adj_like) = fraction_free_gauss_jordan(a)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = BigRational::new(&adj_like[i][j] * &denom, d.clone());
            }
        }
        Some(out)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.n + j]
    }
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Fraction-free Gauss-Jordan on `[A | I]`. Every division by the previous
/// pivot is exact. On return the left block equals `d * I`, so the right
/// block `T` satisfies `A^{-1} = T / d`.
fn fraction_free_gauss_jordan(a: Vec<Vec<BigInt>>) -> Option<(BigInt, Vec<Vec<BigInt>>)> {
    let n = a.len();
    let mut b: Vec<Vec<BigInt>> = a
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        if b[k][k].is_zero() {
            let r = (k + 1..n).find(|&r| !b[r][k].is_zero())?;
            b.swap(k, r);
        }
        let pivot_row = b[k].clone();
        let pivot = pivot_row[k].clone();
        for (i, row) in b.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in 0..2 * n {
                let num = &pivot * &row[j] - &factor * &pivot_row[j];
                debug_assert!((&num % &prev).is_zero(), "inexact Bareiss division");
                row[j] = num / &prev;
            }
        }
        prev = pivot;
    }
    let d = prev;
    let right = b.into_iter().map(|row| row[n..].to_vec()).collect();
    Some((d, right))
}

/// Forest matrices `Q_0..Q_m` and `sigma_0..sigma_m` in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactForestStack {
    pub sigmas: Vec<BigRational>,
    pub q_matrices: Vec<RationalMatrix>,
}

impl ExactForestStack {
    pub fn m(&self) -> usize {
        self.sigmas.len() - 1
    }

    pub fn forest_dimension(&self) -> usize {
        self.q_matrices[0].n() - self.m()
    }

    /// `J_bar = Q_m / sigma_m`.
    pub fn jbar(&self) -> RationalMatrix {
        let m = self.m();
        self.q_matrices[m].scale(&(BigRational::one() / &self.sigmas[m]))
    }
}

/// `Q_{k+1} = sigma_{k+1} I - L Q_k`, `sigma_{k+1} = tr(L Q_k) / (k + 1)`,
/// stopping at the first exactly zero `sigma`.
pub fn exact_forest_recurrence(g: &Digraph) -> Result<ExactForestStack> {
    let n = g.n();
    if n > EXACT_LIMIT {
        return Err(Error::Precondition(format!(
            "exact arithmetic limited to n <= {EXACT_LIMIT}, got {n}"
        )));
    }
    let l = RationalMatrix::column_laplacian(g);
    let mut sigmas = vec![BigRational::one()];
    let mut qs = vec![RationalMatrix::identity(n)];
    for k in 0..n {
        let lq = l.mul(&qs[k]);
        let sigma = lq.trace() / BigRational::from_integer(BigInt::from(k + 1));
        if sigma.is_zero() {
            break;
        }
        if sigma.is_negative() {
            return Err(Error::NumericalBreakdown {
                k: k + 1,
                ratio: rational_to_f64(&sigma),
            });
        }
        let next = RationalMatrix::identity(n)
            .scale(&sigma)
            .add(&lq.scale(&-BigRational::one()));
        sigmas.push(sigma);
        qs.push(next);
    }
    Ok(ExactForestStack {
        sigmas,
        q_matrices: qs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::load_digraph;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn determinant_and_inverse_of_small_matrix() {
        let mut m = RationalMatrix::zeros(3);
        let vals = [[2, -1, 0], [-1, 3, -1], [0, -1, 2]];
        for i in 0..3 {
            for j in 0..3 {
                m[(i, j)] = r(vals[i][j], 1);
            }
        }
        assert_eq!(m.determinant(), r(8, 1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RationalMatrix::identity(3));
    }

    #[test]
    fn inverse_with_pivoting_and_fractions() {
        let mut m = RationalMatrix::zeros(3);
        let vals = [(0, 1, 2), (1, 2, 3), (1, 0, 5)];
        for (i, &(a, b, c)) in vals.iter().enumerate() {
            m[(i, 0)] = r(a, 1);
            m[(i, 1)] = r(b, 3);
            m[(i, 2)] = r(c, 7);
        }
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RationalMatrix::identity(3));
        assert_eq!(inv.mul(&m), RationalMatrix::identity(3));

        let singular = RationalMatrix::zeros(2);
        assert!(singular.inverse().is_none());
        assert!(singular.determinant().is_zero());
    }

    #[test]
    fn exact_recurrence_on_path() {
        let g = load_digraph("3\n1 2\n2 3").unwrap();
        let s = exact_forest_recurrence(&g).unwrap();
        assert_eq!(s.sigmas, vec![r(1, 1), r(2, 1), r(1, 1)]);
        assert_eq!(s.forest_dimension(), 1);
        let jbar = s.jbar();
        assert_eq!(jbar[(0, 2)], r(1, 1));
        assert_eq!(jbar[(1, 1)], r(0, 1));
    }

    #[test]
    fn exact_recurrence_rejects_large_n() {
        let g = Digraph::edgeless(EXACT_LIMIT + 1).unwrap();
        assert!(exact_forest_recurrence(&g).is_err());
    }
}
