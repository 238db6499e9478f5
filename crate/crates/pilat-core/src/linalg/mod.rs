//! Exact dense linear algebra: characteristic polynomials, kernels and left
//! eigenpairs. Everything here is generic over the scalar; the invariant
//! pipeline instantiates it with arbitrary-precision rationals so there is no
//! floating-point rounding anywhere on the exact path.

pub mod approx;
pub mod roots;

use num_traits::Zero;
use thiserror::Error;

use crate::num::scalar::Scalar;
use crate::poly::UniPoly;
use crate::Rat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("divisor enumeration budget exceeded while factoring {value} (budget {budget})")]
    DivisorExplosion { value: String, budget: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a.clone() * b.clone();
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    /// `A - c*I`.
    pub fn sub_scaled_identity(&self, c: &T) -> Self {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            let v = out[(i, i)].clone() - c.clone();
            out[(i, i)] = v;
        }
        out
    }

    /// Row covector times matrix.
    pub fn vec_mat(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if !a.is_zero() {
                    let prod = v[i].clone() * a.clone();
                    out[j] += prod;
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mat_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![T::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if !a.is_zero() && !v[j].is_zero() {
                    let prod = a.clone() * v[j].clone();
                    out[i] += prod;
                }
            }
        }
        out
    }

    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut out = Matrix::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    fn trace(&self) -> T {
        let mut t = T::zero();
        for i in 0..self.rows {
            t += self[(i, i)].clone();
        }
        t
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Strongly connected components of the nonzero pattern, in topological order
/// of the condensation. Splitting along them turns the matrix into a block
/// triangular form whose characteristic polynomial factors block by block.
fn scc_blocks<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| !a[(i, j)].is_zero()).collect())
        .collect();
    crate::graph::scc_topological(&adj)
}

/// Characteristic polynomial `det(lambda*I - A)`, monic of degree n.
///
/// The matrix is first split along the strongly connected components of its
/// nonzero pattern (lifted loop matrices are block triangular across degree
/// strata, so this keeps the Faddeev-LeVerrier recursion on small blocks).
pub fn char_poly<T: Scalar>(a: &Matrix<T>) -> UniPoly<T> {
    assert!(a.is_square(), "char_poly needs a square matrix");
    let mut acc = UniPoly::constant(T::one());
    for block in scc_blocks(a) {
        let sub = a.submatrix(&block);
        acc = acc.mul(&char_poly_dense(&sub));
    }
    acc
}

/// Faddeev-LeVerrier recursion; exact over any field of characteristic zero.
fn char_poly_dense<T: Scalar>(a: &Matrix<T>) -> UniPoly<T> {
    let n = a.nrows();
    if n == 0 {
        return UniPoly::constant(T::one());
    }
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        let prod = a.mul(&m);
        let c = -(prod.trace() / T::from_int(k as i64));
        coeffs[n - k] = c.clone();
        m = prod;
        for i in 0..n {
            m[(i, i)] += c.clone();
        }
    }
    UniPoly::new(coeffs)
}

/// Basis of `ker(A) = {v : A v = 0}` via exact Gauss-Jordan elimination.
/// Returns an empty list iff `A` is injective. Vectors are deterministic:
/// one per free column, unit entry at that column.
pub fn kernel_basis<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<T>> {
    let rows = a.nrows();
    let cols = a.ncols();
    let mut m = a.clone();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let tmp = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = tmp;
            }
        }
        let inv = m[(r, c)].clone();
        for j in c..cols {
            let v = m[(r, j)].clone() / inv.clone();
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for j in c..cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == rows {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for f in 0..cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![T::zero(); cols];
        v[f] = T::one();
        for &(pr, pc) in &pivots {
            v[pc] = -m[(pr, f)].clone();
        }
        basis.push(v);
    }
    basis
}

/// Left eigenpair: a rational eigenvalue with a normalized basis of
/// `ker(A^t - lambda*I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: Rat,
    pub left_space: Vec<Vec<Rat>>,
}

/// All rational eigenvalues of a rational matrix, found by the rational root
/// theorem on the (block-factored) characteristic polynomial.
pub fn rational_eigenvalues(a: &Matrix<Rat>) -> Result<Vec<Rat>, LinalgError> {
    assert!(a.is_square());
    let mut values: Vec<Rat> = Vec::new();
    for block in scc_blocks(a) {
        let sub = a.submatrix(&block);
        let cp = char_poly_dense(&sub);
        for root in roots::rational_roots(&cp)? {
            if !values.contains(&root) {
                values.push(root);
            }
        }
    }
    values.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(values)
}

/// Normalizes so the first nonzero coordinate is one.
pub fn normalize_first_nonzero(v: &[Rat]) -> Vec<Rat> {
    match v.iter().find(|c| !c.is_zero()) {
        Some(first) => v.iter().map(|c| c / first).collect(),
        None => v.to_vec(),
    }
}

/// One eigenpair per nonzero rational eigenvalue. Zero eigenvalues are
/// excluded: their level sets collapse after a single step and encode no
/// usable relation.
pub fn left_eigenpairs(a: &Matrix<Rat>) -> Result<Vec<Eigenpair>, LinalgError> {
    let at = a.transpose();
    let mut out = Vec::new();
    for value in rational_eigenvalues(a)? {
        if value.is_zero() {
            continue;
        }
        let shifted = at.sub_scaled_identity(&value);
        let space = kernel_basis(&shifted);
        if space.is_empty() {
            continue;
        }
        let left_space = space.iter().map(|v| normalize_first_nonzero(v)).collect();
        out.push(Eigenpair { value, left_space });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Int;
    use num_traits::{One, Zero};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(Int::from(n), Int::from(d))
    }

    fn mat(rows: &[&[i64]]) -> Matrix<Rat> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rat::from_int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn char_poly_identity() {
        // (lambda - 1)^3
        let p = char_poly(&Matrix::<Rat>::identity(3));
        assert_eq!(
            p.coeffs(),
            &[rat(-1, 1), rat(3, 1), rat(-3, 1), rat(1, 1)]
        );
    }

    #[test]
    fn char_poly_rotation_scaled() {
        // [[0.68, -0.68], [0.68, 0.68]] -> lambda^2 - 1.36 lambda + 0.9248
        let a = Matrix::from_rows(vec![
            vec![rat(17, 25), rat(-17, 25)],
            vec![rat(17, 25), rat(17, 25)],
        ]);
        let p = char_poly(&a);
        assert_eq!(p.coeffs(), &[rat(578, 625), rat(-34, 25), rat(1, 1)]);
    }

    #[test]
    fn kernel_of_zero_matrix_is_full() {
        let z = Matrix::<Rat>::zeros(2, 2);
        let k = kernel_basis(&z);
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let a = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let k = kernel_basis(&a);
        assert_eq!(k.len(), 1);
        for v in &k {
            for x in a.mat_vec(v) {
                assert!(x.is_zero());
            }
        }
    }

    #[test]
    fn shift_map_left_eigenvector() {
        // x -> x + 1 over basis (x, one): rows x: [1, 1], one: [0, 1].
        // Left eigenvector for lambda = 1 is (0, 1): the constant row.
        let a = mat(&[&[1, 1], &[0, 1]]);
        let pairs = left_eigenpairs(&a).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(pairs[0].value.is_one());
        assert_eq!(pairs[0].left_space, vec![vec![Rat::zero(), Rat::one()]]);
    }

    #[test]
    fn eigen_residual_exact_zero() {
        let a = Matrix::from_rows(vec![
            vec![rat(17, 25), rat(-17, 25)],
            vec![rat(17, 25), rat(17, 25)],
        ]);
        for pair in left_eigenpairs(&a).unwrap() {
            for phi in &pair.left_space {
                let img = a.vec_mat(phi);
                for (lhs, rhs) in img.iter().zip(phi) {
                    assert_eq!(lhs, &(rhs * &pair.value));
                }
            }
        }
    }

    #[test]
    fn scc_blocks_split_triangular() {
        // Block triangular: {0,1} coupled, {2} below.
        let a = mat(&[&[1, 2, 0], &[3, 4, 0], &[5, 0, 7]]);
        let blocks = scc_blocks(&a);
        assert_eq!(blocks.len(), 2);
        let p = char_poly(&a);
        // det(lI - A) = (l^2 - 5l - 2)(l - 7)
        let top = UniPoly::new(vec![rat(-2, 1), rat(-5, 1), rat(1, 1)]);
        let bottom = UniPoly::new(vec![rat(-7, 1), rat(1, 1)]);
        assert_eq!(p, top.mul(&bottom));
    }
}
