//! Small dense linear algebra for the few-ion problems handled here.
//!
//! Matrices are at most a dozen rows, so a cyclic Jacobi eigensolver and
//! partial-pivot Gaussian elimination are sufficient and keep the crate
//! generic over [`Real`].

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have the outer length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: T) {
        debug_assert_eq!(self.n, other.n);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &a| acc.max(a.abs()))
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Quadratic form `s^T M s`.
    pub fn quadratic_form(&self, s: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            let mut row = T::zero();
            for j in 0..self.n {
                row += self[(i, j)] * s[j];
            }
            acc += s[i] * row;
        }
        acc
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen-decomposition of a real symmetric matrix.
///
/// `vectors[k]` is the unit eigenvector belonging to `values[k]`. Order is
/// whatever the Jacobi sweeps leave behind; callers sort.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

/// Cyclic Jacobi eigensolver.
pub fn symmetric_eigen<T: Real>(m: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    let n = m.dim();
    let scale = m.max_abs().max(T::min_positive_value());
    if !m.is_symmetric(scale * T::epsilon() * T::lit(64.0)) {
        return Err(Error::InternalConsistency(
            "eigensolver input is not symmetric".into(),
        ));
    }
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let tiny = T::epsilon() * T::epsilon() * scale * scale;

    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + a[(i, j)] * a[(i, j)]);
        if off <= tiny {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)]).collect();
    let vectors = (0..n)
        .map(|k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    Ok(SymmetricEigen { values, vectors })
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .abs()
                    .partial_cmp(&m[(j, col)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if m[(pivot, col)].abs() <= T::min_positive_value() {
            return Err(Error::InternalConsistency("singular linear system".into()));
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)];
                m[(col, k)] = m[(pivot, k)];
                m[(pivot, k)] = tmp;
            }
            x.swap(col, pivot);
        }
        for r in (col + 1)..n {
            let f = m[(r, col)] / m[(col, col)];
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                let v = m[(col, k)];
                m[(r, k)] -= f * v;
            }
            let xc = x[col];
            x[r] -= f * xc;
        }
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for k in (r + 1)..n {
            acc -= m[(r, k)] * x[k];
        }
        x[r] = acc / m[(r, r)];
    }
    Ok(x)
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_two_by_two() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut e = symmetric_eigen(&m).unwrap();
        e.values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((e.values[0] - 1.0f64).abs() < 1e-14);
        assert!((e.values[1] - 3.0f64).abs() < 1e-14);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let m = Matrix::from_fn(5, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let e = symmetric_eigen(&m).unwrap();
        let r = Matrix::from_fn(5, |i, j| {
            (0..5)
                .map(|k| e.values[k] * e.vectors[k][i] * e.vectors[k][j])
                .sum::<f64>()
        });
        assert!(r.max_abs_diff(&m) < 1e-13);
        for a in 0..5 {
            for b in 0..5 {
                let d = dot(&e.vectors[a], &e.vectors[b]);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            symmetric_eigen(&m),
            Err(Error::InternalConsistency(_))
        ));
    }

    #[test]
    fn gaussian_elimination_with_pivoting() {
        let a = Matrix::from_rows(&[
            vec![0.0, 2.0, 1.0],
            vec![1.0, 1.0, 0.0],
            vec![3.0, 0.0, 1.0],
        ])
        .unwrap();
        let x = solve(&a, &[5.0, 3.0, 6.0]).unwrap();
        let want: [f64; 3] = [1.4, 1.6, 1.8];
        for (got, w) in x.iter().zip(want) {
            assert!((*got - w).abs() < 1e-12, "{x:?}");
        }
    }

    #[test]
    fn f32_instantiation() {
        let m = Matrix::<f32>::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let e = symmetric_eigen(&m).unwrap();
        let tr: f32 = e.values.iter().sum();
        assert!((tr - 7.0).abs() < 1e-5);
    }
}
