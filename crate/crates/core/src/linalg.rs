//! Small dense matrices over a [`Scalar`].

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    /// Convenience constructor from small integer ratios, `(numerator, denominator)`.
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| T::ratio(n, d)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, v| acc + v.clone()))
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s = s.clone() + v.clone();
            }
        }
        sums
    }

    pub fn total(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc + v.clone())
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix, `v M`.
    pub fn left_mul(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (o, m) in out.iter_mut().zip(self.row(i)) {
                *o = o.clone() + vi.clone() * m.clone();
            }
        }
        Ok(out)
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn zip_with(&self, other: &Matrix<T>, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Largest entrywise absolute difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix<T>) -> Option<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a.clone() - b.clone()).abs())
                .fold(T::zero(), T::max_of),
        )
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Max-norm distance between two vectors of equal length.
pub fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y.clone()).abs())
        .fold(T::zero(), T::max_of)
}

/// Outcome of solving a (possibly overdetermined) linear system.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution<T> {
    Unique(Vec<T>),
    /// Rank of the coefficient matrix is below the number of unknowns.
    Underdetermined {
        rank: usize,
    },
    Inconsistent,
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// `A` may have more rows than columns. Pivots with magnitude `<= eps` count
/// as zero; pass zero for exact arithmetic.
pub fn solve_linear<T: Scalar>(a: &Matrix<T>, b: &[T], eps: &T) -> Result<LinearSolution<T>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    let mut aug: Vec<Vec<T>> = (0..m)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();

    let mut pivot_cols = Vec::with_capacity(n);
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        let (best, best_abs) = (row..m)
            .map(|r| (r, aug[r][col].abs()))
            .fold((row, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_abs <= *eps {
            continue;
        }
        aug.swap(row, best);
        let pivot_row = aug[row].clone();
        let pivot = pivot_row[col].clone();
        for (r, target) in aug.iter_mut().enumerate() {
            if r == row || target[col].is_zero() {
                continue;
            }
            let factor = target[col].clone() / pivot.clone();
            for (a, p) in target[col..].iter_mut().zip(&pivot_row[col..]) {
                *a = a.clone() - factor.clone() * p.clone();
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let rank = pivot_cols.len();
    if aug[rank..].iter().any(|r| r[n].abs() > *eps) {
        return Ok(LinearSolution::Inconsistent);
    }
    if rank < n {
        return Ok(LinearSolution::Underdetermined { rank });
    }
    let x = pivot_cols
        .iter()
        .enumerate()
        .map(|(r, &c)| aug[r][n].clone() / aug[r][c].clone())
        .collect();
    Ok(LinearSolution::Unique(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn products_and_sums() {
        let a = Matrix::<Rational>::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 3), (2, 3)]]).unwrap();
        assert_eq!(a.row_sums(), vec![q(1, 1), q(1, 1)]);
        assert_eq!(a.col_sums(), vec![q(5, 6), q(7, 6)]);
        assert_eq!(a.left_mul(&[q(1, 1), q(0, 1)]).unwrap(), vec![q(1, 2), q(1, 2)]);
        let id = Matrix::identity(2);
        assert_eq!(a.matmul(&id).unwrap(), a);
        assert_eq!(a.transpose().transpose(), a);
        assert!(a.left_mul(&[q(1, 1)]).is_err());
    }

    #[test]
    fn overdetermined_unique_solution() {
        // x + y = 3, x - y = 1, 2x = 4
        let a = Matrix::<Rational>::from_ratios(&[&[(1, 1), (1, 1)], &[(1, 1), (-1, 1)], &[(2, 1), (0, 1)]]).unwrap();
        let sol = solve_linear(&a, &[q(3, 1), q(1, 1), q(4, 1)], &q(0, 1)).unwrap();
        assert_eq!(sol, LinearSolution::Unique(vec![q(2, 1), q(1, 1)]));
    }

    #[test]
    fn rank_deficient_and_inconsistent() {
        let a = Matrix::<f64>::from_rows(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(
            solve_linear(&a, &[1.0, 2.0], &1e-12).unwrap(),
            LinearSolution::Underdetermined { rank: 1 }
        );
        assert_eq!(
            solve_linear(&a, &[1.0, 3.0], &1e-12).unwrap(),
            LinearSolution::Inconsistent
        );
    }
}
