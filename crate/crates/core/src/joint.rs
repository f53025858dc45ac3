//! Joint-distribution (edge-measure) matrices `Q(x, y) = q(x) P(x, y)` and
//! marginally compatible sequences of them.
//!
//! A sequence `Q_1, ..., Q_{N-1}` encodes a finite-horizon law without ever
//! dividing by a marginal, so zero-probability states need no special case.
//! Reversal is `Q_{N-1}^T, ..., Q_1^T`.

use crate::chain::{Path, ProbVector, StochasticMatrix, TransitionLaw};
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, Matrix};
use crate::scalar::{Scalar, Tolerance};

/// Nonnegative square matrix with total mass one: the law of a pair of
/// consecutive states.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMatrix<T>(Matrix<T>);

impl<T: Scalar> JointMatrix<T> {
    pub fn new(m: Matrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::EmptyInput("joint matrix"));
        }
        if let Some(index) = m.as_slice().iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeEntry { index });
        }
        let total = m.total();
        if (total.clone() - T::one()).abs() > tol.sum {
            return Err(Error::NotNormalized { sum: total.to_text() });
        }
        Ok(JointMatrix(m))
    }

    pub(crate) fn from_trusted(m: Matrix<T>) -> Self {
        JointMatrix(m)
    }

    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(Matrix::from_ratios(rows)?, &T::default_tolerance())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.0[(x, y)]
    }

    /// Row sums `Q 1^T`: the law of the first coordinate.
    pub fn left_marginal(&self) -> ProbVector<T> {
        ProbVector::from_trusted(self.0.row_sums())
    }

    /// Column sums `1 Q`: the law of the second coordinate.
    pub fn right_marginal(&self) -> ProbVector<T> {
        ProbVector::from_trusted(self.0.col_sums())
    }

    /// Joint matrix of the swapped pair `(X_2, X_1)`.
    pub fn transpose(&self) -> Self {
        JointMatrix(self.0.transpose())
    }

    /// Expectation of a two-step gamble `f(x, y)`.
    pub fn expect(&self, f: &Matrix<T>) -> T {
        self.0
            .as_slice()
            .iter()
            .zip(f.as_slice())
            .fold(T::zero(), |a, (q, v)| a + q.clone() * v.clone())
    }

    /// Entrywise distance in max-norm.
    pub fn distance(&self, other: &JointMatrix<T>) -> Option<T> {
        self.0.max_abs_diff(&other.0)
    }
}

/// `diag(q) P`.
pub fn joint_from<T: Scalar>(q: &ProbVector<T>, p: &StochasticMatrix<T>) -> Result<JointMatrix<T>> {
    if q.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.len(),
        });
    }
    Ok(JointMatrix(Matrix::diag(q.entries()).matmul(p.matrix())?))
}

/// A forward pair `(q, P)` with `diag(q) P = Q`.
///
/// `q` is the row-sum vector. Rows with zero mass carry no information and
/// are filled with the uniform distribution.
pub fn forward_pair_from<T: Scalar>(joint: &JointMatrix<T>) -> (ProbVector<T>, StochasticMatrix<T>) {
    let n = joint.dim();
    let q = joint.left_marginal();
    let mut p = Matrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            p[(x, y)] = if q[x].is_zero() {
                T::ratio(1, n as i64)
            } else {
                joint.get(x, y).clone() / q[x].clone()
            };
        }
    }
    (q, StochasticMatrix::from_trusted(p))
}

/// Column sums of `first` equal row sums of `second` within `tol.eq`.
pub fn is_marginally_compatible<T: Scalar>(
    first: &JointMatrix<T>,
    second: &JointMatrix<T>,
    tol: &Tolerance<T>,
) -> bool {
    first.dim() == second.dim()
        && max_abs_diff(first.right_marginal().entries(), second.left_marginal().entries()) <= tol.eq
}

/// `Q(x, y) == Q(y, x)` for all pairs, within `tol.eq`.
pub fn is_symmetric<T: Scalar>(joint: &JointMatrix<T>, tol: &Tolerance<T>) -> bool {
    symmetry_violation(joint.matrix(), tol).is_none()
}

/// First pair `(x, y)` with `x < y` where `|M(x, y) - M(y, x)| > tol.eq`.
pub fn symmetry_violation<T: Scalar>(m: &Matrix<T>, tol: &Tolerance<T>) -> Option<(usize, usize)> {
    let n = m.rows();
    (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .find(|&(x, y)| !tol.eq_within(&m[(x, y)], &m[(y, x)]))
}

/// Marginally compatible joint matrices `Q_1, ..., Q_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSequence<T> {
    mats: Vec<JointMatrix<T>>,
}

impl<T: Scalar> JointSequence<T> {
    pub fn new(mats: Vec<JointMatrix<T>>, tol: &Tolerance<T>) -> Result<Self> {
        let first = mats.first().ok_or(Error::EmptyInput("joint sequence"))?;
        for m in &mats {
            if m.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: m.dim(),
                });
            }
        }
        for (index, pair) in mats.windows(2).enumerate() {
            if !is_marginally_compatible(&pair[0], &pair[1], tol) {
                return Err(Error::IncompatibleSequence { index });
            }
        }
        Ok(JointSequence { mats })
    }

    /// `Q_k = diag(q_k) P_k` for every step of a transition law.
    pub fn from_law(law: &TransitionLaw<T>) -> Self {
        let mats = law
            .marginals()
            .iter()
            .zip(law.steps())
            .map(|(q, p)| joint_from(q, p).expect("law dimensions are consistent"))
            .collect();
        JointSequence { mats }
    }

    pub fn mats(&self) -> &[JointMatrix<T>] {
        &self.mats
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn n_states(&self) -> usize {
        self.mats[0].dim()
    }

    /// Path length `N` this sequence describes.
    pub fn horizon(&self) -> usize {
        self.mats.len() + 1
    }

    /// The forward law with initial law `Q_1 1^T` and `P_k` row-normalized
    /// from `Q_k`.
    pub fn to_law(&self) -> TransitionLaw<T> {
        let initial = self.mats[0].left_marginal();
        let steps = self.mats.iter().map(|q| forward_pair_from(q).1).collect();
        TransitionLaw::new(initial, steps).expect("nonempty sequence of square matrices")
    }

    /// `Q_{N-1}^T, ..., Q_1^T`.
    pub fn reversed(&self) -> JointSequence<T> {
        JointSequence {
            mats: self.mats.iter().rev().map(JointMatrix::transpose).collect(),
        }
    }

    /// `prod_k Q_k(x_k, x_{k+1}) / prod_{k>=2} q_k(x_k)` with `0/0 := 0`,
    /// where `q_k` is the row-sum vector of `Q_k`.
    ///
    /// Factors are applied one at a time and the product stops at the first
    /// zero, so a vanishing marginal never reaches a division.
    pub fn path_probability(&self, path: &Path) -> Result<T> {
        if path.len() != self.horizon() {
            return Err(Error::DimensionMismatch {
                expected: self.horizon(),
                found: path.len(),
            });
        }
        let n = self.n_states();
        if let Some(&bad) = path.states().iter().find(|&&s| s >= n) {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: bad,
                min: 0,
                max: n - 1,
            });
        }
        let xs = path.states();
        let mut prob = self.mats[0].get(xs[0], xs[1]).clone();
        for k in 1..self.mats.len() {
            if prob.is_zero() {
                return Ok(prob);
            }
            let numerator = self.mats[k].get(xs[k], xs[k + 1]).clone();
            if numerator.is_zero() {
                return Ok(T::zero());
            }
            let denominator = self.mats[k]
                .matrix()
                .row(xs[k])
                .iter()
                .fold(T::zero(), |a, v| a + v.clone());
            prob = prob * numerator / denominator;
        }
        Ok(prob)
    }
}

/// [`JointSequence::to_law`] as a free function.
pub fn law_from_joint_sequence<T: Scalar>(seq: &JointSequence<T>) -> TransitionLaw<T> {
    seq.to_law()
}

/// [`JointSequence::reversed`] as a free function.
pub fn reverse_joint_sequence<T: Scalar>(seq: &JointSequence<T>) -> JointSequence<T> {
    seq.reversed()
}
