//! Precise finite-state chains in the forward representation: mass functions,
//! stochastic matrices, transition laws and the time-reversal calculus.

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, LinearSolution, Matrix};
use crate::scalar::{Scalar, Tolerance};

/// Probability mass function on the states `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector<T>(Vec<T>);

impl<T: Scalar> ProbVector<T> {
    /// Validates nonnegativity and normalization within `tol.sum`.
    ///
    /// Vectors that are off by more than the tolerance are rejected, never
    /// renormalized.
    pub fn new(entries: Vec<T>, tol: &Tolerance<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("probability vector"));
        }
        if let Some(index) = entries.iter().position(|v| v.is_negative()) {
            return Err(Error::NegativeEntry { index });
        }
        let sum = entries.iter().fold(T::zero(), |a, v| a + v.clone());
        if (sum.clone() - T::one()).abs() > tol.sum {
            return Err(Error::NotNormalized { sum: sum.to_text() });
        }
        Ok(ProbVector(entries))
    }

    /// Wraps entries already known to form a mass function (results of
    /// products of stochastic objects).
    pub(crate) fn from_trusted(entries: Vec<T>) -> Self {
        ProbVector(entries)
    }

    pub fn from_ratios(entries: &[(i64, i64)]) -> Result<Self> {
        Self::new(
            entries.iter().map(|&(n, d)| T::ratio(n, d)).collect(),
            &T::default_tolerance(),
        )
    }

    pub fn uniform(n: usize) -> Self {
        ProbVector(vec![T::ratio(1, n as i64); n])
    }

    /// Point mass at `state`.
    pub fn point(n: usize, state: usize) -> Self {
        let mut v = vec![T::zero(); n];
        v[state] = T::one();
        ProbVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    /// First state whose mass is `<= eps`, if any.
    pub fn first_nonpositive(&self, eps: &T) -> Option<usize> {
        self.0.iter().position(|v| v <= eps)
    }

    /// `q P` for a stochastic `P`.
    pub fn propagate(&self, p: &StochasticMatrix<T>) -> Result<ProbVector<T>> {
        Ok(ProbVector(p.matrix().left_mul(&self.0)?))
    }

    /// Expectation of `f` under this mass function.
    pub fn expect(&self, f: &[T]) -> T {
        self.0
            .iter()
            .zip(f)
            .fold(T::zero(), |a, (p, v)| a + p.clone() * v.clone())
    }
}

impl<T> std::ops::Index<usize> for ProbVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Square row-stochastic matrix; entry `(x, y)` is the probability of `x -> y`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<T>(Matrix<T>);

impl<T: Scalar> StochasticMatrix<T> {
    pub fn new(m: Matrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        if m.rows() == 0 {
            return Err(Error::EmptyInput("transition matrix"));
        }
        for row in 0..m.rows() {
            ProbVector::new(m.row(row).to_vec(), tol).map_err(|_| Error::NotStochastic { row })?;
        }
        Ok(StochasticMatrix(m))
    }

    pub(crate) fn from_trusted(m: Matrix<T>) -> Self {
        StochasticMatrix(m)
    }

    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(Matrix::from_ratios(rows)?, &T::default_tolerance())
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix(Matrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn get(&self, x: usize, y: usize) -> &T {
        &self.0[(x, y)]
    }
}

/// Sequence of state indices `x_1, ..., x_N`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(states: Vec<usize>, n_states: usize) -> Result<Self> {
        if let Some(&bad) = states.iter().find(|&&s| s >= n_states) {
            return Err(Error::IndexOutOfRange {
                what: "state",
                index: bad,
                min: 0,
                max: n_states.saturating_sub(1),
            });
        }
        Ok(Path(states))
    }

    pub fn states(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `x_N, ..., x_1`.
    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Position of this path in lexicographic order over `n_states^len`.
    pub fn lex_index(&self, n_states: usize) -> usize {
        self.0.iter().fold(0, |acc, &s| acc * n_states + s)
    }

    /// All `n_states^len` paths in lexicographic order.
    pub fn enumerate(n_states: usize, len: usize) -> impl Iterator<Item = Path> {
        let total = n_states.pow(len as u32);
        (0..total).map(move |mut idx| {
            let mut states = vec![0; len];
            for slot in states.iter_mut().rev() {
                *slot = idx % n_states;
                idx /= n_states;
            }
            Path(states)
        })
    }
}

/// Forward specification `(q1, P_1, ..., P_{N-1})` of a possibly
/// inhomogeneous chain on a finite horizon `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionLaw<T> {
    initial: ProbVector<T>,
    steps: Vec<StochasticMatrix<T>>,
}

impl<T: Scalar> TransitionLaw<T> {
    pub fn new(initial: ProbVector<T>, steps: Vec<StochasticMatrix<T>>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyLaw);
        }
        for p in &steps {
            if p.dim() != initial.len() {
                return Err(Error::DimensionMismatch {
                    expected: initial.len(),
                    found: p.dim(),
                });
            }
        }
        Ok(TransitionLaw { initial, steps })
    }

    /// `(q, [P; horizon - 1])`.
    pub fn homogeneous(initial: ProbVector<T>, p: StochasticMatrix<T>, horizon: usize) -> Result<Self> {
        Self::new(initial, vec![p; horizon.saturating_sub(1)])
    }

    pub fn initial(&self) -> &ProbVector<T> {
        &self.initial
    }

    pub fn steps(&self) -> &[StochasticMatrix<T>] {
        &self.steps
    }

    pub fn n_states(&self) -> usize {
        self.initial.len()
    }

    /// Horizon `N = steps + 1`.
    pub fn horizon(&self) -> usize {
        self.steps.len() + 1
    }

    /// Distribution of `X_k`, `k` counted from 1.
    pub fn marginal_at(&self, k: usize) -> Result<ProbVector<T>> {
        if k == 0 || k > self.horizon() {
            return Err(Error::IndexOutOfRange {
                what: "time",
                index: k,
                min: 1,
                max: self.horizon(),
            });
        }
        self.steps[..k - 1]
            .iter()
            .try_fold(self.initial.clone(), |q, p| q.propagate(p))
    }

    /// All marginals `q1, ..., qN`.
    pub fn marginals(&self) -> Vec<ProbVector<T>> {
        let mut out = Vec::with_capacity(self.horizon());
        out.push(self.initial.clone());
        for p in &self.steps {
            let next = out
                .last()
                .unwrap()
                .propagate(p)
                .expect("dimensions checked at construction");
            out.push(next);
        }
        out
    }

    /// Probability of a full path, `q1(x1) prod P_k(x_k, x_{k+1})`.
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
        let mut prob = self.initial[xs[0]].clone();
        for (k, p) in self.steps.iter().enumerate() {
            if prob.is_zero() {
                break;
            }
            prob = prob * p.get(xs[k], xs[k + 1]).clone();
        }
        Ok(prob)
    }

    /// Law of the reversed chain `X_N, ..., X_1`:
    /// `(qN, P*_{N-1}, ..., P*_1)` with `P*_k` the `q_k`-reverse of `P_k`.
    ///
    /// Every marginal must be positive (beyond `tol.eq`); a zero marginal is
    /// reported instead of inventing a convention for the undefined rows.
    pub fn reverse(&self, tol: &Tolerance<T>) -> Result<TransitionLaw<T>> {
        let marginals = self.marginals();
        for (k, q) in marginals.iter().enumerate() {
            if let Some(state) = q.first_nonpositive(&tol.eq) {
                return Err(Error::ZeroMarginal { time: k + 1, state });
            }
        }
        let mut reversed = Vec::with_capacity(self.steps.len());
        for (p, q) in self.steps.iter().zip(&marginals).rev() {
            reversed.push(q_reverse(p, q, tol)?);
        }
        Ok(TransitionLaw {
            initial: marginals.last().unwrap().clone(),
            steps: reversed,
        })
    }
}

/// `q^(k)` of `law`, `k` 1-based.
pub fn marginal_at<T: Scalar>(law: &TransitionLaw<T>, k: usize) -> Result<ProbVector<T>> {
    law.marginal_at(k)
}

pub fn path_probability<T: Scalar>(law: &TransitionLaw<T>, path: &Path) -> Result<T> {
    law.path_probability(path)
}

pub fn reverse_law<T: Scalar>(law: &TransitionLaw<T>, tol: &Tolerance<T>) -> Result<TransitionLaw<T>> {
    law.reverse(tol)
}

/// Stationary distribution of `P`, solving `[(P - I)^T; 1^T] pi = (0; 1)`.
pub fn stationary_distribution<T: Scalar>(p: &StochasticMatrix<T>, tol: &Tolerance<T>) -> Result<ProbVector<T>> {
    let n = p.dim();
    let mut a = Matrix::zeros(n + 1, n);
    for i in 0..n {
        for j in 0..n {
            // row i of (P - I)^T is column i of P - I
            let delta = if i == j { T::one() } else { T::zero() };
            a[(i, j)] = p.get(j, i).clone() - delta;
        }
    }
    for j in 0..n {
        a[(n, j)] = T::one();
    }
    let mut b = vec![T::zero(); n + 1];
    b[n] = T::one();

    let pivot_eps = if T::EXACT { T::zero() } else { tol.eq.clone() };
    match solve_linear(&a, &b, &pivot_eps)? {
        LinearSolution::Unique(mut pi) => {
            for (state, v) in pi.iter_mut().enumerate() {
                if *v < -tol.eq.clone() {
                    return Err(Error::NegativeSolution {
                        state,
                        value: v.to_text(),
                    });
                }
                if v.is_negative() {
                    *v = T::zero();
                }
            }
            Ok(ProbVector::from_trusted(pi))
        }
        LinearSolution::Underdetermined { rank } => Err(Error::NonUniqueStationary { rank, states: n }),
        LinearSolution::Inconsistent => Err(Error::NonUniqueStationary { rank: 0, states: n }),
    }
}

/// The `q`-reverse `diag(qP)^{-1} P^T diag(q)` of `P`.
///
/// Requires `q > 0` and `qP > 0` beyond `tol.eq`; the result is stochastic.
pub fn q_reverse<T: Scalar>(
    p: &StochasticMatrix<T>,
    q: &ProbVector<T>,
    tol: &Tolerance<T>,
) -> Result<StochasticMatrix<T>> {
    let n = p.dim();
    if q.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.len(),
        });
    }
    if let Some(state) = q.first_nonpositive(&tol.eq) {
        return Err(Error::ZeroMarginal { time: 1, state });
    }
    let image = q.propagate(p)?;
    if let Some(state) = image.first_nonpositive(&tol.eq) {
        return Err(Error::ZeroMarginal { time: 2, state });
    }
    let mut out = Matrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            out[(x, y)] = p.get(y, x).clone() * q[y].clone() / image[x].clone();
        }
    }
    Ok(StochasticMatrix::from_trusted(out))
}

/// `pi(x) P(x, y) == pi(y) P(y, x)` for all pairs, within `tol.eq`.
pub fn detailed_balance_holds<T: Scalar>(p: &StochasticMatrix<T>, pi: &ProbVector<T>, tol: &Tolerance<T>) -> bool {
    let n = p.dim();
    if pi.len() != n {
        return false;
    }
    (0..n).all(|x| {
        (x + 1..n).all(|y| {
            let forward = pi[x].clone() * p.get(x, y).clone();
            let backward = pi[y].clone() * p.get(y, x).clone();
            tol.eq_within(&forward, &backward)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn p1() -> StochasticMatrix<Q> {
        StochasticMatrix::from_ratios(&[&[(2, 10), (8, 10)], &[(7, 10), (3, 10)]]).unwrap()
    }

    fn p2() -> StochasticMatrix<Q> {
        StochasticMatrix::from_ratios(&[&[(6, 10), (4, 10)], &[(5, 10), (5, 10)]]).unwrap()
    }

    fn tol() -> Tolerance<Q> {
        Tolerance::zero()
    }

    #[test]
    fn marginal_after_one_step() {
        let law = TransitionLaw::new(ProbVector::from_ratios(&[(5, 9), (4, 9)]).unwrap(), vec![p1()]).unwrap();
        assert_eq!(law.marginal_at(1).unwrap().entries(), &[q(5, 9), q(4, 9)]);
        assert_eq!(law.marginal_at(2).unwrap().entries(), &[q(19, 45), q(26, 45)]);
        assert!(matches!(law.marginal_at(0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(law.marginal_at(3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn marginal_through_identity_and_row_normalized_matrix() {
        let init = ProbVector::<Q>::from_ratios(&[(1, 4), (3, 4)]).unwrap();
        let law = TransitionLaw::new(init.clone(), vec![StochasticMatrix::identity(2)]).unwrap();
        assert_eq!(law.marginal_at(2).unwrap(), init);

        // (0.3, 0.7) pushed through [[1/3, 2/3], [3/7, 4/7]]: (0.1 + 0.3, 0.2 + 0.4)
        let p = StochasticMatrix::<Q>::from_ratios(&[&[(1, 3), (2, 3)], &[(3, 7), (4, 7)]]).unwrap();
        let law = TransitionLaw::new(ProbVector::from_ratios(&[(3, 10), (7, 10)]).unwrap(), vec![p]).unwrap();
        assert_eq!(law.marginal_at(2).unwrap().entries(), &[q(2, 5), q(3, 5)]);
    }

    #[test]
    fn stationary_of_two_state_examples() {
        assert_eq!(
            stationary_distribution(&p1(), &tol()).unwrap().entries(),
            &[q(7, 15), q(8, 15)]
        );
        assert_eq!(
            stationary_distribution(&p2(), &tol()).unwrap().entries(),
            &[q(5, 9), q(4, 9)]
        );
        let half = StochasticMatrix::<Q>::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).unwrap();
        assert_eq!(stationary_distribution(&half, &tol()).unwrap(), ProbVector::uniform(2));
    }

    #[test]
    fn stationary_rejects_reducible_chain() {
        let id = StochasticMatrix::<Q>::identity(3);
        assert!(matches!(
            stationary_distribution(&id, &tol()),
            Err(Error::NonUniqueStationary { .. })
        ));
        let id = StochasticMatrix::<f64>::identity(2);
        assert!(matches!(
            stationary_distribution(&id, &f64::default_tolerance()),
            Err(Error::NonUniqueStationary { .. })
        ));
    }

    #[test]
    fn q_reverse_examples() {
        let u = ProbVector::from_ratios(&[(19, 45), (26, 45)]).unwrap();
        let rev = q_reverse(&p1(), &u, &tol()).unwrap();
        let expected = StochasticMatrix::from_ratios(&[&[(19, 110), (91, 110)], &[(76, 115), (39, 115)]]).unwrap();
        assert_eq!(rev, expected);

        let id = StochasticMatrix::identity(3);
        let qv = ProbVector::from_ratios(&[(1, 6), (1, 3), (1, 2)]).unwrap();
        assert_eq!(q_reverse(&id, &qv, &tol()).unwrap(), id);

        let half = StochasticMatrix::<Q>::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).unwrap();
        assert_eq!(q_reverse(&half, &ProbVector::uniform(2), &tol()).unwrap(), half);
    }

    #[test]
    fn q_reverse_zero_marginal() {
        let qv = ProbVector::<Q>::point(2, 0);
        assert_eq!(
            q_reverse(&p1(), &qv, &tol()),
            Err(Error::ZeroMarginal { time: 1, state: 1 })
        );
        // q > 0 but qP has a zero entry
        let p = StochasticMatrix::<Q>::from_ratios(&[&[(1, 1), (0, 1)], &[(1, 1), (0, 1)]]).unwrap();
        assert_eq!(
            q_reverse(&p, &ProbVector::uniform(2), &tol()),
            Err(Error::ZeroMarginal { time: 2, state: 1 })
        );
    }

    #[test]
    fn reverse_law_example() {
        // started at u = pi_2 P_1
        let law = TransitionLaw::new(ProbVector::from_ratios(&[(19, 45), (26, 45)]).unwrap(), vec![p1()]).unwrap();
        let rev = law.reverse(&tol()).unwrap();
        assert_eq!(rev.initial().entries(), &[q(22, 45), q(23, 45)]);
        let expected = StochasticMatrix::from_ratios(&[&[(19, 110), (91, 110)], &[(76, 115), (39, 115)]]).unwrap();
        assert_eq!(rev.steps(), &[expected]);
        assert_eq!(rev.reverse(&tol()).unwrap(), law);

        // started at pi_2 the reversed law starts at u
        let law = TransitionLaw::new(ProbVector::from_ratios(&[(5, 9), (4, 9)]).unwrap(), vec![p1()]).unwrap();
        let rev = law.reverse(&tol()).unwrap();
        assert_eq!(rev.initial().entries(), &[q(19, 45), q(26, 45)]);
        assert_eq!(rev.steps(), &[q_reverse(&p1(), law.initial(), &tol()).unwrap()]);
    }

    #[test]
    fn reversible_law_is_fixed_point() {
        let pi = stationary_distribution(&p1(), &tol()).unwrap();
        let law = TransitionLaw::homogeneous(pi, p1(), 4).unwrap();
        assert_eq!(law.reverse(&tol()).unwrap(), law);
    }

    #[test]
    fn reverse_law_zero_marginal() {
        let p = StochasticMatrix::<Q>::from_ratios(&[&[(1, 1), (0, 1)], &[(1, 1), (0, 1)]]).unwrap();
        let law = TransitionLaw::new(ProbVector::uniform(2), vec![p]).unwrap();
        assert_eq!(law.reverse(&tol()), Err(Error::ZeroMarginal { time: 2, state: 1 }));
    }

    #[test]
    fn path_probabilities() {
        let law = TransitionLaw::new(ProbVector::<Q>::point(2, 0), vec![StochasticMatrix::identity(2)]).unwrap();
        assert_eq!(
            law.path_probability(&Path::new(vec![0, 0], 2).unwrap()).unwrap(),
            q(1, 1)
        );
        assert_eq!(
            law.path_probability(&Path::new(vec![0, 1], 2).unwrap()).unwrap(),
            q(0, 1)
        );
        assert!(law.path_probability(&Path::new(vec![0], 2).unwrap()).is_err());

        let law = TransitionLaw::new(ProbVector::from_ratios(&[(7, 15), (8, 15)]).unwrap(), vec![p1()]).unwrap();
        assert_eq!(
            law.path_probability(&Path::new(vec![0, 1], 2).unwrap()).unwrap(),
            q(28, 75)
        );
    }

    #[test]
    fn detailed_balance_cases() {
        let half = StochasticMatrix::<Q>::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).unwrap();
        assert!(detailed_balance_holds(&half, &ProbVector::uniform(2), &tol()));
        let pi1 = ProbVector::from_ratios(&[(7, 15), (8, 15)]).unwrap();
        assert!(detailed_balance_holds(&p1(), &pi1, &tol()));
        let cycle = StochasticMatrix::<Q>::from_ratios(&[
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
            &[(1, 1), (0, 1), (0, 1)],
        ])
        .unwrap();
        assert!(!detailed_balance_holds(&cycle, &ProbVector::uniform(3), &tol()));
    }

    #[test]
    fn construction_rejects_bad_input() {
        let t = f64::default_tolerance();
        assert!(matches!(
            ProbVector::new(vec![0.5, 0.6], &t),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            ProbVector::new(vec![1.5, -0.5], &t),
            Err(Error::NegativeEntry { index: 1 })
        ));
        let m = Matrix::from_rows(vec![vec![0.5, 0.5], vec![0.2, 0.7]]).unwrap();
        assert_eq!(StochasticMatrix::new(m, &t), Err(Error::NotStochastic { row: 1 }));
        assert_eq!(
            TransitionLaw::<f64>::new(ProbVector::uniform(2), vec![]),
            Err(Error::EmptyLaw)
        );
        assert!(Path::new(vec![0, 2], 2).is_err());
    }

    #[test]
    fn path_enumeration_order() {
        let all: Vec<_> = Path::enumerate(2, 3).map(|p| p.states().to_vec()).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], vec![0, 0, 0]);
        assert_eq!(all[1], vec![0, 0, 1]);
        assert_eq!(all[6], vec![1, 1, 0]);
        for (i, p) in Path::enumerate(3, 3).enumerate() {
            assert_eq!(p.lex_index(3), i);
        }
    }
}
