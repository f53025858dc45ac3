//! Credal sets of distributions and of joint matrices.
//!
//! Two representations coexist without implicit conversion: finite vertex
//! lists (hull reasoning) and interval bounds on joint matrices (LPs).

use crate::chain::{Path, ProbVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::joint::{joint_from, symmetry_violation, JointMatrix};
use crate::linalg::Matrix;
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense};
use crate::scalar::{Scalar, Tolerance};

/// Gamble on two-step paths, `f(x, y)`.
pub type Gamble2<T> = Matrix<T>;

/// Anything that can be viewed as a point in `R^d` for hull tests.
pub trait HullPoint<T> {
    fn coords(&self) -> &[T];
}

impl<T: Scalar> HullPoint<T> for ProbVector<T> {
    fn coords(&self) -> &[T] {
        self.entries()
    }
}

impl<T: Scalar> HullPoint<T> for JointMatrix<T> {
    fn coords(&self) -> &[T] {
        self.matrix().as_slice()
    }
}

impl<T: Scalar> HullPoint<T> for StochasticMatrix<T> {
    fn coords(&self) -> &[T] {
        self.matrix().as_slice()
    }
}

impl<T: Scalar> HullPoint<T> for Vec<T> {
    fn coords(&self) -> &[T] {
        self
    }
}

/// Convex hull of finitely many distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCredalSet<T> {
    vertices: Vec<ProbVector<T>>,
}

impl<T: Scalar> VertexCredalSet<T> {
    pub fn new(vertices: Vec<ProbVector<T>>) -> Result<Self> {
        let first = vertices.first().ok_or(Error::EmptyInput("vertex list"))?;
        let n = first.len();
        if let Some(bad) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Ok(VertexCredalSet { vertices })
    }

    pub fn vertices(&self) -> &[ProbVector<T>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn contains(&self, q: &ProbVector<T>, tol: &Tolerance<T>) -> Result<bool> {
        convex_hull_membership(q, &self.vertices, tol)
    }
}

/// Finite set of transition matrices, optionally read as its convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet<T> {
    vertices: Vec<StochasticMatrix<T>>,
    take_hull: bool,
}

impl<T: Scalar> MatrixSet<T> {
    pub fn new(vertices: Vec<StochasticMatrix<T>>, take_hull: bool) -> Result<Self> {
        let first = vertices.first().ok_or(Error::EmptyInput("matrix list"))?;
        let n = first.dim();
        if let Some(bad) = vertices.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.dim(),
            });
        }
        Ok(MatrixSet { vertices, take_hull })
    }

    pub fn vertices(&self) -> &[StochasticMatrix<T>] {
        &self.vertices
    }

    pub fn take_hull(&self) -> bool {
        self.take_hull
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }
}

/// `{Q : lower <= Q <= upper, sum Q = 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalJointSet<T> {
    lower: Matrix<T>,
    upper: Matrix<T>,
}

impl<T: Scalar> IntervalJointSet<T> {
    pub fn new(lower: Matrix<T>, upper: Matrix<T>) -> Result<Self> {
        if !lower.is_square() {
            return Err(Error::InvalidBounds("lower bound is not square".into()));
        }
        if lower.rows() != upper.rows() || lower.cols() != upper.cols() {
            return Err(Error::DimensionMismatch {
                expected: lower.rows() * lower.cols(),
                found: upper.rows() * upper.cols(),
            });
        }
        for (i, (lo, hi)) in lower.as_slice().iter().zip(upper.as_slice()).enumerate() {
            if lo.is_negative() {
                return Err(Error::NegativeEntry { index: i });
            }
            if hi < lo {
                let n = lower.cols();
                return Err(Error::InvalidBounds(format!(
                    "lower exceeds upper at ({}, {})",
                    i / n,
                    i % n
                )));
            }
        }
        if lower.total() > T::one() || upper.total() < T::one() {
            return Err(Error::EmptyCredalSet);
        }
        Ok(IntervalJointSet { lower, upper })
    }

    /// The singleton `{Q}`.
    pub fn degenerate(q: &JointMatrix<T>) -> Self {
        IntervalJointSet {
            lower: q.matrix().clone(),
            upper: q.matrix().clone(),
        }
    }

    /// Every joint matrix on `n` states.
    pub fn full(n: usize) -> Self {
        IntervalJointSet {
            lower: Matrix::zeros(n, n),
            upper: Matrix::from_vec(n, n, vec![T::one(); n * n]).expect("shape"),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    pub fn lower(&self) -> &Matrix<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Matrix<T> {
        &self.upper
    }

    /// `[lower^T, upper^T]`, the set of transposed members.
    pub fn transpose(&self) -> Self {
        IntervalJointSet {
            lower: self.lower.transpose(),
            upper: self.upper.transpose(),
        }
    }

    /// Member test with `tol.eq` slack on bounds and `tol.sum` on the total.
    pub fn contains(&self, q: &Matrix<T>, tol: &Tolerance<T>) -> bool {
        if q.rows() != self.dim() || q.cols() != self.dim() {
            return false;
        }
        let within = q
            .as_slice()
            .iter()
            .zip(self.lower.as_slice().iter().zip(self.upper.as_slice()))
            .all(|(v, (lo, hi))| v.clone() >= lo.clone() - tol.eq.clone() && v.clone() <= hi.clone() + tol.eq.clone());
        within && (q.total() - T::one()).abs() <= tol.sum
    }
}

/// Real-valued function on paths of length `horizon`, stored in
/// lexicographic path order.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGamble<T> {
    n_states: usize,
    horizon: usize,
    values: Vec<T>,
}

impl<T: Scalar> PathGamble<T> {
    pub fn new(n_states: usize, horizon: usize, values: Vec<T>) -> Result<Self> {
        let expected = n_states.pow(horizon as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(PathGamble {
            n_states,
            horizon,
            values,
        })
    }

    pub fn from_fn(n_states: usize, horizon: usize, f: impl Fn(&[usize]) -> T) -> Self {
        let values = Path::enumerate(n_states, horizon).map(|p| f(p.states())).collect();
        PathGamble {
            n_states,
            horizon,
            values,
        }
    }

    /// `f(x_1..x_N) = sum_k g(x_k, x_{k+1})`; for `N = 2` this is `g` itself.
    pub fn from_pairwise(g: &Gamble2<T>, horizon: usize) -> Self {
        Self::from_fn(g.rows(), horizon, |xs| {
            xs.windows(2).fold(T::zero(), |acc, w| acc + g[(w[0], w[1])].clone())
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, path: &Path) -> &T {
        &self.values[path.lex_index(self.n_states)]
    }

    pub fn negate(&self) -> Self {
        PathGamble {
            n_states: self.n_states,
            horizon: self.horizon,
            values: self.values.iter().map(|v| -v.clone()).collect(),
        }
    }
}

/// `f*(x_1..x_N) = f(x_N..x_1)`.
pub fn reverse_gamble<T: Scalar>(f: &PathGamble<T>) -> PathGamble<T> {
    let values = Path::enumerate(f.n_states, f.horizon)
        .map(|p| f.value(&p.reversed()).clone())
        .collect();
    PathGamble {
        n_states: f.n_states,
        horizon: f.horizon,
        values,
    }
}

/// Two-step case of [`reverse_gamble`].
pub fn reverse_gamble2<T: Scalar>(f: &Gamble2<T>) -> Gamble2<T> {
    f.transpose()
}

fn marginal_intervals<T: Scalar>(set: &IntervalJointSet<T>, rows: bool, tol: &Tolerance<T>) -> Result<Vec<(T, T)>> {
    let n = set.dim();
    (0..n)
        .map(|s| {
            let mut g = Matrix::zeros(n, n);
            for k in 0..n {
                if rows {
                    g[(s, k)] = T::one();
                } else {
                    g[(k, s)] = T::one();
                }
            }
            Ok((
                lp::lower_expectation_two_step(set, &g, tol)?,
                lp::upper_expectation_two_step(set, &g, tol)?,
            ))
        })
        .collect()
}

/// Per-state `[min, max]` of the row sums over the set.
pub fn left_marginals<T: Scalar>(set: &IntervalJointSet<T>, tol: &Tolerance<T>) -> Result<Vec<(T, T)>> {
    marginal_intervals(set, true, tol)
}

/// Per-state `[min, max]` of the column sums over the set.
pub fn right_marginals<T: Scalar>(set: &IntervalJointSet<T>, tol: &Tolerance<T>) -> Result<Vec<(T, T)>> {
    marginal_intervals(set, false, tol)
}

/// Both bounds symmetric within `tol.eq`.
pub fn is_symmetric_set<T: Scalar>(set: &IntervalJointSet<T>, tol: &Tolerance<T>) -> bool {
    set_symmetry_violation(set, tol).is_none()
}

/// First entry `(x, y)`, `x < y`, where either bound differs from its
/// transpose.
pub fn set_symmetry_violation<T: Scalar>(set: &IntervalJointSet<T>, tol: &Tolerance<T>) -> Option<(usize, usize)> {
    let a = symmetry_violation(set.lower(), tol);
    let b = symmetry_violation(set.upper(), tol);
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Replaces each bound by the value actually attained on the set
/// (`2 |S|^2` LPs).
pub fn tighten_bounds<T: Scalar>(set: &IntervalJointSet<T>, tol: &Tolerance<T>) -> Result<IntervalJointSet<T>> {
    let n = set.dim();
    let mut lower = Matrix::zeros(n, n);
    let mut upper = Matrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            let mut g = Matrix::zeros(n, n);
            g[(x, y)] = T::one();
            lower[(x, y)] = lp::lower_expectation_two_step(set, &g, tol)?;
            upper[(x, y)] = lp::upper_expectation_two_step(set, &g, tol)?;
        }
    }
    Ok(IntervalJointSet { lower, upper })
}

/// `Q ∪ Q^T` with duplicates (max-norm `tol.eq`) removed, inputs first.
pub fn minimal_reversible_extension<T: Scalar>(mats: &[JointMatrix<T>], tol: &Tolerance<T>) -> Vec<JointMatrix<T>> {
    let mut out: Vec<JointMatrix<T>> = Vec::new();
    let candidates = mats.iter().cloned().chain(mats.iter().map(JointMatrix::transpose));
    for m in candidates {
        let dup = out.iter().any(|o| o.distance(&m).is_some_and(|d| d <= tol.eq));
        if !dup {
            out.push(m);
        }
    }
    out
}

/// Entrywise min and max over `mats`.
pub fn minimal_interval_hull<T: Scalar>(mats: &[JointMatrix<T>]) -> Result<IntervalJointSet<T>> {
    let first = mats.first().ok_or(Error::EmptyInput("joint matrix list"))?;
    let mut lower = first.matrix().clone();
    let mut upper = first.matrix().clone();
    for m in &mats[1..] {
        lower = lower.zip_with(m.matrix(), |a, b| T::min_of(a.clone(), b.clone()))?;
        upper = upper.zip_with(m.matrix(), |a, b| T::max_of(a.clone(), b.clone()))?;
    }
    Ok(IntervalJointSet { lower, upper })
}

/// Weights `λ >= 0`, `sum λ = 1`, with `sum λ_i v_i = target` (within
/// `tol.lp`), or `None` when the target lies outside the hull.
pub fn hull_coefficients<T: Scalar, P: HullPoint<T>>(
    target: &P,
    vertices: &[P],
    tol: &Tolerance<T>,
) -> Result<Option<Vec<T>>> {
    if vertices.is_empty() {
        return Err(Error::EmptyInput("vertex list"));
    }
    let t = target.coords();
    let d = t.len();
    if let Some(bad) = vertices.iter().find(|v| v.coords().len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.coords().len(),
        });
    }
    let k = vertices.len();
    let mut program = LinearProgram::new(Sense::Minimize, vec![T::zero(); k]);
    for (j, tj) in t.iter().enumerate() {
        let row: Vec<T> = vertices.iter().map(|v| v.coords()[j].clone()).collect();
        if tol.lp.is_zero() {
            program.add_constraint(row, Relation::Eq, tj.clone());
        } else {
            program.add_constraint(row.clone(), Relation::Le, tj.clone() + tol.lp.clone());
            program.add_constraint(row, Relation::Ge, tj.clone() - tol.lp.clone());
        }
    }
    program.add_constraint(vec![T::one(); k], Relation::Eq, T::one());
    let out = lp::solve(&program, tol)?;
    Ok(match out.status {
        LpStatus::Optimal => out.solution,
        _ => None,
    })
}

/// LP feasibility test for `target ∈ co(vertices)`.
pub fn convex_hull_membership<T: Scalar, P: HullPoint<T>>(
    target: &P,
    vertices: &[P],
    tol: &Tolerance<T>,
) -> Result<bool> {
    Ok(hull_coefficients(target, vertices, tol)?.is_some())
}

/// A vertex `q` and matrix `P` with `qP` outside the hull.
#[derive(Debug, Clone, PartialEq)]
pub struct HullWitness<T> {
    pub vertex: usize,
    pub matrix: usize,
    pub image: ProbVector<T>,
}

/// Checks `co(vertices) P ⊆ co(vertices)` for every `P` in `mats`; stops at
/// the first failing pair, vertices outer and matrices inner.
pub fn check_invariant_hull<T: Scalar>(
    vertices: &VertexCredalSet<T>,
    mats: &MatrixSet<T>,
    tol: &Tolerance<T>,
) -> Result<Option<HullWitness<T>>> {
    if vertices.dim() != mats.dim() {
        return Err(Error::DimensionMismatch {
            expected: vertices.dim(),
            found: mats.dim(),
        });
    }
    for (i, q) in vertices.vertices().iter().enumerate() {
        for (j, p) in mats.vertices().iter().enumerate() {
            let image = q.propagate(p)?;
            if !vertices.contains(&image, tol)? {
                return Ok(Some(HullWitness {
                    vertex: i,
                    matrix: j,
                    image,
                }));
            }
        }
    }
    Ok(None)
}

/// `{diag(q) P}` over all vertex pairs, marginal vertices outer.
pub fn forward_joint_set_vertices<T: Scalar>(
    marg: &VertexCredalSet<T>,
    mats: &MatrixSet<T>,
) -> Result<Vec<JointMatrix<T>>> {
    let mut out = Vec::with_capacity(marg.vertices().len() * mats.vertices().len());
    for q in marg.vertices() {
        for p in mats.vertices() {
            out.push(joint_from(q, p)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{q_reverse, stationary_distribution};
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn exact() -> Tolerance<Q> {
        Tolerance::zero()
    }

    fn p1() -> StochasticMatrix<Q> {
        StochasticMatrix::from_ratios(&[&[(1, 5), (4, 5)], &[(7, 10), (3, 10)]]).unwrap()
    }

    fn p2() -> StochasticMatrix<Q> {
        StochasticMatrix::from_ratios(&[&[(3, 5), (2, 5)], &[(1, 2), (1, 2)]]).unwrap()
    }

    fn stationary_box() -> IntervalJointSet<Q> {
        let q1 = joint_from(&stationary_distribution(&p1(), &exact()).unwrap(), &p1()).unwrap();
        let q2 = joint_from(&stationary_distribution(&p2(), &exact()).unwrap(), &p2()).unwrap();
        minimal_interval_hull(&[q1, q2]).unwrap()
    }

    #[test]
    fn interval_hull_of_stationary_joints() {
        let set = stationary_box();
        let lo = Matrix::from_ratios(&[&[(7, 75), (2, 9)], &[(2, 9), (4, 25)]]).unwrap();
        let hi = Matrix::from_ratios(&[&[(1, 3), (28, 75)], &[(28, 75), (2, 9)]]).unwrap();
        assert_eq!(set.lower(), &lo);
        assert_eq!(set.upper(), &hi);
        assert!(is_symmetric_set(&set, &exact()));
    }

    #[test]
    fn asymmetric_upper_bound_detected() {
        let lo = Matrix::zeros(2, 2);
        let hi = Matrix::from_ratios(&[&[(1, 1), (1, 2)], &[(1, 3), (1, 1)]]).unwrap();
        let set = IntervalJointSet::new(lo, hi).unwrap();
        assert!(!is_symmetric_set(&set, &exact()));
        assert_eq!(set_symmetry_violation(&set, &exact()), Some((0, 1)));
    }

    #[test]
    fn marginals_of_degenerate_and_full_sets() {
        let q1 = joint_from(&stationary_distribution(&p1(), &exact()).unwrap(), &p1()).unwrap();
        let left = left_marginals(&IntervalJointSet::degenerate(&q1), &exact()).unwrap();
        assert_eq!(left, vec![(q(7, 15), q(7, 15)), (q(8, 15), q(8, 15))]);
        let full = right_marginals(&IntervalJointSet::<Q>::full(3), &exact()).unwrap();
        assert!(full.iter().all(|(a, b)| *a == q(0, 1) && *b == q(1, 1)));
    }

    #[test]
    fn box_marginals_match_closed_form() {
        // min = max(own lower sum, 1 - other rows' upper sum), max symmetric
        let set = stationary_box();
        let left = left_marginals(&set, &exact()).unwrap();
        assert_eq!(left[0], (q(91, 225), q(139, 225)));
        assert_eq!(left[1], (q(86, 225), q(134, 225)));
        let right = right_marginals(&set, &exact()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn empty_box_rejected() {
        let lo = Matrix::from_ratios(&[&[(1, 2), (1, 2)], &[(1, 2), (0, 1)]]).unwrap();
        let hi = Matrix::from_ratios(&[&[(1, 1), (1, 1)], &[(1, 1), (1, 1)]]).unwrap();
        assert_eq!(IntervalJointSet::<Q>::new(lo, hi), Err(Error::EmptyCredalSet));
    }

    #[test]
    fn reversible_extension_sizes() {
        let q1 = JointMatrix::<Q>::from_ratios(&[&[(1, 10), (2, 10)], &[(3, 10), (4, 10)]]).unwrap();
        assert_eq!(
            minimal_reversible_extension(std::slice::from_ref(&q1), &exact()).len(),
            2
        );
        let sym = JointMatrix::<Q>::from_ratios(&[&[(1, 10), (2, 10)], &[(2, 10), (5, 10)]]).unwrap();
        assert_eq!(
            minimal_reversible_extension(std::slice::from_ref(&sym), &exact()),
            vec![sym]
        );
    }

    #[test]
    fn hull_membership_verdicts() {
        let r1 = ProbVector::<Q>::from_ratios(&[(2, 5), (3, 5)]).unwrap();
        let r2 = ProbVector::<Q>::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let t = ProbVector::<Q>::from_ratios(&[(41, 105), (64, 105)]).unwrap();
        let verts = vec![r1.clone(), r2];
        assert!(!convex_hull_membership(&t, &verts, &exact()).unwrap());
        assert!(convex_hull_membership(&r1, &verts, &exact()).unwrap());
    }

    #[test]
    fn invariant_hull_and_reversed_witness() {
        let u = ProbVector::<Q>::from_ratios(&[(19, 45), (26, 45)]).unwrap();
        let v = ProbVector::<Q>::from_ratios(&[(5, 9), (4, 9)]).unwrap();
        let hull = VertexCredalSet::new(vec![u.clone(), v.clone()]).unwrap();
        let mats = MatrixSet::new(vec![p1(), p2()], true).unwrap();
        assert_eq!(check_invariant_hull(&hull, &mats, &exact()).unwrap(), None);

        let rev = q_reverse(&p1(), &u, &exact()).unwrap();
        let mats = MatrixSet::new(vec![p1(), p2(), rev], true).unwrap();
        let w = check_invariant_hull(&hull, &mats, &exact()).unwrap().unwrap();
        assert_eq!((w.vertex, w.matrix), (1, 2));
        assert!(w.image[0] < q(19, 45));
        assert!((w.image[0].to_f64() - 0.3897).abs() < 1e-4);
    }

    #[test]
    fn forward_vertices_cardinality() {
        let u = ProbVector::<Q>::from_ratios(&[(19, 45), (26, 45)]).unwrap();
        let v = ProbVector::<Q>::from_ratios(&[(5, 9), (4, 9)]).unwrap();
        let marg = VertexCredalSet::new(vec![u, v]).unwrap();
        let mats = MatrixSet::new(vec![p1(), p2()], false).unwrap();
        assert_eq!(forward_joint_set_vertices(&marg, &mats).unwrap().len(), 4);
    }

    #[test]
    fn gamble_reversal() {
        let f = PathGamble::<Q>::from_fn(2, 3, |xs| Q::from_usize(xs[0] * 4 + xs[1] * 2 + xs[2]));
        let r = reverse_gamble(&f);
        for p in Path::enumerate(2, 3) {
            let xs = p.states();
            assert_eq!(*r.value(&p), Q::from_usize(xs[2] * 4 + xs[1] * 2 + xs[0]));
        }
        assert_eq!(reverse_gamble(&r), f);
    }
}
