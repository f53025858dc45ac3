//! Random walks on weighted graphs, precise and interval-weighted.

use crate::chain::{ProbVector, StochasticMatrix};
use crate::credal::{convex_hull_membership, Gamble2, IntervalJointSet};
use crate::error::{Error, Result};
use crate::joint::{symmetry_violation, JointMatrix};
use crate::linalg::Matrix;
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense};
use crate::scalar::{Scalar, Tolerance};

/// Nonnegative edge weights; undirected matrices are symmetric and connected.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T> {
    w: Matrix<T>,
    directed: bool,
}

impl<T: Scalar> WeightMatrix<T> {
    pub fn new(w: Matrix<T>, directed: bool) -> Result<Self> {
        validate_weights(&w)?;
        if w.total().is_zero() {
            return Err(Error::DegenerateWeights);
        }
        if !directed {
            if let Some((x, y)) = symmetry_violation(&w, &Tolerance::zero()) {
                return Err(Error::AsymmetricWeights(x, y));
            }
            if !is_connected(&w) {
                return Err(Error::Disconnected);
            }
        }
        Ok(WeightMatrix { w, directed })
    }

    pub fn undirected(w: Matrix<T>) -> Result<Self> {
        Self::new(w, false)
    }

    pub fn directed(w: Matrix<T>) -> Result<Self> {
        Self::new(w, true)
    }

    pub fn from_ratios(rows: &[&[(i64, i64)]], directed: bool) -> Result<Self> {
        Self::new(Matrix::from_ratios(rows)?, directed)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.w
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }

    /// Outgoing weight per vertex.
    pub fn out_weights(&self) -> Vec<T> {
        self.w.row_sums()
    }

    /// Incoming weight per vertex.
    pub fn in_weights(&self) -> Vec<T> {
        self.w.col_sums()
    }

    pub fn total(&self) -> T {
        self.w.total()
    }

    /// `c w` for `c > 0`.
    pub fn scaled(&self, c: &T) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::InvalidParameter("scale must be positive".into()));
        }
        Ok(WeightMatrix {
            w: self.w.scale(c),
            directed: self.directed,
        })
    }

    pub fn transpose(&self) -> Self {
        WeightMatrix {
            w: self.w.transpose(),
            directed: self.directed,
        }
    }
}

fn validate_weights<T: Scalar>(w: &Matrix<T>) -> Result<()> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch {
            expected: w.rows() * w.rows(),
            found: w.rows() * w.cols(),
        });
    }
    if w.rows() == 0 {
        return Err(Error::EmptyInput("weight matrix"));
    }
    match w.as_slice().iter().position(|v| v.is_negative()) {
        Some(index) => Err(Error::NegativeEntry { index }),
        None => Ok(()),
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Union-find over positive-weight edges, ignoring direction.
pub fn is_connected<T: Scalar>(w: &Matrix<T>) -> bool {
    let n = w.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    for x in 0..n {
        for y in 0..n {
            if w[(x, y)].is_positive() {
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                parent[a] = b;
            }
        }
    }
    let root = find(&mut parent, 0);
    (1..n).all(|x| find(&mut parent, x) == root)
}

/// `P(x, y) = w(x, y) / w(x)` with `w(x)` the outgoing weight.
pub fn walk_transition<T: Scalar>(w: &WeightMatrix<T>) -> Result<StochasticMatrix<T>> {
    let n = w.dim();
    let out = w.out_weights();
    if let Some(x) = out.iter().position(|v| v.is_zero()) {
        return Err(Error::IsolatedVertex(x));
    }
    let mut p = Matrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            p[(x, y)] = w.w[(x, y)].clone() / out[x].clone();
        }
    }
    Ok(StochasticMatrix::from_trusted(p))
}

/// `π(x) = w(x) / W`, undirected walks only.
pub fn walk_stationary<T: Scalar>(w: &WeightMatrix<T>) -> Result<ProbVector<T>> {
    if w.directed {
        return Err(Error::DirectedUnsupported);
    }
    let out = w.out_weights();
    if let Some(x) = out.iter().position(|v| v.is_zero()) {
        return Err(Error::IsolatedVertex(x));
    }
    let total = w.total();
    Ok(ProbVector::from_trusted(
        out.into_iter().map(|v| v / total.clone()).collect(),
    ))
}

/// `Q(x, y) = w(x, y) / W`.
pub fn walk_joint<T: Scalar>(w: &WeightMatrix<T>) -> JointMatrix<T> {
    let total = w.total();
    JointMatrix::from_trusted(w.w.map(|v| v.clone() / total.clone()))
}

/// Box `[lower, upper]` of weight matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalWeightSet<T> {
    lower: Matrix<T>,
    upper: Matrix<T>,
    directed: bool,
}

impl<T: Scalar> IntervalWeightSet<T> {
    pub fn new(lower: Matrix<T>, upper: Matrix<T>) -> Result<Self> {
        validate_weights(&lower)?;
        validate_weights(&upper)?;
        if lower.rows() != upper.rows() {
            return Err(Error::DimensionMismatch {
                expected: lower.rows(),
                found: upper.rows(),
            });
        }
        let n = lower.cols();
        if let Some(i) = lower
            .as_slice()
            .iter()
            .zip(upper.as_slice())
            .position(|(lo, hi)| hi < lo)
        {
            return Err(Error::InvalidBounds(format!(
                "lower exceeds upper at ({}, {})",
                i / n,
                i % n
            )));
        }
        if upper.total().is_zero() {
            return Err(Error::DegenerateWeights);
        }
        Ok(IntervalWeightSet {
            lower,
            upper,
            directed: true,
        })
    }

    /// Requires both bounds symmetric.
    pub fn undirected(lower: Matrix<T>, upper: Matrix<T>) -> Result<Self> {
        for m in [&lower, &upper] {
            if let Some((x, y)) = symmetry_violation(m, &Tolerance::zero()) {
                return Err(Error::AsymmetricWeights(x, y));
            }
        }
        let mut set = Self::new(lower, upper)?;
        set.directed = false;
        Ok(set)
    }

    pub fn degenerate(w: &WeightMatrix<T>) -> Self {
        IntervalWeightSet {
            lower: w.w.clone(),
            upper: w.w.clone(),
            directed: w.directed,
        }
    }

    pub fn lower(&self) -> &Matrix<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Matrix<T> {
        &self.upper
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn dim(&self) -> usize {
        self.lower.rows()
    }

    pub fn contains(&self, w: &Matrix<T>) -> bool {
        w.rows() == self.dim()
            && w.cols() == self.dim()
            && w.as_slice()
                .iter()
                .zip(self.lower.as_slice().iter().zip(self.upper.as_slice()))
                .all(|(v, (lo, hi))| v >= lo && v <= hi)
    }
}

/// True iff both bounds equal their transposes, i.e. the box is closed
/// under `w -> w^T`.
pub fn is_symmetric_weight_set<T: Scalar>(set: &IntervalWeightSet<T>, tol: &Tolerance<T>) -> bool {
    symmetry_violation(&set.lower, tol).is_none() && symmetry_violation(&set.upper, tol).is_none()
}

/// Whether `q = w / W` for some `w` in the box: some `c > 0` has
/// `lower <= c q <= upper`.
pub fn induced_joint_contains<T: Scalar>(set: &IntervalWeightSet<T>, q: &JointMatrix<T>, tol: &Tolerance<T>) -> bool {
    if q.dim() != set.dim() {
        return false;
    }
    let mut c_lo = T::zero();
    let mut c_hi: Option<T> = None;
    for ((v, lo), hi) in q
        .matrix()
        .as_slice()
        .iter()
        .zip(set.lower.as_slice())
        .zip(set.upper.as_slice())
    {
        if v.is_zero() {
            if *lo > tol.eq {
                return false;
            }
            continue;
        }
        c_lo = T::max_of(c_lo, lo.clone() / v.clone());
        let h = hi.clone() / v.clone();
        c_hi = Some(match c_hi {
            Some(c) => T::min_of(c, h),
            None => h,
        });
    }
    match c_hi {
        Some(c_hi) => c_hi.is_positive() && c_lo <= c_hi.clone() + tol.eq.clone() * c_hi,
        None => false,
    }
}

/// Charnes–Cooper LP for `opt_w sum f w / W`: variables `y = t w`
/// (row-major) then `t = 1/W`, with `t lower <= y <= t upper`,
/// `sum y = 1` and `t >= 1 / sum upper`.
pub fn build_walk_program<T: Scalar>(
    set: &IntervalWeightSet<T>,
    gamble: &Gamble2<T>,
    sense: Sense,
) -> Result<LinearProgram<T>> {
    let n = set.dim();
    if gamble.rows() != n || gamble.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: gamble.rows() * gamble.cols(),
        });
    }
    let m = n * n;
    let mut objective = gamble.as_slice().to_vec();
    objective.push(T::zero());
    let mut program = LinearProgram::new(sense, objective);
    for j in 0..m {
        let lo = set.lower.as_slice()[j].clone();
        let hi = set.upper.as_slice()[j].clone();
        if !lo.is_zero() {
            program.add_sparse(&[(j, T::one()), (m, -lo)], Relation::Ge, T::zero());
        }
        program.add_sparse(&[(j, T::one()), (m, -hi)], Relation::Le, T::zero());
    }
    let terms: Vec<(usize, T)> = (0..m).map(|j| (j, T::one())).collect();
    program.add_sparse(&terms, Relation::Eq, T::one());
    program.set_bounds(m, T::one() / set.upper.total(), None);
    Ok(program)
}

fn walk_optimum<T: Scalar>(
    set: &IntervalWeightSet<T>,
    gamble: &Gamble2<T>,
    sense: Sense,
    tol: &Tolerance<T>,
) -> Result<T> {
    let out = lp::solve(&build_walk_program(set, gamble, sense)?, tol)?;
    match out.status {
        LpStatus::Optimal => Ok(out.value.expect("optimal outcome has a value")),
        LpStatus::Infeasible => Err(Error::EmptyCredalSet),
        LpStatus::Unbounded => Err(Error::Unbounded),
    }
}

/// `min_{w in set} sum f(x, y) w(x, y) / W(w)`.
pub fn walk_lower_expectation<T: Scalar>(
    set: &IntervalWeightSet<T>,
    gamble: &Gamble2<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    walk_optimum(set, gamble, Sense::Minimize, tol)
}

pub fn walk_upper_expectation<T: Scalar>(
    set: &IntervalWeightSet<T>,
    gamble: &Gamble2<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    walk_optimum(set, gamble, Sense::Maximize, tol)
}

/// Smallest interval joint set containing every `w / W` for `w` in the box
/// (`2 |S|^2` Charnes–Cooper LPs).
pub fn enclosing_joint_box<T: Scalar>(set: &IntervalWeightSet<T>, tol: &Tolerance<T>) -> Result<IntervalJointSet<T>> {
    let n = set.dim();
    let mut lower = Matrix::zeros(n, n);
    let mut upper = Matrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            let mut g = Matrix::zeros(n, n);
            g[(x, y)] = T::one();
            lower[(x, y)] = walk_lower_expectation(set, &g, tol)?;
            upper[(x, y)] = walk_upper_expectation(set, &g, tol)?;
        }
    }
    IntervalJointSet::new(lower, upper)
}

/// Two weight matrices, the transition matrix of their midpoint, and whether
/// it lies in the hull of their transition matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct NonconvexityWitness<T> {
    pub w1: WeightMatrix<T>,
    pub w2: WeightMatrix<T>,
    pub midpoint: StochasticMatrix<T>,
    pub in_hull: bool,
}

/// `W1 = [[1,3],[3,2]]`, `W2 = [[1,5],[5,2]]`: the midpoint's transition
/// matrix is not a mixture of theirs.
pub fn transition_set_nonconvexity_witness<T: Scalar>() -> Result<NonconvexityWitness<T>> {
    let w1 = WeightMatrix::<T>::from_ratios(&[&[(1, 1), (3, 1)], &[(3, 1), (2, 1)]], false)?;
    let w2 = WeightMatrix::from_ratios(&[&[(1, 1), (5, 1)], &[(5, 1), (2, 1)]], false)?;
    let half = T::ratio(1, 2);
    let mid = WeightMatrix::new(
        w1.matrix()
            .zip_with(w2.matrix(), |a, b| (a.clone() + b.clone()) * half.clone())?,
        false,
    )?;
    let midpoint = walk_transition(&mid)?;
    let verts = [walk_transition(&w1)?, walk_transition(&w2)?];
    let in_hull = convex_hull_membership(&midpoint, &verts, &Tolerance::zero())?;
    Ok(NonconvexityWitness {
        w1,
        w2,
        midpoint,
        in_hull,
    })
}
