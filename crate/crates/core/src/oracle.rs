//! Brute-force verifiers: exhaustive path enumeration, grid search over
//! boxes, and enumeration of compatible laws on a grid.
//!
//! These are deliberately naive and serve as independent references for the
//! LP-based routines. Everything is deterministic: grids are scanned in
//! row-major order with each entry's values ascending.

use log::warn;

use crate::chain::{Path, TransitionLaw};
use crate::credal::{Gamble2, IntervalJointSet, PathGamble};
use crate::error::{Error, Result};
use crate::joint::{is_marginally_compatible, law_from_joint_sequence, JointMatrix, JointSequence};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, Tolerance};
use crate::walk::IntervalWeightSet;

/// Default cap on grid points or enumerated objects.
pub const DEFAULT_GRID_BUDGET: usize = 100_000_000;

/// Lattice spacing and evaluation cap for grid scans.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    step: T,
    budget: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(step: T, budget: usize) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::InvalidParameter("grid step must be positive".into()));
        }
        if budget == 0 {
            return Err(Error::InvalidParameter("grid budget must be at least 1".into()));
        }
        Ok(GridSpec { step, budget })
    }

    pub fn with_step(step: T) -> Result<Self> {
        Self::new(step, DEFAULT_GRID_BUDGET)
    }

    pub fn step(&self) -> &T {
        &self.step
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Multiples of `step` strictly inside `(lo, hi)`, with both endpoints.
    fn values(&self, lo: &T, hi: &T) -> Vec<T> {
        if lo == hi {
            return vec![lo.clone()];
        }
        let s = self.step.to_f64();
        let k_lo = ((lo.to_f64() / s).floor() as i64 - 1).max(0);
        let k_hi = (hi.to_f64() / s).ceil() as i64 + 1;
        let mut out = vec![lo.clone()];
        for k in k_lo..=k_hi {
            let v = T::from_usize(k as usize) * self.step.clone();
            if v > *lo && v < *hi {
                out.push(v);
            }
        }
        out.push(hi.clone());
        out
    }
}

/// All path probabilities of `law`, paths in lexicographic order.
pub fn enumerate_path_distribution<T: Scalar>(law: &TransitionLaw<T>, budget: usize) -> Result<Vec<(Path, T)>> {
    let n = law.n_states();
    let horizon = law.horizon();
    check_budget(n, horizon, budget)?;
    Path::enumerate(n, horizon)
        .map(|p| {
            let prob = law.path_probability(&p)?;
            Ok((p, prob))
        })
        .collect()
}

fn check_budget(n: usize, horizon: usize, budget: usize) -> Result<()> {
    let required = n.checked_pow(horizon as u32).unwrap_or(usize::MAX);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// `E_law[f]` by summing over all paths.
pub fn law_expectation<T: Scalar>(law: &TransitionLaw<T>, f: &PathGamble<T>, budget: usize) -> Result<T> {
    if f.horizon() != law.horizon() || f.n_states() != law.n_states() {
        return Err(Error::DimensionMismatch {
            expected: law.n_states().pow(law.horizon() as u32),
            found: f.values().len(),
        });
    }
    Ok(enumerate_path_distribution(law, budget)?
        .into_iter()
        .zip(f.values())
        .fold(T::zero(), |acc, ((_, p), v)| acc + p * v.clone()))
}

/// Calls `visit` on every grid member of `set`, returning the count.
///
/// Entries are scanned row-major; the last entry is set to `1 - sum(others)`
/// and the point kept only when that value lies in its bounds (within
/// `tol.eq`). Partial sums prune branches that cannot reach the simplex.
pub fn for_each_grid_point<T: Scalar>(
    set: &IntervalJointSet<T>,
    grid: &GridSpec<T>,
    tol: &Tolerance<T>,
    mut visit: impl FnMut(&[T]),
) -> Result<usize> {
    let lo = set.lower().as_slice();
    let hi = set.upper().as_slice();
    let m = lo.len();
    let axes: Vec<Vec<T>> = (0..m - 1).map(|j| grid.values(&lo[j], &hi[j])).collect();
    let required = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .unwrap_or(usize::MAX);
    if required > grid.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: grid.budget,
        });
    }
    // suffix sums of bounds for pruning
    let mut lo_rest = vec![T::zero(); m + 1];
    let mut hi_rest = vec![T::zero(); m + 1];
    for j in (0..m).rev() {
        lo_rest[j] = lo_rest[j + 1].clone() + lo[j].clone();
        hi_rest[j] = hi_rest[j + 1].clone() + hi[j].clone();
    }
    let mut point = vec![T::zero(); m];
    let mut count = 0;
    let ctx = Scan {
        axes: &axes,
        lo_rest: &lo_rest,
        hi_rest: &hi_rest,
        last_lo: &lo[m - 1],
        last_hi: &hi[m - 1],
        slack: &tol.eq,
    };
    ctx.descend(0, T::zero(), &mut point, &mut count, &mut visit);
    Ok(count)
}

struct Scan<'a, T> {
    axes: &'a [Vec<T>],
    lo_rest: &'a [T],
    hi_rest: &'a [T],
    last_lo: &'a T,
    last_hi: &'a T,
    slack: &'a T,
}

impl<T: Scalar> Scan<'_, T> {
    fn descend(&self, depth: usize, sum: T, point: &mut [T], count: &mut usize, visit: &mut impl FnMut(&[T])) {
        if depth == self.axes.len() {
            let last = T::one() - sum;
            if last >= self.last_lo.clone() - self.slack.clone() && last <= self.last_hi.clone() + self.slack.clone() {
                point[depth] = last;
                *count += 1;
                visit(point);
            }
            return;
        }
        for v in &self.axes[depth] {
            let s = sum.clone() + v.clone();
            if s.clone() + self.lo_rest[depth + 1].clone() > T::one() + self.slack.clone() {
                // values ascend, later ones overshoot too
                break;
            }
            if s.clone() + self.hi_rest[depth + 1].clone() < T::one() - self.slack.clone() {
                continue;
            }
            point[depth] = v.clone();
            self.descend(depth + 1, s, point, count, visit);
        }
    }
}

/// Every grid member of `set` as a joint matrix.
pub fn grid_members<T: Scalar>(
    set: &IntervalJointSet<T>,
    grid: &GridSpec<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<JointMatrix<T>>> {
    let n = set.dim();
    let mut out = Vec::new();
    for_each_grid_point(set, grid, tol, |p| {
        out.push(JointMatrix::from_trusted(
            Matrix::from_vec(n, n, p.to_vec()).expect("grid point has n^2 entries"),
        ));
    })?;
    Ok(out)
}

fn grid_extremum<T: Scalar>(
    set: &IntervalJointSet<T>,
    f: &Gamble2<T>,
    grid: &GridSpec<T>,
    tol: &Tolerance<T>,
    minimize: bool,
) -> Result<T> {
    let n = set.dim();
    if f.rows() != n || f.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: f.rows() * f.cols(),
        });
    }
    let fv = f.as_slice();
    let mut best: Option<T> = None;
    for_each_grid_point(set, grid, tol, |p| {
        let v = p
            .iter()
            .zip(fv)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        best = Some(match best.take() {
            None => v,
            Some(b) if minimize => T::min_of(b, v),
            Some(b) => T::max_of(b, v),
        });
    })?;
    best.ok_or(Error::NoFeasibleGridPoint)
}

/// Smallest `sum f Q` over the grid members of `set`.
pub fn grid_min_expectation<T: Scalar>(
    set: &IntervalJointSet<T>,
    f: &Gamble2<T>,
    grid: &GridSpec<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    grid_extremum(set, f, grid, tol, true)
}

/// Largest `sum f Q` over the grid members of `set`.
pub fn grid_max_expectation<T: Scalar>(
    set: &IntervalJointSet<T>,
    f: &Gamble2<T>,
    grid: &GridSpec<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    grid_extremum(set, f, grid, tol, false)
}

/// Smallest `sum f w / sum w` over the weight grid of `set` (all entries
/// scanned independently, zero-total points skipped).
pub fn grid_min_walk_expectation<T: Scalar>(
    set: &IntervalWeightSet<T>,
    f: &Gamble2<T>,
    grid: &GridSpec<T>,
) -> Result<T> {
    let axes: Vec<Vec<T>> = set
        .lower()
        .as_slice()
        .iter()
        .zip(set.upper().as_slice())
        .map(|(lo, hi)| grid.values(lo, hi))
        .collect();
    let required = axes
        .iter()
        .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
        .unwrap_or(usize::MAX);
    if required > grid.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: grid.budget,
        });
    }
    let fv = f.as_slice();
    let mut best: Option<T> = None;
    let mut idx = vec![0usize; axes.len()];
    'outer: loop {
        let (mut num, mut den) = (T::zero(), T::zero());
        for (j, &k) in idx.iter().enumerate() {
            num = num + fv[j].clone() * axes[j][k].clone();
            den = den + axes[j][k].clone();
        }
        if den.is_positive() {
            let v = num / den;
            best = Some(match best.take() {
                None => v,
                Some(b) => T::min_of(b, v),
            });
        }
        for j in (0..idx.len()).rev() {
            idx[j] += 1;
            if idx[j] < axes[j].len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    best.ok_or(Error::NoFeasibleGridPoint)
}

/// All sequences `(Q_1, ..., Q_{N-1})` of grid members that are marginally
/// compatible within `tol.eq`, in lexicographic order of member indices.
/// An empty grid intersection yields an empty list and a warning.
pub fn enumerate_compatible_sequences<T: Scalar>(
    set: &IntervalJointSet<T>,
    horizon: usize,
    grid: &GridSpec<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<JointSequence<T>>> {
    if horizon < 2 {
        return Err(Error::InvalidParameter("horizon must be at least 2".into()));
    }
    let members = grid_members(set, grid, tol)?;
    if members.is_empty() {
        warn!("{}", Error::NoFeasibleGridPoint);
        return Ok(Vec::new());
    }
    // successor lists
    let next: Vec<Vec<usize>> = members
        .iter()
        .map(|a| {
            (0..members.len())
                .filter(|&j| is_marginally_compatible(a, &members[j], tol))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::with_capacity(horizon - 1);
    for start in 0..members.len() {
        stack.push(start);
        extend(&members, &next, horizon - 1, &mut stack, &mut out, grid.budget, tol)?;
        stack.pop();
    }
    Ok(out)
}

fn extend<T: Scalar>(
    members: &[JointMatrix<T>],
    next: &[Vec<usize>],
    len: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<JointSequence<T>>,
    budget: usize,
    tol: &Tolerance<T>,
) -> Result<()> {
    if stack.len() == len {
        if out.len() == budget {
            return Err(Error::BudgetExceeded {
                required: budget + 1,
                budget,
            });
        }
        let mats = stack.iter().map(|&i| members[i].clone()).collect();
        out.push(JointSequence::new(mats, tol)?);
        return Ok(());
    }
    let last = *stack.last().expect("nonempty stack");
    for &j in &next[last] {
        stack.push(j);
        extend(members, next, len, stack, out, budget, tol)?;
        stack.pop();
    }
    Ok(())
}

/// Laws of all compatible grid sequences.
pub fn enumerate_compatible_laws<T: Scalar>(
    set: &IntervalJointSet<T>,
    horizon: usize,
    grid: &GridSpec<T>,
    tol: &Tolerance<T>,
) -> Result<Vec<TransitionLaw<T>>> {
    Ok(enumerate_compatible_sequences(set, horizon, grid, tol)?
        .iter()
        .map(law_from_joint_sequence)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{ProbVector, StochasticMatrix};
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    #[test]
    fn point_mass_law() {
        let law = TransitionLaw::new(ProbVector::<Q>::point(2, 0), vec![StochasticMatrix::identity(2)]).unwrap();
        let dist = enumerate_path_distribution(&law, 100).unwrap();
        let probs: Vec<Q> = dist.into_iter().map(|(_, p)| p).collect();
        assert_eq!(probs, vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        assert!(matches!(
            enumerate_path_distribution(&law, 3),
            Err(Error::BudgetExceeded { required: 4, budget: 3 })
        ));
    }

    #[test]
    fn single_product_mass() {
        let p1 = StochasticMatrix::<Q>::from_ratios(&[&[(1, 5), (4, 5)], &[(7, 10), (3, 10)]]).unwrap();
        let law = TransitionLaw::new(ProbVector::from_ratios(&[(5, 9), (4, 9)]).unwrap(), vec![p1]).unwrap();
        let dist = enumerate_path_distribution(&law, 100).unwrap();
        assert_eq!(dist[0].1, q(1, 9));
        assert_eq!(dist.iter().fold(q(0, 1), |a, (_, p)| a + p.clone()), q(1, 1));
    }

    #[test]
    fn grid_values_include_endpoints() {
        let g = GridSpec::<Q>::new(q(1, 4), 10).unwrap();
        assert_eq!(g.values(&q(1, 10), &q(3, 5)), vec![q(1, 10), q(1, 4), q(1, 2), q(3, 5)]);
        assert_eq!(g.values(&q(1, 4), &q(1, 2)), vec![q(1, 4), q(1, 2)]);
        assert!(GridSpec::<Q>::new(q(0, 1), 10).is_err());
    }

    #[test]
    fn degenerate_box_grid_is_exact() {
        let m = JointMatrix::<Q>::from_ratios(&[&[(7, 75), (28, 75)], &[(28, 75), (12, 75)]]).unwrap();
        let set = IntervalJointSet::degenerate(&m);
        let grid = GridSpec::with_step(q(1, 100)).unwrap();
        let mut f = Matrix::zeros(2, 2);
        f[(0, 0)] = q(1, 1);
        f[(1, 1)] = q(1, 1);
        assert_eq!(
            grid_min_expectation(&set, &f, &grid, &Tolerance::zero()).unwrap(),
            q(19, 75)
        );
        let laws = enumerate_compatible_laws(&set, 4, &grid, &Tolerance::zero()).unwrap();
        assert_eq!(laws.len(), 1);
    }

    #[test]
    fn empty_grid_intersection() {
        // Q(0,0) on {0, 1/2, 1} leaves Q(1,1) in {1, 1/2, 0}, never in [3/10, 2/5]
        let lo = Matrix::from_ratios(&[&[(0, 1), (0, 1)], &[(0, 1), (3, 10)]]).unwrap();
        let hi = Matrix::from_ratios(&[&[(1, 1), (0, 1)], &[(0, 1), (2, 5)]]).unwrap();
        let set = IntervalJointSet::<Q>::new(lo, hi).unwrap();
        let grid = GridSpec::with_step(q(1, 2)).unwrap();
        let f = Matrix::zeros(2, 2);
        assert_eq!(
            grid_min_expectation(&set, &f, &grid, &Tolerance::zero()),
            Err(Error::NoFeasibleGridPoint)
        );
        assert!(enumerate_compatible_laws(&set, 3, &grid, &Tolerance::zero())
            .unwrap()
            .is_empty());
    }
}
