//! Linear programs and the lower/upper expectation programs built on them.
//!
//! The solver is a dense two-phase primal simplex with Bland's rule. It is
//! generic over [`Scalar`], so programs over [`crate::Rational`] are solved
//! exactly and `f64` programs use small pivot thresholds. Desk-scale programs
//! only; there is no sparsity or presolve.

use std::fmt::Write as _;

use crate::chain::Path;
use crate::credal::{IntervalJointSet, PathGamble};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Scalar, Tolerance};

/// Default cap on `|S|^N` for N-step programs.
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `min/max c x` subject to linear rows and per-variable bounds
/// `lo <= x <= hi` (`hi = None` means unbounded above).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub sense: Sense,
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub bounds: Vec<(T, Option<T>)>,
    pub names: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome<T> {
    pub status: LpStatus,
    pub value: Option<T>,
    pub solution: Option<Vec<T>>,
}

impl<T: Scalar> LpOutcome<T> {
    fn without_solution(status: LpStatus) -> Self {
        LpOutcome {
            status,
            value: None,
            solution: None,
        }
    }
}

impl<T: Scalar> LinearProgram<T> {
    /// Program over `objective.len()` variables, all bounded below by zero.
    pub fn new(sense: Sense, objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![(T::zero(), None); n],
            names: None,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bounds(&mut self, var: usize, lo: T, hi: Option<T>) {
        self.bounds[var] = (lo, hi);
    }

    pub fn add_constraint(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Adds `sum coeff * x[var] (relation) rhs` from sparse terms.
    pub fn add_sparse(&mut self, terms: &[(usize, T)], relation: Relation, rhs: T) {
        let mut coeffs = vec![T::zero(); self.n_vars()];
        for (var, c) in terms {
            coeffs[*var] = coeffs[*var].clone() + c.clone();
        }
        self.add_constraint(coeffs, relation, rhs);
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        self.names = Some(names);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_vars();
        if self.bounds.len() != n {
            return Err(Error::MalformedProgram(format!(
                "{} bounds for {} variables",
                self.bounds.len(),
                n
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::MalformedProgram(format!(
                    "row {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if let Some(hi) = hi {
                if hi < lo {
                    return Err(Error::MalformedProgram(format!("variable {j} has lo > hi")));
                }
            }
        }
        if let Some(names) = &self.names {
            if names.len() != n {
                return Err(Error::MalformedProgram("name count differs from variable count".into()));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        dot(&self.objective, x)
    }

    /// Largest violation of any row or bound at `x` (zero when feasible).
    pub fn max_violation(&self, x: &[T]) -> T {
        let mut worst = T::zero();
        for c in &self.constraints {
            let lhs = dot(&c.coeffs, x);
            let v = match c.relation {
                Relation::Eq => (lhs - c.rhs.clone()).abs(),
                Relation::Le => T::max_of(lhs - c.rhs.clone(), T::zero()),
                Relation::Ge => T::max_of(c.rhs.clone() - lhs, T::zero()),
            };
            worst = T::max_of(worst, v);
        }
        for (xj, (lo, hi)) in x.iter().zip(&self.bounds) {
            worst = T::max_of(worst, lo.clone() - xj.clone());
            if let Some(hi) = hi {
                worst = T::max_of(worst, xj.clone() - hi.clone());
            }
        }
        worst
    }

    fn var_name(&self, j: usize) -> String {
        match &self.names {
            Some(names) => names[j].clone(),
            None => format!("x{j}"),
        }
    }

    /// Plain-text dump in CPLEX LP format, variables in program order.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::new();
        out.push_str(match self.sense {
            Sense::Minimize => "Minimize\n",
            Sense::Maximize => "Maximize\n",
        });
        let _ = writeln!(out, " obj: {}", self.linear_expr(&self.objective));
        out.push_str("Subject To\n");
        for (i, c) in self.constraints.iter().enumerate() {
            let rel = match c.relation {
                Relation::Eq => "=",
                Relation::Le => "<=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " c{i}: {} {rel} {}", self.linear_expr(&c.coeffs), fmt_num(&c.rhs));
        }
        out.push_str("Bounds\n");
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            let name = self.var_name(j);
            match hi {
                Some(hi) => {
                    let _ = writeln!(out, " {} <= {name} <= {}", fmt_num(lo), fmt_num(hi));
                }
                None => {
                    let _ = writeln!(out, " {name} >= {}", fmt_num(lo));
                }
            }
        }
        out.push_str("End\n");
        out
    }

    fn linear_expr(&self, coeffs: &[T]) -> String {
        let mut terms = Vec::new();
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let name = self.var_name(j);
            if terms.is_empty() && !c.is_negative() {
                terms.push(format!("{} {name}", fmt_num(&c.abs())));
            } else {
                terms.push(format!("{sign} {} {name}", fmt_num(&c.abs())));
            }
        }
        if terms.is_empty() {
            "0 x0".to_string()
        } else {
            terms.join(" ")
        }
    }
}

fn fmt_num<T: Scalar>(v: &T) -> String {
    // LP files have no fraction syntax
    let f = v.to_f64();
    format!("{f}")
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Pivot and reduced-cost thresholds for floating programs.
fn pivot_eps<T: Scalar>() -> T {
    if T::EXACT {
        T::zero()
    } else {
        T::from_f64(1e-11)
    }
}

/// Dense simplex tableau over equality rows with nonnegative variables.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    n_cols: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, pv) in self.rows[r].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - factor.clone() * pv.clone();
                }
            }
            self.rhs[r] = self.rhs[r].clone() - factor * pivot_rhs.clone();
        }
        self.basis[row] = col;
    }

    /// Reduced costs `c_j - c_B B^{-1} A_j` for the current basis.
    fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut reduced = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (rc, a) in reduced.iter_mut().zip(&self.rows[r]) {
                *rc = rc.clone() - cb.clone() * a.clone();
            }
        }
        reduced
    }

    /// Minimizes `cost` over columns `< active_cols` with Bland's rule.
    fn optimize(&mut self, cost: &[T], active_cols: usize) -> Phase {
        let eps = pivot_eps::<T>();
        let neg_eps = -eps.clone();
        let mut reduced = self.reduced_costs(cost);
        loop {
            let entering = (0..active_cols).find(|&j| reduced[j] < neg_eps && !self.basis.contains(&j));
            let Some(col) = entering else {
                return Phase::Optimal;
            };
            let mut leaving: Option<(usize, T)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if *a <= eps {
                    continue;
                }
                let ratio = T::max_of(self.rhs[r].clone(), T::zero()) / a.clone();
                leaving = match leaving {
                    None => Some((r, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio || (ratio == best_ratio && self.basis[r] < self.basis[best]) {
                            Some((r, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((row, _)) = leaving else {
                return Phase::Unbounded;
            };
            self.pivot(row, col);
            // update reduced costs with the new pivot row
            let factor = reduced[col].clone();
            for (rc, a) in reduced.iter_mut().zip(&self.rows[row]) {
                *rc = rc.clone() - factor.clone() * a.clone();
            }
        }
    }
}

/// Solves `lp`. Infeasibility and unboundedness are reported in the status;
/// only malformed programs produce an error.
pub fn solve<T: Scalar>(lp: &LinearProgram<T>, tol: &Tolerance<T>) -> Result<LpOutcome<T>> {
    lp.validate()?;
    let n = lp.n_vars();

    // Standard form: x = lo + x', x' >= 0, one equality row per constraint
    // and per finite upper bound; slack columns follow the structural ones.
    let mut rows: Vec<Vec<(usize, T)>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    let mut n_cols = n;
    // private slack (column, coefficient) usable as an initial basic variable
    let mut private: Vec<Option<(usize, T)>> = Vec::new();

    for c in &lp.constraints {
        let shift = lp
            .bounds
            .iter()
            .zip(&c.coeffs)
            .fold(T::zero(), |acc, ((lo, _), a)| acc + a.clone() * lo.clone());
        let mut row: Vec<(usize, T)> = c
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| (j, a.clone()))
            .collect();
        let slack = match c.relation {
            Relation::Eq => None,
            Relation::Le => Some(T::one()),
            Relation::Ge => Some(-T::one()),
        };
        let slack = slack.map(|s| {
            row.push((n_cols, s.clone()));
            n_cols += 1;
            (n_cols - 1, s)
        });
        rows.push(row);
        rhs.push(c.rhs.clone() - shift);
        private.push(slack);
    }
    for (j, (lo, hi)) in lp.bounds.iter().enumerate() {
        if let Some(hi) = hi {
            rows.push(vec![(j, T::one()), (n_cols, T::one())]);
            rhs.push(hi.clone() - lo.clone());
            private.push(Some((n_cols, T::one())));
            n_cols += 1;
        }
    }
    // nonnegative right-hand sides
    for i in 0..rows.len() {
        if rhs[i].is_negative() {
            rhs[i] = -rhs[i].clone();
            for (_, a) in rows[i].iter_mut() {
                *a = -a.clone();
            }
            if let Some((_, s)) = private[i].as_mut() {
                *s = -s.clone();
            }
        }
    }

    let m = rows.len();
    let mut basis = Vec::with_capacity(m);
    let mut n_artificial = 0;
    let first_artificial = n_cols;
    for p in &private {
        match p {
            Some((col, s)) if *s == T::one() => basis.push(*col),
            _ => {
                basis.push(first_artificial + n_artificial);
                n_artificial += 1;
            }
        }
    }
    let total_cols = n_cols + n_artificial;
    let mut dense = vec![vec![T::zero(); total_cols]; m];
    for (i, row) in rows.iter().enumerate() {
        for (j, a) in row {
            dense[i][*j] = a.clone();
        }
        if basis[i] >= first_artificial {
            dense[i][basis[i]] = T::one();
        }
    }
    let mut tab = Tableau {
        rows: dense,
        rhs,
        basis,
        n_cols: total_cols,
    };

    // Phase 1: minimize the sum of artificials.
    if n_artificial > 0 {
        let mut cost = vec![T::zero(); total_cols];
        for c in cost.iter_mut().skip(first_artificial) {
            *c = T::one();
        }
        tab.optimize(&cost, total_cols);
        let infeasibility = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .filter(|(b, _)| **b >= first_artificial)
            .fold(T::zero(), |acc, (_, v)| acc + v.clone());
        if infeasibility > tol.lp {
            return Ok(LpOutcome::without_solution(LpStatus::Infeasible));
        }
        // drive remaining artificials out of the basis or drop redundant rows
        let eps = pivot_eps::<T>();
        let mut r = 0;
        while r < tab.rows.len() {
            if tab.basis[r] < first_artificial {
                r += 1;
                continue;
            }
            let col = (0..first_artificial).find(|&j| tab.rows[r][j].abs() > eps);
            match col {
                Some(col) => {
                    tab.pivot(r, col);
                    r += 1;
                }
                None => {
                    tab.rows.remove(r);
                    tab.rhs.remove(r);
                    tab.basis.remove(r);
                }
            }
        }
        for row in tab.rows.iter_mut() {
            row.truncate(first_artificial);
        }
        tab.n_cols = first_artificial;
        for v in tab.rhs.iter_mut() {
            if v.is_negative() {
                *v = T::zero();
            }
        }
    }

    // Phase 2.
    let mut cost = vec![T::zero(); tab.n_cols];
    for (j, c) in lp.objective.iter().enumerate() {
        cost[j] = match lp.sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c.clone(),
        };
    }
    if let Phase::Unbounded = tab.optimize(&cost, tab.n_cols) {
        return Ok(LpOutcome::without_solution(LpStatus::Unbounded));
    }

    let mut x: Vec<T> = lp.bounds.iter().map(|(lo, _)| lo.clone()).collect();
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = x[b].clone() + tab.rhs[r].clone();
        }
    }
    let value = lp.objective_value(&x);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        value: Some(value),
        solution: Some(x),
    })
}

fn optimum<T: Scalar>(lp: &LinearProgram<T>, tol: &Tolerance<T>) -> Result<T> {
    let out = solve(lp, tol)?;
    match out.status {
        LpStatus::Optimal => Ok(out.value.expect("optimal outcome has a value")),
        LpStatus::Infeasible => Err(Error::EmptyCredalSet),
        LpStatus::Unbounded => Err(Error::Unbounded),
    }
}

/// Program over the entries of `Q` (row-major) for `Q` in the interval set,
/// optimizing `sum f(x, y) Q(x, y)`.
pub fn build_two_step_program<T: Scalar>(
    set: &IntervalJointSet<T>,
    gamble: &Matrix<T>,
    sense: Sense,
) -> Result<LinearProgram<T>> {
    let n = set.dim();
    if gamble.rows() != n || gamble.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: gamble.rows() * gamble.cols(),
        });
    }
    let mut lp = LinearProgram::new(sense, gamble.as_slice().to_vec());
    for (j, (lo, hi)) in set.lower().as_slice().iter().zip(set.upper().as_slice()).enumerate() {
        lp.set_bounds(j, lo.clone(), Some(hi.clone()));
    }
    lp.add_constraint(vec![T::one(); n * n], Relation::Eq, T::one());
    Ok(lp)
}

/// `min_{Q in set} sum f Q`.
pub fn lower_expectation_two_step<T: Scalar>(
    set: &IntervalJointSet<T>,
    gamble: &Matrix<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    optimum(&build_two_step_program(set, gamble, Sense::Minimize)?, tol)
}

/// `max_{Q in set} sum f Q`.
pub fn upper_expectation_two_step<T: Scalar>(
    set: &IntervalJointSet<T>,
    gamble: &Matrix<T>,
    tol: &Tolerance<T>,
) -> Result<T> {
    optimum(&build_two_step_program(set, gamble, Sense::Maximize)?, tol)
}

/// Program for an `N`-step path gamble over an interval joint set.
///
/// Variables, in order: `p` over all paths in lexicographic order, then
/// `Q_1, ..., Q_{N-1}` row-major. Rows: each consecutive pairwise marginal of
/// `p` equals the matching `Q_k`; adjacent `Q_k` are marginally compatible
/// (implied by the first group, kept explicit); `sum p = 1`. Each `Q_k` is
/// boxed by the set's bounds.
pub fn build_nstep_program<T: Scalar>(
    set: &IntervalJointSet<T>,
    gamble: &PathGamble<T>,
    sense: Sense,
    budget: usize,
) -> Result<LinearProgram<T>> {
    let n = set.dim();
    let horizon = gamble.horizon();
    if horizon < 2 {
        return Err(Error::InvalidParameter("horizon must be at least 2".into()));
    }
    if gamble.n_states() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gamble.n_states(),
        });
    }
    let n_paths = n
        .checked_pow(horizon as u32)
        .filter(|&v| v <= budget)
        .ok_or(Error::BudgetExceeded {
            required: n.saturating_pow(horizon as u32),
            budget,
        })?;
    let pair = n * n;
    let q_offset = |k: usize| n_paths + k * pair;
    let n_vars = n_paths + (horizon - 1) * pair;

    let mut objective = gamble.values().to_vec();
    objective.resize(n_vars, T::zero());
    let mut lp = LinearProgram::new(sense, objective);

    let mut names: Vec<String> = Path::enumerate(n, horizon)
        .map(|p| {
            let s: Vec<String> = p.states().iter().map(usize::to_string).collect();
            format!("p_{}", s.join("_"))
        })
        .collect();
    for k in 0..horizon - 1 {
        for x in 0..n {
            for y in 0..n {
                names.push(format!("Q{}_{x}_{y}", k + 1));
            }
        }
    }

    // (a) pairwise marginals of p
    let mut marginal_terms: Vec<Vec<(usize, T)>> = vec![Vec::new(); (horizon - 1) * pair];
    for (idx, path) in Path::enumerate(n, horizon).enumerate() {
        let xs = path.states();
        for k in 0..horizon - 1 {
            marginal_terms[k * pair + xs[k] * n + xs[k + 1]].push((idx, T::one()));
        }
    }
    for (slot, mut terms) in marginal_terms.into_iter().enumerate() {
        terms.push((n_paths + slot, -T::one()));
        lp.add_sparse(&terms, Relation::Eq, T::zero());
    }
    // (b) compatibility of adjacent joint matrices
    for k in 0..horizon.saturating_sub(2) {
        for s in 0..n {
            let mut terms = Vec::with_capacity(2 * n);
            for a in 0..n {
                terms.push((q_offset(k) + a * n + s, T::one()));
            }
            for b in 0..n {
                terms.push((q_offset(k + 1) + s * n + b, -T::one()));
            }
            lp.add_sparse(&terms, Relation::Eq, T::zero());
        }
    }
    // (c) box on every Q_k
    for k in 0..horizon - 1 {
        for (j, (lo, hi)) in set.lower().as_slice().iter().zip(set.upper().as_slice()).enumerate() {
            lp.set_bounds(q_offset(k) + j, lo.clone(), Some(hi.clone()));
        }
    }
    // (d) normalization
    let terms: Vec<(usize, T)> = (0..n_paths).map(|i| (i, T::one())).collect();
    lp.add_sparse(&terms, Relation::Eq, T::one());

    Ok(lp.with_names(names))
}

pub fn lower_expectation_nstep<T: Scalar>(
    set: &IntervalJointSet<T>,
    gamble: &PathGamble<T>,
    budget: usize,
    tol: &Tolerance<T>,
) -> Result<T> {
    optimum(&build_nstep_program(set, gamble, Sense::Minimize, budget)?, tol)
}

pub fn upper_expectation_nstep<T: Scalar>(
    set: &IntervalJointSet<T>,
    gamble: &PathGamble<T>,
    budget: usize,
    tol: &Tolerance<T>,
) -> Result<T> {
    optimum(&build_nstep_program(set, gamble, Sense::Maximize, budget)?, tol)
}
