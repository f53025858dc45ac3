use imprecise_markov::credal::{convex_hull_membership, set_symmetry_violation, tighten_bounds};
use imprecise_markov::joint::{reverse_joint_sequence, symmetry_violation};
use imprecise_markov::lp::{
    build_nstep_program, build_two_step_program, lower_expectation_nstep, lower_expectation_two_step,
    upper_expectation_nstep, upper_expectation_two_step,
};
use imprecise_markov::oracle::{
    enumerate_compatible_laws, grid_max_expectation, grid_min_expectation, grid_min_walk_expectation, law_expectation,
    DEFAULT_GRID_BUDGET,
};
use imprecise_markov::walk::{
    build_walk_program, enclosing_joint_box, walk_joint, walk_lower_expectation, walk_stationary, walk_transition,
    walk_upper_expectation,
};
use imprecise_markov::{
    stationary_distribution, GridSpec, IntervalJointSet, IntervalWeightSet, JointSequence, LinearProgram, Matrix,
    PathGamble, ProbVector, Scalar, Sense, StochasticMatrix, Tolerance, TransitionLaw, WeightMatrix,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::model::{build_path_gamble, matrix_value, parse_gamble_table, scalar_value, vector_value, Model, ModelFile};

/// Oracle grid steps: joint entries for two steps, sequences for longer
/// horizons, raw weights for walks.
pub const ORACLE_STEP_TWO: f64 = 1e-3;
pub const ORACLE_STEP_SEQUENCE: f64 = 0.25;
pub const ORACLE_STEP_WALK: f64 = 0.05;

/// The tolerance in force: defaults, then file overrides, then `--tol`
/// (which sets the equality and LP slack).
pub fn effective_tolerance<T: Scalar>(file: &ModelFile<T>, tol: Option<&str>) -> CliResult<Tolerance<T>> {
    let base = file.tolerance_override.clone().unwrap_or_else(T::default_tolerance);
    match tol {
        None => Ok(base),
        Some(text) => {
            let eps = T::parse_value(text).ok_or_else(|| CliError::parse(format!("invalid tolerance {text:?}")))?;
            if eps.is_negative() {
                return Err(CliError::parse("tolerance must be nonnegative"));
            }
            Ok(base.with_eq_lp(eps))
        }
    }
}

pub fn cmd_reverse<T: Scalar>(file: &ModelFile<T>, tol: &Tolerance<T>) -> CliResult<ModelFile<T>> {
    let model = match &file.model {
        Model::Law(law) => Model::Law(law.reverse(tol)?),
        Model::Sequence(seq) => Model::Sequence(reverse_joint_sequence(seq)),
        Model::Interval(b) => Model::Interval(b.transpose()),
        Model::Weights(w) => Model::Weights(w.transpose()),
        Model::WeightBox(b) => {
            let (lo, hi) = (b.lower().transpose(), b.upper().transpose());
            Model::WeightBox(if b.is_directed() {
                IntervalWeightSet::new(lo, hi)?
            } else {
                IntervalWeightSet::undirected(lo, hi)?
            })
        }
    };
    Ok(ModelFile {
        states: file.states.clone(),
        model,
        tolerance_override: file.tolerance_override.clone(),
    })
}

/// An entry pair `(x, y)`, `x < y`, whose values differ from `(y, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: usize,
    pub y: usize,
    /// Index of the offending matrix for sequence inputs.
    pub matrix: Option<usize>,
    pub at_xy: String,
    pub at_yx: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversibilityReport {
    pub witness: Option<Witness>,
}

impl ReversibilityReport {
    pub fn is_reversible(&self) -> bool {
        self.witness.is_none()
    }

    pub fn text(&self, states: &[String]) -> String {
        match &self.witness {
            None => "REVERSIBLE\n".into(),
            Some(w) => {
                let (a, b) = (&states[w.x], &states[w.y]);
                let which = w.matrix.map(|k| format!(" in matrix {k}")).unwrap_or_default();
                format!(
                    "NOT reversible: entry ({a}, {b}){which} is {} but ({b}, {a}) is {}\n",
                    w.at_xy, w.at_yx
                )
            }
        }
    }

    pub fn json(&self) -> Value {
        match &self.witness {
            None => json!({ "verdict": "REVERSIBLE", "witness": null }),
            Some(w) => json!({
                "verdict": "NOT",
                "witness": { "pair": [w.x, w.y], "matrix": w.matrix, "at_xy": w.at_xy, "at_yx": w.at_yx },
            }),
        }
    }
}

fn interval_text<T: Scalar>(lo: &T, hi: &T) -> String {
    format!("[{}, {}]", lo.to_text(), hi.to_text())
}

fn box_witness<T: Scalar>(lower: &Matrix<T>, upper: &Matrix<T>, (x, y): (usize, usize)) -> Witness {
    Witness {
        x,
        y,
        matrix: None,
        at_xy: interval_text(&lower[(x, y)], &upper[(x, y)]),
        at_yx: interval_text(&lower[(y, x)], &upper[(y, x)]),
    }
}

fn sequence_witness<T: Scalar>(seq: &JointSequence<T>, tol: &Tolerance<T>) -> CliResult<Option<Witness>> {
    let mats = seq.mats();
    for (k, q) in mats.iter().enumerate() {
        let t = q.transpose();
        if !convex_hull_membership(&t, mats, tol)? {
            let (x, y) = symmetry_violation(q.matrix(), tol).expect("a symmetric matrix is its own transpose");
            return Ok(Some(Witness {
                x,
                y,
                matrix: Some(k),
                at_xy: q.get(x, y).to_text(),
                at_yx: q.get(y, x).to_text(),
            }));
        }
    }
    Ok(None)
}

/// Reversibility as closure of the joint-matrix set under transposition.
///
/// Interval boxes are tightened first, a joint sequence (or the sequence of
/// a transition law) is read as the hull of its matrices, and weight inputs
/// are checked for symmetric bounds.
pub fn cmd_check_reversible<T: Scalar>(file: &ModelFile<T>, tol: &Tolerance<T>) -> CliResult<ReversibilityReport> {
    let witness = match &file.model {
        Model::Interval(b) => {
            let tight = tighten_bounds(b, tol)?;
            set_symmetry_violation(&tight, tol).map(|p| box_witness(tight.lower(), tight.upper(), p))
        }
        Model::Sequence(seq) => sequence_witness(seq, tol)?,
        Model::Law(law) => sequence_witness(&JointSequence::from_law(law), tol)?,
        Model::Weights(w) => symmetry_violation(w.matrix(), tol).map(|(x, y)| Witness {
            x,
            y,
            matrix: None,
            at_xy: w.matrix()[(x, y)].to_text(),
            at_yx: w.matrix()[(y, x)].to_text(),
        }),
        Model::WeightBox(b) => {
            let a = symmetry_violation(b.lower(), tol);
            let c = symmetry_violation(b.upper(), tol);
            let pair = match (a, c) {
                (Some(a), Some(c)) => Some(a.min(c)),
                (a, c) => a.or(c),
            };
            pair.map(|p| box_witness(b.lower(), b.upper(), p))
        }
    };
    Ok(ReversibilityReport { witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    fn sense(self) -> Sense {
        match self {
            Bound::Lower => Sense::Minimize,
            Bound::Upper => Sense::Maximize,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Bound::Lower => "lower",
            Bound::Upper => "upper",
        }
    }
}

/// A model and gamble reduced to one of the solvable cases.
#[derive(Debug, Clone)]
pub enum Query<T> {
    Precise(TransitionLaw<T>, PathGamble<T>),
    TwoStep(IntervalJointSet<T>, Matrix<T>),
    NStep(IntervalJointSet<T>, PathGamble<T>),
    Walk(IntervalWeightSet<T>, Matrix<T>),
}

impl<T: Scalar> Query<T> {
    /// Weight inputs with `horizon > 2` use the enclosing joint box.
    pub fn resolve(file: &ModelFile<T>, gamble: &Value, horizon: Option<usize>, tol: &Tolerance<T>) -> CliResult<Self> {
        let n = file.states.len();
        let (depth, values) = parse_gamble_table::<T>(gamble, n)?;
        let horizon = match (&file.model, horizon) {
            (_, Some(h)) => h,
            (Model::Law(law), None) => law.horizon(),
            (Model::Sequence(seq), None) => seq.horizon(),
            _ => depth,
        };
        if horizon < 2 {
            return Err(CliError::parse("horizon must be at least 2"));
        }
        let pair_gamble = |values: Vec<T>| -> CliResult<Matrix<T>> {
            if depth != 2 {
                return Err(CliError::parse(format!(
                    "gamble of depth {depth} does not fit horizon 2"
                )));
            }
            Ok(Matrix::from_vec(n, n, values)?)
        };
        let law_for = |law: &TransitionLaw<T>, values: Vec<T>| -> CliResult<Self> {
            if law.horizon() != horizon {
                return Err(CliError::parse(format!(
                    "model has horizon {}, requested {horizon}",
                    law.horizon()
                )));
            }
            Ok(Query::Precise(
                law.clone(),
                build_path_gamble(depth, values, n, horizon)?,
            ))
        };
        Ok(match &file.model {
            Model::Law(law) => law_for(law, values)?,
            Model::Sequence(seq) => law_for(&seq.to_law(), values)?,
            Model::Interval(b) if horizon == 2 => Query::TwoStep(b.clone(), pair_gamble(values)?),
            Model::Interval(b) => Query::NStep(b.clone(), build_path_gamble(depth, values, n, horizon)?),
            Model::Weights(_) | Model::WeightBox(_) => {
                let set = match &file.model {
                    Model::Weights(w) => IntervalWeightSet::degenerate(w),
                    Model::WeightBox(b) => b.clone(),
                    _ => unreachable!(),
                };
                if horizon == 2 {
                    Query::Walk(set, pair_gamble(values)?)
                } else {
                    Query::NStep(
                        enclosing_joint_box(&set, tol)?,
                        build_path_gamble(depth, values, n, horizon)?,
                    )
                }
            }
        })
    }

    pub fn horizon(&self) -> usize {
        match self {
            Query::Precise(_, f) | Query::NStep(_, f) => f.horizon(),
            Query::TwoStep(..) | Query::Walk(..) => 2,
        }
    }

    pub fn evaluate(&self, bound: Bound, budget: usize, tol: &Tolerance<T>) -> CliResult<T> {
        Ok(match (self, bound) {
            (Query::Precise(law, f), _) => law_expectation(law, f, budget)?,
            (Query::TwoStep(set, g), Bound::Lower) => lower_expectation_two_step(set, g, tol)?,
            (Query::TwoStep(set, g), Bound::Upper) => upper_expectation_two_step(set, g, tol)?,
            (Query::NStep(set, f), Bound::Lower) => lower_expectation_nstep(set, f, budget, tol)?,
            (Query::NStep(set, f), Bound::Upper) => upper_expectation_nstep(set, f, budget, tol)?,
            (Query::Walk(set, g), Bound::Lower) => walk_lower_expectation(set, g, tol)?,
            (Query::Walk(set, g), Bound::Upper) => walk_upper_expectation(set, g, tol)?,
        })
    }

    /// The LP solved by [`Query::evaluate`]; `None` for precise models.
    pub fn program(&self, bound: Bound, budget: usize) -> CliResult<Option<LinearProgram<T>>> {
        let sense = bound.sense();
        Ok(match self {
            Query::Precise(..) => None,
            Query::TwoStep(set, g) => Some(build_two_step_program(set, g, sense)?),
            Query::NStep(set, f) => Some(build_nstep_program(set, f, sense, budget)?),
            Query::Walk(set, g) => Some(build_walk_program(set, g, sense)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub method: String,
    pub value: f64,
}

/// Brute-force reference value, always in float mode.
pub fn run_oracle(query: &Query<f64>, bound: Bound, tol: &Tolerance<f64>) -> CliResult<OracleReport> {
    let budget = DEFAULT_GRID_BUDGET;
    Ok(match query {
        Query::Precise(law, f) => OracleReport {
            method: "path enumeration".into(),
            value: law_expectation(law, f, budget)?,
        },
        Query::TwoStep(set, g) => {
            let grid = GridSpec::new(ORACLE_STEP_TWO, budget)?;
            let value = match bound {
                Bound::Lower => grid_min_expectation(set, g, &grid, tol)?,
                Bound::Upper => grid_max_expectation(set, g, &grid, tol)?,
            };
            OracleReport {
                method: format!("joint grid, step {ORACLE_STEP_TWO}"),
                value,
            }
        }
        Query::NStep(set, f) => {
            let grid = GridSpec::new(ORACLE_STEP_SEQUENCE, budget)?;
            let laws = enumerate_compatible_laws(set, f.horizon(), &grid, tol)?;
            let values = laws
                .iter()
                .map(|law| law_expectation(law, f, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let value = match bound {
                Bound::Lower => values.iter().copied().reduce(f64::min),
                Bound::Upper => values.iter().copied().reduce(f64::max),
            }
            .ok_or(imprecise_markov::Error::NoFeasibleGridPoint)?;
            OracleReport {
                method: format!("{} compatible grid laws, step {ORACLE_STEP_SEQUENCE}", laws.len()),
                value,
            }
        }
        Query::Walk(set, g) => {
            let grid = GridSpec::new(ORACLE_STEP_WALK, budget)?;
            let value = match bound {
                Bound::Lower => grid_min_walk_expectation(set, g, &grid)?,
                Bound::Upper => -grid_min_walk_expectation(set, &g.map(|v| -v), &grid)?,
            };
            OracleReport {
                method: format!("weight grid, step {ORACLE_STEP_WALK}"),
                value,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationReport<T> {
    pub bound: Bound,
    pub horizon: usize,
    pub value: T,
    pub oracle: Option<OracleReport>,
}

impl<T: Scalar> ExpectationReport<T> {
    pub fn gap(&self) -> Option<f64> {
        self.oracle.as_ref().map(|o| (self.value.to_f64() - o.value).abs())
    }

    pub fn text(&self) -> String {
        let mut out = format!(
            "{} expectation (N = {}): {}\n",
            self.bound.name(),
            self.horizon,
            format_significant(self.value.to_f64(), 12)
        );
        if T::EXACT {
            out += &format!("exact: {}\n", self.value.to_text());
        }
        if let (Some(o), Some(gap)) = (&self.oracle, self.gap()) {
            out += &format!("oracle ({}): {}\n", o.method, format_significant(o.value, 12));
            out += &format!("gap: {gap:.3e}\n");
        }
        out
    }

    pub fn json(&self) -> Value {
        let mut v = json!({
            "sense": self.bound.name(),
            "horizon": self.horizon,
            "value": scalar_value(&self.value),
            "approx": format_significant(self.value.to_f64(), 12),
        });
        if let (Some(o), Some(gap)) = (&self.oracle, self.gap()) {
            v["oracle"] = json!({ "method": o.method, "value": o.value, "gap": gap });
        }
        v
    }
}

/// `x` rounded to `digits` significant digits in positional notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits - 1, x);
    }
    // the exponent after rounding, so 9.99.. -> 10.0 keeps the digit count
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i64 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (digits as i64 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum WalkReport<T> {
    Single {
        transition: StochasticMatrix<T>,
        stationary: Option<ProbVector<T>>,
        joint: Matrix<T>,
    },
    Box(IntervalJointSet<T>),
}

impl<T: Scalar> WalkReport<T> {
    pub fn text(&self) -> String {
        let mat = |m: &Matrix<T>| serde_json::to_string(&matrix_value(m)).expect("serializable");
        match self {
            WalkReport::Single {
                transition,
                stationary,
                joint,
            } => {
                let mut out = format!("transition: {}\n", mat(transition.matrix()));
                match stationary {
                    Some(pi) => {
                        out += &format!(
                            "stationary: {}\n",
                            serde_json::to_string(&vector_value(pi.entries())).expect("serializable")
                        )
                    }
                    None => out += "stationary: not unique\n",
                }
                out + &format!("joint: {}\n", mat(joint))
            }
            WalkReport::Box(b) => format!("joint lower: {}\njoint upper: {}\n", mat(b.lower()), mat(b.upper())),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            WalkReport::Single {
                transition,
                stationary,
                joint,
            } => json!({
                "transition": matrix_value(transition.matrix()),
                "stationary": stationary.as_ref().map(|p| vector_value(p.entries())),
                "joint": matrix_value(joint),
            }),
            WalkReport::Box(b) => {
                json!({ "joint_lower": matrix_value(b.lower()), "joint_upper": matrix_value(b.upper()) })
            }
        }
    }
}

fn single_walk<T: Scalar>(w: &WeightMatrix<T>, tol: &Tolerance<T>) -> CliResult<WalkReport<T>> {
    let transition = walk_transition(w)?;
    let stationary = if w.is_directed() {
        stationary_distribution(&transition, tol).ok()
    } else {
        Some(walk_stationary(w)?)
    };
    Ok(WalkReport::Single {
        transition,
        stationary,
        joint: walk_joint(w).matrix().clone(),
    })
}

/// Transition matrix, stationary law and joint matrix of a weighted walk;
/// for a weight box, the enclosing interval joint box.
pub fn cmd_walk<T: Scalar>(file: &ModelFile<T>, tol: &Tolerance<T>) -> CliResult<WalkReport<T>> {
    match &file.model {
        Model::Weights(w) => single_walk(w, tol),
        Model::WeightBox(b) => Ok(WalkReport::Box(enclosing_joint_box(b, tol)?)),
        _ => Err(CliError::parse("walk needs a weights model")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(19.0 / 75.0, 12), "0.253333333333");
        assert_eq!(format_significant(1.0, 12), "1.00000000000");
        assert_eq!(format_significant(-2.5, 3), "-2.50");
        assert_eq!(format_significant(1234.5678, 6), "1234.57");
        assert_eq!(format_significant(9.9999999, 3), "10.0");
        assert_eq!(format_significant(0.0, 4), "0.000");
        assert_eq!(format_significant(0.00012345, 2), "0.00012");
    }
}
