//! Exact reproduction of the reference worked examples.
//!
//! Every check compares a computed value, rendered as fractions, against the
//! corresponding string in [`ExpectedValues`]. Tests mutate a field to confirm
//! that a wrong constant is reported.

use imprecise_markov::credal::{
    check_invariant_hull, convex_hull_membership, hull_coefficients, is_symmetric_set, minimal_interval_hull,
};
use imprecise_markov::joint::forward_pair_from;
use imprecise_markov::walk::{transition_set_nonconvexity_witness, walk_joint, walk_transition};
use imprecise_markov::{
    joint_from, q_reverse, stationary_distribution, IntervalJointSet, JointMatrix, Matrix, MatrixSet, ProbVector,
    Rational, Scalar, StochasticMatrix, Tolerance, TransitionLaw, VertexCredalSet,
};
use serde::Serialize;

use crate::commands::cmd_check_reversible;
use crate::error::CliResult;
use crate::model::{Model, ModelFile};

type Q = Rational;

pub const STATIONARY_SET: &str = "stationary credal set";
pub const FORWARD_PAIR: &str = "forward pair";
pub const INTERVAL_BOX: &str = "interval joint box";
pub const WEIGHTED_WALK: &str = "weighted walk";

/// Reference values, one string per check.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedValues {
    pub pi1: String,
    pub pi2: String,
    pub u: String,
    pub reverse_p1_u: String,
    pub w: String,
    pub v_image: String,
    pub v_image_below_u: String,
    pub v_image_in_hull: String,
    pub invariant_forward: String,
    pub invariant_with_reverse: String,

    pub forward_p1: String,
    pub forward_p2: String,
    pub pushed: String,
    pub pushed_in_hull: String,

    pub box_q1: String,
    pub box_q2: String,
    pub box_lower: String,
    pub box_upper: String,
    pub box_symmetric: String,
    pub box_verdict: String,

    pub walk_p1: String,
    pub walk_p2: String,
    pub walk_midpoint: String,
    pub walk_midpoint_in_hull: String,
    pub joint_midpoint_in_hull: String,
    pub joint_weights: String,
}

impl ExpectedValues {
    pub fn reference() -> Self {
        let s = |x: &str| x.to_string();
        ExpectedValues {
            pi1: s("(7/15, 8/15)"),
            pi2: s("(5/9, 4/9)"),
            u: s("(19/45, 26/45)"),
            reverse_p1_u: s("[[19/110, 91/110], [76/115, 39/115]]"),
            w: s("(22/45, 23/45)"),
            v_image: s("(8873/22770, 13897/22770)"),
            v_image_below_u: s("true"),
            v_image_in_hull: s("false"),
            invariant_forward: s("invariant"),
            invariant_with_reverse: s("vertex 1, matrix 2"),

            forward_p1: s("[[1/3, 2/3], [3/7, 4/7]]"),
            forward_p2: s("[[1/2, 1/2], [1/2, 1/2]]"),
            pushed: s("(41/105, 64/105)"),
            pushed_in_hull: s("false"),

            box_q1: s("[[7/75, 28/75], [28/75, 4/25]]"),
            box_q2: s("[[1/3, 2/9], [2/9, 2/9]]"),
            box_lower: s("[[7/75, 2/9], [2/9, 4/25]]"),
            box_upper: s("[[1/3, 28/75], [28/75, 2/9]]"),
            box_symmetric: s("true"),
            box_verdict: s("REVERSIBLE"),

            walk_p1: s("[[1/4, 3/4], [3/5, 2/5]]"),
            walk_p2: s("[[1/6, 5/6], [5/7, 2/7]]"),
            walk_midpoint: s("[[1/5, 4/5], [2/3, 1/3]]"),
            walk_midpoint_in_hull: s("false"),
            joint_midpoint_in_hull: s("true"),
            joint_weights: s("(9/22, 13/22)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub section: &'static str,
    pub name: &'static str,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

pub fn fmt_vec<T: Scalar>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(Scalar::to_text).collect();
    format!("({})", parts.join(", "))
}

pub fn fmt_mat<T: Scalar>(m: &Matrix<T>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let parts: Vec<String> = m.row(i).iter().map(Scalar::to_text).collect();
            format!("[{}]", parts.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

struct Recorder {
    section: &'static str,
    out: Vec<Check>,
}

impl Recorder {
    fn check(&mut self, name: &'static str, expected: &str, actual: String) {
        self.out.push(Check {
            section: self.section,
            name,
            pass: actual == expected,
            expected: expected.to_string(),
            actual,
        });
    }
}

fn stochastic(rows: &[&[(i64, i64)]]) -> CliResult<StochasticMatrix<Q>> {
    Ok(StochasticMatrix::from_ratios(rows)?)
}

fn stationary_set(e: &ExpectedValues, r: &mut Recorder) -> CliResult<()> {
    let tol = Tolerance::<Q>::zero();
    let p1 = stochastic(&[&[(1, 5), (4, 5)], &[(7, 10), (3, 10)]])?;
    let p2 = stochastic(&[&[(3, 5), (2, 5)], &[(1, 2), (1, 2)]])?;
    let pi1 = stationary_distribution(&p1, &tol)?;
    let pi2 = stationary_distribution(&p2, &tol)?;
    r.check("stationary distribution of P1", &e.pi1, fmt_vec(pi1.entries()));
    r.check("stationary distribution of P2", &e.pi2, fmt_vec(pi2.entries()));

    let v = pi2.clone();
    let law = TransitionLaw::new(v.clone(), vec![p1.clone()])?;
    let u = law.marginal_at(2)?;
    r.check("u = pi2 P1", &e.u, fmt_vec(u.entries()));

    let rev = q_reverse(&p1, &u, &tol)?;
    r.check("u-reverse of P1", &e.reverse_p1_u, fmt_mat(rev.matrix()));
    r.check("w = u P1", &e.w, fmt_vec(u.propagate(&p1)?.entries()));

    let image = v.propagate(&rev)?;
    r.check("v pushed through the u-reverse", &e.v_image, fmt_vec(image.entries()));
    r.check(
        "first coordinate below u(0)",
        &e.v_image_below_u,
        (image[0] < u[0]).to_string(),
    );
    let hull = [u.clone(), v.clone()];
    r.check(
        "pushed v inside co{u, v}",
        &e.v_image_in_hull,
        convex_hull_membership(&image, &hull, &tol)?.to_string(),
    );

    let verts = VertexCredalSet::new(hull.to_vec())?;
    let forward = check_invariant_hull(&verts, &MatrixSet::new(vec![p1.clone(), p2.clone()], true)?, &tol)?;
    r.check(
        "co{u, v} invariant under {P1, P2}",
        &e.invariant_forward,
        witness_text(forward),
    );
    let with_rev = check_invariant_hull(&verts, &MatrixSet::new(vec![p1, p2, rev], true)?, &tol)?;
    r.check(
        "co{u, v} invariant with the reverse added",
        &e.invariant_with_reverse,
        witness_text(with_rev),
    );
    Ok(())
}

fn witness_text<T>(w: Option<imprecise_markov::credal::HullWitness<T>>) -> String {
    match w {
        None => "invariant".into(),
        Some(w) => format!("vertex {}, matrix {}", w.vertex, w.matrix),
    }
}

fn forward_pair(e: &ExpectedValues, r: &mut Recorder) -> CliResult<()> {
    let tol = Tolerance::<Q>::zero();
    let q1 = JointMatrix::<Q>::from_ratios(&[&[(1, 10), (2, 10)], &[(3, 10), (4, 10)]])?;
    let q2 = JointMatrix::<Q>::from_ratios(&[&[(2, 10), (2, 10)], &[(3, 10), (3, 10)]])?;
    let (_, p1) = forward_pair_from(&q1);
    let (l2, p2) = forward_pair_from(&q2);
    r.check("transition matrix of Q1", &e.forward_p1, fmt_mat(p1.matrix()));
    r.check("transition matrix of Q2", &e.forward_p2, fmt_mat(p2.matrix()));
    let pushed = l2.propagate(&p1)?;
    r.check("left marginal of Q2 through P1", &e.pushed, fmt_vec(pushed.entries()));
    let rights: Vec<ProbVector<Q>> = vec![q1.right_marginal(), q2.right_marginal()];
    r.check(
        "pushed marginal inside co of right marginals",
        &e.pushed_in_hull,
        convex_hull_membership(&pushed, &rights, &tol)?.to_string(),
    );
    Ok(())
}

fn interval_box(e: &ExpectedValues, r: &mut Recorder) -> CliResult<()> {
    let tol = Tolerance::<Q>::zero();
    let p1 = stochastic(&[&[(1, 5), (4, 5)], &[(7, 10), (3, 10)]])?;
    let p2 = stochastic(&[&[(3, 5), (2, 5)], &[(1, 2), (1, 2)]])?;
    let q1 = joint_from(&stationary_distribution(&p1, &tol)?, &p1)?;
    let q2 = joint_from(&stationary_distribution(&p2, &tol)?, &p2)?;
    r.check("stationary joint of P1", &e.box_q1, fmt_mat(q1.matrix()));
    r.check("stationary joint of P2", &e.box_q2, fmt_mat(q2.matrix()));
    let hull: IntervalJointSet<Q> = minimal_interval_hull(&[q1, q2])?;
    r.check("interval hull lower bound", &e.box_lower, fmt_mat(hull.lower()));
    r.check("interval hull upper bound", &e.box_upper, fmt_mat(hull.upper()));
    r.check(
        "bounds symmetric",
        &e.box_symmetric,
        is_symmetric_set(&hull, &tol).to_string(),
    );
    let file = ModelFile {
        states: vec!["0".into(), "1".into()],
        model: Model::Interval(hull),
        tolerance_override: None,
    };
    let verdict = cmd_check_reversible(&file, &tol)?;
    r.check(
        "check-reversible verdict",
        &e.box_verdict,
        verdict.text(&file.states).trim().to_string(),
    );
    Ok(())
}

fn weighted_walk(e: &ExpectedValues, r: &mut Recorder) -> CliResult<()> {
    let tol = Tolerance::<Q>::zero();
    let wit = transition_set_nonconvexity_witness::<Q>()?;
    let t1 = walk_transition(&wit.w1)?;
    let t2 = walk_transition(&wit.w2)?;
    r.check("transition matrix of W1", &e.walk_p1, fmt_mat(t1.matrix()));
    r.check("transition matrix of W2", &e.walk_p2, fmt_mat(t2.matrix()));
    r.check(
        "transition matrix of the midpoint",
        &e.walk_midpoint,
        fmt_mat(wit.midpoint.matrix()),
    );
    r.check(
        "midpoint transition inside the hull",
        &e.walk_midpoint_in_hull,
        wit.in_hull.to_string(),
    );

    let half = Q::ratio(1, 2);
    let mid = imprecise_markov::WeightMatrix::new(
        wit.w1
            .matrix()
            .zip_with(wit.w2.matrix(), |a, b| (a.clone() + b.clone()) * half.clone())?,
        false,
    )?;
    let joints = [walk_joint(&wit.w1), walk_joint(&wit.w2)];
    let coeffs = hull_coefficients(&walk_joint(&mid), &joints, &tol)?;
    r.check(
        "midpoint joint inside the hull",
        &e.joint_midpoint_in_hull,
        coeffs.is_some().to_string(),
    );
    r.check(
        "mixture weights of the midpoint joint",
        &e.joint_weights,
        coeffs.map(|c| fmt_vec(&c)).unwrap_or_else(|| "none".into()),
    );
    Ok(())
}

type Section = fn(&ExpectedValues, &mut Recorder) -> CliResult<()>;

/// All checks in section order.
pub fn reproduce(expected: &ExpectedValues) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let sections: [(&'static str, Section); 4] = [
        (STATIONARY_SET, stationary_set),
        (FORWARD_PAIR, forward_pair),
        (INTERVAL_BOX, interval_box),
        (WEIGHTED_WALK, weighted_walk),
    ];
    for (section, run) in sections {
        let mut r = Recorder {
            section,
            out: Vec::new(),
        };
        run(expected, &mut r)?;
        out.extend(r.out);
    }
    Ok(out)
}

pub fn render_text(checks: &[Check]) -> String {
    let mut out = String::new();
    let mut current = "";
    for c in checks {
        if c.section != current {
            current = c.section;
            out += &format!("== {current}\n");
        }
        if c.pass {
            out += &format!("PASS {}: {}\n", c.name, c.actual);
        } else {
            out += &format!("FAIL {}: expected {}, got {}\n", c.name, c.expected, c.actual);
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    out += &format!("{} checks, {} failed\n", checks.len(), failed);
    out
}
